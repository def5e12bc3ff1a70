#pragma once

// Electric (coned-off) lengths of words and conjugacy classes relative to a
// peripheral subgroup system. A cone transit costs 1, so a step is either a
// basis letter or right multiplication by a nontrivial peripheral element.
//
// Two computation routes:
//  * peripherals generated by disjoint sets of basis letters admit an exact
//    linear-time block count (peripheral cancellation cannot cross a
//    non-peripheral letter);
//  * otherwise a Dijkstra over the ball of radius ball_radius, with
//    peripheral moves enumerated up to peripheral_enumeration_bound.
//    Distances are computed over ball-confined paths. The exactness flag is
//    set when peripheral_enumeration_bound >= 2*ball_radius, which makes the
//    enumeration provably complete for every peripheral move between ball
//    elements (any such move p = g^{-1}h has |p| <= |g| + |h|); a geodesic
//    that exits the ball is not considered, so values near the boundary are
//    conservative upper bounds.

#include "fbc/laminations.hpp"
#include "fbc/subgroups.hpp"
#include "fbc/words.hpp"

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fbc {

struct out_of_ball : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ElectricLength {
  long length = 0;
  bool exact = true;
};

class ElectricSpace {
 public:
  ElectricSpace(int rank, SubgroupSystem peripherals, int ball_radius,
                int peripheral_enumeration_bound)
      : rank_(rank),
        peripherals_(std::move(peripherals)),
        ball_radius_(ball_radius),
        enum_bound_(peripheral_enumeration_bound) {
    if (ball_radius_ <= 0 || enum_bound_ <= 0)
      throw input_error("ElectricSpace: bounds must be positive");
    detect_letter_support();
  }

  int rank() const { return rank_; }
  int ball_radius() const { return ball_radius_; }
  int enumeration_bound() const { return enum_bound_; }
  const SubgroupSystem& peripherals() const { return peripherals_; }
  bool has_letter_support_fast_path() const { return fast_path_; }
  bool peripherals_malnormal() const {
    return peripherals_.malnormal_checked.value_or(false);
  }

  // letter -> component index, or -1
  int component_of_letter(Letter x) const {
    int g = generator_index(x);
    return g <= static_cast<int>(letter_component_.size()) ? letter_component_[g - 1] : -1;
  }

  ElectricLength length(const ReducedWord& w) const {
    if (peripherals_.trivial()) return {static_cast<long>(w.size()), true};
    if (fast_path_) return {block_count(w.letters(), /*cyclic=*/false), true};
    return length_via_search(w);
  }

  // The general route (ball search with enumerated peripheral moves),
  // regardless of whether the fast block route applies. The oracle suite
  // cross-validates the two.
  ElectricLength length_via_search(const ReducedWord& w) const {
    if (peripherals_.trivial()) return {static_cast<long>(w.size()), true};
    if (static_cast<int>(w.size()) > ball_radius_)
      throw out_of_ball("electric length: word of length " + std::to_string(w.size()) +
                        " outside ball of radius " + std::to_string(ball_radius_));
    return dijkstra(w);
  }

  // Minimum over all representatives of the class, bounded by rotations and
  // conjugators of length <= conjugator_bound on the general route. The
  // fast route needs no conjugators: blocks are rotation and conjugation
  // invariant on the cyclically reduced core.
  ElectricLength conjugacy_length(const CyclicWord& c, int conjugator_bound = 1) const {
    if (c.empty()) return {0, true};
    if (peripherals_.trivial()) return {static_cast<long>(c.size()), true};
    if (fast_path_) return {block_count(c.letters(), /*cyclic=*/true), true};

    if (static_cast<int>(c.size()) > ball_radius_)
      throw out_of_ball("electric conjugacy length: class representative outside ball");
    ElectricLength best;
    bool have = false;
    std::set<std::vector<Letter>> tried;
    auto consider = [&](const ReducedWord& rep) {
      if (static_cast<int>(rep.size()) > ball_radius_) return;
      if (!tried.insert(rep.letters()).second) return;
      ElectricLength el = length(rep);
      if (!have || el.length < best.length ||
          (el.length == best.length && el.exact && !best.exact)) {
        best = el;
        have = true;
      }
    };
    const auto& ls = c.letters();
    for (std::size_t r = 0; r < ls.size(); ++r) {
      std::vector<Letter> rot(ls.begin() + r, ls.end());
      rot.insert(rot.end(), ls.begin(), ls.begin() + r);
      ReducedWord rep(rot);
      consider(rep);
      if (conjugator_bound > 0) {
        std::vector<ReducedWord> conjs;
        enumerate_words(conjugator_bound, conjs);
        for (const auto& u : conjs) consider(concat(concat(u, rep), u.inverted()));
      }
    }
    return best;
  }

  // All peripheral elements with |p| <= bound, per component.
  const std::vector<std::vector<ReducedWord>>& peripheral_elements() const {
    if (elements_.empty() && !peripherals_.trivial()) {
      for (const auto& comp : peripherals_.components)
        elements_.push_back(comp.enumerate_elements(enum_bound_));
    }
    return elements_;
  }

 private:
  void detect_letter_support() {
    fast_path_ = !peripherals_.trivial();
    letter_component_.assign(rank_, -1);
    for (std::size_t i = 0; i < peripherals_.components.size() && fast_path_; ++i) {
      auto sup = peripherals_.components[i].basis_letter_support();
      if (!sup) {
        fast_path_ = false;
        break;
      }
      for (int g : *sup) {
        if (g > rank_) throw input_error("peripheral letter outside basis");
        if (letter_component_[g - 1] != -1) {
          fast_path_ = false;  // overlapping supports: no disjointness, no fast path
          break;
        }
        letter_component_[g - 1] = static_cast<int>(i);
      }
    }
    if (!fast_path_) letter_component_.assign(rank_, -1);
  }

  // Minimal number of factors, each a basis letter or a word over one
  // component's letters. Maximal same-component runs are optimal.
  long block_count(const std::vector<Letter>& w, bool cyclic) const {
    const std::size_t n = w.size();
    if (n == 0) return 0;
    auto comp_at = [&](std::size_t i) { return component_of_letter(w[i]); };
    if (cyclic) {
      // whole word in one component: a single cone transit
      int c0 = comp_at(0);
      if (c0 >= 0) {
        bool all = true;
        for (std::size_t i = 1; i < n; ++i) all = all && comp_at(i) == c0;
        if (all) return 1;
      }
      // rotate to a block boundary, then count linearly
      std::size_t start = 0;
      for (std::size_t i = 0; i < n; ++i) {
        int prev = comp_at((i + n - 1) % n);
        int cur = comp_at(i);
        if (prev < 0 || prev != cur) {
          start = i;
          break;
        }
      }
      std::vector<Letter> rot(w.begin() + start, w.end());
      rot.insert(rot.end(), w.begin(), w.begin() + start);
      return block_count(rot, false);
    }
    long cost = 0;
    std::size_t i = 0;
    while (i < n) {
      int c = comp_at(i);
      std::size_t j = i + 1;
      if (c >= 0)
        while (j < n && comp_at(j) == c) ++j;
      cost += 1;
      i = j;
    }
    return cost;
  }

  void enumerate_words(int len_bound, std::vector<ReducedWord>& out) const {
    std::vector<Letter> cur;
    std::function<void()> grow = [&]() {
      if (!cur.empty()) out.emplace_back(cur);
      if (static_cast<int>(cur.size()) >= len_bound) return;
      for (int key = 0; key < 2 * rank_; ++key) {
        Letter x = static_cast<Letter>((key / 2 + 1) * (key % 2 == 0 ? 1 : -1));
        if (!cur.empty() && cur.back() == inverse(x)) continue;
        cur.push_back(x);
        grow();
        cur.pop_back();
      }
    };
    grow();
  }

  ElectricLength dijkstra(const ReducedWord& target) const {
    const auto& pelems = peripheral_elements();
    // Unit edge costs: plain BFS over the ball.
    std::map<std::vector<Letter>, long> dist;
    std::deque<std::vector<Letter>> queue;
    dist[{}] = 0;
    queue.push_back({});
    long found = -1;
    while (!queue.empty()) {
      auto g = queue.front();
      queue.pop_front();
      long dg = dist[g];
      if (g == target.letters()) {
        found = dg;
        break;
      }
      auto push = [&](const ReducedWord& h) {
        if (static_cast<int>(h.size()) > ball_radius_) return;
        auto [it, inserted] = dist.try_emplace(h.letters(), dg + 1);
        if (inserted) queue.push_back(h.letters());
      };
      ReducedWord gw{std::vector<Letter>(g)};
      for (int key = 0; key < 2 * rank_; ++key) {
        Letter x = static_cast<Letter>((key / 2 + 1) * (key % 2 == 0 ? 1 : -1));
        push(concat(gw, ReducedWord({x})));
      }
      for (const auto& comp : pelems)
        for (const auto& p : comp) push(concat(gw, p));
    }
    if (found < 0)
      throw out_of_ball("electric length: target unreachable within the ball");
    return {found, enum_bound_ >= 2 * ball_radius_};
  }

  int rank_;
  SubgroupSystem peripherals_;
  int ball_radius_;
  int enum_bound_;
  bool fast_path_ = false;
  std::vector<int> letter_component_;
  mutable std::vector<std::vector<ReducedWord>> elements_;
};

struct ComparabilityReport {
  double constant = 0;  // max of max(ratio, 1/ratio)
  struct Item {
    CyclicWord cls;
    long relative;
    long electric;
    double ratio;
  };
  std::vector<Item> items;
  int corpus_size = 0;
};

// Empirical comparability constant between |.|_{<Z,sigma>} and ||.||_el over a
// corpus of non-carried classes.
inline ComparabilityReport comparability_constant(const ElectricSpace& space,
                                                  const NonattractingData& d,
                                                  const GraphSelfMap& f,
                                                  const std::vector<CyclicWord>& corpus,
                                                  int conjugator_bound = 1) {
  if (corpus.empty())
    throw precondition_error("comparability_constant: empty corpus (no data)");
  ComparabilityReport rep;
  rep.corpus_size = static_cast<int>(corpus.size());
  for (const auto& c : corpus) {
    if (d.carries_class(c))
      throw precondition_error("comparability_constant: corpus class " + to_string(c) +
                               " is carried by the nonattracting system");
    long rel = relative_length(c, f, d);
    long el = space.conjugacy_length(c, conjugator_bound).length;
    if (el == 0)
      throw precondition_error("comparability_constant: zero electric length for " +
                               to_string(c));
    double ratio = static_cast<double>(rel) / static_cast<double>(el);
    rep.items.push_back({c, rel, el, ratio});
    rep.constant = std::max(rep.constant, std::max(ratio, 1.0 / ratio));
  }
  return rep;
}

}  // namespace fbc
