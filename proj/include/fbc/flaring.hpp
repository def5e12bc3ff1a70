#pragma once

// Legality ratios and the flaring verifiers. All searches are bounded and
// report their bounds; absence of a witness within a bound is never treated
// as a refutation.

#include "fbc/electric.hpp"
#include "fbc/laminations.hpp"
#include "fbc/parallel.hpp"

#include <array>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

namespace fbc {

struct parameter_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Finite stand-in for the generic leaves: all iterates f^k(E) of the H_r
// edges up to a declared depth. Membership of a path means being a subpath
// of some library element, in either orientation.
class LeafLibrary {
 public:
  LeafLibrary() = default;
  LeafLibrary(const GraphSelfMap& f, int r, int depth) : stratum_(r), depth_(depth) {
    for (int e : f.stratum_edges(r)) {
      EdgePath p{forward_dir(e)};
      segments_.push_back(p);
      for (int k = 1; k <= depth; ++k) {
        p = f.map_path(p);
        segments_.push_back(p);
      }
    }
  }

  int depth() const { return depth_; }
  int stratum() const { return stratum_; }
  const std::vector<EdgePath>& segments() const { return segments_; }

  const EdgePath& longest_segment() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < segments_.size(); ++i)
      if (segments_[i].size() > segments_[best].size()) best = i;
    return segments_[best];
  }

  bool contains(const EdgePath& q) const {
    for (const auto& s : segments_)
      if (contains_segment(s, q, /*cyclic=*/false)) return true;
    return false;
  }

 private:
  std::vector<EdgePath> segments_;
  int stratum_ = 0;
  int depth_ = 0;
};

struct LegalityReport {
  BigRat value;  // in [0, 1]
  struct Segment {
    std::size_t begin;  // position in the scanned rotation
    long length;
  };
  std::vector<Segment> legal_segments;  // qualifying segments (length >= C)
  BigRat C_used;
  long relative_len = 0;

  double value_double() const { return static_cast<double>(value); }
};

namespace detail {

// Longest window starting at i that is r-legal and a library subpath.
inline long qualifying_run(const GraphSelfMap& f, const EdgePath& p, std::size_t i, int r,
                           const LeafLibrary& lib, bool cyclic) {
  const std::size_t n = p.size();
  const std::size_t cap = cyclic ? n : n - i;
  EdgePath window;
  long best = 0;
  for (std::size_t l = 1; l <= cap; ++l) {
    window.push_back(p[(i + l - 1) % n]);
    if (!lib.contains(window)) break;
    // r-legality: height r and all height-r illegal turns absent; prefixes of
    // height < r may still grow into an r-legal window, so only record when
    // the height clause holds.
    bool legal = true;
    if (window.size() >= 2) {
      Turn t(reverse_dir(window[window.size() - 2]), window.back());
      int h = std::max(f.edge_height(edge_of(t.a)), f.edge_height(edge_of(t.b)));
      if (h >= r && !f.is_turn_legal(t)) legal = false;
    }
    if (!legal) break;
    if (f.path_height(window) == r) best = static_cast<long>(l);
  }
  return best;
}

}  // namespace detail

// H_r-legality of a circuit or path: qualifying segments are the maximal
// subpaths that are r-legal subpaths of library leaves; those of length >= C
// contribute, normalized by the length relative to <Z, sigma>.
inline LegalityReport legality(const EdgePath& p, const GraphSelfMap& f, int r,
                               const BigRat& C, const NonattractingData& d,
                               const LeafLibrary& lib, bool cyclic = true) {
  if (C <= f.critical_constant(r))
    throw parameter_error("legality: C must exceed the critical constant");
  LegalityReport rep;
  rep.C_used = C;
  rep.relative_len = relative_length(p, d, cyclic);
  rep.value = 0;
  if (rep.relative_len == 0 || p.empty()) return rep;

  const std::size_t n = p.size();
  std::vector<long> run(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    run[i] = detail::qualifying_run(f, p, i, r, lib, cyclic);

  // keep maximal intervals only
  long total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (run[i] == 0) continue;
    bool dominated = false;
    for (std::size_t j = 0; j < n && !dominated; ++j) {
      if (j == i || run[j] == 0) continue;
      // does [j, j+run_j) strictly contain [i, i+run_i)?
      long offset = static_cast<long>((i + n - j) % n);
      if (offset < run[j] && offset + run[i] <= run[j] &&
          (run[j] > run[i] || j < i))
        dominated = true;
    }
    if (dominated) continue;
    if (BigRat(run[i]) >= C) {
      rep.legal_segments.push_back({i, run[i]});
      total += run[i];
    }
  }
  if (total == 0) return rep;
  rep.value = BigRat(total) / BigRat(rep.relative_len);
  if (rep.value > 1) rep.value = 1;
  return rep;
}

inline LegalityReport legality(const CyclicWord& c, const GraphSelfMap& f, int r,
                               const BigRat& C, const NonattractingData& d,
                               const LeafLibrary& lib) {
  return legality(f.graph().realize_class(c), f, r, C, d, lib, /*cyclic=*/true);
}

// Everything the flaring tests need about one side of an automorphism. Owns
// its graph map so bundles stay self-contained.
struct SideData {
  GraphSelfMap map;
  int stratum = 0;
  BigRat C;
  NonattractingData nas;
  LeafLibrary library;

  static SideData make(GraphSelfMap f, int stratum, int attraction_bound,
                       int library_depth, const BigRat& C_margin = BigRat(1)) {
    SideData s{std::move(f)};
    s.stratum = stratum;
    s.nas = nonattracting_system(s.map, stratum, attraction_bound);
    s.library = LeafLibrary(s.map, stratum, library_depth);
    s.C = s.map.critical_constant(stratum) + C_margin;
    return s;
  }
};

struct DichotomyResult {
  BigRat epsilon_found;               // largest grid value <= the observed minimum
  std::vector<CyclicWord> failures;   // items with both legalities zero
  std::vector<std::pair<BigRat, BigRat>> per_item;  // (fwd, bwd) legalities
  int iterate = 0;
};

// The legality dichotomy at exponent M: every non-carried class must gain
// legality >= epsilon in at least one direction.
inline DichotomyResult legality_dichotomy_test(const std::vector<CyclicWord>& corpus,
                                               const SideData& fwd, const SideData& bwd,
                                               const FreeAutomorphism& phi, int M) {
  DichotomyResult out;
  out.iterate = M;
  std::optional<BigRat> min_max;
  for (const auto& c : corpus) {
    if (fwd.nas.carries_class(c))
      throw precondition_error("legality_dichotomy_test: corpus class " + to_string(c) +
                               " is carried by the nonattracting system");
    CyclicWord cf = iterate_class(phi, c, M);
    CyclicWord cb = iterate_class(phi, c, -M);
    BigRat lf = legality(cf, fwd.map, fwd.stratum, fwd.C, fwd.nas, fwd.library).value;
    BigRat lb = legality(cb, bwd.map, bwd.stratum, bwd.C, bwd.nas, bwd.library).value;
    out.per_item.emplace_back(lf, lb);
    BigRat mx = std::max(lf, lb);
    if (mx == 0) out.failures.push_back(c);
    if (!min_max || mx < *min_max) min_max = mx;
  }
  // snap down to the fixed grid {1, 1/2, ..., 2^-10}; 0 if below
  out.epsilon_found = 0;
  if (min_max && *min_max > 0) {
    BigRat eps(1);
    for (int k = 0; k <= 10; ++k) {
      if (eps <= *min_max) {
        out.epsilon_found = eps;
        break;
      }
      eps /= 2;
    }
  }
  return out;
}

// Smallest m <= m_bound with |f^m(alpha)|_{<Z,s>} >= A |alpha|_{<Z,s>}.
inline std::optional<int> growth_flare_test(const CyclicWord& alpha, const SideData& side,
                                            const FreeAutomorphism& phi, const BigRat& epsilon,
                                            const BigRat& A, int m_bound) {
  BigRat leg = legality(alpha, side.map, side.stratum, side.C, side.nas, side.library).value;
  if (leg < epsilon)
    throw precondition_error("growth_flare_test: legality " + std::to_string(
                                 static_cast<double>(leg)) + " below epsilon");
  long base = relative_length(alpha, side.map, side.nas);
  CyclicWord cur = alpha;
  for (int m = 0; m <= m_bound; ++m) {
    long rel = relative_length(cur, side.map, side.nas);
    if (BigRat(rel) >= A * BigRat(base)) return m;
    if (m < m_bound) cur = iterate_class(phi, cur, 1);
  }
  return std::nullopt;
}

enum class FlareItemStatus { Pass, Fail, OutOfBall, PreconditionBreach };

struct FlaringVerdict {
  long constant_target = 3;            // 3 for conjugacy classes, 2 for words
  std::optional<int> M_found;          // minimal exponent with a full pass window
  struct Item {
    std::string label;
    long base_length = 0;
    long forward_length = 0;           // at M_found (or M_bound when absent)
    long backward_length = 0;
    FlareItemStatus status = FlareItemStatus::Pass;
  };
  std::vector<Item> per_item;
  int M_bound = 0;
  int excluded = 0;                    // out-of-ball or precondition items
  std::vector<std::string> warnings;
};

namespace detail {

template <typename LengthFn>
FlaringVerdict flare_window_search(std::size_t corpus_size, long factor, int M_bound,
                                   const LengthFn& length_at,
                                   const std::vector<std::string>& labels,
                                   const std::vector<bool>& precondition_ok) {
  FlaringVerdict v;
  v.constant_target = factor;
  v.M_bound = M_bound;

  // lengths[i][m] = (fwd, bwd) at exponent m, or nullopt when out of ball.
  // Items are independent; each worker writes only its own index.
  std::vector<std::vector<std::optional<std::pair<long, long>>>> lengths(corpus_size);
  std::vector<long> base(corpus_size, 0);
  std::vector<char> usable(corpus_size, 1);
  parallel_for(corpus_size, [&](std::size_t i) {
    if (!precondition_ok[i]) {
      usable[i] = 0;
      return;
    }
    lengths[i].resize(M_bound + 1);
    bool ok = true;
    for (int m = 0; m <= M_bound && ok; ++m) {
      auto lf = length_at(i, m);
      auto lb = length_at(i, -m);
      if (!lf || !lb) {
        ok = false;
        break;
      }
      lengths[i][m] = std::make_pair(*lf, *lb);
    }
    if (!ok)
      usable[i] = 0;
    else
      base[i] = lengths[i][0]->first;
  });

  auto passes = [&](std::size_t i, int m) {
    const auto& lm = *lengths[i][m];
    return factor * base[i] <= std::max(lm.first, lm.second);
  };

  std::optional<int> found;
  for (int M = 1; M <= M_bound && !found; ++M) {
    bool all = true;
    for (std::size_t i = 0; i < corpus_size && all; ++i) {
      if (!usable[i]) continue;
      for (int m = M; m <= M_bound && all; ++m) all = passes(i, m);
    }
    if (all) found = M;
  }
  v.M_found = found;

  int at = found.value_or(M_bound);
  for (std::size_t i = 0; i < corpus_size; ++i) {
    FlaringVerdict::Item item;
    item.label = labels[i];
    if (!precondition_ok[i]) {
      item.status = FlareItemStatus::PreconditionBreach;
      ++v.excluded;
      v.warnings.push_back("precondition breach: " + labels[i] +
                           " lies in the peripheral system");
    } else if (!usable[i]) {
      item.status = FlareItemStatus::OutOfBall;
      ++v.excluded;
      v.warnings.push_back("out of ball: " + labels[i] + " excluded from the search");
    } else {
      item.base_length = base[i];
      item.forward_length = lengths[i][at]->first;
      item.backward_length = lengths[i][at]->second;
      item.status = passes(i, at) ? FlareItemStatus::Pass : FlareItemStatus::Fail;
    }
    v.per_item.push_back(std::move(item));
  }
  return v;
}

}  // namespace detail

// Conjugacy flaring: minimal M <= M_bound with
// 3||alpha|| <= max(||phi^m alpha||, ||phi^-m alpha||) for all m in [M, M_bound]
// across the corpus.
inline FlaringVerdict conjugacy_flaring_search(const std::vector<CyclicWord>& corpus,
                                               const FreeAutomorphism& phi,
                                               const ElectricSpace& space, int M_bound) {
  std::vector<std::string> labels;
  std::vector<bool> precond;
  for (const auto& c : corpus) {
    labels.push_back(to_string(c));
    precond.push_back(!carries_conjugacy_class(space.peripherals(), c));
  }
  // iterate caches, filled in exponent order
  std::vector<std::map<int, CyclicWord>> cache(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!precond[i]) continue;
    cache[i][0] = corpus[i];
    for (int m = 1; m <= M_bound; ++m) {
      cache[i][m] = iterate_class(phi, cache[i][m - 1], 1);
      cache[i][-m] = iterate_class(phi, cache[i][-(m - 1)], -1);
    }
  }
  auto length_at = [&](std::size_t i, int m) -> std::optional<long> {
    try {
      return space.conjugacy_length(cache[i].at(m)).length;
    } catch (const out_of_ball&) {
      return std::nullopt;
    }
  };
  return detail::flare_window_search(corpus.size(), 3, M_bound, length_at, labels, precond);
}

// Strict (word) flaring: factor 2, over words rather than conjugacy classes.
inline FlaringVerdict strict_flaring_search(const std::vector<ReducedWord>& corpus,
                                            const FreeAutomorphism& phi,
                                            const ElectricSpace& space, int N_bound) {
  std::vector<std::string> labels;
  std::vector<bool> precond;
  for (const auto& w : corpus) {
    labels.push_back(to_string(w));
    bool peripheral = false;
    for (const auto& comp : space.peripherals().components)
      if (comp.attach_vertex() && comp.contains(w)) peripheral = true;
    precond.push_back(!peripheral);
  }
  std::vector<std::map<int, ReducedWord>> cache(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!precond[i]) continue;
    cache[i][0] = corpus[i];
    for (int n = 1; n <= N_bound; ++n) {
      cache[i][n] = apply(phi, cache[i][n - 1]);
      cache[i][-n] = apply_inverse(phi, cache[i][-(n - 1)]);
    }
  }
  auto length_at = [&](std::size_t i, int n) -> std::optional<long> {
    try {
      return space.length(cache[i].at(n)).length;
    } catch (const out_of_ball&) {
      return std::nullopt;
    }
  };
  auto v = detail::flare_window_search(corpus.size(), 2, N_bound, length_at, labels, precond);
  return v;
}

// Discretized approximation: the fraction of edge positions whose (2L+1)
// window around them is a leaf segment from the library.
inline BigRat approximation_fraction(const EdgePath& circuit, const LeafLibrary& lib, int L) {
  if (L < 1) throw input_error("approximation_fraction: L must be >= 1");
  const std::size_t n = circuit.size();
  if (n == 0) return 0;
  long generic = 0;
  for (std::size_t i = 0; i < n; ++i) {
    EdgePath window;
    for (long o = -L; o <= L; ++o)
      window.push_back(circuit[((i + o) % static_cast<long>(n) + n) % n]);
    if (lib.contains(window)) ++generic;
  }
  return BigRat(generic, static_cast<long>(n));
}

inline BigRat approximation_fraction(const CyclicWord& c, const GraphSelfMap& f,
                                     const LeafLibrary& lib, int L) {
  return approximation_fraction(f.graph().realize_class(c), lib, L);
}

// --- standing assumptions (two automorphisms) ---

struct StandingAssumptionsReport {
  struct Item {
    std::string name;
    std::string status;  // "pass", "fail", "bounded-evidence"
    std::string detail;
  };
  std::vector<Item> items;
  bool ok() const {
    for (const auto& i : items)
      if (i.status == "fail") return false;
    return true;
  }
};

namespace detail {

// Tree-contraction image of a path: the word read from the marking labels.
inline std::vector<Letter> projected_word(const MarkedGraph& g, const EdgePath& p) {
  std::vector<Letter> out;
  for (Dir d : p) {
    Letter l = g.generator_label(edge_of(d));
    if (l == 0) continue;
    Letter x = is_forward(d) ? l : inverse(l);
    if (!out.empty() && out.back() == inverse(x))
      out.pop_back();
    else
      out.push_back(x);
  }
  return out;
}

inline bool subword(const std::vector<Letter>& hay, const std::vector<Letter>& needle) {
  if (needle.empty() || needle.size() > hay.size()) return false;
  for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
    bool ok = true;
    for (std::size_t j = 0; j < needle.size() && ok; ++j) ok = hay[i + j] == needle[j];
    if (ok) return true;
  }
  return false;
}

inline bool library_contains_word(const MarkedGraph& g, const LeafLibrary& lib,
                                  const std::vector<Letter>& w) {
  std::vector<Letter> winv(w.rbegin(), w.rend());
  for (auto& x : winv) x = inverse(x);
  for (const auto& s : lib.segments()) {
    auto sw = projected_word(g, s);
    if (subword(sw, w) || subword(sw, winv)) return true;
  }
  return false;
}

}  // namespace detail

// The three standing assumptions, each checked at the stated strength:
// distinctness of laminations and invariance are bounded evidence; NAS
// triviality is exact.
inline StandingAssumptionsReport standing_assumptions_check(const SideData& phi_fwd,
                                                            const SideData& phi_bwd,
                                                            const SideData& psi_fwd,
                                                            const SideData& psi_bwd) {
  StandingAssumptionsReport rep;

  // item 1: {L+phi, L-phi} and {L+psi, L-psi} disjoint, via the longest leaf
  // segments projected to words
  {
    bool distinct = true;
    std::string why;
    struct Probe {
      const SideData* side;
      const SideData* other_a;
      const SideData* other_b;
      const char* name;
    };
    Probe probes[] = {{&phi_fwd, &psi_fwd, &psi_bwd, "Lambda+_phi"},
                      {&phi_bwd, &psi_fwd, &psi_bwd, "Lambda-_phi"},
                      {&psi_fwd, &phi_fwd, &phi_bwd, "Lambda+_psi"},
                      {&psi_bwd, &phi_fwd, &phi_bwd, "Lambda-_psi"}};
    for (const auto& pr : probes) {
      auto w = detail::projected_word(pr.side->map.graph(), pr.side->library.longest_segment());
      for (const SideData* other : {pr.other_a, pr.other_b}) {
        if (detail::library_contains_word(other->map.graph(), other->library, w)) {
          distinct = false;
          why = std::string(pr.name) + " leaf segment appears in the other pair's library";
        }
      }
    }
    rep.items.push_back({"laminations distinct", distinct ? "bounded-evidence" : "fail",
                         distinct ? "longest leaf segments do not cross-occur at this depth"
                                  : why});
  }

  // item 2: both nonattracting systems trivial (exact)
  {
    bool ok = phi_fwd.nas.system.trivial() && psi_fwd.nas.system.trivial() &&
              phi_bwd.nas.system.trivial() && psi_bwd.nas.system.trivial();
    std::string detail = ok ? "all nonattracting systems have empty component lists"
                            : "a nonattracting system is nontrivial";
    rep.items.push_back({"nonattracting systems trivial", ok ? "pass" : "fail", detail});
  }

  // item 3: lamination invariance under the defining maps: the top strata are
  // EG and the filtration is respected by construction
  {
    bool ok = true;
    for (const SideData* s : {&phi_fwd, &phi_bwd, &psi_fwd, &psi_bwd}) {
      IntMatrix m = s->map.transition_matrix(s->stratum);
      ok = ok && is_irreducible(m) && pf_bounds(m, BigRat(1, 1000)).lower > 1;
    }
    rep.items.push_back({"laminations invariant", ok ? "bounded-evidence" : "fail",
                         ok ? "top strata are EG and f-invariant" : "a top stratum is not EG"});
  }
  return rep;
}

struct ThreeOfFourVerdict {
  std::optional<int> M_found;
  int M_bound = 0;
  bool refused = false;            // standing assumptions failed, no override
  std::string note;
  struct Item {
    std::string label;
    long base = 0;
    long lengths[4] = {0, 0, 0, 0};  // phi^M, phi^-M, psi^M, psi^-M
    int passing = 0;
  };
  std::vector<Item> per_item;
};

// Mosher-style 3-of-4 stretch: at least three of the four iterate lengths
// must reach 3x the base length, corpus-wide, for every exponent in
// [M_found, M_bound].
inline ThreeOfFourVerdict three_of_four_test(const std::vector<CyclicWord>& corpus,
                                             const FreeAutomorphism& phi,
                                             const FreeAutomorphism& psi,
                                             const ElectricSpace& space, int M_bound,
                                             const StandingAssumptionsReport& sa,
                                             bool override_assumptions = false) {
  ThreeOfFourVerdict v;
  v.M_bound = M_bound;
  v.note = "free-of-rank-2 and hyperbolic-extension conclusions are paper-implied, "
           "not certified";
  if (!sa.ok() && !override_assumptions) {
    v.refused = true;
    v.note = "standing assumptions failed; rerun with an explicit override to force";
    return v;
  }

  const std::size_t n = corpus.size();
  std::vector<std::array<std::map<int, CyclicWord>, 2>> cache(n);
  auto iterate_to = [&](std::size_t i, const FreeAutomorphism& a, int which, int m) {
    auto& mp = cache[i][which];
    if (!mp.count(0)) mp[0] = corpus[i];
    int step = m >= 0 ? 1 : -1;
    for (int k = step; std::abs(k) <= std::abs(m); k += step)
      if (!mp.count(k)) mp[k] = iterate_class(a, mp.at(k - step), step);
    return mp.at(m);
  };
  auto len = [&](const CyclicWord& c) { return space.conjugacy_length(c).length; };

  std::vector<long> base(n);
  for (std::size_t i = 0; i < n; ++i) base[i] = len(corpus[i]);

  auto passing_count = [&](std::size_t i, int m, long out[4]) {
    long l0 = len(iterate_to(i, phi, 0, m));
    long l1 = len(iterate_to(i, phi, 0, -m));
    long l2 = len(iterate_to(i, psi, 1, m));
    long l3 = len(iterate_to(i, psi, 1, -m));
    long ls[4] = {l0, l1, l2, l3};
    int cnt = 0;
    for (int k = 0; k < 4; ++k) {
      if (out) out[k] = ls[k];
      if (ls[k] >= 3 * base[i]) ++cnt;
    }
    return cnt;
  };

  std::optional<int> found;
  for (int M = 1; M <= M_bound && !found; ++M) {
    bool all = true;
    for (std::size_t i = 0; i < n && all; ++i)
      for (int m = M; m <= M_bound && all; ++m) all = passing_count(i, m, nullptr) >= 3;
    if (all) found = M;
  }
  v.M_found = found;

  int at = found.value_or(M_bound);
  for (std::size_t i = 0; i < n; ++i) {
    ThreeOfFourVerdict::Item item;
    item.label = to_string(corpus[i]);
    item.base = base[i];
    item.passing = passing_count(i, at, item.lengths);
    v.per_item.push_back(std::move(item));
  }
  return v;
}

}  // namespace fbc
