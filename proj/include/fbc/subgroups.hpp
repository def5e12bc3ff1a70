#pragma once

// Finitely generated subgroups of F as folded core graphs (Stallings),
// with membership, conjugacy-class carrying, fiber products and
// malnormality checks.

#include "fbc/words.hpp"

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fbc {

struct LabeledEdge {
  int from = 0;
  int to = 0;
  Letter label = 0;  // always positive; traversing backwards reads the inverse
};

// A folded, core, connected label graph. The subgroup it defines is
// stem . pi_1(graph, attach) . stem^{-1}; the stem is the folded-off tail
// from the original wedge basepoint (empty when the basepoint survived
// core reduction).
class FoldedImmersion {
 public:
  FoldedImmersion() = default;

  int vertex_count() const { return vertex_count_; }
  const std::vector<LabeledEdge>& edges() const { return edges_; }
  int rank() const { return static_cast<int>(edges_.size()) - vertex_count_ + 1; }
  std::optional<int> attach_vertex() const { return attach_; }
  const ReducedWord& stem() const { return stem_; }

  // Deterministic walk: from v reading letter x, the unique next vertex.
  std::optional<int> step(int v, Letter x) const {
    auto it = out_.find({v, x});
    if (it == out_.end()) return std::nullopt;
    return it->second;
  }

  bool reads_closed_walk(int v, const std::vector<Letter>& word) const {
    int at = v;
    for (Letter x : word) {
      auto nxt = step(at, x);
      if (!nxt) return false;
      at = *nxt;
    }
    return at == v;
  }

  // Exact membership in the represented subgroup (needs the basepoint data).
  bool contains(const ReducedWord& w) const {
    if (!attach_) throw precondition_error("FoldedImmersion: no basepoint recorded");
    ReducedWord conj = concat(concat(stem_.inverted(), w), stem_);
    return reads_closed_walk(*attach_, conj.letters());
  }

  // Does some rotation of the cyclic word read a closed walk somewhere?
  bool carries_class(const CyclicWord& c) const {
    if (c.empty()) return true;
    for (int v = 0; v < vertex_count_; ++v)
      if (reads_closed_walk(v, c.letters())) return true;
    return false;
  }

  // Generator words (one per non-tree edge of a BFS spanning tree), conjugated
  // by the stem so they generate the represented subgroup of F exactly.
  std::vector<ReducedWord> generator_words() const {
    int root = attach_ ? *attach_ : 0;
    std::vector<int> parent_edge(vertex_count_, -1);
    std::vector<bool> seen(vertex_count_, false);
    std::vector<ReducedWord> to_root(vertex_count_);
    seen[root] = true;
    std::vector<int> queue{root};
    std::vector<bool> in_tree(edges_.size(), false);
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      int v = queue[qi];
      for (std::size_t ei = 0; ei < edges_.size(); ++ei) {
        const auto& e = edges_[ei];
        int other = -1;
        Letter via = 0;
        if (e.from == v && !seen[e.to]) {
          other = e.to;
          via = e.label;
        } else if (e.to == v && !seen[e.from]) {
          other = e.from;
          via = inverse(e.label);
        }
        if (other >= 0) {
          seen[other] = true;
          in_tree[ei] = true;
          parent_edge[other] = static_cast<int>(ei);
          to_root[other] = concat(to_root[v], ReducedWord({via}));
          queue.push_back(other);
        }
      }
    }
    std::vector<ReducedWord> gens;
    for (std::size_t ei = 0; ei < edges_.size(); ++ei) {
      if (in_tree[ei]) continue;
      const auto& e = edges_[ei];
      ReducedWord loop =
          concat(concat(to_root[e.from], ReducedWord({e.label})), to_root[e.to].inverted());
      gens.push_back(concat(concat(stem_, loop), stem_.inverted()));
    }
    return gens;
  }

  // Canonical encoding of the unbased labeled core graph, for isomorphism
  // tests and deduplication. Folded graphs are deterministic automata, so a
  // label-ordered BFS from each root yields a well-defined code.
  std::string canonical_code() const {
    std::string best;
    for (int root = 0; root < vertex_count_; ++root) {
      std::string code = bfs_code(root);
      if (best.empty() || code < best) best = code;
    }
    return best;
  }

  bool isomorphic(const FoldedImmersion& o) const {
    return canonical_code() == o.canonical_code();
  }

  // All elements of the subgroup with word length <= bound (identity excluded).
  std::vector<ReducedWord> enumerate_elements(int bound) const {
    std::vector<ReducedWord> out;
    if (!attach_) throw precondition_error("FoldedImmersion: no basepoint recorded");
    int budget = bound - 2 * static_cast<int>(stem_.size());
    if (budget < 1) return out;
    // DFS over reduced closed walks at the attach vertex.
    std::vector<Letter> walk;
    std::vector<int> at{*attach_};
    auto emit = [&]() {
      ReducedWord w = concat(concat(stem_, ReducedWord(walk)), stem_.inverted());
      if (static_cast<int>(w.size()) <= bound && !w.empty()) out.push_back(w);
    };
    std::function<void()> grow = [&]() {
      if (at.back() == *attach_ && !walk.empty()) emit();
      if (static_cast<int>(walk.size()) >= budget) return;
      for (int key = 0; key < 52; ++key) {
        Letter x = static_cast<Letter>((key / 2 + 1) * (key % 2 == 0 ? 1 : -1));
        if (generator_index(x) > 26) break;
        if (!walk.empty() && walk.back() == inverse(x)) continue;
        auto nxt = step(at.back(), x);
        if (!nxt) continue;
        walk.push_back(x);
        at.push_back(*nxt);
        grow();
        walk.pop_back();
        at.pop_back();
      }
    };
    grow();
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  // True if the core is a single vertex whose loops are distinct basis
  // letters (e.g. <c> or <a,b>); such subgroups admit exact linear-time
  // electric computations.
  std::optional<std::set<int>> basis_letter_support() const {
    if (vertex_count_ != 1 || !stem_.empty()) return std::nullopt;
    std::set<int> letters;
    for (const auto& e : edges_) {
      if (!letters.insert(generator_index(e.label)).second) return std::nullopt;
    }
    return letters;
  }

  static FoldedImmersion from_parts(int vertex_count, std::vector<LabeledEdge> edges,
                                    std::optional<int> attach, ReducedWord stem) {
    FoldedImmersion f;
    f.vertex_count_ = vertex_count;
    f.edges_ = std::move(edges);
    f.attach_ = attach;
    f.stem_ = std::move(stem);
    f.rebuild_out();
    return f;
  }

 private:
  std::string bfs_code(int root) const {
    std::vector<int> order(vertex_count_, -1);
    order[root] = 0;
    int next = 1;
    std::vector<int> queue{root};
    std::string code;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      int v = queue[qi];
      // deterministic signed-label scan
      for (int key = 0; key < 2 * kMaxRank; ++key) {
        Letter x = static_cast<Letter>((key / 2 + 1) * (key % 2 == 0 ? 1 : -1));
        auto nxt = step(v, x);
        if (!nxt) continue;
        if (order[*nxt] < 0) {
          order[*nxt] = next++;
          queue.push_back(*nxt);
        }
        code += std::to_string(key) + ":" + std::to_string(order[*nxt]) + ",";
      }
      code += ";";
    }
    return code;
  }

  void rebuild_out() {
    out_.clear();
    for (const auto& e : edges_) {
      out_[{e.from, e.label}] = e.to;
      out_[{e.to, inverse(e.label)}] = e.from;
    }
  }

  int vertex_count_ = 0;
  std::vector<LabeledEdge> edges_;
  std::map<std::pair<int, Letter>, int> out_;
  std::optional<int> attach_;
  ReducedWord stem_;
};

namespace detail {

// Mutable graph used during folding.
struct FoldWork {
  std::vector<LabeledEdge> edges;
  std::vector<bool> vertex_alive;
  std::vector<bool> edge_alive;

  int merge(int a, int b) {
    if (a == b) return a;
    int keep = std::min(a, b), drop = std::max(a, b);
    for (auto& e : edges) {
      if (e.from == drop) e.from = keep;
      if (e.to == drop) e.to = keep;
    }
    vertex_alive[drop] = false;
    return keep;
  }
};

}  // namespace detail

// Stallings fold of the wedge of generator loops, followed by core reduction.
// The fixed point of folding does not depend on fold order; core reduction
// records the pruned tail from the basepoint as the stem.
inline FoldedImmersion fold(const std::vector<ReducedWord>& generators) {
  std::vector<ReducedWord> gens;
  for (const auto& g : generators)
    if (!g.empty()) gens.push_back(g);
  if (gens.empty())
    throw input_error("fold: no nontrivial generators (represent the trivial subgroup "
                      "as an empty system)");

  detail::FoldWork w;
  int base = 0;
  w.vertex_alive.push_back(true);
  for (const auto& g : gens) {
    int prev = base;
    for (std::size_t i = 0; i < g.size(); ++i) {
      int nxt;
      if (i + 1 == g.size()) {
        nxt = base;
      } else {
        w.vertex_alive.push_back(true);
        nxt = static_cast<int>(w.vertex_alive.size()) - 1;
      }
      Letter x = g[i];
      if (x > 0)
        w.edges.push_back({prev, nxt, x});
      else
        w.edges.push_back({nxt, prev, inverse(x)});
      prev = nxt;
    }
  }
  w.edge_alive.assign(w.edges.size(), true);

  // Fold to the fixed point: merge targets of equal-label edges out of a vertex.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < w.edges.size() && !changed; ++i) {
      if (!w.edge_alive[i]) continue;
      for (std::size_t j = i + 1; j < w.edges.size() && !changed; ++j) {
        if (!w.edge_alive[j]) continue;
        const auto &a = w.edges[i], &b = w.edges[j];
        if (a.label != b.label) continue;
        if (a.from == b.from && a.to == b.to) {
          w.edge_alive[j] = false;
          changed = true;
        } else if (a.from == b.from) {
          int ta = a.to, tb = b.to;
          int keep = w.merge(ta, tb);
          if (base == ta || base == tb) base = keep;
          w.edge_alive[j] = false;
          changed = true;
        } else if (a.to == b.to) {
          int fa = a.from, fb = b.from;
          int keep = w.merge(fa, fb);
          if (base == fa || base == fb) base = keep;
          w.edge_alive[j] = false;
          changed = true;
        }
      }
    }
  }

  // merge() rewrites endpoints in place, so re-resolve base: it was tracked above.

  // Core reduction: prune valence-1 vertices, never pruning the base.
  auto valence = [&](int v) {
    int c = 0;
    for (std::size_t i = 0; i < w.edges.size(); ++i) {
      if (!w.edge_alive[i]) continue;
      if (w.edges[i].from == v) ++c;
      if (w.edges[i].to == v) ++c;
    }
    return c;
  };
  bool pruned = true;
  while (pruned) {
    pruned = false;
    for (std::size_t v = 0; v < w.vertex_alive.size(); ++v) {
      if (!w.vertex_alive[v] || static_cast<int>(v) == base) continue;
      if (valence(static_cast<int>(v)) == 1) {
        for (std::size_t i = 0; i < w.edges.size(); ++i)
          if (w.edge_alive[i] &&
              (w.edges[i].from == static_cast<int>(v) || w.edges[i].to == static_cast<int>(v)))
            w.edge_alive[i] = false;
        w.vertex_alive[v] = false;
        pruned = true;
      }
    }
  }

  // Strip the stem: walk from base while it has valence 1.
  std::vector<Letter> stem;
  int attach = base;
  while (valence(attach) == 1) {
    for (std::size_t i = 0; i < w.edges.size(); ++i) {
      if (!w.edge_alive[i]) continue;
      const auto& e = w.edges[i];
      if (e.from == attach || e.to == attach) {
        if (e.from == attach) {
          stem.push_back(e.label);
          w.vertex_alive[attach] = false;
          attach = e.to;
        } else {
          stem.push_back(inverse(e.label));
          w.vertex_alive[attach] = false;
          attach = e.from;
        }
        w.edge_alive[i] = false;
        break;
      }
    }
  }
  if (valence(attach) == 0 && !stem.empty())
    throw input_error("fold: generators are trivial after reduction");

  // Compact to contiguous vertex ids.
  std::map<int, int> newid;
  for (std::size_t v = 0; v < w.vertex_alive.size(); ++v)
    if (w.vertex_alive[v]) newid[static_cast<int>(v)] = static_cast<int>(newid.size());
  std::vector<LabeledEdge> edges;
  for (std::size_t i = 0; i < w.edges.size(); ++i)
    if (w.edge_alive[i])
      edges.push_back({newid.at(w.edges[i].from), newid.at(w.edges[i].to), w.edges[i].label});

  std::optional<int> attach_id;
  if (newid.count(attach)) attach_id = newid.at(attach);
  return FoldedImmersion::from_parts(static_cast<int>(newid.size()), std::move(edges),
                                     attach_id, ReducedWord(std::move(stem)));
}

struct SubgroupSystem {
  std::vector<FoldedImmersion> components;
  std::optional<bool> malnormal_checked;

  bool trivial() const { return components.empty(); }

  void add_component(FoldedImmersion f) {
    for (const auto& c : components)
      if (c.isomorphic(f)) return;
    components.push_back(std::move(f));
  }
};

inline bool carries_conjugacy_class(const SubgroupSystem& s, const CyclicWord& c) {
  if (c.empty()) return true;
  for (const auto& comp : s.components)
    if (comp.carries_class(c)) return true;
  return false;
}

namespace detail {

// Connected components of a labeled graph given as edge list.
inline std::vector<std::vector<int>> components_of(int n, const std::vector<LabeledEdge>& edges) {
  std::vector<int> comp(n, -1);
  int nc = 0;
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    comp[s] = nc;
    std::vector<int> stack{s};
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (const auto& e : edges) {
        if (e.from == v && comp[e.to] < 0) {
          comp[e.to] = nc;
          stack.push_back(e.to);
        }
        if (e.to == v && comp[e.from] < 0) {
          comp[e.from] = nc;
          stack.push_back(e.from);
        }
      }
    }
    ++nc;
  }
  std::vector<std::vector<int>> out(nc);
  for (int v = 0; v < n; ++v) out[comp[v]].push_back(v);
  return out;
}

// Iteratively delete valence-1 vertices; returns surviving edges.
inline std::vector<LabeledEdge> core_edges(int n, std::vector<LabeledEdge> edges) {
  bool pruned = true;
  std::vector<bool> alive(n, true);
  std::vector<bool> ealive(edges.size(), true);
  while (pruned) {
    pruned = false;
    std::vector<int> val(n, 0);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (!ealive[i]) continue;
      ++val[edges[i].from];
      ++val[edges[i].to];
    }
    for (int v = 0; v < n; ++v) {
      if (alive[v] && val[v] == 1) {
        alive[v] = false;
        for (std::size_t i = 0; i < edges.size(); ++i)
          if (ealive[i] && (edges[i].from == v || edges[i].to == v)) ealive[i] = false;
        pruned = true;
      }
    }
  }
  std::vector<LabeledEdge> out;
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (ealive[i]) out.push_back(edges[i]);
  return out;
}

inline std::vector<ReducedWord> component_generators(const std::vector<int>& verts,
                                                     const std::vector<LabeledEdge>& edges,
                                                     int root) {
  std::map<int, ReducedWord> to_root;
  std::set<int> seen{root};
  to_root[root] = ReducedWord();
  std::vector<int> queue{root};
  std::vector<bool> in_tree(edges.size(), false);
  std::set<int> vset(verts.begin(), verts.end());
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    int v = queue[qi];
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const auto& e = edges[i];
      if (!vset.count(e.from) || !vset.count(e.to)) continue;
      if (e.from == v && !seen.count(e.to)) {
        seen.insert(e.to);
        in_tree[i] = true;
        to_root[e.to] = concat(to_root[v], ReducedWord({e.label}));
        queue.push_back(e.to);
      } else if (e.to == v && !seen.count(e.from)) {
        seen.insert(e.from);
        in_tree[i] = true;
        to_root[e.from] = concat(to_root[v], ReducedWord({inverse(e.label)}));
        queue.push_back(e.from);
      }
    }
  }
  std::vector<ReducedWord> gens;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (in_tree[i]) continue;
    const auto& e = edges[i];
    if (!vset.count(e.from) || !vset.count(e.to)) continue;
    gens.push_back(concat(concat(to_root.at(e.from), ReducedWord({e.label})),
                          to_root.at(e.to).inverted()));
  }
  return gens;
}

}  // namespace detail

// Core components of the labeled fiber product of A and B. Each component
// represents an intersection of a conjugate of A with a conjugate of B; the
// list covers all of them up to conjugacy. The diagonal components of a
// self product can be skipped via `skip_diagonal`.
inline std::vector<FoldedImmersion> intersection_core(const FoldedImmersion& A,
                                                      const FoldedImmersion& B,
                                                      bool skip_diagonal = false) {
  const int na = A.vertex_count(), nb = B.vertex_count();
  auto pid = [&](int a, int b) { return a * nb + b; };
  std::vector<LabeledEdge> prod;
  for (const auto& ea : A.edges())
    for (const auto& eb : B.edges())
      if (ea.label == eb.label)
        prod.push_back({pid(ea.from, eb.from), pid(ea.to, eb.to), ea.label});

  std::vector<LabeledEdge> core = detail::core_edges(na * nb, prod);
  if (core.empty()) return {};

  std::set<int> used;
  for (const auto& e : core) {
    used.insert(e.from);
    used.insert(e.to);
  }
  auto comps = detail::components_of(na * nb, core);

  std::vector<FoldedImmersion> out;
  for (const auto& comp : comps) {
    std::vector<int> cverts;
    for (int v : comp)
      if (used.count(v)) cverts.push_back(v);
    if (cverts.empty()) continue;
    bool has_edge = false;
    for (const auto& e : core)
      if (std::find(cverts.begin(), cverts.end(), e.from) != cverts.end()) {
        has_edge = true;
        break;
      }
    if (!has_edge) continue;
    if (skip_diagonal && na == nb) {
      bool diagonal = false;
      for (int v : cverts)
        if (v / nb == v % nb) {
          diagonal = true;
          break;
        }
      if (diagonal) continue;
    }
    auto gens = detail::component_generators(cverts, core, cverts.front());
    if (gens.empty()) continue;  // contractible component: trivial intersection
    out.push_back(fold(gens));
  }
  return out;
}

struct MalnormalityResult {
  bool malnormal = true;
  std::optional<FoldedImmersion> witness;
  std::string detail;
};

// A subgroup system is malnormal when distinct conjugates of its components
// intersect trivially: off-diagonal self products and all cross products must
// have empty cores.
inline MalnormalityResult is_malnormal(const SubgroupSystem& s) {
  MalnormalityResult res;
  const auto& cs = s.components;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    auto self = intersection_core(cs[i], cs[i], /*skip_diagonal=*/true);
    if (!self.empty()) {
      res.malnormal = false;
      res.witness = self.front();
      res.detail = "component " + std::to_string(i) + " meets a conjugate of itself";
      return res;
    }
    for (std::size_t j = i + 1; j < cs.size(); ++j) {
      auto cross = intersection_core(cs[i], cs[j]);
      if (!cross.empty()) {
        res.malnormal = false;
        res.witness = cross.front();
        res.detail = "components " + std::to_string(i) + " and " + std::to_string(j) +
                     " have conjugates with nontrivial intersection";
        return res;
      }
    }
  }
  return res;
}

}  // namespace fbc
