#pragma once

// Attracting lamination machinery: leaf segment generation, bounded weak
// attraction tests, the nonattracting subgraph Z, the graph K with its
// immersion into G, and length relative to the groupoid <Z, sigma>.

#include "fbc/graph_map.hpp"
#include "fbc/rtt.hpp"
#include "fbc/subgroups.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fbc {

struct inconsistent_nielsen_data : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LeafSegment {
  EdgePath path;
  int seed_edge = -1;
  int iterate = 0;
  int height = 0;
};

// f^k_#(seed) for a seed edge of the EG stratum H_r.
inline LeafSegment generic_leaf_segment(const GraphSelfMap& f, int r, int seed_edge, int k) {
  if (f.edge_height(seed_edge) != r)
    throw precondition_error("generic_leaf_segment: seed is not an H_r edge");
  IntMatrix m = f.transition_matrix(r);
  if (!is_irreducible(m) || pf_bounds(m, BigRat(1, 1000)).lower <= 1)
    throw domain_error("generic_leaf_segment: stratum is not EG");
  LeafSegment seg;
  seg.path = f.iterate_path({forward_dir(seed_edge)}, k);
  seg.seed_edge = seed_edge;
  seg.iterate = k;
  seg.height = r;
  return seg;
}

// --- subpath containment (weak-topology neighborhoods) ---

inline bool contains_subpath_oriented(const EdgePath& hay, const EdgePath& needle, bool cyclic) {
  if (needle.empty()) return true;
  if (hay.empty()) return false;
  const std::size_t n = hay.size(), m = needle.size();
  if (!cyclic && m > n) return false;
  if (cyclic && m > n) return false;  // a circuit of length n has no longer immersed window
  std::size_t starts = cyclic ? n : n - m + 1;
  for (std::size_t i = 0; i < starts; ++i) {
    bool ok = true;
    for (std::size_t j = 0; j < m; ++j) {
      if (hay[cyclic ? (i + j) % n : i + j] != needle[j]) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

inline bool contains_segment(const EdgePath& hay, const EdgePath& segment, bool cyclic) {
  return contains_subpath_oriented(hay, segment, cyclic) ||
         contains_subpath_oriented(hay, reversed_path(segment), cyclic);
}

struct AttractingNeighborhood {
  LeafSegment defining_segment;

  bool contains_circuit(const EdgePath& circuit) const {
    return contains_segment(circuit, defining_segment.path, /*cyclic=*/true);
  }
  bool contains_path(const EdgePath& p) const {
    return contains_segment(p, defining_segment.path, /*cyclic=*/false);
  }
};

struct AttractionVerdict {
  std::optional<int> attracted_at;  // smallest k <= bound, if any
  int bound = 0;
};

inline AttractionVerdict is_weakly_attracted(const EdgePath& circuit,
                                             const AttractingNeighborhood& v,
                                             const GraphSelfMap& f, int bound) {
  if (bound < 1) throw input_error("is_weakly_attracted: bound must be >= 1");
  AttractionVerdict out;
  out.bound = bound;
  EdgePath cur = circuit;
  for (int k = 0; k <= bound; ++k) {
    if (v.contains_circuit(cur)) {
      out.attracted_at = k;
      return out;
    }
    if (k < bound) cur = f.map_circuit(cur);
  }
  return out;
}

inline AttractionVerdict is_weakly_attracted(const CyclicWord& c,
                                             const AttractingNeighborhood& v,
                                             const GraphSelfMap& f, int bound) {
  return is_weakly_attracted(f.graph().realize_class(c), v, f, bound);
}

// --- nonattracting subgraph ---

// Bounded-depth proxy: a stratum stays out of Z iff some edge image crosses
// H_r within N iterates and the H_r crossing counts do not decay over the
// tail window (so transient crossings that die out do not count).
inline std::set<int> nonattracting_subgraph(const GraphSelfMap& f, int r, int bound) {
  IntMatrix top = f.transition_matrix(r);
  if (!is_irreducible(top) || pf_bounds(top, BigRat(1, 1000)).lower <= 1)
    throw precondition_error("nonattracting_subgraph: stratum r must be EG");

  const std::vector<int> hr_edges = f.stratum_edges(r);
  const std::set<int> hr(hr_edges.begin(), hr_edges.end());
  auto hr_count = [&](const EdgePath& p) {
    long c = 0;
    for (Dir d : p) c += hr.count(edge_of(d));
    return c;
  };

  auto edge_attracted = [&](int e) {
    std::vector<long> counts;
    EdgePath p{forward_dir(e)};
    for (int k = 1; k <= bound; ++k) {
      p = f.map_path(p);
      counts.push_back(hr_count(p));
    }
    bool crossed = false;
    for (long c : counts) crossed = crossed || c > 0;
    if (!crossed) return false;
    std::size_t tail = (bound + 1) / 2;
    for (std::size_t i = counts.size() - tail; i + 1 < counts.size(); ++i)
      if (counts[i + 1] < counts[i]) return false;
    return true;
  };

  auto strata = f.classify_strata();
  std::set<int> z;
  // Irreducible strata first; zero strata follow their enveloping EG stratum.
  std::map<int, bool> stratum_in_z;
  for (const auto& s : strata) {
    if (s.height == r || s.kind == StratumKind::Zero) continue;
    bool attracted = false;
    for (int e : s.edges) attracted = attracted || edge_attracted(e);
    stratum_in_z[s.height] = !attracted;
  }
  stratum_in_z[r] = false;
  for (const auto& s : strata) {
    if (s.kind != StratumKind::Zero) continue;
    int envelope = 0;
    for (const auto& t : strata)
      if (t.kind == StratumKind::EG && t.height > s.height) {
        envelope = t.height;
        break;
      }
    stratum_in_z[s.height] = envelope != 0 && stratum_in_z[envelope];
  }
  for (const auto& s : strata)
    if (stratum_in_z[s.height])
      for (int e : s.edges) z.insert(e);
  return z;
}

// The unique closed indivisible height-r Nielsen path within bounds, if any.
// Finding two distinct ones is an error: the input is then not the intended
// representative.
inline std::optional<EdgePath> find_closed_inp(const GraphSelfMap& f, int r, int length_bound,
                                               bool* searched_exhaustively = nullptr) {
  auto nps = find_nielsen_paths(f, length_bound, 1);
  std::vector<EdgePath> hits;
  for (const auto& np : nps) {
    if (np.period != 1 || !np.closed || np.height != r) continue;
    if (!is_indivisible_nielsen(f, np.path)) continue;
    hits.push_back(np.path);
  }
  if (searched_exhaustively) *searched_exhaustively = true;
  if (hits.empty()) return std::nullopt;
  if (hits.size() > 1)
    throw inconsistent_nielsen_data(
        "multiple closed indivisible height-r Nielsen paths found; the paper's "
        "construction expects a unique one");
  return hits.front();
}

// --- the graph K and the nonattracting subgroup system ---

struct NonattractingData {
  std::set<int> z_edges;          // nonattracting subgraph Z
  EdgePath sigma_hat;             // closed INP of height r, possibly empty
  SubgroupSystem system;          // A_na
  int stratum = 0;
  int search_depth = 0;

  // K, for reporting: vertices are G-vertex ids, -1 for the free cone vertex
  // of a detached E_rho circle; edges are G-edge ids, -2 for E_rho.
  struct KEdge {
    int from;
    int to;
    int g_edge;  // -2 means E_rho
  };
  std::vector<KEdge> k_edges;

  bool carries_class(const CyclicWord& c) const { return carries_conjugacy_class(system, c); }
};

// Assemble K = Z (+ E_rho with endpoint identifications), check that h: K -> G
// is an immersion, and read off the subgroup system from the noncontractible
// components.
inline NonattractingData build_nas(const GraphSelfMap& f, int r, const std::set<int>& z,
                                   const std::optional<EdgePath>& nielsen, int search_depth) {
  const MarkedGraph& g = f.graph();
  for (int e : z)
    if (f.edge_height(e) == r)
      throw precondition_error("build_nas: Z may not contain H_r edges");

  NonattractingData out;
  out.z_edges = z;
  out.stratum = r;
  out.search_depth = search_depth;

  // K's vertex set: G-vertices incident to Z, plus possibly one free vertex.
  std::set<int> z_vertices;
  for (int e : z) {
    z_vertices.insert(g.edge(e).from);
    z_vertices.insert(g.edge(e).to);
  }
  for (int e : z) out.k_edges.push_back({g.edge(e).from, g.edge(e).to, e});

  bool rho_detached = false;
  if (nielsen && !nielsen->empty()) {
    const EdgePath& rho = *nielsen;
    if (f.path_height(rho) != r)
      throw inconsistent_nielsen_data("build_nas: Nielsen path must have height r");
    if (g.dir_from(rho.front()) != g.dir_to(rho.back()))
      throw inconsistent_nielsen_data("build_nas: Nielsen path must be closed");
    out.sigma_hat = rho;
    int v = g.dir_from(rho.front());
    if (z_vertices.count(v)) {
      out.k_edges.push_back({v, v, -2});
    } else {
      out.k_edges.push_back({-1, -1, -2});  // detached circle component
      rho_detached = true;
    }
  }

  // Immersion check: distinct directions of K at a common vertex must have
  // distinct initial directions in G under h.
  {
    std::map<int, std::vector<Dir>> initial;  // K-vertex (G id) -> G-directions
    for (int e : z) {
      initial[g.edge(e).from].push_back(forward_dir(e));
      initial[g.edge(e).to].push_back(reverse_dir(forward_dir(e)));
    }
    if (!out.sigma_hat.empty() && !rho_detached) {
      int v = g.dir_from(out.sigma_hat.front());
      initial[v].push_back(out.sigma_hat.front());
      initial[v].push_back(reverse_dir(out.sigma_hat.back()));
    }
    for (auto& [v, dirs] : initial) {
      std::set<Dir> distinct(dirs.begin(), dirs.end());
      if (distinct.size() != dirs.size())
        throw inconsistent_nielsen_data(
            "build_nas: h is not an immersion at vertex " + g.vertex_name(v));
    }
  }

  // Component subgroups: spanning tree per K component; non-tree K-edges give
  // loops whose h-images are read through the marking.
  {
    // union-find over K vertices (G ids; the detached circle needs none)
    std::map<int, int> parent;
    std::function<int(int)> find = [&](int v) {
      if (parent[v] != v) parent[v] = find(parent[v]);
      return parent[v];
    };
    for (int v : z_vertices) parent[v] = v;
    struct TreeInfo {
      EdgePath to_root;  // path in G from this vertex to its component root
    };
    // BFS forest over Z edges
    std::map<int, EdgePath> path_to_root;
    std::set<int> visited;
    std::vector<std::pair<int, int>> tree_edges;  // (edge id, direction used)
    for (int root : z_vertices) {
      if (visited.count(root)) continue;
      visited.insert(root);
      path_to_root[root] = EdgePath{};
      std::vector<int> queue{root};
      for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        int v = queue[qi];
        for (int e : z) {
          for (Dir d : {forward_dir(e), reverse_dir(forward_dir(e))}) {
            if (g.dir_from(d) != v) continue;
            int w = g.dir_to(d);
            if (visited.count(w)) continue;
            visited.insert(w);
            parent[w] = root;
            EdgePath pw = path_to_root[v];
            pw.insert(pw.begin(), reverse_dir(d));  // w -> v -> ... -> root
            path_to_root[w] = pw;
            queue.push_back(w);
            tree_edges.emplace_back(e, d);
          }
        }
      }
    }
    std::set<int> tree_ids;
    for (auto& [e, d] : tree_edges) tree_ids.insert(e);

    // loops per component root
    std::map<int, std::vector<ReducedWord>> gens_by_root;
    for (int e : z) {
      if (tree_ids.count(e)) continue;
      int u = g.edge(e).from, v = g.edge(e).to;
      int root = find(u);
      EdgePath loop = reversed_path(path_to_root[u]);  // root -> u
      loop.push_back(forward_dir(e));
      EdgePath down = path_to_root[v];  // v -> root
      loop.insert(loop.end(), down.begin(), down.end());
      gens_by_root[root].push_back(g.based_loop_word(g.tighten(loop)));
    }
    if (!out.sigma_hat.empty()) {
      if (rho_detached) {
        gens_by_root[-1].push_back(g.based_loop_word(out.sigma_hat));
      } else {
        int v = g.dir_from(out.sigma_hat.front());
        int root = find(v);
        EdgePath loop = reversed_path(path_to_root[v]);
        loop.insert(loop.end(), out.sigma_hat.begin(), out.sigma_hat.end());
        EdgePath down = path_to_root[v];
        loop.insert(loop.end(), down.begin(), down.end());
        gens_by_root[root].push_back(g.based_loop_word(g.tighten(loop)));
      }
    }
    for (auto& [root, gens] : gens_by_root) {
      std::vector<ReducedWord> nontrivial;
      for (auto& w : gens)
        if (!w.empty()) nontrivial.push_back(w);
      if (!nontrivial.empty()) out.system.add_component(fold(nontrivial));
    }
  }
  return out;
}

// Full pipeline: Z, the (unique) closed INP, and A_na.
inline NonattractingData nonattracting_system(const GraphSelfMap& f, int r, int attraction_bound,
                                              int inp_length_bound = 8) {
  std::set<int> z = nonattracting_subgraph(f, r, attraction_bound);
  std::optional<EdgePath> inp = find_closed_inp(f, r, inp_length_bound);
  return build_nas(f, r, z, inp, attraction_bound);
}

// --- groupoid decomposition and relative length ---

struct GroupoidDecomposition {
  struct Block {
    std::size_t begin;
    std::size_t length;
    bool carried;
  };
  std::vector<Block> blocks;
  long relative_length = 0;
  std::size_t rotation = 0;  // for cyclic inputs: minimizing rotation
};

namespace detail {

inline bool matches_at(const EdgePath& p, std::size_t i, const EdgePath& pattern) {
  if (pattern.empty() || i + pattern.size() > p.size()) return false;
  for (std::size_t j = 0; j < pattern.size(); ++j)
    if (p[i + j] != pattern[j]) return false;
  return true;
}

inline GroupoidDecomposition decompose_linear(const EdgePath& p, const std::set<int>& z,
                                              const EdgePath& sigma) {
  EdgePath sigma_rev = reversed_path(sigma);
  GroupoidDecomposition out;
  std::size_t i = 0;
  while (i < p.size()) {
    std::size_t j = i;
    while (j < p.size()) {
      // longest-match tie-break: sigma (longer) before single Z-edges
      if (!sigma.empty() && matches_at(p, j, sigma))
        j += sigma.size();
      else if (!sigma_rev.empty() && matches_at(p, j, sigma_rev))
        j += sigma_rev.size();
      else if (z.count(edge_of(p[j])))
        ++j;
      else
        break;
    }
    if (j > i) {
      out.blocks.push_back({i, j - i, true});
      i = j;
    } else {
      out.blocks.push_back({i, 1, false});
      out.relative_length += 1;
      ++i;
    }
  }
  return out;
}

}  // namespace detail

// Greedy maximal matching of carried subpaths; cyclic inputs are minimized
// over rotations (the paper does not fix a decomposition algorithm, so this
// deterministic rule is the implemented semantics).
inline GroupoidDecomposition groupoid_decompose(const EdgePath& p, const NonattractingData& d,
                                                bool cyclic = false) {
  if (!cyclic || p.size() <= 1) return detail::decompose_linear(p, d.z_edges, d.sigma_hat);
  GroupoidDecomposition best;
  bool have = false;
  for (std::size_t r = 0; r < p.size(); ++r) {
    EdgePath rot(p.begin() + r, p.end());
    rot.insert(rot.end(), p.begin(), p.begin() + r);
    GroupoidDecomposition cand = detail::decompose_linear(rot, d.z_edges, d.sigma_hat);
    cand.rotation = r;
    if (!have || cand.relative_length < best.relative_length) {
      best = cand;
      have = true;
    }
  }
  return best;
}

inline long relative_length(const EdgePath& p, const NonattractingData& d, bool cyclic = false) {
  return groupoid_decompose(p, d, cyclic).relative_length;
}

inline long relative_length(const CyclicWord& c, const GraphSelfMap& f,
                            const NonattractingData& d) {
  return relative_length(f.graph().realize_class(c), d, /*cyclic=*/true);
}

// --- weak attraction trichotomy ---

enum class TrichotomyKind { InVMinus, PushedToVPlus, CarriedByNAS, Inconclusive };

inline const char* to_string(TrichotomyKind k) {
  switch (k) {
    case TrichotomyKind::InVMinus: return "in_V_minus";
    case TrichotomyKind::PushedToVPlus: return "pushed_to_V_plus";
    case TrichotomyKind::CarriedByNAS: return "carried_by_NAS";
    case TrichotomyKind::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct TrichotomyVerdict {
  TrichotomyKind kind = TrichotomyKind::Inconclusive;
  int l = -1;       // iterate for PushedToVPlus
  int bound = 0;
};

// The three alternatives of the weak attraction theorem, checked in order at
// bounded depth. `fwd` acts on the graph of f, `bwd` on the graph of f'.
inline TrichotomyVerdict weak_attraction_trichotomy(
    const CyclicWord& c, const GraphSelfMap& f, const AttractingNeighborhood& v_plus,
    const GraphSelfMap& f_bwd, const AttractingNeighborhood& v_minus,
    const NonattractingData& d, int l_bound) {
  TrichotomyVerdict out;
  out.bound = l_bound;
  if (v_minus.contains_circuit(f_bwd.graph().realize_class(c))) {
    out.kind = TrichotomyKind::InVMinus;
    return out;
  }
  if (d.carries_class(c)) {
    out.kind = TrichotomyKind::CarriedByNAS;
    return out;
  }
  EdgePath cur = f.graph().realize_class(c);
  for (int l = 0; l <= l_bound; ++l) {
    if (v_plus.contains_circuit(cur)) {
      out.kind = TrichotomyKind::PushedToVPlus;
      out.l = l;
      return out;
    }
    if (l < l_bound) cur = f.map_circuit(cur);
  }
  return out;
}

}  // namespace fbc
