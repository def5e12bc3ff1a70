#pragma once

// Topological representatives: a self map of a marked graph respecting a
// filtration, with strata classification, turn/legality analysis, Nielsen
// path search, bounded cancellation and critical constants.

#include "fbc/marked_graph.hpp"
#include "fbc/pf.hpp"
#include "fbc/words.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fbc {

struct domain_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class StratumKind { Zero, NEG, EG, Reducible };

inline const char* to_string(StratumKind k) {
  switch (k) {
    case StratumKind::Zero: return "zero";
    case StratumKind::NEG: return "NEG";
    case StratumKind::EG: return "EG";
    case StratumKind::Reducible: return "reducible";
  }
  return "?";
}

struct Stratum {
  int height = 0;                   // 1-based filtration index
  std::vector<int> edges;           // edge ids of H_k
  StratumKind kind = StratumKind::Zero;
  IntMatrix matrix;
  std::optional<PFCertificate> pf;  // present for irreducible strata
};

// Unordered pair of directions at a common vertex.
struct Turn {
  Dir a = 0, b = 0;
  Turn() = default;
  Turn(Dir x, Dir y) : a(std::min(x, y)), b(std::max(x, y)) {}
  bool degenerate() const { return a == b; }
  bool operator<(const Turn& o) const { return a != o.a ? a < o.a : b < o.b; }
  bool operator==(const Turn& o) const { return a == o.a && b == o.b; }
};

class GraphSelfMap {
 public:
  // filtration: increasing edge-name lists, last one = all edges.
  GraphSelfMap(MarkedGraph graph, std::map<std::string, EdgePath> edge_images,
               std::vector<std::vector<std::string>> filtration_names)
      : graph_(std::move(graph)) {
    const int ec = graph_.edge_count();
    images_.assign(ec, EdgePath{});
    for (const auto& [name, path] : edge_images) images_[graph_.edge_by_name(name)] = path;

    vertex_image_.assign(graph_.vertex_count(), -1);
    for (int e = 0; e < ec; ++e) {
      if (images_[e].empty())
        throw input_error("edge image must be a nontrivial path: " + graph_.edge(e).name);
      if (!graph_.is_tight(images_[e]))
        images_[e] = graph_.tighten(images_[e]);
      if (images_[e].empty())
        throw input_error("edge image tightens to a point: " + graph_.edge(e).name);
      assign_vertex_image(graph_.edge(e).from, graph_.dir_from(images_[e].front()));
      assign_vertex_image(graph_.edge(e).to, graph_.dir_to(images_[e].back()));
    }
    for (int v = 0; v < graph_.vertex_count(); ++v)
      if (vertex_image_[v] < 0) throw input_error("vertex with no incident edge image");

    // Filtration: strictly increasing, f-invariant.
    edge_height_.assign(ec, 0);
    height_count_ = static_cast<int>(filtration_names.size());
    std::set<int> assigned;
    for (int k = 0; k < height_count_; ++k) {
      for (const auto& name : filtration_names[k]) {
        int e = graph_.edge_by_name(name);
        if (!assigned.count(e)) {
          edge_height_[e] = k + 1;
          assigned.insert(e);
        } else if (edge_height_[e] > k + 1) {
          throw input_error("filtration is not increasing at edge " + name);
        }
      }
    }
    if (static_cast<int>(assigned.size()) != ec)
      throw input_error("filtration does not cover every edge");
    for (int e = 0; e < ec; ++e)
      for (Dir d : images_[e])
        if (edge_height_[edge_of(d)] > edge_height_[e])
          throw input_error("map does not respect the filtration at edge " +
                            graph_.edge(e).name);
  }

  static GraphSelfMap on_rose(int rank, const std::vector<ReducedWord>& images) {
    MarkedGraph rose = make_rose(rank);
    std::map<std::string, EdgePath> ei;
    std::vector<std::string> all;
    for (int i = 0; i < rank; ++i) {
      std::string name(1, static_cast<char>('a' + i));
      all.push_back(name);
      EdgePath p;
      for (Letter x : images[i].letters()) {
        Dir d = forward_dir(generator_index(x) - 1);
        p.push_back(x > 0 ? d : reverse_dir(d));
      }
      ei[name] = p;
    }
    return GraphSelfMap(std::move(rose), std::move(ei), {all});
  }

  const MarkedGraph& graph() const { return graph_; }
  int height_count() const { return height_count_; }
  int edge_height(int e) const { return edge_height_[e]; }
  int vertex_image(int v) const { return vertex_image_[v]; }

  const EdgePath& edge_image(int e) const { return images_[e]; }
  EdgePath dir_image(Dir d) const {
    return is_forward(d) ? images_[edge_of(d)] : reversed_path(images_[edge_of(d)]);
  }

  int path_height(const EdgePath& p) const {
    int h = 0;
    for (Dir d : p) h = std::max(h, edge_height_[edge_of(d)]);
    return h;
  }

  std::vector<int> stratum_edges(int height) const {
    std::vector<int> out;
    for (int e = 0; e < graph_.edge_count(); ++e)
      if (edge_height_[e] == height) out.push_back(e);
    return out;
  }

  // f_#: concatenate edge images and tighten.
  EdgePath map_path(const EdgePath& p) const {
    if (!graph_.composable(p)) throw malformed_path("map_path: path does not compose");
    EdgePath out;
    for (Dir d : p) {
      for (Dir x : dir_image(d)) {
        if (!out.empty() && out.back() == reverse_dir(x))
          out.pop_back();
        else
          out.push_back(x);
      }
    }
    return out;
  }

  EdgePath map_circuit(const EdgePath& p) const { return graph_.tighten_cyclic(map_path(p)); }

  EdgePath iterate_path(EdgePath p, int k) const {
    for (int i = 0; i < k; ++i) p = map_path(p);
    return p;
  }

  EdgePath iterate_circuit(EdgePath p, int k) const {
    for (int i = 0; i < k; ++i) p = map_circuit(p);
    return p;
  }

  // Entry (i,j): number of times f(E_j) crosses E_i in either direction,
  // over the edges of stratum `height`.
  IntMatrix transition_matrix(int height) const {
    std::vector<int> es = stratum_edges(height);
    if (es.empty()) throw domain_error("transition_matrix: height out of range or empty");
    std::map<int, int> pos;
    for (std::size_t i = 0; i < es.size(); ++i) pos[es[i]] = static_cast<int>(i);
    IntMatrix m(es.size(), std::vector<std::int64_t>(es.size(), 0));
    for (std::size_t j = 0; j < es.size(); ++j)
      for (Dir d : images_[es[j]]) {
        auto it = pos.find(edge_of(d));
        if (it != pos.end()) ++m[it->second][j];
      }
    return m;
  }

  std::vector<Stratum> classify_strata(const BigRat& tolerance = BigRat(1, 1000000000)) const {
    std::vector<Stratum> out;
    for (int k = 1; k <= height_count_; ++k) {
      Stratum s;
      s.height = k;
      s.edges = stratum_edges(k);
      if (s.edges.empty()) continue;
      s.matrix = transition_matrix(k);
      if (is_zero_matrix(s.matrix)) {
        s.kind = StratumKind::Zero;
      } else if (!is_irreducible(s.matrix)) {
        s.kind = StratumKind::Reducible;
      } else {
        s.pf = pf_bounds(s.matrix, tolerance);
        s.kind = (s.pf->lower > 1) ? StratumKind::EG : StratumKind::NEG;
      }
      out.push_back(std::move(s));
    }
    return out;
  }

  // --- turns ---

  Dir first_direction(Dir d) const { return dir_image(d).front(); }

  Turn map_turn(const Turn& t) const {
    return Turn(first_direction(t.a), first_direction(t.b));
  }

  std::vector<Turn> all_turns() const {
    std::vector<Turn> out;
    for (int v = 0; v < graph_.vertex_count(); ++v) {
      auto dirs = graph_.dirs_at(v);
      for (std::size_t i = 0; i < dirs.size(); ++i)
        for (std::size_t j = i + 1; j < dirs.size(); ++j)
          out.emplace_back(dirs[i], dirs[j]);
    }
    return out;
  }

  // A nondegenerate turn is illegal iff some Tf-iterate degenerates it;
  // computed by following each orbit until it cycles.
  std::set<Turn> illegal_turns() const {
    std::set<Turn> illegal;
    for (const Turn& t0 : all_turns()) {
      Turn t = t0;
      std::set<Turn> orbit;
      bool bad = false;
      while (orbit.insert(t).second) {
        t = map_turn(t);
        if (t.degenerate()) {
          bad = true;
          break;
        }
      }
      if (bad) illegal.insert(t0);
    }
    return illegal;
  }

  bool is_turn_legal(const Turn& t) const {
    if (t.degenerate()) return false;
    Turn cur = t;
    std::set<Turn> orbit;
    while (orbit.insert(cur).second) {
      cur = map_turn(cur);
      if (cur.degenerate()) return false;
    }
    return true;
  }

  std::vector<Turn> turns_taken(const EdgePath& p, bool cyclic = false) const {
    std::vector<Turn> out;
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
      out.emplace_back(reverse_dir(p[i]), p[i + 1]);
    if (cyclic && p.size() >= 2) out.emplace_back(reverse_dir(p.back()), p.front());
    return out;
  }

  // r-legal: height exactly r and every illegal turn crossed lies in G_{r-1}.
  bool is_r_legal(const EdgePath& p, int r, bool cyclic = false) const {
    if (!graph_.is_tight(p)) throw malformed_path("is_r_legal expects a tight path");
    if (path_height(p) != r) return false;
    for (const Turn& t : turns_taken(p, cyclic)) {
      int h = std::max(edge_height_[edge_of(t.a)], edge_height_[edge_of(t.b)]);
      if (h >= r && !is_turn_legal(t)) return false;
    }
    return true;
  }

  // --- bounded cancellation / critical constant ---

  // Classical upper bound: sum of the edge-image lengths.
  long bcc_bound() const {
    long s = 0;
    for (const auto& im : images_) s += static_cast<long>(im.size());
    return s;
  }

  // 2 BCC / (lambda_lower - 1) with the certified PF lower bound; only for EG strata.
  BigRat critical_constant(int height) const {
    IntMatrix m = transition_matrix(height);
    if (!is_irreducible(m))
      throw domain_error("critical_constant: stratum is not irreducible");
    PFCertificate c = pf_bounds(m, BigRat(1, 1000000000));
    if (!(c.lower > 1)) throw domain_error("critical_constant: stratum is NEG (lambda = 1)");
    return BigRat(2 * bcc_bound()) / (c.lower - 1);
  }

 private:
  void assign_vertex_image(int v, int w) {
    if (vertex_image_[v] >= 0 && vertex_image_[v] != w)
      throw input_error("edge images give inconsistent vertex images");
    vertex_image_[v] = w;
  }

  MarkedGraph graph_;
  std::vector<EdgePath> images_;
  std::vector<int> vertex_image_;
  std::vector<int> edge_height_;
  int height_count_ = 0;
};

}  // namespace fbc
