#pragma once

// Marked graphs and tight edge paths. A marked graph carries a homotopy
// equivalence to the rose recorded as a spanning tree plus a generator
// assignment on the complementary edges; contracting the tree reads circuits
// as conjugacy classes of F.

#include "fbc/words.hpp"

#include <map>
#include <string>
#include <vector>

namespace fbc {

// Oriented edges are encoded as 2*e (forward) and 2*e+1 (reversed).
using Dir = int;

inline Dir forward_dir(int edge) { return 2 * edge; }
inline Dir reverse_dir(Dir d) { return d ^ 1; }
inline int edge_of(Dir d) { return d >> 1; }
inline bool is_forward(Dir d) { return (d & 1) == 0; }

// A (not necessarily tight) edge path; the empty path needs a basepoint to
// stay composable, carried separately where it matters.
using EdgePath = std::vector<Dir>;

inline EdgePath reversed_path(const EdgePath& p) {
  EdgePath out(p.rbegin(), p.rend());
  for (auto& d : out) d = reverse_dir(d);
  return out;
}

struct malformed_path : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GraphEdge {
  std::string name;
  int from = 0;
  int to = 0;
};

class MarkedGraph {
 public:
  MarkedGraph() = default;

  int add_vertex(const std::string& name) {
    vertex_names_.push_back(name);
    return static_cast<int>(vertex_names_.size()) - 1;
  }

  int add_edge(const std::string& name, int from, int to) {
    edges_.push_back(GraphEdge{name, from, to});
    edge_index_[name] = static_cast<int>(edges_.size()) - 1;
    return static_cast<int>(edges_.size()) - 1;
  }

  int vertex_count() const { return static_cast<int>(vertex_names_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const GraphEdge& edge(int e) const { return edges_[e]; }
  const std::string& vertex_name(int v) const { return vertex_names_[v]; }

  int edge_by_name(const std::string& name) const {
    auto it = edge_index_.find(name);
    if (it == edge_index_.end()) throw input_error("unknown edge name: " + name);
    return it->second;
  }
  bool has_edge(const std::string& name) const { return edge_index_.count(name) > 0; }

  int dir_from(Dir d) const {
    const GraphEdge& e = edges_[edge_of(d)];
    return is_forward(d) ? e.from : e.to;
  }
  int dir_to(Dir d) const { return dir_from(reverse_dir(d)); }

  std::vector<Dir> dirs_at(int v) const {
    std::vector<Dir> out;
    for (int e = 0; e < edge_count(); ++e) {
      if (edges_[e].from == v) out.push_back(forward_dir(e));
      if (edges_[e].to == v) out.push_back(reverse_dir(forward_dir(e)));
    }
    return out;
  }

  int first_betti() const { return edge_count() - vertex_count() + 1; }

  bool is_connected() const {
    if (vertex_count() == 0) return false;
    std::vector<bool> seen(vertex_count(), false);
    std::vector<int> stack{0};
    seen[0] = true;
    int count = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (const auto& e : edges_) {
        for (int w : {e.from == v ? e.to : -1, e.to == v ? e.from : -1}) {
          if (w >= 0 && !seen[w]) {
            seen[w] = true;
            ++count;
            stack.push_back(w);
          }
        }
      }
    }
    return count == vertex_count();
  }

  bool has_valence_one_vertex() const {
    std::vector<int> val(vertex_count(), 0);
    for (const auto& e : edges_) {
      ++val[e.from];
      ++val[e.to];
    }
    for (int v : val)
      if (v == 1) return true;
    return false;
  }

  // Marking: tree edges carry no generator, each non-tree edge one generator.
  void set_marking(const std::vector<std::string>& tree_edges,
                   const std::map<std::string, int>& generator_of_edge, int rank) {
    rank_ = rank;
    tree_edge_.assign(edge_count(), false);
    gen_label_.assign(edge_count(), 0);
    for (const auto& n : tree_edges) tree_edge_[edge_by_name(n)] = true;
    for (const auto& [name, g] : generator_of_edge)
      gen_label_[edge_by_name(name)] = static_cast<Letter>(g);
    validate_marking();
    build_tree_paths();
  }

  // Default marking for roses and tree+loops graphs: a spanning tree is
  // chosen by BFS and generators are assigned to non-tree edges in edge order.
  void set_default_marking() {
    std::vector<bool> in_tree(edge_count(), false);
    std::vector<bool> seen(vertex_count(), false);
    seen[0] = true;
    bool grew = true;
    while (grew) {
      grew = false;
      for (int e = 0; e < edge_count(); ++e) {
        if (in_tree[e]) continue;
        bool sf = seen[edges_[e].from], st = seen[edges_[e].to];
        if (sf != st) {
          in_tree[e] = true;
          seen[edges_[e].from] = seen[edges_[e].to] = true;
          grew = true;
        }
      }
    }
    std::vector<std::string> tree;
    std::map<std::string, int> gens;
    int g = 0;
    for (int e = 0; e < edge_count(); ++e) {
      if (in_tree[e])
        tree.push_back(edges_[e].name);
      else
        gens[edges_[e].name] = ++g;
    }
    set_marking(tree, gens, g);
  }

  int rank() const { return rank_; }
  bool is_tree_edge(int e) const { return tree_edge_[e]; }
  Letter generator_label(int e) const { return gen_label_[e]; }

  void validate() const {
    if (!is_connected()) throw input_error("marked graph must be connected");
    if (has_valence_one_vertex()) throw input_error("marked graph has a valence-1 vertex");
    if (rank_ > 0 && first_betti() != rank_)
      throw input_error("first betti number does not match rank of F");
  }

  // --- paths ---

  bool composable(const EdgePath& p) const {
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
      if (dir_to(p[i]) != dir_from(p[i + 1])) return false;
    return true;
  }

  EdgePath tighten(const EdgePath& p) const {
    if (!composable(p)) throw malformed_path("tighten: consecutive edges do not compose");
    EdgePath stack;
    stack.reserve(p.size());
    for (Dir d : p) {
      if (!stack.empty() && stack.back() == reverse_dir(d))
        stack.pop_back();
      else
        stack.push_back(d);
    }
    return stack;
  }

  // Tighten a circuit: tighten linearly, then cancel across the wraparound.
  EdgePath tighten_cyclic(const EdgePath& p) const {
    EdgePath q = tighten(p);
    std::size_t lo = 0, hi = q.size();
    while (hi - lo >= 2 && q[lo] == reverse_dir(q[hi - 1])) {
      ++lo;
      --hi;
    }
    return EdgePath(q.begin() + lo, q.begin() + hi);
  }

  bool is_tight(const EdgePath& p) const {
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
      if (p[i + 1] == reverse_dir(p[i])) return false;
    return composable(p);
  }

  bool is_closed(const EdgePath& p) const {
    return !p.empty() && dir_from(p.front()) == dir_to(p.back());
  }

  Dir dir_by_name(const std::string& token) const {
    if (token.empty()) throw input_error("empty edge token");
    bool rev = token.back() == '\'';
    std::string name = rev ? token.substr(0, token.size() - 1) : token;
    Dir d = forward_dir(edge_by_name(name));
    return rev ? reverse_dir(d) : d;
  }

  std::string dir_name(Dir d) const {
    std::string s = edges_[edge_of(d)].name;
    if (!is_forward(d)) s += '\'';
    return s;
  }

  std::string path_string(const EdgePath& p) const {
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (i) s += ' ';
      s += dir_name(p[i]);
    }
    return s;
  }

  // --- marking: words <-> paths ---

  // Based loop in G representing generator g (tree path + labeled edge + tree path).
  const EdgePath& generator_loop(int g) const { return gen_loops_[g - 1]; }

  // Conjugacy class of a circuit: read generator labels around the circuit.
  CyclicWord circuit_class(const EdgePath& circuit) const {
    std::vector<Letter> letters;
    for (Dir d : circuit) {
      Letter g = gen_label_[edge_of(d)];
      if (g == 0) continue;
      Letter x = is_forward(d) ? g : inverse(g);
      if (!letters.empty() && letters.back() == inverse(x))
        letters.pop_back();
      else
        letters.push_back(x);
    }
    // cyclic reduction across the wraparound
    std::size_t lo = 0, hi = letters.size();
    while (hi - lo >= 2 && letters[lo] == inverse(letters[hi - 1])) {
      ++lo;
      --hi;
    }
    return CyclicWord::from_cyclically_reduced(
        std::vector<Letter>(letters.begin() + lo, letters.begin() + hi));
  }

  // Word of an arbitrary path relative to the marking basepoint (root):
  // the class of (root->start) . p . (end->root), used for loop extraction.
  ReducedWord based_loop_word(const EdgePath& p) const {
    std::vector<Letter> letters;
    auto push = [&](Letter x) {
      if (!letters.empty() && letters.back() == inverse(x))
        letters.pop_back();
      else
        letters.push_back(x);
    };
    if (!p.empty()) {
      for (Dir d : tree_path_from_root_[dir_from(p.front())])
        if (Letter g = gen_label_[edge_of(d)]; g != 0) push(is_forward(d) ? g : inverse(g));
      for (Dir d : p)
        if (Letter g = gen_label_[edge_of(d)]; g != 0) push(is_forward(d) ? g : inverse(g));
      for (Dir d : reversed_path(tree_path_from_root_[dir_to(p.back())]))
        if (Letter g = gen_label_[edge_of(d)]; g != 0) push(is_forward(d) ? g : inverse(g));
    }
    return ReducedWord(std::move(letters));
  }

  // Realize a word as a based loop at the root (tight).
  EdgePath realize_word(const ReducedWord& w) const {
    EdgePath p;
    for (Letter x : w.letters()) {
      const EdgePath& loop = gen_loops_[generator_index(x) - 1];
      EdgePath part = x > 0 ? loop : reversed_path(loop);
      for (Dir d : part) {
        if (!p.empty() && p.back() == reverse_dir(d))
          p.pop_back();
        else
          p.push_back(d);
      }
    }
    return p;
  }

  // Realize a conjugacy class as a tight circuit.
  EdgePath realize_class(const CyclicWord& c) const {
    return tighten_cyclic(realize_word(c.representative()));
  }

 private:
  void validate_marking() const {
    int gens = 0;
    std::vector<bool> seen(rank_ + 1, false);
    for (int e = 0; e < edge_count(); ++e) {
      if (tree_edge_[e] && gen_label_[e] != 0)
        throw input_error("tree edge cannot carry a generator: " + edges_[e].name);
      if (!tree_edge_[e]) {
        int g = gen_label_[e];
        if (g <= 0 || g > rank_)
          throw input_error("non-tree edge needs a generator in 1..rank: " + edges_[e].name);
        if (seen[g]) throw input_error("generator assigned twice in marking");
        seen[g] = true;
        ++gens;
      }
    }
    if (gens != rank_) throw input_error("marking must assign every generator exactly once");
  }

  void build_tree_paths() {
    // BFS over tree edges from the root (vertex 0).
    tree_path_from_root_.assign(vertex_count(), EdgePath{});
    std::vector<bool> seen(vertex_count(), false);
    seen[0] = true;
    std::vector<int> queue{0};
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      int v = queue[qi];
      for (int e = 0; e < edge_count(); ++e) {
        if (!tree_edge_[e]) continue;
        for (Dir d : {forward_dir(e), reverse_dir(forward_dir(e))}) {
          if (dir_from(d) == v && !seen[dir_to(d)]) {
            int w = dir_to(d);
            seen[w] = true;
            tree_path_from_root_[w] = tree_path_from_root_[v];
            tree_path_from_root_[w].push_back(d);
            queue.push_back(w);
          }
        }
      }
    }
    for (int v = 0; v < vertex_count(); ++v)
      if (!seen[v]) throw input_error("marking spanning tree does not span the graph");

    gen_loops_.assign(rank_, EdgePath{});
    for (int e = 0; e < edge_count(); ++e) {
      if (tree_edge_[e] || gen_label_[e] == 0) continue;
      EdgePath loop = tree_path_from_root_[edges_[e].from];
      loop.push_back(forward_dir(e));
      EdgePath back = reversed_path(tree_path_from_root_[edges_[e].to]);
      loop.insert(loop.end(), back.begin(), back.end());
      gen_loops_[gen_label_[e] - 1] = tighten(loop);
    }
  }

  std::vector<std::string> vertex_names_;
  std::vector<GraphEdge> edges_;
  std::map<std::string, int> edge_index_;

  int rank_ = 0;
  std::vector<bool> tree_edge_;
  std::vector<Letter> gen_label_;
  std::vector<EdgePath> tree_path_from_root_;
  std::vector<EdgePath> gen_loops_;
};

// Rose with `rank` petals labeled a, b, c, ... marked identically.
inline MarkedGraph make_rose(int rank) {
  MarkedGraph g;
  g.add_vertex("v");
  for (int i = 0; i < rank; ++i) g.add_edge(std::string(1, static_cast<char>('a' + i)), 0, 0);
  std::map<std::string, int> gens;
  for (int i = 0; i < rank; ++i) gens[std::string(1, static_cast<char>('a' + i))] = i + 1;
  g.set_marking({}, gens, rank);
  g.validate();
  return g;
}

}  // namespace fbc
