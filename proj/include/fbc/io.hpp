#pragma once

// Parsers for the text and JSON input formats, and JSON exports for folded
// graphs and nonattracting-system data.
//
// Automorphism text: `name: a -> a b ; b -> a ; c -> c`, inverses written
// with a trailing apostrophe; '#' starts a comment. Graph maps are JSON with
// vertices, edges, filtration, edge_images and an optional marking.

#include "fbc/graph_map.hpp"
#include "fbc/laminations.hpp"
#include "fbc/subgroups.hpp"
#include "fbc/words.hpp"

#include <json.hpp>

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fbc {

struct parse_error : std::runtime_error {
  parse_error(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
  std::size_t position;
};

struct ParsedAutomorphism {
  std::string name;
  FreeAutomorphism automorphism;
};

namespace detail {

inline std::string strip_comments(const std::string& text) {
  std::string out;
  bool comment = false;
  for (char ch : text) {
    if (ch == '#') comment = true;
    if (ch == '\n') comment = false;
    out.push_back(comment ? ' ' : ch);
  }
  return out;
}

}  // namespace detail

// Parse the `a -> a b ; b -> a` syntax. The basis is the set of letters that
// appear; it must be an initial segment a, b, c, ... and every basis letter
// needs exactly one rule. Inversion is attempted eagerly and stored.
inline ParsedAutomorphism parse_automorphism(const std::string& raw, int invert_effort = 4096) {
  std::string text = detail::strip_comments(raw);
  ParsedAutomorphism out;

  // optional `name:` prefix (a colon before the first arrow)
  std::size_t arrow = text.find("->");
  std::size_t colon = text.find(':');
  std::size_t begin = 0;
  if (colon != std::string::npos && (arrow == std::string::npos || colon < arrow)) {
    out.name = text.substr(0, colon);
    while (!out.name.empty() && std::isspace(static_cast<unsigned char>(out.name.front())))
      out.name.erase(out.name.begin());
    while (!out.name.empty() && std::isspace(static_cast<unsigned char>(out.name.back())))
      out.name.pop_back();
    begin = colon + 1;
  }

  struct Rule {
    char lhs;
    std::vector<std::pair<char, bool>> rhs;  // (letter, inverted)
    std::size_t pos;
  };
  std::vector<Rule> rules;

  std::size_t i = begin;
  auto skip_ws = [&]() {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  while (true) {
    skip_ws();
    if (i >= text.size()) break;
    Rule rule;
    rule.pos = i;
    if (!std::islower(static_cast<unsigned char>(text[i])))
      throw parse_error("expected a generator letter", i);
    rule.lhs = text[i++];
    skip_ws();
    if (i + 1 >= text.size() || text[i] != '-' || text[i + 1] != '>')
      throw parse_error("expected '->' after generator", i);
    i += 2;
    // image letters until ';' or end
    while (true) {
      skip_ws();
      if (i >= text.size() || text[i] == ';') break;
      if (!std::islower(static_cast<unsigned char>(text[i])))
        throw parse_error("expected an image letter", i);
      char c = text[i++];
      bool inv = false;
      if (i < text.size() && text[i] == '\'') {
        inv = true;
        ++i;
      }
      rule.rhs.emplace_back(c, inv);
    }
    if (rule.rhs.empty()) throw parse_error("empty image for generator", rule.pos);
    rules.push_back(std::move(rule));
    if (i < text.size() && text[i] == ';') ++i;
  }
  if (rules.empty()) throw parse_error("no rules found", 0);

  // basis = all letters appearing anywhere
  std::set<char> letters;
  for (const auto& r : rules) {
    letters.insert(r.lhs);
    for (auto& [c, inv] : r.rhs) letters.insert(c);
  }
  int rank = static_cast<int>(letters.size());
  for (char c = 'a'; c < 'a' + rank; ++c)
    if (!letters.count(c))
      throw parse_error(std::string("basis letters must be an initial segment a, b, ...; "
                                    "missing '") + c + "'", 0);

  std::vector<ReducedWord> images(rank);
  std::vector<bool> have(rank, false);
  for (const auto& r : rules) {
    int g = r.lhs - 'a';
    if (have[g]) throw parse_error(std::string("duplicate rule for '") + r.lhs + "'", r.pos);
    have[g] = true;
    std::vector<Letter> ls;
    for (auto& [c, inv] : r.rhs) {
      Letter x = static_cast<Letter>(c - 'a' + 1);
      ls.push_back(inv ? inverse(x) : x);
    }
    images[g] = reduce(ls, rank);
  }
  for (int g = 0; g < rank; ++g)
    if (!have[g])
      throw parse_error(std::string("missing generator image for '") +
                            static_cast<char>('a' + g) + "'", 0);

  out.automorphism = FreeAutomorphism(rank, std::move(images));
  ensure_inverse(out.automorphism, invert_effort);  // throws not_an_automorphism if bogus
  return out;
}

inline ReducedWord parse_word(const std::string& text, int rank) {
  std::vector<Letter> ls;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (!std::islower(static_cast<unsigned char>(c)))
      throw parse_error("expected a letter", i);
    Letter x = static_cast<Letter>(c - 'a' + 1);
    ++i;
    if (i < text.size() && text[i] == '\'') {
      x = inverse(x);
      ++i;
    }
    if (generator_index(x) > rank) throw parse_error("letter outside basis", i);
    ls.push_back(x);
  }
  return reduce(ls, rank);
}

// One subgroup per line; generators separated by commas.
inline SubgroupSystem parse_subgroup_system(const std::string& raw, int rank) {
  SubgroupSystem out;
  std::istringstream in(detail::strip_comments(raw));
  std::string line;
  while (std::getline(in, line)) {
    bool blank = true;
    for (char c : line) blank = blank && std::isspace(static_cast<unsigned char>(c));
    if (blank) continue;
    std::vector<ReducedWord> gens;
    std::stringstream ls(line);
    std::string part;
    while (std::getline(ls, part, ',')) {
      auto w = parse_word(part, rank);
      if (!w.empty()) gens.push_back(w);
    }
    if (!gens.empty()) out.add_component(fold(gens));
  }
  return out;
}

// --- graph map JSON ---

inline GraphSelfMap parse_graph_map_json(const nlohmann::json& j) {
  MarkedGraph g;
  if (!j.contains("vertices") || !j.contains("edges") || !j.contains("edge_images") ||
      !j.contains("filtration"))
    throw parse_error("graph map JSON needs vertices, edges, edge_images, filtration", 0);
  std::map<std::string, int> vid;
  for (const auto& v : j.at("vertices")) {
    std::string name = v.get<std::string>();
    vid[name] = g.add_vertex(name);
  }
  for (const auto& e : j.at("edges")) {
    std::string name = e.at("name").get<std::string>();
    std::string from = e.at("from").get<std::string>();
    std::string to = e.at("to").get<std::string>();
    if (!vid.count(from) || !vid.count(to))
      throw parse_error("edge endpoint references unknown vertex: " + name, 0);
    g.add_edge(name, vid.at(from), vid.at(to));
  }

  if (j.contains("marking")) {
    const auto& m = j.at("marking");
    std::vector<std::string> tree;
    for (const auto& t : m.at("spanning_tree")) tree.push_back(t.get<std::string>());
    std::map<std::string, int> gens;
    for (auto it = m.at("generators").begin(); it != m.at("generators").end(); ++it) {
      std::string letter = it.value().get<std::string>();
      if (letter.size() != 1 || !std::islower(static_cast<unsigned char>(letter[0])))
        throw parse_error("marking generator must be a single letter", 0);
      gens[it.key()] = letter[0] - 'a' + 1;
    }
    g.set_marking(tree, gens, static_cast<int>(gens.size()));
  } else {
    g.set_default_marking();
  }
  g.validate();

  std::map<std::string, EdgePath> images;
  for (auto it = j.at("edge_images").begin(); it != j.at("edge_images").end(); ++it) {
    EdgePath p;
    std::stringstream ss(it.value().get<std::string>());
    std::string tok;
    while (ss >> tok) p.push_back(g.dir_by_name(tok));
    images[it.key()] = p;
  }

  std::vector<std::vector<std::string>> filtration;
  for (const auto& level : j.at("filtration")) {
    std::vector<std::string> names;
    for (const auto& n : level) names.push_back(n.get<std::string>());
    filtration.push_back(names);
  }
  return GraphSelfMap(std::move(g), std::move(images), std::move(filtration));
}

inline GraphSelfMap load_graph_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open graph map file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("invalid JSON in ") + path + ": " + e.what(), 0);
  }
  return parse_graph_map_json(j);
}

inline ParsedAutomorphism load_automorphism(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open automorphism file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_automorphism(ss.str());
}

inline SubgroupSystem load_subgroup_system(const std::string& path, int rank) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open peripherals file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_subgroup_system(ss.str(), rank);
}

// --- exports ---

inline nlohmann::json folded_graph_json(const FoldedImmersion& f) {
  nlohmann::json j;
  j["vertices"] = f.vertex_count();
  j["rank"] = f.rank();
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : f.edges()) {
    edges.push_back({{"from", e.from}, {"to", e.to}, {"label", to_string(e.label)}});
  }
  j["edges"] = edges;
  nlohmann::json gens = nlohmann::json::array();
  for (const auto& w : f.generator_words()) gens.push_back(to_string(w));
  j["generators"] = gens;
  return j;
}

inline nlohmann::json subgroup_system_json(const SubgroupSystem& s) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& c : s.components) j.push_back(folded_graph_json(c));
  return j;
}

inline nlohmann::json nas_json(const NonattractingData& d, const GraphSelfMap& f) {
  nlohmann::json j;
  nlohmann::json z = nlohmann::json::array();
  for (int e : d.z_edges) z.push_back(f.graph().edge(e).name);
  j["nonattracting_subgraph"] = z;
  j["sigma_hat"] = f.graph().path_string(d.sigma_hat);
  j["stratum"] = d.stratum;
  j["search_depth"] = d.search_depth;
  j["components"] = subgroup_system_json(d.system);
  return j;
}

inline std::string render_component(const FoldedImmersion& f) {
  std::string s = "⟨";  // left angle bracket
  auto gens = f.generator_words();
  for (std::size_t i = 0; i < gens.size(); ++i) {
    if (i) s += ",";
    std::string w = to_string(gens[i]);
    std::erase(w, ' ');
    s += w;
  }
  return s + "⟩";
}

}  // namespace fbc
