#pragma once

// End-to-end pipeline: growth classification, rotationless stabilization
// heuristic, peripheral recursion over the nonattracting components, corpus
// generation, and the classification report.
//
// Verdicts are theorem-level conclusions whose hypotheses were checked at
// bounded depth; every bounded claim carries its bound in the report.

#include "fbc/flaring.hpp"
#include "fbc/io.hpp"
#include "fbc/parallel.hpp"

#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace fbc {

struct CorpusConfig {
  int count = 200;
  int min_len = 2;
  int max_len = 30;
  std::uint64_t seed = 1;
};

struct AnalysisConfig {
  int n_attraction = 20;       // weak attraction bound
  int m_flare = 12;            // conjugacy flaring exponent bound
  int n_strict = 10;           // strict flaring exponent bound
  int ball_radius = 64;
  int peripheral_enumeration_bound = 16;
  int leaf_library_depth = 6;
  int inp_length_bound = 6;
  int growth_iteration_bound = 14;
  int periodic_length_bound = 6;
  int periodic_period_bound = 6;
  int stabilize_depth = 8;
  int stabilize_class_length = 4;
  int conjugator_bound = 1;
  bool run_flaring = false;
  CorpusConfig corpus;
  std::optional<int> rotationless_power;

  static AnalysisConfig from_json(const nlohmann::json& j) {
    AnalysisConfig c;
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("n_attraction", c.n_attraction);
    get("m_flare", c.m_flare);
    get("n_strict", c.n_strict);
    get("ball_radius", c.ball_radius);
    get("peripheral_enumeration_bound", c.peripheral_enumeration_bound);
    get("leaf_library_depth", c.leaf_library_depth);
    get("inp_length_bound", c.inp_length_bound);
    get("growth_iteration_bound", c.growth_iteration_bound);
    get("periodic_length_bound", c.periodic_length_bound);
    get("periodic_period_bound", c.periodic_period_bound);
    get("stabilize_depth", c.stabilize_depth);
    get("stabilize_class_length", c.stabilize_class_length);
    get("conjugator_bound", c.conjugator_bound);
    get("run_flaring", c.run_flaring);
    if (j.contains("corpus")) {
      const auto& cj = j.at("corpus");
      if (cj.contains("count")) c.corpus.count = cj.at("count").get<int>();
      if (cj.contains("min_len")) c.corpus.min_len = cj.at("min_len").get<int>();
      if (cj.contains("max_len")) c.corpus.max_len = cj.at("max_len").get<int>();
      if (cj.contains("seed")) c.corpus.seed = cj.at("seed").get<std::uint64_t>();
    }
    if (j.contains("rotationless_power"))
      c.rotationless_power = j.at("rotationless_power").get<int>();
    for (auto& [k, v] : j.items()) {
      (void)v;
      static const std::set<std::string> known{
          "n_attraction", "m_flare", "n_strict", "ball_radius",
          "peripheral_enumeration_bound", "leaf_library_depth", "inp_length_bound",
          "growth_iteration_bound", "periodic_length_bound", "periodic_period_bound",
          "stabilize_depth", "stabilize_class_length", "conjugator_bound", "run_flaring",
          "corpus", "rotationless_power"};
      if (!known.count(k)) throw parse_error("unknown config key: " + k, 0);
    }
    validate(c);
    return c;
  }

  nlohmann::json to_json() const {
    nlohmann::json j{{"n_attraction", n_attraction},
                     {"m_flare", m_flare},
                     {"n_strict", n_strict},
                     {"ball_radius", ball_radius},
                     {"peripheral_enumeration_bound", peripheral_enumeration_bound},
                     {"leaf_library_depth", leaf_library_depth},
                     {"inp_length_bound", inp_length_bound},
                     {"growth_iteration_bound", growth_iteration_bound},
                     {"periodic_length_bound", periodic_length_bound},
                     {"periodic_period_bound", periodic_period_bound},
                     {"stabilize_depth", stabilize_depth},
                     {"stabilize_class_length", stabilize_class_length},
                     {"conjugator_bound", conjugator_bound},
                     {"run_flaring", run_flaring},
                     {"corpus",
                      {{"count", corpus.count},
                       {"min_len", corpus.min_len},
                       {"max_len", corpus.max_len},
                       {"seed", corpus.seed}}}};
    if (rotationless_power) j["rotationless_power"] = *rotationless_power;
    return j;
  }

  static void validate(const AnalysisConfig& c) {
    for (int b : {c.n_attraction, c.m_flare, c.n_strict, c.ball_radius,
                  c.peripheral_enumeration_bound, c.leaf_library_depth, c.inp_length_bound,
                  c.growth_iteration_bound, c.periodic_length_bound, c.periodic_period_bound,
                  c.stabilize_depth, c.corpus.min_len, c.corpus.max_len})
      if (b <= 0) throw input_error("config bounds must be positive");
    if (c.corpus.count < 0) throw input_error("corpus count must be nonnegative");
    if (c.corpus.min_len > c.corpus.max_len)
      throw input_error("corpus length range is empty");
  }
};

// --- corpus generation ---

struct constraint_unsatisfiable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CorpusLog {
  int generated = 0;
  int rejected = 0;
};

// Deterministic pseudo-random cyclically reduced classes. Raw engine draws
// (not distributions) keep the stream identical across platforms.
inline std::vector<CyclicWord> corpus_generate_classes(int rank, const CorpusConfig& cfg,
                                                       const SubgroupSystem* not_carried_by,
                                                       CorpusLog* log = nullptr) {
  std::mt19937_64 rng(cfg.seed);
  std::vector<CyclicWord> out;
  long budget = 200L * cfg.count + 1000;
  while (static_cast<int>(out.size()) < cfg.count) {
    if (--budget < 0)
      throw constraint_unsatisfiable("corpus constraints unsatisfiable within retry budget");
    int len = cfg.min_len + static_cast<int>(rng() % (cfg.max_len - cfg.min_len + 1));
    std::vector<Letter> ls;
    while (static_cast<int>(ls.size()) < len) {
      int k = static_cast<int>(rng() % (2 * rank));
      Letter x = static_cast<Letter>((k / 2 + 1) * (k % 2 == 0 ? 1 : -1));
      if (!ls.empty() && ls.back() == inverse(x)) continue;
      if (static_cast<int>(ls.size()) == len - 1 && !ls.empty() && x == inverse(ls.front()))
        continue;  // keep it cyclically reduced
      ls.push_back(x);
    }
    CyclicWord c = CyclicWord::from_cyclically_reduced(ls);
    if (not_carried_by && carries_conjugacy_class(*not_carried_by, c)) {
      if (log) ++log->rejected;
      continue;
    }
    out.push_back(std::move(c));
    if (log) ++log->generated;
  }
  return out;
}

inline std::vector<ReducedWord> corpus_generate_words(int rank, const CorpusConfig& cfg,
                                                      const SubgroupSystem* not_inside,
                                                      CorpusLog* log = nullptr) {
  std::mt19937_64 rng(cfg.seed);
  std::vector<ReducedWord> out;
  long budget = 200L * cfg.count + 1000;
  while (static_cast<int>(out.size()) < cfg.count) {
    if (--budget < 0)
      throw constraint_unsatisfiable("corpus constraints unsatisfiable within retry budget");
    int len = cfg.min_len + static_cast<int>(rng() % (cfg.max_len - cfg.min_len + 1));
    std::vector<Letter> ls;
    while (static_cast<int>(ls.size()) < len) {
      int k = static_cast<int>(rng() % (2 * rank));
      Letter x = static_cast<Letter>((k / 2 + 1) * (k % 2 == 0 ? 1 : -1));
      if (!ls.empty() && ls.back() == inverse(x)) continue;
      ls.push_back(x);
    }
    ReducedWord w(ls);
    bool inside = false;
    if (not_inside)
      for (const auto& comp : not_inside->components)
        if (comp.attach_vertex() && comp.contains(w)) inside = true;
    if (inside) {
      if (log) ++log->rejected;
      continue;
    }
    out.push_back(std::move(w));
    if (log) ++log->generated;
  }
  return out;
}

// --- growth classification ---

enum class GrowthKind { FiniteOrder, Polynomial, Exponential };

struct GrowthClassification {
  GrowthKind kind = GrowthKind::Exponential;
  int order = 0;              // finite order
  int degree = 0;             // polynomial degree
  bool certified = false;     // exponential certified via PF > 1
  double lambda = 0;          // certified stretch factor
  std::vector<long> lengths;  // measured max image lengths per iterate
};

inline GrowthClassification classify_growth(const FreeAutomorphism& phi,
                                            const GraphSelfMap* representative,
                                            const AnalysisConfig& cfg) {
  GrowthClassification g;

  // exact finite order detection
  FreeAutomorphism power = phi;
  for (int k = 1; k <= cfg.growth_iteration_bound; ++k) {
    if (power.is_identity()) {
      g.kind = GrowthKind::FiniteOrder;
      g.order = k == 1 ? 1 : k;
      return g;
    }
    power = compose(phi, power);
  }

  // certified exponential growth from a representative with an EG stratum
  if (representative) {
    auto strata = representative->classify_strata();
    for (auto it = strata.rbegin(); it != strata.rend(); ++it) {
      if (it->kind == StratumKind::EG) {
        g.kind = GrowthKind::Exponential;
        g.certified = true;
        g.lambda = it->pf->midpoint();
        return g;
      }
    }
  }

  // empirical fit on max generator image length
  std::vector<long> L;
  FreeAutomorphism cur = FreeAutomorphism::identity(phi.rank());
  for (int k = 0; k <= cfg.growth_iteration_bound; ++k) {
    long mx = 0;
    for (const auto& im : cur.images()) mx = std::max(mx, static_cast<long>(im.size()));
    L.push_back(mx);
    cur = compose(phi, cur);
  }
  g.lengths = L;

  // eventually-polynomial growth has vanishing finite differences on the tail
  std::size_t tail_start = L.size() > 7 ? L.size() - 7 : 0;
  std::vector<long> tail(L.begin() + tail_start, L.end());
  for (int d = 0; d + 2 <= static_cast<int>(tail.size()); ++d) {
    std::vector<long> diff = tail;
    for (int s = 0; s <= d; ++s)
      for (std::size_t i = 0; i + 1 < diff.size(); ++i) diff[i] = diff[i + 1] - diff[i];
    bool zero = true;
    for (std::size_t i = 0; i + d + 1 < tail.size(); ++i) zero = zero && diff[i] == 0;
    if (zero) {
      g.kind = GrowthKind::Polynomial;
      g.degree = d;
      return g;
    }
  }
  g.kind = GrowthKind::Exponential;
  g.certified = false;
  if (L.size() >= 2 && L[L.size() - 2] > 0)
    g.lambda = static_cast<double>(L.back()) / static_cast<double>(L[L.size() - 2]);
  return g;
}

// --- rotationless stabilization heuristic ---

struct StabilizeResult {
  int power = 1;
  bool stabilized = false;
  int depth = 0;
};

namespace detail {

inline std::set<CyclicWord> fixed_classes(const FreeAutomorphism& phi_power, int rank,
                                          int length_bound) {
  std::set<CyclicWord> out;
  std::vector<Letter> word;
  std::function<void()> grow = [&]() {
    if (!word.empty() && (word.size() == 1 || word.front() != inverse(word.back()))) {
      CyclicWord c = CyclicWord::from_cyclically_reduced(word);
      if (apply_class(phi_power, c) == c) out.insert(c);
    }
    if (static_cast<int>(word.size()) >= length_bound) return;
    for (int key = 0; key < 2 * rank; ++key) {
      Letter x = static_cast<Letter>((key / 2 + 1) * (key % 2 == 0 ? 1 : -1));
      if (!word.empty() && word.back() == inverse(x)) continue;
      word.push_back(x);
      grow();
      word.pop_back();
    }
  };
  grow();
  return out;
}

inline std::set<Dir> fixed_directions(const GraphSelfMap& f, int power) {
  std::set<Dir> out;
  for (int e = 0; e < f.graph().edge_count(); ++e) {
    for (Dir d : {forward_dir(e), reverse_dir(forward_dir(e))}) {
      Dir cur = d;
      for (int i = 0; i < power; ++i) cur = f.first_direction(cur);
      if (cur == d) out.insert(d);
    }
  }
  return out;
}

}  // namespace detail

// Smallest k <= depth whose fixed classes (up to a length bound) and fixed
// directions agree between phi^k and phi^{2k}. Heuristic; the report records
// the depth used.
inline StabilizeResult stabilize_power(const FreeAutomorphism& phi,
                                       const GraphSelfMap* representative,
                                       const AnalysisConfig& cfg) {
  StabilizeResult res;
  res.depth = cfg.stabilize_depth;
  std::vector<FreeAutomorphism> powers{FreeAutomorphism::identity(phi.rank())};
  auto power_of = [&](int k) -> const FreeAutomorphism& {
    while (static_cast<int>(powers.size()) <= k) powers.push_back(compose(phi, powers.back()));
    return powers[k];
  };
  for (int k = 1; k <= cfg.stabilize_depth; ++k) {
    auto s1 = detail::fixed_classes(power_of(k), phi.rank(), cfg.stabilize_class_length);
    auto s2 = detail::fixed_classes(power_of(2 * k), phi.rank(), cfg.stabilize_class_length);
    bool dirs_ok = true;
    if (representative) {
      dirs_ok = detail::fixed_directions(*representative, k) ==
                detail::fixed_directions(*representative, 2 * k);
    }
    if (s1 == s2 && dirs_ok) {
      res.power = k;
      res.stabilized = true;
      return res;
    }
  }
  res.power = cfg.stabilize_depth;
  res.stabilized = false;
  return res;
}

// --- peripheral recursion ---

struct RestrictionData {
  FreeAutomorphism automorphism;
  std::shared_ptr<GraphSelfMap> representative;  // may be null
  int stratum = 0;
};

// User-supplied restriction representatives, keyed by the rendered component.
using RestrictionSupplier = std::map<std::string, RestrictionData>;

struct PeripheralNode {
  std::string component;  // rendered generators, or "(root)"
  int rank = 0;
  std::string leaf;       // empty for internal nodes
  std::vector<PeripheralNode> children;

  nlohmann::json to_json() const {
    nlohmann::json j{{"component", component}, {"rank", rank}};
    if (!leaf.empty()) j["leaf"] = leaf;
    nlohmann::json ch = nlohmann::json::array();
    for (const auto& c : children) ch.push_back(c.to_json());
    if (!ch.empty()) j["children"] = ch;
    return j;
  }

  bool all_leaves_atoroidal() const {
    if (children.empty()) return leaf == "atoroidal-hyperbolic-evidence";
    for (const auto& c : children)
      if (!c.all_leaves_atoroidal()) return false;
    return true;
  }
};

struct construction_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline PeripheralNode recurse_peripherals(const std::string& label, int ambient_rank,
                                          const GraphSelfMap* rep, int stratum,
                                          const AnalysisConfig& cfg,
                                          const RestrictionSupplier& supplier, int depth_left) {
  PeripheralNode node;
  node.component = label;
  node.rank = ambient_rank;
  if (depth_left <= 0) {
    node.leaf = "needs-data";
    return node;
  }
  if (!rep) {
    node.leaf = "needs-data";
    return node;
  }
  auto nas = nonattracting_system(*rep, stratum, cfg.n_attraction, cfg.inp_length_bound);
  if (nas.system.trivial()) {
    node.leaf = "atoroidal-hyperbolic-evidence";
    return node;
  }
  for (const auto& comp : nas.system.components) {
    PeripheralNode child;
    child.component = render_component(comp);
    child.rank = comp.rank();
    if (child.rank >= ambient_rank)
      throw construction_error("peripheral recursion: rank does not decrease at " +
                               child.component);
    if (child.rank <= 2) {
      child.leaf = "rank<=2";
    } else {
      auto it = supplier.find(child.component);
      if (it == supplier.end()) {
        child.leaf = "needs-data";
      } else {
        const RestrictionData& rd = it->second;
        if (rd.automorphism.rank() != child.rank)
          throw construction_error("restriction rank mismatch for " + child.component);
        auto growth = classify_growth(rd.automorphism, rd.representative.get(), cfg);
        if (growth.kind == GrowthKind::Polynomial || growth.kind == GrowthKind::FiniteOrder) {
          child.leaf = "polynomial";
        } else {
          child = recurse_peripherals(child.component, child.rank,
                                      rd.representative.get(), rd.stratum, cfg, supplier,
                                      depth_left - 1);
          child.component = render_component(comp);
          child.rank = comp.rank();
        }
      }
    }
    node.children.push_back(std::move(child));
  }
  return node;
}

}  // namespace detail

inline PeripheralNode peripheral_recursion(const FreeAutomorphism& phi, const GraphSelfMap* rep,
                                           int stratum, const AnalysisConfig& cfg,
                                           const RestrictionSupplier& supplier) {
  // depth can never exceed the ambient rank: ranks decrease strictly
  return detail::recurse_peripherals("(root)", phi.rank(), rep, stratum, cfg, supplier,
                                     phi.rank());
}

// --- report ---

inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10f", x);
  return buf;
}

inline std::string growth_string(const GrowthClassification& g) {
  switch (g.kind) {
    case GrowthKind::FiniteOrder: return "finite_order(" + std::to_string(g.order) + ")";
    case GrowthKind::Polynomial: return "polynomial(" + std::to_string(g.degree) + ")";
    case GrowthKind::Exponential:
      return g.certified ? "exponential (certified)" : "exponential (empirical)";
  }
  return "?";
}

// The verdict is a pure function of the sub-results.
inline std::string verdict_string(const GrowthClassification& growth,
                                  const SubgroupSystem* nas, const PeripheralNode* tree) {
  if (growth.kind == GrowthKind::FiniteOrder)
    return "finite order ⇒ not virtually acylindrically hyperbolic";
  if (growth.kind == GrowthKind::Polynomial)
    return "not relatively hyperbolic; acylindrically hyperbolic (virtually)";
  if (tree && tree->all_leaves_atoroidal()) return "hyperbolic (Brinkmann via recursion)";
  if (!nas) return "relatively hyperbolic; peripherals undetermined (no representative)";
  std::string peripherals;
  for (std::size_t i = 0; i < nas->components.size(); ++i) {
    if (i) peripherals += ", ";
    peripherals += render_component(nas->components[i]) + " ⋊ Z";
  }
  return "relatively hyperbolic w.r.t. {" + peripherals + "}";
}

struct ClassificationResult {
  nlohmann::json report;
  std::string verdict;
};

// Full pipeline for one automorphism (representative optional). The stratum,
// when negative, is resolved to the topmost EG stratum; the CLI requires it
// explicitly for maps with several EG strata.
inline ClassificationResult run_classification(const ParsedAutomorphism& parsed,
                                               const GraphSelfMap* rep, int stratum,
                                               const AnalysisConfig& cfg,
                                               const RestrictionSupplier& supplier = {}) {
  const FreeAutomorphism& phi = parsed.automorphism;
  nlohmann::json rep_json;
  rep_json["name"] = parsed.name.empty() ? "(unnamed)" : parsed.name;
  rep_json["rank"] = phi.rank();
  rep_json["config"] = cfg.to_json();
  rep_json["annotation"] = "theorem-level; bounded evidence for hypotheses";

  auto growth = classify_growth(phi, rep, cfg);
  rep_json["growth"] = growth_string(growth);
  if (growth.kind == GrowthKind::Exponential && growth.certified)
    rep_json["stretch_factor"] = format_double(growth.lambda);

  // rotationless handling
  if (cfg.rotationless_power) {
    rep_json["rotationless_power"] = {{"value", *cfg.rotationless_power}, {"source", "pinned"}};
  } else {
    auto st = stabilize_power(phi, rep, cfg);
    rep_json["rotationless_power"] = {{"value", st.power},
                                      {"source", "stabilization heuristic"},
                                      {"stabilized", st.stabilized},
                                      {"depth", st.depth}};
  }

  // atoroidal evidence
  {
    auto witness =
        periodic_conjugacy_search(phi, cfg.periodic_period_bound, cfg.periodic_length_bound);
    nlohmann::json pj{{"period_bound", cfg.periodic_period_bound},
                      {"length_bound", cfg.periodic_length_bound}};
    if (witness) {
      pj["witness"] = to_string(witness->cls);
      pj["period"] = witness->period;
    } else {
      pj["witness"] = nullptr;
    }
    rep_json["atoroidal_evidence"] = pj;
  }

  std::optional<NonattractingData> nas;
  std::optional<PeripheralNode> tree;
  if (rep) {
    auto strata = rep->classify_strata();
    nlohmann::json sj = nlohmann::json::array();
    for (const auto& s : strata) {
      nlohmann::json one{{"height", s.height},
                         {"kind", to_string(s.kind)},
                         {"edges", static_cast<int>(s.edges.size())}};
      if (s.pf) {
        one["lambda"] = format_double(s.pf->midpoint());
        one["lambda_interval_width"] = format_double(s.pf->width());
      }
      sj.push_back(one);
    }
    rep_json["strata"] = sj;

    if (stratum < 0) {
      for (auto it = strata.rbegin(); it != strata.rend(); ++it)
        if (it->kind == StratumKind::EG) {
          stratum = it->height;
          break;
        }
    }
    if (stratum > 0) {
      // reject a stratum with a higher EG stratum outside Z
      nas = nonattracting_system(*rep, stratum, cfg.n_attraction, cfg.inp_length_bound);
      for (const auto& s : strata)
        if (s.kind == StratumKind::EG && s.height > stratum) {
          bool carried = true;
          for (int e : s.edges) carried = carried && nas->z_edges.count(e);
          if (!carried)
            throw precondition_error(
                "an EG stratum above the chosen one is not carried by <Z, sigma>; "
                "pick the topmost EG stratum");
        }
      rep_json["nas"] = nas_json(*nas, *rep);
      auto mal = is_malnormal(nas->system);
      rep_json["nas"]["malnormal"] = mal.malnormal;

      tree = peripheral_recursion(phi, rep, stratum, cfg, supplier);
      rep_json["peripheral_tree"] = tree->to_json();

      if (cfg.run_flaring && growth.kind == GrowthKind::Exponential) {
        ElectricSpace space(phi.rank(), nas->system, cfg.ball_radius,
                            cfg.peripheral_enumeration_bound);
        CorpusLog clog;
        auto classes =
            corpus_generate_classes(phi.rank(), cfg.corpus, &nas->system, &clog);
        auto cverdict = conjugacy_flaring_search(classes, phi, space, cfg.m_flare);
        nlohmann::json fj;
        fj["corpus"] = {{"generated", clog.generated}, {"rejected", clog.rejected}};
        fj["constant"] = 3;
        fj["M_bound"] = cfg.m_flare;
        fj["M_found"] = cverdict.M_found ? nlohmann::json(*cverdict.M_found)
                                         : nlohmann::json(nullptr);
        fj["excluded"] = cverdict.excluded;
        rep_json["conjugacy_flaring"] = fj;

        CorpusConfig word_cfg = cfg.corpus;
        word_cfg.max_len = std::min(word_cfg.max_len, 20);
        auto words = corpus_generate_words(phi.rank(), word_cfg, &nas->system);
        auto sverdict = strict_flaring_search(words, phi, space, cfg.n_strict);
        nlohmann::json gj;
        gj["constant"] = 2;
        gj["N_bound"] = cfg.n_strict;
        gj["N_found"] = sverdict.M_found ? nlohmann::json(*sverdict.M_found)
                                         : nlohmann::json(nullptr);
        gj["excluded"] = sverdict.excluded;
        rep_json["strict_flaring"] = gj;
      }
    }
  }

  nlohmann::json notes = nlohmann::json::array();
  notes.push_back("mapping torus satisfies a quadratic isoperimetric inequality");
  if (tree && !tree->children.empty()) {
    std::function<bool(const PeripheralNode&)> tame = [&](const PeripheralNode& n) {
      if (n.children.empty()) return n.leaf == "polynomial" || n.leaf == "rank<=2";
      for (const auto& c : n.children)
        if (!tame(c)) return false;
      return true;
    };
    if (tame(*tree))
      notes.push_back("peripheral restrictions grow polynomially at the recursion leaves");
  }
  rep_json["notes"] = notes;

  ClassificationResult result;
  result.verdict = verdict_string(growth, nas ? &nas->system : nullptr,
                                  tree ? &*tree : nullptr);
  rep_json["verdict"] = result.verdict;
  result.report = std::move(rep_json);
  return result;
}

// Render a report as text or JSON.
inline std::string emit_report(const nlohmann::json& report, const std::string& format) {
  if (format == "json") return report.dump(2) + "\n";
  if (format != "text") throw input_error("unknown report format: " + format);
  std::string out;
  out += "== classification report ==\n";
  out += "name:    " + report.value("name", std::string("?")) + "\n";
  out += "rank:    " + std::to_string(report.value("rank", 0)) + "\n";
  out += "growth:  " + report.value("growth", std::string("?")) + "\n";
  if (report.contains("stretch_factor"))
    out += "lambda:  " + report.at("stretch_factor").get<std::string>() + "\n";
  if (report.contains("atoroidal_evidence")) {
    const auto& p = report.at("atoroidal_evidence");
    if (p.at("witness").is_null())
      out += "periodic classes: none within bounds (length " +
             std::to_string(p.at("length_bound").get<int>()) + ", period " +
             std::to_string(p.at("period_bound").get<int>()) + ")\n";
    else
      out += "periodic class: " + p.at("witness").get<std::string>() + " with period " +
             std::to_string(p.at("period").get<int>()) + "\n";
  }
  if (report.contains("nas")) {
    out += "nonattracting system: " +
           std::to_string(report.at("nas").at("components").size()) + " component(s), "
           "malnormal: " + (report.at("nas").at("malnormal").get<bool>() ? "yes" : "no") +
           "\n";
  }
  if (report.contains("conjugacy_flaring")) {
    const auto& f = report.at("conjugacy_flaring");
    out += "conjugacy flaring (factor 3): M_found = " +
           (f.at("M_found").is_null() ? std::string("none within bound")
                                      : std::to_string(f.at("M_found").get<int>())) +
           " (bound " + std::to_string(f.at("M_bound").get<int>()) + ")\n";
  }
  out += "verdict: " + report.value("verdict", std::string("?")) + "\n";
  out += "note:    " + report.value("annotation", std::string()) + "\n";
  return out;
}

}  // namespace fbc
