// fbc: classify mapping tori of free group automorphisms and run the
// supporting analyses (nonattracting systems, electric lengths, flaring
// experiments).
//
// Exit codes: 0 completed, 2 precondition violation, 3 parse error.

#include "fbc/classifier.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

namespace {

using namespace fbc;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw input_error("cannot write file: " + out_path);
  out << text;
}

struct ConfigBundle {
  AnalysisConfig config;
  RestrictionSupplier supplier;
};

ConfigBundle load_config(const std::string& path) {
  ConfigBundle b;
  if (path.empty()) return b;
  nlohmann::json j;
  {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open config file: " + path);
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw parse_error(std::string("invalid config JSON: ") + e.what(), 0);
    }
  }
  auto dir = std::filesystem::path(path).parent_path();
  if (j.contains("restrictions")) {
    for (const auto& r : j.at("restrictions")) {
      RestrictionData rd;
      auto auto_path = dir / r.at("auto").get<std::string>();
      rd.automorphism = load_automorphism(auto_path.string()).automorphism;
      if (r.contains("graph_map")) {
        auto gm_path = dir / r.at("graph_map").get<std::string>();
        rd.representative = std::make_shared<GraphSelfMap>(load_graph_map(gm_path.string()));
      }
      rd.stratum = r.value("stratum", -1);
      b.supplier[r.at("component").get<std::string>()] = std::move(rd);
    }
    j.erase("restrictions");
  }
  b.config = AnalysisConfig::from_json(j);
  return b;
}

int run(int argc, char** argv) {
  CLI::App app{"mapping torus classifier for free group automorphisms"};
  app.require_subcommand(1);

  // classify
  auto* classify = app.add_subcommand("classify", "classify growth and relative hyperbolicity");
  std::string cl_auto, cl_gmap, cl_config, cl_out, cl_format = "text";
  int cl_stratum = -1;
  classify->add_option("auto-file", cl_auto, "automorphism text file")->required();
  classify->add_option("--graph-map", cl_gmap, "topological representative (JSON)");
  classify->add_option("--stratum", cl_stratum, "height of the EG stratum to analyze");
  classify->add_option("--config", cl_config, "analysis config (JSON)");
  classify->add_option("--out", cl_out, "output path (stdout if omitted)");
  classify->add_option("--format", cl_format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));

  // nas
  auto* nas_cmd = app.add_subcommand("nas", "nonattracting subgroup system of a stratum");
  std::string nas_gmap, nas_out;
  int nas_stratum = 0, nas_bound = 20, nas_inp = 6;
  nas_cmd->add_option("graph-map", nas_gmap, "topological representative (JSON)")->required();
  nas_cmd->add_option("--stratum", nas_stratum, "EG stratum height")->required();
  nas_cmd->add_option("--attraction-bound", nas_bound, "weak attraction bound");
  nas_cmd->add_option("--inp-bound", nas_inp, "Nielsen path length bound");
  nas_cmd->add_option("--out", nas_out, "output path");

  // flare
  auto* flare = app.add_subcommand("flare", "flaring experiments");
  std::string fl_kind, fl_auto, fl_gmap, fl_gmap_inv, fl_auto2, fl_gmap2, fl_gmap2_inv;
  std::string fl_config, fl_out;
  int fl_stratum = -1, fl_stratum2 = -1;
  bool fl_override = false;
  flare->add_option("kind", fl_kind, "conj | strict | three-of-four")
      ->required()
      ->check(CLI::IsMember({"conj", "strict", "three-of-four"}));
  flare->add_option("--auto", fl_auto, "automorphism text file")->required();
  flare->add_option("--graph-map", fl_gmap, "representative for the automorphism");
  flare->add_option("--inverse-graph-map", fl_gmap_inv, "representative for the inverse");
  flare->add_option("--stratum", fl_stratum, "EG stratum height");
  flare->add_option("--auto2", fl_auto2, "second automorphism (three-of-four)");
  flare->add_option("--graph-map2", fl_gmap2, "representative for the second automorphism");
  flare->add_option("--inverse-graph-map2", fl_gmap2_inv,
                    "representative for the second inverse");
  flare->add_option("--stratum2", fl_stratum2, "EG stratum height (second)");
  flare->add_option("--config", fl_config, "analysis config (JSON)");
  flare->add_flag("--override-assumptions", fl_override,
                  "run three-of-four even if the standing assumptions fail");
  flare->add_option("--out", fl_out, "output path");

  // electric-dist
  auto* edist = app.add_subcommand("electric-dist", "electric length of a word");
  std::string ed_word, ed_peripherals;
  int ed_ball = 12, ed_enum = 24, ed_conjbound = 1;
  bool ed_conjugacy = false;
  edist->add_option("word", ed_word, "word in apostrophe syntax, e.g. \"a c c b'\"")
      ->required();
  edist->add_option("--peripherals", ed_peripherals, "peripheral subgroups file");
  edist->add_option("--ball", ed_ball, "ball radius");
  edist->add_option("--enum-bound", ed_enum, "peripheral enumeration bound");
  edist->add_flag("--conjugacy", ed_conjugacy, "length of the conjugacy class instead");
  edist->add_option("--conjugator-bound", ed_conjbound, "conjugator bound for class length");

  // report
  auto* report = app.add_subcommand("report", "re-render a saved JSON report");
  std::string rp_in, rp_out, rp_format = "text";
  report->add_option("--in", rp_in, "report JSON produced by classify")->required();
  report->add_option("--out", rp_out, "output path");
  report->add_option("--format", rp_format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));

  CLI11_PARSE(app, argc, argv);

  if (*classify) {
    auto bundle = load_config(cl_config);
    auto parsed = load_automorphism(cl_auto);
    std::optional<GraphSelfMap> gmap;
    if (!cl_gmap.empty()) gmap.emplace(load_graph_map(cl_gmap));
    auto result = run_classification(parsed, gmap ? &*gmap : nullptr, cl_stratum,
                                     bundle.config, bundle.supplier);
    write_output(emit_report(result.report, cl_format), cl_out);
    return 0;
  }

  if (*nas_cmd) {
    auto gmap = load_graph_map(nas_gmap);
    auto data = nonattracting_system(gmap, nas_stratum, nas_bound, nas_inp);
    auto mal = is_malnormal(data.system);
    nlohmann::json j = nas_json(data, gmap);
    j["malnormal"] = mal.malnormal;
    write_output(j.dump(2) + "\n", nas_out);
    return 0;
  }

  if (*flare) {
    auto bundle = load_config(fl_config);
    const AnalysisConfig& cfg = bundle.config;
    auto parsed = load_automorphism(fl_auto);
    FreeAutomorphism phi = parsed.automorphism;

    nlohmann::json out;
    if (fl_kind == "conj" || fl_kind == "strict") {
      SubgroupSystem peripherals;
      if (!fl_gmap.empty()) {
        auto gmap = load_graph_map(fl_gmap);
        int stratum = fl_stratum;
        if (stratum < 0) {
          auto strata = gmap.classify_strata();
          for (auto it = strata.rbegin(); it != strata.rend(); ++it)
            if (it->kind == StratumKind::EG) {
              stratum = it->height;
              break;
            }
        }
        if (stratum < 0) throw precondition_error("no EG stratum found");
        auto nas = nonattracting_system(gmap, stratum, cfg.n_attraction, cfg.inp_length_bound);
        peripherals = nas.system;
      }
      ElectricSpace space(phi.rank(), peripherals, cfg.ball_radius,
                          cfg.peripheral_enumeration_bound);
      if (fl_kind == "conj") {
        CorpusLog log;
        auto corpus = corpus_generate_classes(phi.rank(), cfg.corpus, &peripherals, &log);
        auto v = conjugacy_flaring_search(corpus, phi, space, cfg.m_flare);
        out["kind"] = "conjugacy";
        out["constant"] = 3;
        out["M_bound"] = cfg.m_flare;
        out["M_found"] = v.M_found ? nlohmann::json(*v.M_found) : nlohmann::json(nullptr);
        out["excluded"] = v.excluded;
        out["corpus"] = {{"generated", log.generated}, {"rejected", log.rejected},
                         {"seed", cfg.corpus.seed}};
        out["warnings"] = v.warnings;
      } else {
        CorpusLog log;
        auto corpus = corpus_generate_words(phi.rank(), cfg.corpus, &peripherals, &log);
        auto v = strict_flaring_search(corpus, phi, space, cfg.n_strict);
        out["kind"] = "strict";
        out["constant"] = 2;
        out["N_bound"] = cfg.n_strict;
        out["N_found"] = v.M_found ? nlohmann::json(*v.M_found) : nlohmann::json(nullptr);
        out["excluded"] = v.excluded;
        out["corpus"] = {{"generated", log.generated}, {"rejected", log.rejected},
                         {"seed", cfg.corpus.seed}};
        out["warnings"] = v.warnings;
      }
    } else {
      // three-of-four needs both sides of both automorphisms
      if (fl_auto2.empty() || fl_gmap.empty() || fl_gmap_inv.empty() || fl_gmap2.empty() ||
          fl_gmap2_inv.empty())
        throw precondition_error(
            "three-of-four needs --auto2 and all four graph maps "
            "(--graph-map/--inverse-graph-map/--graph-map2/--inverse-graph-map2)");
      auto parsed2 = load_automorphism(fl_auto2);
      FreeAutomorphism psi = parsed2.automorphism;
      auto pick_stratum = [](const GraphSelfMap& g, int wanted) {
        if (wanted > 0) return wanted;
        auto strata = g.classify_strata();
        for (auto it = strata.rbegin(); it != strata.rend(); ++it)
          if (it->kind == StratumKind::EG) return it->height;
        throw precondition_error("no EG stratum found");
      };
      auto g1 = load_graph_map(fl_gmap);
      auto g1i = load_graph_map(fl_gmap_inv);
      auto g2 = load_graph_map(fl_gmap2);
      auto g2i = load_graph_map(fl_gmap2_inv);
      int s1 = pick_stratum(g1, fl_stratum), s1i = pick_stratum(g1i, fl_stratum);
      int s2 = pick_stratum(g2, fl_stratum2), s2i = pick_stratum(g2i, fl_stratum2);
      auto fwd1 = SideData::make(std::move(g1), s1, cfg.n_attraction, cfg.leaf_library_depth);
      auto bwd1 = SideData::make(std::move(g1i), s1i, cfg.n_attraction, cfg.leaf_library_depth);
      auto fwd2 = SideData::make(std::move(g2), s2, cfg.n_attraction, cfg.leaf_library_depth);
      auto bwd2 = SideData::make(std::move(g2i), s2i, cfg.n_attraction, cfg.leaf_library_depth);
      auto sa = standing_assumptions_check(fwd1, bwd1, fwd2, bwd2);
      nlohmann::json saj = nlohmann::json::array();
      for (const auto& item : sa.items)
        saj.push_back({{"name", item.name}, {"status", item.status}, {"detail", item.detail}});
      out["standing_assumptions"] = saj;

      SubgroupSystem peripherals = fwd1.nas.system;
      ElectricSpace space(phi.rank(), peripherals, cfg.ball_radius,
                          cfg.peripheral_enumeration_bound);
      CorpusLog log;
      auto corpus = corpus_generate_classes(phi.rank(), cfg.corpus, &peripherals, &log);
      auto v = three_of_four_test(corpus, phi, psi, space, cfg.m_flare, sa, fl_override);
      out["kind"] = "three-of-four";
      out["refused"] = v.refused;
      out["M_bound"] = v.M_bound;
      out["M_found"] = v.M_found ? nlohmann::json(*v.M_found) : nlohmann::json(nullptr);
      out["note"] = v.note;
      out["corpus"] = {{"generated", log.generated}, {"rejected", log.rejected},
                       {"seed", cfg.corpus.seed}};
      if (v.refused) {
        write_output(out.dump(2) + "\n", fl_out);
        return 2;
      }
    }
    write_output(out.dump(2) + "\n", fl_out);
    return 0;
  }

  if (*edist) {
    int rank = 0;
    for (char c : ed_word)
      if (std::islower(static_cast<unsigned char>(c))) rank = std::max(rank, c - 'a' + 1);
    SubgroupSystem peripherals;
    if (!ed_peripherals.empty()) {
      std::string text = slurp(ed_peripherals);
      for (char c : text)
        if (std::islower(static_cast<unsigned char>(c))) rank = std::max(rank, c - 'a' + 1);
      peripherals = parse_subgroup_system(text, rank);
      auto mal = is_malnormal(peripherals);
      peripherals.malnormal_checked = mal.malnormal;
      if (!mal.malnormal)
        std::cerr << "warning: peripheral system is not malnormal (" << mal.detail << ")\n";
    }
    if (rank == 0) throw parse_error("empty word", 0);
    ReducedWord w = parse_word(ed_word, rank);
    ElectricSpace space(rank, peripherals, ed_ball, ed_enum);
    nlohmann::json j;
    if (ed_conjugacy) {
      auto c = cyclic_reduce(w).first;
      auto el = space.conjugacy_length(c, ed_conjbound);
      j = {{"class", to_string(c)}, {"electric_length", el.length}, {"exact", el.exact},
           {"conjugator_bound", ed_conjbound}};
    } else {
      auto el = space.length(w);
      j = {{"word", to_string(w)}, {"electric_length", el.length}, {"exact", el.exact}};
    }
    j["ball_radius"] = ed_ball;
    j["enumeration_bound"] = ed_enum;
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  if (*report) {
    nlohmann::json j;
    std::ifstream in(rp_in);
    if (!in) throw input_error("cannot open report: " + rp_in);
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw parse_error(std::string("invalid report JSON: ") + e.what(), 0);
    }
    write_output(emit_report(j, rp_format), rp_out);
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const fbc::parse_error& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 3;
  } catch (const fbc::not_an_automorphism& e) {
    std::cerr << "not an automorphism: " << e.what() << "\n";
    return 3;
  } catch (const fbc::precondition_error& e) {
    std::cerr << "precondition violation: " << e.what() << "\n";
    return 2;
  } catch (const fbc::parameter_error& e) {
    std::cerr << "precondition violation: " << e.what() << "\n";
    return 2;
  } catch (const fbc::out_of_ball& e) {
    std::cerr << "precondition violation: " << e.what() << "\n";
    return 2;
  } catch (const fbc::domain_error& e) {
    std::cerr << "precondition violation: " << e.what() << "\n";
    return 2;
  } catch (const fbc::inconsistent_nielsen_data& e) {
    std::cerr << "precondition violation: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
