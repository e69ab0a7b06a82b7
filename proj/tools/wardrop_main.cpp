// wardrop: command-line front end for the congestion-signaling library.
//
// Subcommands: gen, solve, profile, enum, scheme, spcheck, experiment.
// Exit codes: 0 success, 1 usage error, 2 verification failure,
// 3 solver failure.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "wardrop/equilibrium.hpp"
#include "wardrop/generators.hpp"
#include "wardrop/json_io.hpp"
#include "wardrop/rng.hpp"
#include "wardrop/series_parallel.hpp"
#include "wardrop/signaling.hpp"
#include "wardrop/support_enum.hpp"
#include "wardrop/tntp.hpp"
#include "wardrop/types.hpp"

using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kVerifyFail = 2;
constexpr int kSolverFail = 3;

struct RunConfig {
  std::string subcommand;
  std::string instance_path;  // file source (instance JSON; TNTP for experiment)
  std::string generator;      // generator spec source
  std::string belief;
  std::string prior;
  std::string out;
  std::string format = "json";
  std::uint64_t seed = 42;
  double tol_gap = 1e-9;
  double tol_support = 1e-7;
  double eps_slope = 1e-9;
  std::string tau = "0.05,0.2,0.5,1.0";
  int runs = 10;
  double demand = 1e5;
  std::string source = "1";
  std::string target = "19";
  std::string witness_out;
};

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw wardrop::BadParameter("cannot open file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void emit(const RunConfig& cfg, const std::string& payload) {
  if (cfg.out.empty()) {
    std::cout << payload;
    if (!payload.empty() && payload.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(cfg.out);
  if (!out) throw wardrop::BadParameter("cannot write output file: " + cfg.out);
  out << payload;
}

wardrop::Instance load_instance(const RunConfig& cfg) {
  if (cfg.instance_path.empty() == cfg.generator.empty())
    throw wardrop::BadParameter("exactly one of --instance and --gen is required");
  if (!cfg.generator.empty())
    return wardrop::build(wardrop::GeneratorSpec::parse(cfg.generator));
  return wardrop::instance_from_json(slurp(cfg.instance_path));
}

wardrop::SolveOptions solve_options(const RunConfig& cfg) {
  wardrop::SolveOptions opt;
  opt.fw_gap_tol = cfg.tol_gap;
  opt.support_eps = cfg.tol_support;
  opt.slope_eps = cfg.eps_slope;
  return opt;
}

wardrop::Instance with_prior(wardrop::Instance inst, const std::vector<double>& prior) {
  if (static_cast<int>(prior.size()) != inst.num_states())
    throw wardrop::BadParameter("--prior length does not match the instance states");
  wardrop::make_belief(prior);  // validates
  inst.state_space.prior = prior;
  return inst;
}

int cmd_gen(const RunConfig& cfg) {
  wardrop::Instance inst = load_instance(cfg);
  emit(cfg, wardrop::instance_to_json(inst));
  return kOk;
}

int cmd_solve(const RunConfig& cfg) {
  wardrop::Instance inst = load_instance(cfg);
  if (cfg.belief.empty()) throw wardrop::BadParameter("solve needs --belief");
  wardrop::Belief mu = wardrop::make_belief(parse_numbers(cfg.belief));
  wardrop::EquilibriumResult res = wardrop::solve_wardrop(inst, mu, solve_options(cfg));
  emit(cfg, wardrop::equilibrium_to_json(inst, res));
  if (res.kkt_residual > 1e-6) {
    std::cerr << "kkt residual " << res.kkt_residual << " exceeds 1e-6\n";
    return kVerifyFail;
  }
  return kOk;
}

int cmd_profile(const RunConfig& cfg) {
  wardrop::Instance inst = load_instance(cfg);
  wardrop::EnumOptions opt;
  opt.seed = cfg.seed;
  opt.solve = solve_options(cfg);
  wardrop::SupportAtlas atlas = wardrop::enumerate_supports_two_state(inst, opt);
  wardrop::CostProfile prof = wardrop::cost_profile(atlas);
  bool concave = wardrop::is_concave(prof);
  if (cfg.format == "svg")
    emit(cfg, wardrop::profile_to_svg(prof));
  else if (cfg.format == "json")
    emit(cfg, wardrop::atlas_to_json(inst, atlas));
  else
    emit(cfg, wardrop::atlas_to_csv(inst, atlas));
  std::cerr << "concave=" << (concave ? "true" : "false") << '\n';
  return kOk;
}

int cmd_enum(const RunConfig& cfg) {
  wardrop::Instance inst = load_instance(cfg);
  wardrop::EnumOptions opt;
  opt.seed = cfg.seed;
  opt.solve = solve_options(cfg);
  wardrop::SupportAtlas atlas = wardrop::enumerate_supports_two_state(inst, opt);
  if (cfg.format == "csv")
    emit(cfg, wardrop::atlas_to_csv(inst, atlas));
  else
    emit(cfg, wardrop::atlas_to_json(inst, atlas));
  return kOk;
}

int cmd_scheme(const RunConfig& cfg) {
  wardrop::Instance inst = load_instance(cfg);
  if (!cfg.prior.empty()) inst = with_prior(std::move(inst), parse_numbers(cfg.prior));
  const std::vector<double>& prior = inst.state_space.prior;
  wardrop::SolveOptions sopt = solve_options(cfg);

  wardrop::SchemeEvaluation full =
      wardrop::evaluate_scheme(inst, wardrop::full_revelation_scheme(prior), sopt);
  wardrop::SchemeEvaluation none =
      wardrop::evaluate_scheme(inst, wardrop::no_signal_scheme(prior), sopt);

  json doc;
  doc["full_revelation"] = full.total_cost;
  doc["no_signal"] = none.total_cost;

  wardrop::SignalingScheme best_scheme;
  double best_cost = 0.0;
  if (inst.num_states() == 2 && inst.offsets_only) {
    wardrop::EnumOptions eopt;
    eopt.seed = cfg.seed;
    eopt.solve = sopt;
    wardrop::TwoStateSchemeResult best =
        wardrop::optimal_scheme_two_state(inst, prior, eopt);
    best_scheme = best.scheme;
    best_cost = best.cost;
    doc["method"] = "lp";
  } else if (inst.num_states() == 2) {
    // general stochastic-affine costs: the LP reduction does not apply, fall
    // back to the two-point grid oracle
    wardrop::GridSchemeResult oracle = wardrop::grid_scheme_oracle(inst, prior[0]);
    best_scheme = oracle.scheme;
    best_cost = oracle.cost;
    doc["method"] = "oracle";
  } else if (inst.offsets_only) {
    std::vector<wardrop::SupportVector> candidates =
        inst.parallel_links ? wardrop::enumerate_supports_parallel(inst)
                            : wardrop::sample_supports(inst, 200, cfg.seed, sopt);
    wardrop::SchemeLpResult lp_res = wardrop::optimal_scheme_lp(inst, candidates, prior);
    best_scheme = wardrop::prune_scheme(lp_res.scheme, candidates);
    best_cost = lp_res.cost;
    doc["method"] = "lp";
  } else {
    throw wardrop::RequiresOffsetsOnly(
        "schemes for more than two states need state-independent slopes");
  }

  doc["optimal"] = best_cost;
  wardrop::SchemeEvaluation best_eval = wardrop::evaluate_scheme(inst, best_scheme, sopt);
  doc["scheme"] = json::parse(wardrop::scheme_to_json(best_eval));
  emit(cfg, doc.dump(2));

  if (best_cost > full.total_cost + 1e-6 || best_cost > none.total_cost + 1e-6) {
    std::cerr << "optimal scheme worse than a baseline\n";
    return kVerifyFail;
  }
  return kOk;
}

int cmd_spcheck(const RunConfig& cfg) {
  wardrop::Instance inst = load_instance(cfg);
  if (inst.num_commodities() == 0)
    throw wardrop::BadParameter("spcheck needs a commodity to define the terminals");
  int s = inst.commodities[0].source;
  int t = inst.commodities[0].target;
  wardrop::SpResult sp = wardrop::is_series_parallel(inst, s, t);
  wardrop::RevelationGuarantee guarantee = wardrop::full_revelation_guarantee(inst);

  json doc;
  doc["series_parallel"] = wardrop::sp_ok(sp);
  if (const auto* dec = std::get_if<wardrop::SpDecomposition>(&sp)) {
    doc["decomposition"] = json::parse(wardrop::decomposition_to_json(inst, *dec));
  } else {
    const auto& not_sp = std::get<wardrop::NotSp>(sp);
    json kernel = json::array();
    for (int e : not_sp.kernel_edges) kernel.push_back(inst.edges[e].id);
    doc["kernel_edges"] = std::move(kernel);
  }
  doc["full_revelation_guaranteed"] = guarantee.guaranteed;
  doc["reasons"] = guarantee.reasons;

  if (!wardrop::sp_ok(sp) && !cfg.witness_out.empty()) {
    wardrop::BraessWitness witness = wardrop::braess_witness(inst, s, t);
    std::ofstream out(cfg.witness_out);
    if (!out) throw wardrop::BadParameter("cannot write witness file: " + cfg.witness_out);
    out << wardrop::instance_to_json(witness.instance);
    doc["witness"] = cfg.witness_out;
    doc["witness_center_edge"] = inst.edges[witness.center_edge].id;
  }
  emit(cfg, doc.dump(2));
  return kOk;
}

int cmd_experiment(const RunConfig& cfg) {
  if (cfg.instance_path.empty())
    throw wardrop::BadParameter("experiment needs --instance <TNTP net file>");
  std::string text = slurp(cfg.instance_path);
  std::vector<double> taus = parse_numbers(cfg.tau);
  if (cfg.runs < 0) throw wardrop::BadParameter("--runs must be non-negative");

  struct Row {
    double tau;
    int run;
    std::uint64_t seed;
    int supports;
    double max_residual;
  };
  std::vector<Row> rows;
  bool verify_ok = true;
  for (size_t ti = 0; ti < taus.size(); ++ti) {
    for (int run = 0; run < cfg.runs; ++run) {
      std::uint64_t seed = wardrop::derive_seed(cfg.seed, ti, run);
      wardrop::TntpOptions topt;
      topt.tau = taus[ti];
      topt.seed = seed;
      wardrop::Instance inst = wardrop::parse_tntp(text, topt).instance;
      int s = inst.vertex_index(cfg.source);
      int t = inst.vertex_index(cfg.target);
      if (s < 0 || t < 0) throw wardrop::BadParameter("unknown --source or --target node");
      inst.commodities.push_back(wardrop::Commodity{s, t, cfg.demand, std::nullopt});

      wardrop::EnumOptions eopt;
      eopt.seed = seed;
      eopt.solve = solve_options(cfg);
      wardrop::SupportAtlas atlas = wardrop::enumerate_supports_two_state(inst, eopt);
      double max_res = 0.0;
      for (const auto& region : atlas.regions)
        max_res = std::max(max_res, region.midpoint_residual);
      if (max_res > 1e-5) verify_ok = false;
      rows.push_back(
          {taus[ti], run, seed, static_cast<int>(atlas.regions.size()), max_res});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.tau != b.tau) return a.tau < b.tau;
    return a.seed < b.seed;
  });
  std::ostringstream os;
  os << "tau,run,seed,num_supports,max_midpoint_residual\n";
  os.precision(17);
  for (const Row& row : rows)
    os << row.tau << ',' << row.run << ',' << row.seed << ',' << row.supports << ','
       << row.max_residual << '\n';
  emit(cfg, os.str());
  return verify_ok ? kOk : kVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Wardrop equilibria, support atlases and optimal public signaling in "
      "Bayesian network congestion games"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&cfg](CLI::App* cmd) {
    cmd->add_option("--instance", cfg.instance_path, "instance file");
    cmd->add_option("--gen", cfg.generator, "generator spec, e.g. nested_braess:j=2");
    cmd->add_option("--out", cfg.out, "output path (default stdout)");
    cmd->add_option("--format", cfg.format, "json | csv | svg");
    cmd->add_option("--seed", cfg.seed, "seed for all randomness");
    cmd->add_option("--tol-gap", cfg.tol_gap, "relative Frank-Wolfe gap tolerance");
    cmd->add_option("--tol-support", cfg.tol_support, "active-edge tolerance");
    cmd->add_option("--eps-slope", cfg.eps_slope, "zero-slope regularization");
  };

  CLI::App* gen = app.add_subcommand("gen", "emit an instance as JSON");
  add_common(gen);
  CLI::App* solve = app.add_subcommand("solve", "Wardrop equilibrium at a belief");
  add_common(solve);
  solve->add_option("--belief", cfg.belief, "belief weights, e.g. 0.5,0.5");
  CLI::App* profile = app.add_subcommand("profile", "piecewise-linear cost profile");
  add_common(profile);
  CLI::App* enum_cmd = app.add_subcommand("enum", "support atlas over the belief segment");
  add_common(enum_cmd);
  CLI::App* scheme = app.add_subcommand("scheme", "optimal public signaling scheme");
  add_common(scheme);
  scheme->add_option("--prior", cfg.prior,
                     "prior weights (defaults to the instance prior)");
  CLI::App* spcheck = app.add_subcommand("spcheck", "series-parallel recognition");
  add_common(spcheck);
  spcheck->add_option("--witness-out", cfg.witness_out,
                      "write a Braess witness instance here when not SP");
  CLI::App* experiment =
      app.add_subcommand("experiment", "seeded TNTP support-count experiment");
  add_common(experiment);
  experiment->add_option("--tau", cfg.tau, "comma list of randomized-edge fractions");
  experiment->add_option("--runs", cfg.runs, "runs per tau");
  experiment->add_option("--demand", cfg.demand, "demand volume");
  experiment->add_option("--source", cfg.source, "source node name");
  experiment->add_option("--target", cfg.target, "target node name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen(cfg);
    if (solve->parsed()) return cmd_solve(cfg);
    if (profile->parsed()) return cmd_profile(cfg);
    if (enum_cmd->parsed()) return cmd_enum(cfg);
    if (scheme->parsed()) return cmd_scheme(cfg);
    if (spcheck->parsed()) return cmd_spcheck(cfg);
    if (experiment->parsed()) return cmd_experiment(cfg);
  } catch (const wardrop::BadParameter& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const wardrop::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const wardrop::MissingField& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const wardrop::NotADistribution& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const wardrop::NonConvergence& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolverFail;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return kSolverFail;
  }
  return kUsage;
}
