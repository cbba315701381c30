// SPDX-License-Identifier: Apache-2.0
//
// iotembed CLI: instance/workload generation, embedding solvers, batched
// arrival scenarios and savings reports.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "iotembed/heuristics.hpp"
#include "iotembed/instance_gen.hpp"
#include "iotembed/io.hpp"
#include "iotembed/metrics.hpp"
#include "iotembed/model.hpp"
#include "iotembed/scenario.hpp"
#include "iotembed/solver.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitUsage = 64;

struct CommonSolveFlags {
  std::string instance_path;
  std::string bps_path;
  std::string method = "exact";
  std::string objective = "energy";
  double alpha = -1.0;  // < 0: take from the instance coefficients
  double beta = -1.0;
  double gamma = -1.0;
  std::string coexistence = "off";
  int k_paths = 8;
  std::uint64_t seed = 1;
  double time_limit_s = -1.0;
  std::int64_t node_limit = -1;
  int workers = 1;
  double threshold = 0.6;
  double enum_cap = 1e8;
  std::string out_dir;
};

void add_solve_flags(CLI::App* cmd, CommonSolveFlags& f, bool with_method) {
  cmd->add_option("--instance", f.instance_path, "instance JSON file")->required();
  cmd->add_option("--bps", f.bps_path, "BP workload JSON file")->required();
  if (with_method)
    cmd->add_option("--method", f.method, "exact|oracle|rese|rlse|eluse")
        ->check(CLI::IsMember({"exact", "oracle", "rese", "rlse", "eluse"}));
  cmd->add_option("--objective", f.objective, "energy|latency|weighted")
      ->check(CLI::IsMember({"energy", "latency", "weighted"}));
  cmd->add_option("--alpha", f.alpha, "latency weight (weighted objective)");
  cmd->add_option("--beta", f.beta, "network power weight (weighted objective)");
  cmd->add_option("--gamma", f.gamma, "processing power weight (weighted objective)");
  cmd->add_option("--coexistence", f.coexistence, "on|off")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--k-paths", f.k_paths, "candidate paths per host pair (exact)");
  cmd->add_option("--seed", f.seed, "seed for randomized methods");
  cmd->add_option("--time-limit", f.time_limit_s, "search time limit in seconds (exact)");
  cmd->add_option("--node-limit", f.node_limit, "search node limit (exact)");
  cmd->add_option("--workers", f.workers, "parallel subtree workers (exact)");
  cmd->add_option("--threshold", f.threshold, "RLSE node utilisation threshold");
  cmd->add_option("--enum-cap", f.enum_cap, "oracle enumeration cap");
  cmd->add_option("--out", f.out_dir, "output directory")->required();
}

iotembed::Objective make_objective(const CommonSolveFlags& f,
                                   const iotembed::PhysicalNetwork& net) {
  using iotembed::Objective;
  if (f.objective == "energy") return Objective::energy();
  if (f.objective == "latency") return Objective::latency();
  const double a = f.alpha >= 0 ? f.alpha : net.coeffs.alpha;
  const double b = f.beta >= 0 ? f.beta : net.coeffs.beta;
  const double g = f.gamma >= 0 ? f.gamma : net.coeffs.gamma;
  return Objective::weighted(a, b, g);
}

// Loads and validates instance + workload; throws BadInputError on trouble.
std::pair<iotembed::PhysicalNetwork, std::vector<iotembed::BusinessProcess>> load_problem(
    const CommonSolveFlags& f) {
  iotembed::PhysicalNetwork net = iotembed::load_instance(f.instance_path);
  std::vector<iotembed::BusinessProcess> bps = iotembed::load_bps(f.bps_path);
  const auto violations = iotembed::validate_instance(net, bps);
  if (!violations.empty()) {
    std::string msg = "instance/workload invalid:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw iotembed::BadInputError(msg);
  }
  return {std::move(net), std::move(bps)};
}

int cmd_gen_instance(std::uint64_t seed, const std::string& out,
                     const iotembed::BuildingParams& params) {
  const auto net = iotembed::generate_building(seed, params);
  iotembed::save_instance(net, out);
  std::cout << "wrote " << out << " (" << net.nodes.size() << " nodes, "
            << net.achieved_links << " links)\n";
  return kExitOk;
}

int cmd_gen_bps(std::uint64_t seed, int count, const std::string& zone_mode,
                const std::string& instance_path, const std::string& out,
                iotembed::WorkloadParams params) {
  if (!instance_path.empty())
    params = iotembed::WorkloadParams::from_network(iotembed::load_instance(instance_path));
  const auto mode =
      zone_mode == "same" ? iotembed::ZoneMode::SameZone : iotembed::ZoneMode::CrossZone;
  const auto bps = iotembed::generate_bps(seed, count, mode, params);
  iotembed::save_bps(bps, out);
  std::cout << "wrote " << out << " (" << bps.size() << " bps)\n";
  return kExitOk;
}

int cmd_solve(const CommonSolveFlags& f) {
  auto [net, bps] = load_problem(f);
  const iotembed::Objective objective = make_objective(f, net);
  iotembed::EmbeddingOptions options;
  options.coexistence = f.coexistence == "on";

  iotembed::Solution sol;
  if (f.method == "exact") {
    iotembed::SolveBudget budget;
    budget.k_paths = f.k_paths;
    budget.node_limit = f.node_limit;
    budget.time_limit_s = f.time_limit_s;
    budget.workers = f.workers;
    sol = iotembed::solve_exact(net, bps, options, objective, budget);
  } else if (f.method == "oracle") {
    iotembed::OracleLimits limits;
    limits.enumeration_cap = f.enum_cap;
    sol = iotembed::brute_force_oracle(net, bps, options, objective, limits);
  } else if (f.method == "rese") {
    sol = iotembed::embed_rese(net, bps, options, objective);
  } else if (f.method == "rlse") {
    sol = iotembed::embed_rlse(net, bps, options, f.threshold, objective);
  } else {
    sol = iotembed::embed_eluse(net, bps, options, f.seed, objective);
  }

  std::filesystem::create_directories(f.out_dir);
  iotembed::save_solution(sol, objective, f.out_dir + "/solution.json");
  std::cout << "certificate=" << iotembed::to_string(sol.certificate)
            << " objective=" << sol.objective_value << " blocked=" << sol.blocked.size()
            << "\n";
  if (sol.certificate == iotembed::Certificate::Infeasible) return kExitInfeasible;
  if (!bps.empty() && sol.blocked.size() == bps.size()) return kExitInfeasible;
  return kExitOk;
}

int cmd_scenario(const CommonSolveFlags& f, const std::string& strategy, int batch_size,
                 int seed_count) {
  auto [net, bps] = load_problem(f);
  iotembed::ScenarioParams params;
  params.objective = make_objective(f, net);
  params.options.coexistence = f.coexistence == "on";
  params.budget.k_paths = f.k_paths;
  params.budget.node_limit = f.node_limit;
  params.budget.time_limit_s = f.time_limit_s;
  params.budget.workers = f.workers;
  params.rlse_threshold = f.threshold;
  params.seed = f.seed;

  iotembed::Method method = iotembed::Method::Exact;
  if (f.method == "rese") method = iotembed::Method::Rese;
  else if (f.method == "rlse") method = iotembed::Method::Rlse;
  else if (f.method == "eluse") method = iotembed::Method::Eluse;
  else if (f.method != "exact")
    throw iotembed::BadInputError("scenario method must be exact|rese|rlse|eluse");

  const auto schedule = iotembed::ArrivalSchedule::batched(bps, batch_size);
  auto run_once = [&](const iotembed::ScenarioParams& p) {
    return strategy == "sequential" ? iotembed::run_sequential(net, schedule, method, p)
                                    : iotembed::run_reprovisioning(net, schedule, method, p);
  };

  iotembed::ScenarioSeries series;
  if (method == iotembed::Method::Eluse && seed_count > 1) {
    std::vector<iotembed::ScenarioResult> runs;
    for (int r = 0; r < seed_count; ++r) {
      iotembed::ScenarioParams p = params;
      p.seed = params.seed + static_cast<std::uint64_t>(r);
      runs.push_back(run_once(p));
    }
    series = iotembed::mean_series(runs);
  } else {
    series = iotembed::to_series(run_once(params));
  }

  std::filesystem::create_directories(f.out_dir);
  iotembed::save_scenario_csv(series, f.out_dir + "/scenario.csv");
  std::cout << "wrote " << f.out_dir << "/scenario.csv (" << series.size() << " batches)\n";
  if (!series.empty() && series.back().embedded == 0 && series.back().offered > 0)
    return kExitInfeasible;
  return kExitOk;
}

int cmd_report(const std::string& in_dir, const std::string& baseline_dir,
               const std::string& out_dir) {
  const auto series = iotembed::load_scenario_csv(in_dir + "/scenario.csv");
  const auto baseline = iotembed::load_scenario_csv(baseline_dir + "/scenario.csv");
  const auto table = iotembed::compare(series, baseline);
  std::filesystem::create_directories(out_dir);
  iotembed::detail::write_file(out_dir + "/savings.csv", iotembed::savings_csv(table));
  iotembed::detail::write_file(out_dir + "/power.dat",
                               iotembed::plot_series(series, &iotembed::BatchStats::total_mw));
  iotembed::detail::write_file(
      out_dir + "/avg_latency.dat",
      iotembed::plot_series(series, &iotembed::BatchStats::avg_latency_ms));
  iotembed::detail::write_file(
      out_dir + "/baseline_power.dat",
      iotembed::plot_series(baseline, &iotembed::BatchStats::total_mw));
  iotembed::detail::write_file(
      out_dir + "/baseline_avg_latency.dat",
      iotembed::plot_series(baseline, &iotembed::BatchStats::avg_latency_ms));
  std::cout << "wrote " << out_dir << "/savings.csv\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal embedding of sensor:controller:actuator workflows into IoT meshes"};
  app.require_subcommand(1);

  // gen-instance
  std::uint64_t gi_seed = 1;
  std::string gi_out;
  iotembed::BuildingParams gi_params;
  auto* gi = app.add_subcommand("gen-instance", "generate a smart-building instance");
  gi->add_option("--seed", gi_seed, "generator seed");
  gi->add_option("--out", gi_out, "output instance JSON")->required();
  gi->add_option("--zones", gi_params.zones, "number of zones");
  gi->add_option("--per-zone", gi_params.nodes_per_zone, "nodes per zone");
  gi->add_option("--area-w", gi_params.area_w_m, "area width in meters");
  gi->add_option("--area-h", gi_params.area_h_m, "area height in meters");
  gi->add_option("--target-links", gi_params.target_links, "target undirected link count");
  gi->add_option("--capacity", gi_params.coeffs.capacity_kbps, "node capacity in kbps");
  gi->add_option("--table-step", gi_params.coeffs.table_step_kbps,
                 "latency table step in kbps");

  // gen-bps
  std::uint64_t gb_seed = 1;
  int gb_count = 12;
  std::string gb_zone_mode = "same";
  std::string gb_instance;
  std::string gb_out;
  iotembed::WorkloadParams gb_params;
  auto* gb = app.add_subcommand("gen-bps", "generate a BP workload");
  gb->add_option("--seed", gb_seed, "generator seed");
  gb->add_option("--count", gb_count, "number of BPs");
  gb->add_option("--zone-mode", gb_zone_mode, "same|cross")
      ->check(CLI::IsMember({"same", "cross"}));
  gb->add_option("--instance", gb_instance, "instance JSON to take registries from");
  gb->add_option("--out", gb_out, "output BP JSON")->required();
  gb->add_option("--first-id", gb_params.first_bp_id, "id of the first BP");
  gb->add_option("--mcu-lo", gb_params.mcu_lo_mhz, "min vnode MCU demand (MHz)");
  gb->add_option("--mcu-hi", gb_params.mcu_hi_mhz, "max vnode MCU demand (MHz)");
  gb->add_option("--traffic-lo", gb_params.traffic_lo_kbps, "min vlink traffic (kbps)");
  gb->add_option("--traffic-hi", gb_params.traffic_hi_kbps, "max vlink traffic (kbps)");

  // solve
  CommonSolveFlags sv;
  auto* solve = app.add_subcommand("solve", "embed a workload with one method");
  add_solve_flags(solve, sv, true);

  // scenario
  CommonSolveFlags sc;
  std::string sc_strategy = "sequential";
  int sc_batch_size = 2;
  int sc_seed_count = 1;
  auto* scenario = app.add_subcommand("scenario", "batched-arrival experiment");
  add_solve_flags(scenario, sc, true);
  scenario->add_option("--strategy", sc_strategy, "sequential|reprovision")
      ->check(CLI::IsMember({"sequential", "reprovision"}));
  scenario->add_option("--batch-size", sc_batch_size, "BPs per arrival batch");
  scenario->add_option("--seed-count", sc_seed_count,
                       "average an ELUSE baseline over this many seeds");

  // report
  std::string rp_in, rp_baseline, rp_out;
  auto* report = app.add_subcommand("report", "savings tables and plot data");
  report->add_option("--in", rp_in, "scenario output directory")->required();
  report->add_option("--baseline", rp_baseline, "baseline scenario directory")->required();
  report->add_option("--out", rp_out, "report output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help() << std::flush;
    return kExitUsage;
  }

  try {
    if (gi->parsed()) return cmd_gen_instance(gi_seed, gi_out, gi_params);
    if (gb->parsed())
      return cmd_gen_bps(gb_seed, gb_count, gb_zone_mode, gb_instance, gb_out, gb_params);
    if (solve->parsed()) return cmd_solve(sv);
    if (scenario->parsed()) return cmd_scenario(sc, sc_strategy, sc_batch_size, sc_seed_count);
    if (report->parsed()) return cmd_report(rp_in, rp_baseline, rp_out);
  } catch (const iotembed::BadInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const iotembed::GenerationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const iotembed::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitUsage;
}
