// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "iotembed/model.hpp"
#include "iotembed/scenario.hpp"
#include "iotembed/solver.hpp"

namespace iotembed {

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BadInputError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << content;
}

inline ordered_json parse(const std::string& path) {
  try {
    return ordered_json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw BadInputError(path + ": " + e.what());
  }
}

template <typename T>
T get(const ordered_json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw BadInputError(where + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw BadInputError(where + ": bad value for '" + key + "': " + e.what());
  }
}

// fixed 6-significant-digit formatting for tabular outputs
inline std::string g6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace detail

inline const char* to_string(FunctionKind k) {
  switch (k) {
    case FunctionKind::Sensing: return "sensing";
    case FunctionKind::Control: return "control";
    case FunctionKind::Actuating: return "actuating";
  }
  return "?";
}

inline FunctionKind function_kind_from(const std::string& s) {
  if (s == "sensing") return FunctionKind::Sensing;
  if (s == "control") return FunctionKind::Control;
  if (s == "actuating") return FunctionKind::Actuating;
  throw BadInputError("unknown function kind '" + s + "'");
}

inline const char* to_string(Role r) {
  switch (r) {
    case Role::Sensor: return "sensor";
    case Role::Controller: return "controller";
    case Role::Actuator: return "actuator";
    case Role::Other: return "other";
  }
  return "?";
}

inline Role role_from(const std::string& s) {
  if (s == "sensor") return Role::Sensor;
  if (s == "controller") return Role::Controller;
  if (s == "actuator") return Role::Actuator;
  if (s == "other") return Role::Other;
  throw BadInputError("unknown role '" + s + "'");
}

inline const char* to_string(Certificate c) {
  switch (c) {
    case Certificate::ProvedOptimal: return "PROVED_OPTIMAL";
    case Certificate::BestFound: return "BEST_FOUND";
    case Certificate::Infeasible: return "INFEASIBLE";
  }
  return "?";
}

inline Certificate certificate_from(const std::string& s) {
  if (s == "PROVED_OPTIMAL") return Certificate::ProvedOptimal;
  if (s == "BEST_FOUND") return Certificate::BestFound;
  if (s == "INFEASIBLE") return Certificate::Infeasible;
  throw BadInputError("unknown certificate '" + s + "'");
}

inline const char* to_string(ObjectiveKind k) {
  switch (k) {
    case ObjectiveKind::Energy: return "energy";
    case ObjectiveKind::Latency: return "latency";
    case ObjectiveKind::Weighted: return "weighted";
  }
  return "?";
}

inline ObjectiveKind objective_kind_from(const std::string& s) {
  if (s == "energy") return ObjectiveKind::Energy;
  if (s == "latency") return ObjectiveKind::Latency;
  if (s == "weighted") return ObjectiveKind::Weighted;
  throw BadInputError("unknown objective '" + s + "'");
}

// ---------------------------------------------------------------------------
// instance file

inline ordered_json instance_to_json(const PhysicalNetwork& net) {
  ordered_json j;
  j["meta"] = {{"seed", net.seed},
               {"area_m", {net.area_w_m, net.area_h_m}},
               {"achieved_links", net.achieved_links}};
  j["coefficients"] = {{"e_pbt_mw_per_kbps", net.coeffs.e_pbt_mw_per_kbps},
                       {"f_tr_mw_per_kbps_m2", net.coeffs.f_tr_mw_per_kbps_m2},
                       {"idle_net_mw", net.coeffs.idle_net_mw},
                       {"capacity_kbps", net.coeffs.capacity_kbps},
                       {"packet_kb", net.coeffs.packet_kb},
                       {"table_step_kbps", net.coeffs.table_step_kbps},
                       {"alpha", net.coeffs.alpha},
                       {"beta", net.coeffs.beta},
                       {"gamma", net.coeffs.gamma}};
  j["zones"] = net.zones;
  ordered_json fns = ordered_json::array();
  for (const auto& f : net.functions)
    fns.push_back({{"id", f.id}, {"name", f.name}, {"kind", to_string(f.kind)}});
  j["functions"] = std::move(fns);
  ordered_json nodes = ordered_json::array();
  for (const auto& n : net.nodes) {
    ordered_json nj;
    nj["id"] = n.id;
    nj["zone"] = n.zone;
    if (n.position) {
      nj["x_m"] = n.position->x;
      nj["y_m"] = n.position->y;
    }
    nj["mcu_mhz"] = n.mcu_capacity_mhz;
    nj["ram_kb"] = n.ram_capacity_kb;
    nj["idle_cpu_mw"] = n.idle_cpu_mw;
    nj["max_cpu_mw"] = n.max_cpu_mw;
    nj["functions"] = n.functions;
    nodes.push_back(std::move(nj));
  }
  j["nodes"] = std::move(nodes);
  ordered_json links = ordered_json::array();
  for (const auto& l : net.links)
    links.push_back({{"a", l.a}, {"b", l.b}, {"dist_m", l.dist_m}});
  j["links"] = std::move(links);
  return j;
}

inline void save_instance(const PhysicalNetwork& net, const std::string& path) {
  detail::write_file(path, instance_to_json(net).dump(2) + "\n");
}

inline PhysicalNetwork instance_from_json(const ordered_json& j) {
  PhysicalNetwork net;
  const auto meta = detail::get<ordered_json>(j, "meta", "instance");
  net.seed = detail::get<std::uint64_t>(meta, "seed", "meta");
  const auto area = detail::get<std::vector<double>>(meta, "area_m", "meta");
  if (area.size() != 2) throw BadInputError("meta.area_m must be [width, height]");
  net.area_w_m = area[0];
  net.area_h_m = area[1];
  net.achieved_links = detail::get<int>(meta, "achieved_links", "meta");

  const auto co = detail::get<ordered_json>(j, "coefficients", "instance");
  net.coeffs.e_pbt_mw_per_kbps = detail::get<double>(co, "e_pbt_mw_per_kbps", "coefficients");
  net.coeffs.f_tr_mw_per_kbps_m2 =
      detail::get<double>(co, "f_tr_mw_per_kbps_m2", "coefficients");
  net.coeffs.idle_net_mw = detail::get<double>(co, "idle_net_mw", "coefficients");
  net.coeffs.capacity_kbps = detail::get<double>(co, "capacity_kbps", "coefficients");
  net.coeffs.packet_kb = detail::get<double>(co, "packet_kb", "coefficients");
  net.coeffs.table_step_kbps = detail::get<double>(co, "table_step_kbps", "coefficients");
  net.coeffs.alpha = detail::get<double>(co, "alpha", "coefficients");
  net.coeffs.beta = detail::get<double>(co, "beta", "coefficients");
  net.coeffs.gamma = detail::get<double>(co, "gamma", "coefficients");

  net.zones = detail::get<std::vector<int>>(j, "zones", "instance");
  for (const auto& fj : detail::get<ordered_json>(j, "functions", "instance")) {
    FunctionInfo f;
    f.id = detail::get<int>(fj, "id", "function");
    f.name = detail::get<std::string>(fj, "name", "function");
    f.kind = function_kind_from(detail::get<std::string>(fj, "kind", "function"));
    net.functions.push_back(std::move(f));
  }
  for (const auto& nj : detail::get<ordered_json>(j, "nodes", "instance")) {
    IoTNode n;
    n.id = detail::get<int>(nj, "id", "node");
    n.zone = detail::get<int>(nj, "zone", "node");
    if (nj.contains("x_m") || nj.contains("y_m"))
      n.position = Point{detail::get<double>(nj, "x_m", "node"),
                         detail::get<double>(nj, "y_m", "node")};
    n.mcu_capacity_mhz = detail::get<double>(nj, "mcu_mhz", "node");
    n.ram_capacity_kb = detail::get<double>(nj, "ram_kb", "node");
    n.idle_cpu_mw = detail::get<double>(nj, "idle_cpu_mw", "node");
    n.max_cpu_mw = detail::get<double>(nj, "max_cpu_mw", "node");
    n.idle_net_mw = net.coeffs.idle_net_mw;
    n.link_capacity_kbps = net.coeffs.capacity_kbps;
    n.functions = detail::get<std::vector<int>>(nj, "functions", "node");
    std::sort(n.functions.begin(), n.functions.end());
    net.nodes.push_back(std::move(n));
  }
  for (const auto& lj : detail::get<ordered_json>(j, "links", "instance")) {
    WirelessLink l;
    l.a = detail::get<int>(lj, "a", "link");
    l.b = detail::get<int>(lj, "b", "link");
    l.dist_m = detail::get<double>(lj, "dist_m", "link");
    l.e_pbt_mw_per_kbps = net.coeffs.e_pbt_mw_per_kbps;
    l.f_tr_mw_per_kbps_m2 = net.coeffs.f_tr_mw_per_kbps_m2;
    net.links.push_back(l);
  }
  net.rebuild_index();
  return net;
}

inline PhysicalNetwork load_instance(const std::string& path) {
  return instance_from_json(detail::parse(path));
}

// ---------------------------------------------------------------------------
// BP workload file

inline ordered_json bps_to_json(const std::vector<BusinessProcess>& bps) {
  ordered_json arr = ordered_json::array();
  for (const auto& bp : bps) {
    ordered_json bj;
    bj["id"] = bp.id;
    ordered_json vns = ordered_json::array();
    for (const auto& v : bp.vnodes) {
      ordered_json vj;
      vj["id"] = v.id;
      vj["role"] = to_string(v.role);
      vj["function"] = v.required_function;
      if (v.required_zone)
        vj["zone"] = *v.required_zone;
      else
        vj["zone"] = "any";
      vj["mcu_mhz"] = v.mcu_demand_mhz;
      vj["ram_kb"] = v.ram_demand_kb;
      vns.push_back(std::move(vj));
    }
    bj["vnodes"] = std::move(vns);
    ordered_json vls = ordered_json::array();
    for (const auto& l : bp.vlinks)
      vls.push_back({{"a", l.a}, {"b", l.b}, {"kbps", l.traffic_kbps}});
    bj["vlinks"] = std::move(vls);
    arr.push_back(std::move(bj));
  }
  return ordered_json{{"bps", std::move(arr)}};
}

inline void save_bps(const std::vector<BusinessProcess>& bps, const std::string& path) {
  detail::write_file(path, bps_to_json(bps).dump(2) + "\n");
}

inline std::vector<BusinessProcess> bps_from_json(const ordered_json& j) {
  std::vector<BusinessProcess> bps;
  for (const auto& bj : detail::get<ordered_json>(j, "bps", "bps file")) {
    BusinessProcess bp;
    bp.id = detail::get<int>(bj, "id", "bp");
    for (const auto& vj : detail::get<ordered_json>(bj, "vnodes", "bp")) {
      VirtualNode v;
      v.id = detail::get<int>(vj, "id", "vnode");
      v.role = role_from(detail::get<std::string>(vj, "role", "vnode"));
      v.required_function = detail::get<int>(vj, "function", "vnode");
      if (!vj.contains("zone")) throw BadInputError("vnode: missing key 'zone'");
      if (vj.at("zone").is_string()) {
        if (vj.at("zone").get<std::string>() != "any")
          throw BadInputError("vnode: zone must be an id or \"any\"");
        v.required_zone = std::nullopt;
      } else {
        v.required_zone = vj.at("zone").get<int>();
      }
      v.mcu_demand_mhz = detail::get<double>(vj, "mcu_mhz", "vnode");
      v.ram_demand_kb = detail::get<double>(vj, "ram_kb", "vnode");
      bp.vnodes.push_back(std::move(v));
    }
    for (const auto& lj : detail::get<ordered_json>(bj, "vlinks", "bp")) {
      VirtualLink l;
      l.a = detail::get<int>(lj, "a", "vlink");
      l.b = detail::get<int>(lj, "b", "vlink");
      l.traffic_kbps = detail::get<double>(lj, "kbps", "vlink");
      bp.vlinks.push_back(l);
    }
    bps.push_back(std::move(bp));
  }
  return bps;
}

inline std::vector<BusinessProcess> load_bps(const std::string& path) {
  return bps_from_json(detail::parse(path));
}

// ---------------------------------------------------------------------------
// solution file

inline ordered_json solution_to_json(const Solution& s, const Objective& objective) {
  ordered_json j;
  ordered_json asg = ordered_json::array();
  for (const auto& [ref, node] : s.assignment)
    asg.push_back({{"bp", ref.bp}, {"vnode", ref.vnode}, {"node", node}});
  j["assignment"] = std::move(asg);
  ordered_json routes = ordered_json::array();
  for (const auto& [ref, path] : s.routing.paths)
    routes.push_back({{"bp", ref.bp}, {"vlink", ref.vlink}, {"path", path.nodes}});
  j["routes"] = std::move(routes);
  j["metrics"] = {{"tpp_mw", s.metrics.tpp_mw},
                  {"tnp_mw", s.metrics.tnp_mw},
                  {"tl_ms", s.metrics.tl_ms},
                  {"avg_latency_ms", s.metrics.avg_latency_ms},
                  {"blocked", s.blocked}};
  j["objective"] = {{"kind", to_string(objective.kind)},
                    {"alpha", objective.alpha},
                    {"beta", objective.beta},
                    {"gamma", objective.gamma},
                    {"value", s.objective_value}};
  j["certificate"] = to_string(s.certificate);
  return j;
}

inline void save_solution(const Solution& s, const Objective& objective,
                          const std::string& path) {
  detail::write_file(path, solution_to_json(s, objective).dump(2) + "\n");
}

struct LoadedSolution {
  Solution solution;
  Objective objective;
};

// Reloads a solution; link loads and the demand matrix are rebuilt from the
// stored paths and the BP traffic so a re-evaluation reproduces the stored
// metrics exactly.
inline LoadedSolution load_solution(const std::string& path,
                                    const std::vector<BusinessProcess>& bps) {
  const ordered_json j = detail::parse(path);
  LoadedSolution out;
  for (const auto& aj : detail::get<ordered_json>(j, "assignment", "solution"))
    out.solution.assignment[{detail::get<int>(aj, "bp", "assignment"),
                             detail::get<int>(aj, "vnode", "assignment")}] =
        detail::get<int>(aj, "node", "assignment");
  for (const auto& rj : detail::get<ordered_json>(j, "routes", "solution")) {
    const DemandRef ref{detail::get<int>(rj, "bp", "route"),
                        detail::get<int>(rj, "vlink", "route")};
    const BusinessProcess* bp = nullptr;
    for (const auto& b : bps)
      if (b.id == ref.bp) bp = &b;
    if (!bp || ref.vlink < 0 || static_cast<std::size_t>(ref.vlink) >= bp->vlinks.size())
      throw BadInputError("solution route references unknown demand");
    out.solution.routing.add_route(
        ref, Path{detail::get<std::vector<int>>(rj, "path", "route")},
        bp->vlinks[static_cast<std::size_t>(ref.vlink)].traffic_kbps);
  }
  const auto mj = detail::get<ordered_json>(j, "metrics", "solution");
  out.solution.metrics.tpp_mw = detail::get<double>(mj, "tpp_mw", "metrics");
  out.solution.metrics.tnp_mw = detail::get<double>(mj, "tnp_mw", "metrics");
  out.solution.metrics.tl_ms = detail::get<double>(mj, "tl_ms", "metrics");
  out.solution.metrics.avg_latency_ms = detail::get<double>(mj, "avg_latency_ms", "metrics");
  out.solution.blocked = detail::get<std::vector<int>>(mj, "blocked", "metrics");
  const auto oj = detail::get<ordered_json>(j, "objective", "solution");
  out.objective.kind = objective_kind_from(detail::get<std::string>(oj, "kind", "objective"));
  out.objective.alpha = detail::get<double>(oj, "alpha", "objective");
  out.objective.beta = detail::get<double>(oj, "beta", "objective");
  out.objective.gamma = detail::get<double>(oj, "gamma", "objective");
  out.solution.objective_value = detail::get<double>(oj, "value", "objective");
  out.solution.certificate =
      certificate_from(detail::get<std::string>(j, "certificate", "solution"));
  return out;
}

// ---------------------------------------------------------------------------
// scenario CSV and report outputs

inline const char* kScenarioCsvHeader =
    "batch,offered,embedded,blocked,tpp_mw,tnp_mw,total_mw,tl_ms,avg_latency_ms,objective";

inline std::string scenario_csv(const ScenarioSeries& series) {
  std::ostringstream os;
  os << kScenarioCsvHeader << "\n";
  for (const auto& r : series) {
    os << detail::g6(r.batch) << "," << detail::g6(r.offered) << "," << detail::g6(r.embedded)
       << "," << detail::g6(r.blocked) << "," << detail::g6(r.tpp_mw) << ","
       << detail::g6(r.tnp_mw) << "," << detail::g6(r.total_mw) << "," << detail::g6(r.tl_ms)
       << "," << detail::g6(r.avg_latency_ms) << "," << detail::g6(r.objective) << "\n";
  }
  return os.str();
}

inline void save_scenario_csv(const ScenarioSeries& series, const std::string& path) {
  detail::write_file(path, scenario_csv(series));
}

inline ScenarioSeries load_scenario_csv(const std::string& path) {
  const std::string text = detail::read_file(path);
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw BadInputError(path + ": empty file");
  if (line != kScenarioCsvHeader) throw BadInputError(path + ": unexpected CSV header");
  ScenarioSeries series;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ls, cell, ',')) vals.push_back(std::strtod(cell.c_str(), nullptr));
    if (vals.size() != 10) throw BadInputError(path + ": bad row '" + line + "'");
    BatchStats r;
    r.batch = vals[0];
    r.offered = vals[1];
    r.embedded = vals[2];
    r.blocked = vals[3];
    r.tpp_mw = vals[4];
    r.tnp_mw = vals[5];
    r.total_mw = vals[6];
    r.tl_ms = vals[7];
    r.avg_latency_ms = vals[8];
    r.objective = vals[9];
    series.push_back(r);
  }
  return series;
}

inline std::string savings_csv(const SavingsTable& t) {
  std::ostringstream os;
  os << "batch,offered,power_mw,baseline_power_mw,power_saving_pct,tl_ms,baseline_tl_ms,"
        "tl_reduction_pct,avg_latency_ms,baseline_avg_latency_ms,avg_latency_reduction_pct\n";
  auto cell = [](const std::optional<double>& v) {
    return v ? detail::g6(*v) : std::string("undefined");
  };
  for (const auto& r : t.rows) {
    os << r.batch << "," << detail::g6(r.offered) << "," << detail::g6(r.power_mw) << ","
       << detail::g6(r.baseline_power_mw) << "," << cell(r.power_saving_pct) << ","
       << detail::g6(r.tl_ms) << "," << detail::g6(r.baseline_tl_ms) << ","
       << cell(r.tl_reduction_pct) << "," << detail::g6(r.avg_ms) << ","
       << detail::g6(r.baseline_avg_ms) << "," << cell(r.avg_reduction_pct) << "\n";
  }
  os << "mean,,,," << cell(t.mean_power_saving_pct) << ",,," << cell(t.mean_tl_reduction_pct)
     << ",,," << cell(t.mean_avg_reduction_pct) << "\n";
  return os.str();
}

// Two-column whitespace series (x = cumulative offered BPs) for external
// plotting tools.
inline std::string plot_series(const ScenarioSeries& series, double BatchStats::*field) {
  std::ostringstream os;
  for (const auto& r : series)
    os << detail::g6(r.offered) << " " << detail::g6(r.*field) << "\n";
  return os.str();
}

}  // namespace iotembed
