// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "iotembed/model.hpp"
#include "iotembed/routing.hpp"

namespace iotembed {

// M/M/1 mean-latency lookup table. Entries sit on the arrival-rate grid
// step, 2*step, ..., capacity - step; lookups round the queried arrival UP to
// the next grid point so the table never underestimates latency.
struct LatencyTable {
  double service_rate_pps = 0.0;  // mu = link capacity / packet size
  double packet_kb = 1.0;
  double step_kbps = 0.0;
  struct Entry {
    double arrival_kbps = 0.0;
    double latency_ms = 0.0;
    friend bool operator==(const Entry&, const Entry&) = default;
  };
  std::vector<Entry> entries;

  double max_arrival_kbps() const { return entries.empty() ? 0.0 : entries.back().arrival_kbps; }

  // Latency at the smallest grid point >= arrival; nullopt when the arrival
  // lies beyond the last grid point (utilisation at or beyond 1 at grid
  // resolution).
  std::optional<double> lookup(double arrival_kbps) const {
    if (arrival_kbps <= 0) return 0.0;
    for (const auto& e : entries)
      if (e.arrival_kbps >= arrival_kbps) return e.latency_ms;
    return std::nullopt;
  }

  friend bool operator==(const LatencyTable&, const LatencyTable&) = default;
};

inline LatencyTable build_latency_table(double link_capacity_kbps, double packet_kb,
                                        double step_kbps) {
  if (!(step_kbps > 0)) throw InvalidStepError("latency table step must be > 0");
  if (step_kbps >= link_capacity_kbps)
    throw InvalidStepError("latency table step must be smaller than the link capacity");
  if (!(packet_kb > 0)) throw InvalidStepError("packet size must be > 0");
  const double ratio = link_capacity_kbps / step_kbps;
  const long long n = std::llround(ratio);
  if (std::abs(ratio - static_cast<double>(n)) > 1e-9)
    throw InvalidStepError("latency table step must divide the link capacity");

  LatencyTable t;
  t.service_rate_pps = link_capacity_kbps / packet_kb;
  t.packet_kb = packet_kb;
  t.step_kbps = step_kbps;
  for (long long i = 1; i < n; ++i) {
    const double j = step_kbps * static_cast<double>(i);
    const double j_pps = j / packet_kb;
    t.entries.push_back({j, 1000.0 / (t.service_rate_pps - j_pps)});
  }
  return t;
}

struct PowerResult {
  double total_mw = 0.0;
  std::set<int> active;
};

// Total processing power: one idle term per node hosting at least one virtual
// node, plus a load-proportional term max_cpu * (demand / capacity) per
// embedded virtual node.
inline PowerResult processing_power(const PhysicalNetwork& net, const Assignment& assignment,
                                    const std::vector<BusinessProcess>& bps) {
  PowerResult r;
  double load_mw = 0.0;
  for (const auto& [ref, host] : assignment) {
    const BusinessProcess* bp = nullptr;
    for (const auto& b : bps)
      if (b.id == ref.bp) bp = &b;
    if (!bp) throw Error("processing_power: assignment references unknown bp");
    const VirtualNode* vn = bp->find_vnode(ref.vnode);
    if (!vn) throw Error("processing_power: assignment references unknown vnode");
    const IoTNode& n = net.node(host);
    load_mw += n.max_cpu_mw * (vn->mcu_demand_mhz / n.mcu_capacity_mhz);
    r.active.insert(host);
  }
  r.total_mw = load_mw;
  for (int id : r.active) r.total_mw += net.node(id).idle_cpu_mw;
  return r;
}

// Total network power over directed link loads: one idle term per node that
// sends or receives, plus per-kbps electronics and distance-squared amplifier
// terms on each loaded hop.
inline PowerResult network_power(const PhysicalNetwork& net, const LinkLoadMap& link_loads) {
  PowerResult r;
  double wire_mw = 0.0;
  for (const auto& [dl, kbps] : link_loads) {
    if (kbps < 0) throw Error("network_power: negative link load");
    if (kbps == 0) continue;
    const WirelessLink* l = net.find_link(dl.from, dl.to);
    if (!l)
      throw Error("network_power: load on undeclared link " + std::to_string(dl.from) +
                  "->" + std::to_string(dl.to));
    wire_mw += kbps * l->cost_per_kbps();
    r.active.insert(dl.from);
    r.active.insert(dl.to);
  }
  r.total_mw = wire_mw;
  for (int id : r.active) r.total_mw += net.node(id).idle_net_mw;
  return r;
}

// Arrival rate per node: the sum of loads on its incoming directed links.
inline std::map<int, double> node_arrival_rates(const PhysicalNetwork& net,
                                                const RoutingPlan& routing) {
  std::map<int, double> arrivals;
  for (const auto& [dl, kbps] : routing.link_loads) {
    if (kbps <= 0) continue;
    if (!net.has_node(dl.to)) throw Error("node_arrival_rates: unknown node");
    arrivals[dl.to] += kbps;
  }
  return arrivals;
}

struct LatencyResult {
  double total_ms = 0.0;
  std::map<int, double> per_node_ms;  // only nodes with positive arrival
};

// Total traffic mean latency: table lookup per node with positive arrival,
// zero for idle nodes. Throws SaturationError when some node's arrival has no
// grid point.
inline LatencyResult total_latency(const PhysicalNetwork& net, const RoutingPlan& routing,
                                   const LatencyTable& table) {
  LatencyResult r;
  for (const auto& [node, arrival] : node_arrival_rates(net, routing)) {
    if (arrival <= 0) continue;
    const auto w = table.lookup(arrival);
    if (!w) throw SaturationError(node, arrival);
    r.per_node_ms[node] = *w;
    r.total_ms += *w;
  }
  return r;
}

struct MetricsReport {
  double tpp_mw = 0.0;
  double tnp_mw = 0.0;
  double tl_ms = 0.0;
  double avg_latency_ms = 0.0;  // tl / nodes with positive arrival
  std::map<int, double> per_node_arrival_kbps;
  std::map<int, double> per_node_latency_ms;
  std::set<int> active_cpu;
  std::set<int> active_net;
  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

inline double weighted_objective(const MetricsReport& report, double alpha, double beta,
                                 double gamma) {
  if (alpha < 0 || beta < 0 || gamma < 0)
    throw Error("weighted_objective: weights must be >= 0");
  return alpha * report.tl_ms + beta * report.tnp_mw + gamma * report.tpp_mw;
}

// Ratio of a multi-objective QoS improvement to the corresponding
// single-objective improvement, both against a common baseline.
inline double optimality_ratio(double multi_value, double single_value) {
  if (!(single_value > 0))
    throw UndefinedBaselineError("optimality_ratio: single-objective value must be > 0");
  return multi_value / single_value;
}

// Full analytic evaluation of a solution. Deterministic: identical inputs
// reproduce the report bit for bit.
inline MetricsReport evaluate_solution(const PhysicalNetwork& net,
                                       const std::vector<BusinessProcess>& bps,
                                       const Assignment& assignment,
                                       const RoutingPlan& routing,
                                       const LatencyTable& table) {
  MetricsReport m;
  const PowerResult pp = processing_power(net, assignment, bps);
  m.tpp_mw = pp.total_mw;
  m.active_cpu = pp.active;
  const PowerResult np = network_power(net, routing.link_loads);
  m.tnp_mw = np.total_mw;
  m.active_net = np.active;
  m.per_node_arrival_kbps = node_arrival_rates(net, routing);
  const LatencyResult lat = total_latency(net, routing, table);
  m.tl_ms = lat.total_ms;
  m.per_node_latency_ms = lat.per_node_ms;
  m.avg_latency_ms =
      lat.per_node_ms.empty() ? 0.0 : lat.total_ms / static_cast<double>(lat.per_node_ms.size());
  return m;
}

inline LatencyTable table_for(const PhysicalNetwork& net) {
  return build_latency_table(net.coeffs.capacity_kbps, net.coeffs.packet_kb,
                             net.coeffs.table_step_kbps);
}

}  // namespace iotembed
