// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "iotembed/model.hpp"
#include "iotembed/routing.hpp"

namespace iotembed {

// One id per semantic constraint family of the embedding model.
enum class ConstraintId {
  NodeUnique,    // every vnode embedded in exactly one IoT node
  Coexist,       // at most one vnode of a BP per IoT node (optional)
  McuCap,        // per-node processing capacity
  RamCap,        // per-node memory capacity
  Func,          // host provides the required function
  Zone,          // host zone matches the required zone
  Flow,          // flow conservation along each demand's route
  Split,         // single unsplit path per demand
  LinkCap,       // per-node outgoing traffic within capacity
  PathEndpoint,  // path endpoints/hops consistent with the embedding
};

inline const char* to_string(ConstraintId c) {
  switch (c) {
    case ConstraintId::NodeUnique: return "NODE_UNIQUE";
    case ConstraintId::Coexist: return "COEXIST";
    case ConstraintId::McuCap: return "MCU_CAP";
    case ConstraintId::RamCap: return "RAM_CAP";
    case ConstraintId::Func: return "FUNC";
    case ConstraintId::Zone: return "ZONE";
    case ConstraintId::Flow: return "FLOW";
    case ConstraintId::Split: return "SPLIT";
    case ConstraintId::LinkCap: return "LINK_CAP";
    case ConstraintId::PathEndpoint: return "PATH_ENDPOINT";
  }
  return "?";
}

struct Violation {
  ConstraintId constraint = ConstraintId::NodeUnique;
  std::string entity;
  double measured = 0.0;
  double allowed = 0.0;

  // One diagnostics line: constraint-id, entities, quantities.
  std::string to_line() const {
    std::ostringstream os;
    os << to_string(constraint) << " " << entity << " measured=" << measured
       << " allowed=" << allowed;
    return os.str();
  }
};

struct EmbeddingOptions {
  bool coexistence = false;
  ZoneMode zone_mode = ZoneMode::SameZone;  // workload metadata tag
};

// Checks the node-embedding constraints of a candidate assignment. Pure and
// order-stable: violations come out sorted by (bp, vnode) then by node.
inline std::vector<Violation> check_assignment(const PhysicalNetwork& net,
                                               const std::vector<BusinessProcess>& bps,
                                               const Assignment& assignment,
                                               const EmbeddingOptions& options) {
  std::vector<Violation> out;
  std::vector<const BusinessProcess*> order;
  for (const auto& b : bps) order.push_back(&b);
  std::sort(order.begin(), order.end(),
            [](const BusinessProcess* l, const BusinessProcess* r) { return l->id < r->id; });

  std::map<std::pair<int, int>, int> per_bp_node;   // (bp, node) -> vnode count
  std::map<int, double> mcu_used, ram_used;

  for (const BusinessProcess* bp : order) {
    for (const auto& vn : bp->vnodes) {
      std::ostringstream who;
      who << "bp " << bp->id << " vnode " << vn.id;
      const auto it = assignment.find({bp->id, vn.id});
      if (it == assignment.end()) {
        out.push_back({ConstraintId::NodeUnique, who.str() + " unassigned", 0, 1});
        continue;
      }
      if (!net.has_node(it->second)) {
        out.push_back({ConstraintId::NodeUnique,
                       who.str() + " -> unknown node " + std::to_string(it->second), 0, 1});
        continue;
      }
      const IoTNode& host = net.node(it->second);
      who << " -> node " << host.id;
      if (!host.provides(vn.required_function))
        out.push_back({ConstraintId::Func,
                       who.str() + " missing function " + std::to_string(vn.required_function),
                       0, 1});
      if (vn.required_zone && host.zone != *vn.required_zone)
        out.push_back({ConstraintId::Zone, who.str(), static_cast<double>(host.zone),
                       static_cast<double>(*vn.required_zone)});
      per_bp_node[{bp->id, host.id}]++;
      mcu_used[host.id] += vn.mcu_demand_mhz;
      ram_used[host.id] += vn.ram_demand_kb;
    }
  }

  if (options.coexistence) {
    for (const auto& [key, count] : per_bp_node) {
      if (count > 1)
        out.push_back({ConstraintId::Coexist,
                       "bp " + std::to_string(key.first) + " node " + std::to_string(key.second),
                       static_cast<double>(count), 1});
    }
  }
  for (const auto& [node, used] : mcu_used) {
    const double cap = net.node(node).mcu_capacity_mhz;
    if (detail::exceeds(used, cap))
      out.push_back({ConstraintId::McuCap, "node " + std::to_string(node), used, cap});
  }
  for (const auto& [node, used] : ram_used) {
    const double cap = net.node(node).ram_capacity_kb;
    if (detail::exceeds(used, cap))
      out.push_back({ConstraintId::RamCap, "node " + std::to_string(node), used, cap});
  }
  return out;
}

// Checks the link-embedding constraints of a routing plan against an
// assignment that already passed check_assignment.
inline std::vector<Violation> check_routing(const PhysicalNetwork& net,
                                            const std::vector<BusinessProcess>& bps,
                                            const Assignment& assignment,
                                            const RoutingPlan& routing) {
  std::vector<Violation> out;
  std::vector<const BusinessProcess*> order;
  for (const auto& b : bps) order.push_back(&b);
  std::sort(order.begin(), order.end(),
            [](const BusinessProcess* l, const BusinessProcess* r) { return l->id < r->id; });

  LinkLoadMap rebuilt;
  std::set<DemandRef> known;
  for (const BusinessProcess* bp : order) {
    for (std::size_t i = 0; i < bp->vlinks.size(); ++i) {
      const auto& vl = bp->vlinks[i];
      const DemandRef ref{bp->id, static_cast<int>(i)};
      known.insert(ref);
      std::ostringstream who;
      who << "bp " << bp->id << " vlink " << i;
      const auto ha = assignment.find({bp->id, vl.a});
      const auto hb = assignment.find({bp->id, vl.b});
      if (ha == assignment.end() || hb == assignment.end()) continue;  // assignment's problem
      const int c = ha->second;
      const int d = hb->second;
      const auto pit = routing.paths.find(ref);
      if (c == d) {
        if (pit != routing.paths.end() && !pit->second.empty())
          out.push_back({ConstraintId::PathEndpoint,
                         who.str() + " intra-node demand must have an empty path",
                         static_cast<double>(pit->second.nodes.size()), 0});
        continue;
      }
      if (pit == routing.paths.end() || pit->second.empty()) {
        // no flow leaves the source host
        out.push_back({ConstraintId::Flow, who.str() + " unrouted", 0, vl.traffic_kbps});
        continue;
      }
      const Path& p = pit->second;
      if (p.nodes.front() != c || p.nodes.back() != d) {
        out.push_back({ConstraintId::PathEndpoint,
                       who.str() + " path endpoints (" + std::to_string(p.nodes.front()) + "," +
                           std::to_string(p.nodes.back()) + ") != hosts (" + std::to_string(c) +
                           "," + std::to_string(d) + ")",
                       0, 0});
      }
      std::set<int> seen;
      bool split = false;
      for (int n : p.nodes)
        if (!seen.insert(n).second) split = true;
      if (split)
        out.push_back({ConstraintId::Split, who.str() + " path revisits a node",
                       static_cast<double>(p.nodes.size()),
                       static_cast<double>(seen.size())});
      for (std::size_t h = 0; h + 1 < p.nodes.size(); ++h) {
        if (!net.find_link(p.nodes[h], p.nodes[h + 1]))
          out.push_back({ConstraintId::PathEndpoint,
                         who.str() + " hop " + std::to_string(p.nodes[h]) + "->" +
                             std::to_string(p.nodes[h + 1]) + " is not a physical link",
                         0, 0});
      }
      for (const auto& dl : p.directed_links()) rebuilt[dl] += vl.traffic_kbps;
    }
  }

  // routes for demands that no BP declares
  for (const auto& [ref, p] : routing.paths) {
    if (!known.count(ref))
      out.push_back({ConstraintId::PathEndpoint,
                     "bp " + std::to_string(ref.bp) + " vlink " + std::to_string(ref.vlink) +
                         " route has no matching demand",
                     0, 0});
  }

  // declared link loads must match the per-path traffic sums
  for (const auto& [dl, kbps] : routing.link_loads) {
    double expect = 0.0;
    if (auto it = rebuilt.find(dl); it != rebuilt.end()) expect = it->second;
    if (std::abs(kbps - expect) > 1e-9)
      out.push_back({ConstraintId::Flow,
                     "link " + std::to_string(dl.from) + "->" + std::to_string(dl.to) +
                         " declared load disagrees with routed paths",
                     kbps, expect});
  }
  for (const auto& [dl, kbps] : rebuilt) {
    if (!routing.link_loads.count(dl) && kbps > 0)
      out.push_back({ConstraintId::Flow,
                     "link " + std::to_string(dl.from) + "->" + std::to_string(dl.to) +
                         " routed load missing from declared loads",
                     0, kbps});
  }

  // per-node outgoing traffic within capacity
  std::map<int, double> out_kbps;
  for (const auto& [dl, kbps] : rebuilt) out_kbps[dl.from] += kbps;
  for (const auto& [node, total] : out_kbps) {
    const double cap = net.node(node).link_capacity_kbps;
    if (detail::exceeds(total, cap))
      out.push_back({ConstraintId::LinkCap, "node " + std::to_string(node), total, cap});
  }
  return out;
}

}  // namespace iotembed
