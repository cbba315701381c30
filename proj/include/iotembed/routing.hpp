// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <vector>

#include "iotembed/model.hpp"

namespace iotembed {

// A simple path through the mesh, as the ordered node sequence including both
// endpoints. Empty means "intra-node": both virtual endpoints share a host.
struct Path {
  std::vector<int> nodes;

  bool empty() const { return nodes.empty(); }

  std::vector<DirectedLink> directed_links() const {
    std::vector<DirectedLink> out;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
      out.push_back({nodes[i], nodes[i + 1]});
    return out;
  }

  auto operator<=>(const Path&) const = default;
};

// (bp id, vlink index) key of a routed traffic demand.
struct DemandRef {
  int bp = 0;
  int vlink = 0;
  auto operator<=>(const DemandRef&) const = default;
};

struct RoutingPlan {
  std::map<DemandRef, Path> paths;
  LinkLoadMap link_loads;                        // per directed physical hop
  std::map<std::pair<int, int>, double> demand_matrix;  // (host c, host d) -> kbps

  // Registers a demand's path and folds its traffic into the aggregates.
  // Intra-node demands (empty path) carry no load.
  void add_route(const DemandRef& d, const Path& p, double kbps) {
    paths[d] = p;
    if (p.empty()) return;
    for (const auto& dl : p.directed_links()) link_loads[dl] += kbps;
    demand_matrix[{p.nodes.front(), p.nodes.back()}] += kbps;
  }

  friend bool operator==(const RoutingPlan&, const RoutingPlan&) = default;
};

enum class WeightMode { Hops, LinkPower };

inline double edge_weight(const PhysicalNetwork& net, int a, int b, WeightMode mode) {
  if (mode == WeightMode::Hops) return 1.0;
  const WirelessLink* l = net.find_link(a, b);
  if (!l) throw Error("edge_weight: no link between " + std::to_string(a) + " and " +
                      std::to_string(b));
  return l->cost_per_kbps();
}

// Remaining outgoing kbps per node; nodes absent from the map are unlimited.
using ResidualMap = std::map<int, double>;

namespace detail {

// Lexicographic comparison of node sequences; used everywhere two equal-weight
// paths must be ordered deterministically.
inline bool lex_less(const std::vector<int>& a, const std::vector<int>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

struct PathLabel {
  double weight = 0.0;
  std::vector<int> nodes;
};

struct LabelAfter {
  // min-heap on (weight, lex nodes)
  bool operator()(const PathLabel& l, const PathLabel& r) const {
    if (l.weight != r.weight) return l.weight > r.weight;
    return lex_less(r.nodes, l.nodes);
  }
};

}  // namespace detail

// Minimum-weight simple path from src to dst whose source and transit nodes
// all have residual outgoing capacity for the demand (the destination only
// receives). Ties break to the lexicographically smallest node sequence.
inline Path shortest_path(const PhysicalNetwork& net, int src, int dst, WeightMode mode,
                          const ResidualMap& residual, double demand_kbps) {
  if (!net.has_node(src) || !net.has_node(dst))
    throw Error("shortest_path: unknown endpoint");
  if (src == dst) throw Error("shortest_path: src == dst");
  if (!(demand_kbps > 0)) throw Error("shortest_path: demand must be > 0");

  auto can_send = [&](int n) {
    auto it = residual.find(n);
    return it == residual.end() || it->second >= demand_kbps;
  };
  if (!can_send(src)) throw NoRouteError(src, dst, "source has no residual capacity");

  std::priority_queue<detail::PathLabel, std::vector<detail::PathLabel>, detail::LabelAfter>
      pq;
  pq.push({0.0, {src}});
  std::set<int> done;
  while (!pq.empty()) {
    detail::PathLabel cur = pq.top();
    pq.pop();
    const int u = cur.nodes.back();
    if (done.count(u)) continue;
    done.insert(u);
    if (u == dst) return Path{std::move(cur.nodes)};
    for (int v : net.neighbors(u)) {
      if (done.count(v)) continue;
      if (v != dst && !can_send(v)) continue;
      detail::PathLabel nxt{cur.weight + edge_weight(net, u, v, mode), cur.nodes};
      nxt.nodes.push_back(v);
      pq.push(std::move(nxt));
    }
  }
  throw NoRouteError(src, dst, "no admissible path");
}

// The k minimum-weight loopless paths, in (weight, lexicographic) order.
// Best-first enumeration over simple-path prefixes: extending a prefix only
// grows (weight, sequence), so completed paths pop in final order. Returns
// fewer than k when fewer simple paths exist; empty when disconnected.
inline std::vector<Path> k_shortest_paths(const PhysicalNetwork& net, int src, int dst,
                                          int k, WeightMode mode) {
  std::vector<Path> out;
  if (k < 1) throw Error("k_shortest_paths: k must be >= 1");
  if (!net.has_node(src) || !net.has_node(dst) || src == dst) return out;

  std::priority_queue<detail::PathLabel, std::vector<detail::PathLabel>, detail::LabelAfter>
      pq;
  pq.push({0.0, {src}});
  while (!pq.empty() && static_cast<int>(out.size()) < k) {
    detail::PathLabel cur = pq.top();
    pq.pop();
    const int u = cur.nodes.back();
    if (u == dst) {
      out.push_back(Path{std::move(cur.nodes)});
      continue;
    }
    for (int v : net.neighbors(u)) {
      if (std::find(cur.nodes.begin(), cur.nodes.end(), v) != cur.nodes.end()) continue;
      detail::PathLabel nxt{cur.weight + edge_weight(net, u, v, mode), cur.nodes};
      nxt.nodes.push_back(v);
      pq.push(std::move(nxt));
    }
  }
  return out;
}

struct RoutePolicy {
  WeightMode weight_mode = WeightMode::Hops;
  double node_util_cap = 1.0;  // fraction of each node's outgoing capacity
};

namespace detail {

// One demand against committed per-node outgoing flow. Tries the utilisation
// cap first, then retries at full capacity before giving up.
inline Path route_demand(const PhysicalNetwork& net, int src, int dst, double kbps,
                         const RoutePolicy& policy, const std::map<int, double>& out_kbps) {
  auto residual_at = [&](double cap_fraction) {
    ResidualMap r;
    for (const auto& n : net.nodes) {
      double used = 0.0;
      if (auto it = out_kbps.find(n.id); it != out_kbps.end()) used = it->second;
      r[n.id] = cap_fraction * n.link_capacity_kbps - used;
    }
    return r;
  };
  try {
    return shortest_path(net, src, dst, policy.weight_mode, residual_at(policy.node_util_cap),
                         kbps);
  } catch (const NoRouteError&) {
    if (policy.node_util_cap >= 1.0) throw;
    return shortest_path(net, src, dst, policy.weight_mode, residual_at(1.0), kbps);
  }
}

inline void commit_path(const Path& p, double kbps, std::map<int, double>& out_kbps,
                        std::map<int, double>& in_kbps) {
  for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) {
    out_kbps[p.nodes[i]] += kbps;
    in_kbps[p.nodes[i + 1]] += kbps;
  }
}

}  // namespace detail

// Routes every inter-node demand of every BP, in (bp id, vlink index) order,
// decrementing residual outgoing capacity as routes commit. Demands that find
// no path under the utilisation cap are retried once at full capacity; if that
// also fails the whole call fails naming the demand.
inline RoutingPlan route_all(const PhysicalNetwork& net,
                             const std::vector<BusinessProcess>& bps,
                             const Assignment& assignment, const RoutePolicy& policy) {
  std::vector<const BusinessProcess*> order;
  for (const auto& b : bps) order.push_back(&b);
  std::sort(order.begin(), order.end(),
            [](const BusinessProcess* l, const BusinessProcess* r) { return l->id < r->id; });

  RoutingPlan plan;
  std::map<int, double> out_kbps;
  std::map<int, double> in_kbps;
  for (const BusinessProcess* bp : order) {
    for (std::size_t i = 0; i < bp->vlinks.size(); ++i) {
      const auto& vl = bp->vlinks[i];
      const DemandRef ref{bp->id, static_cast<int>(i)};
      const auto ha = assignment.find({bp->id, vl.a});
      const auto hb = assignment.find({bp->id, vl.b});
      if (ha == assignment.end() || hb == assignment.end())
        throw Error("route_all: demand endpoints not assigned");
      if (ha->second == hb->second) {
        plan.add_route(ref, Path{}, vl.traffic_kbps);
        continue;
      }
      Path p;
      try {
        p = detail::route_demand(net, ha->second, hb->second, vl.traffic_kbps, policy,
                                 out_kbps);
      } catch (const NoRouteError& e) {
        throw BlockedError(bp->id, static_cast<int>(i), e.what());
      }
      detail::commit_path(p, vl.traffic_kbps, out_kbps, in_kbps);
      plan.add_route(ref, p, vl.traffic_kbps);
    }
  }
  return plan;
}

}  // namespace iotembed
