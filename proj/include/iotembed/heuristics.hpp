// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "iotembed/metrics.hpp"
#include "iotembed/model.hpp"
#include "iotembed/rng.hpp"
#include "iotembed/routing.hpp"
#include "iotembed/solver.hpp"

namespace iotembed {

namespace detail {

// Running committed state shared by the greedy embedders. Small maps; each BP
// is committed or rolled back by snapshotting the whole struct.
struct GreedyState {
  Assignment assignment;
  RoutingPlan plan;
  std::map<int, double> mcu_used, ram_used, out_kbps, in_kbps;
  std::map<std::pair<int, int>, int> coexist;  // (bp id, node id) -> vnodes
};

inline GreedyState init_greedy(const PhysicalNetwork& net, const EmbeddingBase* base) {
  GreedyState st;
  if (!base) return st;
  st.assignment = base->assignment;
  st.plan = base->routing;
  for (const auto& [ref, host] : base->assignment) {
    const BusinessProcess* bp = nullptr;
    for (const auto& b : base->bps)
      if (b.id == ref.bp) bp = &b;
    if (!bp) throw Error("heuristic base references unknown bp");
    const VirtualNode* vn = bp->find_vnode(ref.vnode);
    if (!vn) throw Error("heuristic base references unknown vnode");
    st.mcu_used[host] += vn->mcu_demand_mhz;
    st.ram_used[host] += vn->ram_demand_kb;
    st.coexist[{ref.bp, host}] += 1;
  }
  for (const auto& [dl, kbps] : base->routing.link_loads) {
    st.out_kbps[dl.from] += kbps;
    st.in_kbps[dl.to] += kbps;
  }
  (void)net;
  return st;
}

inline bool can_host(const GreedyState& st, const IoTNode& node, int bp_id,
                     const VirtualNode& vn, const EmbeddingOptions& options) {
  if (!node.provides(vn.required_function)) return false;
  if (vn.required_zone && node.zone != *vn.required_zone) return false;
  if (options.coexistence) {
    auto it = st.coexist.find({bp_id, node.id});
    if (it != st.coexist.end() && it->second >= 1) return false;
  }
  double mcu = vn.mcu_demand_mhz;
  if (auto it = st.mcu_used.find(node.id); it != st.mcu_used.end()) mcu += it->second;
  if (mcu > node.mcu_capacity_mhz) return false;
  double ram = vn.ram_demand_kb;
  if (auto it = st.ram_used.find(node.id); it != st.ram_used.end()) ram += it->second;
  if (ram > node.ram_capacity_kb) return false;
  return true;
}

inline void place(GreedyState& st, int bp_id, const VirtualNode& vn, int node) {
  st.assignment[{bp_id, vn.id}] = node;
  st.mcu_used[node] += vn.mcu_demand_mhz;
  st.ram_used[node] += vn.ram_demand_kb;
  st.coexist[{bp_id, node}] += 1;
}

// True when committing kbps on the path keeps every sender within capacity
// and every receiver on the latency grid.
inline bool path_admissible(const GreedyState& st, const PhysicalNetwork& net,
                            const LatencyTable& table, const Path& p, double kbps) {
  for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) {
    const int u = p.nodes[i];
    const int v = p.nodes[i + 1];
    double out = kbps;
    if (auto it = st.out_kbps.find(u); it != st.out_kbps.end()) out += it->second;
    if (out > net.node(u).link_capacity_kbps) return false;
    double in = kbps;
    if (auto it = st.in_kbps.find(v); it != st.in_kbps.end()) in += it->second;
    if (in > table.max_arrival_kbps()) return false;
  }
  return true;
}

inline void commit(GreedyState& st, const DemandRef& ref, const Path& p, double kbps) {
  st.plan.add_route(ref, p, kbps);
  for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) {
    st.out_kbps[p.nodes[i]] += kbps;
    st.in_kbps[p.nodes[i + 1]] += kbps;
  }
}

inline std::vector<const VirtualNode*> vnodes_by_id(const BusinessProcess& bp) {
  std::vector<const VirtualNode*> v;
  for (const auto& vn : bp.vnodes) v.push_back(&vn);
  std::sort(v.begin(), v.end(),
            [](const VirtualNode* l, const VirtualNode* r) { return l->id < r->id; });
  return v;
}

// Sorting key for RESE/RLSE: the controller's processing demand. Falls back
// to the zone-free vnode, then to the largest demand, when roles are absent.
inline double controller_demand(const BusinessProcess& bp) {
  for (const auto* vn : vnodes_by_id(bp))
    if (vn->role == Role::Controller) return vn->mcu_demand_mhz;
  for (const auto* vn : vnodes_by_id(bp))
    if (!vn->required_zone) return vn->mcu_demand_mhz;
  double best = 0.0;
  for (const auto& vn : bp.vnodes) best = std::max(best, vn.mcu_demand_mhz);
  return best;
}

inline Solution finish_heuristic(const PhysicalNetwork& net, const EmbeddingBase* base,
                                 const std::vector<const BusinessProcess*>& embedded,
                                 const GreedyState& st, std::vector<int> blocked,
                                 const Objective& objective, const LatencyTable& table) {
  std::vector<BusinessProcess> all;
  if (base) all = base->bps;
  for (const BusinessProcess* bp : embedded) all.push_back(*bp);
  Solution s;
  s.assignment = st.assignment;
  s.routing = st.plan;
  s.metrics = evaluate_solution(net, all, s.assignment, s.routing, table);
  s.objective_value = objective_value(objective, s.metrics);
  s.certificate = Certificate::BestFound;
  std::sort(blocked.begin(), blocked.end());
  s.blocked = std::move(blocked);
  return s;
}

}  // namespace detail

// Energy-latency-unaware baseline: each vnode goes to a uniformly random
// feasible host, each demand to a uniformly random admissible path among the
// k=8 hop-shortest, all draws from the given seed. BPs that cannot be placed
// or routed are rolled back and recorded as blocked.
inline Solution embed_eluse(const PhysicalNetwork& net,
                            const std::vector<BusinessProcess>& bps,
                            const EmbeddingOptions& options, std::uint64_t seed,
                            const Objective& objective = Objective::energy(),
                            const EmbeddingBase* base = nullptr) {
  const LatencyTable table = table_for(net);
  Rng rng(seed);
  detail::GreedyState st = detail::init_greedy(net, base);

  std::vector<const IoTNode*> nodes_by_id;
  for (const auto& n : net.nodes) nodes_by_id.push_back(&n);
  std::sort(nodes_by_id.begin(), nodes_by_id.end(),
            [](const IoTNode* l, const IoTNode* r) { return l->id < r->id; });

  std::vector<const BusinessProcess*> embedded;
  std::vector<int> blocked;
  for (const auto& bp : bps) {
    detail::GreedyState snapshot = st;
    bool ok = true;
    for (const VirtualNode* vn : detail::vnodes_by_id(bp)) {
      std::vector<int> feasible;
      for (const IoTNode* n : nodes_by_id)
        if (detail::can_host(st, *n, bp.id, *vn, options)) feasible.push_back(n->id);
      if (feasible.empty()) {
        ok = false;
        break;
      }
      detail::place(st, bp.id, *vn, feasible[rng.pick(feasible.size())]);
    }
    if (ok) {
      for (std::size_t i = 0; i < bp.vlinks.size(); ++i) {
        const auto& vl = bp.vlinks[i];
        const int c = st.assignment.at({bp.id, vl.a});
        const int d = st.assignment.at({bp.id, vl.b});
        const DemandRef ref{bp.id, static_cast<int>(i)};
        if (c == d) {
          st.plan.add_route(ref, Path{}, vl.traffic_kbps);
          continue;
        }
        std::vector<Path> admissible;
        for (const Path& p : k_shortest_paths(net, c, d, 8, WeightMode::Hops))
          if (detail::path_admissible(st, net, table, p, vl.traffic_kbps))
            admissible.push_back(p);
        if (admissible.empty()) {
          ok = false;
          break;
        }
        detail::commit(st, ref, admissible[rng.pick(admissible.size())], vl.traffic_kbps);
      }
    }
    if (ok) {
      embedded.push_back(&bp);
    } else {
      st = std::move(snapshot);
      blocked.push_back(bp.id);
    }
  }
  return detail::finish_heuristic(net, base, embedded, st, std::move(blocked), objective,
                                  table);
}

namespace detail {

// Placement shared by RESE and RLSE: nodes by MHz-per-mW efficiency
// descending, BPs by controller demand ascending, each vnode on the first
// node that satisfies function, zone, coexistence and capacity.
inline std::vector<const IoTNode*> efficiency_order(const PhysicalNetwork& net) {
  std::vector<const IoTNode*> order;
  for (const auto& n : net.nodes) order.push_back(&n);
  std::sort(order.begin(), order.end(), [](const IoTNode* l, const IoTNode* r) {
    const double el = l->mcu_capacity_mhz / l->max_cpu_mw;
    const double er = r->mcu_capacity_mhz / r->max_cpu_mw;
    if (el != er) return el > er;
    return l->id < r->id;
  });
  return order;
}

inline std::vector<const BusinessProcess*> rese_bp_order(
    const std::vector<BusinessProcess>& bps) {
  std::vector<const BusinessProcess*> order;
  for (const auto& b : bps) order.push_back(&b);
  std::sort(order.begin(), order.end(),
            [](const BusinessProcess* l, const BusinessProcess* r) {
              const double dl = controller_demand(*l);
              const double dr = controller_demand(*r);
              if (dl != dr) return dl < dr;
              return l->id < r->id;
            });
  return order;
}

inline Solution embed_consolidating(const PhysicalNetwork& net,
                                    const std::vector<BusinessProcess>& bps,
                                    const EmbeddingOptions& options,
                                    const RoutePolicy& policy, const Objective& objective,
                                    const EmbeddingBase* base) {
  const LatencyTable table = table_for(net);
  GreedyState st = init_greedy(net, base);
  const auto node_order = efficiency_order(net);

  std::vector<const BusinessProcess*> embedded;
  std::vector<int> blocked;
  for (const BusinessProcess* bp : rese_bp_order(bps)) {
    GreedyState snapshot = st;
    bool ok = true;
    for (const VirtualNode* vn : vnodes_by_id(*bp)) {
      const IoTNode* host = nullptr;
      for (const IoTNode* n : node_order) {
        if (can_host(st, *n, bp->id, *vn, options)) {
          host = n;
          break;
        }
      }
      if (!host) {
        ok = false;
        break;
      }
      place(st, bp->id, *vn, host->id);
    }
    if (ok) {
      for (std::size_t i = 0; i < bp->vlinks.size(); ++i) {
        const auto& vl = bp->vlinks[i];
        const int c = st.assignment.at({bp->id, vl.a});
        const int d = st.assignment.at({bp->id, vl.b});
        const DemandRef ref{bp->id, static_cast<int>(i)};
        if (c == d) {
          st.plan.add_route(ref, Path{}, vl.traffic_kbps);
          continue;
        }
        try {
          const Path p = route_demand(net, c, d, vl.traffic_kbps, policy, st.out_kbps);
          if (!path_admissible(st, net, table, p, vl.traffic_kbps)) {
            ok = false;  // chosen path would push a receiver off the latency grid
            break;
          }
          commit(st, ref, p, vl.traffic_kbps);
        } catch (const NoRouteError&) {
          ok = false;
          break;
        }
      }
    }
    if (ok) {
      embedded.push_back(bp);
    } else {
      st = std::move(snapshot);
      blocked.push_back(bp->id);
    }
  }
  return finish_heuristic(net, base, embedded, st, std::move(blocked), objective, table);
}

}  // namespace detail

// Real-time energy-efficient embedding: consolidate onto the most efficient
// nodes, then route each demand on the cheapest-power path at full capacity.
inline Solution embed_rese(const PhysicalNetwork& net,
                           const std::vector<BusinessProcess>& bps,
                           const EmbeddingOptions& options,
                           const Objective& objective = Objective::energy(),
                           const EmbeddingBase* base = nullptr) {
  return detail::embed_consolidating(net, bps, options,
                                     RoutePolicy{WeightMode::LinkPower, 1.0}, objective, base);
}

// Real-time low-latency embedding: RESE placement, hop-shortest routing that
// keeps nodes below the utilisation threshold (falling back to full capacity
// when no capped path exists).
inline Solution embed_rlse(const PhysicalNetwork& net,
                           const std::vector<BusinessProcess>& bps,
                           const EmbeddingOptions& options, double threshold = 0.6,
                           const Objective& objective = Objective::latency(),
                           const EmbeddingBase* base = nullptr) {
  if (!(threshold > 0.0) || threshold > 1.0)
    throw Error("embed_rlse: threshold must be in (0, 1]");
  return detail::embed_consolidating(net, bps, options,
                                     RoutePolicy{WeightMode::Hops, threshold}, objective,
                                     base);
}

}  // namespace iotembed
