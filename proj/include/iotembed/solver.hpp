// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <set>
#include <vector>

#include "iotembed/feasibility.hpp"
#include "iotembed/metrics.hpp"
#include "iotembed/model.hpp"
#include "iotembed/routing.hpp"

namespace iotembed {

enum class ObjectiveKind { Energy, Latency, Weighted };

struct Objective {
  ObjectiveKind kind = ObjectiveKind::Energy;
  double alpha = 30.0;  // 1/ms
  double beta = 1.0;    // 1/mW
  double gamma = 1.0;   // 1/mW

  static Objective energy() { return {ObjectiveKind::Energy}; }
  static Objective latency() { return {ObjectiveKind::Latency}; }
  static Objective weighted(double a, double b, double g) {
    if (a < 0 || b < 0 || g < 0) throw Error("objective weights must be >= 0");
    return {ObjectiveKind::Weighted, a, b, g};
  }
};

inline double objective_value(const Objective& o, const MetricsReport& m) {
  switch (o.kind) {
    case ObjectiveKind::Energy: return m.tnp_mw + m.tpp_mw;
    case ObjectiveKind::Latency: return m.tl_ms;
    case ObjectiveKind::Weighted: return weighted_objective(m, o.alpha, o.beta, o.gamma);
  }
  return 0.0;
}

enum class Certificate { ProvedOptimal, BestFound, Infeasible };

struct Solution {
  Assignment assignment;
  RoutingPlan routing;
  MetricsReport metrics;
  double objective_value = 0.0;
  Certificate certificate = Certificate::Infeasible;
  std::vector<int> blocked;  // bp ids that could not be embedded
};

// Frozen prior embeddings: their capacity use, traffic and metrics stay fixed
// while new BPs are placed around them.
struct EmbeddingBase {
  std::vector<BusinessProcess> bps;
  Assignment assignment;
  RoutingPlan routing;
};

struct SolveBudget {
  int k_paths = 8;
  std::int64_t node_limit = -1;   // < 0: unbounded
  double time_limit_s = -1.0;     // < 0: unbounded
  int workers = 1;
  bool first_feasible_only = false;  // stop at the first complete solution
};

struct OracleLimits {
  double enumeration_cap = 1e8;
};

namespace detail {

struct FlatVnode {
  int bp_id = 0;
  int vnode_id = 0;
  const VirtualNode* vn = nullptr;
  std::vector<std::size_t> candidates;  // node indices, by (idle_cpu, id)
};

struct FlatDemand {
  int bp_id = 0;
  int vlink = 0;
  double kbps = 0.0;
  std::size_t flat_a = 0, flat_b = 0;  // indices into the flat vnode list
  std::size_t completes_at = 0;        // max(flat_a, flat_b)
};

struct PairCandidates {
  std::vector<Path> paths;
  std::vector<double> cost_per_kbps;  // network power per kbps along each path
  bool exhaustive = false;            // covers every simple path of the pair
};

inline double path_cost_per_kbps(const PhysicalNetwork& net, const Path& p) {
  double c = 0.0;
  for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i)
    c += net.find_link(p.nodes[i], p.nodes[i + 1])->cost_per_kbps();
  return c;
}

struct ExactContext {
  const PhysicalNetwork* net = nullptr;
  std::vector<BusinessProcess> all_bps;  // base ++ free, for evaluation
  const EmbeddingBase* base = nullptr;
  EmbeddingOptions options;
  Objective objective;
  LatencyTable table;
  SolveBudget budget;

  std::vector<FlatVnode> vnodes;    // (bp id, vnode id) order
  std::vector<FlatDemand> demands;  // (bp id, vlink) order
  std::map<std::pair<int, int>, PairCandidates> pair_paths;  // by host ids
  bool any_pair_truncated = false;
  double min_edge_cost = 0.0;

  // per node-index data
  std::size_t n = 0;
  std::vector<int> ids;
  std::vector<double> mcu_cap, ram_cap, link_cap, idle_cpu, max_cpu, idle_net;

  // preloaded base consumption
  std::vector<double> base_mcu, base_ram, base_out, base_in;
  std::vector<int> base_hosted;
  double base_wire_mw = 0.0;
};

// Comparison key for ties between equal-objective solutions: host vector in
// flat vnode order, then path node sequences in demand order. The oracle uses
// the same key, so both report the same winner.
struct SolutionKey {
  std::vector<int> hosts;
  std::vector<std::vector<int>> paths;

  bool operator<(const SolutionKey& o) const {
    if (hosts != o.hosts) return hosts < o.hosts;
    return paths < o.paths;
  }
};

struct Incumbent {
  bool found = false;
  double value = std::numeric_limits<double>::infinity();
  SolutionKey key;

  bool would_improve(double v, const SolutionKey& k) const {
    if (!found) return true;
    if (v < value) return true;
    if (v > value) return false;
    return k < key;
  }
};

inline double prune_slack(double value) {
  return 1e-9 + 1e-9 * std::abs(value);
}

struct SharedSearch {
  std::atomic<double> best_value{std::numeric_limits<double>::infinity()};
  std::atomic<std::int64_t> nodes_expanded{0};
  std::atomic<bool> stop{false};
  std::chrono::steady_clock::time_point deadline{};
  bool has_deadline = false;

  void relax_best(double v) {
    double cur = best_value.load(std::memory_order_relaxed);
    while (v < cur && !best_value.compare_exchange_weak(cur, v, std::memory_order_relaxed)) {
    }
  }
};

class ExactWorker {
 public:
  ExactWorker(const ExactContext& ctx, SharedSearch& shared) : ctx_(ctx), shared_(shared) {
    const std::size_t n = ctx.n;
    mcu_used_ = ctx.base_mcu;
    ram_used_ = ctx.base_ram;
    out_kbps_ = ctx.base_out;
    in_kbps_ = ctx.base_in;
    hosted_ = ctx.base_hosted;
    pending_in_.assign(n, 0.0);
    forced_net_.assign(n, 0);
    hosts_.assign(ctx.vnodes.size(), -1);
    wire_mw_ = ctx.base_wire_mw;
    chosen_paths_.assign(ctx.demands.size(), nullptr);
  }

  // Explores the subtrees rooted at the given candidate indices of the first
  // vnode (all of them when the instance has no vnodes or indices are empty
  // and level 0 has none).
  void run(const std::vector<std::size_t>& root_candidates) {
    if (ctx_.vnodes.empty()) {
      route_leaf();
      return;
    }
    for (std::size_t ci : root_candidates) try_place(0, ci);
  }

  Incumbent best;

 private:
  bool budget_ok() {
    if (shared_.stop.load(std::memory_order_relaxed)) return false;
    const std::int64_t seen = shared_.nodes_expanded.fetch_add(1, std::memory_order_relaxed);
    if (ctx_.budget.node_limit >= 0 && seen >= ctx_.budget.node_limit) {
      shared_.stop.store(true, std::memory_order_relaxed);
      return false;
    }
    if (shared_.has_deadline && (seen & 0x3f) == 0 &&
        std::chrono::steady_clock::now() > shared_.deadline) {
      shared_.stop.store(true, std::memory_order_relaxed);
      return false;
    }
    return true;
  }

  // Admissible lower bound on the objective of any completion of the current
  // state; +inf when some node's arrival lower bound has left the latency
  // grid (no completion can be feasible).
  double bound() const {
    double tpp = placed_load_mw_;
    for (std::size_t i = 0; i < ctx_.n; ++i)
      if (hosted_[i] > 0) tpp += ctx_.idle_cpu[i];

    double tl = 0.0;
    double tnp = wire_mw_ + pending_wire_mw_;
    const bool need_latency = ctx_.objective.kind != ObjectiveKind::Energy;
    for (std::size_t i = 0; i < ctx_.n; ++i) {
      if (in_kbps_[i] > 0 || out_kbps_[i] > 0 || forced_net_[i] > 0)
        tnp += ctx_.idle_net[i];
      const double arrival = in_kbps_[i] + pending_in_[i];
      if (arrival > 0) {
        const auto w = ctx_.table.lookup(arrival);
        if (!w) return std::numeric_limits<double>::infinity();
        if (need_latency) tl += *w;
      }
    }
    switch (ctx_.objective.kind) {
      case ObjectiveKind::Energy: return tnp + tpp;
      case ObjectiveKind::Latency: return tl;
      case ObjectiveKind::Weighted:
        return ctx_.objective.alpha * tl + ctx_.objective.beta * tnp +
               ctx_.objective.gamma * tpp;
    }
    return 0.0;
  }

  bool prunable() const {
    const double b = bound();
    if (std::isinf(b)) return true;  // no completion can stay on the latency grid
    if (ctx_.budget.first_feasible_only) return false;
    const double best = shared_.best_value.load(std::memory_order_relaxed);
    if (!std::isfinite(best)) return false;
    // slack keeps float-level ties alive so the lexicographic winner matches
    // the oracle's
    return b > best + prune_slack(best);
  }

  void try_place(std::size_t t, std::size_t ci) {
    if (!budget_ok()) return;
    const FlatVnode& fv = ctx_.vnodes[t];
    const std::size_t idx = fv.candidates[ci];
    const VirtualNode& vn = *fv.vn;
    if (mcu_used_[idx] + vn.mcu_demand_mhz > ctx_.mcu_cap[idx]) return;
    if (ram_used_[idx] + vn.ram_demand_kb > ctx_.ram_cap[idx]) return;
    const auto cokey = std::pair{fv.bp_id, idx};
    if (ctx_.options.coexistence && coexist_[cokey] >= 1) return;

    mcu_used_[idx] += vn.mcu_demand_mhz;
    ram_used_[idx] += vn.ram_demand_kb;
    hosted_[idx] += 1;
    coexist_[cokey] += 1;
    const double load = ctx_.max_cpu[idx] * (vn.mcu_demand_mhz / ctx_.mcu_cap[idx]);
    placed_load_mw_ += load;
    hosts_[t] = static_cast<int>(idx);

    // demands whose endpoints are now both placed contribute their floor
    // terms to the bound
    std::vector<std::size_t> committed;
    for (std::size_t d = 0; d < ctx_.demands.size(); ++d) {
      const FlatDemand& fd = ctx_.demands[d];
      if (fd.completes_at != t) continue;
      const std::size_t c = static_cast<std::size_t>(hosts_[fd.flat_a]);
      const std::size_t dd = static_cast<std::size_t>(hosts_[fd.flat_b]);
      if (c == dd) continue;
      pending_in_[dd] += fd.kbps;
      pending_wire_mw_ += fd.kbps * ctx_.min_edge_cost;
      forced_net_[c] += 1;
      forced_net_[dd] += 1;
      committed.push_back(d);
    }

    if (!prunable()) {
      if (t + 1 == ctx_.vnodes.size()) {
        route_leaf();
      } else {
        for (std::size_t nc = 0; nc < ctx_.vnodes[t + 1].candidates.size(); ++nc)
          try_place(t + 1, nc);
      }
    }

    for (std::size_t d : committed) {
      const FlatDemand& fd = ctx_.demands[d];
      const std::size_t c = static_cast<std::size_t>(hosts_[fd.flat_a]);
      const std::size_t dd = static_cast<std::size_t>(hosts_[fd.flat_b]);
      pending_in_[dd] -= fd.kbps;
      pending_wire_mw_ -= fd.kbps * ctx_.min_edge_cost;
      forced_net_[c] -= 1;
      forced_net_[dd] -= 1;
    }
    hosts_[t] = -1;
    placed_load_mw_ -= load;
    coexist_[cokey] -= 1;
    hosted_[idx] -= 1;
    ram_used_[idx] -= vn.ram_demand_kb;
    mcu_used_[idx] -= vn.mcu_demand_mhz;
  }

  void route_leaf() { route_demand(0); }

  void route_demand(std::size_t d) {
    if (shared_.stop.load(std::memory_order_relaxed)) return;
    if (d == ctx_.demands.size()) {
      complete();
      return;
    }
    const FlatDemand& fd = ctx_.demands[d];
    const std::size_t ci = static_cast<std::size_t>(hosts_[fd.flat_a]);
    const std::size_t di = static_cast<std::size_t>(hosts_[fd.flat_b]);
    if (ci == di) {
      chosen_paths_[d] = nullptr;  // intra-node, no traffic
      route_demand(d + 1);
      return;
    }
    const int c = ctx_.ids[ci];
    const int dst = ctx_.ids[di];
    const auto it = ctx_.pair_paths.find({c, dst});
    if (it == ctx_.pair_paths.end()) return;  // disconnected pair
    const PairCandidates& cands = it->second;

    // this demand's floor terms are replaced by exact ones while a concrete
    // path is committed
    pending_in_[di] -= fd.kbps;
    pending_wire_mw_ -= fd.kbps * ctx_.min_edge_cost;
    forced_net_[ci] -= 1;
    forced_net_[di] -= 1;

    for (std::size_t p = 0; p < cands.paths.size(); ++p) {
      const Path& path = cands.paths[p];
      bool ok = true;
      for (std::size_t h = 0; ok && h + 1 < path.nodes.size(); ++h) {
        const std::size_t u = ctx_.net->node_index(path.nodes[h]);
        const std::size_t v = ctx_.net->node_index(path.nodes[h + 1]);
        if (out_kbps_[u] + fd.kbps > ctx_.link_cap[u]) ok = false;
        if (in_kbps_[v] + fd.kbps > ctx_.table.max_arrival_kbps()) ok = false;
      }
      if (!ok) continue;
      for (std::size_t h = 0; h + 1 < path.nodes.size(); ++h) {
        out_kbps_[ctx_.net->node_index(path.nodes[h])] += fd.kbps;
        in_kbps_[ctx_.net->node_index(path.nodes[h + 1])] += fd.kbps;
      }
      wire_mw_ += fd.kbps * cands.cost_per_kbps[p];
      chosen_paths_[d] = &path;

      if (!prunable()) route_demand(d + 1);

      chosen_paths_[d] = nullptr;
      wire_mw_ -= fd.kbps * cands.cost_per_kbps[p];
      for (std::size_t h = 0; h + 1 < path.nodes.size(); ++h) {
        out_kbps_[ctx_.net->node_index(path.nodes[h])] -= fd.kbps;
        in_kbps_[ctx_.net->node_index(path.nodes[h + 1])] -= fd.kbps;
      }
      if (shared_.stop.load(std::memory_order_relaxed)) break;
    }

    pending_in_[di] += fd.kbps;
    pending_wire_mw_ += fd.kbps * ctx_.min_edge_cost;
    forced_net_[ci] += 1;
    forced_net_[di] += 1;
  }

  // A full feasible embedding: score it with the canonical evaluation (the
  // same code the oracle and the reports use) so values compare bit for bit.
  void complete() {
    Assignment assignment = ctx_.base ? ctx_.base->assignment : Assignment{};
    for (std::size_t t = 0; t < ctx_.vnodes.size(); ++t)
      assignment[{ctx_.vnodes[t].bp_id, ctx_.vnodes[t].vnode_id}] = ctx_.ids[hosts_[t]];
    RoutingPlan plan = ctx_.base ? ctx_.base->routing : RoutingPlan{};
    for (std::size_t d = 0; d < ctx_.demands.size(); ++d) {
      const FlatDemand& fd = ctx_.demands[d];
      plan.add_route({fd.bp_id, fd.vlink},
                     chosen_paths_[d] ? *chosen_paths_[d] : Path{}, fd.kbps);
    }
    double value = 0.0;
    try {
      const MetricsReport m = evaluate_solution(*ctx_.net, ctx_.all_bps, assignment, plan,
                                                ctx_.table);
      value = objective_value(ctx_.objective, m);
    } catch (const SaturationError&) {
      return;
    }
    SolutionKey key;
    key.hosts.reserve(hosts_.size());
    for (int h : hosts_) key.hosts.push_back(ctx_.ids[static_cast<std::size_t>(h)]);
    for (std::size_t d = 0; d < ctx_.demands.size(); ++d)
      key.paths.push_back(chosen_paths_[d] ? chosen_paths_[d]->nodes : std::vector<int>{});
    if (best.would_improve(value, key)) {
      best.found = true;
      best.value = value;
      best.key = std::move(key);
      shared_.relax_best(value);
    }
    if (ctx_.budget.first_feasible_only) shared_.stop.store(true, std::memory_order_relaxed);
  }

  const ExactContext& ctx_;
  SharedSearch& shared_;
  std::vector<double> mcu_used_, ram_used_, out_kbps_, in_kbps_, pending_in_;
  std::vector<int> hosted_, forced_net_;
  std::map<std::pair<int, std::size_t>, int> coexist_;
  std::vector<int> hosts_;
  std::vector<const Path*> chosen_paths_;
  double placed_load_mw_ = 0.0;
  double wire_mw_ = 0.0;
  double pending_wire_mw_ = 0.0;
};

inline ExactContext build_exact_context(const PhysicalNetwork& net,
                                        const std::vector<BusinessProcess>& bps,
                                        const EmbeddingOptions& options,
                                        const Objective& objective, const SolveBudget& budget,
                                        const EmbeddingBase* base) {
  ExactContext ctx;
  ctx.net = &net;
  ctx.base = base;
  ctx.options = options;
  ctx.objective = objective;
  ctx.budget = budget;
  ctx.table = table_for(net);
  if (base) ctx.all_bps = base->bps;
  ctx.all_bps.insert(ctx.all_bps.end(), bps.begin(), bps.end());

  ctx.n = net.nodes.size();
  ctx.ids.resize(ctx.n);
  ctx.mcu_cap.resize(ctx.n);
  ctx.ram_cap.resize(ctx.n);
  ctx.link_cap.resize(ctx.n);
  ctx.idle_cpu.resize(ctx.n);
  ctx.max_cpu.resize(ctx.n);
  ctx.idle_net.resize(ctx.n);
  for (std::size_t i = 0; i < ctx.n; ++i) {
    const IoTNode& nd = net.nodes[i];
    ctx.ids[i] = nd.id;
    ctx.mcu_cap[i] = nd.mcu_capacity_mhz;
    ctx.ram_cap[i] = nd.ram_capacity_kb;
    ctx.link_cap[i] = nd.link_capacity_kbps;
    ctx.idle_cpu[i] = nd.idle_cpu_mw;
    ctx.max_cpu[i] = nd.max_cpu_mw;
    ctx.idle_net[i] = nd.idle_net_mw;
  }
  ctx.min_edge_cost = std::numeric_limits<double>::infinity();
  for (const auto& l : net.links) ctx.min_edge_cost = std::min(ctx.min_edge_cost, l.cost_per_kbps());
  if (net.links.empty()) ctx.min_edge_cost = 0.0;

  ctx.base_mcu.assign(ctx.n, 0.0);
  ctx.base_ram.assign(ctx.n, 0.0);
  ctx.base_out.assign(ctx.n, 0.0);
  ctx.base_in.assign(ctx.n, 0.0);
  ctx.base_hosted.assign(ctx.n, 0);
  if (base) {
    for (const auto& [ref, host] : base->assignment) {
      const BusinessProcess* bp = nullptr;
      for (const auto& b : base->bps)
        if (b.id == ref.bp) bp = &b;
      if (!bp) throw Error("solve_exact: base assignment references unknown bp");
      const VirtualNode* vn = bp->find_vnode(ref.vnode);
      if (!vn) throw Error("solve_exact: base assignment references unknown vnode");
      const std::size_t idx = net.node_index(host);
      ctx.base_mcu[idx] += vn->mcu_demand_mhz;
      ctx.base_ram[idx] += vn->ram_demand_kb;
      ctx.base_hosted[idx] += 1;
    }
    for (const auto& [dl, kbps] : base->routing.link_loads) {
      if (kbps <= 0) continue;
      ctx.base_out[net.node_index(dl.from)] += kbps;
      ctx.base_in[net.node_index(dl.to)] += kbps;
      const WirelessLink* l = net.find_link(dl.from, dl.to);
      if (!l) throw Error("solve_exact: base load on undeclared link");
      ctx.base_wire_mw += kbps * l->cost_per_kbps();
    }
  }

  std::vector<const BusinessProcess*> order;
  for (const auto& b : bps) order.push_back(&b);
  std::sort(order.begin(), order.end(),
            [](const BusinessProcess* l, const BusinessProcess* r) { return l->id < r->id; });

  std::map<std::pair<int, int>, std::size_t> flat_of;
  for (const BusinessProcess* bp : order) {
    std::vector<const VirtualNode*> vorder;
    for (const auto& v : bp->vnodes) vorder.push_back(&v);
    std::sort(vorder.begin(), vorder.end(),
              [](const VirtualNode* l, const VirtualNode* r) { return l->id < r->id; });
    for (const VirtualNode* vn : vorder) {
      FlatVnode fv;
      fv.bp_id = bp->id;
      fv.vnode_id = vn->id;
      fv.vn = vn;
      std::vector<std::size_t> cand;
      for (std::size_t i = 0; i < ctx.n; ++i) {
        const IoTNode& nd = net.nodes[i];
        if (!nd.provides(vn->required_function)) continue;
        if (vn->required_zone && nd.zone != *vn->required_zone) continue;
        cand.push_back(i);
      }
      // cheapest idle power first: helps the energy bound close early
      std::sort(cand.begin(), cand.end(), [&](std::size_t l, std::size_t r) {
        if (ctx.idle_cpu[l] != ctx.idle_cpu[r]) return ctx.idle_cpu[l] < ctx.idle_cpu[r];
        return ctx.ids[l] < ctx.ids[r];
      });
      fv.candidates = std::move(cand);
      flat_of[{bp->id, vn->id}] = ctx.vnodes.size();
      ctx.vnodes.push_back(std::move(fv));
    }
    for (std::size_t i = 0; i < bp->vlinks.size(); ++i) {
      const auto& vl = bp->vlinks[i];
      FlatDemand fd;
      fd.bp_id = bp->id;
      fd.vlink = static_cast<int>(i);
      fd.kbps = vl.traffic_kbps;
      fd.flat_a = flat_of.at({bp->id, vl.a});
      fd.flat_b = flat_of.at({bp->id, vl.b});
      fd.completes_at = std::max(fd.flat_a, fd.flat_b);
      ctx.demands.push_back(fd);
    }
  }

  // Candidate paths for every host pair any demand could use, fixed up front
  // so the optimality certificate does not depend on the search schedule.
  const WeightMode mode =
      objective.kind == ObjectiveKind::Energy ? WeightMode::LinkPower : WeightMode::Hops;
  for (const FlatDemand& fd : ctx.demands) {
    for (std::size_t ai : ctx.vnodes[fd.flat_a].candidates) {
      for (std::size_t bi : ctx.vnodes[fd.flat_b].candidates) {
        if (ai == bi) continue;
        const std::pair<int, int> key{ctx.ids[ai], ctx.ids[bi]};
        if (ctx.pair_paths.count(key)) continue;
        auto paths = k_shortest_paths(net, key.first, key.second, budget.k_paths + 1, mode);
        PairCandidates pc;
        pc.exhaustive = static_cast<int>(paths.size()) <= budget.k_paths;
        if (!pc.exhaustive) {
          paths.resize(static_cast<std::size_t>(budget.k_paths));
          ctx.any_pair_truncated = true;
        }
        pc.cost_per_kbps.reserve(paths.size());
        for (const auto& p : paths) pc.cost_per_kbps.push_back(path_cost_per_kbps(net, p));
        pc.paths = std::move(paths);
        ctx.pair_paths[key] = std::move(pc);
      }
    }
  }
  return ctx;
}

// Rebuilds the full Solution from a winning key.
inline Solution materialize(const ExactContext& ctx, const Incumbent& inc,
                            Certificate certificate) {
  Solution s;
  s.assignment = ctx.base ? ctx.base->assignment : Assignment{};
  for (std::size_t t = 0; t < ctx.vnodes.size(); ++t)
    s.assignment[{ctx.vnodes[t].bp_id, ctx.vnodes[t].vnode_id}] = inc.key.hosts[t];
  s.routing = ctx.base ? ctx.base->routing : RoutingPlan{};
  for (std::size_t d = 0; d < ctx.demands.size(); ++d)
    s.routing.add_route({ctx.demands[d].bp_id, ctx.demands[d].vlink},
                        Path{inc.key.paths[d]}, ctx.demands[d].kbps);
  s.metrics = evaluate_solution(*ctx.net, ctx.all_bps, s.assignment, s.routing, ctx.table);
  s.objective_value = objective_value(ctx.objective, s.metrics);
  s.certificate = certificate;
  return s;
}

}  // namespace detail

// Exact branch-and-bound search over virtual-node placements and candidate
// paths. Returns the optimum with a PROVED_OPTIMAL certificate when the tree
// was exhausted and every host pair's candidate set covered all of its simple
// paths; budget exhaustion downgrades to BEST_FOUND. Deterministic for a
// fixed budget: with several workers, subtree results merge under the same
// (value, assignment, paths) tie-break the single-threaded search uses.
inline Solution solve_exact(const PhysicalNetwork& net,
                            const std::vector<BusinessProcess>& bps,
                            const EmbeddingOptions& options, const Objective& objective,
                            const SolveBudget& budget = {},
                            const EmbeddingBase* base = nullptr) {
  detail::ExactContext ctx =
      detail::build_exact_context(net, bps, options, objective, budget, base);

  for (const auto& fv : ctx.vnodes) {
    if (fv.candidates.empty()) {
      Solution s;
      s.certificate = Certificate::Infeasible;
      for (const auto& b : bps) s.blocked.push_back(b.id);
      return s;
    }
  }

  detail::SharedSearch shared;
  if (budget.time_limit_s > 0) {
    shared.has_deadline = true;
    shared.deadline = std::chrono::steady_clock::now() +
                      std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                          std::chrono::duration<double>(budget.time_limit_s));
  }

  const int workers = std::max(1, budget.workers);
  detail::Incumbent best;
  if (ctx.vnodes.empty() || workers == 1) {
    detail::ExactWorker w(ctx, shared);
    std::vector<std::size_t> roots;
    if (!ctx.vnodes.empty())
      for (std::size_t i = 0; i < ctx.vnodes[0].candidates.size(); ++i) roots.push_back(i);
    w.run(roots);
    best = w.best;
  } else {
    std::vector<std::vector<std::size_t>> parts(static_cast<std::size_t>(workers));
    for (std::size_t i = 0; i < ctx.vnodes[0].candidates.size(); ++i)
      parts[i % static_cast<std::size_t>(workers)].push_back(i);
    std::vector<std::future<detail::Incumbent>> futs;
    for (int wi = 0; wi < workers; ++wi) {
      futs.push_back(std::async(std::launch::async, [&ctx, &shared, &parts, wi]() {
        detail::ExactWorker w(ctx, shared);
        w.run(parts[static_cast<std::size_t>(wi)]);
        return w.best;
      }));
    }
    for (auto& f : futs) {
      const detail::Incumbent cand = f.get();
      if (cand.found && best.would_improve(cand.value, cand.key)) best = cand;
    }
  }

  const bool truncated =
      shared.stop.load() && !(budget.first_feasible_only && best.found);
  if (!best.found) {
    Solution s;
    s.certificate = truncated ? Certificate::BestFound : Certificate::Infeasible;
    for (const auto& b : bps) s.blocked.push_back(b.id);
    return s;
  }
  Certificate cert = Certificate::ProvedOptimal;
  if (truncated || ctx.any_pair_truncated || budget.first_feasible_only)
    cert = Certificate::BestFound;
  return detail::materialize(ctx, best, cert);
}

namespace detail {

// Every simple path between two nodes, in lexicographic node-sequence order.
inline void all_simple_paths_rec(const PhysicalNetwork& net, int cur, int dst,
                                 std::set<int>& visited, std::vector<int>& path,
                                 std::vector<Path>& out, double cap) {
  if (cur == dst) {
    out.push_back(Path{path});
    if (out.size() > static_cast<std::size_t>(cap))
      throw TooLargeError("simple-path enumeration exceeded the oracle cap");
    return;
  }
  for (int v : net.neighbors(cur)) {
    if (visited.count(v)) continue;
    visited.insert(v);
    path.push_back(v);
    all_simple_paths_rec(net, v, dst, visited, path, out, cap);
    path.pop_back();
    visited.erase(v);
  }
}

inline std::vector<Path> all_simple_paths(const PhysicalNetwork& net, int src, int dst,
                                          double cap) {
  std::vector<Path> out;
  if (src == dst) return out;
  std::set<int> visited{src};
  std::vector<int> path{src};
  all_simple_paths_rec(net, src, dst, visited, path, out, cap);
  return out;
}

}  // namespace detail

// Verification oracle: full enumeration of every assignment and every
// combination of simple paths, filtered through the public feasibility
// checkers, scored with the public evaluation. Ties break lexicographically
// on (assignment vector, path vectors). Deliberately shares no search logic
// with solve_exact.
inline Solution brute_force_oracle(const PhysicalNetwork& net,
                                   const std::vector<BusinessProcess>& bps,
                                   const EmbeddingOptions& options, const Objective& objective,
                                   const OracleLimits& limits = {}) {
  const LatencyTable table = table_for(net);

  std::vector<std::pair<int, int>> vnode_keys;  // (bp id, vnode id), sorted
  std::vector<const BusinessProcess*> order;
  for (const auto& b : bps) order.push_back(&b);
  std::sort(order.begin(), order.end(),
            [](const BusinessProcess* l, const BusinessProcess* r) { return l->id < r->id; });
  std::vector<std::tuple<int, int, int, int, double>> demands;  // bp, vlink, va, vb, kbps
  for (const BusinessProcess* bp : order) {
    std::vector<int> vids;
    for (const auto& v : bp->vnodes) vids.push_back(v.id);
    std::sort(vids.begin(), vids.end());
    for (int vid : vids) vnode_keys.push_back({bp->id, vid});
    for (std::size_t i = 0; i < bp->vlinks.size(); ++i)
      demands.push_back({bp->id, static_cast<int>(i), bp->vlinks[i].a, bp->vlinks[i].b,
                         bp->vlinks[i].traffic_kbps});
  }

  std::vector<int> node_ids;
  for (const auto& n : net.nodes) node_ids.push_back(n.id);
  std::sort(node_ids.begin(), node_ids.end());

  const double assignments_count =
      std::pow(static_cast<double>(node_ids.size()), static_cast<double>(vnode_keys.size()));
  if (assignments_count > limits.enumeration_cap)
    throw TooLargeError("oracle: assignment space exceeds the enumeration cap");

  // all simple paths per host pair, computed on demand
  std::map<std::pair<int, int>, std::vector<Path>> path_cache;
  auto paths_for = [&](int c, int d) -> const std::vector<Path>& {
    auto it = path_cache.find({c, d});
    if (it == path_cache.end())
      it = path_cache.emplace(std::pair{c, d},
                              detail::all_simple_paths(net, c, d, limits.enumeration_cap))
               .first;
    return it->second;
  };

  bool found = false;
  double best_value = std::numeric_limits<double>::infinity();
  detail::SolutionKey best_key;
  Solution best_solution;
  double combos_seen = 0.0;

  std::vector<std::size_t> pick(vnode_keys.size(), 0);
  // odometer over assignments in lexicographic (ascending node id) order
  while (true) {
    Assignment assignment;
    for (std::size_t i = 0; i < vnode_keys.size(); ++i)
      assignment[{vnode_keys[i].first, vnode_keys[i].second}] = node_ids[pick[i]];

    if (check_assignment(net, bps, assignment, options).empty()) {
      // per-demand path choices; intra-node demands have the single empty path
      std::vector<std::vector<Path>> choices;
      bool routable = true;
      for (const auto& [bp_id, vlink, va, vb, kbps] : demands) {
        const int c = assignment.at({bp_id, va});
        const int d = assignment.at({bp_id, vb});
        if (c == d) {
          choices.push_back({Path{}});
          continue;
        }
        const auto& ps = paths_for(c, d);
        if (ps.empty()) {
          routable = false;
          break;
        }
        choices.push_back(ps);
      }
      if (routable) {
        std::vector<std::size_t> cpick(choices.size(), 0);
        while (true) {
          combos_seen += 1.0;
          if (combos_seen > limits.enumeration_cap)
            throw TooLargeError("oracle: path combination space exceeds the enumeration cap");
          RoutingPlan plan;
          for (std::size_t d = 0; d < choices.size(); ++d) {
            const auto& [bp_id, vlink, va, vb, kbps] = demands[d];
            plan.add_route({bp_id, vlink}, choices[d][cpick[d]], kbps);
          }
          if (check_routing(net, bps, assignment, plan).empty()) {
            try {
              const MetricsReport m = evaluate_solution(net, bps, assignment, plan, table);
              const double value = objective_value(objective, m);
              detail::SolutionKey key;
              for (std::size_t i = 0; i < vnode_keys.size(); ++i)
                key.hosts.push_back(node_ids[pick[i]]);
              for (std::size_t d = 0; d < choices.size(); ++d)
                key.paths.push_back(choices[d][cpick[d]].nodes);
              const bool better =
                  !found || value < best_value || (value == best_value && key < best_key);
              if (better) {
                found = true;
                best_value = value;
                best_key = key;
                best_solution.assignment = assignment;
                best_solution.routing = plan;
                best_solution.metrics = m;
                best_solution.objective_value = value;
              }
            } catch (const SaturationError&) {
              // arrival beyond the latency grid: infeasible combination
            }
          }
          // advance the path odometer
          std::size_t d = 0;
          for (; d < cpick.size(); ++d) {
            if (++cpick[d] < choices[d].size()) break;
            cpick[d] = 0;
          }
          if (d == cpick.size()) break;
        }
      }
    }

    // advance the assignment odometer
    if (vnode_keys.empty()) break;
    std::size_t i = 0;
    for (; i < pick.size(); ++i) {
      if (++pick[i] < node_ids.size()) break;
      pick[i] = 0;
    }
    if (i == pick.size()) break;
  }

  if (vnode_keys.empty()) {
    // zero BPs: the empty embedding is the optimum
    Solution s;
    s.metrics = evaluate_solution(net, bps, {}, {}, table);
    s.objective_value = 0.0;
    s.certificate = Certificate::ProvedOptimal;
    return s;
  }
  if (!found) {
    Solution s;
    s.certificate = Certificate::Infeasible;
    for (const auto& b : bps) s.blocked.push_back(b.id);
    return s;
  }
  best_solution.certificate = Certificate::ProvedOptimal;
  return best_solution;
}

}  // namespace iotembed
