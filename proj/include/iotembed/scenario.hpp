// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "iotembed/heuristics.hpp"
#include "iotembed/model.hpp"
#include "iotembed/rng.hpp"
#include "iotembed/solver.hpp"

namespace iotembed {

enum class Method { Exact, Rese, Rlse, Eluse };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::Exact: return "exact";
    case Method::Rese: return "rese";
    case Method::Rlse: return "rlse";
    case Method::Eluse: return "eluse";
  }
  return "?";
}

// Batched arrivals; BP ids must be unique across batches.
struct ArrivalSchedule {
  std::vector<std::vector<BusinessProcess>> batches;

  static ArrivalSchedule batched(const std::vector<BusinessProcess>& bps, int batch_size) {
    if (batch_size < 1) throw Error("batch size must be >= 1");
    ArrivalSchedule s;
    for (std::size_t i = 0; i < bps.size(); i += static_cast<std::size_t>(batch_size)) {
      const std::size_t hi = std::min(bps.size(), i + static_cast<std::size_t>(batch_size));
      s.batches.emplace_back(bps.begin() + static_cast<std::ptrdiff_t>(i),
                             bps.begin() + static_cast<std::ptrdiff_t>(hi));
    }
    std::set<int> ids;
    for (const auto& batch : s.batches)
      for (const auto& bp : batch)
        if (!ids.insert(bp.id).second)
          throw Error("duplicate bp id " + std::to_string(bp.id) + " in schedule");
    return s;
  }
};

struct ScenarioParams {
  Objective objective = Objective::energy();
  EmbeddingOptions options;
  SolveBudget budget;
  double rlse_threshold = 0.6;
  std::uint64_t seed = 1;  // ELUSE draws
};

struct BatchRecord {
  int batch = 0;      // 1-based
  int offered = 0;    // cumulative BPs offered
  int embedded = 0;   // currently embedded
  std::vector<int> blocked;  // currently blocked bp ids
  MetricsReport metrics;
  double objective_value = 0.0;
};

struct ScenarioResult {
  std::vector<BatchRecord> batches;
  std::string method_tag;
  std::string options_tag;
};

namespace detail {

inline std::string options_tag(const ScenarioParams& p) {
  std::string t = p.options.zone_mode == ZoneMode::SameZone ? "same-zone" : "cross-zone";
  t += p.options.coexistence ? "+coexist" : "+no-coexist";
  return t;
}

// Embeds one batch of new BPs against frozen state. ELUSE batches draw from a
// per-batch sub-seed so each batch is reproducible on its own.
inline Solution embed_new(const PhysicalNetwork& net, Method method,
                          const std::vector<BusinessProcess>& newly,
                          const ScenarioParams& p, std::size_t batch_index,
                          const EmbeddingBase* base) {
  switch (method) {
    case Method::Rese:
      return embed_rese(net, newly, p.options, p.objective, base);
    case Method::Rlse:
      return embed_rlse(net, newly, p.options, p.rlse_threshold, p.objective, base);
    case Method::Eluse:
      return embed_eluse(net, newly, p.options, derive_seed(p.seed, batch_index), p.objective,
                         base);
    case Method::Exact:
      break;
  }
  throw Error("embed_new: exact handled by caller");
}

inline void absorb(EmbeddingBase& base, const std::vector<BusinessProcess>& offered,
                   const Solution& sol) {
  const std::set<int> blocked(sol.blocked.begin(), sol.blocked.end());
  base.assignment = sol.assignment;
  base.routing = sol.routing;
  for (const auto& bp : offered)
    if (!blocked.count(bp.id)) base.bps.push_back(bp);
}

}  // namespace detail

// Sequential embedding: each batch is placed with every prior assignment and
// route frozen; BPs that do not fit are blocked permanently. With EXACT the
// new batch is optimised jointly, falling back to one-at-a-time embedding in
// id order when the joint problem is infeasible.
inline ScenarioResult run_sequential(const PhysicalNetwork& net,
                                     const ArrivalSchedule& schedule, Method method,
                                     const ScenarioParams& params) {
  ScenarioResult result;
  result.method_tag = std::string(to_string(method)) + "/sequential";
  result.options_tag = detail::options_tag(params);
  const LatencyTable table = table_for(net);

  EmbeddingBase base;
  std::vector<int> blocked;
  int offered = 0;
  for (std::size_t bi = 0; bi < schedule.batches.size(); ++bi) {
    const auto& batch = schedule.batches[bi];
    offered += static_cast<int>(batch.size());

    if (method == Method::Exact) {
      Solution sol = solve_exact(net, batch, params.options, params.objective, params.budget,
                                 &base);
      if (sol.certificate != Certificate::Infeasible) {
        detail::absorb(base, batch, sol);
      } else {
        std::vector<BusinessProcess> one_by_one = batch;
        std::sort(one_by_one.begin(), one_by_one.end(),
                  [](const BusinessProcess& l, const BusinessProcess& r) { return l.id < r.id; });
        for (const auto& bp : one_by_one) {
          Solution s1 = solve_exact(net, {bp}, params.options, params.objective, params.budget,
                                    &base);
          if (s1.certificate != Certificate::Infeasible)
            detail::absorb(base, {bp}, s1);
          else
            blocked.push_back(bp.id);
        }
      }
    } else {
      Solution sol = detail::embed_new(net, method, batch, params, bi, &base);
      detail::absorb(base, batch, sol);
      blocked.insert(blocked.end(), sol.blocked.begin(), sol.blocked.end());
    }

    BatchRecord rec;
    rec.batch = static_cast<int>(bi) + 1;
    rec.offered = offered;
    rec.embedded = static_cast<int>(base.bps.size());
    rec.blocked = blocked;
    std::sort(rec.blocked.begin(), rec.blocked.end());
    rec.metrics = evaluate_solution(net, base.bps, base.assignment, base.routing, table);
    rec.objective_value = objective_value(params.objective, rec.metrics);
    result.batches.push_back(std::move(rec));
  }
  return result;
}

namespace detail {

// Largest feasible subset of the offered BPs, preferring earlier arrivals
// among equal sizes. Probes feasibility with a first-feasible-only search.
inline std::vector<BusinessProcess> max_feasible_subset(const PhysicalNetwork& net,
                                                        const std::vector<BusinessProcess>& all,
                                                        const ScenarioParams& params) {
  SolveBudget probe = params.budget;
  probe.first_feasible_only = true;
  probe.workers = 1;
  const std::size_t n = all.size();
  for (std::size_t size = n; size >= 1; --size) {
    // lexicographically first combination of `size` indices that is feasible
    std::vector<std::size_t> comb(size);
    for (std::size_t i = 0; i < size; ++i) comb[i] = i;
    while (true) {
      std::vector<BusinessProcess> subset;
      for (std::size_t i : comb) subset.push_back(all[i]);
      const Solution probe_sol =
          solve_exact(net, subset, params.options, params.objective, probe);
      if (probe_sol.certificate != Certificate::Infeasible) return subset;
      // next combination
      std::size_t k = size;
      while (k > 0 && comb[k - 1] == n - size + (k - 1)) --k;
      if (k == 0) break;
      ++comb[k - 1];
      for (std::size_t i = k; i < size; ++i) comb[i] = comb[i - 1] + 1;
    }
  }
  return {};
}

}  // namespace detail

// Re-provisioning: after each batch every offered BP is re-embedded from
// scratch as one problem; blocking is re-evaluated each time. With EXACT an
// infeasible full set falls back to the largest feasible subset.
inline ScenarioResult run_reprovisioning(const PhysicalNetwork& net,
                                         const ArrivalSchedule& schedule, Method method,
                                         const ScenarioParams& params) {
  ScenarioResult result;
  result.method_tag = std::string(to_string(method)) + "/reprovision";
  result.options_tag = detail::options_tag(params);
  const LatencyTable table = table_for(net);

  std::vector<BusinessProcess> offered;
  for (std::size_t bi = 0; bi < schedule.batches.size(); ++bi) {
    offered.insert(offered.end(), schedule.batches[bi].begin(), schedule.batches[bi].end());

    Solution sol;
    std::vector<int> blocked;
    if (method == Method::Exact) {
      sol = solve_exact(net, offered, params.options, params.objective, params.budget);
      if (sol.certificate == Certificate::Infeasible) {
        const auto subset = detail::max_feasible_subset(net, offered, params);
        std::set<int> kept;
        for (const auto& bp : subset) kept.insert(bp.id);
        for (const auto& bp : offered)
          if (!kept.count(bp.id)) blocked.push_back(bp.id);
        sol = solve_exact(net, subset, params.options, params.objective, params.budget);
      }
    } else {
      sol = detail::embed_new(net, method, offered, params, bi, nullptr);
      blocked = sol.blocked;
    }

    BatchRecord rec;
    rec.batch = static_cast<int>(bi) + 1;
    rec.offered = static_cast<int>(offered.size());
    rec.blocked = blocked;
    std::sort(rec.blocked.begin(), rec.blocked.end());
    rec.embedded = rec.offered - static_cast<int>(rec.blocked.size());
    rec.metrics = sol.metrics;
    rec.objective_value = objective_value(params.objective, rec.metrics);
    result.batches.push_back(std::move(rec));
  }
  return result;
}

// Flat per-batch statistics, either from one run or averaged across seeds.
struct BatchStats {
  double batch = 0, offered = 0, embedded = 0, blocked = 0;
  double tpp_mw = 0, tnp_mw = 0, total_mw = 0, tl_ms = 0, avg_latency_ms = 0, objective = 0;
};

using ScenarioSeries = std::vector<BatchStats>;

inline ScenarioSeries to_series(const ScenarioResult& r) {
  ScenarioSeries s;
  for (const auto& b : r.batches) {
    BatchStats row;
    row.batch = b.batch;
    row.offered = b.offered;
    row.embedded = b.embedded;
    row.blocked = static_cast<double>(b.blocked.size());
    row.tpp_mw = b.metrics.tpp_mw;
    row.tnp_mw = b.metrics.tnp_mw;
    row.total_mw = b.metrics.tpp_mw + b.metrics.tnp_mw;
    row.tl_ms = b.metrics.tl_ms;
    row.avg_latency_ms = b.metrics.avg_latency_ms;
    row.objective = b.objective_value;
    s.push_back(row);
  }
  return s;
}

inline ScenarioSeries mean_series(const std::vector<ScenarioResult>& runs) {
  if (runs.empty()) throw Error("mean_series: no runs");
  ScenarioSeries mean = to_series(runs[0]);
  for (std::size_t r = 1; r < runs.size(); ++r) {
    const ScenarioSeries s = to_series(runs[r]);
    if (s.size() != mean.size()) throw Error("mean_series: schedules differ");
    for (std::size_t i = 0; i < s.size(); ++i) {
      mean[i].embedded += s[i].embedded;
      mean[i].blocked += s[i].blocked;
      mean[i].tpp_mw += s[i].tpp_mw;
      mean[i].tnp_mw += s[i].tnp_mw;
      mean[i].total_mw += s[i].total_mw;
      mean[i].tl_ms += s[i].tl_ms;
      mean[i].avg_latency_ms += s[i].avg_latency_ms;
      mean[i].objective += s[i].objective;
    }
  }
  const double k = static_cast<double>(runs.size());
  for (auto& row : mean) {
    row.embedded /= k;
    row.blocked /= k;
    row.tpp_mw /= k;
    row.tnp_mw /= k;
    row.total_mw /= k;
    row.tl_ms /= k;
    row.avg_latency_ms /= k;
    row.objective /= k;
  }
  return mean;
}

struct SavingsRow {
  int batch = 0;
  double offered = 0;
  double power_mw = 0, baseline_power_mw = 0;
  double tl_ms = 0, baseline_tl_ms = 0;
  double avg_ms = 0, baseline_avg_ms = 0;
  std::optional<double> power_saving_pct;        // 100*(1 - power/baseline)
  std::optional<double> tl_reduction_pct;
  std::optional<double> avg_reduction_pct;
};

struct SavingsTable {
  std::vector<SavingsRow> rows;
  std::optional<double> mean_power_saving_pct;
  std::optional<double> mean_tl_reduction_pct;
  std::optional<double> mean_avg_reduction_pct;
};

// Per-batch savings of a result against a baseline from the same schedule.
// Batches where the baseline is zero get an undefined marker instead of a
// percentage; means skip them.
inline SavingsTable compare(const ScenarioSeries& result, const ScenarioSeries& baseline) {
  if (result.size() != baseline.size())
    throw Error("compare: results cover different schedules");
  SavingsTable t;
  double psum = 0, pn = 0, tsum = 0, tn = 0, asum = 0, an = 0;
  for (std::size_t i = 0; i < result.size(); ++i) {
    SavingsRow row;
    row.batch = static_cast<int>(result[i].batch);
    row.offered = result[i].offered;
    row.power_mw = result[i].total_mw;
    row.baseline_power_mw = baseline[i].total_mw;
    row.tl_ms = result[i].tl_ms;
    row.baseline_tl_ms = baseline[i].tl_ms;
    row.avg_ms = result[i].avg_latency_ms;
    row.baseline_avg_ms = baseline[i].avg_latency_ms;
    if (row.baseline_power_mw > 0) {
      row.power_saving_pct = 100.0 * (1.0 - row.power_mw / row.baseline_power_mw);
      psum += *row.power_saving_pct;
      pn += 1;
    }
    if (row.baseline_tl_ms > 0) {
      row.tl_reduction_pct = 100.0 * (1.0 - row.tl_ms / row.baseline_tl_ms);
      tsum += *row.tl_reduction_pct;
      tn += 1;
    }
    if (row.baseline_avg_ms > 0) {
      row.avg_reduction_pct = 100.0 * (1.0 - row.avg_ms / row.baseline_avg_ms);
      asum += *row.avg_reduction_pct;
      an += 1;
    }
    t.rows.push_back(row);
  }
  if (pn > 0) t.mean_power_saving_pct = psum / pn;
  if (tn > 0) t.mean_tl_reduction_pct = tsum / tn;
  if (an > 0) t.mean_avg_reduction_pct = asum / an;
  return t;
}

inline SavingsTable compare(const ScenarioResult& result, const ScenarioResult& baseline) {
  return compare(to_series(result), to_series(baseline));
}

}  // namespace iotembed
