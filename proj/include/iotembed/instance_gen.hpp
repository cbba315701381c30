// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "iotembed/model.hpp"
#include "iotembed/rng.hpp"

namespace iotembed {

struct McuSpec {
  const char* name;
  double mhz;
  double ram_kb;
  double idle_mw;
  double max_mw;
};

// Low-power microcontroller fleet cycled across the generated nodes.
inline constexpr McuSpec kMcuFleet[] = {
    {"MSP430F1", 8, 64, 1, 8},
    {"MSP430FR5", 16, 64, 1, 14},
    {"MSP430FR6", 16, 128, 1, 20},
    {"MSP430F5", 25, 512, 1, 14},
    {"MSP432P4", 48, 256, 1, 16},
};
inline constexpr std::size_t kMcuFleetSize = sizeof(kMcuFleet) / sizeof(kMcuFleet[0]);
// the control function lives on this MCU type only
inline constexpr std::size_t kControlMcu = 4;  // MSP432P4

struct BuildingParams {
  int zones = 5;
  int nodes_per_zone = 6;
  double area_w_m = 500.0;
  double area_h_m = 500.0;
  int target_links = 89;
  int sensing_functions = 4;
  int actuating_functions = 4;
  Coefficients coeffs;
};

// Smart-building mesh: zones are vertical strips of the area, each holding
// nodes_per_zone nodes placed uniformly at random. Nodes within the radio
// range are linked, with the range picked so the undirected link count lands
// as close as possible to the target (ties to the smaller range); if the
// result is disconnected, minimum-length cross-component links are added.
// MCU types cycle through the fleet inside each zone, starting at the
// control-capable type so every zone can host controllers; each node offers
// two sensing and two actuating functions round-robin so every zone covers
// the whole function set.
inline PhysicalNetwork generate_building(std::uint64_t seed, const BuildingParams& params = {}) {
  if (params.zones < 1) throw GenerationError("generate_building: need at least one zone");
  const int per_zone = params.nodes_per_zone;
  const int s = params.sensing_functions;
  const int a = params.actuating_functions;
  if (s < 1 || a < 1) throw GenerationError("generate_building: need sensing and actuating functions");
  const int coverage_min = std::max({(s + 1) / 2, (a + 1) / 2, 1});
  if (per_zone < coverage_min)
    throw GenerationError("generate_building: " + std::to_string(per_zone) +
                          " nodes per zone cannot cover every function");

  PhysicalNetwork net;
  net.seed = seed;
  net.area_w_m = params.area_w_m;
  net.area_h_m = params.area_h_m;
  net.coeffs = params.coeffs;
  for (int z = 0; z < params.zones; ++z) net.zones.push_back(z);
  for (int i = 0; i < s; ++i)
    net.functions.push_back({i, "sense-" + std::to_string(i), FunctionKind::Sensing});
  const int control_fn = s;
  net.functions.push_back({control_fn, "control", FunctionKind::Control});
  for (int i = 0; i < a; ++i)
    net.functions.push_back({s + 1 + i, "act-" + std::to_string(i), FunctionKind::Actuating});

  Rng rng(seed);
  const double strip_w = params.area_w_m / static_cast<double>(params.zones);
  for (int z = 0; z < params.zones; ++z) {
    for (int l = 0; l < per_zone; ++l) {
      IoTNode n;
      n.id = z * per_zone + l;
      n.zone = z;
      const double x = rng.uniform_real(static_cast<double>(z) * strip_w,
                                        static_cast<double>(z + 1) * strip_w);
      const double y = rng.uniform_real(0.0, params.area_h_m);
      n.position = Point{x, y};
      const McuSpec& mcu =
          kMcuFleet[(kControlMcu + static_cast<std::size_t>(l)) % kMcuFleetSize];
      n.mcu_capacity_mhz = mcu.mhz;
      n.ram_capacity_kb = mcu.ram_kb;
      n.idle_cpu_mw = mcu.idle_mw;
      n.max_cpu_mw = mcu.max_mw;
      n.idle_net_mw = params.coeffs.idle_net_mw;
      n.link_capacity_kbps = params.coeffs.capacity_kbps;
      std::vector<int> fns;
      fns.push_back(0 + (2 * l) % s);
      fns.push_back(0 + (2 * l + 1) % s);
      fns.push_back(s + 1 + (2 * l) % a);
      fns.push_back(s + 1 + (2 * l + 1) % a);
      if (&mcu == &kMcuFleet[kControlMcu]) fns.push_back(control_fn);
      std::sort(fns.begin(), fns.end());
      fns.erase(std::unique(fns.begin(), fns.end()), fns.end());
      n.functions = std::move(fns);
      net.nodes.push_back(std::move(n));
    }
  }

  // pairwise distances, ascending; the radio range is the prefix whose link
  // count is closest to the target
  struct PairDist {
    double d;
    int a, b;
  };
  std::vector<PairDist> pairs;
  for (std::size_t i = 0; i < net.nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < net.nodes.size(); ++j) {
      const double dx = net.nodes[i].position->x - net.nodes[j].position->x;
      const double dy = net.nodes[i].position->y - net.nodes[j].position->y;
      pairs.push_back({std::sqrt(dx * dx + dy * dy), net.nodes[i].id, net.nodes[j].id});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const PairDist& l, const PairDist& r) {
    if (l.d != r.d) return l.d < r.d;
    return std::pair{l.a, l.b} < std::pair{r.a, r.b};
  });
  std::size_t best_count = 0;
  int best_gap = std::numeric_limits<int>::max();
  for (std::size_t count = 0; count <= pairs.size(); ++count) {
    // only prefixes at distinct-distance boundaries are realisable ranges
    if (count < pairs.size() && count > 0 && pairs[count].d == pairs[count - 1].d) continue;
    const int gap = std::abs(static_cast<int>(count) - params.target_links);
    if (gap < best_gap) {
      best_gap = gap;
      best_count = count;
    }
  }

  auto add_link = [&](int ia, int ib, double d) {
    WirelessLink l;
    l.a = std::min(ia, ib);
    l.b = std::max(ia, ib);
    l.dist_m = d;
    l.e_pbt_mw_per_kbps = params.coeffs.e_pbt_mw_per_kbps;
    l.f_tr_mw_per_kbps_m2 = params.coeffs.f_tr_mw_per_kbps_m2;
    net.links.push_back(l);
  };
  for (std::size_t i = 0; i < best_count; ++i) add_link(pairs[i].a, pairs[i].b, pairs[i].d);

  // connect leftover components with the shortest cross-component pairs
  std::map<int, int> parent;
  for (const auto& n : net.nodes) parent[n.id] = n.id;
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& l : net.links) parent[find(l.a)] = find(l.b);
  while (true) {
    std::set<int> roots;
    for (const auto& n : net.nodes) roots.insert(find(n.id));
    if (roots.size() <= 1) break;
    const PairDist* best = nullptr;
    for (const auto& p : pairs) {
      if (find(p.a) == find(p.b)) continue;
      best = &p;
      break;  // pairs are distance-sorted
    }
    if (!best) throw GenerationError("generate_building: cannot connect the mesh");
    add_link(best->a, best->b, best->d);
    parent[find(best->a)] = find(best->b);
  }

  std::sort(net.links.begin(), net.links.end(), [](const WirelessLink& l, const WirelessLink& r) {
    return std::pair{l.a, l.b} < std::pair{r.a, r.b};
  });
  net.achieved_links = static_cast<int>(net.links.size());
  net.rebuild_index();

  // every zone must end up covering the whole function set
  for (int z = 0; z < params.zones; ++z) {
    std::set<int> covered;
    for (const auto& n : net.nodes)
      if (n.zone == z) covered.insert(n.functions.begin(), n.functions.end());
    if (covered.size() != net.functions.size())
      throw GenerationError("generate_building: zone " + std::to_string(z) +
                            " does not cover every function");
  }
  return net;
}

struct WorkloadParams {
  int first_bp_id = 0;
  int mcu_lo_mhz = 4;
  int mcu_hi_mhz = 30;
  int ram_lo_kb = 1;
  int ram_hi_kb = 8;
  int traffic_lo_kbps = 50;
  int traffic_hi_kbps = 200;
  // registries; the defaults match the default building layout
  std::vector<int> zones = {0, 1, 2, 3, 4};
  std::vector<int> sensing_fns = {0, 1, 2, 3};
  int control_fn = 4;
  std::vector<int> actuating_fns = {5, 6, 7, 8};

  static WorkloadParams from_network(const PhysicalNetwork& net) {
    WorkloadParams p;
    p.zones = net.zones;
    p.sensing_fns.clear();
    p.actuating_fns.clear();
    for (const auto& f : net.functions) {
      switch (f.kind) {
        case FunctionKind::Sensing: p.sensing_fns.push_back(f.id); break;
        case FunctionKind::Control: p.control_fn = f.id; break;
        case FunctionKind::Actuating: p.actuating_fns.push_back(f.id); break;
      }
    }
    return p;
  }
};

// Three-vnode chains sensor -> controller -> actuator. The sensor pins a
// random zone; the actuator pins the same zone (SameZone) or a different one
// (CrossZone); the controller may go anywhere. Demands are drawn uniformly:
// MCU 4..30 MHz and traffic 50..200 kbps by default (1 kb packets, so kbps
// and packets/s coincide).
inline std::vector<BusinessProcess> generate_bps(std::uint64_t seed, int count,
                                                 ZoneMode zone_mode,
                                                 const WorkloadParams& params = {}) {
  if (count < 1) throw GenerationError("generate_bps: count must be >= 1");
  if (params.zones.empty() || params.sensing_fns.empty() || params.actuating_fns.empty())
    throw GenerationError("generate_bps: empty registry");
  if (zone_mode == ZoneMode::CrossZone && params.zones.size() < 2)
    throw GenerationError("generate_bps: cross-zone needs at least two zones");

  Rng rng(seed);
  std::vector<BusinessProcess> bps;
  for (int i = 0; i < count; ++i) {
    BusinessProcess bp;
    bp.id = params.first_bp_id + i;
    const int z1 = params.zones[rng.pick(params.zones.size())];
    int z2 = z1;
    if (zone_mode == ZoneMode::CrossZone) {
      std::vector<int> others;
      for (int z : params.zones)
        if (z != z1) others.push_back(z);
      z2 = others[rng.pick(others.size())];
    }

    VirtualNode sensor;
    sensor.id = 0;
    sensor.role = Role::Sensor;
    sensor.required_function = params.sensing_fns[rng.pick(params.sensing_fns.size())];
    sensor.required_zone = z1;
    sensor.mcu_demand_mhz = static_cast<double>(rng.uniform_int(params.mcu_lo_mhz, params.mcu_hi_mhz));
    sensor.ram_demand_kb = static_cast<double>(rng.uniform_int(params.ram_lo_kb, params.ram_hi_kb));

    VirtualNode controller;
    controller.id = 1;
    controller.role = Role::Controller;
    controller.required_function = params.control_fn;
    controller.required_zone = std::nullopt;
    controller.mcu_demand_mhz =
        static_cast<double>(rng.uniform_int(params.mcu_lo_mhz, params.mcu_hi_mhz));
    controller.ram_demand_kb =
        static_cast<double>(rng.uniform_int(params.ram_lo_kb, params.ram_hi_kb));

    VirtualNode actuator;
    actuator.id = 2;
    actuator.role = Role::Actuator;
    actuator.required_function = params.actuating_fns[rng.pick(params.actuating_fns.size())];
    actuator.required_zone = z2;
    actuator.mcu_demand_mhz =
        static_cast<double>(rng.uniform_int(params.mcu_lo_mhz, params.mcu_hi_mhz));
    actuator.ram_demand_kb =
        static_cast<double>(rng.uniform_int(params.ram_lo_kb, params.ram_hi_kb));

    bp.vnodes = {sensor, controller, actuator};
    bp.vlinks = {{0, 1,
                  static_cast<double>(rng.uniform_int(params.traffic_lo_kbps, params.traffic_hi_kbps))},
                 {1, 2,
                  static_cast<double>(rng.uniform_int(params.traffic_lo_kbps, params.traffic_hi_kbps))}};
    bps.push_back(std::move(bp));
  }
  return bps;
}

}  // namespace iotembed
