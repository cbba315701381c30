// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "iotembed/errors.hpp"

namespace iotembed {

// Instance-wide knobs. The per-node / per-link power fields below are copied
// from here at load/generation time, so hand-built instances may also set
// them per entity.
struct Coefficients {
  double e_pbt_mw_per_kbps = 0.2;
  double f_tr_mw_per_kbps_m2 = 1.3e-5;
  double idle_net_mw = 20.0;
  double capacity_kbps = 250.0;
  double packet_kb = 1.0;
  double table_step_kbps = 10.0;
  double alpha = 30.0;
  double beta = 1.0;
  double gamma = 1.0;

  friend bool operator==(const Coefficients&, const Coefficients&) = default;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

enum class FunctionKind { Sensing, Control, Actuating };

struct FunctionInfo {
  int id = 0;
  std::string name;
  FunctionKind kind = FunctionKind::Sensing;
  friend bool operator==(const FunctionInfo&, const FunctionInfo&) = default;
};

struct IoTNode {
  int id = 0;
  int zone = 0;
  std::optional<Point> position;   // may be absent in synthetic instances
  double mcu_capacity_mhz = 0.0;   // processing capability
  double ram_capacity_kb = 0.0;    // memory capability
  double idle_cpu_mw = 0.0;
  double max_cpu_mw = 0.0;
  double idle_net_mw = 0.0;
  double link_capacity_kbps = 0.0; // shared transmission capacity of the node
  std::vector<int> functions;      // sorted ascending

  bool provides(int fn) const {
    return std::binary_search(functions.begin(), functions.end(), fn);
  }

  friend bool operator==(const IoTNode&, const IoTNode&) = default;
};

struct WirelessLink {
  int a = 0;
  int b = 0;
  double dist_m = 0.0;
  double e_pbt_mw_per_kbps = 0.0;   // Tx/Rx electronics energy per kbps
  double f_tr_mw_per_kbps_m2 = 0.0; // transmit amplifier factor

  // Power drawn per kbps crossing this link in either direction:
  // electronics on both ends plus the free-space amplifier term.
  double cost_per_kbps() const {
    return 2.0 * e_pbt_mw_per_kbps + dist_m * dist_m * f_tr_mw_per_kbps_m2;
  }

  friend bool operator==(const WirelessLink&, const WirelessLink&) = default;
};

struct PhysicalNetwork {
  std::vector<IoTNode> nodes;
  std::vector<WirelessLink> links;
  std::vector<int> zones;              // zone registry
  std::vector<FunctionInfo> functions; // function registry
  double area_w_m = 0.0;
  double area_h_m = 0.0;
  Coefficients coeffs;
  std::uint64_t seed = 0;   // meta
  int achieved_links = 0;   // meta

  friend bool operator==(const PhysicalNetwork& l, const PhysicalNetwork& r) {
    return l.nodes == r.nodes && l.links == r.links && l.zones == r.zones &&
           l.functions == r.functions && l.area_w_m == r.area_w_m &&
           l.area_h_m == r.area_h_m && l.coeffs == r.coeffs && l.seed == r.seed &&
           l.achieved_links == r.achieved_links;
  }

  // Rebuild the adjacency index. Call once after filling nodes/links; all
  // lookup helpers below require it.
  void rebuild_index() {
    id_to_idx_.clear();
    adj_.clear();
    link_by_pair_.clear();
    for (std::size_t i = 0; i < nodes.size(); ++i) id_to_idx_[nodes[i].id] = i;
    for (std::size_t i = 0; i < links.size(); ++i) {
      const auto& l = links[i];
      adj_[l.a].push_back(l.b);
      adj_[l.b].push_back(l.a);
      link_by_pair_[ordered(l.a, l.b)] = i;
    }
    for (auto& [id, nbrs] : adj_) {
      std::sort(nbrs.begin(), nbrs.end());
      nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    }
  }

  bool has_node(int id) const { return id_to_idx_.count(id) > 0; }

  const IoTNode& node(int id) const {
    auto it = id_to_idx_.find(id);
    if (it == id_to_idx_.end()) throw Error("unknown node id " + std::to_string(id));
    return nodes[it->second];
  }

  std::size_t node_index(int id) const {
    auto it = id_to_idx_.find(id);
    if (it == id_to_idx_.end()) throw Error("unknown node id " + std::to_string(id));
    return it->second;
  }

  std::span<const int> neighbors(int id) const {
    auto it = adj_.find(id);
    if (it == adj_.end()) return {};
    return it->second;
  }

  const WirelessLink* find_link(int a, int b) const {
    auto it = link_by_pair_.find(ordered(a, b));
    return it == link_by_pair_.end() ? nullptr : &links[it->second];
  }

 private:
  static std::pair<int, int> ordered(int a, int b) {
    return a < b ? std::pair{a, b} : std::pair{b, a};
  }
  std::unordered_map<int, std::size_t> id_to_idx_;
  std::map<int, std::vector<int>> adj_;
  std::map<std::pair<int, int>, std::size_t> link_by_pair_;
};

enum class Role { Sensor, Controller, Actuator, Other };

struct VirtualNode {
  int id = 0;
  Role role = Role::Other;
  int required_function = 0;
  std::optional<int> required_zone;  // nullopt = any zone
  double mcu_demand_mhz = 0.0;
  double ram_demand_kb = 0.0;
  friend bool operator==(const VirtualNode&, const VirtualNode&) = default;
};

struct VirtualLink {
  int a = 0;
  int b = 0;
  double traffic_kbps = 0.0;
  friend bool operator==(const VirtualLink&, const VirtualLink&) = default;
};

struct BusinessProcess {
  int id = 0;
  std::vector<VirtualNode> vnodes;
  std::vector<VirtualLink> vlinks;

  const VirtualNode* find_vnode(int vid) const {
    for (const auto& v : vnodes)
      if (v.id == vid) return &v;
    return nullptr;
  }

  friend bool operator==(const BusinessProcess&, const BusinessProcess&) = default;
};

// Workload metadata: where a BP's sensor/actuator zones are drawn from.
enum class ZoneMode { SameZone, CrossZone };

// (bp id, vnode id) key of an embedded virtual node.
struct VnodeRef {
  int bp = 0;
  int vnode = 0;
  auto operator<=>(const VnodeRef&) const = default;
};

// Virtual-node -> IoT-node mapping.
using Assignment = std::map<VnodeRef, int>;

struct DirectedLink {
  int from = 0;
  int to = 0;
  auto operator<=>(const DirectedLink&) const = default;
};

using LinkLoadMap = std::map<DirectedLink, double>;

namespace detail {

inline bool exceeds(double measured, double allowed) {
  return measured > allowed + 1e-9;
}

inline void append(std::vector<std::string>& out, const std::string& msg) {
  out.push_back(msg);
}

}  // namespace detail

// Structural validation of an instance. Violations are data, not failures:
// the list is empty iff every invariant holds, and is stable for identical
// inputs (nodes by id, links in declaration order, BPs by id).
inline std::vector<std::string> validate_instance(const PhysicalNetwork& net,
                                                  const std::vector<BusinessProcess>& bps) {
  std::vector<std::string> out;
  const std::set<int> zone_set(net.zones.begin(), net.zones.end());
  std::set<int> fn_set;
  for (const auto& f : net.functions) fn_set.insert(f.id);

  std::vector<const IoTNode*> by_id;
  for (const auto& n : net.nodes) by_id.push_back(&n);
  std::sort(by_id.begin(), by_id.end(),
            [](const IoTNode* l, const IoTNode* r) { return l->id < r->id; });

  std::set<int> seen_ids;
  for (const IoTNode* np : by_id) {
    const auto& n = *np;
    const std::string who = "node " + std::to_string(n.id);
    if (!seen_ids.insert(n.id).second) detail::append(out, who + ": duplicate node id");
    if (!(n.mcu_capacity_mhz > 0)) detail::append(out, who + ": mcu_capacity must be > 0");
    if (!(n.ram_capacity_kb > 0)) detail::append(out, who + ": ram_capacity must be > 0");
    if (!(n.link_capacity_kbps > 0)) detail::append(out, who + ": link_capacity must be > 0");
    if (n.idle_cpu_mw < 0 || n.idle_cpu_mw > n.max_cpu_mw)
      detail::append(out, who + ": idle_cpu_power must satisfy 0 <= idle <= max");
    if (n.position && net.area_w_m > 0 && net.area_h_m > 0) {
      if (n.position->x < 0 || n.position->x > net.area_w_m || n.position->y < 0 ||
          n.position->y > net.area_h_m)
        detail::append(out, who + ": position outside declared area");
    }
    if (!zone_set.count(n.zone))
      detail::append(out, who + ": zone " + std::to_string(n.zone) + " not in registry");
    for (int f : n.functions)
      if (!fn_set.count(f))
        detail::append(out, who + ": function " + std::to_string(f) + " not in registry");
  }

  std::set<std::pair<int, int>> seen_links;
  for (std::size_t i = 0; i < net.links.size(); ++i) {
    const auto& l = net.links[i];
    const std::string who =
        "link (" + std::to_string(l.a) + "," + std::to_string(l.b) + ")";
    const IoTNode* na = nullptr;
    const IoTNode* nb = nullptr;
    for (const auto& n : net.nodes) {
      if (n.id == l.a) na = &n;
      if (n.id == l.b) nb = &n;
    }
    if (l.a == l.b) detail::append(out, who + ": endpoints must be distinct");
    if (!na || !nb) {
      detail::append(out, who + ": endpoint not a declared node");
      continue;
    }
    auto key = l.a < l.b ? std::pair{l.a, l.b} : std::pair{l.b, l.a};
    if (!seen_links.insert(key).second) detail::append(out, who + ": duplicate link");
    if (l.e_pbt_mw_per_kbps < 0) detail::append(out, who + ": energy_per_bit must be >= 0");
    if (l.f_tr_mw_per_kbps_m2 < 0) detail::append(out, who + ": amp_factor must be >= 0");
    if (na->position && nb->position) {
      const double dx = na->position->x - nb->position->x;
      const double dy = na->position->y - nb->position->y;
      const double geo = std::sqrt(dx * dx + dy * dy);
      const double tol = 1e-9 * std::max({1.0, geo, l.dist_m});
      if (std::abs(geo - l.dist_m) > tol)
        detail::append(out, who + ": declared distance " + std::to_string(l.dist_m) +
                                " m disagrees with positions (" + std::to_string(geo) + " m)");
    }
  }

  // Connectivity over the declared links (union-find on node ids).
  if (!net.nodes.empty()) {
    std::map<int, int> parent;
    for (const auto& n : net.nodes) parent[n.id] = n.id;
    std::function<int(int)> find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& l : net.links) {
      if (parent.count(l.a) && parent.count(l.b)) parent[find(l.a)] = find(l.b);
    }
    std::set<int> roots;
    for (const auto& n : net.nodes) roots.insert(find(n.id));
    if (roots.size() > 1)
      detail::append(out, "network: graph is disconnected (" +
                              std::to_string(roots.size()) + " components)");
  }

  std::vector<const BusinessProcess*> bps_by_id;
  for (const auto& b : bps) bps_by_id.push_back(&b);
  std::sort(bps_by_id.begin(), bps_by_id.end(),
            [](const BusinessProcess* l, const BusinessProcess* r) { return l->id < r->id; });
  std::set<int> seen_bp;
  for (const BusinessProcess* bp : bps_by_id) {
    const std::string who = "bp " + std::to_string(bp->id);
    if (!seen_bp.insert(bp->id).second) detail::append(out, who + ": duplicate bp id");
    std::set<int> vids;
    for (const auto& v : bp->vnodes) {
      const std::string vwho = who + " vnode " + std::to_string(v.id);
      if (!vids.insert(v.id).second) detail::append(out, vwho + ": duplicate vnode id");
      if (!(v.mcu_demand_mhz > 0)) detail::append(out, vwho + ": mcu_demand must be > 0");
      if (v.ram_demand_kb < 0) detail::append(out, vwho + ": ram_demand must be >= 0");
      if (!fn_set.count(v.required_function))
        detail::append(out, vwho + ": required function " +
                                std::to_string(v.required_function) + " not in registry");
      if (v.required_zone && !zone_set.count(*v.required_zone))
        detail::append(out, vwho + ": required zone " + std::to_string(*v.required_zone) +
                                " not in registry");
    }
    for (std::size_t i = 0; i < bp->vlinks.size(); ++i) {
      const auto& vl = bp->vlinks[i];
      const std::string lwho = who + " vlink " + std::to_string(i);
      if (vl.a == vl.b) detail::append(out, lwho + ": endpoints must be distinct");
      if (!vids.count(vl.a) || !vids.count(vl.b))
        detail::append(out, lwho + ": endpoint not a vnode of this bp");
      if (!(vl.traffic_kbps > 0)) detail::append(out, lwho + ": traffic must be > 0");
    }
  }
  return out;
}

}  // namespace iotembed
