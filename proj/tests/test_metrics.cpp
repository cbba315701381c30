// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include "iotembed/metrics.hpp"
#include "iotembed/rng.hpp"
#include "test_util.hpp"

using namespace iotembed;
using testutil::NetBuilder;

namespace {

PhysicalNetwork msp430f1_pair() {
  // two MSP430F1 nodes (8 MHz, idle 1 mW, max 8 mW), one 100 m link
  return NetBuilder{}
      .node(0, 0, 8, 1, 8, 64)
      .node(1, 0, 8, 1, 8, 64)
      .link(0, 1, 100)
      .build();
}

BusinessProcess one_vnode_bp(int id, double mcu) {
  BusinessProcess bp;
  bp.id = id;
  bp.vnodes = {{0, Role::Controller, 4, std::nullopt, mcu, 1}};
  return bp;
}

}  // namespace

TEST_CASE("processing power: one 4 MHz vnode on an MSP430F1 draws 5 mW") {
  const auto net = msp430f1_pair();
  const auto bp = one_vnode_bp(0, 4);
  Assignment a{{{0, 0}, 0}};
  const auto r = processing_power(net, a, {bp});
  CHECK(r.total_mw == 5.0);  // 1 + 8 * (4/8)
  CHECK(r.active == std::set<int>{0});
}

TEST_CASE("processing power: empty assignment draws nothing") {
  const auto net = msp430f1_pair();
  const auto r = processing_power(net, {}, {});
  CHECK(r.total_mw == 0.0);
  CHECK(r.active.empty());
}

TEST_CASE("processing power: idle counted once per active node") {
  const auto net = msp430f1_pair();
  const auto bp0 = one_vnode_bp(0, 4);
  const auto bp1 = one_vnode_bp(1, 4);
  Assignment a{{{0, 0}, 0}, {{1, 0}, 0}};
  const auto r = processing_power(net, a, {bp0, bp1});
  CHECK(r.total_mw == 9.0);  // 1 + 4 + 4
}

TEST_CASE("network power: 100 kbps over a 100 m link with default coefficients") {
  const auto net = msp430f1_pair();
  LinkLoadMap loads{{{0, 1}, 100.0}};
  const auto r = network_power(net, loads);
  // 2*20 idle + 100*2*0.2 electronics + 100*100^2*1.3e-5 amplifier
  CHECK(r.total_mw == Catch::Approx(93.0).epsilon(1e-12));
  CHECK(r.active == std::set<int>{0, 1});
}

TEST_CASE("network power: no traffic, no power") {
  const auto net = msp430f1_pair();
  const auto r = network_power(net, {});
  CHECK(r.total_mw == 0.0);
  CHECK(r.active.empty());
}

TEST_CASE("network power is linear in load when idle power is zero") {
  auto builder = NetBuilder{};
  builder.net.coeffs.idle_net_mw = 0.0;
  auto net = builder.node(0, 0).node(1, 0).node(2, 1).link(0, 1, 70).link(1, 2, 130).build();
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    LinkLoadMap loads{{{0, 1}, rng.uniform_real(1, 200)}, {{1, 2}, rng.uniform_real(1, 200)}};
    LinkLoadMap doubled;
    for (const auto& [dl, v] : loads) doubled[dl] = 2 * v;
    const double a = network_power(net, loads).total_mw;
    const double b = network_power(net, doubled).total_mw;
    CHECK(b == Catch::Approx(2 * a).epsilon(1e-12));
  }
}

TEST_CASE("latency table entries follow the closed form") {
  const auto t = build_latency_table(250, 1, 10);
  REQUIRE(t.entries.size() == 24);  // 10 .. 240
  CHECK(t.entries[14].arrival_kbps == 150.0);
  CHECK(t.entries[14].latency_ms == Catch::Approx(10.0).epsilon(1e-12));  // 1000/(250-150)
  CHECK(t.entries[0].arrival_kbps == 10.0);
  CHECK(t.entries[0].latency_ms == Catch::Approx(1000.0 / 240.0).epsilon(1e-12));
  for (std::size_t i = 0; i + 1 < t.entries.size(); ++i) {
    CHECK(t.entries[i].arrival_kbps < t.entries[i + 1].arrival_kbps);
    CHECK(t.entries[i].latency_ms < t.entries[i + 1].latency_ms);
  }
}

TEST_CASE("latency table rejects bad steps") {
  CHECK_THROWS_AS(build_latency_table(250, 1, 250), InvalidStepError);
  CHECK_THROWS_AS(build_latency_table(250, 1, 0), InvalidStepError);
  CHECK_THROWS_AS(build_latency_table(250, 1, 13), InvalidStepError);  // does not divide
}

TEST_CASE("table lookup is conservative and at most one grid step off") {
  const auto t = build_latency_table(250, 1, 10);
  const double mu = 250;
  Rng rng(77);
  for (int i = 0; i < 1000; ++i) {
    const double lambda = rng.uniform_real(1e-6, t.max_arrival_kbps());
    const auto w = t.lookup(lambda);
    REQUIRE(w.has_value());
    const double closed = 1000.0 / (mu - lambda);
    CHECK(*w >= closed);
    const double bound = 1000.0 / (mu - lambda - t.step_kbps) - closed;
    CHECK(*w - closed <= bound + 1e-9);
  }
}

TEST_CASE("per-node latency: grid hit, idle network, saturation") {
  const auto net = NetBuilder{}.node(0, 0).node(1, 0).link(0, 1, 50).build();
  const auto t = build_latency_table(250, 1, 10);

  RoutingPlan plan;
  plan.add_route({0, 0}, Path{{0, 1}}, 150.0);
  const auto lat = total_latency(net, plan, t);
  CHECK(lat.total_ms == Catch::Approx(10.0).epsilon(1e-12));
  REQUIRE(lat.per_node_ms.count(1) == 1);
  CHECK(lat.per_node_ms.at(1) == Catch::Approx(10.0).epsilon(1e-12));

  CHECK(total_latency(net, {}, t).total_ms == 0.0);

  RoutingPlan saturated;
  saturated.add_route({0, 0}, Path{{0, 1}}, 250.0);
  CHECK_THROWS_AS(total_latency(net, saturated, t), SaturationError);
}

TEST_CASE("arrival rates sum incoming link loads") {
  const auto net =
      NetBuilder{}.node(0, 0).node(1, 0).node(2, 0).node(3, 1).link(0, 1, 10).link(1, 2, 10).link(0, 3, 10).link(2, 3, 10).build();
  RoutingPlan plan;
  plan.add_route({0, 0}, Path{{0, 1, 2}}, 100.0);
  auto arr = node_arrival_rates(net, plan);
  CHECK(arr[1] == 100.0);
  CHECK(arr[2] == 100.0);
  CHECK(arr.count(0) == 0);

  plan.add_route({1, 0}, Path{{0, 3}}, 60.0);
  plan.add_route({1, 1}, Path{{2, 3}}, 60.0);
  arr = node_arrival_rates(net, plan);
  CHECK(arr[3] == 120.0);
}

TEST_CASE("weighted objective arithmetic") {
  MetricsReport m;
  m.tl_ms = 10;
  m.tnp_mw = 93;
  m.tpp_mw = 5;
  CHECK(weighted_objective(m, 30, 1, 1) == 398.0);
  CHECK(weighted_objective(MetricsReport{}, 30, 1, 1) == 0.0);
  CHECK(weighted_objective(m, 0, 0, 1) == m.tpp_mw);
  CHECK_THROWS_AS(weighted_objective(m, -1, 1, 1), Error);
}

TEST_CASE("optimality ratio") {
  CHECK(optimality_ratio(36.4, 40.0) == Catch::Approx(0.91).epsilon(1e-12));
  CHECK(optimality_ratio(40.0, 40.0) == 1.0);
  CHECK_THROWS_AS(optimality_ratio(1.0, 0.0), UndefinedBaselineError);
}

TEST_CASE("tpp never decreases when another vnode is embedded") {
  const auto net = generate_building(21);
  Rng rng(22);
  Assignment a;
  std::vector<BusinessProcess> bps;
  double prev = 0.0;
  for (int i = 0; i < 12; ++i) {
    BusinessProcess bp;
    bp.id = i;
    bp.vnodes = {{0, Role::Other, static_cast<int>(rng.uniform_int(0, 8)), std::nullopt,
                  static_cast<double>(rng.uniform_int(1, 8)), 1}};
    bps.push_back(bp);
    a[{i, 0}] = static_cast<int>(rng.uniform_int(0, 29));
    const double now = processing_power(net, a, bps).total_mw;
    CHECK(now >= prev);
    prev = now;
  }
}

TEST_CASE("tnp never decreases when a link load grows") {
  const auto net = generate_building(23);
  Rng rng(24);
  LinkLoadMap loads;
  for (int i = 0; i < 10; ++i) {
    const auto& l = net.links[rng.pick(net.links.size())];
    loads[{l.a, l.b}] += rng.uniform_real(1, 40);
    const double before = network_power(net, loads).total_mw;
    loads[{l.a, l.b}] += rng.uniform_real(0, 20);
    const double after = network_power(net, loads).total_mw;
    CHECK(after >= before);
  }
}

TEST_CASE("a fully collocated BP adds no traffic and no network power") {
  const auto net = msp430f1_pair();
  const auto t = build_latency_table(250, 1, 10);
  auto bp = testutil::chain_bp(0, 0, 0, 5, 0);
  Assignment a{{{0, 0}, 0}, {{0, 1}, 0}, {{0, 2}, 0}};
  RoutingPlan plan;
  plan.add_route({0, 0}, Path{}, bp.vlinks[0].traffic_kbps);
  plan.add_route({0, 1}, Path{}, bp.vlinks[1].traffic_kbps);
  const auto m = evaluate_solution(net, {bp}, a, plan, t);
  CHECK(m.tnp_mw == 0.0);
  CHECK(m.tl_ms == 0.0);
  CHECK(m.per_node_arrival_kbps.empty());
  CHECK(m.tpp_mw > 0.0);
}

TEST_CASE("evaluation is deterministic bit for bit") {
  const auto tc = testutil::tiny_case(31, 2, ZoneMode::SameZone);
  const auto t = table_for(tc.net);
  Assignment a;
  RoutingPlan plan;
  // place everything on one all-function node per zone pair via chain hosts
  for (const auto& bp : tc.bps)
    for (const auto& vn : bp.vnodes)
      for (const auto& n : tc.net.nodes)
        if (n.provides(vn.required_function) &&
            (!vn.required_zone || n.zone == *vn.required_zone)) {
          a[{bp.id, vn.id}] = n.id;
          break;
        }
  const auto r1 = evaluate_solution(tc.net, tc.bps, a, plan, t);
  const auto r2 = evaluate_solution(tc.net, tc.bps, a, plan, t);
  CHECK(r1 == r2);
  CHECK(r1.tpp_mw == r2.tpp_mw);
}
