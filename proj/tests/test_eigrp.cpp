#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <vector>

#include "routesim/eigrp.hpp"
#include "routesim/kernel.hpp"

using namespace routesim;

namespace {

NeighborReport rep(Cost rd, Cost link) {
  NeighborReport r;
  r.reported_distance = rd;
  r.link_metric = link;
  return r;
}

Kernel::EngineFactory eigrp_factory() {
  return [](NodeId id, std::vector<InterfaceInfo> ifs) {
    return std::make_unique<EigrpEngine>(id, std::move(ifs));
  };
}

}  // namespace

// ============================================================================
// Composite metric
// ============================================================================

TEST_CASE("composite metric combines inverse bandwidth and tenths of delay") {
  // 10 Mbps, 105 us: 256 * (1e7/1e4 + 105/10) = 256 * 1010.
  CHECK(eigrp_composite_metric(10'000'000, 105) == 258'560);
  // 100 Mbps, 105 us: 256 * (100 + 10).
  CHECK(eigrp_composite_metric(100'000'000, 105) == 28'160);
  // Integer floors: 9 us of delay contributes nothing.
  CHECK(eigrp_composite_metric(10'000'000, 9) == 256'000);
  CHECK(eigrp_composite_metric(1'000, 0) == 2'560'000'000LL);
  CHECK_THROWS_AS(eigrp_composite_metric(999, 10), std::invalid_argument);
  CHECK_THROWS_AS(eigrp_composite_metric(0, 10), std::invalid_argument);
}

TEST_CASE("faster links always cost less at equal delay") {
  Cost prev = eigrp_composite_metric(64'000, 105);
  for (std::int64_t bw : {1'544'000, 10'000'000, 45'000'000, 100'000'000,
                          1'000'000'000}) {
    Cost cur = eigrp_composite_metric(bw, 105);
    CHECK(cur < prev);
    prev = cur;
  }
}

// ============================================================================
// Feasibility and local computation
// ============================================================================

TEST_CASE("feasibility is a strict comparison against the historical floor") {
  DualTopologyEntry e;
  e.feasible_distance = 40;
  e.reported[2] = rep(39, 10);
  e.reported[3] = rep(40, 1);
  CHECK(dual_feasibility_check(e, 2));
  CHECK_FALSE(dual_feasibility_check(e, 3));  // equal is not feasible
  CHECK_THROWS_AS(dual_feasibility_check(e, 9), std::invalid_argument);
}

TEST_CASE("computed distance saturates at the unreachable sentinel") {
  CHECK(dual_computed_distance(rep(30, 12)) == 42);
  CHECK(dual_computed_distance(rep(kEigrpInfinity, 12)) == kEigrpInfinity);
}

TEST_CASE("local computation installs the best feasible neighbor") {
  DualTopologyEntry e;
  e.feasible_distance = 100;
  e.state = DualState::Passive;
  e.reported[2] = rep(90, 50);   // feasible, computed 140
  e.reported[3] = rep(60, 30);   // feasible, computed 90
  e.reported[4] = rep(120, 1);   // infeasible

  auto out = dual_route_computation(e, {2, 3, 4});
  CHECK(out.action == DualOutcome::Install);
  CHECK(e.successor == NodeId{3});
  CHECK(e.feasible_distance == 90);  // lowered to the new computed distance
  CHECK(e.state == DualState::Passive);
}

TEST_CASE("the feasible distance floor never rises while passive") {
  DualTopologyEntry e;
  e.feasible_distance = 50;
  e.state = DualState::Passive;
  e.reported[2] = rep(40, 60);  // feasible, computed 100 > floor

  auto out = dual_route_computation(e, {2});
  CHECK(out.action == DualOutcome::Install);
  CHECK(e.successor == NodeId{2});
  CHECK(e.feasible_distance == 50);  // min(50, 100): unchanged

  e.reported[2] = rep(10, 60);  // better news: computed 70
  dual_route_computation(e, {2});
  CHECK(e.feasible_distance == 50);  // min(50, 70): still the floor
  e.reported[3] = rep(20, 10);  // computed 30
  dual_route_computation(e, {2, 3});
  CHECK(e.feasible_distance == 30);
  CHECK(e.successor == NodeId{3});
}

TEST_CASE("equal computed distances break ties toward the lower id") {
  DualTopologyEntry e;
  e.feasible_distance = 100;
  e.state = DualState::Passive;
  e.reported[7] = rep(50, 25);
  e.reported[4] = rep(45, 30);  // same computed 75
  dual_route_computation(e, {4, 7});
  CHECK(e.successor == NodeId{4});
}

TEST_CASE("no feasible successor diffuses a query to everyone but the "
          "instigator") {
  DualTopologyEntry e;
  e.feasible_distance = 10;
  e.state = DualState::Passive;
  e.reported[2] = rep(50, 5);
  e.reported[3] = rep(60, 5);

  auto out = dual_route_computation(e, {2, 3, 4}, /*exclude=*/NodeId{3});
  CHECK(out.action == DualOutcome::StartDiffusing);
  CHECK(out.query_targets == std::set<NodeId>{2, 4});
  CHECK(e.state == DualState::Active);
  CHECK(e.outstanding_replies == std::set<NodeId>{2, 4});

  CHECK_THROWS_AS(dual_route_computation(e, {2}), std::logic_error);
}

TEST_CASE("with no one to ask the destination is simply unreachable") {
  DualTopologyEntry e;
  e.feasible_distance = 10;
  e.state = DualState::Passive;
  e.reported[2] = rep(kEigrpInfinity, 5);

  auto out = dual_route_computation(e, {});
  CHECK(out.action == DualOutcome::Unreachable);
  CHECK_FALSE(e.successor.has_value());
  CHECK(e.feasible_distance == kEigrpInfinity);
  CHECK(e.state == DualState::Passive);
}

// ============================================================================
// Diffusion bookkeeping
// ============================================================================

TEST_CASE("replies retire outstanding neighbors; the last one finalizes") {
  DualTopologyEntry e;
  e.feasible_distance = 10;
  e.state = DualState::Active;
  e.outstanding_replies = {2, 3};
  e.reported[2] = rep(50, 5);
  e.reported[3] = rep(60, 5);

  auto r = dual_process_reply(e, 2, 40);
  CHECK_FALSE(r.became_passive);
  CHECK(e.state == DualState::Active);
  CHECK(e.outstanding_replies == std::set<NodeId>{3});

  r = dual_process_reply(e, 3, 100);
  CHECK(r.became_passive);
  CHECK(e.state == DualState::Passive);
  // Fresh floor: min computed distance 40+5.
  CHECK(e.feasible_distance == 45);
  CHECK(e.successor == NodeId{2});
}

TEST_CASE("a reply of unreachable from everyone clears the route") {
  DualTopologyEntry e;
  e.feasible_distance = 10;
  e.state = DualState::Active;
  e.outstanding_replies = {2};
  e.reported[2] = rep(50, 5);

  auto r = dual_process_reply(e, 2, kEigrpInfinity);
  CHECK(r.became_passive);
  CHECK_FALSE(e.successor.has_value());
  CHECK(e.feasible_distance == kEigrpInfinity);
}

TEST_CASE("replies are rejected outside a diffusing computation") {
  DualTopologyEntry e;
  e.state = DualState::Passive;
  e.reported[2] = rep(50, 5);
  CHECK_THROWS_AS(dual_process_reply(e, 2, 40), std::logic_error);

  e.state = DualState::Active;
  e.outstanding_replies = {2};
  CHECK_THROWS_AS(dual_process_reply(e, 3, 40), std::logic_error);
}

TEST_CASE("finalize is a no-op while replies are still outstanding") {
  DualTopologyEntry e;
  e.state = DualState::Active;
  e.outstanding_replies = {2};
  e.reported[2] = rep(50, 5);
  CHECK_FALSE(dual_finalize_if_done(e));
  e.outstanding_replies.clear();
  CHECK(dual_finalize_if_done(e));
  CHECK(e.state == DualState::Passive);
  CHECK_FALSE(dual_finalize_if_done(e));  // already passive
}

// ============================================================================
// Engine on live topologies
// ============================================================================

TEST_CASE("distances add up hop by hop on a chain") {
  std::vector<KernelNode> nodes = {{1, NodeKind::Host, 0},
                                   {2, NodeKind::Host, 0},
                                   {11, NodeKind::Router, 0},
                                   {12, NodeKind::Router, 0}};
  std::vector<KernelLink> links = {{1, 11, 10'000'000, 5},
                                   {11, 12, 10'000'000, 5},
                                   {12, 2, 10'000'000, 5}};
  KernelOptions opt;
  opt.duration_s = 10;
  Kernel k(std::move(nodes), std::move(links), opt);
  k.install_engines(eigrp_factory());
  k.run();

  auto* r11 = dynamic_cast<EigrpEngine*>(k.engine(11));
  auto* r12 = dynamic_cast<EigrpEngine*>(k.engine(12));
  REQUIRE(r11);
  REQUIRE(r12);
  const Cost leg = 258'560;  // 10 Mbps, 5+100 us
  CHECK(r11->route_metric(1) == leg);
  CHECK(r12->route_metric(2) == leg);
  CHECK(r11->route_metric(2) == 2 * leg);
  CHECK(r12->route_metric(1) == 2 * leg);
  CHECK(r11->successor(2) == NodeId{12});
  CHECK(r11->successor(1) == NodeId{11});  // direct attachment
  CHECK_FALSE(r11->convergence_pending());
  CHECK(r11->stale_reply_count() == 0);
}

namespace {

// Hosts 1 and 2 on opposite corners of a router diamond.  The top path is
// fast (100 Mbps legs), the bottom slow (10 Mbps legs).
//
//        12 (fast)
//   11 <        > 14 - 2
//        13 (slow)
Kernel make_diamond(std::int64_t duration_s) {
  std::vector<KernelNode> nodes = {
      {1, NodeKind::Host, 0},    {2, NodeKind::Host, 0},
      {11, NodeKind::Router, 0}, {12, NodeKind::Router, 0},
      {13, NodeKind::Router, 0}, {14, NodeKind::Router, 0}};
  std::vector<KernelLink> links = {
      {1, 11, 10'000'000, 5},    // 0
      {11, 12, 100'000'000, 5},  // 1: fast upper leg
      {12, 14, 100'000'000, 5},  // 2: fast upper leg
      {11, 13, 10'000'000, 5},   // 3: slow lower leg
      {13, 14, 10'000'000, 5},   // 4: slow lower leg
      {14, 2, 10'000'000, 5}};   // 5
  KernelOptions opt;
  opt.duration_s = duration_s;
  Kernel k(std::move(nodes), std::move(links), opt);
  k.install_engines(eigrp_factory());
  return k;
}

constexpr Cost kSlow = 258'560;  // 10 Mbps leg
constexpr Cost kFast = 28'160;   // 100 Mbps leg

}  // namespace

TEST_CASE("the bandwidth-aware metric picks the fast path over fewer-hop "
          "parity") {
  Kernel k = make_diamond(15);
  k.run();
  auto* r11 = dynamic_cast<EigrpEngine*>(k.engine(11));
  REQUIRE(r11);
  // Fast: 2 fast legs + host leg.  Slow alternative: 2 slow legs + host leg.
  CHECK(r11->route_metric(2) == 2 * kFast + kSlow);
  CHECK(r11->successor(2) == NodeId{12});
  CHECK(r11->forwarding_table().at(2).next_hop == 12);
}

TEST_CASE("losing the successor diffuses, then installs the alternate") {
  Kernel k = make_diamond(40);
  k.schedule_status_change(20, 1, false);  // kill the fast 11-12 leg
  k.run();

  auto* r11 = dynamic_cast<EigrpEngine*>(k.engine(11));
  REQUIRE(r11);
  // The slow detour is all that remains.
  CHECK(r11->route_metric(2) == 2 * kSlow + kSlow);
  CHECK(r11->successor(2) == NodeId{13});
  CHECK_FALSE(r11->convergence_pending());

  // Every router's successor chain toward host 2 must be loop-free.
  for (NodeId start : {11, 12, 13, 14}) {
    std::set<NodeId> visited;
    NodeId at = start;
    while (true) {
      auto* e = dynamic_cast<EigrpEngine*>(k.engine(at));
      REQUIRE(e);
      auto next = e->successor(2);
      if (!next || *next == at) break;  // direct attachment or no route
      CHECK(visited.insert(at).second);
      at = *next;
    }
  }
}

TEST_CASE("installed distances match the additive shortest paths") {
  Kernel k = make_diamond(15);
  k.run();

  // Hand-computed minimum composite sums over the diamond.
  struct Expect {
    NodeId router;
    NodeId dest;
    Cost metric;
  };
  const Expect table[] = {
      {11, 2, 2 * kFast + kSlow},
      {12, 2, kFast + kSlow},
      {13, 2, kSlow + kSlow},
      {14, 2, kSlow},
      {14, 1, 2 * kFast + kSlow},
      {13, 1, kSlow + kSlow},
      {12, 1, kFast + kSlow},
      {11, 1, kSlow},
  };
  for (const auto& ex : table) {
    CAPTURE(ex.router);
    CAPTURE(ex.dest);
    auto* e = dynamic_cast<EigrpEngine*>(k.engine(ex.router));
    REQUIRE(e);
    CHECK(e->route_metric(ex.dest) == ex.metric);
  }
}
