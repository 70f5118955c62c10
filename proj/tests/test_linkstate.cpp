#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <deque>
#include <map>
#include <tuple>
#include <vector>

#include "routesim/kernel.hpp"
#include "routesim/linkstate.hpp"

using namespace routesim;

namespace {

InterfaceInfo iface(InterfaceId id, std::vector<NodeId> hosts = {},
                    std::vector<NodeId> neighbors = {},
                    std::int64_t bw = 10'000'000) {
  InterfaceInfo i;
  i.id = id;
  i.bandwidth_bps = bw;
  i.prop_delay_us = 5;
  i.attached_hosts = std::move(hosts);
  i.possible_neighbors = std::move(neighbors);
  i.up = true;
  return i;
}

Lsp lsp_of(NodeId origin, std::int64_t seq,
           std::vector<LspLink> links) {
  Lsp l;
  l.origin = origin;
  l.seq = seq;
  l.links = std::move(links);
  return l;
}

constexpr SimTime kSec = 1'000'000;

}  // namespace

// ============================================================================
// Costs
// ============================================================================

TEST_CASE("interface cost is reference over bandwidth, floored at 1") {
  CHECK(ls_link_cost(10'000'000, 100'000'000) == 10);
  CHECK(ls_link_cost(100'000'000, 100'000'000) == 1);
  CHECK(ls_link_cost(1'000'000'000, 100'000'000) == 1);  // floor
  CHECK(ls_link_cost(64'000, 100'000'000) == 1562);
  CHECK_THROWS_AS(ls_link_cost(0, 100'000'000), std::invalid_argument);
  CHECK_THROWS_AS(ls_link_cost(-5, 100'000'000), std::invalid_argument);
}

// ============================================================================
// Flooding
// ============================================================================

TEST_CASE("new and newer announcements are stored and forwarded onward") {
  Lsdb db;
  auto res = ls_flood_lsp(db, lsp_of(7, 1, {{8, 10}}), 0, {0, 1, 2});
  CHECK(res.accepted);
  CHECK(res.forward_on == std::vector<InterfaceId>{1, 2});
  REQUIRE(db.count(7));
  CHECK(db[7].seq == 1);

  // Same seq: duplicate; lower: stale.  Neither stored nor forwarded.
  res = ls_flood_lsp(db, lsp_of(7, 1, {{9, 10}}), 1, {0, 1, 2});
  CHECK_FALSE(res.accepted);
  CHECK(res.forward_on.empty());
  CHECK(db[7].links[0].neighbor == 8);

  res = ls_flood_lsp(db, lsp_of(7, 0, {}), 1, {0, 1, 2});
  CHECK_FALSE(res.accepted);

  res = ls_flood_lsp(db, lsp_of(7, 5, {{9, 10}}), 2, {0, 1, 2});
  CHECK(res.accepted);
  CHECK(res.forward_on == std::vector<InterfaceId>{0, 1});
  CHECK(db[7].seq == 5);
  CHECK(db[7].links[0].neighbor == 9);
}

TEST_CASE("one origination floods each router once, bounded by twice the "
          "link count") {
  // Square 1-2-3-4 plus chord 1-3.  Process-to-quiescence bookkeeping over
  // plain databases; a transmission is one copy handed to one neighbor.
  std::map<NodeId, std::map<InterfaceId, NodeId>> wiring = {
      {1, {{0, 2}, {1, 4}, {2, 3}}},
      {2, {{0, 1}, {1, 3}}},
      {3, {{0, 2}, {1, 4}, {2, 1}}},
      {4, {{0, 3}, {1, 1}}},
  };
  auto iface_toward = [&](NodeId at, NodeId nbr) {
    for (const auto& [ifc, n] : wiring[at]) {
      if (n == nbr) return ifc;
    }
    FAIL("no interface");
    return InterfaceId{-1};
  };
  std::map<NodeId, Lsdb> dbs;
  const Lsp seed = lsp_of(1, 1, {{2, 10}, {3, 10}, {4, 10}});
  dbs[1][1] = seed;

  int transmissions = 0;
  std::deque<std::tuple<NodeId, InterfaceId, Lsp>> pending;
  for (const auto& [ifc, nbr] : wiring[1]) {
    ++transmissions;
    pending.push_back({nbr, iface_toward(nbr, 1), seed});
  }
  while (!pending.empty()) {
    auto [at, in_ifc, lsp] = pending.front();
    pending.pop_front();
    std::vector<InterfaceId> up;
    for (const auto& [ifc, _] : wiring[at]) up.push_back(ifc);
    auto res = ls_flood_lsp(dbs[at], lsp, in_ifc, up);
    for (InterfaceId fwd : res.forward_on) {
      ++transmissions;
      NodeId nbr = wiring[at][fwd];
      pending.push_back({nbr, iface_toward(nbr, at), lsp});
    }
  }

  for (NodeId r : {1, 2, 3, 4}) {
    REQUIRE(dbs[r].count(1));
    CHECK(dbs[r][1].seq == 1);
  }
  const int links = 5;
  CHECK(transmissions <= 2 * links);
  CHECK(transmissions >= 3);  // at least the originator's own copies
}

// ============================================================================
// Route computation
// ============================================================================

TEST_CASE("forwarding uses two-way-confirmed router edges and host stubs") {
  // 1 -- 2 -- 3 with host 100 behind 3.
  Lsdb db;
  db[1] = lsp_of(1, 1, {{2, 10}});
  db[2] = lsp_of(2, 1, {{1, 10}, {3, 10}});
  db[3] = lsp_of(3, 1, {{2, 10}, {100, 5}});

  std::map<NodeId, std::pair<InterfaceId, Cost>> first_hops = {{2, {0, 10}}};
  ForwardingTable t = ls_compute_forwarding(db, 1, first_hops);

  REQUIRE(t.count(2));
  REQUIRE(t.count(3));
  REQUIRE(t.count(100));
  CHECK(t[2].next_hop == 2);
  CHECK(t[2].metric == 10);
  CHECK(t[3].next_hop == 2);
  CHECK(t[3].metric == 20);
  CHECK(t[100].next_hop == 2);
  CHECK(t[100].metric == 25);
  CHECK(t[100].out_interface == 0);
}

TEST_CASE("a one-sided router claim creates no edge") {
  // 2 claims a link to 3, but 3 answers with no link back: the claim is
  // unusable.  3 still originates, so it is not a host stub either.
  Lsdb db;
  db[1] = lsp_of(1, 1, {{2, 10}});
  db[2] = lsp_of(2, 1, {{1, 10}, {3, 10}});
  db[3] = lsp_of(3, 1, {});

  ForwardingTable t = ls_compute_forwarding(db, 1, {{2, {0, 10}}});
  CHECK(t.count(2));
  CHECK_FALSE(t.count(3));
}

TEST_CASE("lowest-cost path wins over fewest hops") {
  // 1->2->3->4 at cost 1 each vs direct 1->4 at cost 10.
  Lsdb db;
  db[1] = lsp_of(1, 1, {{2, 1}, {4, 10}});
  db[2] = lsp_of(2, 1, {{1, 1}, {3, 1}});
  db[3] = lsp_of(3, 1, {{2, 1}, {4, 1}});
  db[4] = lsp_of(4, 1, {{3, 1}, {1, 10}});

  ForwardingTable t = ls_compute_forwarding(db, 1, {{2, {0, 1}}, {4, {1, 10}}});
  REQUIRE(t.count(4));
  CHECK(t[4].metric == 3);
  CHECK(t[4].next_hop == 2);
  CHECK(t[4].out_interface == 0);
}

// ============================================================================
// Engine mechanics
// ============================================================================

TEST_CASE("hello exchange reaches two-way adjacency and triggers "
          "origination") {
  LinkStateEngine e(1, {iface(0, {}, {2}), iface(1, {50})},
                    LsFlavorConfig::ospf());
  std::vector<Outbound> out;

  e.on_tick(0, out);  // first tick self-announces
  REQUIRE(out.size() == 2);  // our own announcement on both interfaces
  CHECK(std::holds_alternative<LspMsg>(out[0].msg));
  CHECK(e.lsdb().count(1));
  CHECK(e.convergence_pending());

  // One-way hello: the neighbor has not seen us yet.
  out.clear();
  e.on_message(ProtocolMessage{HelloMsg{2, {}}}, 0, 1 * kSec, out);
  REQUIRE(e.adjacencies().count(2));
  CHECK(e.adjacencies().at(2).state == AdjacencyState::Init);
  CHECK(out.empty());

  // Two-way hello: adjacency comes up and we re-announce with the new link.
  e.on_message(ProtocolMessage{HelloMsg{2, {1}}}, 0, 2 * kSec, out);
  CHECK(e.adjacencies().at(2).state == AdjacencyState::Up);
  REQUIRE_FALSE(out.empty());
  const auto* re = std::get_if<LspMsg>(&out[0].msg);
  REQUIRE(re);
  CHECK(re->lsp.seq == 2);
  bool lists_neighbor = false;
  for (const auto& l : re->lsp.links) lists_neighbor |= l.neighbor == 2;
  CHECK(lists_neighbor);
}

TEST_CASE("hellos from non-adjacent senders are malformed chatter") {
  LinkStateEngine e(1, {iface(0, {}, {2})}, LsFlavorConfig::ospf());
  std::vector<Outbound> out;
  e.on_message(ProtocolMessage{HelloMsg{9, {1}}}, 0, kSec, out);
  CHECK(e.malformed_count() == 1);
  CHECK(e.adjacencies().empty());
}

TEST_CASE("route recomputation is held down and coalesced") {
  LinkStateEngine e(1, {iface(0, {}, {2}), iface(1, {50})},
                    LsFlavorConfig::ospf());  // 5 s hold-down
  std::vector<Outbound> out;
  e.on_tick(0, out);
  const auto v0 = e.table_version();

  // Two database changes inside the window share the one pending recompute.
  e.on_message(ProtocolMessage{HelloMsg{2, {1}}}, 0, 1 * kSec, out);
  e.on_message(ProtocolMessage{LspMsg{2, lsp_of(2, 1, {{1, 10}})}}, 0,
               2 * kSec, out);
  CHECK(e.convergence_pending());

  e.on_tick(4 * kSec, out);
  CHECK(e.table_version() == v0);  // still held down
  CHECK(e.convergence_pending());

  e.on_tick(5 * kSec, out);
  CHECK_FALSE(e.convergence_pending());
  CHECK(e.table_version() > v0);
  CHECK(e.route_metric(2) == Cost{10});
  CHECK(e.route_metric(50) == Cost{10});
}

TEST_CASE("own announcements echoed back are dropped silently") {
  LinkStateEngine e(1, {iface(0, {}, {2})}, LsFlavorConfig::ospf());
  std::vector<Outbound> out;
  e.on_tick(0, out);
  out.clear();
  e.on_message(ProtocolMessage{LspMsg{2, lsp_of(1, 99, {})}}, 0, kSec, out);
  CHECK(out.empty());
  CHECK(e.lsdb().at(1).seq == 1);  // not overwritten by the echo
}

TEST_CASE("losing the interface under an adjacency re-announces without it") {
  LinkStateEngine e(1, {iface(0, {}, {2}), iface(1, {50})},
                    LsFlavorConfig::ospf());
  std::vector<Outbound> out;
  e.on_tick(0, out);
  e.on_message(ProtocolMessage{HelloMsg{2, {1}}}, 0, kSec, out);
  REQUIRE(e.adjacencies().at(2).state == AdjacencyState::Up);

  out.clear();
  e.on_interface_down(0, 2 * kSec, out);
  CHECK(e.adjacencies().at(2).state == AdjacencyState::Down);
  REQUIRE_FALSE(out.empty());
  const auto* re = std::get_if<LspMsg>(&out[0].msg);
  REQUIRE(re);
  for (const auto& l : re->lsp.links) CHECK(l.neighbor != 2);
  // The copy goes out only on the surviving interface.
  for (const auto& ob : out) CHECK(ob.iface == 1);
}

TEST_CASE("both flavors converge on a live chain, at their own pace") {
  for (LsFlavor flavor : {LsFlavor::Ospf, LsFlavor::Isis}) {
    CAPTURE(static_cast<int>(flavor));
    std::vector<KernelNode> nodes = {{1, NodeKind::Host, 0},
                                     {2, NodeKind::Host, 0},
                                     {11, NodeKind::Router, 0},
                                     {12, NodeKind::Router, 0}};
    std::vector<KernelLink> links = {{1, 11, 10'000'000, 5},
                                     {11, 12, 10'000'000, 5},
                                     {12, 2, 10'000'000, 5}};
    KernelOptions opt;
    opt.duration_s = 30;
    Kernel k(std::move(nodes), std::move(links), opt);
    k.install_engines([&](NodeId id, std::vector<InterfaceInfo> ifs) {
      auto cfg = flavor == LsFlavor::Ospf ? LsFlavorConfig::ospf()
                                          : LsFlavorConfig::isis();
      return std::make_unique<LinkStateEngine>(id, std::move(ifs), cfg);
    });
    k.run();

    auto* r11 = dynamic_cast<LinkStateEngine*>(k.engine(11));
    REQUIRE(r11);
    REQUIRE(r11->adjacencies().count(12));
    CHECK(r11->adjacencies().at(12).state == AdjacencyState::Up);
    CHECK(r11->lsdb().count(11));
    CHECK(r11->lsdb().count(12));
    CHECK(r11->route_metric(2) == Cost{20});  // two 10-cost legs
    CHECK(r11->route_metric(1) == Cost{10});
    CHECK(r11->forwarding_table().at(2).next_hop == 12);
    CHECK(r11->malformed_count() == 0);
  }
}
