#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "routesim/engine.hpp"
#include "routesim/graph.hpp"
#include "routesim/messages.hpp"
#include "routesim/types.hpp"

namespace routesim {

// ============================================================================
// Link-state routing shared by two configured flavors.  Hello-driven
// adjacencies with two-way confirmation, sequence-numbered LSP flooding into
// a per-router database, and a delayed full SPF recomputation.
// ============================================================================

enum class LsFlavor { Ospf, Isis };

struct LsFlavorConfig {
  LsFlavor flavor = LsFlavor::Ospf;
  int hello_interval_s = 10;
  int dead_interval_s = 40;  // must be >= 2 * hello_interval_s
  int spf_delay_s = 5;       // hold-down between LSDB change and recompute
  int lsp_refresh_s = 1800;
  std::int64_t cost_reference_bw_bps = 100'000'000;
  // Hello emission offset within the interval (conventional stagger).
  int phase_s = 5;

  static LsFlavorConfig ospf() { return LsFlavorConfig{}; }
  static LsFlavorConfig isis() {
    LsFlavorConfig c;
    c.flavor = LsFlavor::Isis;
    c.hello_interval_s = 10;
    c.dead_interval_s = 30;
    c.spf_delay_s = 1;
    c.phase_s = 3;
    return c;
  }
};

// Interface cost from bandwidth: max(1, reference / bandwidth).
Cost ls_link_cost(std::int64_t bandwidth_bps, std::int64_t reference_bps);

enum class AdjacencyState { Init, Up, Down };

struct Adjacency {
  NodeId neighbor = 0;
  InterfaceId iface = 0;
  AdjacencyState state = AdjacencyState::Init;
  std::int64_t last_hello_s = 0;
};

using Lsdb = std::map<NodeId, Lsp>;  // origin -> newest accepted LSP

// Accepts an LSP iff its seq exceeds the stored one for its origin (or the
// origin is new).  On accept, returns the interfaces to forward on: every id
// in `up_interfaces` except `in_interface`.  On reject the set is empty.
struct FloodResult {
  bool accepted = false;
  std::vector<InterfaceId> forward_on;
};
FloodResult ls_flood_lsp(Lsdb& lsdb, const Lsp& lsp, InterfaceId in_interface,
                         const std::vector<InterfaceId>& up_interfaces);

// Builds the routing graph from the database -- router-to-router edges only
// when both endpoints advertise each other; links to nodes that originate no
// LSP (hosts) are kept one-way as terminal stubs -- then runs a shortest-path
// computation from `self` and maps each destination to its first hop.
ForwardingTable ls_compute_forwarding(
    const Lsdb& lsdb, NodeId self,
    const std::map<NodeId, std::pair<InterfaceId, Cost>>& first_hop_links);

class LinkStateEngine : public RoutingEngine {
 public:
  LinkStateEngine(NodeId self, std::vector<InterfaceInfo> interfaces,
                  LsFlavorConfig cfg);

  std::string name() const override {
    return cfg_.flavor == LsFlavor::Ospf ? "ospf" : "isis";
  }
  void on_tick(SimTime now, std::vector<Outbound>& out) override;
  void on_message(const ProtocolMessage& msg, InterfaceId in_iface,
                  SimTime now, std::vector<Outbound>& out) override;
  void on_interface_down(InterfaceId iface, SimTime now,
                         std::vector<Outbound>& out) override;
  void on_interface_up(InterfaceId iface, SimTime now,
                       std::vector<Outbound>& out) override;
  bool convergence_pending() const override {
    return pending_spf_s_.has_value();
  }

  const Lsdb& lsdb() const { return lsdb_; }
  const std::map<NodeId, Adjacency>& adjacencies() const {
    return adjacencies_;
  }

 private:
  Cost interface_cost(const InterfaceInfo& i) const;
  std::vector<InterfaceId> up_interface_ids() const;
  // Re-originates our own LSP (seq+1), floods it, and schedules SPF.
  void originate_and_flood(std::int64_t now_s, std::vector<Outbound>& out);
  void schedule_spf(std::int64_t now_s);
  void run_spf();
  bool process_hello(const HelloMsg& hello, InterfaceId in_iface,
                     std::int64_t now_s);

  LsFlavorConfig cfg_;
  Lsdb lsdb_;
  std::map<NodeId, Adjacency> adjacencies_;
  // Per interface: neighbor -> last time we heard any hello from it.  Feeds
  // the `seen` list that gives neighbors two-way confirmation.
  std::map<InterfaceId, std::map<NodeId, std::int64_t>> heard_;
  std::int64_t seq_ = 0;
  std::int64_t last_origination_s_ = 0;
  std::optional<std::int64_t> pending_spf_s_;  // earliest second SPF may run
};

}  // namespace routesim
