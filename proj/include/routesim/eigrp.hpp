#pragma once

#include <limits>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "routesim/engine.hpp"
#include "routesim/messages.hpp"
#include "routesim/types.hpp"

namespace routesim {

// ============================================================================
// EIGRP: hello-based neighbor maintenance, composite bandwidth+delay metric,
// and DUAL -- feasible successors, historical feasible distance, and
// diffusing query/reply computations when no feasible successor remains.
// ============================================================================

struct EigrpConfig {
  int hello_interval_s = 5;
  int hold_time_s = 15;  // must be >= 2 * hello_interval_s
  // Hello emission offset within the interval (conventional stagger).
  int phase_s = 2;
};

// Unreachable sentinel; large but far from overflow when added to any
// realistic link metric.
inline constexpr Cost kEigrpInfinity =
    std::numeric_limits<Cost>::max() / 4;

// Classic two-term composite: 256 * (1e7 / bandwidth_kbps + delay_us / 10),
// all integer floor divisions.  Throws std::invalid_argument on bandwidth
// below 1 kbps.
Cost eigrp_composite_metric(std::int64_t bandwidth_bps,
                            std::int64_t total_delay_us);

struct EigrpNeighbor {
  NodeId neighbor = 0;
  InterfaceId iface = 0;
  std::int64_t last_hello_s = 0;
};

enum class DualState { Passive, Active };

struct NeighborReport {
  Cost reported_distance = kEigrpInfinity;
  Cost link_metric = 0;  // cost of our interface toward that neighbor

  bool operator==(const NeighborReport&) const = default;
};

struct DualTopologyEntry {
  NodeId dest = 0;
  // Reports per neighbor.  The router's own directly connected attachment is
  // modeled as a report from itself with reported_distance 0, which makes it
  // trivially feasible and unifies route selection.
  std::map<NodeId, NeighborReport> reported;
  // Historical minimum computed distance since the entry last became
  // Passive; the feasibility condition compares reported distances to this.
  Cost feasible_distance = kEigrpInfinity;
  std::optional<NodeId> successor;
  DualState state = DualState::Passive;
  std::set<NodeId> outstanding_replies;
  // Neighbors whose queries we owe a reply once this entry turns Passive.
  std::set<NodeId> reply_pending_to;
};

// Strict feasibility: the neighbor's reported distance must be below the
// entry's feasible distance.  Throws std::invalid_argument when the neighbor
// has no report.
bool dual_feasibility_check(const DualTopologyEntry& entry, NodeId neighbor);

// Computed distance via one neighbor's report (infinity-saturating).
Cost dual_computed_distance(const NeighborReport& report);

struct DualOutcome {
  enum Action { Install, StartDiffusing, Unreachable } action = Unreachable;
  // For StartDiffusing: the neighbors to query (excludes the router itself
  // and, by split horizon, the neighbor a triggering query came from).
  std::set<NodeId> query_targets;
};

// Local computation for a Passive entry: pick the best feasible neighbor
// (lowest computed distance, ties to the lowest neighbor id), lower the
// feasible distance to the new computed distance if smaller, stay Passive.
// With no feasible choice but live neighbors to ask: go Active and query
// them (minus the split-horizon exclusion).  With nobody to ask:
// unreachable.  Throws std::logic_error if the entry is Active.
DualOutcome dual_route_computation(DualTopologyEntry& entry,
                                   const std::set<NodeId>& current_neighbors,
                                   std::optional<NodeId> exclude_from_queries =
                                       std::nullopt);

// Shared tail of a diffusing computation: when outstanding_replies is empty,
// resets the feasible distance to the fresh minimum computed distance,
// installs the best neighbor (or clears the successor), returns to Passive.
bool dual_finalize_if_done(DualTopologyEntry& entry);

struct ReplyOutcome {
  bool became_passive = false;
};

// Records one reply during diffusion; when the last outstanding neighbor
// answers, the feasible distance is reset to the fresh minimum, the best
// neighbor (if any) becomes successor, and the entry returns to Passive.
ReplyOutcome dual_process_reply(DualTopologyEntry& entry, NodeId neighbor,
                                Cost reply_rd);

class EigrpEngine : public RoutingEngine {
 public:
  EigrpEngine(NodeId self, std::vector<InterfaceInfo> interfaces,
              EigrpConfig cfg = {});

  std::string name() const override { return "eigrp"; }
  void on_tick(SimTime now, std::vector<Outbound>& out) override;
  void on_message(const ProtocolMessage& msg, InterfaceId in_iface,
                  SimTime now, std::vector<Outbound>& out) override;
  void on_interface_down(InterfaceId iface, SimTime now,
                         std::vector<Outbound>& out) override;
  void on_interface_up(InterfaceId iface, SimTime now,
                       std::vector<Outbound>& out) override;
  bool convergence_pending() const override;

  const std::map<NodeId, EigrpNeighbor>& neighbors() const {
    return neighbors_;
  }
  const std::map<NodeId, DualTopologyEntry>& topology() const {
    return topology_;
  }
  // Successor toward dest, if any (the router itself for direct routes).
  std::optional<NodeId> successor(NodeId dest) const;
  int stale_reply_count() const { return stale_replies_; }

 private:
  Cost interface_metric(const InterfaceInfo& i) const;
  Cost current_metric(NodeId dest) const;  // installed distance or infinity
  void lose_neighbor(NodeId neighbor, std::int64_t now_s,
                     std::vector<Outbound>& out);
  void recompute_entry(NodeId dest, std::optional<NodeId> query_from,
                       std::vector<Outbound>& out);
  void finalize_entry(NodeId dest, std::vector<Outbound>& out);
  void rebuild_forwarding();
  // Sends (dest, rd) updates for changed routes to every up interface,
  // omitting each destination on its successor's interface (split horizon).
  void send_triggered_updates(const std::set<NodeId>& dests,
                              std::vector<Outbound>& out);
  std::vector<EigrpRoute> full_table_routes(
      std::optional<InterfaceId> horizon_iface) const;
  InterfaceId neighbor_iface(NodeId neighbor) const;

  EigrpConfig cfg_;
  std::map<NodeId, EigrpNeighbor> neighbors_;
  std::map<NodeId, DualTopologyEntry> topology_;
  std::map<NodeId, InterfaceId> direct_ifaces_;  // attached host -> iface
  int stale_replies_ = 0;
};

}  // namespace routesim
