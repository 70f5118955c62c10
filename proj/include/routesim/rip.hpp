#pragma once

#include <map>
#include <optional>
#include <vector>

#include "routesim/engine.hpp"
#include "routesim/messages.hpp"
#include "routesim/types.hpp"

namespace routesim {

// ============================================================================
// Distance-vector routing: hop-count metric capped at 16 (= unreachable),
// periodic full-table advertisements with split horizon, per-route timeout
// and garbage-collection timers, optional triggered updates.
// ============================================================================

struct RipConfig {
  int advertise_interval_s = 30;
  int timeout_s = 180;
  int gc_interval_s = 120;
  int infinity_metric = 16;
  bool split_horizon = true;
  bool triggered_updates = true;
  // Offset of the periodic advertisement within the interval; routers are
  // conventionally staggered so protocols do not burst in lockstep.
  int phase_s = 0;
};

struct RipRouteEntry {
  NodeId dest = 0;
  int metric = 0;  // 1..16
  NodeId next_hop = 0;
  InterfaceId learned_interface = 0;
  std::int64_t last_refresh_s = 0;
  std::optional<std::int64_t> gc_deadline_s;  // present iff metric == 16

  bool operator==(const RipRouteEntry&) const = default;
};

using RipTable = std::map<NodeId, RipRouteEntry>;

// Applies one received advertisement.  Returns true iff any entry's
// (metric, next_hop) changed.  A route whose advertised metric lies outside
// 1..16 poisons the whole advertisement: nothing is applied and *malformed
// is incremented.
bool rip_process_advertisement(RipTable& table, const RipAdvert& adv,
                               InterfaceId in_interface, const RipConfig& cfg,
                               std::int64_t now_s, int* malformed = nullptr);

// Builds the per-interface advertisements for every up interface.  With
// split horizon on, the advertisement for interface i omits routes learned
// on i.  `self` is the advertising router (excluded as a destination).
std::map<InterfaceId, RipAdvert> rip_build_advertisements(
    const RipTable& table, const std::vector<InterfaceInfo>& interfaces,
    NodeId self, const RipConfig& cfg);

struct RipTickResult {
  bool emit_periodic = false;
  bool changed = false;               // any metric transition this tick
  std::vector<NodeId> expired_dests;  // timed out to 16 this tick
};

// Advances per-route timers: timeout -> metric 16 + gc armed; past gc ->
// entry deleted.  emit_periodic is true on advertisement boundaries.
RipTickResult rip_tick(RipTable& table, const RipConfig& cfg,
                       std::int64_t now_s);

// Marks every route learned on `iface` unreachable.  Returns true iff any
// entry changed (callers send a triggered update when configured).
bool rip_on_interface_down(RipTable& table, InterfaceId iface,
                           const RipConfig& cfg, std::int64_t now_s);

class RipEngine : public RoutingEngine {
 public:
  RipEngine(NodeId self, std::vector<InterfaceInfo> interfaces,
            RipConfig cfg = {});

  std::string name() const override { return "rip"; }
  void on_tick(SimTime now, std::vector<Outbound>& out) override;
  void on_message(const ProtocolMessage& msg, InterfaceId in_iface,
                  SimTime now, std::vector<Outbound>& out) override;
  void on_interface_down(InterfaceId iface, SimTime now,
                         std::vector<Outbound>& out) override;
  void on_interface_up(InterfaceId iface, SimTime now,
                       std::vector<Outbound>& out) override;

  const RipTable& table() const { return table_; }

 private:
  bool refresh_direct_routes(std::int64_t now_s);
  void rebuild_forwarding();
  void emit_advertisements(std::vector<Outbound>& out);

  RipConfig cfg_;
  RipTable table_;
};

}  // namespace routesim
