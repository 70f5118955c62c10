#pragma once

#include <array>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "routesim/engine.hpp"
#include "routesim/kernel.hpp"
#include "routesim/metrics.hpp"
#include "routesim/scenario.hpp"

namespace routesim {

// ============================================================================
// One simulation run end to end: scenario -> kernel + engines -> report.
// ============================================================================

struct RunSummary {
  std::int64_t generated = 0;
  std::int64_t delivered = 0;
  std::int64_t dropped_total = 0;  // data and control frames
  std::int64_t dropped_data = 0;
  std::array<std::int64_t, kDropReasonCount> dropped_by_reason{};
  std::int64_t in_flight_at_end = 0;
  std::int64_t delay_sum_us = 0;
  std::int64_t hops_sum = 0;
  std::int64_t control_overhead_bits = 0;
  std::int64_t convergence_active_s = 0;
  int malformed_messages = 0;
  int warnings = 0;
};

struct RunResult {
  std::string scenario_name;
  Protocol protocol = Protocol::Rip;
  std::int64_t duration_s = 0;
  std::int64_t bucket_s = 1;
  std::uint64_t seed = 0;
  std::vector<MetricBucket> buckets;
  RunSummary summary;
  std::vector<LinkStatusEvent> status_events;
  std::map<int, FlowCounters> flow_counters;
  std::map<NodeId, ForwardingTable> final_tables;
  // EIGRP runs only: router -> destination -> successor at end of run.
  std::map<NodeId, std::map<NodeId, NodeId>> successors;
  std::vector<EventRecord> trace;  // filled only when requested
};

struct RunOptions {
  bool record_trace = false;
};

std::unique_ptr<RoutingEngine> make_engine(Protocol p, NodeId id,
                                           std::vector<InterfaceInfo> ifaces);

RunResult run_scenario(const Scenario& s, Protocol protocol,
                       const RunOptions& opts = {});

// Per-bucket series as CSV; means are left empty when nothing was delivered
// in the bucket.
std::string report_csv(const RunResult& r);
// Flat key=value totals.
std::string report_summary_text(const RunResult& r);
// Side-by-side totals for several runs of the same scenario.
std::string comparison_text(const std::vector<RunResult>& runs);

// Writes <name>.<protocol>.csv and <name>.<protocol>.summary.txt.
void write_reports(const RunResult& r, const std::string& out_dir);

// Runs every protocol on the scenario, writes the per-protocol reports plus
// <name>.compare.txt, and returns the results in kAllProtocols order.
std::vector<RunResult> compare_scenario(const Scenario& s,
                                        const std::string& out_dir);

}  // namespace routesim
