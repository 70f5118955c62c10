#include "routesim/runner.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "routesim/eigrp.hpp"
#include "routesim/linkstate.hpp"
#include "routesim/rip.hpp"

namespace routesim {

std::unique_ptr<RoutingEngine> make_engine(Protocol p, NodeId id,
                                           std::vector<InterfaceInfo> ifaces) {
  switch (p) {
    case Protocol::Rip:
      return std::make_unique<RipEngine>(id, std::move(ifaces));
    case Protocol::Ospf:
      return std::make_unique<LinkStateEngine>(id, std::move(ifaces),
                                               LsFlavorConfig::ospf());
    case Protocol::Isis:
      return std::make_unique<LinkStateEngine>(id, std::move(ifaces),
                                               LsFlavorConfig::isis());
    case Protocol::Eigrp:
      return std::make_unique<EigrpEngine>(id, std::move(ifaces));
  }
  throw std::logic_error("unknown protocol");
}

RunResult run_scenario(const Scenario& s, Protocol protocol,
                       const RunOptions& opts) {
  std::vector<KernelNode> nodes;
  nodes.reserve(s.nodes.size());
  for (const auto& n : s.nodes) nodes.push_back({n.id, n.kind, 0});

  std::vector<KernelLink> links;
  links.reserve(s.links.size());
  std::map<std::pair<NodeId, NodeId>, std::size_t> link_index;
  for (const auto& l : s.links) {
    auto key = std::minmax(l.a, l.b);
    link_index[{key.first, key.second}] = links.size();
    links.push_back({l.a, l.b, l.bandwidth_bps, l.prop_delay_us});
  }

  KernelOptions options;
  options.duration_s = s.duration_s;
  options.bucket_s = s.bucket_s;
  options.record_trace = opts.record_trace;

  Kernel kernel(std::move(nodes), std::move(links), options);
  kernel.install_engines(
      [protocol](NodeId id, std::vector<InterfaceInfo> ifaces) {
        return make_engine(protocol, id, std::move(ifaces));
      });

  for (const auto& f : s.failures) {
    auto key = std::minmax(f.a, f.b);
    auto it = link_index.find({key.first, key.second});
    if (it == link_index.end()) {
      throw std::invalid_argument("failure references unknown link");
    }
    kernel.schedule_status_change(f.time_s, it->second, !f.fail);
  }
  for (std::size_t i = 0; i < s.flows.size(); ++i) {
    const auto& f = s.flows[i];
    kernel.add_flow({static_cast<int>(i), f.src, f.dst, f.start_s, f.stop_s,
                     f.rate_pps, f.rate_bps});
  }

  kernel.run();

  RunResult r;
  r.scenario_name = s.name;
  r.protocol = protocol;
  r.duration_s = s.duration_s;
  r.bucket_s = s.bucket_s;
  r.seed = s.seed;
  r.buckets = kernel.metrics().buckets();
  r.status_events = kernel.status_log();
  r.flow_counters = kernel.flow_counters();
  r.trace = kernel.trace();

  const MetricsCollector& m = kernel.metrics();
  r.summary.generated = kernel.generated_total();
  r.summary.delivered = kernel.delivered_total();
  r.summary.dropped_total = m.total_dropped();
  r.summary.dropped_data = m.data_dropped();
  for (int i = 0; i < kDropReasonCount; ++i) {
    r.summary.dropped_by_reason[i] =
        m.dropped_by_reason(static_cast<DropReason>(i));
  }
  r.summary.in_flight_at_end = kernel.in_flight_at_end();
  r.summary.delay_sum_us = m.delay_sum_us();
  r.summary.hops_sum = m.hops_sum();
  r.summary.control_overhead_bits = m.control_bits();
  r.summary.convergence_active_s = m.convergence_active_seconds();
  r.summary.warnings = kernel.warning_count();

  for (const auto& n : s.nodes) {
    if (n.kind != NodeKind::Router) continue;
    RoutingEngine* e = kernel.engine(n.id);
    if (!e) continue;
    r.summary.malformed_messages += e->malformed_count();
    r.final_tables[n.id] = e->forwarding_table();
    if (auto* eigrp = dynamic_cast<EigrpEngine*>(e)) {
      for (const auto& [dest, entry] : eigrp->topology()) {
        if (entry.successor) r.successors[n.id][dest] = *entry.successor;
      }
    }
  }
  return r;
}

// ============================================================================
// Report rendering
// ============================================================================

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::string report_csv(const RunResult& r) {
  std::ostringstream out;
  out << "time_s,dropped_pkts,convergence_active,mean_delay_us,mean_hops,"
         "control_overhead_bits\n";
  for (std::size_t i = 0; i < r.buckets.size(); ++i) {
    const MetricBucket& b = r.buckets[i];
    out << (static_cast<std::int64_t>(i) * r.bucket_s) << "," << b.dropped
        << "," << b.convergence_active << ",";
    if (b.delivered > 0) {
      out << format_double(static_cast<double>(b.delay_sum_us) /
                           static_cast<double>(b.delivered));
    }
    out << ",";
    if (b.delivered > 0) {
      out << format_double(static_cast<double>(b.hops_sum) /
                           static_cast<double>(b.delivered));
    }
    out << "," << b.control_bits << "\n";
  }
  return out.str();
}

std::string report_summary_text(const RunResult& r) {
  const RunSummary& s = r.summary;
  std::ostringstream out;
  out << "scenario=" << r.scenario_name << "\n";
  out << "protocol=" << protocol_name(r.protocol) << "\n";
  out << "duration_s=" << r.duration_s << "\n";
  out << "bucket_s=" << r.bucket_s << "\n";
  out << "seed=" << r.seed << "\n";
  out << "generated=" << s.generated << "\n";
  out << "delivered=" << s.delivered << "\n";
  out << "dropped_total=" << s.dropped_total << "\n";
  out << "dropped_data=" << s.dropped_data << "\n";
  for (int i = 0; i < kDropReasonCount; ++i) {
    out << "dropped_" << drop_reason_name(static_cast<DropReason>(i)) << "="
        << s.dropped_by_reason[i] << "\n";
  }
  out << "in_flight_at_end=" << s.in_flight_at_end << "\n";
  out << "mean_delay_us=";
  if (s.delivered > 0) {
    out << format_double(static_cast<double>(s.delay_sum_us) /
                         static_cast<double>(s.delivered));
  }
  out << "\n";
  out << "mean_hops=";
  if (s.delivered > 0) {
    out << format_double(static_cast<double>(s.hops_sum) /
                         static_cast<double>(s.delivered));
  }
  out << "\n";
  out << "control_overhead_bits=" << s.control_overhead_bits << "\n";
  out << "convergence_active_s=" << s.convergence_active_s << "\n";
  out << "malformed_messages=" << s.malformed_messages << "\n";
  out << "warnings=" << s.warnings << "\n";
  return out.str();
}

std::string comparison_text(const std::vector<RunResult>& runs) {
  std::ostringstream out;
  out << "metric";
  for (const auto& r : runs) out << " " << protocol_name(r.protocol);
  out << "\n";

  auto row = [&](const char* label, auto getter) {
    out << label;
    for (const auto& r : runs) out << " " << getter(r);
    out << "\n";
  };
  row("generated", [](const RunResult& r) { return r.summary.generated; });
  row("delivered", [](const RunResult& r) { return r.summary.delivered; });
  row("dropped_total",
      [](const RunResult& r) { return r.summary.dropped_total; });
  row("dropped_data",
      [](const RunResult& r) { return r.summary.dropped_data; });
  out << "mean_delay_us";
  for (const auto& r : runs) {
    out << " ";
    if (r.summary.delivered > 0) {
      out << format_double(static_cast<double>(r.summary.delay_sum_us) /
                           static_cast<double>(r.summary.delivered));
    }
  }
  out << "\n";
  out << "mean_hops";
  for (const auto& r : runs) {
    out << " ";
    if (r.summary.delivered > 0) {
      out << format_double(static_cast<double>(r.summary.hops_sum) /
                           static_cast<double>(r.summary.delivered));
    }
  }
  out << "\n";
  row("control_overhead_bits",
      [](const RunResult& r) { return r.summary.control_overhead_bits; });
  row("convergence_active_s",
      [](const RunResult& r) { return r.summary.convergence_active_s; });
  return out.str();
}

void write_reports(const RunResult& r, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string stem =
      r.scenario_name + "." + protocol_name(r.protocol);

  const auto csv_path = fs::path(out_dir) / (stem + ".csv");
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
  csv << report_csv(r);

  const auto sum_path = fs::path(out_dir) / (stem + ".summary.txt");
  std::ofstream sum(sum_path);
  if (!sum) throw std::runtime_error("cannot write " + sum_path.string());
  sum << report_summary_text(r);
}

std::vector<RunResult> compare_scenario(const Scenario& s,
                                        const std::string& out_dir) {
  std::vector<RunResult> runs;
  for (Protocol p : kAllProtocols) {
    runs.push_back(run_scenario(s, p));
    write_reports(runs.back(), out_dir);
  }
  namespace fs = std::filesystem;
  const auto path = fs::path(out_dir) / (s.name + ".compare.txt");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << comparison_text(runs);
  return runs;
}

}  // namespace routesim
