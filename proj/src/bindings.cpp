#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "routesim/runner.hpp"
#include "routesim/scenario.hpp"

namespace py = pybind11;
using namespace routesim;

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Deterministic packet-level simulator comparing RIP, OSPF-style, "
      "IS-IS-style and EIGRP routing engines";

  py::register_exception<ParseError>(m, "ParseError");

  py::enum_<Protocol>(m, "Protocol")
      .value("RIP", Protocol::Rip)
      .value("OSPF", Protocol::Ospf)
      .value("ISIS", Protocol::Isis)
      .value("EIGRP", Protocol::Eigrp);

  py::enum_<NodeKind>(m, "NodeKind")
      .value("HOST", NodeKind::Host)
      .value("SWITCH", NodeKind::Switch)
      .value("ROUTER", NodeKind::Router);

  py::enum_<EventKind>(m, "EventKind")
      .value("PACKET_ARRIVAL", EventKind::PacketArrival)
      .value("TIMER_TICK", EventKind::TimerTick)
      .value("LINK_STATUS_CHANGE", EventKind::LinkStatusChange)
      .value("PROTOCOL_MESSAGE_DELIVERY", EventKind::ProtocolMessageDelivery)
      .value("PACKET_GENERATION", EventKind::PacketGeneration);

  m.def("protocol_name", &protocol_name);
  m.def("protocol_from_name", &protocol_from_name);

  py::class_<ScenarioNode>(m, "ScenarioNode")
      .def(py::init<>())
      .def_readwrite("id", &ScenarioNode::id)
      .def_readwrite("kind", &ScenarioNode::kind);

  py::class_<ScenarioLink>(m, "ScenarioLink")
      .def(py::init<>())
      .def_readwrite("a", &ScenarioLink::a)
      .def_readwrite("b", &ScenarioLink::b)
      .def_readwrite("bandwidth_bps", &ScenarioLink::bandwidth_bps)
      .def_readwrite("prop_delay_us", &ScenarioLink::prop_delay_us);

  py::class_<ScenarioFailure>(m, "ScenarioFailure")
      .def(py::init<>())
      .def_readwrite("time_s", &ScenarioFailure::time_s)
      .def_readwrite("a", &ScenarioFailure::a)
      .def_readwrite("b", &ScenarioFailure::b)
      .def_readwrite("fail", &ScenarioFailure::fail);

  py::class_<ScenarioFlow>(m, "ScenarioFlow")
      .def(py::init<>())
      .def_readwrite("src", &ScenarioFlow::src)
      .def_readwrite("dst", &ScenarioFlow::dst)
      .def_readwrite("start_s", &ScenarioFlow::start_s)
      .def_readwrite("stop_s", &ScenarioFlow::stop_s)
      .def_readwrite("rate_pps", &ScenarioFlow::rate_pps)
      .def_readwrite("rate_bps", &ScenarioFlow::rate_bps);

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("name", &Scenario::name)
      .def_readwrite("duration_s", &Scenario::duration_s)
      .def_readwrite("seed", &Scenario::seed)
      .def_readwrite("bucket_s", &Scenario::bucket_s)
      .def_readwrite("protocol", &Scenario::protocol)
      .def_readwrite("nodes", &Scenario::nodes)
      .def_readwrite("links", &Scenario::links)
      .def_readwrite("failures", &Scenario::failures)
      .def_readwrite("flows", &Scenario::flows)
      .def("__eq__", [](const Scenario& a, const Scenario& b) { return a == b; });

  m.def("parse_scenario", &parse_scenario);
  m.def("serialize_scenario", &serialize_scenario);
  m.def("load_scenario_file", &load_scenario_file);
  m.def("reference_scenarios", &reference_scenarios);
  m.def("find_reference_scenario", &find_reference_scenario);

  py::class_<MetricBucket>(m, "MetricBucket")
      .def_readonly("dropped", &MetricBucket::dropped)
      .def_readonly("convergence_active", &MetricBucket::convergence_active)
      .def_readonly("delay_sum_us", &MetricBucket::delay_sum_us)
      .def_readonly("delivered", &MetricBucket::delivered)
      .def_readonly("hops_sum", &MetricBucket::hops_sum)
      .def_readonly("control_bits", &MetricBucket::control_bits);

  py::class_<FlowCounters>(m, "FlowCounters")
      .def_readonly("generated", &FlowCounters::generated)
      .def_readonly("delivered", &FlowCounters::delivered)
      .def_readonly("dropped", &FlowCounters::dropped);

  py::class_<LinkStatusEvent>(m, "LinkStatusEvent")
      .def_readonly("time", &LinkStatusEvent::time)
      .def_readonly("link_index", &LinkStatusEvent::link_index)
      .def_readonly("up", &LinkStatusEvent::up);

  py::class_<EventRecord>(m, "EventRecord")
      .def_readonly("time", &EventRecord::time)
      .def_readonly("seq", &EventRecord::seq)
      .def_readonly("kind", &EventRecord::kind);

  py::class_<ForwardingEntry>(m, "ForwardingEntry")
      .def_readonly("next_hop", &ForwardingEntry::next_hop)
      .def_readonly("out_interface", &ForwardingEntry::out_interface)
      .def_readonly("metric", &ForwardingEntry::metric);

  py::class_<RunSummary>(m, "RunSummary")
      .def_readonly("generated", &RunSummary::generated)
      .def_readonly("delivered", &RunSummary::delivered)
      .def_readonly("dropped_total", &RunSummary::dropped_total)
      .def_readonly("dropped_data", &RunSummary::dropped_data)
      .def_readonly("dropped_by_reason", &RunSummary::dropped_by_reason)
      .def_readonly("in_flight_at_end", &RunSummary::in_flight_at_end)
      .def_readonly("delay_sum_us", &RunSummary::delay_sum_us)
      .def_readonly("hops_sum", &RunSummary::hops_sum)
      .def_readonly("control_overhead_bits",
                    &RunSummary::control_overhead_bits)
      .def_readonly("convergence_active_s", &RunSummary::convergence_active_s)
      .def_readonly("malformed_messages", &RunSummary::malformed_messages)
      .def_readonly("warnings", &RunSummary::warnings);

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("scenario_name", &RunResult::scenario_name)
      .def_readonly("protocol", &RunResult::protocol)
      .def_readonly("duration_s", &RunResult::duration_s)
      .def_readonly("bucket_s", &RunResult::bucket_s)
      .def_readonly("seed", &RunResult::seed)
      .def_readonly("buckets", &RunResult::buckets)
      .def_readonly("summary", &RunResult::summary)
      .def_readonly("status_events", &RunResult::status_events)
      .def_readonly("flow_counters", &RunResult::flow_counters)
      .def_readonly("final_tables", &RunResult::final_tables)
      .def_readonly("successors", &RunResult::successors)
      .def_readonly("trace", &RunResult::trace);

  m.def(
      "run_scenario",
      [](const Scenario& s, Protocol p, bool record_trace) {
        RunOptions opts;
        opts.record_trace = record_trace;
        return run_scenario(s, p, opts);
      },
      py::arg("scenario"), py::arg("protocol"),
      py::arg("record_trace") = false);
  m.def("report_csv", &report_csv);
  m.def("report_summary_text", &report_summary_text);
  m.def("comparison_text", &comparison_text);
  m.def("write_reports", &write_reports);
  m.def("compare_scenario", &compare_scenario);
}
