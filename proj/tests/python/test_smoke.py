import pytest

import routesim

SMALL = """
[general]
name=smoke
duration_s=60
seed=7
bucket_s=1
protocol=ospf

[nodes]
1 host
2 host
3 router
4 router

[links]
1 3 10000000 5
3 4 10000000 5
4 2 10000000 5

[flows]
1 2 30 60 50 60000
"""

CSV_HEADER = "time_s,dropped_pkts,convergence_active,mean_delay_us,mean_hops,control_overhead_bits"


def test_reference_scenarios_present():
    names = [s.name for s in routesim.reference_scenarios()]
    assert "figure2" in names
    assert "figure2_fastpath" in names
    fig2 = routesim.find_reference_scenario("figure2")
    assert fig2 is not None
    assert fig2.duration_s == 900
    assert len(fig2.failures) == 10
    assert routesim.find_reference_scenario("nope") is None


def test_parse_serialize_roundtrip():
    s = routesim.parse_scenario(SMALL)
    assert s.name == "smoke"
    assert s.protocol == routesim.Protocol.OSPF
    text = routesim.serialize_scenario(s)
    again = routesim.parse_scenario(text)
    assert routesim.serialize_scenario(again) == text


def test_parse_error_is_raised():
    with pytest.raises(routesim.ParseError):
        routesim.parse_scenario("[general]\nname=x\nduration_s=oops\n")


def test_run_small_scenario():
    s = routesim.parse_scenario(SMALL)
    r = routesim.run_scenario(s, routesim.Protocol.OSPF)
    summary = r.summary
    assert summary.generated == 50 * 30
    assert summary.delivered > 0
    assert (
        summary.generated
        == summary.delivered + summary.dropped_data + summary.in_flight_at_end
    )
    csv = routesim.report_csv(r)
    lines = csv.splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 1 + s.duration_s
    text = routesim.report_summary_text(r)
    assert "delivered" in text


def test_runs_are_reproducible():
    s = routesim.find_reference_scenario("figure2")
    a = routesim.run_scenario(s, routesim.Protocol.EIGRP)
    b = routesim.run_scenario(s, routesim.Protocol.EIGRP)
    assert routesim.report_csv(a) == routesim.report_csv(b)
    assert routesim.report_summary_text(a) == routesim.report_summary_text(b)
