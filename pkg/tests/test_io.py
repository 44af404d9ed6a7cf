"""Scenario/matrix file handling and export determinism tests."""

import json

import pytest

from specnego import MembershipOverride, generate_scenario, run, topsis, validate
from specnego.charts import render_chart
from specnego.experiments import MetricsTable, experiment_spec, run_experiment
from specnego.matrix_io import closeness_csv, parse_matrix_csv
from specnego.reports import (
    render_allocations_csv,
    render_events_jsonl,
    render_metrics_csv,
    render_table_csv,
    export_report,
)
from specnego.scenario_io import ScenarioParseError, parse_scenario, scenario_to_json

MINIMAL_DOC = """
{
  "topology": "no_coalition",
  "pus": [{"id": "pu0", "zone": [0, 0], "channels": 4, "price": 10.0, "alloc_time": 60.0}],
  "sus": [{"id": "su0", "zone": [0, 1], "channels_requested": 2, "arrival_time": 0.0}]
}
"""


class TestParseScenario:
    def test_minimal_document_gets_defaults(self):
        scenario = parse_scenario(MINIMAL_DOC)
        assert scenario.weights == (0.2, 0.5, 0.3)
        assert scenario.seed == 0 and scenario.aggregation is True
        assert scenario.timing.latency == 10.0
        assert validate(scenario) == []

    def test_weights_not_summing_to_one_accepted(self):
        doc = json.loads(MINIMAL_DOC)
        doc["weights"] = [0.4, 1.0, 0.6]
        scenario = parse_scenario(json.dumps(doc))
        assert validate(scenario) == []

    def test_duplicate_id_reported_by_validate(self):
        doc = json.loads(MINIMAL_DOC)
        doc["sus"][0]["id"] = "pu0"
        problems = validate(parse_scenario(json.dumps(doc)))
        assert len(problems) == 1 and "pu0" in problems[0]

    def test_unknown_field_rejected_with_path(self):
        doc = json.loads(MINIMAL_DOC)
        doc["pus"][0]["prices"] = 3
        with pytest.raises(ScenarioParseError, match=r"pus\[0\].prices"):
            parse_scenario(json.dumps(doc))

    def test_unknown_top_level_field(self):
        doc = json.loads(MINIMAL_DOC)
        doc["latency"] = 10
        with pytest.raises(ScenarioParseError, match="unknown field"):
            parse_scenario(json.dumps(doc))

    def test_missing_required_field(self):
        doc = json.loads(MINIMAL_DOC)
        del doc["topology"]
        with pytest.raises(ScenarioParseError, match="topology"):
            parse_scenario(json.dumps(doc))

    def test_malformed_json(self):
        with pytest.raises(ScenarioParseError, match="malformed"):
            parse_scenario("{not json")

    def test_wrong_types_reported_with_path(self):
        doc = json.loads(MINIMAL_DOC)
        doc["pus"][0]["channels"] = "four"
        with pytest.raises(ScenarioParseError, match=r"pus\[0\].channels"):
            parse_scenario(json.dumps(doc))
        doc = json.loads(MINIMAL_DOC)
        doc["pus"][0]["zone"] = [1, 2, 3]
        with pytest.raises(ScenarioParseError, match=r"pus\[0\].zone"):
            parse_scenario(json.dumps(doc))
        doc = json.loads(MINIMAL_DOC)
        doc["aggregation"] = "yes"
        with pytest.raises(ScenarioParseError, match="aggregation"):
            parse_scenario(json.dumps(doc))

    def test_partial_timing_keeps_other_defaults(self):
        doc = json.loads(MINIMAL_DOC)
        doc["timing"] = {"latency": 2.5}
        scenario = parse_scenario(json.dumps(doc))
        assert scenario.timing.latency == 2.5
        assert scenario.timing.cpu_select == 2.0

    def test_timing_unknown_key(self):
        doc = json.loads(MINIMAL_DOC)
        doc["timing"] = {"lag": 1}
        with pytest.raises(ScenarioParseError, match="timing.lag"):
            parse_scenario(json.dumps(doc))


class TestRoundTrip:
    @pytest.mark.parametrize(
        "scenario",
        [
            generate_scenario("no_coalition", pu_count=3, su_groups=(2,), seed=5),
            generate_scenario("cpu_only", pu_count=6, cpu_count=2, su_groups=(4,), seed=5),
            generate_scenario("cpu_csu", pu_count=15, cpu_count=5, su_groups=(5, 5, 5), seed=5),
        ],
        ids=["no_coalition", "cpu_only", "cpu_csu"],
    )
    def test_parse_inverts_serialize(self, scenario):
        assert parse_scenario(scenario_to_json(scenario)) == scenario

    def test_round_trip_with_membership_override(self):
        base = generate_scenario("cpu_csu", pu_count=2, cpu_count=1, su_groups=(2,), seed=5)
        scenario = type(base)(
            **{
                **{f: getattr(base, f) for f in (
                    "topology", "pus", "sus", "cpu_coordinators", "csu_coordinators",
                    "aggregation", "seed", "weights", "timing",
                )},
                "memberships": MembershipOverride(
                    cpu={"cpu00": ("pu000", "pu001")}, csu={"csu000": ("su0000", "su0001")}
                ),
            }
        )
        assert parse_scenario(scenario_to_json(scenario)) == scenario

    def test_serialization_is_byte_stable(self):
        scenario = generate_scenario("cpu_csu", pu_count=15, cpu_count=5,
                                     su_groups=(5, 5, 5), seed=5)
        assert scenario_to_json(scenario) == scenario_to_json(scenario)


class TestMatrixCsv:
    TEXT = (
        "alternative,channels,price,alloc_time\n"
        "weights,0.2,0.5,0.3\n"
        "senses,benefit,cost,benefit\n"
        "pu1,3,5.0,30\n"
        "pu2,5,9.0,45\n"
        "pu3,4,7.0,40\n"
    )

    def test_parse_and_rank(self):
        matrix = parse_matrix_csv(self.TEXT)
        assert matrix.alternatives == ("pu1", "pu2", "pu3")
        assert matrix.weights == (0.2, 0.5, 0.3)
        result = topsis(matrix)
        text = closeness_csv(matrix, result)
        lines = text.strip().splitlines()
        assert lines[0] == "alternative,closeness,rank"
        assert lines[1].startswith("pu1,") and lines[1].endswith(",1")

    def test_too_few_rows(self):
        with pytest.raises(ValueError, match="at least one alternative"):
            parse_matrix_csv("a,b\nweights,1\nsenses,benefit\n")

    def test_bad_sense_token(self):
        bad = self.TEXT.replace("benefit,cost", "benefit,cheap")
        with pytest.raises(ValueError, match="cheap"):
            parse_matrix_csv(bad)

    def test_wrong_cell_count(self):
        with pytest.raises(ValueError, match="expected 3"):
            parse_matrix_csv(
                "alternative,a,b,c\nweights,1,1,1\nsenses,benefit,benefit,benefit\nx,1,2\n"
            )

    def test_non_numeric_score(self):
        with pytest.raises(ValueError):
            parse_matrix_csv(
                "alternative,a\nweights,1\nsenses,benefit\nx,lots\n"
            )


@pytest.fixture(scope="module")
def report():
    return run(generate_scenario("cpu_csu", pu_count=15, cpu_count=5,
                                 su_groups=(5, 5, 5), seed=1))


@pytest.fixture(scope="module")
def exp_i_table():
    return run_experiment(experiment_spec("exp_i"))


@pytest.fixture(scope="module")
def exp_iv_table():
    return run_experiment(experiment_spec("exp_iv", su_sweep=(5, 10)))


class TestReportExports:
    def test_metrics_row_for_total(self, report):
        assert "total_messages,75" in render_metrics_csv(report).splitlines()

    def test_events_jsonl_schema(self, report):
        lines = render_events_jsonl(report).strip().splitlines()
        assert len(lines) == len(report.event_log)
        first = json.loads(lines[0])
        assert set(first) == {"time", "seq", "kind", "from", "to", "payload_kind"}

    def test_allocations_csv_lists_grants(self, report):
        lines = render_allocations_csv(report).strip().splitlines()
        assert lines[0].startswith("su_id,pu_id,cpu_id,granted_channels")
        assert len(lines) == 1 + len(report.allocations)

    def test_empty_allocations_header_only(self):
        report = run(generate_scenario("cpu_csu", pu_count=1, cpu_count=1,
                                       su_groups=(1,), seed=1))
        # force emptiness by requesting more than any PU offers
        if report.allocations:
            report.allocations.clear()
        assert render_allocations_csv(report).strip().splitlines() == [
            "su_id,pu_id,cpu_id,granted_channels,offer_channels,price,alloc_time"
        ]

    def test_reexport_is_byte_identical(self, report, tmp_path):
        first = {p.name: p.read_bytes() for p in export_report(report, tmp_path / "a")}
        second = {p.name: p.read_bytes() for p in export_report(report, tmp_path / "b")}
        assert set(first) == {"metrics.csv", "events.jsonl", "allocations.csv"}
        assert first == second

    def test_table_csv_has_notes_and_rows(self):
        table = run_experiment(experiment_spec("exp_i"))
        text = render_table_csv(table)
        lines = text.splitlines()
        assert lines[0].startswith("# ")
        header_index = next(i for i, l in enumerate(lines) if not l.startswith("# "))
        assert lines[header_index].split(",")[:2] == ["label", "su_count"]
        assert len(lines) == header_index + 1 + 6


class TestCharts:
    def test_line_chart_shape(self, exp_i_table):
        svg = render_chart(exp_i_table, "line", "su_count", "run_response")
        assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
        assert svg.count("<polyline") == 1
        assert "su_count" in svg and "run_response" in svg

    def test_grouped_bar_chart_shape(self, exp_iv_table):
        svg = render_chart(exp_iv_table, "bar", "su_count", "total_messages",
                           series="topology")
        # 3 series x 2 sweep points = 6 bars, plus 3 legend swatches
        assert svg.count("<rect") == 1 + 6 + 3  # background + bars + legend
        for name in ("no_coalition", "cpu_only", "cpu_csu"):
            assert name in svg

    def test_single_row_table(self):
        table = MetricsTable("t", (), ("x", "y"), ((1, 2.0),))
        svg = render_chart(table, "line", "x", "y")
        assert "<circle" in svg
        svg = render_chart(table, "bar", "x", "y")
        assert "<rect" in svg

    def test_empty_table_rejected(self):
        table = MetricsTable("t", (), ("x", "y"), ())
        with pytest.raises(ValueError, match="empty"):
            render_chart(table, "line", "x", "y")

    def test_unknown_column_rejected(self, exp_i_table):
        with pytest.raises(ValueError, match="no column"):
            render_chart(exp_i_table, "line", "su_count", "wall_clock")

    def test_unknown_kind_rejected(self, exp_i_table):
        with pytest.raises(ValueError, match="kind"):
            render_chart(exp_i_table, "scatter", "su_count", "run_response")

    def test_deterministic(self, exp_i_table):
        a = render_chart(exp_i_table, "line", "su_count", "run_response")
        b = render_chart(exp_i_table, "line", "su_count", "run_response")
        assert a == b
