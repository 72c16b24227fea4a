import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellkit.cli import run_command
from bellkit.errors import ParseError, ValidationError
from bellkit.lhv import lhv_feasible
from bellkit.refmodels import nnmb2
from bellkit.scenario import SETTINGS, JointTables, analyze_model, analyze_tables
from bellkit.schema import (
    ReportFile,
    canonical_digest,
    model_document,
    parse_report,
    parse_scenario,
    render_report,
    tables_document,
)

from conftest import random_tables

UNIFORM = JointTables(**{tag: [0.25] * 4 for tag in SETTINGS})


def uniform_doc():
    return tables_document(UNIFORM)


def write(tmp_path, doc, name="in.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return str(path)


class TestParse:
    def test_uniform_tables(self):
        sc = parse_scenario(json.dumps(uniform_doc()))
        assert sc.kind == "tables"
        assert sc.tables.max_abs_difference(UNIFORM) == 0
        assert sc.adjustments == {}
        assert sc.digest.startswith("sha256:")

    def test_model_document(self):
        sc = parse_scenario(json.dumps(model_document(nnmb2(0.3, -0.6))))
        assert sc.kind == "model"
        r = analyze_model(sc.model)
        assert r.delta == pytest.approx(4.0, abs=1e-12)
        assert r.category == "(iii)"

    def test_density_state(self):
        doc = model_document(nnmb2())
        rho = np.diag([0, 0.5, 0.5, 0])
        doc["state"] = {"density": [[[float(x), 0.0] for x in row] for row in rho]}
        sc = parse_scenario(json.dumps(doc))
        assert np.allclose(sc.model.state.matrix, rho)

    def test_sum_too_large(self):
        doc = uniform_doc()
        doc["tables"]["AB"] = {"p11": 0.3, "p12": 0.3, "p21": 0.3, "p22": 0.3}
        with pytest.raises(ValidationError) as info:
            parse_scenario(json.dumps(doc))
        assert info.value.path == "tables.AB"
        assert str(info.value).startswith("tables.AB:")

    def test_small_deviation_renormalized(self):
        doc = uniform_doc()
        doc["tables"]["ApB"] = {"p11": 0.25, "p12": 0.25, "p21": 0.25, "p22": 0.2500004}
        sc = parse_scenario(json.dumps(doc))
        assert set(sc.adjustments) == {"ApB"}
        assert sc.adjustments["ApB"] == pytest.approx(1.0000004)
        assert abs(sc.tables["ApB"].sum() - 1) < 1e-15

    def test_missing_key(self):
        doc = uniform_doc()
        del doc["tables"]["ABp"]["p21"]
        with pytest.raises(ValidationError) as info:
            parse_scenario(json.dumps(doc))
        assert info.value.path == "tables.ABp"

    def test_bad_syntax(self):
        with pytest.raises(ParseError):
            parse_scenario("{not json")

    def test_bad_format(self):
        doc = uniform_doc()
        doc["format"] = "other/2"
        with pytest.raises(ValidationError) as info:
            parse_scenario(json.dumps(doc))
        assert info.value.path == "format"

    def test_bad_basis(self):
        doc = model_document(nnmb2())
        doc["measurements"]["ApB"]["basis"][1] = doc["measurements"]["ApB"]["basis"][0]
        with pytest.raises(ValidationError) as info:
            parse_scenario(json.dumps(doc))
        assert info.value.path == "measurements.ApB.basis"

    def test_bad_state_shape(self):
        doc = model_document(nnmb2())
        doc["state"] = {"vector": [[1, 0], [0, 0]]}
        with pytest.raises(ValidationError) as info:
            parse_scenario(json.dumps(doc))
        assert info.value.path == "state.vector"

    def test_unnormalized_state(self):
        doc = model_document(nnmb2())
        doc["state"] = {"vector": [[1, 0], [1, 0], [0, 0], [0, 0]]}
        with pytest.raises(ValidationError) as info:
            parse_scenario(json.dumps(doc))
        assert info.value.path == "state"

    def test_digest_ignores_key_order(self):
        a = {"x": 1, "y": [1, 2]}
        b = {"y": [1, 2], "x": 1}
        assert canonical_digest(a) == canonical_digest(b)


class TestRender:
    def test_nnmb2_text(self):
        text = render_report(ReportFile("demo", "d", analyze_model(nnmb2())))
        assert "nonlocal non-marginal box situation 2" in text
        assert "(iii)" in text
        assert "Delta" in text

    def test_no_violation_text(self):
        text = render_report(ReportFile("analyze", "d", analyze_tables(UNIFORM)))
        assert "no violation (Kolmogorovian model exists)" in text

    def test_json_round_trip(self):
        r = ReportFile("lhv", "d", analyze_tables(UNIFORM), lhv=lhv_feasible(UNIFORM).to_dict())
        text = render_report(r, "json")
        assert text.endswith("\n")
        assert parse_report(text).to_dict() == r.to_dict()

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.booleans())
    def test_round_trip_property(self, seed, with_lhv):
        t = random_tables(np.random.default_rng(seed))
        lhv = lhv_feasible(t).to_dict() if with_lhv else None
        r = ReportFile("analyze", canonical_digest({"seed": seed}), analyze_tables(t), {"AB": 1.0000001}, lhv=lhv)
        back = parse_report(render_report(r, "json"))
        assert back.to_dict() == r.to_dict()
        # text rendering of the parsed report is identical too
        assert render_report(back) == render_report(r)


class TestRunCommand:
    def test_demo_nnmb2_json(self, capsys):
        assert run_command(["demo", "nnmb2", "--json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["format"] == "bellkit-report/1"
        assert doc["analysis"]["delta"] == pytest.approx(4.0)
        assert doc["analysis"]["category"] == "(iii)"

    def test_demo_nonlocal_box(self, capsys):
        assert run_command(["demo", "nonlocal_box"]) == 0
        out = capsys.readouterr().out
        assert "category: (iv) nonlocal box situation" in out

    def test_lhv_uniform(self, tmp_path, capsys):
        path = write(tmp_path, uniform_doc())
        assert run_command(["lhv", path, "--json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["lhv"]["feasible"] is True

    def test_lhv_pr_box_text(self, tmp_path, capsys):
        from bellkit.refmodels import pr_box_tables

        path = write(tmp_path, tables_document(pr_box_tables()))
        assert run_command(["lhv", path]) == 0
        assert "infeasible" in capsys.readouterr().out

    def test_classify(self, tmp_path, capsys):
        path = write(tmp_path, uniform_doc())
        assert run_command(["classify", path]) == 0
        assert capsys.readouterr().out == "no-violation no violation (Kolmogorovian model exists)\n"

    def test_analyze_model_file(self, tmp_path, capsys):
        path = write(tmp_path, model_document(nnmb2()))
        assert run_command(["analyze", path, "--json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["analysis"]["measurement_kinds"]["AB"] == "product"

    def test_synthesize(self, tmp_path, capsys):
        from bellkit.refmodels import pr_box_tables

        path = write(tmp_path, tables_document(pr_box_tables()))
        assert run_command(["synthesize", path, "--json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["synthesis"]["residual"] <= 1e-9
        assert doc["synthesis"]["model_category"] == "(iv)"
        # the emitted model is itself a valid scenario file
        model = parse_scenario(json.dumps(doc["synthesis"]["model"]))
        assert model.kind == "model"

    def test_out_file(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        assert run_command(["demo", "singlet", "--json", "--out", str(out)]) == 0
        assert capsys.readouterr().out == ""
        assert parse_report(out.read_text()).analysis.category == "(i)"

    def test_deterministic(self, tmp_path, capsys):
        t = random_tables(np.random.default_rng(11))
        path = write(tmp_path, tables_document(t))
        outs = []
        for _ in range(2):
            assert run_command(["synthesize", path, "--json", "--seed", "3"]) == 0
            outs.append(capsys.readouterr().out)
        assert outs[0] == outs[1]

    def test_validation_error_exit_1(self, tmp_path, capsys):
        doc = uniform_doc()
        doc["tables"]["AB"]["p11"] = 0.45
        path = write(tmp_path, doc)
        assert run_command(["analyze", path]) == 1
        assert "tables.AB" in capsys.readouterr().err

    def test_parse_error_exit_1(self, tmp_path, capsys):
        path = write(tmp_path, "{oops")
        assert run_command(["analyze", path]) == 1
        assert "invalid JSON" in capsys.readouterr().err

    def test_missing_file_exit_1(self, tmp_path, capsys):
        assert run_command(["analyze", str(tmp_path / "nope.json")]) == 1

    def test_impossible_synthesis_exit_1(self, tmp_path, capsys):
        doc = tables_document(JointTables(**{tag: [1, 0, 0, 0] for tag in SETTINGS}))
        doc["state_hint"] = {"density": [[[0.25 if i == j else 0.0, 0.0] for j in range(4)] for i in range(4)]}
        path = write(tmp_path, doc)
        assert run_command(["synthesize", path, "--seed", "0"]) == 1
        assert "residual" in capsys.readouterr().err

    @pytest.mark.parametrize(
        "argv",
        [["frobnicate"], ["demo", "nosuch"], ["analyze"], ["demo", "nnmb2", "--bogus"], ["demo", "nnmb2", "--tolerance", "x"]],
    )
    def test_usage_errors_exit_2(self, argv, capsys):
        assert run_command(argv) == 2
        assert "usage" in capsys.readouterr().err
