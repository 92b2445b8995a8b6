"""Scenario files and the ``price`` command line."""

import json
from pathlib import Path

import pytest

from araprice.cli import main
from araprice.pension import PensionScenario
from araprice.retail import RetailScenario
from araprice.scenario import (
    InvariantError,
    MissingFileError,
    SchemaError,
    bundled_case,
    bundled_case_names,
    parse_scenario,
    scenario_to_dict,
)

RETAIL_HEADER = "price,accept_prob,expected_utility,std_err"
PENSION_HEADER = (
    "price,accept_prob,expected_utility,benefit_next_year,benefit_horizon,std_err"
)


class TestParsing:
    def test_bundled_retail_benchmark(self):
        sc = parse_scenario(bundled_case("retail_case1"))
        assert sc.kind == "retail" and isinstance(sc.params, RetailScenario)
        p = sc.params
        assert p.cost == 5.0 and p.max_price == 50.0
        assert p.fixed_sigma == 0.01
        assert p.known_competitor_price == 30.0
        assert p.competitor_max_price == 40.0

    def test_bundled_pension_benchmark(self):
        sc = parse_scenario(bundled_case("pension_case1"))
        assert sc.kind == "pension" and isinstance(sc.params, PensionScenario)
        p = sc.params
        assert p.capital == 30_000.0 and p.earn_rate == 0.07
        assert p.horizon == 8 and p.penalty_fraction == 0.8
        assert p.exit_profile.q_exit == (0.15, 0.05, 0.04, 0.03, 0.02, 0.01, 0.0)
        assert p.n_competitors == 1

    def test_all_bundled_cases_parse(self):
        for name in bundled_case_names():
            parse_scenario(bundled_case(name))

    def test_missing_file(self):
        with pytest.raises(MissingFileError):
            parse_scenario("/nonexistent/path.json")

    def test_schema_violations(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(SchemaError):
            parse_scenario(bad)
        bad.write_text(json.dumps({"kind": "retail", "params": {}}))
        with pytest.raises(SchemaError, match="seed"):
            parse_scenario(bad)
        bad.write_text(json.dumps({"kind": "nope", "params": {}, "seed": 1}))
        with pytest.raises(SchemaError, match="kind"):
            parse_scenario(bad)

    def test_invariant_violation_names_field(self, tmp_path):
        raw = json.loads(bundled_case("pension_case1").read_text())
        raw["params"]["competitor_offers"]["probs"] = [0.05] * 9 + [0.45]
        bad = tmp_path / "bad_pmf.json"
        bad.write_text(json.dumps(raw))
        with pytest.raises(InvariantError, match="competitor_offers"):
            parse_scenario(bad)
        raw["params"]["competitor_offers"]["probs"] = [0.1] * 9  # sums to 0.9
        bad.write_text(json.dumps(raw))
        with pytest.raises(InvariantError, match="competitor_offers"):
            parse_scenario(bad)

    def test_multiple_invariants_reported_together(self, tmp_path):
        raw = json.loads(bundled_case("retail_case3").read_text())
        raw["params"]["n1"] = 0
        raw["params"]["grid_step"] = -1.0
        bad = tmp_path / "two_bad.json"
        bad.write_text(json.dumps(raw))
        with pytest.raises(InvariantError) as err:
            parse_scenario(bad)
        assert "n1" in str(err.value) and "grid_step" in str(err.value)

    @pytest.mark.parametrize(
        "name", ["retail_case1", "pension_case1", "template_example"]
    )
    def test_round_trip(self, name, tmp_path):
        sc = parse_scenario(bundled_case(name))
        encoded = tmp_path / "again.json"
        encoded.write_text(json.dumps(scenario_to_dict(sc)))
        again = parse_scenario(encoded)
        assert again.kind == sc.kind
        assert again.seed == sc.seed
        assert again.params == sc.params


class TestCli:
    def test_run_retail_benchmark(self, tmp_path, capsys):
        out = tmp_path / "case1"
        code = main(["run", str(bundled_case("retail_case1")), "--out", str(out)])
        assert code == 0
        stdout = capsys.readouterr().out
        assert "optimum=29.5" in stdout
        csv_text = out.with_suffix(".csv").read_text()
        lines = csv_text.splitlines()
        assert lines[0].startswith("# araprice") and "seed=42" in lines[0]
        assert lines[1] == RETAIL_HEADER
        summary = json.loads(out.with_suffix(".summary.json").read_text())
        assert summary["optimum"] == 29.5
        assert summary["seed"] == 42
        assert summary["n1"] == 100 and summary["n2"] == 100
        assert summary["wall_ms"] is None
        assert set(summary) >= {
            "optimum",
            "accept_prob_at_optimum",
            "expected_utility",
            "benefit_next_year",
            "benefit_horizon",
            "seed",
            "n1",
            "n2",
            "wall_ms",
        }

    def test_run_pension_columns(self, tmp_path):
        out = tmp_path / "pension"
        code = main(["run", str(bundled_case("pension_case1")), "--out", str(out)])
        assert code == 0
        lines = out.with_suffix(".csv").read_text().splitlines()
        assert lines[1] == PENSION_HEADER
        summary = json.loads(out.with_suffix(".summary.json").read_text())
        assert summary["benefit_next_year"] is not None
        assert summary["n1"] == 10_000 and summary["n2"] is None

    def test_run_template(self, tmp_path):
        out = tmp_path / "tpl"
        code = main(["run", str(bundled_case("template_example")), "--out", str(out)])
        assert code == 0
        lines = out.with_suffix(".csv").read_text().splitlines()
        assert lines[1] == RETAIL_HEADER

    def test_exit_codes(self, tmp_path, capsys):
        assert main(["run", str(tmp_path / "missing.json")]) == 2
        bad = tmp_path / "bad.json"
        bad.write_text("{oops")
        assert main(["run", str(bad)]) == 3
        raw = json.loads(bundled_case("retail_case1").read_text())
        raw["params"]["n1"] = -3
        bad.write_text(json.dumps(raw))
        assert main(["run", str(bad)]) == 4

    def test_determinism_across_runs_and_workers(self, tmp_path):
        case = bundled_case("retail_case3")
        paths = []
        for tag, workers in (("a", "1"), ("b", "4")):
            out = tmp_path / f"run_{tag}"
            assert main(
                ["run", str(case), "--out", str(out), "--workers", workers]
            ) == 0
            paths.append(
                (
                    out.with_suffix(".csv").read_bytes(),
                    out.with_suffix(".summary.json").read_bytes(),
                )
            )
        assert paths[0] == paths[1]

    def test_seed_override_changes_result(self, tmp_path):
        case = bundled_case("retail_case3")
        a, b = tmp_path / "s1", tmp_path / "s2"
        main(["run", str(case), "--out", str(a), "--seed", "1"])
        main(["run", str(case), "--out", str(b), "--seed", "2"])
        assert a.with_suffix(".csv").read_bytes() != b.with_suffix(".csv").read_bytes()

    def test_compare_pension(self, tmp_path, capsys):
        out = tmp_path / "cmp"
        code = main(
            ["compare", str(bundled_case("pension_case1")), "--out", str(out)]
        )
        report = json.loads(out.with_suffix(".oracle.json").read_text())
        assert code == 0, report
        assert report["passed"] is True
        assert "PASS" in capsys.readouterr().out

    def test_compare_retail_known_price(self, tmp_path):
        out = tmp_path / "cmp_retail"
        code = main(
            ["compare", str(bundled_case("retail_case2")), "--out", str(out)]
        )
        assert code == 0
        report = json.loads(out.with_suffix(".oracle.json").read_text())
        assert report["max_abs_z"] == 0.0  # deterministic engine, exact oracle

    def test_compare_template(self, tmp_path):
        out = tmp_path / "cmp_tpl"
        code = main(
            ["compare", str(bundled_case("template_example")), "--out", str(out)]
        )
        assert code == 0

    def test_validate(self, capsys):
        assert main(["validate", str(bundled_case("pension_case2_low"))]) == 0
        assert "OK" in capsys.readouterr().out

    def test_workers_env_var_default(self, tmp_path, monkeypatch):
        case = bundled_case("pension_case1")
        base = tmp_path / "w1"
        assert main(["run", str(case), "--out", str(base), "--workers", "1"]) == 0
        monkeypatch.setenv("PRICE_WORKERS", "3")
        env = tmp_path / "wenv"
        assert main(["run", str(case), "--out", str(env)]) == 0
        assert (
            base.with_suffix(".csv").read_bytes() == env.with_suffix(".csv").read_bytes()
        )

    def test_numeric_failure_exit_code(self, monkeypatch, capsys):
        import araprice.cli as cli

        def boom(*args, **kwargs):
            raise FloatingPointError("synthetic overflow")

        monkeypatch.setattr(cli, "optimize_price", boom)
        assert main(["run", str(bundled_case("retail_case1"))]) == 5
        assert "numeric failure" in capsys.readouterr().err

    def test_curve_probability_bounds(self, tmp_path):
        out = tmp_path / "bounds"
        main(["run", str(bundled_case("retail_case3")), "--out", str(out)])
        rows = out.with_suffix(".csv").read_text().splitlines()[2:]
        accepts = [float(r.split(",")[1]) for r in rows]
        assert all(0.0 <= a <= 1.0 for a in accepts)

    def test_json_format_output(self, tmp_path):
        raw = json.loads(bundled_case("retail_case1").read_text())
        raw["format"] = "json"
        src = tmp_path / "json_fmt.json"
        src.write_text(json.dumps(raw))
        out = tmp_path / "result"
        assert main(["run", str(src), "--out", str(out)]) == 0
        payload = json.loads(out.with_suffix(".json").read_text())
        assert payload["summary"]["optimum"] == 29.5
        assert payload["curve"]["columns"] == RETAIL_HEADER.split(",")
