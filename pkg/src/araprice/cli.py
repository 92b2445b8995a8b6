"""The ``price`` command: run, validate, and oracle-check scenario files.

Exit codes: 0 success, 2 missing file, 3 schema violation, 4 invariant
violation, 5 numeric failure; ``compare`` exits 1 when the engine and
oracle disagree beyond the z threshold.  Outputs embed seed, draw counts
and engine version, and are byte-identical across reruns with the same
seed, whatever the worker count.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from ._parallel import resolve_workers
from .core import (
    AgentBeliefs,
    EvaluationCurve,
    ProducerUtility,
    solve_supported_price,
)
from .oracle import (
    compare,
    exact_pension_acceptance,
    quadrature_retail_utility,
)
from .pension import OfferEvaluation, optimize_offer
from .randkit import CategoricalPMF, RngStream, normal_cdf, student_t_cdf
from .retail import optimize_price, sample_competitor_prices
from .scenario import (
    ScenarioError,
    ScenarioFile,
    TemplateScenario,
    parse_scenario,
)

RETAIL_COLUMNS = ("price", "accept_prob", "expected_utility", "std_err")
PENSION_COLUMNS = (
    "price",
    "accept_prob",
    "expected_utility",
    "benefit_next_year",
    "benefit_horizon",
    "std_err",
)


def _fmt(value) -> str:
    return repr(float(value))


def _curve_table(result) -> tuple[tuple, list[list[float]]]:
    if isinstance(result, OfferEvaluation):
        cols = PENSION_COLUMNS
        rows = list(
            zip(
                result.offers,
                result.accept_prob,
                result.expected_utility,
                result.benefit_next_year,
                result.benefit_horizon,
                result.std_err,
            )
        )
    else:
        cols = RETAIL_COLUMNS
        rows = list(
            zip(
                result.prices,
                result.accept_prob,
                result.expected_utility,
                result.std_err,
            )
        )
    return cols, [[float(v) for v in row] for row in rows]


def _summary(result, scenario: ScenarioFile) -> dict:
    if isinstance(result, OfferEvaluation):
        i = result.optimum_index
        benefit_next = float(result.benefit_next_year[i])
        benefit_horizon = float(result.benefit_horizon[i])
        n1, n2 = scenario.params.mc_draws, None
    else:
        benefit_next = None
        benefit_horizon = None
        if scenario.kind == "retail":
            n1, n2 = scenario.params.n1, scenario.params.n2
        else:
            n1, n2 = scenario.params.n_draws, None
    return {
        "optimum": result.optimum,
        "accept_prob_at_optimum": result.accept_at_optimum,
        "expected_utility": result.optimum_utility,
        "benefit_next_year": benefit_next,
        "benefit_horizon": benefit_horizon,
        "seed": scenario.seed,
        "n1": n1,
        "n2": n2,
        "wall_ms": None,  # kept out of files so reruns are byte-identical
        "engine_version": __version__,
    }


def _metadata_line(scenario: ScenarioFile, summary: dict) -> str:
    return (
        f"# araprice {__version__} kind={scenario.kind} seed={scenario.seed} "
        f"n1={summary['n1']} n2={summary['n2']}"
    )


def _write_outputs(result, scenario: ScenarioFile, out_base: Path) -> list[Path]:
    cols, rows = _curve_table(result)
    summary = _summary(result, scenario)
    written = []
    if scenario.format == "csv":
        csv_path = out_base.with_suffix(".csv")
        lines = [_metadata_line(scenario, summary), ",".join(cols)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        csv_path.write_text("\n".join(lines) + "\n")
        written.append(csv_path)
        summary_path = out_base.with_suffix(".summary.json")
        summary_path.write_text(json.dumps(summary, indent=2) + "\n")
        written.append(summary_path)
    else:
        json_path = out_base.with_suffix(".json")
        payload = {
            "summary": summary,
            "curve": {"columns": list(cols), "rows": rows},
        }
        json_path.write_text(json.dumps(payload, indent=2) + "\n")
        written.append(json_path)
    return written


def _run_template(
    params: TemplateScenario, rng: RngStream, workers: int
) -> EvaluationCurve:
    if params.choice_sigma is not None:
        sigma = params.choice_sigma
        model = lambda own, rivals: 1.0 - normal_cdf((own - rivals) / sigma)
    else:
        noise = params.choice_noise
        scale = float(np.sqrt(noise.shape / noise.scale))
        dof = 2.0 * noise.shape
        model = lambda own, rivals: 1.0 - student_t_cdf(scale * (own - rivals), dof)
    beliefs = params.competitor_prices
    if not isinstance(beliefs, CategoricalPMF):
        values = np.asarray(beliefs, dtype=float)
        g = rng.generator
        beliefs = values[g.integers(0, values.size, params.n_draws)]
        _, curve = solve_supported_price(
            params.grid, ProducerUtility.margin(params.cost), beliefs, model
        )
        return curve
    _, curve = solve_supported_price(
        params.grid,
        ProducerUtility.margin(params.cost),
        AgentBeliefs((beliefs,)),
        model,
        n_draws=params.n_draws,
        rng=rng,
    )
    return curve


def _run_engine(scenario: ScenarioFile, seed: int, workers: int):
    rng = RngStream(seed)
    if scenario.kind == "retail":
        return optimize_price(scenario.params, rng, workers=workers)
    if scenario.kind == "pension":
        return optimize_offer(scenario.params, rng, workers=workers)
    return _run_template(scenario.params, rng, workers)


def cmd_run(args) -> int:
    scenario = parse_scenario(args.scenario)
    seed = args.seed if args.seed is not None else scenario.seed
    scenario = ScenarioFile(
        scenario.kind, scenario.params, seed, scenario.output, scenario.format
    )
    workers = resolve_workers(args.workers)
    started = time.perf_counter()
    try:
        result = _run_engine(scenario, seed, workers)
    except (FloatingPointError, ValueError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 5
    wall_ms = int(round(1000 * (time.perf_counter() - started)))
    out_base = Path(
        args.out
        or scenario.output
        or Path(args.scenario).with_suffix("").name + "_result"
    )
    written = _write_outputs(result, scenario, out_base)
    print(
        f"optimum={result.optimum} accept={result.accept_at_optimum:.4f} "
        f"expected_utility={result.optimum_utility:.6g} seed={seed} "
        f"workers={workers} wall_ms={wall_ms}"
    )
    for path in written:
        print(f"wrote {path}")
    return 0


def _oracle_values(scenario: ScenarioFile, result, seed: int):
    """Per-grid-point oracle values and the engine columns to test them against."""
    params = scenario.params
    if scenario.kind == "pension":
        oracle = [
            exact_pension_acceptance(float(h), params) for h in result.offers
        ]
        return result.offers, result.accept_prob, result.std_err, oracle
    if scenario.kind == "retail":
        if params.known_competitor_price is not None:
            density = float(params.known_competitor_price)
        else:
            # refined forecast: same sampler, fresh stream, 32x the sample size
            density = sample_competitor_prices(
                dataclasses.replace(params, n1=32 * params.n1),
                RngStream(seed, stream_id=0xFACE),
            )
        oracle = [
            quadrature_retail_utility(float(p), params, density=density)
            for p in result.prices
        ]
        return result.prices, result.expected_utility, result.std_err, oracle
    # template: exact integration over the finite competitor-price distribution
    if isinstance(params.competitor_prices, CategoricalPMF):
        values = np.asarray(params.competitor_prices.values)
        weights = np.asarray(params.competitor_prices.probs)
    else:
        values = np.asarray(params.competitor_prices, dtype=float)
        weights = np.full(values.size, 1.0 / values.size)
    if params.choice_sigma is not None:
        win = 1.0 - normal_cdf(
            (result.prices[:, None] - values[None, :]) / params.choice_sigma
        )
    else:
        noise = params.choice_noise
        win = 1.0 - student_t_cdf(
            np.sqrt(noise.shape / noise.scale)
            * (result.prices[:, None] - values[None, :]),
            2.0 * noise.shape,
        )
    oracle = (result.prices - params.cost) * (win @ weights)
    return result.prices, result.expected_utility, result.std_err, list(oracle)


def cmd_compare(args) -> int:
    scenario = parse_scenario(args.scenario)
    seed = args.seed if args.seed is not None else scenario.seed
    workers = resolve_workers(args.workers)
    try:
        result = _run_engine(scenario, seed, workers)
        prices, estimates, std_errs, oracle = _oracle_values(scenario, result, seed)
    except (FloatingPointError, ValueError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 5
    report = compare(prices, estimates, std_errs, oracle, z_threshold=args.z)
    out_base = Path(args.out or Path(args.scenario).with_suffix("").name)
    report_path = out_base.with_suffix(".oracle.json")
    report_path.write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    status = "PASS" if report.passed else "FAIL"
    print(
        f"{status}: max |z| = {report.max_abs_z:.3f} "
        f"(threshold {report.z_threshold}) over {len(report.rows)} grid points"
    )
    print(f"wrote {report_path}")
    return 0 if report.passed else 1


def cmd_validate(args) -> int:
    scenario = parse_scenario(args.scenario)
    print(
        f"OK: valid {scenario.kind} scenario "
        f"(seed={scenario.seed}, format={scenario.format})"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="price",
        description="Pricing decision support under competition.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario and write curve + summary")
    run.add_argument("scenario", help="path to a scenario JSON file")
    run.add_argument("--seed", type=int, default=None, help="override the file seed")
    run.add_argument(
        "--workers", type=int, default=None,
        help="worker threads (default: PRICE_WORKERS or 1); never changes results",
    )
    run.add_argument("--out", default=None, help="output path base")
    run.set_defaults(fn=cmd_run)

    cmp_ = sub.add_parser("compare", help="run and z-test against the exact oracle")
    cmp_.add_argument("scenario")
    cmp_.add_argument("--z", type=float, default=3.0, help="|z| pass threshold")
    cmp_.add_argument("--seed", type=int, default=None)
    cmp_.add_argument("--workers", type=int, default=None)
    cmp_.add_argument("--out", default=None)
    cmp_.set_defaults(fn=cmd_compare)

    val = sub.add_parser("validate", help="parse and check every invariant")
    val.add_argument("scenario")
    val.set_defaults(fn=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
