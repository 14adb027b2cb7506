"""Command-line pipeline: generate -> simulate -> analyze -> report.

Exit codes: 0 success, 1 failure, 2 usage error, 3 completed with excluded
events.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from .config import ConfigError, RunConfig, load_config
from .engine import Exclusion, run_batch
from .generator import PRESETS, generate_suite
from .report import (event_metrics_table, histogram_panels, histogram_svg, never_braked_rows,
                     read_exclusions, read_metrics, read_results, scenario_exclusion_rows,
                     summary_document, write_exclusions, write_histogram_csv, write_metrics,
                     write_results, write_summary)
from .scenario import InvariantViolation, ParseError, read_scenario, write_scenario

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_PARTIAL = 0, 1, 2, 3
SEED_ENV = "REFDRIVER_SEED"


class CliError(Exception):
    pass


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="JSON run configuration")
    p.add_argument("--scenarios", metavar="DIR", help="scenario directory (default OUT/scenarios)")
    p.add_argument("--out", metavar="DIR", help="output root directory")
    p.add_argument("--models", metavar="LIST", help="comma-separated subset of ccdm,fsm,none")
    p.add_argument("--seed", type=int, help=f"generator seed (overridden by ${SEED_ENV})")
    p.add_argument("--n", type=int, help="number of scenarios to generate")
    p.add_argument("--preset", choices=PRESETS)
    p.add_argument("--dt", type=float, help="simulation step (s)")
    p.add_argument("--workers", type=int, help="parallel simulation processes")
    p.add_argument("--svg", action="store_true", help="also write SVG histograms")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="refdriver", description=__doc__.splitlines()[0])
    parser.add_argument("--dump-config", action="store_true",
                        help="print the effective configuration and exit")
    _add_common(parser)
    sub = parser.add_subparsers(dest="command")
    for name, help_ in (("generate", "write synthetic scenario files"),
                        ("simulate", "run driver models on every scenario"),
                        ("analyze", "compute per-event metrics and the summary"),
                        ("report", "write histogram tables (and SVG charts)"),
                        ("dump-config", "print the effective configuration")):
        _add_common(sub.add_parser(name, help=help_, argument_default=argparse.SUPPRESS))
    return parser


def effective_config(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    updates = {}
    if getattr(args, "out", None):
        updates["output_dir"] = args.out
    if getattr(args, "scenarios", None):
        updates["scenario_dir"] = args.scenarios
    if getattr(args, "models", None) is not None:
        updates["models"] = tuple(m.strip() for m in args.models.split(",") if m.strip())
    for key in ("n", "preset", "dt", "workers", "seed"):
        if getattr(args, key, None) is not None:
            updates[key] = getattr(args, key)
    env_seed = os.environ.get(SEED_ENV)
    if env_seed:
        try:
            updates["seed"] = int(env_seed)
        except ValueError as exc:
            raise ConfigError(f"${SEED_ENV} must be an integer, got {env_seed!r}") from exc
    return replace(cfg, **updates)


def cli_generate(cfg: RunConfig) -> int:
    out = cfg.scenarios_path
    out.mkdir(parents=True, exist_ok=True)
    scenarios = generate_suite(cfg.n, cfg.seed, cfg.preset)
    for s in scenarios:
        write_scenario(s, out / f"{s.id}.json")
    print(f"wrote {len(scenarios)} scenarios to {out}")
    return EXIT_OK


def _load_scenarios(directory: Path):
    files = sorted(directory.glob("*.json")) if directory.is_dir() else []
    if not files:
        raise CliError(f"no scenarios found in {directory}")
    scenarios, bad = [], []
    for f in files:
        try:
            scenarios.append(read_scenario(f))
        except (ParseError, InvariantViolation) as exc:
            bad.append(Exclusion(f.stem, "InvalidScenario", str(exc)))
    return scenarios, bad


def cli_simulate(cfg: RunConfig) -> int:
    scenarios, bad = _load_scenarios(cfg.scenarios_path)
    models = list(cfg.models)
    if "none" not in models:
        # the worst-case run is what crash avoidance is judged against
        models.append("none")
    batch = run_batch(scenarios, models, cfg.dt, cfg.ccdm, cfg.fsm, cfg.workers,
                      cfg.human_onset_threshold)
    excluded = sorted(bad + batch.excluded, key=lambda e: e.scenario_id)
    res_dir = Path(cfg.output_dir) / "results"
    write_results(res_dir / "results.csv", batch.results)
    write_exclusions(res_dir / "excluded.csv", scenario_exclusion_rows(excluded))
    print(f"simulated {len(scenarios) - len(batch.excluded)} scenarios x {len(models)} models; "
          f"{len(excluded)} excluded")
    for e in excluded:
        print(f"  excluded {e.scenario_id}: {e.reason}", file=sys.stderr)
    return EXIT_PARTIAL if excluded else EXIT_OK


def cli_analyze(cfg: RunConfig) -> int:
    res_dir = Path(cfg.output_dir) / "results"
    if not (res_dir / "results.csv").exists():
        raise CliError(f"no results found in {res_dir}; run 'simulate' first")
    results = read_results(res_dir / "results.csv")
    if not results:
        raise CliError("results.csv holds no simulations")
    scenarios, _ = _load_scenarios(cfg.scenarios_path)
    by_id = {s.id: s for s in scenarios}
    missing = sorted({r.scenario_id for r in results} - set(by_id))
    if missing:
        raise CliError(f"scenario files missing for: {', '.join(missing)}")
    rows = event_metrics_table(results, by_id)
    out = Path(cfg.output_dir) / "analysis"
    write_metrics(out / "metrics.csv", rows)
    write_summary(out / "summary.json", summary_document(rows, cfg.alpha))
    prior = []
    if (res_dir / "excluded.csv").exists():
        prior = [(r["scenario_id"], r["model"], r["reason"], r["detail"])
                 for r in read_exclusions(res_dir / "excluded.csv")]
    write_exclusions(out / "exclusions.csv", sorted(prior + never_braked_rows(rows)))
    print(f"analyzed {len(rows)} (scenario, model) pairs -> {out}")
    return EXIT_OK


def cli_report(cfg: RunConfig, svg: bool = False) -> int:
    out = Path(cfg.output_dir) / "analysis"
    if not (out / "metrics.csv").exists():
        raise CliError(f"no metrics found in {out}; run 'analyze' first")
    rows = read_metrics(out / "metrics.csv")
    panels = histogram_panels(rows, cfg.histogram_bin_time, cfg.histogram_bin_dist)
    for stem, (h, crash, label) in panels.items():
        write_histogram_csv(out / f"{stem}.csv", h, crash)
        if svg:
            (out / f"{stem}.svg").write_text(histogram_svg(h, crash, label), encoding="utf-8")
    print(f"wrote {len(panels)} histogram panels to {out}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = effective_config(args)
        if args.dump_config or args.command == "dump-config":
            sys.stdout.write(cfg.dumps())
            return EXIT_OK
        if args.command is None:
            parser.print_help()
            return EXIT_USAGE
        if args.command == "generate":
            return cli_generate(cfg)
        if args.command == "simulate":
            return cli_simulate(cfg)
        if args.command == "analyze":
            return cli_analyze(cfg)
        return cli_report(cfg, svg=getattr(args, "svg", False))
    except (CliError, ConfigError, ParseError, InvariantViolation, ValueError) as exc:
        print(f"refdriver: error: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
