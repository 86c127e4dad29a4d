"""Command-line interface.

Subcommands: simulate, tea, metrics, sweep, validate.  Exit codes: 0 success,
1 runtime failure, 2 usage/config error, 3 validation or golden mismatch.
Outputs are deterministic for identical (scenario bytes, seed, flags); every
output directory receives a run manifest sufficient to reproduce the run.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .config import ConfigError, ScenarioConfig, default_scenario_path, load_scenario
from .jsonio import atomic_write_text, dumps_stable, sha256_hex, write_csv
from .model import DomainError

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2
EXIT_VALIDATION = 3

OUT_DIR_ENV = "PHONELINE_OUT"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phoneline",
        description="Simulate an automated phone disassembly line and analyse its economics.")
    parser.add_argument("--version", action="version", version=f"phoneline {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default=None,
                       help=f"output directory (default ${OUT_DIR_ENV} or ./out)")
        p.add_argument("--json", action="store_true", help="print the summary as JSON")
        p.add_argument("--warn-unknown", action="store_true",
                       help="warn on unknown scenario keys instead of failing")

    p_sim = sub.add_parser("simulate", help="run the line simulation")
    p_sim.add_argument("scenario", nargs="?", default=None, help="scenario JSON path")
    p_sim.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p_sim.add_argument("--reps", type=int, default=None, help="override replication count")
    p_sim.add_argument("--trace", action="store_true", help="emit per-event CSV traces")
    common(p_sim)

    p_tea = sub.add_parser("tea", help="produce the techno-economic report")
    p_tea.add_argument("scenario", nargs="?", default=None)
    p_tea.add_argument("--compare", metavar="DIR", default=None,
                       help="diff the rendered tables against golden CSVs in DIR")
    common(p_tea)

    p_met = sub.add_parser("metrics", help="evaluate detection files")
    p_met.add_argument("predictions", help="predictions JSONL")
    p_met.add_argument("truths", help="ground-truth JSONL")
    p_met.add_argument("--iou", type=float, default=0.5, help="matching IoU threshold")
    p_met.add_argument("--conf", type=float, default=0.8, help="confidence threshold")
    common(p_met)

    p_swp = sub.add_parser("sweep", help="sensitivity sweep over parameter axes")
    p_swp.add_argument("scenario", nargs="?", default=None)
    p_swp.add_argument("--axis", action="append", default=[],
                       metavar="NAME=V1,V2,...",
                       help="economic or station parameter axis (repeatable)")
    p_swp.add_argument("--seed", type=int, default=None)
    common(p_swp)

    p_val = sub.add_parser("validate", help="run the built-in release checks")
    p_val.add_argument("--scenario", default=None,
                       help="override the bundled scenario (for what-if validation)")
    common(p_val)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # runtime failure
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def _dispatch(args) -> int:
    if args.command == "simulate":
        return _cmd_simulate(args)
    if args.command == "tea":
        return _cmd_tea(args)
    if args.command == "metrics":
        return _cmd_metrics(args)
    if args.command == "sweep":
        return _cmd_sweep(args)
    if args.command == "validate":
        return _cmd_validate(args)
    raise ConfigError(f"unknown command {args.command}")


def _out_dir(args) -> Path:
    base = args.out or os.environ.get(OUT_DIR_ENV) or "out"
    return Path(base)


def _load(args, path_attr: str = "scenario") -> tuple[ScenarioConfig, Path]:
    raw = getattr(args, path_attr, None)
    path = Path(raw) if raw else default_scenario_path()
    scenario = load_scenario(path, strict=not getattr(args, "warn_unknown", False))
    return scenario, path


def _write_manifest(out: Path, args, scenario_path: Path, seed: int, reps: int) -> None:
    manifest = {
        "command": args.command,
        "scenario_path": str(scenario_path),
        "scenario_sha256": sha256_hex(scenario_path.read_bytes()),
        "seed": seed,
        "replications": reps,
        "out_dir": str(out),
        "tool_version": __version__,
    }
    atomic_write_text(out / "run_manifest.json", dumps_stable(manifest))


def _cmd_simulate(args) -> int:
    from .stations import aggregate_reports, run_simulation

    scenario, path = _load(args)
    if args.seed is not None:
        scenario = replace(scenario, seed=args.seed)
    reps = args.reps if args.reps is not None else scenario.replications
    if reps < 1:
        raise ConfigError("--reps must be >= 1")
    out = _out_dir(args)
    reports = []
    for r in range(reps):
        report = run_simulation(scenario, replication=r, trace=args.trace)
        reports.append(report)
        atomic_write_text(out / f"sim_report_rep{r:03d}.json", dumps_stable(report.to_dict()))
        write_csv(out / f"hazards_rep{r:03d}.csv",
                  ["time_s", "uid", "description"],
                  [[_num(h.time), h.uid, h.description] for h in report.hazards])
        if args.trace and report.trace is not None:
            write_csv(out / f"trace_rep{r:03d}.csv",
                      ["time", "seq", "kind", "uid", "station"],
                      [[_num(t), s, k, u, st] for t, s, k, u, st in report.trace])
    aggregate = aggregate_reports(reports)
    atomic_write_text(out / "aggregate.json", dumps_stable(aggregate))
    _write_manifest(out, args, path, scenario.seed, reps)
    summary = {
        "replications": reps,
        "mean_throughput_phph": aggregate["throughput_phph"]["mean"],
        "mean_steady_state_throughput_phph": aggregate["steady_state_throughput_phph"]["mean"],
        "mean_hazard_rate_per_phone": aggregate["hazard_rate_per_phone"]["mean"],
        "mean_phone_success_rate": aggregate["phone_success_rate"]["mean"],
        "out_dir": str(out),
    }
    _emit(args, summary,
          f"simulated {reps} replication(s): steady-state "
          f"{summary['mean_steady_state_throughput_phph']:.2f} phones/h -> {out}")
    return EXIT_OK


def _cmd_tea(args) -> int:
    from . import tea

    scenario, path = _load(args)
    out = _out_dir(args)
    report = tea.build_tea_report(scenario.economics)
    atomic_write_text(out / "tea_report.json", dumps_stable(report.to_dict()))
    for name, text in tea.render_subtables(report).items():
        atomic_write_text(out / name, text)
    _write_manifest(out, args, path, scenario.seed, 1)
    if args.compare:
        mismatches = tea.compare_golden(report, args.compare)
        if mismatches:
            for m in mismatches:
                print(f"golden mismatch: {m}", file=sys.stderr)
            return EXIT_VALIDATION
    summary = {
        "profit_per_lb_usd": report.automated.profit_per_lb,
        "manual_profit_per_lb_usd": report.manual.profit_per_lb,
        "unsupervised_profit_per_lb_usd": report.unsupervised.profit_per_lb,
        "out_dir": str(out),
    }
    _emit(args, summary,
          f"tea report -> {out} (profit {report.automated.profit_per_lb.render()} USD/lb)")
    return EXIT_OK


def _cmd_metrics(args) -> int:
    from .metrics import evaluate, load_jsonl

    preds = load_jsonl(args.predictions)
    truths = load_jsonl(args.truths)
    report = evaluate(preds, truths, iou_t=args.iou, conf_t=args.conf)
    out = _out_dir(args)
    atomic_write_text(out / "metrics_report.json", dumps_stable(report))
    manifest = {
        "command": "metrics",
        "predictions": str(args.predictions),
        "predictions_sha256": sha256_hex(Path(args.predictions).read_bytes()),
        "truths": str(args.truths),
        "truths_sha256": sha256_hex(Path(args.truths).read_bytes()),
        "iou": args.iou,
        "conf": args.conf,
        "tool_version": __version__,
    }
    atomic_write_text(out / "run_manifest.json", dumps_stable(manifest))
    if args.json:
        print(dumps_stable(report), end="")
    else:
        map_txt = "n/a" if report["map_50_95"] is None else f"{report['map_50_95']:.4f}"
        print(f"metrics report -> {out} (mAP50-95 {map_txt})")
    return EXIT_OK


def _parse_axes(specs: list[str]) -> dict[str, list[float]]:
    axes: dict[str, list[float]] = {}
    for spec in specs:
        if "=" not in spec:
            raise ConfigError(f"--axis {spec!r}: expected NAME=V1,V2,...")
        name, _, values = spec.partition("=")
        name = name.strip()
        try:
            axes[name] = [float(v) for v in values.split(",") if v.strip() != ""]
        except ValueError:
            raise ConfigError(f"--axis {name}: values must be numbers")
        if not axes[name]:
            raise ConfigError(f"--axis {name}: needs at least one value")
    return axes


def _cmd_sweep(args) -> int:
    import itertools

    from .config import StationParams
    from .stations import run_simulation
    from . import tea as tea_mod

    scenario, path = _load(args)
    if args.seed is not None:
        scenario = replace(scenario, seed=args.seed)
    axes = _parse_axes(args.axis)
    if not axes:
        raise ConfigError("sweep needs at least one --axis NAME=V1,V2,...")
    econ_fields = set(tea_mod._SWEEPABLE)
    station_fields = {f for f in StationParams._TIME_FIELDS} | {"chill_batch_capacity"}
    for name in axes:
        if name not in econ_fields and name not in station_fields:
            raise ConfigError(
                f"unknown sweep axis {name!r}; economic axes: {', '.join(sorted(econ_fields))}; "
                f"station axes: {', '.join(sorted(station_fields))}")
    needs_sim = any(name in station_fields for name in axes)
    names = list(axes)
    rows = []
    for combo in itertools.product(*(axes[n] for n in names)):
        overrides = dict(zip(names, combo))
        econ = replace(scenario.economics,
                       **{k: v for k, v in overrides.items() if k in econ_fields})
        econ.validate()
        summary = tea_mod.automated_economics(econ)
        row = dict(overrides)
        row["profit_per_lb_usd"] = summary.profit_per_lb
        row["cost_per_lb_usd"] = summary.cost_per_lb
        if needs_sim:
            st_over = {k: (int(v) if k == "chill_batch_capacity" else v)
                       for k, v in overrides.items() if k in station_fields}
            cfg = replace(scenario, stations=replace(scenario.stations, **st_over),
                          economics=econ)
            report = run_simulation(cfg)
            row["steady_state_throughput_phph"] = report.steady_state_throughput_phph
            row["throughput_phph"] = report.throughput_phph
        rows.append(row)
    out = _out_dir(args)
    header = list(rows[0].keys())
    write_csv(out / "sweep.csv", header,
              [[_cell(r[h]) for h in header] for r in rows])
    # long-format plot data: x = first axis value, one series per measure
    measures = [h for h in header if h not in names]
    plot_rows = []
    for r in rows:
        series_suffix = "".join(f"|{n}={_cell(r[n])}" for n in names[1:])
        for m in measures:
            plot_rows.append([_cell(r[names[0]]), _cell(r[m]), m + series_suffix])
    write_csv(out / "plot_data.csv", ["x", "y", "series"], plot_rows)
    _write_manifest(out, args, path, scenario.seed, 1)
    _emit(args, {"rows": len(rows), "axes": names, "out_dir": str(out)},
          f"sweep over {names} -> {len(rows)} row(s) in {out}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    from .validate import run_all

    scenario = None
    if args.scenario:
        scenario = load_scenario(args.scenario, strict=not args.warn_unknown)
    results = run_all(scenario)
    all_ok = all(r.passed for r in results)
    if args.json:
        print(dumps_stable({
            "passed": all_ok,
            "criteria": [r.to_dict() for r in results],
        }), end="")
    else:
        for r in results:
            print(f"[{r.criterion:2d}] {'PASS' if r.passed else 'FAIL'}  {r.name}")
            for line in r.details:
                print(f"       {line}")
        print(f"\n{'all criteria passed' if all_ok else 'VALIDATION FAILED'}")
    return EXIT_OK if all_ok else EXIT_VALIDATION


def _emit(args, summary: dict, text: str) -> None:
    if args.json:
        print(dumps_stable(summary), end="")
    else:
        print(text)


def _num(x) -> str:
    return f"{x:.6g}"


def _cell(x) -> str:
    from .jsonio import Fixed2
    if isinstance(x, Fixed2):
        return x.render()
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


if __name__ == "__main__":
    sys.exit(main())
