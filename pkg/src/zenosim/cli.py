"""Command-line interface.

Subcommands:

* ``simulate``   run the protocol described by a config file, write record
                 files plus a digest manifest.
* ``analyze``    read record files back and produce run-length, survival or
                 scan tables with fits and corrections.
* ``theory``     print the closed-form predictions (no simulation).
* ``calibrate``  run a rabi or ramsey scan and fit the drive parameter.
"""

from __future__ import annotations

import argparse
import csv
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .calibration import FitError, fit_oscillation
from .detector import false_rates
from .fileio import (
    ConfigError,
    ParseError,
    detect_format,
    parse_config,
    read_scan,
    read_series,
    read_trajectory,
    write_manifest,
    write_scan,
    write_series,
    write_trajectory,
)
from .kernel import BACKEND
from .protocols import (
    run_fractionated_pi,
    run_rabi_scan,
    run_ramsey_scan,
    run_zeno_trajectory,
)
from .stats import (
    FitUnderdeterminedError,
    InvalidCorrectionError,
    apply_correction,
    estimate_intermediate,
    estimate_nonselective,
    estimate_selective,
    extract_runs,
    fit_theta,
    intermediate_survival,
    nonselective_survival,
    ratio_table,
    run_survival,
    selective_survival,
    survival_probability,
)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ParseError, FitError,
            FitUnderdeterminedError, InvalidCorrectionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zenosim",
        description="Simulate and analyze repeated-probing measurement "
                    "records of a driven trapped-ion qubit.")
    parser.add_argument("--version", action="version",
                        version=f"zenosim {__version__}")
    sub = parser.add_subparsers(required=True)

    sim = sub.add_parser("simulate", help="run a protocol, write record "
                                          "files and a manifest")
    sim.add_argument("--config", required=True, type=Path,
                     help="key=value config file")
    sim.add_argument("--seed", type=int, help="override the master seed")
    sim.add_argument("--out", required=True, type=Path,
                     help="output directory")
    sim.add_argument("--series", type=int, help="override the series count")
    sim.add_argument("--n", type=int, help="override the pulse fraction n")
    sim.add_argument("--variant", choices=("a", "b", "c"),
                     help="override the fractionated variant")
    sim.set_defaults(func=cmd_simulate)

    ana = sub.add_parser("analyze", help="tabulate statistics from record "
                                         "files")
    ana.add_argument("inputs", nargs="+", type=Path, help="record files")
    ana.add_argument("--out", type=Path, help="directory for CSV tables")
    ana.add_argument("--use-truth", action="store_true",
                     help="add diagnostics that read the simulation's "
                          "ground-truth columns")
    ana.set_defaults(func=cmd_analyze)

    theo = sub.add_parser("theory", help="print closed-form predictions")
    theo.add_argument("--n-max", type=int, default=9,
                      help="largest pulse fraction n to tabulate")
    theo.add_argument("--theta", help="pulse area expression (e.g. pi/2) "
                                      "for a run-length tail table")
    theo.add_argument("--q-max", type=int, default=10,
                      help="largest run length for the --theta table")
    theo.add_argument("--out", type=Path, help="directory for theory.csv")
    theo.set_defaults(func=cmd_theory)

    cal = sub.add_parser("calibrate", help="run a scan and fit the fringe")
    cal.add_argument("mode", choices=("rabi", "ramsey"))
    cal.add_argument("--config", required=True, type=Path)
    cal.add_argument("--seed", type=int, help="override the master seed")
    cal.add_argument("--out", type=Path,
                     help="directory for the scan record and fit summary")
    cal.set_defaults(func=cmd_calibrate)
    return parser


def _load_config(path: Path, overrides: dict[str, object]):
    text = path.read_text()
    chunks = []
    dropped = {key for key, value in overrides.items() if value is not None}
    for chunk in re.split(r"[\n,]", text):
        item = chunk.strip()
        if not item or item.startswith("#"):
            continue
        key = item.partition("=")[0].strip()
        if key not in dropped:
            chunks.append(item)
    for key, value in overrides.items():
        if value is not None:
            chunks.append(f"{key}={value}")
    return parse_config("\n".join(chunks))


def cmd_simulate(args) -> int:
    config = _load_config(args.config, {"seed": args.seed,
                                        "series": args.series,
                                        "n": args.n,
                                        "variant": args.variant})
    args.out.mkdir(parents=True, exist_ok=True)
    if config.protocol == "zeno":
        trajectory = run_zeno_trajectory(config)
        name = "trajectory.txt"
        write_trajectory(args.out / name, trajectory)
    elif config.protocol == "fractionated":
        records = run_fractionated_pi(config)
        name = f"series_n{config.fraction_n}{config.variant}.txt"
        write_series(args.out / name, config, records)
    else:
        scan = run_rabi_scan(config) if config.protocol == "rabi" \
            else run_ramsey_scan(config)
        name = "scan.txt"
        write_scan(args.out / name, scan)
    write_manifest(args.out, config, [name], "simulate")
    print(f"wrote {args.out / name} and manifest.json "
          f"(seed {config.master_seed}, {BACKEND} kernel)")
    return 0


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _analyze_trajectory(path: Path, args) -> None:
    trajectory = read_trajectory(path)
    bits = trajectory.classified_bits
    hist = extract_runs(bits)
    print(f"{path}: zeno trajectory, {len(trajectory)} measurements, "
          f"{hist.total_runs(0)} off-runs, {hist.total_runs(1)} on-runs")
    try:
        fit = fit_theta(hist)
    except FitUnderdeterminedError as exc:
        print(f"  pulse-area fit: underdetermined ({exc})")
        fit = None
    if fit is not None:
        print(f"  pulse area theta = {fit.theta:.6f} +- {fit.sigma:.6f} rad "
              f"(mirror alias {fit.alias:.6f})")
        print(f"  single-step survival p = {fit.p:.6f}, "
              f"log-tail slope {fit.log_slope:.6f} "
              f"+- {fit.log_slope_sigma:.6f}, "
              f"chi2 {fit.chi2:.2f} over {fit.n_bins} bins")
    theta = fit.theta if fit is not None else None
    rows = ratio_table(hist, outcome=0, theta=theta)
    if args.use_truth:
        wrong = int(np.sum(bits != trajectory.true_manifolds))
        print(f"  truth: {wrong} of {len(trajectory)} classifications "
              f"disagree with the actual manifold "
              f"({wrong / len(trajectory):.5f})")
    if args.out:
        out = args.out / f"runs_{path.stem}.csv"
        _write_csv(out, ["q", "count", "ratio", "sigma", "theory"],
                   [[r.q, r.count, f"{r.ratio!r}", f"{r.sigma!r}",
                     "" if r.theory is None else f"{r.theory!r}"]
                    for r in rows])
        print(f"  wrote {out}")


def _analyze_series_group(paths: list[Path], args) -> None:
    rows = []
    print("fractionated survival:")
    print("     n var   series        raw  corrected     sigma    "
          "selective  nonselective")
    for path in paths:
        config, records = read_series(path)
        n = config.fraction_n
        p_false_on, _ = false_rates(config.detector)
        f_prep = config.noise.preparation_error
        if config.variant == "c":
            est = estimate_selective(records, n)
        else:
            est = estimate_nonselective(records, n)
        est = apply_correction(est, f_prep, p_false_on)
        flag = " (clamped)" if est.clamped else ""
        print(f"  {n:4d}  {config.variant}  {est.n_series:7d}  "
              f"{est.raw_frequency:9.5f}  {est.corrected_frequency:9.5f}  "
              f"{est.sigma:8.5f}    {selective_survival(n):9.5f}  "
              f"{nonselective_survival(n):12.5f}{flag}")
        if args.use_truth:
            failed = sum(1 for r in records if not r.prepared_ok)
            print(f"        truth: {failed} failed preparations "
                  f"({failed / len(records):.4f} vs f_prep={f_prep})")
        rows.append([n, config.variant, est.n_series,
                     f"{est.raw_frequency!r}",
                     f"{est.corrected_frequency!r}", f"{est.sigma!r}",
                     f"{selective_survival(n)!r}",
                     f"{nonselective_survival(n)!r}"])
        if config.variant == "c" and n > 1:
            inter = estimate_intermediate(records, n)
            print(f"        intermediate (first {n - 1} probes off): "
                  f"{inter.raw_frequency:.5f} vs "
                  f"{intermediate_survival(n):.5f}")
    if args.out:
        out = args.out / "survival.csv"
        _write_csv(out, ["n", "variant", "series", "raw", "corrected",
                         "sigma", "selective_theory", "nonselective_theory"],
                   rows)
        print(f"  wrote {out}")


def _analyze_scan(path: Path, args) -> None:
    scan = read_scan(path)
    excitation = scan.excitation
    label = "rabi" if scan.config.protocol == "rabi" else "ramsey"
    print(f"{path}: {label} scan, {scan.bits.shape[0]} trajectories x "
          f"{scan.bits.shape[1]} steps")
    fit = fit_oscillation(scan.axis, excitation)
    if fit.no_fringe:
        print("  no detectable fringe")
    else:
        what = "Rabi frequency" if label == "rabi" else "detuning magnitude"
        print(f"  {what}: {fit.frequency:.4f} +- {fit.frequency_sigma:.4f} "
              f"rad/s (amplitude {fit.amplitude:.4f}, "
              f"offset {fit.offset:.4f})")
    if args.out:
        out = args.out / f"scan_{path.stem}.csv"
        _write_csv(out, ["step", "x", "excitation"],
                   [[k + 1, f"{scan.axis[k]!r}", f"{excitation[k]!r}"]
                    for k in range(len(excitation))])
        print(f"  wrote {out}")


def cmd_analyze(args) -> int:
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
    series_paths = []
    for path in args.inputs:
        kind = detect_format(path)
        if kind == "trajectory":
            _analyze_trajectory(path, args)
        elif kind == "scan":
            _analyze_scan(path, args)
        else:
            series_paths.append(path)
    if series_paths:
        _analyze_series_group(series_paths, args)
    return 0


def cmd_theory(args) -> int:
    lines = []
    if args.theta is not None:
        from .fileio import _parse_angle
        theta = _parse_angle(args.theta, "theta")
        p = survival_probability(theta)
        print(f"single-step survival p = {p!r} at theta = {theta!r}")
        header = ["q", "tail_ratio"]
        lines = [[q, f"{run_survival(q - 1, theta)!r}"]
                 for q in range(1, args.q_max + 1)]
    else:
        if args.n_max < 1:
            raise ConfigError("--n-max must be >= 1")
        header = ["n", "selective", "intermediate", "nonselective"]
        lines = [[n, f"{selective_survival(n)!r}",
                  f"{intermediate_survival(n)!r}",
                  f"{nonselective_survival(n)!r}"]
                 for n in range(1, args.n_max + 1)]
    writer = csv.writer(sys.stdout)
    writer.writerow(header)
    writer.writerows(lines)
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        _write_csv(args.out / "theory.csv", header, lines)
    return 0


def cmd_calibrate(args) -> int:
    config = _load_config(args.config, {"seed": args.seed})
    if config.protocol != args.mode:
        raise ConfigError(f"calibrate {args.mode} needs a config with "
                          f"protocol={args.mode}, got {config.protocol!r}")
    scan = run_rabi_scan(config) if args.mode == "rabi" \
        else run_ramsey_scan(config)
    fit = fit_oscillation(scan.axis, scan.excitation)
    if fit.no_fringe:
        print("no detectable fringe")
    else:
        target = "Rabi frequency" if args.mode == "rabi" else \
            "fringe frequency (detuning magnitude)"
        print(f"{target}: {fit.frequency!r} +- {fit.frequency_sigma!r} rad/s")
        print(f"amplitude {fit.amplitude:.5f}, offset {fit.offset:.5f}, "
              f"phase {fit.phase:.5f}")
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        write_scan(args.out / "scan.txt", scan)
        summary = args.out / "fit.txt"
        with open(summary, "w", newline="\n") as fh:
            fh.write(f"mode={args.mode}\n")
            fh.write(f"no_fringe={1 if fit.no_fringe else 0}\n")
            if not fit.no_fringe:
                fh.write(f"frequency={fit.frequency!r}rad/s\n")
                fh.write(f"frequency_sigma={fit.frequency_sigma!r}rad/s\n")
                fh.write(f"amplitude={fit.amplitude!r}\n")
                fh.write(f"offset={fit.offset!r}\n")
                fh.write(f"phase={fit.phase!r}rad\n")
        write_manifest(args.out, config, ["scan.txt", "fit.txt"], "calibrate")
        print(f"wrote {args.out / 'scan.txt'}, {summary} and manifest.json")
    return 0


if __name__ == "__main__":
    sys.exit(main())
