"""Plain-text formats: run configuration, record files, and the manifest.

Configurations are ``key=value`` pairs separated by newlines or commas, with
explicit units on dimensioned quantities:

    times        4.9ms, 2ms, 300us, 0.0049s
    frequencies  318.3rad/s or 50Hz (Hz values are multiplied by 2*pi)
    rates        8.4/s
    angles       radian expressions: pi/2, 2pi-0.1, 0.3 (optional rad suffix)

``emit_config`` produces a canonical form (repr floats, fixed key order)
that parses back to an identical configuration, which is what makes the
run manifest reproducible: simulating the same canonical config with the
same seed yields byte-identical record files and digests.
"""

from __future__ import annotations

import ast
import hashlib
import json
import re
from math import pi
from pathlib import Path

import numpy as np

from . import __version__
from .detector import DetectorModel
from .protocols import ExperimentConfig, ScanResult, SeriesRecord, Trajectory
from .spincore import NoiseParams, PulseSpec


class ConfigError(ValueError):
    """Base class for configuration problems."""


class MissingKeyError(ConfigError):
    """A required key is absent."""


class UnknownKeyError(ConfigError):
    """A key is not recognized for the chosen protocol."""


class UnitError(ConfigError):
    """A value is malformed or lacks its required unit."""


class ValueRangeError(ConfigError):
    """A value is outside its allowed range or conflicts with another."""


class ParseError(ValueError):
    """A record file is malformed; the message carries file and line."""


_COMMON_KEYS = ("protocol", "seed", "probe", "lambda_on", "lambda_off",
                "threshold", "gamma_phi", "eps_z", "f_prep", "prep_sink",
                "noise", "delta", "phase")
_PROTOCOL_KEYS = {
    "zeno": ("theta", "omega", "tau", "measurements", "reprepare"),
    "fractionated": ("n", "variant", "series", "tau", "intermission"),
    "rabi": ("omega", "tau_step", "steps", "trajectories"),
    "ramsey": ("theta", "omega", "tau", "gap_step", "steps", "trajectories"),
}

_TIME_SUFFIXES = (("us", 1e-6), ("ms", 1e-3), ("s", 1.0))


def _float(text: str, key: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise UnitError(f"{key}: {text!r} is not a number") from None


def _parse_time(text: str, key: str) -> float:
    for suffix, scale in _TIME_SUFFIXES:
        if text.endswith(suffix):
            return _float(text[:-len(suffix)], key) * scale
    raise UnitError(f"{key}: time values need a unit suffix "
                    f"(s, ms or us), got {text!r}")


def _parse_frequency(text: str, key: str) -> float:
    if text.endswith("rad/s"):
        return _float(text[:-5], key)
    if text.endswith("Hz"):
        return 2.0 * pi * _float(text[:-2], key)
    raise UnitError(f"{key}: angular frequencies need rad/s or Hz, "
                    f"got {text!r}")


def _parse_rate(text: str, key: str) -> float:
    if text.endswith("/s"):
        return _float(text[:-2], key)
    raise UnitError(f"{key}: rates need a /s suffix, got {text!r}")


def _parse_angle(text: str, key: str) -> float:
    expr = text[:-3] if text.endswith("rad") else text
    # allow the compact form 2pi, 0.5pi, etc.
    expr = re.sub(r"(\d)\s*pi\b", r"\1*pi", expr)
    try:
        node = ast.parse(expr, mode="eval")
        return float(_eval_node(node.body))
    except (SyntaxError, ValueError, ZeroDivisionError):
        raise UnitError(f"{key}: cannot evaluate angle expression "
                        f"{text!r}") from None


def _eval_node(node: ast.AST) -> float:
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id == "pi":
        return pi
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd,
                                                              ast.USub)):
        value = _eval_node(node.operand)
        return value if isinstance(node.op, ast.UAdd) else -value
    if isinstance(node, ast.BinOp) and isinstance(
            node.op, (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)):
        left = _eval_node(node.left)
        right = _eval_node(node.right)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if isinstance(node.op, ast.Div):
            return left / right
        return left ** right
    raise ValueError("unsupported expression element")


def _parse_int(text: str, key: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise UnitError(f"{key}: {text!r} is not an integer") from None


def _parse_bool(text: str, key: str) -> bool:
    if text == "0":
        return False
    if text == "1":
        return True
    raise UnitError(f"{key}: expected 0 or 1, got {text!r}")


def _require(value: float, key: str, low: float | None = None,
             high: float | None = None, strict_low: bool = False) -> float:
    if low is not None and (value <= low if strict_low else value < low):
        op = ">" if strict_low else ">="
        raise ValueRangeError(f"{key}: {value!r} must be {op} {low}")
    if high is not None and value > high:
        raise ValueRangeError(f"{key}: {value!r} must be <= {high}")
    return value


def _split_pairs(text: str) -> dict[str, str]:
    pairs: dict[str, str] = {}
    for chunk in re.split(r"[\n,]", text):
        item = chunk.strip()
        if not item or item.startswith("#"):
            continue
        if "=" not in item:
            raise UnitError(f"expected key=value, got {item!r}")
        key, _, value = item.partition("=")
        key = key.strip()
        value = value.strip()
        if key in pairs:
            raise ValueRangeError(f"duplicate key {key!r}")
        pairs[key] = value
    return pairs


def parse_config(text: str) -> ExperimentConfig:
    """Parse a configuration into an :class:`ExperimentConfig`.

    Raises :class:`MissingKeyError`, :class:`UnknownKeyError`,
    :class:`UnitError` or :class:`ValueRangeError`; all four derive from
    :class:`ConfigError`.
    """
    pairs = _split_pairs(text)
    if "protocol" not in pairs:
        raise MissingKeyError("protocol is required")
    protocol = pairs.pop("protocol")
    if protocol not in _PROTOCOL_KEYS:
        raise ValueRangeError(
            f"protocol must be one of {sorted(_PROTOCOL_KEYS)}, "
            f"got {protocol!r}")
    allowed = set(_COMMON_KEYS) | set(_PROTOCOL_KEYS[protocol])
    for key in pairs:
        if key not in allowed:
            raise UnknownKeyError(
                f"unknown key {key!r} for protocol {protocol!r} "
                f"(allowed: {', '.join(sorted(allowed - {'protocol'}))})")

    seed = _parse_int(pairs.get("seed", "0"), "seed")
    if not 0 <= seed < 2 ** 64:
        raise ValueRangeError("seed must fit in an unsigned 64-bit integer")

    lam_on = _require(_float(pairs.get("lambda_on", "8.0"), "lambda_on"),
                      "lambda_on", low=0.0)
    lam_off = _require(_float(pairs.get("lambda_off", "0.215"), "lambda_off"),
                       "lambda_off", low=0.0)
    # cross-check before construction so the dataclass's own ValueError
    # never leaks past the config taxonomy
    if lam_on <= lam_off:
        raise ValueRangeError("lambda_on must exceed lambda_off")
    detector = DetectorModel(
        mean_counts_bright=lam_on, mean_counts_dark=lam_off,
        threshold=_require(_parse_int(pairs.get("threshold", "2"),
                                      "threshold"), "threshold", low=1))

    noise = NoiseParams()
    if "noise" in pairs:
        preset = pairs["noise"]
        if preset == "lab":
            noise = NoiseParams.lab()
        elif preset != "ideal":
            raise ValueRangeError(
                f"noise preset must be 'ideal' or 'lab', got {preset!r}")
    prep_sink = pairs.get("prep_sink", noise.prep_sink)
    if prep_sink not in ("m0", "zeeman"):
        raise ValueRangeError("prep_sink must be 'm0' or 'zeeman'")
    noise = NoiseParams(
        dephasing_rate=_require(
            _parse_rate(pairs["gamma_phi"], "gamma_phi")
            if "gamma_phi" in pairs else noise.dephasing_rate,
            "gamma_phi", low=0.0),
        zeeman_pump_prob=_require(
            _float(pairs["eps_z"], "eps_z")
            if "eps_z" in pairs else noise.zeeman_pump_prob,
            "eps_z", low=0.0, high=1.0),
        preparation_error=_require(
            _float(pairs["f_prep"], "f_prep")
            if "f_prep" in pairs else noise.preparation_error,
            "f_prep", low=0.0, high=1.0),
        prep_sink=prep_sink)

    delta = _parse_frequency(pairs["delta"], "delta") if "delta" in pairs \
        else 0.0
    phase = _parse_angle(pairs["phase"], "phase") if "phase" in pairs else 0.0

    default_probe = {"zeno": 0.002, "fractionated": 0.003, "rabi": 0.002,
                     "ramsey": 0.002}[protocol]
    probe = _require(
        _parse_time(pairs["probe"], "probe") if "probe" in pairs
        else default_probe, "probe", low=0.0, strict_low=True)

    try:
        if protocol == "zeno":
            return _build_zeno(pairs, detector, noise, delta, phase, probe,
                               seed)
        if protocol == "fractionated":
            return _build_fractionated(pairs, detector, noise, delta, phase,
                                       probe, seed)
        if protocol == "rabi":
            return _build_rabi(pairs, detector, noise, delta, phase, probe,
                               seed)
        return _build_ramsey(pairs, detector, noise, delta, phase, probe,
                             seed)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ValueRangeError(str(exc)) from exc


def _resolve_pulse(pairs: dict[str, str], tau_default: float, delta: float,
                   phase: float, theta_default: float | None = None
                   ) -> PulseSpec:
    tau = _require(
        _parse_time(pairs["tau"], "tau") if "tau" in pairs else tau_default,
        "tau", low=0.0, strict_low=True)
    theta = _parse_angle(pairs["theta"], "theta") if "theta" in pairs else None
    omega = _parse_frequency(pairs["omega"], "omega") if "omega" in pairs \
        else None
    if theta is not None and omega is not None:
        if abs(theta - omega * tau) > 1e-9 * max(1.0, abs(theta)):
            raise ValueRangeError(
                f"theta={theta!r} conflicts with omega*tau={omega * tau!r}")
    elif theta is not None:
        omega = theta / tau
    elif omega is None:
        if theta_default is None:
            raise MissingKeyError("either theta or omega is required")
        omega = theta_default / tau
    if omega < 0.0:
        raise ValueRangeError("the Rabi frequency must be non-negative "
                              "(use phase to invert the rotation)")
    return PulseSpec(rabi_frequency=omega, duration=tau, detuning=delta,
                     phase=phase)


def _build_zeno(pairs, detector, noise, delta, phase, probe, seed):
    pulse = _resolve_pulse(pairs, 0.0049, delta, phase)
    return ExperimentConfig(
        protocol="zeno", pulse=pulse, detector=detector, noise=noise,
        probe_duration=probe, master_seed=seed,
        n_measurements=_require(
            _parse_int(pairs.get("measurements", "2000"), "measurements"),
            "measurements", low=1),
        reprepare_on_bright=_parse_bool(pairs.get("reprepare", "0"),
                                        "reprepare"))


def _build_fractionated(pairs, detector, noise, delta, phase, probe, seed):
    if "n" not in pairs:
        raise MissingKeyError("fractionated runs require n")
    n = _require(_parse_int(pairs["n"], "n"), "n", low=1)
    variant = pairs.get("variant", "c")
    if variant not in ("a", "b", "c"):
        raise ValueRangeError(f"variant must be a, b or c, got {variant!r}")
    if variant == "a" and n != 1:
        raise ValueRangeError("variant 'a' is the single full pulse; n must "
                              "be 1")
    series = _require(
        _parse_int(pairs["series"], "series") if "series" in pairs
        else max(1, 2000 // n), "series", low=1)
    tau = _require(
        _parse_time(pairs["tau"], "tau") if "tau" in pairs else 0.0029,
        "tau", low=0.0, strict_low=True)
    intermission = _parse_time(pairs["intermission"], "intermission") \
        if "intermission" in pairs else None
    if intermission is not None:
        _require(intermission, "intermission", low=0.0)
    pulse = PulseSpec(rabi_frequency=(pi / n) / tau, duration=tau,
                      detuning=delta, phase=phase)
    return ExperimentConfig(
        protocol="fractionated", pulse=pulse, detector=detector, noise=noise,
        probe_duration=probe, master_seed=seed, fraction_n=n, variant=variant,
        n_series=series, intermission=intermission)


def _scan_sizes(pairs) -> tuple[int, int]:
    steps = _require(_parse_int(pairs.get("steps", "500"), "steps"), "steps",
                     low=1)
    trajectories = _require(
        _parse_int(pairs.get("trajectories", "50"), "trajectories"),
        "trajectories", low=1)
    return steps, trajectories


def _build_rabi(pairs, detector, noise, delta, phase, probe, seed):
    if "omega" not in pairs:
        raise MissingKeyError("rabi scans require omega")
    if "tau_step" not in pairs:
        raise MissingKeyError("rabi scans require tau_step")
    omega = _require(_parse_frequency(pairs["omega"], "omega"), "omega",
                     low=0.0)
    tau_step = _require(_parse_time(pairs["tau_step"], "tau_step"),
                        "tau_step", low=0.0, strict_low=True)
    steps, trajectories = _scan_sizes(pairs)
    pulse = PulseSpec(rabi_frequency=omega, duration=tau_step,
                      detuning=delta, phase=phase)
    return ExperimentConfig(
        protocol="rabi", pulse=pulse, detector=detector, noise=noise,
        probe_duration=probe, master_seed=seed, tau_step=tau_step,
        n_steps=steps, n_trajectories=trajectories)


def _build_ramsey(pairs, detector, noise, delta, phase, probe, seed):
    if "gap_step" not in pairs:
        raise MissingKeyError("ramsey scans require gap_step")
    pulse = _resolve_pulse(pairs, 0.002, delta, phase,
                           theta_default=pi / 2.0)
    gap_step = _require(_parse_time(pairs["gap_step"], "gap_step"),
                        "gap_step", low=0.0, strict_low=True)
    steps, trajectories = _scan_sizes(pairs)
    return ExperimentConfig(
        protocol="ramsey", pulse=pulse, detector=detector, noise=noise,
        probe_duration=probe, master_seed=seed, gap_step=gap_step,
        n_steps=steps, n_trajectories=trajectories)


def emit_config(config: ExperimentConfig) -> str:
    """Canonical text form; ``parse_config(emit_config(c))`` equals ``c``."""
    p = config.pulse
    lines = [f"protocol={config.protocol}",
             f"seed={config.master_seed}",
             f"delta={p.detuning!r}rad/s",
             f"phase={p.phase!r}rad",
             f"probe={config.probe_duration!r}s",
             f"lambda_on={config.detector.mean_counts_bright!r}",
             f"lambda_off={config.detector.mean_counts_dark!r}",
             f"threshold={config.detector.threshold}",
             f"gamma_phi={config.noise.dephasing_rate!r}/s",
             f"eps_z={config.noise.zeeman_pump_prob!r}",
             f"f_prep={config.noise.preparation_error!r}",
             f"prep_sink={config.noise.prep_sink}"]
    if config.protocol == "zeno":
        lines += [f"omega={p.rabi_frequency!r}rad/s",
                  f"tau={p.duration!r}s",
                  f"measurements={config.n_measurements}",
                  f"reprepare={1 if config.reprepare_on_bright else 0}"]
    elif config.protocol == "fractionated":
        # the pulse is implied: area pi/n over tau
        lines += [f"n={config.fraction_n}",
                  f"variant={config.variant}",
                  f"series={config.n_series}",
                  f"tau={p.duration!r}s"]
        if config.intermission is not None:
            lines.append(f"intermission={config.intermission!r}s")
    elif config.protocol == "rabi":
        lines += [f"omega={p.rabi_frequency!r}rad/s",
                  f"tau_step={config.tau_step!r}s",
                  f"steps={config.n_steps}",
                  f"trajectories={config.n_trajectories}"]
    else:
        lines += [f"omega={p.rabi_frequency!r}rad/s",
                  f"tau={p.duration!r}s",
                  f"gap_step={config.gap_step!r}s",
                  f"steps={config.n_steps}",
                  f"trajectories={config.n_trajectories}"]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# record files


_TRAJECTORY_COLUMNS = "index photon_count classified_bit true_manifold"
_SERIES_COLUMNS = "index prep_ok intermediate_bits final_bit"
_SCAN_COLUMNS = "trajectory step bit"


def write_trajectory(path, trajectory: Trajectory) -> None:
    """Write a zeno record file: canonical config, separator, data rows."""
    with open(path, "w", newline="\n") as fh:
        fh.write("file=trajectory\n")
        fh.write(emit_config(trajectory.config))
        fh.write("---\n")
        fh.write(_TRAJECTORY_COLUMNS + "\n")
        for i in range(len(trajectory)):
            fh.write(f"{i} {trajectory.photon_counts[i]} "
                     f"{trajectory.classified_bits[i]} "
                     f"{trajectory.true_manifolds[i]}\n")


def write_series(path, config: ExperimentConfig,
                 records: list[SeriesRecord]) -> None:
    """Write a fractionated record file, one row per series."""
    with open(path, "w", newline="\n") as fh:
        fh.write("file=series\n")
        fh.write(emit_config(config))
        fh.write("---\n")
        fh.write(_SERIES_COLUMNS + "\n")
        for i, rec in enumerate(records):
            bits = "".join(str(b) for b in rec.intermediate_bits) or "-"
            fh.write(f"{i} {1 if rec.prepared_ok else 0} {bits} "
                     f"{rec.final_bit}\n")


def write_scan(path, scan: ScanResult) -> None:
    """Write a scan record file in long form (trajectory, step, bit)."""
    with open(path, "w", newline="\n") as fh:
        fh.write("file=scan\n")
        fh.write(emit_config(scan.config))
        fh.write("---\n")
        fh.write(_SCAN_COLUMNS + "\n")
        n_traj, n_steps = scan.bits.shape
        for t in range(n_traj):
            for k in range(n_steps):
                fh.write(f"{t} {k} {scan.bits[t, k]}\n")


def _read_head(path) -> tuple[str, ExperimentConfig, list[str], int]:
    text = Path(path).read_text()
    lines = text.split("\n")
    if not lines or not lines[0].startswith("file="):
        raise ParseError(f"{path}:1: missing 'file=' type line")
    kind = lines[0][5:]
    try:
        sep = lines.index("---")
    except ValueError:
        raise ParseError(f"{path}: no '---' separator found") from None
    try:
        config = parse_config("\n".join(lines[1:sep]))
    except ConfigError as exc:
        raise ParseError(f"{path}: bad embedded config: {exc}") from exc
    body = lines[sep + 1:]
    if body and body[-1] == "":
        body = body[:-1]
    if not body:
        raise ParseError(f"{path}:{sep + 2}: missing column header")
    return kind, config, body, sep + 2


def detect_format(path) -> str:
    """Return the record-file kind: trajectory, series or scan."""
    kind, _, _, _ = _read_head(path)
    if kind not in ("trajectory", "series", "scan"):
        raise ParseError(f"{path}:1: unknown file type {kind!r}")
    return kind


def _split_row(path, lineno: int, line: str, n_fields: int) -> list[str]:
    fields = line.split()
    if len(fields) != n_fields:
        raise ParseError(f"{path}:{lineno}: expected {n_fields} fields, "
                         f"got {len(fields)}")
    return fields


def _int_field(path, lineno: int, text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"{path}:{lineno}: {what} {text!r} is not an "
                         "integer") from None


def read_trajectory(path) -> Trajectory:
    """Read back a zeno record file written by :func:`write_trajectory`."""
    kind, config, body, first = _read_head(path)
    if kind != "trajectory":
        raise ParseError(f"{path}:1: expected a trajectory file, got {kind!r}")
    if body[0] != _TRAJECTORY_COLUMNS:
        raise ParseError(f"{path}:{first}: bad column header {body[0]!r}")
    rows = body[1:]
    if len(rows) != config.n_measurements:
        raise ParseError(f"{path}: {len(rows)} data rows but config says "
                         f"measurements={config.n_measurements}")
    counts = np.empty(len(rows), dtype=np.int64)
    bits = np.empty(len(rows), dtype=np.int8)
    manifolds = np.empty(len(rows), dtype=np.int8)
    for i, line in enumerate(rows):
        lineno = first + 1 + i
        fields = _split_row(path, lineno, line, 4)
        index = _int_field(path, lineno, fields[0], "index")
        if index != i:
            raise ParseError(f"{path}:{lineno}: index {index} out of order "
                             f"(expected {i})")
        counts[i] = _int_field(path, lineno, fields[1], "photon count")
        bits[i] = _bit_field(path, lineno, fields[2])
        manifolds[i] = _bit_field(path, lineno, fields[3])
    return Trajectory(config=config, photon_counts=counts,
                      classified_bits=bits, true_manifolds=manifolds)


def _bit_field(path, lineno: int, text: str) -> int:
    if text == "0":
        return 0
    if text == "1":
        return 1
    raise ParseError(f"{path}:{lineno}: bit value must be 0 or 1, "
                     f"got {text!r}")


def read_series(path) -> tuple[ExperimentConfig, list[SeriesRecord]]:
    """Read back a fractionated record file written by :func:`write_series`."""
    kind, config, body, first = _read_head(path)
    if kind != "series":
        raise ParseError(f"{path}:1: expected a series file, got {kind!r}")
    if body[0] != _SERIES_COLUMNS:
        raise ParseError(f"{path}:{first}: bad column header {body[0]!r}")
    rows = body[1:]
    if len(rows) != config.n_series:
        raise ParseError(f"{path}: {len(rows)} data rows but config says "
                         f"series={config.n_series}")
    want_bits = (config.fraction_n - 1) if config.variant == "c" else 0
    records = []
    for i, line in enumerate(rows):
        lineno = first + 1 + i
        fields = _split_row(path, lineno, line, 4)
        index = _int_field(path, lineno, fields[0], "index")
        if index != i:
            raise ParseError(f"{path}:{lineno}: index {index} out of order "
                             f"(expected {i})")
        ok = _bit_field(path, lineno, fields[1])
        bits_text = fields[2]
        if bits_text == "-":
            bits: tuple[int, ...] = ()
        else:
            if not re.fullmatch(r"[01]+", bits_text):
                raise ParseError(f"{path}:{lineno}: intermediate bits must "
                                 f"be 0/1 digits or '-', got {bits_text!r}")
            bits = tuple(int(ch) for ch in bits_text)
        if len(bits) != want_bits:
            raise ParseError(f"{path}:{lineno}: {len(bits)} intermediate "
                             f"bits but the config implies {want_bits}")
        records.append(SeriesRecord(
            prepared_ok=bool(ok), intermediate_bits=bits,
            final_bit=_bit_field(path, lineno, fields[3])))
    return config, records


def read_scan(path) -> ScanResult:
    """Read back a scan record file written by :func:`write_scan`."""
    kind, config, body, first = _read_head(path)
    if kind != "scan":
        raise ParseError(f"{path}:1: expected a scan file, got {kind!r}")
    if body[0] != _SCAN_COLUMNS:
        raise ParseError(f"{path}:{first}: bad column header {body[0]!r}")
    rows = body[1:]
    expected = config.n_trajectories * config.n_steps
    if len(rows) != expected:
        raise ParseError(f"{path}: {len(rows)} data rows but config implies "
                         f"{expected}")
    bits = np.zeros((config.n_trajectories, config.n_steps), dtype=np.int8)
    for i, line in enumerate(rows):
        lineno = first + 1 + i
        fields = _split_row(path, lineno, line, 3)
        t = _int_field(path, lineno, fields[0], "trajectory")
        k = _int_field(path, lineno, fields[1], "step")
        if not (0 <= t < config.n_trajectories and 0 <= k < config.n_steps):
            raise ParseError(f"{path}:{lineno}: row ({t}, {k}) outside the "
                             "declared scan shape")
        bits[t, k] = _bit_field(path, lineno, fields[2])
    step = config.tau_step if config.protocol == "rabi" else config.gap_step
    axis = step * np.arange(1, config.n_steps + 1)
    return ScanResult(config=config, axis=axis, bits=bits)


# ---------------------------------------------------------------------------
# manifest


def file_digest(path) -> str:
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(out_dir, config: ExperimentConfig, files: list[str],
                   command: str) -> Path:
    """Record the run: tool version, seed, canonical config, file digests."""
    out_dir = Path(out_dir)
    manifest = {
        "tool": "zenosim",
        "version": __version__,
        "command": command,
        "master_seed": config.master_seed,
        "config": emit_config(config),
        "files": {name: file_digest(out_dir / name) for name in files},
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def verify_manifest(out_dir) -> dict[str, bool]:
    """Recompute digests; returns {filename: matches} for every listed file."""
    out_dir = Path(out_dir)
    manifest = json.loads((out_dir / "manifest.json").read_text())
    result = {}
    for name, digest in manifest["files"].items():
        target = out_dir / name
        result[name] = target.exists() and file_digest(target) == digest
    return result
