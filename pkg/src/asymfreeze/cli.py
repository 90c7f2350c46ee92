"""Command-line front end.

    asymfreeze run --config run.json [--scenario example1|example2|theorem]
                   [--seed S] [--out PATH] [--format csv|json] [...]

A config file is one flat JSON object; every key also exists as a flag, and
flags win. Exit codes: 0 all asserted invariants hold, 1 configuration or
file error, 2 invariant failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

import numpy as np

from .errors import AsymmetryError, ConfigParse
from .matcore import trace_norm_distance
from .scenarios import (
    DEFAULT_P_GRID,
    EQUAL_PAIR,
    Example1Config,
    Example2Config,
    default_fock_dim,
    example1_expected_ar,
    example1_sweep,
    example2_closed_form,
    example2_expected_ar,
    example2_run,
    example2_trajectory,
)
from .symmetry import cyclic
from .universality import CHANNEL_KINDS, theorem_check

log = logging.getLogger("asymfreeze")

SCENARIOS = ("example1", "example2", "theorem")
FORMATS = ("csv", "json")

EXAMPLE1_COLUMNS = ("p", "ar_bits", "skew", "recovery_residual", "frozen")
EXAMPLE2_COLUMNS = ("t", "ar_bits", "trace", "frozen")
THEOREM_KEYS = (
    "trials",
    "frozen_count",
    "max_ar_drop",
    "max_measure_deviation",
    "max_recovery_residual",
    "monotonicity_violations",
)

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT = 0, 1, 2


@dataclass
class RunConfig:
    scenario: str
    seed: int | None = None
    format: str | None = None
    out: str | None = None
    # example1
    p_grid: tuple = DEFAULT_P_GRID
    amplitudes: tuple | None = None
    # example2
    N: int = 3
    M: int = 1
    t_max: int = 2
    fock_dim: int | None = None
    # theorem
    trials: int = 100
    dim: int = 6
    group_order: int = 6
    charges: tuple | None = None
    kind: str = "mixed"
    workers: int = 1
    # tolerances
    tolerance: float = 1e-9
    skew_tolerance: float = 1e-8
    recovery_tolerance: float = 1e-8
    closed_form_tolerance: float = 1e-10
    extra: dict = field(default_factory=dict, repr=False)

    @property
    def output_format(self) -> str:
        if self.format:
            return self.format
        return "json" if self.scenario == "theorem" else "csv"


_KEYS = {f.name for f in fields(RunConfig)} - {"extra"}
_INT_KEYS = {"seed", "N", "M", "t_max", "fock_dim", "trials", "dim", "group_order", "workers"}
_FLOAT_KEYS = {"tolerance", "skew_tolerance", "recovery_tolerance", "closed_form_tolerance"}


def _complex(value, key: str) -> complex:
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        return complex(value.replace(" ", ""))
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    raise ConfigParse(f"key {key!r}: cannot read amplitude {value!r}")


def _coerce(key: str, value: Any) -> Any:
    try:
        if key in _INT_KEYS:
            if value is None and key == "fock_dim":
                return None
            if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
                raise ValueError
            return int(value)
        if key in _FLOAT_KEYS:
            return float(value)
        if key == "p_grid":
            return tuple(float(p) for p in value)
        if key == "charges":
            return tuple(int(c) for c in value)
        if key == "amplitudes":
            return tuple(_complex(a, key) for a in value)
    except ConfigParse:
        raise
    except (TypeError, ValueError):
        raise ConfigParse(f"key {key!r}: invalid value {value!r}") from None
    return value


def build_config(values: dict) -> RunConfig:
    """Validate a flat key/value mapping and fill in defaults."""
    unknown = sorted(set(values) - _KEYS)
    if unknown:
        raise ConfigParse(f"unknown key(s): {', '.join(unknown)}")
    scenario = values.get("scenario")
    if scenario not in SCENARIOS:
        raise ConfigParse(f"key 'scenario': expected one of {SCENARIOS}, got {scenario!r}")
    kwargs = {k: _coerce(k, v) for k, v in values.items()}
    cfg = RunConfig(**kwargs)
    if cfg.format is not None and cfg.format not in FORMATS:
        raise ConfigParse(f"key 'format': expected one of {FORMATS}, got {cfg.format!r}")
    if cfg.scenario == "theorem":
        if cfg.seed is None:
            raise ConfigParse("key 'seed': required for the theorem scenario")
        if cfg.kind not in CHANNEL_KINDS:
            raise ConfigParse(f"key 'kind': expected one of {CHANNEL_KINDS}, got {cfg.kind!r}")
        if cfg.trials < 1 or cfg.dim < 1 or cfg.group_order < 1:
            raise ConfigParse("keys 'trials', 'dim', 'group_order' must be positive")
        if cfg.charges is None:
            cfg.charges = tuple(range(cfg.dim))
        if len(cfg.charges) != cfg.dim:
            raise ConfigParse(f"key 'charges': expected {cfg.dim} entries, got {len(cfg.charges)}")
    # scenario-level invariants surface as config errors
    try:
        if cfg.scenario == "example1":
            cfg.amplitudes = cfg.amplitudes or EQUAL_PAIR
            cfg.extra["example"] = Example1Config(p_grid=cfg.p_grid, amplitudes=cfg.amplitudes)
        elif cfg.scenario == "example2":
            ex = Example2Config(N=cfg.N, M=cfg.M, amplitudes=cfg.amplitudes, t_max=cfg.t_max, fock_dim=cfg.fock_dim)
            cfg.amplitudes, cfg.fock_dim = ex.amplitudes, ex.fock_dim
            cfg.extra["example"] = ex
    except (AsymmetryError, ValueError) as exc:
        raise ConfigParse(str(exc)) from None
    return cfg


def parse_config(text: str) -> RunConfig:
    """Parse the JSON config text; errors carry line/column or key context."""
    return build_config(_load_values(text))


def _load_values(text: str) -> dict:
    try:
        values = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParse(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(values, dict):
        raise ConfigParse("line 1: the config must be a single JSON object")
    return values


# -- reports ---------------------------------------------------------------------


@dataclass
class Report:
    scenario: str
    columns: tuple
    rows: list[dict]
    header: dict = field(default_factory=dict)
    summary: dict | None = None
    passed: bool = True


def fmt_number(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return ""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0.0:
        return "0"
    return f"{x:.12g}"


def _json_value(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, float):
        if math.isinf(x) or math.isnan(x):
            return str(x)
        return 0.0 if x == 0.0 else float(f"{x:.12g}")
    return x


def render(report: Report, fmt: str) -> str:
    if fmt == "json":
        doc = {"scenario": report.scenario, **{k: _json_value(v) for k, v in report.header.items()}}
        if report.summary is not None:
            doc.update({k: _json_value(report.summary[k]) for k in THEOREM_KEYS})
        if report.rows:
            doc["rows"] = [{c: _json_value(r[c]) for c in report.columns} for r in report.rows]
        doc["passed"] = report.passed
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    for k, v in report.header.items():
        buf.write(f"# {k}: {v if isinstance(v, str) else fmt_number(v)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(report.columns)
    rows = report.rows if report.summary is None else [report.summary]
    for r in rows:
        writer.writerow([fmt_number(r[c]) for c in report.columns])
    return buf.getvalue()


def emit_report(report: Report, fmt: str, path: str | None) -> str:
    text = render(report, fmt)
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")
    return text


# -- scenario runners --------------------------------------------------------------


def run_example1(cfg: RunConfig) -> Report:
    ex: Example1Config = cfg.extra["example"]
    rep = example1_sweep(ex)
    expected = example1_expected_ar(*ex.amplitudes)
    skew0 = rep.steps[0].values["skew_information"].value
    rows, ok = [], True
    for p, step in zip(ex.p_grid, rep.steps[1:]):
        ar = step.values["relative_entropy_of_asymmetry"].value
        skew = step.values["skew_information"].value
        frozen = (
            abs(ar - expected) <= cfg.tolerance
            and abs(skew - skew0) <= cfg.skew_tolerance
            and step.recovery_residual <= cfg.recovery_tolerance
        )
        ok &= frozen
        rows.append({"p": p, "ar_bits": ar, "skew": skew, "recovery_residual": step.recovery_residual, "frozen": frozen})
    header = {"expected_ar_bits": expected}
    return Report("example1", EXAMPLE1_COLUMNS, rows, header=header, passed=ok)


def run_example2(cfg: RunConfig) -> Report:
    ex: Example2Config = cfg.extra["example"]
    rep = example2_run(ex)
    states = example2_trajectory(ex)
    expected = example2_expected_ar(ex.amplitudes)
    rows, ok = [], True
    for t, (step, rho) in enumerate(zip(rep.steps, states)):
        ar = step.values["relative_entropy_of_asymmetry"].value
        frozen = abs(ar - expected) <= cfg.tolerance
        if t < ex.N:
            # freezing is only claimed for fewer than N measurements
            match = trace_norm_distance(rho.matrix, example2_closed_form(ex, t)) <= cfg.closed_form_tolerance
            ok &= frozen and match and rho.trace >= 1 - 1e-12
        rows.append({"t": t, "ar_bits": ar, "trace": rho.trace, "frozen": frozen})
    header = {
        "fock_dim": f"{ex.fock_dim} (auto rule (2M+1)N + t_max + 2 = {default_fock_dim(ex.N, ex.M, ex.t_max)})",
        "expected_ar_bits": expected,
        "asserted_steps": f"t < N = {ex.N}",
    }
    return Report("example2", EXAMPLE2_COLUMNS, rows, header=header, passed=ok)


def run_theorem(cfg: RunConfig) -> Report:
    group = cyclic(cfg.group_order, cfg.dim, cfg.charges)
    stats = theorem_check(group, cfg.trials, cfg.dim, cfg.seed, kind=cfg.kind, workers=cfg.workers)
    summary = stats.summary()
    log.info(
        "near-frozen trials: %d, sandwich violations: %d, frozen-consequence violations: %d",
        stats.near_frozen_count, stats.sandwich_violations, stats.frozen_violations,
    )
    return Report("theorem", THEOREM_KEYS, [], summary=summary, passed=stats.passed)


RUNNERS = {"example1": run_example1, "example2": run_example2, "theorem": run_theorem}


def run(cfg: RunConfig) -> int:
    report = RUNNERS[cfg.scenario](cfg)
    try:
        emit_report(report, cfg.output_format, cfg.out)
    except OSError as exc:
        log.error("cannot write report: %s", exc)
        return EXIT_CONFIG
    if not report.passed:
        log.error("%s: asserted invariant failed", cfg.scenario)
        return EXIT_INVARIANT
    return EXIT_OK


# -- argument parsing ----------------------------------------------------------------


def _csv_list(text: str) -> list[str]:
    return [t for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="asymfreeze", description="Universal freezing of asymmetry: scenario runner.")
    sub = parser.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a scenario and write its report")
    r.add_argument("--config", help="JSON config file")
    r.add_argument("--scenario", choices=SCENARIOS)
    r.add_argument("--seed", type=int)
    r.add_argument("--out", help="output path (default: stdout)")
    r.add_argument("--format", choices=FORMATS)
    r.add_argument("--p-grid", dest="p_grid", type=_csv_list, help="comma-separated p values")
    r.add_argument("--amplitudes", type=_csv_list, help="comma-separated amplitudes, complex allowed (0.6+0.8j)")
    r.add_argument("--N", dest="N", type=int)
    r.add_argument("--M", dest="M", type=int)
    r.add_argument("--t-max", dest="t_max", type=int)
    r.add_argument("--fock-dim", dest="fock_dim", type=int)
    r.add_argument("--trials", type=int)
    r.add_argument("--dim", type=int)
    r.add_argument("--group-order", dest="group_order", type=int)
    r.add_argument("--charges", type=_csv_list)
    r.add_argument("--kind", choices=CHANNEL_KINDS)
    r.add_argument("--workers", type=int)
    for key in sorted(_FLOAT_KEYS):
        r.add_argument("--" + key.replace("_", "-"), dest=key, type=float)
    r.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    values: dict = {}
    try:
        if args.config:
            try:
                text = Path(args.config).read_text(encoding="utf-8")
            except OSError as exc:
                raise ConfigParse(f"cannot read config: {exc}") from None
            values = _load_values(text)
        values.update({k: v for k, v in vars(args).items() if k in _KEYS and v is not None})
        cfg = build_config(values)
    except ConfigParse as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
