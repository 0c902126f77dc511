"""Command-line front end.

Exit codes: 0 success, 1 a verification suite failed, 2 invalid input or
configuration, 3 numerical failure, 4 file I/O error.  Errors print a single
JSON line ``{"error": ..., "code": ..., "message": ...}`` on stderr.

When ``--out`` is omitted, output goes to ``$SIGNEDUD_OUTPUT_DIR/<name>`` if
that variable is set, otherwise to stdout.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

import numpy as np

from . import io
from .convex import ConvexTarget, cesaro_error_trace
from .discrepancy import empirical_cdf, interval_discrepancy_signed, star_discrepancy_signed
from .errors import (
    DegenerateMeasureError,
    OracleInconsistencyError,
    QuadratureError,
    SignedUDError,
    SourceExhaustedError,
    ValidationError,
)
from .finite import c_constant, generate_finite, subset_discrepancy_trace
from .measures import BVOracle, PLJFunction, normalize, total_variation
from .merge import BlockPlan, MergedSequence
from .sequences import (
    diagonal_signed_sequence,
    iid_sampler,
    signed_sequence_polygonal,
)
from .verify import SUITES, vdc_star_bound, verify_suite

EXIT_OK, EXIT_FAILED, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3, 4
OUTPUT_DIR_ENV = "SIGNEDUD_OUTPUT_DIR"

SUBCOMMANDS = ("gen-finite", "merge", "convex", "gen-bv", "discrepancy", "sample", "report", "verify")
DEFAULT_NAMES = {
    "gen-finite": "seq.csv",
    "merge": "merged.csv",
    "convex": "convex.csv",
    "gen-bv": "seq.csv",
    "discrepancy": "discrepancy.json",
    "sample": "sample.csv",
    "report": "report.csv",
    "verify": "summary.json",
}


@dataclass
class RunConfig:
    """Validated parameters of one CLI run."""

    subcommand: str
    inputs: dict[str, Any] = field(default_factory=dict)
    n: int | None = None
    n_grid: list[int] | None = None
    seed: int | None = None
    out: str | None = None
    tolerances: dict[str, float] = field(default_factory=dict)
    options: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise ValidationError(f"unknown subcommand {self.subcommand!r}")
        if self.n is not None and (int(self.n) != self.n or self.n < 1):
            raise ValidationError(f"n must be a positive integer, got {self.n!r}")
        if self.n_grid is not None:
            if not self.n_grid or any(int(v) != v or v < 1 for v in self.n_grid):
                raise ValidationError("n-grid entries must be positive integers")
            if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
                raise ValidationError("n-grid must be strictly increasing")
        for k, v in self.tolerances.items():
            if not (isinstance(v, (int, float)) and v > 0):
                raise ValidationError(f"tolerance {k!r} must be a positive number")

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValidationError(f"unknown config fields: {sorted(unknown)}")
        if "subcommand" not in d:
            raise ValidationError("config needs a subcommand")
        return cls(**d)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def need(self, key: str) -> Any:
        if self.inputs.get(key) is None:
            raise ValidationError(f"{self.subcommand} needs --{key.replace('_', '-')}")
        return self.inputs[key]

    def need_n(self) -> int:
        if self.n is None:
            raise ValidationError(f"{self.subcommand} needs --n")
        return int(self.n)


# ---------------------------------------------------------------------------
# Parsing helpers
# ---------------------------------------------------------------------------


def parse_count(text: str) -> int:
    """Positive integer, also accepting forms like ``1e5``."""
    try:
        v = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc
    if not math.isfinite(v) or v != int(v) or v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(v)


def parse_grid(text: str) -> list[int]:
    return [parse_count(t) for t in text.split(",") if t.strip()]


def parse_probes(text: str) -> list[float]:
    """``start:stop:step`` (inclusive stop) or a comma list."""
    if ":" in text:
        try:
            start, stop, step = (float(v) for v in text.split(":"))
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"bad probe range {text!r}") from exc
        if step <= 0 or stop < start:
            raise argparse.ArgumentTypeError(f"bad probe range {text!r}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 12) for i in range(count)]
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad probe list {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="signedud",
        description="Point-and-sign sequences realizing signed measures, with discrepancy checks.",
    )
    p.add_argument("--config", help="JSON run configuration (fields of RunConfig); replaces the subcommand flags")
    sub = p.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")

    def add(name, help_text):
        sp = sub.add_parser(name, help=help_text, description=help_text)
        sp.add_argument("--out", help="output file (default: $%s/<name> or stdout)" % OUTPUT_DIR_ENV)
        return sp

    sp = add("gen-finite", "Greedy sequence for a finite probability measure (CSV: step, atom_label, discrepancy, bound).")
    sp.add_argument("--measure", required=True, help='measure JSON {"atoms": [{"x": ..., "w": ...}]}')
    sp.add_argument("--n", type=parse_count, required=True, help="sequence length")

    sp = add("merge", "Concatenate source sequences block by block following a plan (CSV: step, block, s, value).")
    sp.add_argument("--plan", required=True, help='plan JSON {"constants": [...], "lengths": [...]}')
    sp.add_argument("--sources", required=True, help="comma-separated source CSVs, one per block, in order")
    sp.add_argument("--n", type=parse_count, required=True, help="merged prefix length")

    sp = add("convex", "Means of greedy support points approaching a convex combination (CSV: N, error, bound).")
    sp.add_argument("--points", required=True, help="JSON list of points (a list of equal-length lists)")
    sp.add_argument("--weights", required=True, help="JSON list of positive weights summing to 1")
    sp.add_argument("--n", type=parse_count, required=True, help="largest N in the trace")
    sp.add_argument("--radius", type=float, help="enclosing radius R (default: largest point norm)")

    sp = add("gen-bv", "Signed sequence for a PLJ function (CSV: step, x, eps).")
    sp.add_argument("--phi", required=True, help="PLJ function JSON")
    sp.add_argument("--n", type=parse_count, required=True, help="sequence length")
    sp.add_argument("--method", choices=["diagonal", "direct"], default="diagonal",
                    help="diagonal: continuous approximants with scheduled blocks; direct: one sequence for phi itself")
    sp.add_argument("--normalize", action="store_true", help="shift to phi(a) = 0 and scale to unit variation first")

    sp = add("discrepancy", "Signed star or interval discrepancy of a sequence CSV against a PLJ target (JSON).")
    sp.add_argument("--seq", required=True, help="sequence CSV with columns step, x[, eps]")
    sp.add_argument("--target", required=True, help="PLJ function JSON")
    kind = sp.add_mutually_exclusive_group()
    kind.add_argument("--star", dest="kind", action="store_const", const="star", help="star discrepancy (default)")
    kind.add_argument("--interval", dest="kind", action="store_const", const="interval", help="interval discrepancy")

    sp = add("sample", "i.i.d. points from |mu| with signs from the sign density (CSV: step, x, eps).")
    sp.add_argument("--phi", required=True, help="PLJ function JSON of unit variation")
    sp.add_argument("--seed", type=int, required=True, help="64-bit seed")
    sp.add_argument("--n", type=parse_count, required=True, help="number of samples")

    sp = add("report", "Empirical vs target CDF values at probe points for several prefix lengths (CSV).")
    sp.add_argument("--phi", required=True, help="PLJ function JSON")
    sp.add_argument("--n-grid", type=parse_grid, default=[1000, 10000, 100000], help="comma list, e.g. 1e3,1e4,1e5")
    sp.add_argument("--probe-points", type=parse_probes, default=None, help="start:stop:step or comma list (default a:b:(b-a)/20)")
    sp.add_argument("--method", choices=["diagonal", "direct"], default="diagonal", help="sequence construction")
    sp.add_argument("--normalize", action="store_true", help="normalize phi first")

    sp = add("verify", "Run a verification suite and print its JSON summary.")
    sp.add_argument("--suite", required=True, choices=sorted(SUITES), help="suite name")
    sp.add_argument("--trials", type=parse_count, default=None, help="random instances (suite default if omitted)")
    sp.add_argument("--seed", type=int, default=0, help="sweep seed")
    sp.add_argument("--cdf-tol", type=float, default=None, help="override the 0.05 limit-error threshold (theorem1, theorem9)")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    d = vars(ns).copy()
    sub = d.pop("subcommand")
    d.pop("config", None)
    out = d.pop("out", None)
    n = d.pop("n", None)
    seed = d.pop("seed", None)
    n_grid = d.pop("n_grid", None)
    cdf_tol = d.pop("cdf_tol", None)
    tolerances = {} if cdf_tol is None else {"cdf_tol": cdf_tol}
    option_keys = {"method", "normalize", "kind", "trials", "suite", "probe_points", "radius"}
    options = {k: d.pop(k) for k in list(d) if k in option_keys}
    return RunConfig(sub, inputs=d, n=n, n_grid=n_grid, seed=seed, out=out, tolerances=tolerances, options=options)


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def _destination(config: RunConfig) -> Path | None:
    if config.out:
        return Path(config.out)
    base = os.environ.get(OUTPUT_DIR_ENV)
    return Path(base) / DEFAULT_NAMES[config.subcommand] if base else None


def _emit(config: RunConfig, text: str) -> None:
    dest = _destination(config)
    if dest is None:
        sys.stdout.write(text)
    else:
        io.write_atomic(dest, text)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _load_phi(config: RunConfig) -> PLJFunction:
    phi = io.load_document(config.need("phi"), "PLJFunction")
    if config.options.get("normalize"):
        phi = normalize(phi - phi.value(phi.a))
    return phi


def cmd_gen_finite(config: RunConfig) -> int:
    mu = io.measure_from_dict(io.load_json(config.need("measure")))
    N = config.need_n()
    seq = generate_finite(mu, N)
    d = subset_discrepancy_trace(seq)
    C = c_constant(mu.size)
    rows = ((n, label, d[n - 1], C / n) for n, label in enumerate(seq.labels, 1))
    _emit(config, io.csv_text(["step", "atom_label", "running_subset_discrepancy", "bound"], rows))
    return EXIT_OK


def cmd_merge(config: RunConfig) -> int:
    plan = BlockPlan.from_dict(io.load_json(config.need("plan")))
    paths = [s for s in config.need("sources").split(",") if s]
    sources = [io.read_source_column(p) for p in paths]
    N = config.need_n()
    if N > plan.total:
        raise ValidationError(f"plan covers {plan.total} terms, {N} requested")
    ms = MergedSequence(sources, plan=plan)
    values = ms.prefix(N)
    rows = []
    for n, v in enumerate(values, 1):
        j, s = plan.locate(n)
        rows.append((n, j, s, v))
    _emit(config, io.csv_text(["step", "block", "s", "value"], rows))
    return EXIT_OK


def _load_points(path) -> np.ndarray:
    d = io.load_json(path)
    if isinstance(d, dict):
        d = d.get("points")
    try:
        pts = np.asarray(d, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError("points JSON must be a list of numeric lists") from exc
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.size == 0:
        raise ValidationError("points JSON must be a non-empty list of equal-length lists")
    return pts


def cmd_convex(config: RunConfig) -> int:
    pts = _load_points(config.need("points"))
    w = io.load_json(config.need("weights"))
    if isinstance(w, dict):
        w = w.get("weights")
    try:
        w = np.asarray(w, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError("weights JSON must be a list of numbers") from exc
    ct = ConvexTarget.from_combination(pts, w, radius=config.options.get("radius"))
    N = config.need_n()
    err = cesaro_error_trace(ct, N)
    n = np.arange(1, N + 1)
    _emit(config, io.csv_text(["N", "error", "bound"], zip(n, err, ct.bound(n))))
    return EXIT_OK


def _bv_prefix(phi: PLJFunction, N: int, method: str):
    if method == "direct":
        return signed_sequence_polygonal(phi, N)
    return diagonal_signed_sequence(BVOracle.from_plj(phi)).take(N)


def cmd_gen_bv(config: RunConfig) -> int:
    phi = _load_phi(config)
    prefix = _bv_prefix(phi, config.need_n(), config.options.get("method", "diagonal"))
    _emit(config, io.sequence_csv(prefix))
    return EXIT_OK


def cmd_discrepancy(config: RunConfig) -> int:
    target = io.load_document(config.need("target"), "PLJFunction")
    prefix = io.read_signed_sequence(config.need("seq"), target.domain)
    kind = config.options.get("kind") or "star"
    fn = star_discrepancy_signed if kind == "star" else interval_discrepancy_signed
    _emit(config, io.dumps({"N": len(prefix), "kind": kind, "discrepancy": fn(prefix, target)}) + "\n")
    return EXIT_OK


def cmd_sample(config: RunConfig) -> int:
    phi = _load_phi(config)
    if config.seed is None:
        raise ValidationError("sample needs --seed")
    _emit(config, io.sequence_csv(iid_sampler(phi, config.seed).take(config.need_n())))
    return EXIT_OK


def cmd_report(config: RunConfig) -> int:
    phi = _load_phi(config)
    a, b = phi.domain
    grid = config.n_grid or [1000, 10000, 100000]
    probes = config.options.get("probe_points")
    probes = np.linspace(a, b, 21) if probes is None else np.asarray(probes, dtype=float)
    if np.any((probes < a) | (probes > b)):
        raise ValidationError(f"probe points must lie in {phi.domain}")
    method = config.options.get("method", "diagonal")
    prefix = _bv_prefix(phi, grid[-1], method)
    ups = total_variation(phi)
    base = phi.left[0]
    # The log(N+1)/(N log 2) bound applies to the direct sequence of a continuous nondecreasing target.
    vdc_bound_applies = method == "direct" and phi.is_continuous and phi.is_nondecreasing()
    rows = []
    for N in grid:
        head = prefix.head(N)
        for label, emp, tgt in (
            ("unsigned_cdf", empirical_cdf(head, probes, signed=False), ups.value(probes)),
            ("signed_cdf", empirical_cdf(head, probes, signed=True), phi.value(probes) - base),
        ):
            bound = float(vdc_star_bound(N)) if vdc_bound_applies else "none"
            for x, e, t in zip(probes, emp, tgt):
                rows.append((N, x, label, e, t, abs(e - t), bound))
    _emit(config, io.csv_text(["N", "probe", "label", "empirical", "target", "abs_error", "bound"], rows))
    return EXIT_OK


def cmd_verify(config: RunConfig) -> int:
    summary = verify_suite(config.options["suite"], config.options.get("trials"), config.seed or 0, config.tolerances)
    _emit(config, io.dumps(summary) + "\n")
    return EXIT_OK if summary["passed"] else EXIT_FAILED


COMMANDS = {
    "gen-finite": cmd_gen_finite,
    "merge": cmd_merge,
    "convex": cmd_convex,
    "gen-bv": cmd_gen_bv,
    "discrepancy": cmd_discrepancy,
    "sample": cmd_sample,
    "report": cmd_report,
    "verify": cmd_verify,
}


def run(config: RunConfig) -> int:
    """Execute one validated configuration and return its exit status."""
    return COMMANDS[config.subcommand](config)


def _diagnose(kind: str, code: int, exc: BaseException) -> int:
    msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
    sys.stderr.write(json.dumps({"error": kind, "code": code, "type": type(exc).__name__, "message": msg}) + "\n")
    return code


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_VALIDATION
    try:
        if ns.config:
            config = RunConfig.from_dict(io.load_json(ns.config))
        elif ns.subcommand is None:
            parser.print_help(sys.stderr)
            return EXIT_VALIDATION
        else:
            config = config_from_args(ns)
        return run(config)
    except io.InputOutputError as exc:
        return _diagnose("io", EXIT_IO, exc)
    except (OracleInconsistencyError, QuadratureError, FloatingPointError) as exc:
        return _diagnose("numerical", EXIT_NUMERICAL, exc)
    except (ValidationError, DegenerateMeasureError, SourceExhaustedError) as exc:
        return _diagnose("validation", EXIT_VALIDATION, exc)
    except SignedUDError as exc:
        return _diagnose("numerical", EXIT_NUMERICAL, exc)


if __name__ == "__main__":
    sys.exit(main())
