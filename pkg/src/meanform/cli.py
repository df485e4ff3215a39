"""``meanform`` command-line entry point.

Exit codes: 0 success, 1 usage error, 2 input or parse error, 3 numerical
failure, 4 verification found violations. Errors go to stderr prefixed
``E<code>:``.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import __version__
from .classes import classify, kernel_inclusion_check
from .errors import InputError, MeanformError
from .io import csv_lines, emit_matrix_document, matrix_to_document, read_matrix
from .numrange import numerical_range_boundary
from .polar import aluthge_transform, canonical_polar, mean_iterates, mean_limit_estimate, mean_transform
from .shifts import (
    exp_log_bridge,
    parse_weight_spec,
    shift_aluthge_weights,
    shift_mean_iterate_weights,
    shift_mean_limit,
    shift_mean_weights,
    shift_spectral_radius,
)
from .shifts.calculus import DEFAULT_RADIUS_N, DEFAULT_SCHEDULE
from .verify import default_threads, run_suite, suite_names

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NUMERIC, EXIT_VIOLATION = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    tol: float = 1e-10
    class_tol: float = 1e-8
    n_max: int = 10_000
    i_max: int | None = None
    radius_n: int = DEFAULT_RADIUS_N
    points: int = 360
    format: str = "csv"
    seed: int = 0
    threads: int | None = None

    def validate(self) -> "RunConfig":
        for name in ("tol", "class_tol"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0:
                raise InputError(f"config: {name} must be a number > 0")
        for name in ("n_max", "radius_n", "points", "seed"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int):
                raise InputError(f"config: {name} must be an integer")
        if self.n_max < 0 or self.radius_n < 1 or self.points < 8:
            raise InputError("config: n_max >= 0, radius_n >= 1 and points >= 8 required")
        if self.i_max is not None and (not isinstance(self.i_max, int) or self.i_max < 1):
            raise InputError("config: i_max must be a positive integer")
        if self.threads is not None and (not isinstance(self.threads, int) or self.threads < 1):
            raise InputError("config: threads must be an integer >= 1")
        if self.format not in ("csv", "json"):
            raise InputError("config: format must be 'csv' or 'json'")
        return self

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"config: malformed JSON: {exc.msg}") from None
        if not isinstance(raw, dict):
            raise InputError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise InputError(f"config: unknown keys {', '.join(unknown)}")
        return cls(**raw).validate()


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _dims(text: str):
    lo, sep, hi = text.partition("..")
    try:
        a, b = int(lo), int(hi if sep else lo)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a..b, got {text!r}") from None
    return a, b


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="meanform", description="Mean transform and weighted-shift toolkit.")
    p.add_argument("--version", action="version", version=f"meanform {__version__}")
    p.add_argument("--config", help="JSON RunConfig file; flags override it")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("polar", help="canonical polar decomposition")
    s.add_argument("file")
    s = sub.add_parser("transform", help="mean or Aluthge transform")
    s.add_argument("--kind", choices=("mean", "aluthge"), default="mean")
    s.add_argument("--lambda", dest="lam", type=float, default=0.5)
    s.add_argument("file")
    s = sub.add_parser("iterate", help="mean-transform iterates as CSV")
    s.add_argument("--n", type=int, default=None, help="number of iterations")
    s.add_argument("--tol", type=float, default=None)
    s.add_argument("file")
    s = sub.add_parser("meanlimit", help="estimate of the mean limit")
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--tol", type=float, default=None)
    s.add_argument("file")
    s = sub.add_parser("numrange", help="numerical range boundary as CSV")
    s.add_argument("--points", type=int, default=None)
    s.add_argument("file")
    s = sub.add_parser("classify", help="operator class predicates")
    s.add_argument("--tol", type=float, default=None)
    s.add_argument("file")

    sh = sub.add_parser("shift", help="weighted-shift calculus")
    ssub = sh.add_subparsers(dest="shift_command", required=True, parser_class=_Parser)
    for name, helptext in (("transform", "transformed weight rule"),
                           ("iterate", "weights of the n-th mean iterate"),
                           ("specradius", "spectral radius"),
                           ("meanlimit", "mean limit with trace"),
                           ("bridge", "mean limit versus log r(W_exp)")):
        q = ssub.add_parser(name, help=helptext)
        q.add_argument("--weights", required=True)
        q.add_argument("--i-max", type=int, default=None)
        if name == "transform":
            q.add_argument("--kind", choices=("mean", "aluthge"), default="mean")
        if name in ("transform", "iterate"):
            q.add_argument("--count", type=int, default=16, help="weights to list")
        if name == "iterate":
            q.add_argument("--n", type=int, required=True)
        if name in ("specradius", "bridge"):
            q.add_argument("--n-max", type=int, default=None)
        if name in ("meanlimit", "bridge"):
            q.add_argument("--schedule", default=None, help="comma-separated n values")

    v = sub.add_parser("verify", help="randomized result checks")
    v.add_argument("--suite", default=None, help="suite id or 'all'")
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--dims", type=_dims, default=(2, 6))
    v.add_argument("--threads", type=int, default=None)
    v.add_argument("--list", action="store_true", help="list suite ids and exit")
    return p


class _Out:
    def __init__(self, fmt, stream):
        self.fmt = fmt
        self.stream = stream

    def emit(self, value=None, header=None, rows=None, extra=None):
        if self.fmt == "json":
            doc = {}
            if value is not None:
                doc["value"] = value
            if extra:
                doc.update(extra)
            if header is not None:
                doc["columns"] = list(header)
                doc["rows"] = [[_json_num(v) for v in r] for r in rows]
            self.stream.write(json.dumps(doc, indent=2) + "\n")
            return
        if value is not None:
            self.stream.write(f"{value!r}\n")
        if extra:
            for k, val in extra.items():
                self.stream.write(f"# {k}={val}\n")
        if header is not None:
            self.stream.write(csv_lines(header, rows))


def _json_num(v):
    return None if isinstance(v, float) and v != v else v


def _schedule(text):
    if text is None:
        return DEFAULT_SCHEDULE
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise InputError(f"schedule must be comma-separated integers, got {text!r}") from None


def _cmd_polar(args, cfg, out):
    parts = canonical_polar(read_matrix(args.file))
    out.stream.write(json.dumps({
        "numerical_rank": parts.numerical_rank,
        "rank_tol": parts.rank_tol,
        "isometry_part": matrix_to_document(parts.isometry_part),
        "modulus": matrix_to_document(parts.modulus),
    }, indent=2) + "\n")
    return EXIT_OK


def _cmd_transform(args, cfg, out):
    t = read_matrix(args.file)
    res = mean_transform(t) if args.kind == "mean" else aluthge_transform(t, args.lam)
    out.stream.write(emit_matrix_document(res))
    return EXIT_OK


def _cmd_iterate(args, cfg, out):
    n = cfg.n_max if args.n is None else args.n
    tol = cfg.tol if args.tol is None else args.tol
    trace = mean_iterates(read_matrix(args.file), n_max=n, stop_tol=tol, radius_points=cfg.points)
    rows = [(s.n, s.norm, s.numerical_radius, s.step_distance) for s in trace.steps]
    out.emit(header=("n", "norm", "numerical_radius", "step_distance"), rows=rows)
    return EXIT_OK


def _cmd_meanlimit(args, cfg, out):
    n = cfg.n_max if args.n is None else args.n
    tol = cfg.tol if args.tol is None else args.tol
    res = mean_limit_estimate(read_matrix(args.file), n_max=n, stop_tol=tol)
    out.emit(res.value, extra={"converged": res.converged, "iterations": res.iterations})
    return EXIT_OK


def _cmd_numrange(args, cfg, out):
    m = cfg.points if args.points is None else args.points
    b = numerical_range_boundary(read_matrix(args.file), m)
    rows = [(float(th), float(s), float(z.real), float(z.imag))
            for th, s, z in zip(b.thetas, b.supports, b.points)]
    out.emit(header=("theta", "support", "re", "im"), rows=rows)
    return EXIT_OK


def _cmd_classify(args, cfg, out):
    t = read_matrix(args.file)
    tol = cfg.class_tol if args.tol is None else args.tol
    rep = classify(t, tol)
    ki = kernel_inclusion_check(t, tol)
    doc = asdict(rep)
    doc["kernel_inclusion"] = ki.holds
    out.stream.write(json.dumps(doc, indent=2, default=float) + "\n")
    return EXIT_OK


def _cmd_shift(args, cfg, out):
    alpha = parse_weight_spec(args.weights)
    i_max = args.i_max if args.i_max is not None else cfg.i_max
    sc = args.shift_command
    if sc == "transform":
        res = shift_mean_weights(alpha) if args.kind == "mean" else shift_aluthge_weights(alpha)
        start = -(args.count // 2) if res.bilateral else 0
        idx = range(start, start + args.count)
        vals = res.evaluate(np.arange(idx.start, idx.stop))
        out.emit(extra={"weights": res.to_spec()}, header=("i", "weight"),
                 rows=[(i, float(w)) for i, w in zip(idx, vals)])
        return EXIT_OK
    if sc == "iterate":
        vals = shift_mean_iterate_weights(alpha, args.n, range(args.count))
        out.emit(header=("i", "weight"), rows=[(i, float(w)) for i, w in enumerate(vals)])
        return EXIT_OK
    if sc == "specradius":
        n_max = args.n_max or cfg.radius_n
        res = shift_spectral_radius(alpha, n_max, i_max)
        extra = {"estimate": res.estimate}
        if res.closed_form is not None:
            extra["closed_form"] = res.closed_form
        out.emit(res.value, header=("n", "window_root"), rows=res.diagnostics, extra=extra)
        return EXIT_OK
    if sc == "meanlimit":
        res = shift_mean_limit(alpha, _schedule(args.schedule), i_max)
        if res.boundary_warning:
            sys.stderr.write("warning: supremum attained at i_max; raise --i-max\n")
        out.emit(res.value, header=("n", "sup_weight"), rows=res.trace)
        return EXIT_OK
    n_max = args.n_max or cfg.radius_n
    rep = exp_log_bridge(alpha, _schedule(args.schedule), i_max, n_max)
    out.stream.write(json.dumps(asdict(rep), indent=2) + "\n")
    return EXIT_OK if rep.inequality_holds and rep.identity_holds else EXIT_VIOLATION


def _cmd_verify(args, cfg, out):
    if args.list:
        for name in suite_names(include_harness=True):
            out.stream.write(name + "\n")
        return EXIT_OK
    if args.suite is None:
        raise UsageError("verify: --suite is required")
    names = suite_names() if args.suite == "all" else [args.suite]
    seed = cfg.seed if args.seed is None else args.seed
    threads = args.threads or cfg.threads or default_threads()
    if args.trials < 1:
        raise InputError("--trials must be >= 1")
    failed = False
    for name in names:
        rep = run_suite(name, args.trials, seed, args.dims, threads)
        out.stream.write(rep.to_json(indent=None) + "\n")
        out.stream.flush()
        failed |= not rep.passed
    return EXIT_VIOLATION if failed else EXIT_OK


_COMMANDS = {
    "polar": _cmd_polar,
    "transform": _cmd_transform,
    "iterate": _cmd_iterate,
    "meanlimit": _cmd_meanlimit,
    "numrange": _cmd_numrange,
    "classify": _cmd_classify,
    "shift": _cmd_shift,
    "verify": _cmd_verify,
}


def _load_config(path):
    if path is None:
        return RunConfig().validate()
    try:
        with open(path, encoding="utf-8") as fh:
            return RunConfig.from_json(fh.read())
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc.strerror}") from None


def dispatch(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        cfg = _load_config(args.config)
        if args.format:
            cfg.format = args.format
        return _COMMANDS[args.command](args, cfg, _Out(cfg.format, stdout))
    except UsageError as exc:
        stderr.write(f"E{EXIT_USAGE}: {exc}\n")
        return EXIT_USAGE
    except InputError as exc:
        stderr.write(f"E{EXIT_INPUT}: {type(exc).__name__}: {exc}\n")
        return EXIT_INPUT
    except (MeanformError, ArithmeticError, np.linalg.LinAlgError) as exc:
        stderr.write(f"E{EXIT_NUMERIC}: {type(exc).__name__}: {exc}\n")
        return EXIT_NUMERIC
    except ValueError as exc:
        stderr.write(f"E{EXIT_INPUT}: {exc}\n")
        return EXIT_INPUT


def main() -> None:
    sys.exit(dispatch())
