"""Run a registered suite over a seeded ensemble and aggregate a report."""
from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

from ..errors import InputError, MeanformError, UnknownSuite
from .generators import GeneratorError, trial_rng
from .suites import HARNESS_ONLY, REGISTRY

WORST_TABLE = 10


@dataclass
class VerifyReport:
    suite: str
    trials: int
    seed: int
    dims: tuple[int, int] | None
    threshold: float
    violations: int
    trial_errors: int
    flagged: int
    max_residual: float
    worst_case: dict
    elapsed: float
    worst: list[dict] = field(default_factory=list)
    errors: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["dims"] = list(self.dims) if self.dims else None
        d["passed"] = self.passed
        if not math.isfinite(self.max_residual):
            d["max_residual"] = None
        return d

    def to_json(self, indent=2) -> str:
        return json.dumps(self.to_dict(), indent=indent, default=_json_default)


def _json_default(obj):
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"not serializable: {type(obj).__name__}")


def suite_names(include_harness=False) -> list[str]:
    return [n for n in REGISTRY if include_harness or n not in HARNESS_ONLY]


def default_threads() -> int:
    env = os.environ.get("MEANFORM_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise InputError(f"MEANFORM_THREADS must be an integer, got {env!r}") from None
        if n < 1:
            raise InputError("MEANFORM_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1


def _one(suite, seed, trial, dims):
    rng = trial_rng(seed, trial)
    d = int(rng.integers(dims[0], dims[1] + 1)) if suite.uses_dims else 0
    try:
        return trial, suite.check(rng, d), None
    except (GeneratorError, MeanformError) as exc:
        return trial, None, f"{type(exc).__name__}: {exc}"


def run_suite(name: str, trials: int, seed: int, dims=(2, 6), threads: int = 1) -> VerifyReport:
    """Run ``trials`` independent trials of suite ``name``.

    Trial ``k`` draws from its own stream keyed by ``(seed, k)``, so the
    residuals do not depend on ``threads``.
    """
    if name not in REGISTRY:
        raise UnknownSuite(f"unknown suite {name!r}; known: {', '.join(REGISTRY)}")
    if trials < 1:
        raise InputError("trials must be >= 1")
    lo, hi = int(dims[0]), int(dims[1])
    if not 1 <= lo <= hi:
        raise InputError(f"bad dimension range {lo}..{hi}")
    if threads < 1:
        raise InputError("threads must be >= 1")
    suite = REGISTRY[name]
    start = time.perf_counter()
    if threads == 1:
        results = [_one(suite, seed, k, (lo, hi)) for k in range(trials)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda k: _one(suite, seed, k, (lo, hi)), range(trials)))
    elapsed = time.perf_counter() - start

    done = [(k, t) for k, t, err in results if t is not None]
    errors = [{"trial": k, "error": err} for k, _, err in results if err is not None]

    def key(item):
        r = item[1].residual
        return math.inf if math.isnan(r) else r

    ranked = sorted(done, key=lambda it: (-key(it), it[0]))
    violations = sum(1 for _, t in done if not t.residual <= suite.threshold)
    worst_case: dict = {}
    max_residual = -math.inf
    if ranked:
        k, t = ranked[0]
        max_residual = t.residual
        worst_case = {"trial": k, "seed": seed, "dim": t.dim, "residual": t.residual,
                      "input": t.reproducer}
    table = [{"trial": k, "dim": t.dim, "residual": t.residual} for k, t in ranked[:WORST_TABLE]]
    return VerifyReport(name, trials, seed, (lo, hi) if suite.uses_dims else None,
                        suite.threshold, violations, len(errors),
                        sum(1 for _, t in done if t.flagged), max_residual, worst_case,
                        elapsed, table, errors)
