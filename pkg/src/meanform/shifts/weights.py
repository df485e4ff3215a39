"""Weight sequences of unilateral and bilateral weighted shifts.

Three representations, all immutable:

* :class:`ExplicitList` - finitely many values followed by a constant tail
  (either the last value repeated or a declared limit);
* :class:`Periodic` - ``values[i mod p]``;
* :class:`Expression` - a parsed rule in the index ``i``.

Text form (accepted wherever a sequence is expected)::

    list:1,2,3[;tail=last|;limit=<v>]   periodic:3,1   expr:2+(-1)^i
    bilateral:periodic:...   bilateral:expr:...
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import EvalDomainError, InputError, ParseError
from .expr import Node, evaluate, parse_weight_expr, to_source

VALIDATION_RANGE = 10**6


def _check_weights(vals: np.ndarray, where: str) -> None:
    if not np.all(np.isfinite(vals)):
        raise EvalDomainError(f"{where}: weights must be finite")
    if np.any(vals <= 0):
        raise EvalDomainError(f"{where}: weights must be strictly positive")


class WeightSequence:
    """Base class; subclasses implement :meth:`evaluate` on integer index arrays."""

    bilateral: bool = False
    declared_sup: float | None = None

    def evaluate(self, idx) -> np.ndarray:
        raise NotImplementedError

    def log_evaluate(self, idx) -> np.ndarray:
        return np.log(self.evaluate(idx))

    def __call__(self, i):
        return float(self.evaluate(np.asarray([i]))[0])

    def window(self, start: int, stop: int) -> np.ndarray:
        return self.evaluate(np.arange(start, stop))

    def to_spec(self) -> str:
        raise NotImplementedError


def _fmt(x: float) -> str:
    return repr(float(x))


@dataclass(frozen=True)
class ExplicitList(WeightSequence):
    values: tuple[float, ...]
    limit: float | None = None  # None: repeat the last value
    declared_sup: float | None = None
    bilateral: bool = field(default=False, init=False)

    def __post_init__(self):
        if not self.values:
            raise InputError("explicit weight list must be nonempty")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        _check_weights(np.array(self.values + (self.tail,)), "list")

    @property
    def tail(self) -> float:
        return self.values[-1] if self.limit is None else float(self.limit)

    def evaluate(self, idx) -> np.ndarray:
        idx = np.asarray(idx)
        if np.any(idx < 0):
            raise InputError("unilateral sequence evaluated at a negative index")
        vals = np.array(self.values)
        out = np.full(idx.shape, self.tail)
        inside = idx < len(vals)
        out[inside] = vals[idx[inside]]
        return out

    @property
    def sup(self) -> float:
        return max(max(self.values), self.tail)

    def to_spec(self) -> str:
        body = ",".join(_fmt(v) for v in self.values)
        tail = ";tail=last" if self.limit is None else f";limit={_fmt(self.limit)}"
        return f"list:{body}{tail}"


@dataclass(frozen=True)
class Periodic(WeightSequence):
    values: tuple[float, ...]
    bilateral: bool = False
    declared_sup: float | None = None

    def __post_init__(self):
        if not self.values:
            raise InputError("period must contain at least one value")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        _check_weights(np.array(self.values), "periodic")

    @property
    def period(self) -> int:
        return len(self.values)

    def evaluate(self, idx) -> np.ndarray:
        idx = np.asarray(idx)
        if not self.bilateral and np.any(idx < 0):
            raise InputError("unilateral sequence evaluated at a negative index")
        return np.array(self.values)[np.mod(idx, self.period)]

    @property
    def sup(self) -> float:
        return max(self.values)

    def to_spec(self) -> str:
        body = "periodic:" + ",".join(_fmt(v) for v in self.values)
        return "bilateral:" + body if self.bilateral else body


@dataclass(frozen=True)
class Expression(WeightSequence):
    """A rule in ``i``, validated positive and finite on ``[0, 10^6]`` at construction.

    Bilateral rules are validated on ``[-10^6, 10^6]``.
    """

    ast: Node
    source: str = ""
    bilateral: bool = False
    declared_sup: float | None = None
    validate: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        if not self.source:
            object.__setattr__(self, "source", to_source(self.ast))
        if self.validate:
            lo = -VALIDATION_RANGE if self.bilateral else 0
            vals = evaluate(self.ast, np.arange(lo, VALIDATION_RANGE + 1))
            _check_weights(vals, f"expr:{self.source}")

    @classmethod
    def parse(cls, text: str, bilateral: bool = False, declared_sup: float | None = None):
        return cls(parse_weight_expr(text), text, bilateral, declared_sup)

    def evaluate(self, idx) -> np.ndarray:
        idx = np.asarray(idx)
        if not self.bilateral and np.any(idx < 0):
            raise InputError("unilateral sequence evaluated at a negative index")
        vals = evaluate(self.ast, idx)
        _check_weights(vals, f"expr:{self.source}")
        return vals

    def to_spec(self) -> str:
        body = f"expr:{self.source}"
        return "bilateral:" + body if self.bilateral else body


def parse_weight_spec(text: str) -> WeightSequence:
    """Parse the textual weight form into a sequence."""
    spec = text.strip()
    bilateral = False
    if spec.startswith("bilateral:"):
        bilateral = True
        spec = spec[len("bilateral:"):].strip()
    kind, sep, body = spec.partition(":")
    if not sep:
        raise ParseError("missing ':' after sequence kind", 0, {"list", "periodic", "expr"})
    kind = kind.strip()
    offset = len(text.encode()) - len(body.encode())
    if kind == "expr":
        try:
            ast = parse_weight_expr(body)
        except ParseError as exc:
            raise ParseError("bad weight expression", offset + exc.offset, exc.expected) from None
        return Expression(ast, body.strip(), bilateral)
    if kind == "periodic":
        return Periodic(_numbers(body, offset), bilateral)
    if kind == "list":
        if bilateral:
            raise InputError("explicit lists are unilateral only")
        values, _, policy = body.partition(";")
        limit = None
        policy = policy.strip()
        if policy.startswith("limit="):
            limit = _numbers(policy[len("limit="):], offset)[0]
        elif policy not in ("", "tail=last"):
            raise ParseError(f"unknown tail policy {policy!r}", offset, {"tail=last", "limit=<v>"})
        return ExplicitList(_numbers(values, offset), limit)
    raise ParseError(f"unknown sequence kind {kind!r}", 0, {"list", "periodic", "expr"})


def _numbers(body: str, offset: int) -> tuple[float, ...]:
    out = []
    for part in body.split(","):
        try:
            out.append(float(part))
        except ValueError:
            raise ParseError(f"not a number: {part.strip()!r}", offset, {"number"}) from None
    return tuple(out)
