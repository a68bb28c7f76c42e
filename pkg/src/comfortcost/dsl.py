"""The ``[(X|w),...]`` cost shorthand.

Grammar (whitespace allowed between any two tokens)::

    expr   := '[' term (',' term)* ']'
    term   := '(' ID '|' NUMBER ')'
    ID     := one of the registered partial ids, or 'κ' as an alias of 'K'
    NUMBER := [+-]? digits ('.' digits?)? ([eE] [+-]? digits)?  |  [+-]? '.' digits ...
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Sequence

from .costs import REGISTRY, EvaluationContext, canonical_id, partial_cost
from .errors import CostExprError, InvalidInputError, MissingContextError
from .trajectory import Trajectory

_NUMBER = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-zκ_][A-Za-z0-9_κ]*")


@dataclass(frozen=True)
class CostSpec:
    """Ordered ``(cost_id, weight)`` terms of a weighted superposition."""

    terms: tuple[tuple[str, float], ...]

    def __post_init__(self):
        terms = tuple((canonical_id(cid), float(w)) for cid, w in self.terms)
        if not terms:
            raise InvalidInputError("a cost spec needs at least one term")
        for cid, w in terms:
            if not math.isfinite(w):
                raise InvalidInputError(f"weight of {cid} is not finite")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_weights(cls, weights) -> "CostSpec":
        items = weights.items() if hasattr(weights, "items") else weights
        return cls(tuple(items))

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(cid for cid, _ in self.terms)

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(w for _, w in self.terms)

    def scaled(self, c: float) -> "CostSpec":
        return CostSpec(tuple((cid, c * w) for cid, w in self.terms))

    def __add__(self, other: "CostSpec") -> "CostSpec":
        return CostSpec(self.terms + other.terms)

    def __str__(self):
        return format_cost_expr(self)


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def fail(self, reason):
        raise CostExprError(self.text, self.pos, reason)

    def expect(self, ch: str, what: str = None):
        if self.peek() != ch:
            found = self.peek() or "end of input"
            self.fail(f"expected {what or repr(ch)}, found {found!r}")
        self.pos += 1

    def match(self, pattern):
        self.skip()
        return pattern.match(self.text, self.pos)


def parse_cost_expr(text: str) -> CostSpec:
    sc = _Scanner(text)
    sc.expect("[", "'[' opening the term list")
    if sc.peek() == "]":
        sc.fail("empty term list")
    terms = []
    while True:
        sc.expect("(", "'(' opening a term")
        m = sc.match(_IDENT)
        if m is None:
            sc.fail("expected a partial cost id")
        ident = m.group(0)
        if ident not in REGISTRY and ident not in ("κ",):
            sc.fail(f"unknown partial cost id {ident!r}")
        sc.pos = m.end()
        sc.expect("|", "'|' after the cost id")
        m = sc.match(_NUMBER)
        if m is None:
            sc.fail("missing weight")
        weight = float(m.group(0))
        sc.pos = m.end()
        sc.expect(")", "')' closing the term")
        terms.append((ident, weight))
        nxt = sc.peek()
        if nxt == ",":
            sc.pos += 1
            continue
        if nxt == "]":
            sc.pos += 1
            break
        sc.fail("expected ',' or ']' (unbalanced brackets)" if nxt else "unbalanced brackets: missing ']'")
    if sc.peek():
        sc.fail("trailing characters after ']'")
    return CostSpec(tuple(terms))


def format_weight(w: float) -> str:
    """Shortest decimal that parses back to exactly ``w``."""
    if w == 0.0:
        return "0"
    if w.is_integer() and abs(w) < 1e16:
        return str(int(w))
    return repr(w)


def format_cost_expr(spec: CostSpec) -> str:
    return "[" + ",".join(f"({cid}|{format_weight(w)})" for cid, w in spec.terms) + "]"


@dataclass(frozen=True)
class TermValue:
    cost_id: str
    weight: float
    value: float

    @property
    def weighted(self) -> float:
        return self.weight * self.value


@dataclass(frozen=True)
class CostBreakdown:
    total: float
    terms: tuple[TermValue, ...] = field(default_factory=tuple)

    def as_dict(self) -> dict:
        return {
            "total": self.total,
            "terms": [{"id": t.cost_id, "weight": t.weight, "value": t.value, "weighted": t.weighted}
                      for t in self.terms],
        }


def evaluate(spec: CostSpec, trajectory: Trajectory, ctx: EvaluationContext = None) -> CostBreakdown:
    """Weighted sum of partials, with the per-term values.

    Every term is attempted; missing context across terms is reported once,
    naming all affected ids.
    """
    ctx = ctx if ctx is not None else EvaluationContext()
    values = []
    missing: list[str] = []
    messages = []
    for i, (cid, w) in enumerate(spec.terms):
        try:
            values.append(TermValue(cid, w, partial_cost(cid, trajectory, ctx)))
        except MissingContextError as exc:
            missing.extend(c for c in (exc.cost_ids or (cid,)) if c not in missing)
            messages.append(f"term {i} ({cid}): {exc}")
    if missing:
        raise MissingContextError("; ".join(messages), missing)
    total = 0.0
    for tv in values:
        total += tv.weighted
    return CostBreakdown(total, tuple(values))


def evaluate_many(spec: CostSpec, trajectories: Sequence[Trajectory], ctx: EvaluationContext = None
                  ) -> list[CostBreakdown]:
    return [evaluate(spec, traj, ctx) for traj in trajectories]
