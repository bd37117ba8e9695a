"""Problem and verdict containers for the feasibility engine.

A :class:`FeasibilityProblem` is the standard-form question

    does there exist w >= 0 with  A w = b ?

Entries may be floats (or numpy arrays) for the tolerance-based solver,
or :class:`fractions.Fraction` values for the exact solver.  Verdicts
carry either a model (a witnessing w) or a separating certificate c with
``c . A >= 0`` componentwise and ``c . b < 0``, and are re-verified by
substitution before being returned by the solvers.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Sequence

from ..errors import InputError

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
UNDECIDED = "undecided"


@dataclass(frozen=True)
class FeasibilityProblem:
    """Equality-constrained nonnegative feasibility system A w = b, w >= 0.

    ``a`` is a sequence of constraint rows (or a 2D numpy array) and ``b``
    the matching right-hand sides.  All rows must have length ``num_vars``.
    """

    a: Any
    b: Any
    num_vars: int

    def __post_init__(self):
        if len(self.a) != len(self.b):
            raise InputError(f"{len(self.a)} rows but {len(self.b)} right-hand sides")
        for i, row in enumerate(self.a):
            if len(row) != self.num_vars:
                raise InputError(f"row {i} has length {len(row)}, expected {self.num_vars}")

    @property
    def num_constraints(self) -> int:
        return len(self.b)


@dataclass(frozen=True)
class FeasibilityVerdict:
    """Outcome of a feasibility solve.

    status:      one of FEASIBLE / INFEASIBLE / UNDECIDED.
    model:       variable assignment satisfying the constraints (FEASIBLE).
    certificate: dual vector c with c.A >= 0 and c.b < 0 (INFEASIBLE).
    gap:         pair of phase-one infeasibility measures (UNDECIDED): for
                 engine verdicts these are the inner and outer LP objectives,
                 for a raw solve both entries equal the phase-one objective.
    meta:        solver/engine context (mode, tolerance, mesh size, ...).
    """

    status: str
    model: Sequence | None = None
    certificate: Sequence | None = None
    gap: tuple | None = None
    meta: dict = field(default_factory=dict)

    @property
    def is_feasible(self) -> bool:
        return self.status == FEASIBLE

    @property
    def is_infeasible(self) -> bool:
        return self.status == INFEASIBLE

    @property
    def is_undecided(self) -> bool:
        return self.status == UNDECIDED

    def with_meta(self, **extra) -> "FeasibilityVerdict":
        merged = dict(self.meta)
        merged.update(extra)
        return replace(self, meta=merged)

    def to_dict(self) -> dict:
        """JSON-safe summary; exact rationals become "num/den" strings."""
        return {
            "status": self.status,
            "model": _jsonify(self.model),
            "certificate": _jsonify(self.certificate),
            "gap": _jsonify(self.gap),
            "meta": _jsonify(self.meta),
        }


def _jsonify(value):
    if value is None or isinstance(value, (str, int, bool)):
        return value
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, float):
        return value
    if isinstance(value, dict):
        return {str(k): _jsonify(v) for k, v in value.items()}
    if hasattr(value, "tolist"):
        return _jsonify(value.tolist())
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    return float(value)


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse a "num/den" string (or plain integer) into a Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not a rational number: {text!r}") from exc
