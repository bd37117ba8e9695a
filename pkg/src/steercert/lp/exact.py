"""Exact rational feasibility solver.

Same phase-one construction as the float path, run entirely in
``fractions.Fraction`` arithmetic with Bland's rule, so it terminates and
never answers undecided: z* == 0 yields an exact model, z* > 0 yields an
exact separating certificate.  Both witnesses are re-checked by exact
substitution; a failure there is an internal bug, not an input property.
"""

from __future__ import annotations

from fractions import Fraction

from ..errors import InternalCheckError
from .problem import FEASIBLE, INFEASIBLE, FeasibilityProblem, FeasibilityVerdict

# Bland's rule cannot cycle, so this only guards against a logic bug.
_MAX_PIVOTS = 2_000_000


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise ValueError("constraint data contains non-finite entries")
        return Fraction(value)
    raise ValueError(f"cannot use {type(value).__name__} in exact mode")


def solve_feasibility_exact(problem: FeasibilityProblem) -> FeasibilityVerdict:
    a = [[_as_fraction(v) for v in row] for row in problem.a]
    b = [_as_fraction(v) for v in problem.b]
    m = len(b)
    n = problem.num_vars
    zero = Fraction(0)

    sign = [Fraction(-1) if bi < 0 else Fraction(1) for bi in b]
    rows = []
    for i in range(m):
        row = [sign[i] * v for v in a[i]]
        row += [Fraction(1) if k == i else zero for k in range(m)]
        row.append(sign[i] * b[i])
        rows.append(row)
    obj = [-sum(rows[i][j] for i in range(m)) for j in range(n)]
    obj += [zero] * m
    obj.append(-sum(rows[i][-1] for i in range(m)))
    basis = list(range(n, n + m))

    pivots = 0
    while True:
        entering = -1
        for j in range(n):
            if obj[j] < 0:
                entering = j
                break
        if entering < 0:
            break
        leave = -1
        best = zero
        for i in range(m):
            coeff = rows[i][entering]
            if coeff > 0:
                ratio = rows[i][-1] / coeff
                if leave < 0 or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave = i
                    best = ratio
        if leave < 0:
            raise InternalCheckError("phase one claims an unbounded artificial objective")

        piv = rows[leave][entering]
        rows[leave] = [v / piv for v in rows[leave]]
        pivot_row = rows[leave]
        for i in range(m):
            if i == leave:
                continue
            factor = rows[i][entering]
            if factor != 0:
                rows[i] = [v - factor * p for v, p in zip(rows[i], pivot_row)]
        factor = obj[entering]
        if factor != 0:
            obj = [v - factor * p for v, p in zip(obj, pivot_row)]
        basis[leave] = entering
        pivots += 1
        if pivots > _MAX_PIVOTS:
            raise InternalCheckError("pivot budget exhausted under an anti-cycling rule")

    z = -obj[-1]
    meta = {"mode": "exact", "pivots": pivots, "z": z}

    if z == 0:
        w = [zero] * n
        for i in range(m):
            if basis[i] < n:
                w[basis[i]] = rows[i][-1]
        for i in range(m):
            if sum(a[i][j] * w[j] for j in range(n)) != b[i]:
                raise InternalCheckError("exact model failed re-substitution")
        if any(v < 0 for v in w):
            raise InternalCheckError("exact model has a negative component")
        return FeasibilityVerdict(FEASIBLE, model=w, meta=meta)

    y = [Fraction(1) - obj[n + k] for k in range(m)]
    cert = [-(y[k] * sign[k]) for k in range(m)]
    for j in range(n):
        if sum(cert[i] * a[i][j] for i in range(m)) < 0:
            raise InternalCheckError("exact certificate failed re-substitution")
    if sum(cert[i] * b[i] for i in range(m)) >= 0:
        raise InternalCheckError("exact certificate does not separate")
    return FeasibilityVerdict(INFEASIBLE, certificate=cert, meta=meta)
