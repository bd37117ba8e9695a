"""Pure-python phase-one simplex kernel.

Same contract as the compiled kernel in ``_pivot.pyx``; used as the
fallback when the extension is not built.  The inner update is a rank-one
tableau elimination, vectorized with numpy.
"""

from __future__ import annotations

import numpy as np

OPTIMAL = 0
ITERATION_LIMIT = 1
STALLED = 2


def run_phase1(t, basis, n_struct, eps_cost, eps_pivot, max_iter):
    """Drive the phase-one tableau ``t`` to structural optimality in place.

    t:        (m+1) x (n_struct + m + 1) float64 tableau.  Rows 0..m-1 hold
              [A | I | b] with b >= 0; row m holds the priced-out reduced
              costs with t[m, -1] = -z.
    basis:    length-m int64 array, basis[i] = column basic in row i.
    n_struct: number of structural columns; columns n_struct..n_struct+m-1
              are artificials and never re-enter the basis.

    Bland's rule: entering column is the lowest-index structural column
    with reduced cost below -eps_cost; leaving row minimizes the ratio,
    ties broken by lowest basic-variable index.  Returns (status, pivots).
    """
    m = basis.shape[0]
    rhs = t.shape[1] - 1
    obj = t[m]
    for it in range(max_iter):
        entering = -1
        for j in range(n_struct):
            if obj[j] < -eps_cost:
                entering = j
                break
        if entering < 0:
            return OPTIMAL, it

        col = t[:m, entering]
        pos = col > eps_pivot
        if not pos.any():
            return STALLED, it
        ratios = np.full(m, np.inf)
        ratios[pos] = t[:m, rhs][pos] / col[pos]
        best = ratios.min()
        tied = np.nonzero(ratios <= best + 1e-12 * (1.0 + abs(best)))[0]
        leave = tied[np.argmin(basis[tied])]

        piv = t[leave, entering]
        t[leave] /= piv
        scale = t[:, entering].copy()
        scale[leave] = 0.0
        t -= np.outer(scale, t[leave])
        t[:, entering] = 0.0
        t[leave, entering] = 1.0
        basis[leave] = entering
    return ITERATION_LIMIT, max_iter
