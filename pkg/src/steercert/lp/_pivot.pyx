# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled phase-one simplex kernel.

Contract identical to ``_pivot_py.run_phase1``: drives the priced-out
phase-one tableau to structural optimality in place under Bland's rule,
artificials barred from re-entering.  Returns (status, pivots).
"""

OPTIMAL = 0
ITERATION_LIMIT = 1
STALLED = 2


def run_phase1(double[:, ::1] t, Py_ssize_t[::1] basis, int n_struct,
               double eps_cost, double eps_pivot, int max_iter):
    cdef int m = basis.shape[0]
    cdef int ncols = t.shape[1]
    cdef int rhs = ncols - 1
    cdef int it, i, j, entering, leave
    cdef double best, ratio, piv, factor, tol

    for it in range(max_iter):
        entering = -1
        for j in range(n_struct):
            if t[m, j] < -eps_cost:
                entering = j
                break
        if entering < 0:
            return OPTIMAL, it

        # ratio test, ties broken by lowest basic-variable index
        leave = -1
        best = 0.0
        for i in range(m):
            if t[i, entering] > eps_pivot:
                ratio = t[i, rhs] / t[i, entering]
                if leave < 0:
                    leave = i
                    best = ratio
                else:
                    tol = 1e-12 * (1.0 + (best if best >= 0 else -best))
                    if ratio < best - tol:
                        leave = i
                        best = ratio
                    elif ratio <= best + tol and basis[i] < basis[leave]:
                        leave = i
                        best = ratio if ratio < best else best
        if leave < 0:
            return STALLED, it

        piv = t[leave, entering]
        for j in range(ncols):
            t[leave, j] /= piv
        for i in range(m + 1):
            if i == leave:
                continue
            factor = t[i, entering]
            if factor != 0.0:
                for j in range(ncols):
                    t[i, j] -= factor * t[leave, j]
        for i in range(m + 1):
            t[i, entering] = 0.0
        t[leave, entering] = 1.0
        basis[leave] = entering
    return ITERATION_LIMIT, max_iter
