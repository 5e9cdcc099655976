"""Dense two-phase primal simplex for ``min c.x  s.t.  A x <= b, x >= 0``.

Sized for the approximate-l1 programs (a few hundred rows). Entering
columns use Dantzig's rule; after a streak of degenerate pivots the solver
switches to Bland's rule, which cannot cycle.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TOL = 1e-10
_DEGENERATE_STREAK = 50


@dataclass
class LPResult:
    status: str          # "optimal" | "infeasible" | "unbounded" | "iteration_limit"
    x: np.ndarray | None
    fun: float | None
    iterations: int


def _pivot(tab: np.ndarray, row: int, col: int) -> None:
    tab[row] /= tab[row, col]
    factor = tab[:, col].copy()
    factor[row] = 0.0
    tab -= np.outer(factor, tab[row])


def _run(tab, basis, ncols, max_iter):
    """Iterate on ``tab`` (objective in the last row) until optimal.

    Only the first ``ncols`` columns may enter. Returns (status, iterations).
    """
    m = tab.shape[0] - 1
    it = 0
    degenerate = 0
    while it < max_iter:
        red = tab[-1, :ncols]
        candidates = np.flatnonzero(red < -TOL)
        if candidates.size == 0:
            return "optimal", it
        if degenerate >= _DEGENERATE_STREAK:
            col = int(candidates[0])
        else:
            col = int(candidates[np.argmin(red[candidates])])
        colv = tab[:m, col]
        pos = np.flatnonzero(colv > TOL)
        if pos.size == 0:
            return "unbounded", it
        ratios = tab[pos, -1] / colv[pos]
        best = ratios.min()
        ties = pos[ratios <= best + TOL * max(1.0, abs(best))]
        row = int(ties[np.argmin(np.asarray(basis)[ties])])
        degenerate = degenerate + 1 if best <= TOL else 0
        _pivot(tab, row, col)
        basis[row] = col
        it += 1
    return "iteration_limit", it


def solve_lp(c, a_ub, b_ub, max_iter: int = 50_000) -> LPResult:
    c = np.asarray(c, dtype=np.float64)
    a = np.array(a_ub, dtype=np.float64)
    b = np.array(b_ub, dtype=np.float64)
    m, nv = a.shape

    neg = b < 0
    a[neg] *= -1
    b[neg] *= -1
    art_rows = np.flatnonzero(neg)
    nart = art_rows.size
    ncols = nv + m + nart

    tab = np.zeros((m + 1, ncols + 1))
    tab[:m, :nv] = a
    # slack (+1) on <= rows, surplus (-1) on flipped rows
    tab[np.arange(m), nv + np.arange(m)] = np.where(neg, -1.0, 1.0)
    tab[art_rows, nv + m + np.arange(nart)] = 1.0
    tab[:m, -1] = b

    basis = [nv + i for i in range(m)]
    for j, r in enumerate(art_rows):
        basis[r] = nv + m + j

    iterations = 0
    if nart:
        tab[-1, nv + m:ncols] = 1.0
        tab[-1] -= tab[art_rows].sum(axis=0)
        status, it = _run(tab, basis, ncols, max_iter)
        iterations += it
        if status != "optimal":
            return LPResult(status, None, None, iterations)
        if -tab[-1, -1] > 1e-8 * max(1.0, np.abs(b).max()):
            return LPResult("infeasible", None, None, iterations)
        # drive zero-level artificials out of the basis
        for r in range(m):
            if basis[r] >= nv + m:
                nz = np.flatnonzero(np.abs(tab[r, :nv + m]) > 1e-9)
                if nz.size:
                    _pivot(tab, r, int(nz[0]))
                    basis[r] = int(nz[0])
        tab = np.delete(tab, np.s_[nv + m:ncols], axis=1)
        ncols = nv + m

    tab[-1] = 0.0
    tab[-1, :nv] = c
    for r, j in enumerate(basis):
        if j < nv and c[j] != 0.0:
            tab[-1] -= c[j] * tab[r]
    status, it = _run(tab, basis, ncols, max_iter - iterations)
    iterations += it
    if status != "optimal":
        return LPResult(status, None, None, iterations)

    x = np.zeros(ncols)
    for r, j in enumerate(basis):
        if j < ncols:
            x[j] = tab[r, -1]
    x = np.maximum(x[:nv], 0.0)
    return LPResult("optimal", x, float(c @ x), iterations)
