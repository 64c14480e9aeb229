"""Exact linear solving over F_{p^m}.

Used for basis expansions in the twisted generator bases (psi and the trace
cross-check).  Prime fields go through a vectorized numpy elimination mod p;
extension fields use the same elimination over FieldElem entries.
"""

from __future__ import annotations

import numpy as np

from .scalars import FieldParams


def solve(params: FieldParams, rows: list[list], rhs: list):
    """Solve A x = b over the field; returns a particular solution or None.

    rows is a list of coefficient lists (FieldElem), rhs a list of FieldElem.
    Free variables are set to zero.  None means the system is inconsistent.
    """
    if params.m == 1:
        a = np.array(
            [[c.coeffs[0] for c in row] + [b.coeffs[0]] for row, b in zip(rows, rhs)],
            dtype=np.int64,
        )
        sol = _solve_mod_p(a, params.p)
        if sol is None:
            return None
        elems = params._cache["elems"]
        return [elems[v] for v in sol]
    return _solve_generic(params, rows, rhs)


def _solve_mod_p(aug: np.ndarray, p: int):
    """Gauss-Jordan elimination of an augmented int64 matrix mod p."""
    nrows, ncols1 = aug.shape
    ncols = ncols1 - 1
    aug = aug % p
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        pr = None
        for i in range(r, nrows):
            if aug[i, c]:
                pr = i
                break
        if pr is None:
            continue
        if pr != r:
            aug[[r, pr]] = aug[[pr, r]]
        inv = pow(int(aug[r, c]), p - 2, p)
        aug[r] = aug[r] * inv % p
        mask = aug[:, c].copy()
        mask[r] = 0
        nz = np.nonzero(mask)[0]
        if nz.size:
            aug[nz] = (aug[nz] - np.outer(mask[nz], aug[r])) % p
        pivots.append((r, c))
        r += 1
    for i in range(r, nrows):
        if aug[i, ncols]:
            return None
    sol = [0] * ncols
    for rr, cc in pivots:
        sol[cc] = int(aug[rr, ncols])
    return sol


def _solve_generic(params: FieldParams, rows: list[list], rhs: list):
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    aug = [list(row) + [b] for row, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        pr = next((i for i in range(r, nrows) if aug[i][c]), None)
        if pr is None:
            continue
        if pr != r:
            aug[r], aug[pr] = aug[pr], aug[r]
        inv = aug[r][c].inverse()
        aug[r] = [v * inv for v in aug[r]]
        for i in range(nrows):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        pivots.append((r, c))
        r += 1
    for i in range(r, nrows):
        if aug[i][ncols]:
            return None
    sol = [params.zero] * ncols
    for rr, cc in pivots:
        sol[cc] = aug[rr][ncols]
    return sol
