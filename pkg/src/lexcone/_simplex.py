"""Exact simplex kernel over integer data.

Solves   min c.x  subject to  A x = b,  x >= 0   for integer A, b, c.

The tableau is kept integral via Edmonds-style pivoting: entries carry a
shared positive denominator D (the previous pivot element), and the update

    T'[i][j] = (T[r][c] * T[i][j] - T[i][c] * T[r][j]) // D

is an exact integer division.  Infeasibility is handled by a single-phase
big-M scheme with a symbolic M: two objective rows (M part and cost part)
compared lexicographically.  Bland's rule (lowest index) is used for both
entering and leaving choices, so the pivot sequence is deterministic and
the numba and Python paths are bit-identical.

The numba path works in int64 and bails out (status BAIL) when any entry
grows past _BAIL_LIMIT; callers then rerun the Python path, which uses
arbitrary-precision integers.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from ._backend import HAS_NUMBA, use_numba

OPTIMAL = 0
INFEASIBLE = 1
UNBOUNDED = 2
BAIL = -9

# products of two entries below this bound cannot overflow int64, with
# headroom for the subtraction
_BAIL_LIMIT = 1 << 30


def solve_standard(rows, b, c, want_farkas=True):
    """Solve min c.x, A x = b, x >= 0 with integer data.

    ``rows`` is the m x n constraint matrix as a list of row lists.
    Returns (status, x, farkas) where x is a list of n Fractions (OPTIMAL
    only) and farkas is a list of m Fractions with farkas.A <= 0 and
    farkas.b > 0 (INFEASIBLE only, when requested).
    """
    m = len(rows)
    n = len(c)
    if m == 0:
        return (OPTIMAL, _phase2_free(c, n), None)
    if use_numba() and _fits_int64(rows, b, c):
        res = _solve_numba(rows, b, c)
        if res[0] != BAIL:
            return _unpack(res, m, n, want_farkas)
    return _solve_python(rows, b, c, want_farkas)


def _phase2_free(c, n):
    # no constraints: x = 0 is optimal unless some cost is negative, in
    # which case the LP is unbounded; callers never build that case
    if any(cj < 0 for cj in c):
        raise ValueError("unbounded: negative cost with no constraints")
    return [Fraction(0)] * n


def _fits_int64(rows, b, c):
    bound = _BAIL_LIMIT
    if any(abs(v) >= bound for v in b) or any(abs(v) >= bound for v in c):
        return False
    return all(abs(v) < bound for row in rows for v in row)


# ---------------------------------------------------------------------------
# pure Python path (arbitrary precision)
# ---------------------------------------------------------------------------


def _solve_python(rows, b, c, want_farkas):
    m, n = len(rows), len(c)
    flip = [1 if b[i] >= 0 else -1 for i in range(m)]
    # tableau columns: n real, m artificial, 1 rhs
    width = n + m + 1
    T = []
    for i in range(m):
        row = [flip[i] * v for v in rows[i]] + [0] * m + [flip[i] * b[i]]
        row[n + i] = 1
        T.append(row)
    basis = [n + i for i in range(m)]
    # reduced-cost rows priced out against the artificial basis
    objM = [-sum(T[i][j] for i in range(m)) for j in range(width)]
    objC = list(c) + [0] * m + [0]
    for j in range(n, n + m):
        objM[j] = 0
    D = 1

    while True:
        enter = -1
        for j in range(n):  # artificials never re-enter
            if objM[j] < 0 or (objM[j] == 0 and objC[j] < 0):
                enter = j
                break
        if enter < 0:
            break
        leave = -1
        for i in range(m):
            piv = T[i][enter]
            if piv <= 0:
                continue
            if leave < 0:
                leave = i
                continue
            lhs = T[i][width - 1] * T[leave][enter]
            rhs = T[leave][width - 1] * piv
            if lhs < rhs or (lhs == rhs and basis[i] < basis[leave]):
                leave = i
        if leave < 0:
            return (UNBOUNDED, None, None)
        p = T[leave][enter]
        prow = T[leave]
        for row in (*T, objM, objC):
            if row is prow:
                continue
            f = row[enter]
            if f == 0 and p == D:
                continue
            for j in range(width):
                row[j] = (p * row[j] - f * prow[j]) // D
        basis[leave] = enter
        D = p

    if objM[width - 1] < 0:  # objective value -objM[rhs]/D > 0: infeasible
        farkas = None
        if want_farkas:
            art_basic = [i for i in range(m) if basis[i] >= n]
            farkas = [
                Fraction(flip[k] * sum(T[i][n + k] for i in art_basic), D)
                for k in range(m)
            ]
        return (INFEASIBLE, None, farkas)

    x = [Fraction(0)] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = Fraction(T[i][width - 1], D)
    return (OPTIMAL, x, None)


# ---------------------------------------------------------------------------
# numba path (int64 with overflow bail-out)
# ---------------------------------------------------------------------------

if HAS_NUMBA:
    from numba import njit

    @njit(cache=True)
    def _bigm_int64(T, objM, objC, basis, m, n, width, nreal):  # pragma: no cover
        D = np.int64(1)
        limit = np.int64(_BAIL_LIMIT)
        while True:
            enter = -1
            for j in range(nreal):
                if objM[j] < 0 or (objM[j] == 0 and objC[j] < 0):
                    enter = j
                    break
            if enter < 0:
                break
            leave = -1
            for i in range(m):
                piv = T[i, enter]
                if piv <= 0:
                    continue
                if leave < 0:
                    leave = i
                    continue
                lhs = T[i, width - 1] * T[leave, enter]
                rhs = T[leave, width - 1] * piv
                if lhs < rhs or (lhs == rhs and basis[i] < basis[leave]):
                    leave = i
            if leave < 0:
                return UNBOUNDED, D
            p = T[leave, enter]
            for i in range(m):
                if i == leave:
                    continue
                f = T[i, enter]
                if f != 0 or p != D:
                    for j in range(width):
                        T[i, j] = (p * T[i, j] - f * T[leave, j]) // D
            fM = objM[enter]
            fC = objC[enter]
            for j in range(width):
                objM[j] = (p * objM[j] - fM * T[leave, j]) // D
                objC[j] = (p * objC[j] - fC * T[leave, j]) // D
            basis[leave] = enter
            D = p
            big = np.int64(0)
            for i in range(m):
                for j in range(width):
                    v = T[i, j]
                    if v < 0:
                        v = -v
                    if v > big:
                        big = v
            for j in range(width):
                for row in (objM, objC):
                    v = row[j]
                    if v < 0:
                        v = -v
                    if v > big:
                        big = v
            if big >= limit or (D if D > 0 else -D) >= limit:
                return BAIL, D
        return OPTIMAL, D

    def _solve_numba(rows, b, c):
        m, n = len(rows), len(c)
        width = n + m + 1
        T = np.zeros((m, width), dtype=np.int64)
        flip = np.ones(m, dtype=np.int64)
        for i in range(m):
            s = 1 if b[i] >= 0 else -1
            flip[i] = s
            T[i, :n] = np.array(rows[i], dtype=np.int64) * s
            T[i, n + i] = 1
            T[i, width - 1] = s * b[i]
        objM = np.zeros(width, dtype=np.int64)
        objM[:n] = -T[:, :n].sum(axis=0)
        objM[width - 1] = -T[:, width - 1].sum()
        objC = np.zeros(width, dtype=np.int64)
        objC[:n] = np.array(c, dtype=np.int64)
        basis = np.arange(n, n + m, dtype=np.int64)
        status, D = _bigm_int64(T, objM, objC, basis, m, n, width, n)
        return (status, T, objM, basis, int(D), flip)

else:  # pragma: no cover - stripped installs only

    def _solve_numba(rows, b, c):
        return (BAIL, None, None, None, None, None)


def _unpack(res, m, n, want_farkas):
    status, T, objM, basis, D, flip = res
    if status == UNBOUNDED:
        return (UNBOUNDED, None, None)
    width = n + m + 1
    if objM[width - 1] < 0:
        farkas = None
        if want_farkas:
            art_rows = [i for i in range(m) if basis[i] >= n]
            farkas = [
                Fraction(int(flip[k]) * sum(int(T[i, n + k]) for i in art_rows), D)
                for k in range(m)
            ]
        return (INFEASIBLE, None, farkas)
    x = [Fraction(0)] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = Fraction(int(T[i, width - 1]), D)
    return (OPTIMAL, x, None)
