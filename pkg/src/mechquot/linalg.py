"""Fraction-free (Bareiss) elimination over the rational-function field.

Vectors of rational functions are first scaled by the product of their
distinct denominators, which does not change spans.  Elimination then runs on
polynomial entries; every division by the previous pivot is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .symexpr import ONE, ZERO, Polynomial, RationalExpr
from .symexpr.polynomial import ONE_POLY


def _clear_denominators(vec: Sequence[RationalExpr]) -> Tuple[List[Polynomial], RationalExpr]:
    """Polynomial vector p and scale s with vec = p / s."""
    dens: List[Polynomial] = []
    for e in vec:
        if not e.den.is_constant() and not any(e.den == d for d in dens):
            dens.append(e.den)
    if not dens:
        return [e.num for e in vec], ONE
    scale = ONE_POLY
    for d in dens:
        scale = scale * d
    out = []
    for e in vec:
        if e.is_zero():
            out.append(e.num)
            continue
        q = scale.exact_div(e.den)
        out.append(e.num * q)
    return out, RationalExpr(scale)


@dataclass
class Elimination:
    rank: int
    pivots: List[Tuple[int, int]]  # (row, column) after row swaps
    matrix: List[List[Polynomial]]
    scales: List[RationalExpr]  # per input column


def eliminate(columns: Sequence[Sequence[RationalExpr]], pivot_columns: Optional[int] = None) -> Elimination:
    """Echelon form of the matrix whose columns are ``columns``.

    Pivots are only taken from the first ``pivot_columns`` columns; later
    columns (e.g. a right-hand side) are carried along.  Pivot choice: fewest
    terms first, ties broken by column then row index.
    """
    ncols = len(columns)
    if pivot_columns is None:
        pivot_columns = ncols
    if ncols == 0:
        return Elimination(0, [], [], [])
    nrows = len(columns[0])
    polys = []
    scales = []
    for col in columns:
        p, s = _clear_denominators(col)
        polys.append(p)
        scales.append(s)
    M = [[polys[c][r] for c in range(ncols)] for r in range(nrows)]
    prev = ONE_POLY
    pivots: List[Tuple[int, int]] = []
    used = set()
    r = 0
    while r < nrows:
        best = None
        for c in range(pivot_columns):
            if c in used:
                continue
            for i in range(r, nrows):
                e = M[i][c]
                if e.is_zero():
                    continue
                key = (len(e), c, i)
                if best is None or key < best:
                    best = key
        if best is None:
            break
        _, c, i = best
        if i != r:
            M[i], M[r] = M[r], M[i]
        p = M[r][c]
        for i in range(r + 1, nrows):
            a = M[i][c]
            row = M[i]
            prow = M[r]
            for j in range(ncols):
                if j == c or j in used:
                    continue
                if a.is_zero():
                    val = p * row[j]
                else:
                    val = p * row[j] - a * prow[j]
                if prev == ONE_POLY:
                    row[j] = val
                else:
                    q = val.exact_div(prev)
                    if q is None:  # pragma: no cover - Bareiss guarantees exactness
                        raise ArithmeticError("inexact Bareiss step")
                    row[j] = q
            row[c] = Polynomial()
        prev = p
        pivots.append((r, c))
        used.add(c)
        r += 1
    return Elimination(len(pivots), pivots, M, scales)


def generic_rank(vectors: Sequence[Sequence[RationalExpr]]) -> int:
    if not vectors:
        return 0
    return eliminate(vectors).rank


def solve_in_span(
    vectors: Sequence[Sequence[RationalExpr]], w: Sequence[RationalExpr]
) -> Tuple[int, bool, Optional[List[RationalExpr]]]:
    """Decide w in span(vectors) over the function field.

    Returns (rank of vectors, membership, coefficients c with w = sum c_a v_a).
    """
    m = len(vectors)
    if m == 0:
        member = all(e.is_zero() for e in w)
        return 0, member, [] if member else None
    el = eliminate(list(vectors) + [list(w)], pivot_columns=m)
    M = el.matrix
    rank = el.rank
    nrows = len(M)
    for i in range(rank, nrows):
        if not M[i][m].is_zero():
            return rank, False, None
    coeffs = [ZERO] * m
    for k in range(rank - 1, -1, -1):
        row, col = el.pivots[k]
        acc = RationalExpr(M[row][m])
        for l in range(k + 1, rank):
            _, c2 = el.pivots[l]
            e = M[row][c2]
            if not e.is_zero() and not coeffs[c2].is_zero():
                acc = acc - RationalExpr(e) * coeffs[c2]
        coeffs[col] = acc / RationalExpr(M[row][col])
    # undo the column scalings: w_scaled = sum c_a v_a_scaled
    w_scale = el.scales[m]
    out = []
    for a in range(m):
        if coeffs[a].is_zero():
            out.append(ZERO)
        else:
            out.append(coeffs[a] * el.scales[a] / w_scale)
    return rank, True, out


def numeric_rank(vectors: Sequence[Sequence[Fraction]]) -> int:
    """Exact rank of a matrix of rationals (columns given as vectors)."""
    if not vectors:
        return 0
    rows = [list(col) for col in vectors]
    rank = 0
    ncols = len(rows[0])
    for c in range(ncols):
        piv = None
        for i in range(rank, len(rows)):
            if rows[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank][c]
        for i in range(rank + 1, len(rows)):
            f = rows[i][c]
            if f:
                f = f / p
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def numeric_member(vectors: Sequence[Sequence[Fraction]], w: Sequence[Fraction]) -> bool:
    return numeric_rank(list(vectors) + [list(w)]) == numeric_rank(vectors)
