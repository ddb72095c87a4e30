"""Exact linear algebra: sparse fraction-free null spaces, RREF and symbolic minors."""
from __future__ import annotations

import logging
from fractions import Fraction
from functools import reduce
from itertools import combinations
from math import gcd
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .expr import ONE, ZERO, Expr

logger = logging.getLogger(__name__)

SparseRow = Dict[int, int]


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _integer_row(row: Mapping[int, Fraction]) -> SparseRow:
    entries = {c: Fraction(v) for c, v in row.items() if v}
    if not entries:
        return {}
    scale = reduce(_lcm, (v.denominator for v in entries.values()), 1)
    return _primitive({c: int(v * scale) for c, v in entries.items()})


def _primitive(row: SparseRow) -> SparseRow:
    """Divide out the content and make the leading entry positive."""
    if not row:
        return row
    content = reduce(gcd, (abs(v) for v in row.values()))
    if row[min(row)] < 0:
        content = -content
    if content == 1:
        return row
    return {c: v // content for c, v in row.items()}


def _combine(a: int, row: SparseRow, b: int, other: SparseRow) -> SparseRow:
    """a*row - b*other, zero entries dropped."""
    out = {c: a * v for c, v in row.items()}
    for c, v in other.items():
        value = out.get(c, 0) - b * v
        if value:
            out[c] = value
        else:
            out.pop(c, None)
    return out


def reduced_echelon(rows: Sequence[Mapping[int, Fraction]]) -> Dict[int, SparseRow]:
    """Gauss-Jordan over the integers; returns primitive rows keyed by pivot column.

    Each pivot column occurs in exactly one returned row.
    """
    pivots: Dict[int, SparseRow] = {}
    for raw in rows:
        row = _integer_row(raw)
        for col in sorted(c for c in row if c in pivots):
            if col not in row:
                continue
            pivot_row = pivots[col]
            row = _primitive(_combine(pivot_row[col], row, row[col], pivot_row))
        if not row:
            continue
        col = min(row)
        for other_col, other in list(pivots.items()):
            if col in other:
                pivots[other_col] = _primitive(
                    _combine(row[col], other, other[col], row)
                )
        pivots[col] = row
    return pivots


def nullspace(rows: Sequence[Mapping[int, Fraction]], ncols: int) -> List[List[Fraction]]:
    """Basis of {v : row . v = 0 for every row}, one vector per free column."""
    pivots = reduced_echelon(rows)
    logger.debug("elimination: %d rows, %d columns, rank %d", len(rows), ncols, len(pivots))
    free = [c for c in range(ncols) if c not in pivots]
    basis: List[List[Fraction]] = []
    for f in free:
        vector = [Fraction(0)] * ncols
        vector[f] = Fraction(1)
        for col, row in pivots.items():
            if f in row:
                vector[col] = Fraction(-row[f], row[col])
        basis.append(vector)
    return basis


def rref(vectors: Sequence[Sequence[Fraction]]) -> Tuple[List[List[Fraction]], List[int]]:
    """Row reduced echelon form with unit pivots; zero rows dropped."""
    if not vectors:
        return [], []
    width = len(vectors[0])
    pivots = reduced_echelon(
        [{i: Fraction(v) for i, v in enumerate(vec) if v} for vec in vectors]
    )
    out: List[List[Fraction]] = []
    columns = sorted(pivots)
    for col in columns:
        row = pivots[col]
        lead = row[col]
        out.append([Fraction(row.get(i, 0), lead) for i in range(width)])
    return out, columns


def rank(vectors: Sequence[Sequence[Fraction]]) -> int:
    return len(rref(vectors)[0])


def solve_in_span(
    basis: Sequence[Sequence[Fraction]], target: Sequence[Fraction]
) -> Optional[List[Fraction]]:
    """Coefficients c with sum c_i basis_i = target, or None.

    The basis vectors must be linearly independent.
    """
    n = len(basis)
    width = len(target)
    # columns 0..width-1 hold coordinates, the rest tag which basis vector was used
    rows = []
    for i, vec in enumerate(basis):
        row = {j: Fraction(v) for j, v in enumerate(vec) if v}
        row[width + i] = Fraction(1)
        rows.append(row)
    pivots = reduced_echelon(rows)
    residual: Dict[int, Fraction] = {j: Fraction(v) for j, v in enumerate(target) if v}
    coeffs = [Fraction(0)] * n
    for col in sorted(pivots):
        if col >= width:
            continue
        row = pivots[col]
        factor = residual.get(col, Fraction(0)) / row[col]
        if not factor:
            continue
        for j, v in row.items():
            if j >= width:
                coeffs[j - width] += factor * v
                continue
            value = residual.get(j, Fraction(0)) - factor * v
            if value:
                residual[j] = value
            else:
                residual.pop(j, None)
    if residual:
        return None
    return coeffs


def intersect_complement(
    vectors: Sequence[Sequence[Fraction]], form: Sequence[Sequence[Fraction]]
) -> List[List[Fraction]]:
    """{x : x^T form v = 0 for all v in vectors}, as an RREF basis."""
    width = len(form)
    rows = []
    for v in vectors:
        rows.append(
            {
                i: sum((form[i][j] * v[j] for j in range(width)), Fraction(0))
                for i in range(width)
            }
        )
    basis = nullspace(rows, width)
    return rref(basis)[0] if basis else []


def matmul(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> List[List[Fraction]]:
    inner = len(b)
    cols = len(b[0]) if b else 0
    return [
        [sum((row[k] * b[k][j] for k in range(inner)), Fraction(0)) for j in range(cols)]
        for row in a
    ]


def trace(m: Sequence[Sequence[Fraction]]) -> Fraction:
    return sum((m[i][i] for i in range(len(m))), Fraction(0))


def determinant(matrix: Sequence[Sequence[Expr]]) -> Expr:
    """Determinant of a square Expr matrix by expansion over column subsets."""
    size = len(matrix)
    if size == 0:
        return ONE
    layer: Dict[int, Expr] = {0: ONE}
    for i in range(size):
        nxt: Dict[int, Expr] = {}
        for mask, value in layer.items():
            for j in range(size):
                if mask & (1 << j):
                    continue
                entry = matrix[i][j]
                if entry.is_zero:
                    continue
                above = bin(mask >> (j + 1)).count("1")
                term = value * entry
                if above % 2:
                    term = -term
                key = mask | (1 << j)
                nxt[key] = nxt.get(key, ZERO) + term
        layer = {m: v for m, v in nxt.items() if not v.is_zero}
        if not layer:
            return ZERO
    return layer.get((1 << size) - 1, ZERO)


def maximal_minors(matrix: Sequence[Sequence[Expr]]) -> List[Expr]:
    """All nonzero k x k minors of a k x n matrix, in column-subset order."""
    k = len(matrix)
    n = len(matrix[0]) if matrix else 0
    out = []
    for cols in combinations(range(n), k):
        minor = determinant([[row[c] for c in cols] for row in matrix])
        if not minor.is_zero:
            out.append(minor)
    return out
