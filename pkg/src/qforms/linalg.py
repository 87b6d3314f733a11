"""Exact linear algebra over the rationals.

Rows are cleared of denominators and reduced with fraction-free integer
elimination; each reduced row is divided by the gcd of its entries to keep
the numbers small.  Pivots are chosen as the first nonzero entry in column
order, top row first, so reductions are reproducible.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

Vector = list  # list[Fraction]


def _integer_row(row: Sequence) -> list[int]:
    den = 1
    for v in row:
        if isinstance(v, Fraction) and v.denominator != 1:
            den = lcm(den, v.denominator)
    return [int(v * den) for v in row]


def _primitive(row: list[int]) -> list[int]:
    g = 0
    for v in row:
        if v:
            g = gcd(g, v)
            if g == 1:
                return row
    if g > 1:
        return [v // g for v in row]
    return row


def echelon(rows: Sequence[Sequence], ncols: int | None = None, reduced: bool = True):
    """Row echelon form of ``rows``.

    Returns ``(pivot_rows, pivot_cols)``: integer rows whose leading entries
    sit in strictly increasing ``pivot_cols``.  With ``reduced`` every pivot
    column is zero outside its pivot row.
    """
    work = [_integer_row(r) for r in rows]
    if ncols is None:
        ncols = len(work[0]) if work else 0
    work = [r for r in work if any(r)]
    pivots: list[list[int]] = []
    cols: list[int] = []
    for c in range(ncols):
        if not work:
            break
        pick = next((k for k, r in enumerate(work) if r[c]), None)
        if pick is None:
            continue
        p = work.pop(pick)
        pc = p[c]
        nxt = []
        for r in work:
            rc = r[c]
            if rc:
                r = _primitive([pc * a - rc * b for a, b in zip(r, p)])
                if any(r):
                    nxt.append(r)
            else:
                nxt.append(r)
        work = nxt
        if reduced:
            for k, q in enumerate(pivots):
                qc = q[c]
                if qc:
                    pivots[k] = _primitive([pc * a - qc * b for a, b in zip(q, p)])
        pivots.append(_primitive(p))
        cols.append(c)
    return pivots, cols


def rank(rows: Sequence[Sequence], ncols: int | None = None) -> int:
    if not rows:
        return 0
    return len(echelon(rows, ncols, reduced=False)[0])


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[Vector]:
    """Basis of ``{v : rows·v = 0}``, one vector per free column (ascending)."""
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    piv, cols = echelon(rows, ncols, reduced=True)
    pivset = set(cols)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, c in zip(piv, cols):
            if r[f]:
                v[c] = Fraction(-r[f], r[c])
        basis.append(v)
    return basis


def mat_vec(rows: Sequence[Sequence], v: Sequence) -> Vector:
    return [sum((a * b for a, b in zip(r, v) if a and b), Fraction(0)) for r in rows]


def transpose(rows: Sequence[Sequence], ncols: int) -> list[list]:
    return [[r[c] for r in rows] for c in range(ncols)]


def independent_subset(vectors: Sequence[Sequence], start: Sequence[Sequence] = ()) -> list[int]:
    """Indices of ``vectors`` that extend the span of ``start``, chosen greedily in order."""
    if not vectors:
        return []
    n = len(vectors[0])
    span = [list(v) for v in start]
    current = rank(span, n) if span else 0
    chosen = []
    for k, v in enumerate(vectors):
        trial = span + [list(v)]
        r = rank(trial, n)
        if r > current:
            span = trial
            current = r
            chosen.append(k)
    return chosen
