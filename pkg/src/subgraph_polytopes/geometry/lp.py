"""Exact two-phase simplex with Bland's rule.

Arithmetic runs on ``gmpy2.mpq``; results are handed back as ``Fraction``.
Problem sizes are tiny (a handful of rows), so a dense tableau is fine.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from gmpy2 import mpq

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_SENSES = {"<=", ">=", "=="}


def _q(x) -> mpq:
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


def _f(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


class _Tableau:
    """Standard form ``A x = b, x >= 0, b >= 0`` with one artificial per row."""

    def __init__(self, a: list[list[mpq]], b: list[mpq]):
        self.m = len(a)
        self.nreal = len(a[0]) if a else 0
        self.rows = []
        for i, (row, rhs) in enumerate(zip(a, b)):
            art = [mpq(0)] * self.m
            art[i] = mpq(1)
            self.rows.append(list(row) + art + [rhs])
        self.ncols = self.nreal + self.m
        self.basis = [self.nreal + i for i in range(self.m)]

    def _pivot(self, r: int, c: int):
        rows = self.rows
        prow = rows[r]
        p = prow[c]
        if p != 1:
            inv = 1 / p
            prow = rows[r] = [x * inv for x in prow]
        for i, row in enumerate(rows):
            if i != r:
                f = row[c]
                if f:
                    rows[i] = [x - f * y for x, y in zip(row, prow)]
        self.basis[r] = c

    def _reduced_costs(self, cost: list[mpq], allowed: int) -> list[mpq]:
        # z_j - c_j for a minimisation objective, computed from the basis
        cb = [cost[j] for j in self.basis]
        red = []
        for j in range(allowed):
            z = mpq(0)
            for i, row in enumerate(self.rows):
                if cb[i] and row[j]:
                    z += cb[i] * row[j]
            red.append(cost[j] - z)
        return red

    def run(self, cost: list[mpq], allowed: int) -> str:
        """Minimise ``cost . x`` over columns ``< allowed`` (plus the basis)."""
        while True:
            red = self._reduced_costs(cost, allowed)
            entering = next((j for j in range(allowed) if red[j] < 0 and j not in self.basis), None)
            if entering is None:
                return OPTIMAL
            best = None
            for i, row in enumerate(self.rows):
                a = row[entering]
                if a > 0:
                    ratio = row[-1] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return UNBOUNDED
            self._pivot(best[1], entering)

    def values(self) -> list[mpq]:
        x = [mpq(0)] * self.ncols
        for i, j in enumerate(self.basis):
            x[j] = self.rows[i][-1]
        return x

    def duals(self, cost: list[mpq]) -> list[mpq]:
        """Simplex multipliers y with y_i = c_B B^-1, read off the artificial columns."""
        cb = [cost[j] for j in self.basis]
        y = []
        for k in range(self.m):
            col = self.nreal + k
            y.append(sum((cb[i] * self.rows[i][col] for i in range(self.m)), mpq(0)))
        return y

    def drive_out_artificials(self):
        for r, j in enumerate(self.basis):
            if j >= self.nreal:
                row = self.rows[r]
                c = next((c for c in range(self.nreal) if row[c] != 0), None)
                if c is not None:
                    self._pivot(r, c)


def _phase_one(a: list[list[mpq]], b: list[mpq]):
    """Returns (tableau, feasible, farkas_y).

    When infeasible, ``y`` satisfies ``y.A_j <= 0`` for every column and
    ``y.b > 0`` (in the sign-normalised system).
    """
    t = _Tableau(a, b)
    cost = [mpq(0)] * t.nreal + [mpq(1)] * t.m
    t.run(cost, t.ncols)
    x = t.values()
    infeas = sum(x[t.nreal:], mpq(0))
    if infeas > 0:
        # optimal reduced costs 0 - y.A_j >= 0 and y.b = infeasibility > 0
        return t, False, t.duals(cost)
    t.drive_out_artificials()
    return t, True, None


@dataclass
class LPResult:
    status: str
    value: Fraction | None = None
    point: tuple[Fraction, ...] | None = None

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def lp_optimize(objective: Sequence, constraints: Sequence[tuple], maximize: bool = True) -> LPResult:
    """Optimise ``objective . x`` over free ``x`` subject to
    ``(normal, offset, sense)`` rows with sense in ``<=``, ``>=``, ``==``.
    """
    d = len(objective)
    rows = []
    for normal, offset, sense in constraints:
        if len(normal) != d:
            raise ValueError(f"constraint has dimension {len(normal)}, objective has {d}")
        if sense not in _SENSES:
            raise ValueError(f"unknown constraint sense {sense!r}")
        rows.append(([_q(v) for v in normal], _q(offset), sense))
    nslack = sum(1 for _, _, s in rows if s != "==")
    a, b = [], []
    k = 0
    for normal, offset, sense in rows:
        row = normal + [-v for v in normal] + [mpq(0)] * nslack
        if sense == "<=":
            row[2 * d + k] = mpq(1)
            k += 1
        elif sense == ">=":
            row[2 * d + k] = mpq(-1)
            k += 1
        if offset < 0:
            row = [-v for v in row]
            offset = -offset
        a.append(row)
        b.append(offset)
    if not a:
        if all(_q(c) == 0 for c in objective):
            return LPResult(OPTIMAL, Fraction(0), tuple(Fraction(0) for _ in range(d)))
        return LPResult(UNBOUNDED)
    t, feasible, _ = _phase_one(a, b)
    if not feasible:
        return LPResult(INFEASIBLE)
    sign = -1 if maximize else 1
    cost = [sign * _q(c) for c in objective] + [-sign * _q(c) for c in objective]
    cost += [mpq(0)] * nslack + [mpq(0)] * t.m
    # artificials stay at zero: exclude them from entering
    status = t.run(cost, t.nreal)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)
    x = t.values()
    point = tuple(_f(x[i] - x[d + i]) for i in range(d))
    value = sum((Fraction(c) * p for c, p in zip(objective, point)), Fraction(0))
    return LPResult(OPTIMAL, value, point)


def convex_combination(p: Sequence, points: Sequence[Sequence]):
    """Find lambda >= 0, sum lambda = 1, sum lambda_i points_i = p.

    Returns ``(True, lambdas)`` or ``(False, (normal, offset))`` where
    ``normal . p > offset >= normal . w`` for every ``w`` in ``points``.
    """
    d = len(p)
    if not points:
        raise ValueError("empty point set")
    if any(len(w) != d for w in points):
        raise ValueError("dimension mismatch")
    pq = [_q(x) for x in p]
    cols = [[_q(x) for x in w] for w in points]
    a, b, flips = [], [], []
    for i in range(d + 1):
        row = [c[i] for c in cols] if i < d else [mpq(1)] * len(cols)
        rhs = pq[i] if i < d else mpq(1)
        flip = rhs < 0
        if flip:
            row = [-v for v in row]
            rhs = -rhs
        a.append(row)
        b.append(rhs)
        flips.append(flip)
    t, feasible, y = _phase_one(a, b)
    if feasible:
        x = t.values()
        return True, tuple(_f(v) for v in x[: len(cols)])
    # undo row flips: y.(A_j) <= 0 and y.b > 0 in the original signs
    y = [-v if f else v for v, f in zip(y, flips)]
    normal = tuple(_f(v) for v in y[:d])
    offset = -_f(y[d])
    return False, (normal, offset)
