"""Sparse vectors and incremental exact row reduction.

A vector is a plain ``dict`` mapping hashable coordinate keys to non-zero
``Fraction`` values.  Functions here never mutate their inputs unless the
name says so (``*_into``).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Dict, Hashable, Iterable, List, Optional

Vector = Dict[Hashable, Fraction]


class WorkLimitExceeded(RuntimeError):
    """Raised when an exact computation outgrows its configured budget."""


def add_into(acc: Vector, v: Vector, c=1) -> Vector:
    """acc += c*v, dropping cancelled coordinates."""
    if not c:
        return acc
    for k, x in v.items():
        y = acc.get(k, 0) + c * x
        if y:
            acc[k] = y
        else:
            acc.pop(k, None)
    return acc


def add_term_into(acc: Vector, k: Hashable, c) -> None:
    if not c:
        return
    y = acc.get(k, 0) + c
    if y:
        acc[k] = y
    else:
        acc.pop(k, None)


def vec_add(*vs: Vector) -> Vector:
    out: Vector = {}
    for v in vs:
        add_into(out, v)
    return out


def vec_sub(a: Vector, b: Vector) -> Vector:
    return add_into(dict(a), b, -1)


def vec_scale(v: Vector, c) -> Vector:
    if not c:
        return {}
    return {k: x * c for k, x in v.items()}


def vec_equal(a: Vector, b: Vector) -> bool:
    return a == b


class EchelonBasis:
    """Incrementally maintained echelon basis of a subspace.

    Each stored row is keyed by its pivot, the largest coordinate under
    ``order``.  Rows are normalized to a unit pivot.  Reduction of an
    incoming vector repeatedly cancels its current largest coordinate
    against the stored row with that pivot; what remains is either zero
    (the vector was in the span) or a new row with a fresh pivot.
    """

    def __init__(self, order: Callable[[Hashable], object], work_limit: Optional[int] = None):
        self.order = order
        self.rows: Dict[Hashable, Vector] = {}
        self.work_limit = work_limit
        self.stored = 0

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, v: Vector) -> Vector:
        """Return the remainder of ``v`` modulo the current span."""
        r = dict(v)
        done: Vector = {}
        order = self.order
        while r:
            lead = max(r, key=order)
            c = r[lead]
            row = self.rows.get(lead)
            if row is None:
                done[lead] = c
                del r[lead]
            else:
                add_into(r, row, -c)
        return done

    def contains(self, v: Vector) -> bool:
        return not self.reduce(v)

    def add(self, v: Vector) -> Optional[Vector]:
        """Insert ``v``; return the new (normalized) row or ``None`` if dependent."""
        r = self.reduce(v)
        if not r:
            return None
        lead = max(r, key=self.order)
        inv = 1 / Fraction(r[lead])
        row = {k: x * inv for k, x in r.items()}
        self.rows[lead] = row
        self.stored += len(row)
        if self.work_limit is not None and self.stored > self.work_limit:
            raise WorkLimitExceeded(
                f"stored {self.stored} coordinates, limit {self.work_limit}"
            )
        return row

    def extend(self, vs: Iterable[Vector]) -> List[Vector]:
        new = []
        for v in vs:
            row = self.add(v)
            if row is not None:
                new.append(row)
        return new

    def pivots(self) -> List[Hashable]:
        return sorted(self.rows, key=self.order)


def rank(vectors: Iterable[Vector], order: Callable[[Hashable], object]) -> int:
    eb = EchelonBasis(order)
    eb.extend(vectors)
    return eb.rank
