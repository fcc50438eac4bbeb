"""Compatibility of count-based operations with relations at large arity.

A matrix whose columns are tuples of a relation is, for an operation that
only sees argument counts, fully described by how many times each tuple of
the relation occurs as a column.  Compatibility checks therefore scan column
multisets (compositions of the arity over the relation's tuples) instead of
the exponentially larger space of matrices.
"""

from __future__ import annotations

import math
import multiprocessing
import random
from dataclasses import dataclass

from .relations import BudgetExceededError, Domain, Relation
from .witness import (
    DEFAULT_SEED,
    CountVector,
    SymmetricOp,
    random_composition,
)

DEFAULT_MULTISET_BUDGET = 10**8


class ColumnMultiset:
    """Columns of a matrix over a base relation, counted up to order.

    `counts[t]` is the multiplicity of the relation's t-th canonical tuple;
    the total equals the operation arity the multiset was built for.
    """

    __slots__ = ("rel", "counts", "total")

    def __init__(self, rel: Relation, counts):
        counts = tuple(int(c) for c in counts)
        if len(counts) != len(rel):
            raise ValueError("counts must align with the relation's tuple list")
        if any(c < 0 for c in counts):
            raise ValueError("counts must be nonnegative")
        self.rel = rel
        self.counts = counts
        self.total = sum(counts)

    def __eq__(self, other):
        return (
            isinstance(other, ColumnMultiset)
            and self.rel == other.rel
            and self.counts == other.counts
        )

    def __repr__(self):
        return f"ColumnMultiset(total={self.total}, tuples={len(self.counts)})"

    def to_json(self, domain: Domain) -> dict:
        return {
            "total": str(self.total),
            "columns": [
                {"column": [domain.name(x) for x in t], "count": str(c)}
                for t, c in zip(self.rel.tuples, self.counts)
                if c > 0
            ],
        }


def row_counts(cm: ColumnMultiset) -> list[CountVector]:
    """Per-row count vectors of the represented matrix; every row total
    equals the multiset total."""
    r = cm.rel.arity
    d = cm.rel.domain_size
    rows = [[0] * d for _ in range(r)]
    for t, c in zip(cm.rel.tuples, cm.counts):
        if c:
            for p in range(r):
                rows[p][t[p]] += c
    return [CountVector(row) for row in rows]


def multiset_count(arity: int, tuples: int) -> int:
    return math.comb(arity + tuples - 1, tuples - 1)


@dataclass(frozen=True)
class Verdict:
    ok: bool
    mode: str  # "exact" | "sampled"
    checked: int
    violation: ColumnMultiset | None = None
    seed: int | None = None

    def to_json(self, domain: Domain) -> dict:
        obj = {"ok": self.ok, "mode": self.mode, "checked": self.checked}
        if self.seed is not None:
            obj["seed"] = self.seed
        if self.violation is not None:
            obj["violation"] = self.violation.to_json(domain)
        return obj


def _scan_chunk(op: SymmetricOp, rel: Relation, first_lo: int, first_hi: int):
    """Scan multisets whose first-tuple count lies in [first_lo, first_hi],
    in descending-count order.  Returns (checked, violation counts or None)."""
    tuples = rel.tuples
    T = len(tuples)
    r = rel.arity
    d = rel.domain_size
    l = op.arity
    members = rel._members
    value = op.value_counts
    rows = [[0] * d for _ in range(r)]
    counts = [0] * T
    checked = 0
    violation = None

    def add(idx, c):
        t = tuples[idx]
        for p in range(r):
            rows[p][t[p]] += c

    def rec(idx, remaining):
        nonlocal checked, violation
        if idx == T - 1:
            counts[idx] = remaining
            if remaining:
                add(idx, remaining)
            checked += 1
            image = tuple(value(rows[p]) for p in range(r))
            if image not in members:
                violation = tuple(counts)
            if remaining:
                add(idx, -remaining)
            counts[idx] = 0
            return violation is not None
        hi, lo = remaining, 0
        if idx == 0:
            hi = min(hi, first_hi)
            lo = max(lo, first_lo)
        for c in range(hi, lo - 1, -1):
            counts[idx] = c
            if c:
                add(idx, c)
            stop = rec(idx + 1, remaining - c)
            if c:
                add(idx, -c)
            counts[idx] = 0
            if stop:
                return True
        return False

    if T == 1:
        if first_lo <= l <= first_hi:
            rec(0, l)
    else:
        rec(0, l)
    return checked, violation


def check_compat_symmetric(
    op: SymmetricOp,
    rel: Relation,
    budget: int = DEFAULT_MULTISET_BUDGET,
    jobs: int = 1,
) -> Verdict:
    """Exact compatibility check by exhausting all column multisets.

    The verdict is ok iff for every multiset of `op.arity` columns from
    `rel`, applying the operation to the rows lands back in `rel`.
    """
    if op.domain.size != rel.domain_size:
        raise ValueError("operation and relation must share a domain")
    if not len(rel):
        return Verdict(True, "exact", 0)
    total = multiset_count(op.arity, len(rel))
    if total > budget:
        raise BudgetExceededError(
            f"{total} column multisets exceed budget {budget}; use sampled mode"
        )
    l = op.arity
    if jobs <= 1 or l == 0 or len(rel) == 1:
        checked, violation = _scan_chunk(op, rel, 0, l)
    else:
        jobs = min(jobs, l + 1)
        # contiguous first-count spans, scanned in the same descending order
        bounds = [l - (l + 1) * i // jobs for i in range(jobs + 1)]
        spans = [(bounds[i + 1] + 1, bounds[i]) for i in range(jobs)]
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(jobs) as pool:
            parts = pool.starmap(
                _scan_chunk, [(op, rel, lo, hi) for lo, hi in spans]
            )
        checked = 0
        violation = None
        for part_checked, part_violation in parts:
            checked += part_checked
            if part_violation is not None:
                violation = part_violation
                break
    if violation is None:
        return Verdict(True, "exact", checked)
    return Verdict(False, "exact", checked, ColumnMultiset(rel, violation))


def check_compat_sampled(
    op: SymmetricOp,
    rel: Relation,
    trials: int,
    seed: int = DEFAULT_SEED,
) -> Verdict:
    """One-sided randomized check: a found violation is definitive, an ok
    verdict is evidence only and is labeled as sampled."""
    if op.domain.size != rel.domain_size:
        raise ValueError("operation and relation must share a domain")
    if not len(rel):
        return Verdict(True, "sampled", 0, None, seed)
    rng = random.Random(seed)
    tuples = rel.tuples
    T = len(tuples)
    r = rel.arity
    d = rel.domain_size
    members = rel._members
    value = op.value_counts
    for trial in range(trials):
        counts = random_composition(rng, op.arity, T)
        rows = [[0] * d for _ in range(r)]
        for t, c in zip(tuples, counts):
            if c:
                for p in range(r):
                    rows[p][t[p]] += c
        image = tuple(value(rows[p]) for p in range(r))
        if image not in members:
            return Verdict(False, "sampled", trial + 1, ColumnMultiset(rel, counts), seed)
    return Verdict(True, "sampled", trials, None, seed)


def check_compat_binary(
    op: SymmetricOp,
    rel: Relation,
    budget: int = DEFAULT_MULTISET_BUDGET,
    trials: int = 10**5,
    seed: int = DEFAULT_SEED,
    jobs: int = 1,
) -> Verdict:
    """Two-row specialization; falls back to sampling past the budget."""
    if rel.arity != 2:
        raise ValueError("binary check needs a binary relation")
    try:
        return check_compat_symmetric(op, rel, budget=budget, jobs=jobs)
    except BudgetExceededError:
        return check_compat_sampled(op, rel, trials, seed)
