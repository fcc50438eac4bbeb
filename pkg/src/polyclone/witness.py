"""Symmetric operations evaluated on argument counts.

An operation that depends only on how often each element occurs among its
arguments is represented by its action on count vectors.  The two witness
families implemented here are threshold cascades over "how many arguments
lie strictly below level r"; all thresholds are exact integers, so the
operations evaluate at arities far beyond anything an explicit table could
hold.
"""

from __future__ import annotations

import random

from .relations import BudgetExceededError, Domain, OpTable
from .structures import domain_a, domain_b

TOP = None  # sentinel: count everything (the cut above the largest element)

DEFAULT_SEED = 1729


class CountVector:
    """Multiset over 0..d-1 with arbitrary-precision counts."""

    __slots__ = ("counts", "total")

    def __init__(self, counts):
        self.counts = tuple(int(c) for c in counts)
        if not self.counts:
            raise ValueError("empty count vector")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be nonnegative")
        self.total = sum(self.counts)

    def less(self, r) -> int:
        """Number of occurrences of elements strictly below r (TOP: all)."""
        if r is TOP:
            return self.total
        return sum(self.counts[:r])

    def count(self, e: int) -> int:
        return self.counts[e]

    def support(self):
        return tuple(e for e, c in enumerate(self.counts) if c > 0)

    @classmethod
    def from_args(cls, domain_size: int, args) -> "CountVector":
        counts = [0] * domain_size
        for x in args:
            counts[x] += 1
        return cls(counts)

    def __eq__(self, other):
        return isinstance(other, CountVector) and self.counts == other.counts

    def __hash__(self):
        return hash(self.counts)

    def __repr__(self):
        return f"CountVector({list(self.counts)})"


def less_count(x: CountVector, r) -> int:
    return x.less(r)


def count_vector_to_json(x: CountVector, domain: Domain) -> dict:
    return {
        "counts": {domain.name(e): str(c) for e, c in enumerate(x.counts) if c > 0}
    }


def count_vector_from_json(obj: dict, domain: Domain) -> CountVector:
    counts = [0] * domain.size
    for name, c in obj["counts"].items():
        counts[domain.index[name]] = int(c)
    return CountVector(counts)


class SymmetricOp:
    """Count-based operation from one of the two witness families.

    Family "A" lives on the domain {a, 0..n} and has declared arity
    m**(2**n) + 1; family "B" lives on {a1, a2, 0..n} with m = 2 and arity
    2**(2**n) + 1.  Evaluation accepts count vectors of any positive total
    (the cascade is well defined), but only totals equal to the declared
    arity carry polymorphism meaning.  The top branch compares against the
    declared arity constant; pass ``top_threshold`` to rescale it, which the
    conservativity scans use at foreign totals.
    """

    __slots__ = ("family", "n", "m", "arity", "domain", "_thr")

    def __init__(self, family: str, n: int, m: int):
        if family not in ("A", "B"):
            raise ValueError("family must be 'A' or 'B'")
        if n < 0:
            raise ValueError("n must be nonnegative")
        if family == "B":
            m = 2
        if m < 2:
            raise ValueError("m must be at least 2")
        self.family = family
        self.n = n
        self.m = m
        self.arity = m ** (2**n) + 1
        self.domain = domain_a(n) if family == "A" else domain_b(n)
        # _thr[r] = m ** (2 ** r), the growth factor guarding level r
        self._thr = tuple(m ** (2**r) for r in range(n + 1))

    @property
    def base(self) -> int:
        # ids of the bottom block: family A has one low element, B has two
        return 1 if self.family == "A" else 2

    def value(self, x: CountVector, top_threshold: int | None = None) -> int:
        if len(x.counts) != self.domain.size:
            raise ValueError("count vector does not match the operation domain")
        return self.value_counts(x.counts, top_threshold)

    def value_counts(self, counts, top_threshold: int | None = None) -> int:
        """Cascade evaluation on a raw count sequence; returns an element id."""
        n, base = self.n, self.base
        thr = self.arity if top_threshold is None else top_threshold
        # prefix[t] = number of arguments with id < t
        prefix = [0] * (len(counts) + 1)
        acc = 0
        for e, c in enumerate(counts):
            prefix[e] = acc
            acc += c
        prefix[len(counts)] = acc
        # below level r means id < base + r
        if thr > self._thr[n] * prefix[base + n]:
            return base + n
        for r in range(n - 1, -1, -1):
            if prefix[base + r + 1] > self._thr[r] * prefix[base + r]:
                return base + r
        if base == 1:
            return 0
        return 1 if counts[1] > counts[0] else 0

    def __eq__(self, other):
        return (
            isinstance(other, SymmetricOp)
            and (self.family, self.n, self.m) == (other.family, other.n, other.m)
        )

    def __hash__(self):
        return hash((self.family, self.n, self.m))

    def __repr__(self):
        return f"SymmetricOp(family={self.family!r}, n={self.n}, m={self.m}, arity={self.arity})"


def witness_a(n: int, m: int) -> SymmetricOp:
    return SymmetricOp("A", n, m)


def witness_b(n: int) -> SymmetricOp:
    return SymmetricOp("B", n, 2)


def value_by_max_rule(op: SymmetricOp, x: CountVector, top_threshold: int | None = None) -> int:
    """Family-A evaluation by collecting every firing level and taking the
    largest, rather than scanning the cascade top-down.  Kept as a separate
    code path so the two formulations can be checked against each other.
    """
    if op.family != "A":
        raise ValueError("max-rule form is defined for family A")
    if len(x.counts) != op.domain.size:
        raise ValueError("count vector does not match the operation domain")
    thr = op.arity if top_threshold is None else top_threshold
    fired = []
    for r in range(op.n + 1):
        left = thr if r == op.n else x.less(r + 2)
        if left > op._thr[r] * x.less(r + 1):
            fired.append(r)
    if fired:
        return max(fired) + 1
    return 0


def is_nu_symmetric(op: SymmetricOp) -> bool:
    """Near-unanimity on counts: all-equal inputs return that element, and a
    single deviation loses to the repeated element."""
    if op.arity < 3:
        raise ValueError("near-unanimity needs arity at least 3")
    d = op.domain.size
    l = op.arity
    for r in range(d):
        counts = [0] * d
        counts[r] = l
        if op.value_counts(counts) != r:
            return False
    for s in range(d):
        for t in range(d):
            if s == t:
                continue
            counts = [0] * d
            counts[s] = l - 1
            counts[t] = 1
            if op.value_counts(counts) != s:
                return False
    return True


def compositions(total: int, parts: int):
    """All tuples of `parts` nonnegative integers with the given sum, first
    coordinate descending (matches the multiset scan order)."""
    if parts < 1:
        raise ValueError("parts must be positive")
    if parts == 1:
        yield (total,)
        return
    for c in range(total, -1, -1):
        for rest in compositions(total - c, parts - 1):
            yield (c,) + rest


def composition_count(total: int, parts: int) -> int:
    import math

    return math.comb(total + parts - 1, parts - 1)


def sample_distinct(rng: random.Random, n: int, k: int):
    """Floyd's uniform k-subset of range(n); works for arbitrarily large n."""
    chosen = set()
    for j in range(n - k, n):
        t = rng.randrange(j + 1)
        chosen.add(t if t not in chosen else j)
    return sorted(chosen)


def random_composition(rng: random.Random, total: int, parts: int):
    """Uniformly random composition of `total` into `parts` nonnegative
    integers, via a uniform placement of bars among stars."""
    if parts == 1:
        return (total,)
    cuts = sample_distinct(rng, total + parts - 1, parts - 1)
    out = []
    prev = -1
    for c in cuts:
        out.append(c - prev - 1)
        prev = c
    out.append(total + parts - 2 - prev)
    return tuple(out)


DEFAULT_COMPOSITION_BUDGET = 10**7


def is_conservative_exhaustive(
    op: SymmetricOp, max_total: int, budget: int = DEFAULT_COMPOSITION_BUDGET
) -> bool:
    """The output element always occurs among the inputs, checked over every
    count vector with total 1..max_total.

    At totals other than the declared arity the top branch is rescaled to the
    actual total (the declared-arity constant would make the top level fire
    on inputs that never mention it).
    """
    d = op.domain.size
    work = sum(composition_count(t, d) for t in range(1, max_total + 1))
    if work > budget:
        raise BudgetExceededError(f"{work} count vectors exceed budget {budget}")
    for total in range(1, max_total + 1):
        top = None if total == op.arity else total
        for counts in compositions(total, d):
            if counts[op.value_counts(counts, top)] == 0:
                return False
    return True


def is_conservative_sampled(op: SymmetricOp, trials: int, seed: int = DEFAULT_SEED) -> bool:
    """Same containment check on random count vectors at the declared arity."""
    rng = random.Random(seed)
    d = op.domain.size
    for _ in range(trials):
        counts = random_composition(rng, op.arity, d)
        if counts[op.value_counts(counts)] == 0:
            return False
    return True


def as_table(op: SymmetricOp, budget: int = DEFAULT_COMPOSITION_BUDGET) -> OpTable:
    """Expand to an explicit table; only feasible for tiny declared arities."""
    d = op.domain.size
    if d**op.arity > budget:
        raise BudgetExceededError(
            f"{d}**{op.arity} table entries exceed budget {budget}"
        )

    def fn(args):
        counts = [0] * d
        for x in args:
            counts[x] += 1
        return op.value_counts(counts)

    return OpTable.from_function(op.arity, d, fn)
