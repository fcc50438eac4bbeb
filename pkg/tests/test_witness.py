import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from polyclone.relations import BudgetExceededError
from polyclone.witness import (
    DEFAULT_SEED,
    TOP,
    CountVector,
    as_table,
    compositions,
    composition_count,
    is_conservative_exhaustive,
    is_conservative_sampled,
    is_nu_symmetric,
    less_count,
    random_composition,
    value_by_max_rule,
    witness_a,
    witness_b,
)


def cv(*counts):
    return CountVector(counts)


def test_count_vector_basics():
    x = cv(2, 1, 2)
    assert x.total == 5
    assert x.support() == (0, 1, 2)
    with pytest.raises(ValueError):
        CountVector([])
    with pytest.raises(ValueError):
        CountVector([1, -1])


def test_less_count():
    # domain a < 0 < 1; "strictly below 1" counts the a's and 0's
    x = cv(2, 1, 2)
    assert less_count(x, 2) == 3
    assert less_count(x, 0) == 0
    assert less_count(x, TOP) == 5


def test_witness_a_all_equal_and_one_deviation():
    op = witness_a(1, 2)
    assert op.arity == 5
    d = op.domain.size
    for r in range(d):
        counts = [0] * d
        counts[r] = op.arity
        assert op.value_counts(counts) == r
    for s in range(d):
        for t in range(d):
            if s == t:
                continue
            counts = [0] * d
            counts[s] = op.arity - 1
            counts[t] = 1
            assert op.value_counts(counts) == s


def test_witness_a_falls_through_to_bottom():
    # counts (a:2, 0:1, 1:2): neither threshold fires, so the bottom wins
    op = witness_a(1, 2)
    assert op.value(cv(2, 1, 2)) == 0


def test_witness_a_matches_max_rule():
    op = witness_a(1, 2)
    for total in range(1, 8):
        top = None if total == op.arity else total
        for counts in compositions(total, 3):
            x = CountVector(counts)
            assert op.value(x, top) == value_by_max_rule(op, x, top), counts
    op = witness_a(2, 2)
    for counts in compositions(op.arity, 4):
        x = CountVector(counts)
        assert op.value(x) == value_by_max_rule(op, x)


def test_witness_b_trivial_and_tie():
    op = witness_b(0)
    assert op.arity == 3
    assert op.value(cv(3, 0, 0)) == 0
    assert op.value(cv(0, 3, 0)) == 1
    # no threshold fires and the two bottom counts tie: the first bottom
    # element wins
    assert op.value(cv(1, 1, 1)) == 0
    assert op.value(cv(1, 2, 0)) == 1


def test_witness_b_one_deviation():
    op = witness_b(1)
    d = op.domain.size
    for s in range(d):
        for t in range(d):
            if s == t:
                continue
            counts = [0] * d
            counts[s] = op.arity - 1
            counts[t] = 1
            assert op.value_counts(counts) == s


def test_is_nu():
    assert is_nu_symmetric(witness_a(1, 2))
    assert is_nu_symmetric(witness_a(0, 3))
    assert is_nu_symmetric(witness_b(0))
    assert is_nu_symmetric(witness_b(1))


def test_constant_op_is_not_nu():
    class Const:
        arity = 5
        domain = witness_a(1, 2).domain

        def value_counts(self, counts, top_threshold=None):
            return 0

    assert not is_nu_symmetric(Const())


def test_nu_needs_arity_three():
    class Tiny:
        arity = 2
        domain = witness_a(1, 2).domain

        def value_counts(self, counts, top_threshold=None):
            return 0

    with pytest.raises(ValueError):
        is_nu_symmetric(Tiny())


def test_conservative_exhaustive_small_totals():
    assert is_conservative_exhaustive(witness_a(1, 2), 5)
    assert is_conservative_exhaustive(witness_a(0, 3), 6)
    assert is_conservative_exhaustive(witness_b(1), 5)


def test_conservative_sampled():
    assert is_conservative_sampled(witness_b(1), 10**4, seed=DEFAULT_SEED)
    assert is_conservative_sampled(witness_a(2, 2), 10**3, seed=DEFAULT_SEED)


def test_conservative_budget():
    with pytest.raises(BudgetExceededError):
        is_conservative_exhaustive(witness_a(1, 2), 50, budget=100)


def test_as_table_matches_direct_evaluation():
    for n, m in [(0, 2), (0, 3), (0, 4), (1, 2)]:
        op = witness_a(n, m)
        table = as_table(op)
        d = op.domain.size
        import itertools

        for args in itertools.product(range(d), repeat=op.arity):
            assert table.apply(args) == op.value(CountVector.from_args(d, args))


def test_as_table_budget():
    with pytest.raises(BudgetExceededError):
        as_table(witness_a(1, 3), budget=1000)  # 3**10 entries


def test_compositions_enumeration():
    for total, parts in [(4, 3), (5, 2), (0, 4), (3, 1)]:
        seen = list(compositions(total, parts))
        assert len(seen) == composition_count(total, parts)
        assert len(set(seen)) == len(seen)
        assert all(sum(c) == total and len(c) == parts for c in seen)
    # descending first coordinate
    assert list(compositions(2, 2)) == [(2, 0), (1, 1), (0, 2)]


def test_random_composition_shape():
    rng = random.Random(1)
    for total, parts in [(17, 11), (5, 3), (2 ** (2 ** 4) + 1, 7), (0, 3)]:
        c = random_composition(rng, total, parts)
        assert len(c) == parts and sum(c) == total and min(c) >= 0


def test_random_composition_deterministic():
    a = [random_composition(random.Random(42), 17, 5) for _ in range(5)]
    b = [random_composition(random.Random(42), 17, 5) for _ in range(5)]
    assert a == b


def test_random_composition_covers_space():
    rng = random.Random(9)
    seen = {random_composition(rng, 3, 2) for _ in range(200)}
    assert seen == {(0, 3), (1, 2), (2, 1), (3, 0)}


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 30), st.integers(1, 6), st.integers(0, 10**6))
def test_random_composition_always_valid(total, parts, seed):
    c = random_composition(random.Random(seed), total, parts)
    assert sum(c) == total and len(c) == parts and min(c) >= 0


def test_foreign_total_top_rescaling():
    # at the declared arity the literal constant and the rescaled threshold
    # agree; at other totals the rescaled form stays conservative
    op = witness_a(1, 2)
    for counts in compositions(op.arity, 3):
        assert op.value_counts(counts) == op.value_counts(counts, op.arity)
    assert op.value_counts((0, 0, 3), 3) == 2
    # the literal constant would send an input without the top element to it
    assert op.value_counts((0, 1, 0)) == 2
    assert op.value_counts((0, 1, 0), 1) == 1


def test_count_vector_json():
    from polyclone.structures import domain_a
    from polyclone.witness import count_vector_from_json, count_vector_to_json

    dom = domain_a(1)
    x = cv(2, 0, 3)
    obj = count_vector_to_json(x, dom)
    assert obj == {"counts": {"a": "2", "1": "3"}}
    assert count_vector_from_json(obj, dom) == x


def test_composition_count():
    assert composition_count(4, 10) == math.comb(13, 9)


def test_symmetric_op_validation():
    with pytest.raises(ValueError):
        from polyclone.witness import SymmetricOp

        SymmetricOp("C", 1, 2)
    with pytest.raises(ValueError):
        witness_a(-1, 2)
    with pytest.raises(ValueError):
        witness_a(1, 1)
    with pytest.raises(ValueError):
        value_by_max_rule(witness_b(1), cv(1, 1, 1, 2))
    with pytest.raises(ValueError):
        witness_a(1, 2).value(cv(1, 1))
