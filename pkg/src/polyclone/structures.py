"""Generators for the two bundled families of extremal structures.

Family A(n, m) lives on the (n+2)-element universe {a, 0, 1, ..., n} with
the order a < 0 < ... < n.  It carries one (m+1)-ary relation per level i:

    S_i = ({a,0,..,i-1} x {a,i}^m) \\ {(a,i,..,i)}  u  {(i+1,..,i+1),..,(n,..,n)}

together with every nonempty unary relation.  R_i denotes the projection of
S_i to its first two coordinates.

Family B(n) lives on the (n+3)-element universe {a1, a2, 0, ..., n} with
a1 < a2 < 0 < ... < n and carries two binary relations per level:

    R_i^j = ({a1,a2,0,..,i-1} x {a1,a2,i}) \\ {(a_j,i)}  u  {(i+1,i+1),..,(n,n)}

plus every nonempty unary relation.  The composition ladders built from the
level relations define the congruence that merges everything below a level
into one block; `chain_matches_congruence_*` verify those identities.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .relations import (
    Domain,
    Relation,
    Structure,
    blocks,
    compose,
    converse,
    equivalence_from_blocks,
    project,
)


@dataclass(frozen=True)
class SpecA:
    """Parameters of family A: universe size n+2, relation arity m+1."""

    n: int
    m: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be nonnegative")
        if self.m < 2:
            raise ValueError("m must be at least 2")

    @property
    def domain_size(self) -> int:
        return self.n + 2


@dataclass(frozen=True)
class SpecB:
    """Parameters of family B: universe size n+3, binary relations."""

    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be nonnegative")

    @property
    def domain_size(self) -> int:
        return self.n + 3


def domain_a(n: int) -> Domain:
    return Domain(["a"] + [str(t) for t in range(n + 1)])


def domain_b(n: int) -> Domain:
    return Domain(["a1", "a2"] + [str(t) for t in range(n + 1)])


# Element ids: family A has a -> 0 and level t -> t+1; family B has a1 -> 0,
# a2 -> 1 and level t -> t+2.

def level_a(t: int) -> int:
    return t + 1


def level_b(t: int) -> int:
    return t + 2


@lru_cache(maxsize=None)
def gen_s(spec: SpecA, i: int) -> Relation:
    """The (m+1)-ary level relation S_i of family A."""
    if not 0 <= i <= spec.n:
        raise ValueError(f"level {i} out of range 0..{spec.n}")
    first = [0] + [level_a(t) for t in range(i)]
    pair = (0, level_a(i))
    tuples = {(x,) + rest for x in first for rest in itertools.product(pair, repeat=spec.m)}
    tuples.discard((0,) + (level_a(i),) * spec.m)
    for u in range(i + 1, spec.n + 1):
        tuples.add((level_a(u),) * (spec.m + 1))
    return Relation(spec.m + 1, spec.domain_size, tuples)


@lru_cache(maxsize=None)
def gen_r(spec: SpecA, i: int) -> Relation:
    """The binary level relation R_i, also the 2-coordinate projection of S_i."""
    if not 0 <= i <= spec.n:
        raise ValueError(f"level {i} out of range 0..{spec.n}")
    first = [0] + [level_a(t) for t in range(i)]
    tuples = {(x, y) for x in first for y in (0, level_a(i))}
    for u in range(i + 1, spec.n + 1):
        tuples.add((level_a(u), level_a(u)))
    return Relation(2, spec.domain_size, tuples)


def congruence_a(spec: SpecA, i: int) -> Relation:
    """Equivalence merging {a,0,..,i-1} into one block, singletons above."""
    if not 1 <= i <= spec.n:
        raise ValueError(f"congruence level {i} out of range 1..{spec.n}")
    parts = [tuple(range(i + 1))]
    parts.extend((level_a(t),) for t in range(i, spec.n + 1))
    return equivalence_from_blocks(spec.domain_size, parts)


def chain_congruence_a(spec: SpecA, i: int) -> Relation:
    """Compose the converse/forward ladder of R_0..R_{i-1}, left to right."""
    if not 1 <= i <= spec.n:
        raise ValueError(f"congruence level {i} out of range 1..{spec.n}")
    rels = [gen_r(spec, t) for t in range(i)]
    layers = [converse(r) for r in rels] + list(reversed(rels))
    out = layers[0]
    for layer in layers[1:]:
        out = compose(out, layer)
    return out


def chain_matches_congruence_a(spec: SpecA, i: int) -> bool:
    return chain_congruence_a(spec, i) == congruence_a(spec, i)


def _unary_relations(domain_size: int):
    """All nonempty unary relations, named by their characteristic bitmask."""
    out = []
    for mask in range(1, 1 << domain_size):
        elems = [(e,) for e in range(domain_size) if (mask >> e) & 1]
        out.append((f"U{mask}", Relation(1, domain_size, elems)))
    return out


def structure_a(spec: SpecA) -> Structure:
    rels = [(f"S{i}", gen_s(spec, i)) for i in range(spec.n + 1)]
    rels.extend(_unary_relations(spec.domain_size))
    return Structure(domain_a(spec.n), rels)


@lru_cache(maxsize=None)
def gen_r_b(spec: SpecB, i: int, j: int) -> Relation:
    """The binary level relation R_i^j of family B.

    Level 0 is the relation separating a1 from a2 against the element 0;
    it belongs to the structure like every other level (dropping it admits
    spurious low-arity near-unanimity operations, e.g. a 4-ary one on B(1)).
    """
    if j not in (1, 2):
        raise ValueError("j must be 1 or 2")
    if not 0 <= i <= spec.n:
        raise ValueError(f"level {i} out of range 0..{spec.n}")
    first = [0, 1] + [level_b(t) for t in range(i)]
    second = (0, 1, level_b(i))
    tuples = {(x, y) for x in first for y in second}
    tuples.discard((j - 1, level_b(i)))
    for u in range(i + 1, spec.n + 1):
        tuples.add((level_b(u), level_b(u)))
    return Relation(2, spec.domain_size, tuples)


def congruence_b(spec: SpecB, i: int) -> Relation:
    """Equivalence merging {a1,a2,0,..,i-1} into one block, singletons above."""
    if not 1 <= i <= spec.n:
        raise ValueError(f"congruence level {i} out of range 1..{spec.n}")
    parts = [tuple(range(i + 2))]
    parts.extend((level_b(t),) for t in range(i, spec.n + 1))
    return equivalence_from_blocks(spec.domain_size, parts)


def chain_congruence_b(spec: SpecB, i: int, j_pattern=None) -> Relation:
    """Converse/forward ladder of R_0^j..R_{i-1}^j for family B.

    `j_pattern` picks the upper index of each of the 2i layers (converse
    layers for levels 0..i-1, then forward layers for levels i-1..0); the
    default uses j=1 everywhere.
    """
    if not 1 <= i <= spec.n:
        raise ValueError(f"congruence level {i} out of range 1..{spec.n}")
    if j_pattern is None:
        j_pattern = (1,) * (2 * i)
    j_pattern = tuple(j_pattern)
    if len(j_pattern) != 2 * i:
        raise ValueError(f"j pattern must have length {2 * i}")
    layers = [converse(gen_r_b(spec, t, j_pattern[t])) for t in range(i)]
    layers.extend(gen_r_b(spec, t, j_pattern[2 * i - 1 - t]) for t in reversed(range(i)))
    out = layers[0]
    for layer in layers[1:]:
        out = compose(out, layer)
    return out


def chain_matches_congruence_b(spec: SpecB, i: int, j_pattern=None) -> bool:
    return chain_congruence_b(spec, i, j_pattern) == congruence_b(spec, i)


def structure_b(spec: SpecB) -> Structure:
    rels = []
    for i in range(spec.n + 1):
        rels.append((f"R{i}^1", gen_r_b(spec, i, 1)))
        rels.append((f"R{i}^2", gen_r_b(spec, i, 2)))
    rels.extend(_unary_relations(spec.domain_size))
    return Structure(domain_b(spec.n), rels)


# ---------------------------------------------------------------------------
# Arity bound formulas
# ---------------------------------------------------------------------------

def upper_bound(universe: int, max_arity: int) -> int:
    """Largest arity that ever needs to be searched: (2m-2)^(3^n)/2 + 1."""
    if universe < 2:
        raise ValueError("upper bound requires universe size at least 2")
    if max_arity < 2:
        raise ValueError("upper bound requires maximum arity at least 2")
    return (2 * max_arity - 2) ** (3**universe) // 2 + 1


def lower_bound(universe: int, max_arity: int) -> int:
    """Arity below which the extremal structures admit no near-unanimity
    polymorphism: (m-1)^(2^(n-2)) for m >= 3, 2^(2^(n-3)) for m = 2."""
    if max_arity >= 3:
        if universe < 2:
            raise ValueError(
                "lower bound with maximum arity >= 3 requires universe size at least 2"
            )
        return (max_arity - 1) ** (2 ** (universe - 2))
    if max_arity == 2:
        if universe < 3:
            raise ValueError(
                "lower bound with maximum arity 2 requires universe size at least 3"
            )
        return 2 ** (2 ** (universe - 3))
    raise ValueError("lower bound requires maximum arity at least 2")


def bounds(universe: int, max_arity: int) -> dict:
    return {
        "upper": upper_bound(universe, max_arity),
        "lower": lower_bound(universe, max_arity),
    }


def congruence_blocks_a(spec: SpecA, i: int):
    return blocks(congruence_a(spec, i))


def congruence_blocks_b(spec: SpecB, i: int):
    return blocks(congruence_b(spec, i))


def projection_matches_s(spec: SpecA, i: int) -> bool:
    """R_i is by definition the first-two-coordinate projection of S_i."""
    return project(gen_s(spec, i), [0, 1]) == gen_r(spec, i)
