"""Machine-checkable certificates of the small-arity impossibility argument.

For family A(n, m) the argument tracks count vectors v_0 .. v_{2^n - 1} of
total m**(2**n): the near-unanimity identities force the first vector, each
transition k -> k+1 feeds columns of the level relation at the pivot (the
lowest zero bit of k) into the bookkeeping, and the last vector is supported
on the bottom element alone, which no conservative operation can produce.  A
certificate records, for the base derivation and for every transition, the
column tuples and multiplicities, the exact arithmetic identities, and the
congruence used for the case split.  Family B(n) runs the same ladder with
m = 2 on the doubled bottom block {a1, a2}; each transition applies both
level relations (one per removed pair) and carries the side condition that
the doubled block fits below the pivot.

Position permutations are absorbed by the count representation: a symmetric
bookkeeping step constrains an operation under every argument order at once,
so certificates store counts only.  `check_certificate` re-derives every
recorded fact from the parameters alone, shares no construction code with
the builders, and rejects any single-field deviation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .relations import Relation, Structure, blocks, compose, converse
from .structures import (
    SpecA,
    SpecB,
    chain_matches_congruence_a,
    chain_matches_congruence_b,
    congruence_a,
    congruence_b,
    domain_a,
    domain_b,
    gen_r_b,
    gen_s,
)
from .witness import CountVector


class CertificateError(RuntimeError):
    """A recorded fact failed to verify during certificate construction."""


# ---------------------------------------------------------------------------
# Schedules
# ---------------------------------------------------------------------------

def schedule_count(n: int, m: int, k: int, level) -> int:
    """Multiplicity of `level` ("a" or 0..n-1) in the k-th schedule vector."""
    if not 0 <= k < 2**n:
        raise ValueError(f"step {k} out of range 0..{2 ** n - 1}")
    if level == "a":
        return m ** (k + 1)
    if not 0 <= level <= n - 1:
        raise ValueError(f"level {level} out of range")
    bits = [(k >> t) & 1 for t in range(n)]
    if bits[level]:
        return 0
    prefix = sum(b << (level + 1 + t) for t, b in enumerate(bits[level + 1 :]))
    return m ** (prefix + (1 << level)) * (m ** (1 << level) - 1)


def schedule_vector(n: int, m: int, k: int) -> CountVector:
    """The k-th count vector of family A's ladder, over {a, 0..n}."""
    counts = [0] * (n + 2)
    counts[0] = schedule_count(n, m, k, "a")
    for level in range(n):
        counts[level + 1] = schedule_count(n, m, k, level)
    return CountVector(counts)


def schedule_vector_b(n: int, k: int) -> CountVector:
    """The k-th count vector of family B's ladder, over {a1, a2, 0..n};
    the m=2 bottom count splits evenly between a1 and a2."""
    if not 0 <= k < 2**n:
        raise ValueError(f"step {k} out of range 0..{2 ** n - 1}")
    counts = [0] * (n + 3)
    counts[0] = counts[1] = 2**k
    for level in range(n):
        counts[level + 2] = schedule_count(n, 2, k, level)
    return CountVector(counts)


@dataclass(frozen=True)
class ScheduleA:
    n: int
    m: int
    vectors: tuple[CountVector, ...]


@dataclass(frozen=True)
class ScheduleB:
    n: int
    vectors: tuple[CountVector, ...]


def build_schedule_a(n: int, m: int) -> ScheduleA:
    if n < 0 or m < 2:
        raise ValueError("need n >= 0 and m >= 2")
    vectors = tuple(schedule_vector(n, m, k) for k in range(2**n))
    total = m ** (2**n)
    for k, v in enumerate(vectors):
        if v.total != total:
            raise CertificateError(f"schedule vector {k} has total {v.total} != {total}")
    if vectors[-1].support() != (0,):
        raise CertificateError("final schedule vector is not supported on the bottom element")
    return ScheduleA(n, m, vectors)


def build_schedule_b(n: int) -> ScheduleB:
    if n < 0:
        raise ValueError("need n >= 0")
    vectors = tuple(schedule_vector_b(n, k) for k in range(2**n))
    total = 2 ** (2**n)
    for k, v in enumerate(vectors):
        if v.total != total:
            raise CertificateError(f"schedule vector {k} has total {v.total} != {total}")
        if v.counts[0] != v.counts[1]:
            raise CertificateError(f"schedule vector {k} splits the bottom block unevenly")
    if vectors[-1].support() != (0, 1):
        raise CertificateError("final schedule vector is not supported on the bottom block")
    return ScheduleB(n, vectors)


def least_zero_bit(k: int) -> int:
    i = 0
    while (k >> i) & 1:
        i += 1
    return i


def pivot_identities(n: int, m: int, k: int) -> dict:
    """Exact arithmetic at the pivot of the transition k -> k+1.

    Verifies that levels below the pivot are empty at step k, the pivot count
    and the below-pivot prefix sums hit their closed forms, higher levels are
    unchanged at step k+1, and the pivot empties at step k+1.
    """
    if not 0 <= k <= 2**n - 2:
        raise ValueError(
            f"step {k} has no pivot (valid transitions are 0..{2 ** n - 2})"
        )
    i = least_zero_bit(k)
    v_k = schedule_vector(n, m, k)
    v_k1 = schedule_vector(n, m, k + 1)
    power = m ** (k + 1 + 2**i)
    pivot_count = schedule_count(n, m, k, i)
    report = {
        "pivot": i,
        "pivot_count": pivot_count,
        "below_succ_premise": v_k.less(i + 2),
        "below_pivot_conclusion": v_k1.less(i + 1),
        "a": all(schedule_count(n, m, k, j) == 0 for j in range(i)),
        "b": pivot_count == m ** (k + 1) * (m ** (2**i) - 1) and v_k.less(i + 2) == power,
        "c": schedule_count(n, m, k + 1, i) == 0
        and all(
            schedule_count(n, m, k + 1, j) == schedule_count(n, m, k, j)
            for j in range(i + 1, n)
        ),
        "d": v_k1.less(i + 1) == power,
    }
    report["ok"] = report["a"] and report["b"] and report["c"] and report["d"]
    return report


# ---------------------------------------------------------------------------
# Certificate data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ColumnBlock:
    column: tuple[int, ...]
    count: int


@dataclass(frozen=True)
class Application:
    target: str
    columns: tuple[ColumnBlock, ...]


@dataclass(frozen=True)
class BaseCertificate:
    applications: tuple[Application, ...]


@dataclass(frozen=True)
class StepCertificate:
    k: int
    pivot: int
    applications: tuple[Application, ...]
    pivot_count: int
    below_succ_premise: int
    below_pivot_conclusion: int
    congruence_level: int
    congruence_blocks: tuple[tuple[int, ...], ...]
    doubled: int | None  # family B only: bottom-block size after doubling


@dataclass(frozen=True)
class TraceCertificate:
    family: str
    n: int
    m: int
    arity: int  # the arity the argument excludes
    schedule: tuple[tuple[int, ...], ...]
    base: BaseCertificate
    steps: tuple[StepCertificate, ...]
    terminal_support: tuple[int, ...]


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------

def _tally_rows(arity: int, domain_size: int, columns):
    rows = [[0] * domain_size for _ in range(arity)]
    for block in columns:
        for p in range(arity):
            rows[p][block.column[p]] += block.count
    return [tuple(r) for r in rows]


def _require_member(block: ColumnBlock, rel: Relation, target: str):
    if block.column not in rel:
        raise CertificateError(f"column {block.column} is not in {target}")
    if block.count <= 0:
        raise CertificateError(f"column {block.column} has nonpositive count")


@lru_cache(maxsize=None)
def _builder_chain_ok_a(n: int, level: int) -> bool:
    return chain_matches_congruence_a(SpecA(n, 2), level)


@lru_cache(maxsize=None)
def _builder_chain_ok_b(n: int, level: int) -> bool:
    return chain_matches_congruence_b(SpecB(n), level)


def certify_step_a(n: int, m: int, k: int) -> StepCertificate:
    """Certify the family-A transition v_k -> v_{k+1}."""
    ident = pivot_identities(n, m, k)
    if not ident["ok"]:
        raise CertificateError(f"pivot arithmetic failed at step {k}")
    i = ident["pivot"]
    spec = SpecA(n, m)
    rel = gen_s(spec, i)
    target = f"S{i}"
    lv = i + 1
    l_a = schedule_count(n, m, k, "a")
    columns = []
    for r in range(1, m + 1):
        col = [0] + [lv] * m
        col[r] = 0
        columns.append(ColumnBlock(tuple(col), l_a))
    for b in range(i):
        c = schedule_count(n, m, k + 1, b)
        if c:
            columns.append(ColumnBlock((b + 1,) + (lv,) * m, c))
    for u in range(i + 1, n):
        c = schedule_count(n, m, k, u)
        if c:
            columns.append(ColumnBlock((u + 1,) * (m + 1), c))
    for block in columns:
        _require_member(block, rel, target)
    total = sum(b.count for b in columns)
    if total != m ** (2**n):
        raise CertificateError(f"column bookkeeping sums to {total}, not m**2**n")
    rows = _tally_rows(m + 1, n + 2, columns)
    v_k = schedule_vector(n, m, k)
    v_k1 = schedule_vector(n, m, k + 1)
    if rows[0] != v_k1.counts:
        raise CertificateError(f"conclusion row of step {k} does not match the schedule")
    for r in range(1, m + 1):
        if rows[r] != v_k.counts:
            raise CertificateError(f"premise row {r} of step {k} does not match the schedule")
    if not _builder_chain_ok_a(n, i + 1):
        raise CertificateError(f"congruence ladder identity failed at level {i + 1}")
    return StepCertificate(
        k=k,
        pivot=i,
        applications=(Application(target, tuple(columns)),),
        pivot_count=ident["pivot_count"],
        below_succ_premise=ident["below_succ_premise"],
        below_pivot_conclusion=ident["below_pivot_conclusion"],
        congruence_level=i + 1,
        congruence_blocks=blocks(congruence_a(spec, i + 1)),
        doubled=None,
    )


def certify_base_a(n: int, m: int) -> BaseCertificate:
    """Certify the family-A base derivation (near-unanimity rows at the top
    level force the first schedule vector)."""
    spec = SpecA(n, m)
    rel = gen_s(spec, n)
    target = f"S{n}"
    lv = n + 1
    columns = []
    for r in range(1, m + 1):
        col = [0] + [lv] * m
        col[r] = 0
        columns.append(ColumnBlock(tuple(col), 1))
    for b in range(n):
        c = schedule_count(n, m, 0, b)
        if c:
            columns.append(ColumnBlock((b + 1,) + (lv,) * m, c))
    for block in columns:
        _require_member(block, rel, target)
    rows = _tally_rows(m + 1, n + 2, columns)
    v_0 = schedule_vector(n, m, 0)
    if rows[0] != v_0.counts:
        raise CertificateError("base conclusion row does not match the first schedule vector")
    premise = [0] * (n + 2)
    premise[0] = 1
    premise[lv] = m ** (2**n) - 1
    for r in range(1, m + 1):
        if rows[r] != tuple(premise):
            raise CertificateError(f"base premise row {r} is not a one-deviation row")
    return BaseCertificate(applications=(Application(target, tuple(columns)),))


def certify_lower_bound_a(n: int, m: int) -> TraceCertificate:
    """Full certificate that family A(n, m) admits no near-unanimity
    operation of arity m**(2**n)."""
    if n < 0 or m < 2:
        raise ValueError("need n >= 0 and m >= 2")
    if n == 0 and m == 2:
        raise ValueError("the (n=0, m=2) instance makes no claim (arity below 3)")
    sched = build_schedule_a(n, m)
    steps = tuple(certify_step_a(n, m, k) for k in range(2**n - 1))
    return TraceCertificate(
        family="A",
        n=n,
        m=m,
        arity=m ** (2**n),
        schedule=tuple(v.counts for v in sched.vectors),
        base=certify_base_a(n, m),
        steps=steps,
        terminal_support=(0,),
    )


def _columns_step_b(n: int, k: int, i: int, which: int):
    """Column blocks of the family-B transition against R_i^which."""
    lv = i + 2
    own = which - 1  # id of the removed bottom element
    other = 1 - own
    half = 2**k
    columns = [
        ColumnBlock((own, 0), half),
        ColumnBlock((own, 1), half),
        ColumnBlock((other, lv), 2 * half),
    ]
    for b in range(i):
        c = schedule_count(n, 2, k + 1, b)
        if c:
            columns.append(ColumnBlock((b + 2, lv), c))
    for u in range(i + 1, n):
        c = schedule_count(n, 2, k, u)
        if c:
            columns.append(ColumnBlock((u + 2, u + 2), c))
    return columns


def certify_step_b(n: int, k: int) -> StepCertificate:
    """Certify the family-B transition w_k -> w_{k+1}; both level relations
    are applied, one per excluded bottom element."""
    ident = pivot_identities(n, 2, k)
    if not ident["ok"]:
        raise CertificateError(f"pivot arithmetic failed at step {k}")
    i = ident["pivot"]
    spec = SpecB(n)
    doubled = 2 ** (k + 1)
    if doubled > ident["pivot_count"]:
        raise CertificateError(
            f"doubled bottom block {doubled} exceeds the pivot count at step {k}"
        )
    w_k = schedule_vector_b(n, k)
    w_k1 = schedule_vector_b(n, k + 1)
    apps = []
    for which in (1, 2):
        target = f"R{i}^{which}"
        rel = gen_r_b(spec, i, which)
        columns = _columns_step_b(n, k, i, which)
        for block in columns:
            _require_member(block, rel, target)
        total = sum(b.count for b in columns)
        if total != 2 ** (2**n):
            raise CertificateError(f"column bookkeeping sums to {total} at step {k}")
        rows = _tally_rows(2, n + 3, columns)
        if rows[0] != w_k1.counts:
            raise CertificateError(f"conclusion row of step {k} ({target}) mismatches")
        if rows[1] != w_k.counts:
            raise CertificateError(f"premise row of step {k} ({target}) mismatches")
        apps.append(Application(target, tuple(columns)))
    if not _builder_chain_ok_b(n, i + 1):
        raise CertificateError(f"congruence ladder identity failed at level {i + 1}")
    # the bottom count splits between a1 and a2, so the prefix sums over the
    # B domain coincide with the m=2 values
    return StepCertificate(
        k=k,
        pivot=i,
        applications=tuple(apps),
        pivot_count=ident["pivot_count"],
        below_succ_premise=ident["below_succ_premise"],
        below_pivot_conclusion=ident["below_pivot_conclusion"],
        congruence_level=i + 1,
        congruence_blocks=blocks(congruence_b(spec, i + 1)),
        doubled=doubled,
    )


def certify_base_b(n: int) -> BaseCertificate:
    spec = SpecB(n)
    lv = n + 2
    apps = []
    for which in (1, 2):
        target = f"R{n}^{which}"
        rel = gen_r_b(spec, n, which)
        own = which - 1
        other = 1 - own
        columns = [ColumnBlock((own, own), 1), ColumnBlock((other, lv), 1)]
        for b in range(n):
            c = schedule_count(n, 2, 0, b)
            if c:
                columns.append(ColumnBlock((b + 2, lv), c))
        for block in columns:
            _require_member(block, rel, target)
        rows = _tally_rows(2, n + 3, columns)
        w_0 = schedule_vector_b(n, 0)
        if rows[0] != w_0.counts:
            raise CertificateError("base conclusion row does not match the first schedule vector")
        premise = [0] * (n + 3)
        premise[own] = 1
        premise[lv] = 2 ** (2**n) - 1
        if rows[1] != tuple(premise):
            raise CertificateError("base premise row is not a one-deviation row")
        apps.append(Application(target, tuple(columns)))
    return BaseCertificate(applications=tuple(apps))


def certify_lower_bound_b(n: int) -> TraceCertificate:
    """Full certificate that family B(n) admits no near-unanimity operation
    of arity 2**(2**n)."""
    if n < 0:
        raise ValueError("need n >= 0")
    sched = build_schedule_b(n)
    steps = tuple(certify_step_b(n, k) for k in range(2**n - 1))
    return TraceCertificate(
        family="B",
        n=n,
        m=2,
        arity=2 ** (2**n),
        schedule=tuple(v.counts for v in sched.vectors),
        base=certify_base_b(n),
        steps=steps,
        terminal_support=(0, 1),
    )


# ---------------------------------------------------------------------------
# Serialization (all counts as decimal strings)
# ---------------------------------------------------------------------------

def _domain_for(family: str, n: int):
    return domain_a(n) if family == "A" else domain_b(n)


def _app_to_json(app: Application, names) -> dict:
    return {
        "target": app.target,
        "columns": [
            {"column": [names[x] for x in b.column], "count": str(b.count)}
            for b in app.columns
        ],
    }


def certificate_to_json(cert: TraceCertificate) -> dict:
    names = _domain_for(cert.family, cert.n).names
    out = {
        "family": cert.family,
        "n": cert.n,
        "m": cert.m,
        "arity": str(cert.arity),
        "schedule": [
            {names[e]: str(c) for e, c in enumerate(row) if c}
            for row in cert.schedule
        ],
        "base": {"applications": [_app_to_json(a, names) for a in cert.base.applications]},
        "steps": [
            {
                "k": s.k,
                "pivot": s.pivot,
                "applications": [_app_to_json(a, names) for a in s.applications],
                "pivot_count": str(s.pivot_count),
                "below_succ_premise": str(s.below_succ_premise),
                "below_pivot_conclusion": str(s.below_pivot_conclusion),
                "congruence_level": s.congruence_level,
                "congruence_blocks": [[names[x] for x in blk] for blk in s.congruence_blocks],
                "doubled": None if s.doubled is None else str(s.doubled),
            }
            for s in cert.steps
        ],
        "terminal_support": [names[x] for x in cert.terminal_support],
    }
    return out


def _app_from_json(obj: dict, index) -> Application:
    columns = tuple(
        ColumnBlock(tuple(index[x] for x in entry["column"]), int(entry["count"]))
        for entry in obj["columns"]
    )
    return Application(str(obj["target"]), columns)


def certificate_from_json(obj: dict) -> TraceCertificate:
    family = str(obj["family"])
    if family not in ("A", "B"):
        raise ValueError(f"unknown family {family!r}")
    n = int(obj["n"])
    m = int(obj["m"])
    domain = _domain_for(family, n)
    index = domain.index
    size = domain.size
    schedule = []
    for row in obj["schedule"]:
        counts = [0] * size
        for name, c in row.items():
            counts[index[name]] = int(c)
        schedule.append(tuple(counts))
    base = BaseCertificate(
        applications=tuple(_app_from_json(a, index) for a in obj["base"]["applications"])
    )
    steps = tuple(
        StepCertificate(
            k=int(s["k"]),
            pivot=int(s["pivot"]),
            applications=tuple(_app_from_json(a, index) for a in s["applications"]),
            pivot_count=int(s["pivot_count"]),
            below_succ_premise=int(s["below_succ_premise"]),
            below_pivot_conclusion=int(s["below_pivot_conclusion"]),
            congruence_level=int(s["congruence_level"]),
            congruence_blocks=tuple(
                tuple(index[x] for x in blk) for blk in s["congruence_blocks"]
            ),
            doubled=None if s["doubled"] is None else int(s["doubled"]),
        )
        for s in obj["steps"]
    )
    return TraceCertificate(
        family=family,
        n=n,
        m=m,
        arity=int(obj["arity"]),
        schedule=tuple(schedule),
        base=base,
        steps=steps,
        terminal_support=tuple(index[x] for x in obj["terminal_support"]),
    )


# ---------------------------------------------------------------------------
# Checker: re-derives everything, shares no construction code with the
# builders beyond the domain types.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckReport:
    ok: bool
    faults: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.ok


def _ck_count(n: int, m: int, k: int, level) -> int:
    if level == "a":
        return m ** (k + 1)
    if (k >> level) & 1:
        return 0
    prefix = (k >> (level + 1)) << (level + 1)
    step = 1 << level
    return m ** (prefix + step) * (m**step - 1)


@lru_cache(maxsize=None)
def _ck_rel_s(n: int, m: int, i: int) -> Relation:
    lv = i + 1
    tups = set()
    for x in range(i + 1):
        for rest in itertools.product((0, lv), repeat=m):
            tups.add((x,) + rest)
    tups.discard((0,) + (lv,) * m)
    for u in range(i + 1, n + 1):
        tups.add((u + 1,) * (m + 1))
    return Relation(m + 1, n + 2, tups)


@lru_cache(maxsize=None)
def _ck_rel_b(n: int, i: int, j: int) -> Relation:
    lv = i + 2
    pairs = set()
    for x in range(i + 2):
        for y in (0, 1, lv):
            pairs.add((x, y))
    pairs.discard((j - 1, lv))
    for u in range(i + 1, n + 1):
        pairs.add((u + 2, u + 2))
    return Relation(2, n + 3, pairs)


@lru_cache(maxsize=None)
def _ck_chain_blocks(family: str, n: int, level: int):
    """Blocks of the composed converse/forward ladder up to `level`."""
    if family == "A":
        rails = []
        for t in range(level):
            pairs = {(x, y) for x in range(t + 1) for y in (0, t + 1)}
            pairs.update((u + 1, u + 1) for u in range(t + 1, n + 1))
            rails.append(Relation(2, n + 2, pairs))
    else:
        rails = [_ck_rel_b(n, t, 1) for t in range(level)]
    layers = [converse(r) for r in rails] + rails[::-1]
    out = layers[0]
    for lay in layers[1:]:
        out = compose(out, lay)
    return blocks(out)


@lru_cache(maxsize=None)
def _ck_model(family: str, n: int, m: int):
    """Everything a valid certificate must contain, derived from scratch."""
    if family not in ("A", "B"):
        raise ValueError("unknown family")
    if n < 0 or m < 2 or (family == "A" and (n, m) == (0, 2)):
        raise ValueError("parameters outside the certified range")
    if family == "B" and m != 2:
        raise ValueError("family B runs at m = 2")
    width = n + 2 if family == "A" else n + 3
    base_ids = 1 if family == "A" else 2
    total = m ** (2**n)

    def lv(t):
        return t + base_ids

    schedule = []
    for k in range(2**n):
        counts = [0] * width
        bottom = _ck_count(n, m, k, "a")
        if family == "A":
            counts[0] = bottom
        else:
            counts[0] = counts[1] = bottom // 2
        for t in range(n):
            counts[lv(t)] = _ck_count(n, m, k, t)
        if sum(counts) != total:
            raise ValueError("schedule does not conserve the total")
        schedule.append(tuple(counts))

    def step_model(k):
        i = 0
        while (k >> i) & 1:
            i += 1
        l_a = _ck_count(n, m, k, "a")
        below = [(lv(b), _ck_count(n, m, k + 1, b)) for b in range(i)]
        consts = [(lv(u), _ck_count(n, m, k, u)) for u in range(i + 1, n)]
        if family == "A":
            cols = {}
            for r in range(1, m + 1):
                col = [0] + [lv(i)] * m
                col[r] = 0
                cols[tuple(col)] = l_a
            for e, c in below:
                if c:
                    cols[(e,) + (lv(i),) * m] = c
            for e, c in consts:
                if c:
                    cols[(e,) * (m + 1)] = c
            apps = [(f"S{i}", cols)]
            premise = schedule[k]
            rows = [schedule[k + 1]] + [premise] * m
            rows_by_app = [rows]
        else:
            half = 2 ** k
            apps = []
            rows_by_app = []
            for which in (1, 2):
                own, other = which - 1, 2 - which
                cols = {(own, 0): half, (own, 1): half, (other, lv(i)): 2 * half}
                for e, c in below:
                    if c:
                        cols[(e, lv(i))] = c
                for e, c in consts:
                    if c:
                        cols[(e, e)] = c
                apps.append((f"R{i}^{which}", cols))
                rows_by_app.append([schedule[k + 1], schedule[k]])
        power = m ** (k + 1 + (1 << i))
        pivot_count = _ck_count(n, m, k, i)
        if pivot_count != m ** (k + 1) * (m ** (1 << i) - 1):
            raise ValueError("pivot count identity failed")
        below_succ = sum(schedule[k][: lv(i) + 1])
        below_conc = sum(schedule[k + 1][: lv(i)])
        if below_succ != power or below_conc != power:
            raise ValueError("prefix-sum identity failed")
        cong_blocks = (tuple(range(lv(i + 1))),) + tuple(
            (lv(t),) for t in range(i + 1, n + 1)
        )
        if _ck_chain_blocks(family, n, i + 1) != cong_blocks:
            raise ValueError("congruence ladder does not produce the expected blocks")
        return {
            "pivot": i,
            "apps": apps,
            "rows": rows_by_app,
            "pivot_count": pivot_count,
            "below_succ": below_succ,
            "below_conc": below_conc,
            "blocks": cong_blocks,
            "doubled": None if family == "A" else 2 ** (k + 1),
        }

    steps = [step_model(k) for k in range(2**n - 1)]

    # base derivation at the top level
    if family == "A":
        cols = {}
        for r in range(1, m + 1):
            col = [0] + [lv(n)] * m
            col[r] = 0
            cols[tuple(col)] = 1
        for b in range(n):
            c = _ck_count(n, m, 0, b)
            if c:
                cols[(lv(b),) + (lv(n),) * m] = c
        premise = [0] * width
        premise[0] = 1
        premise[lv(n)] = total - 1
        base_apps = [(f"S{n}", cols)]
        base_rows = [[schedule[0]] + [tuple(premise)] * m]
    else:
        base_apps = []
        base_rows = []
        for which in (1, 2):
            own, other = which - 1, 2 - which
            cols = {(own, own): 1, (other, lv(n)): 1}
            for b in range(n):
                c = _ck_count(n, m, 0, b)
                if c:
                    cols[(lv(b), lv(n))] = c
            premise = [0] * width
            premise[own] = 1
            premise[lv(n)] = total - 1
            base_apps.append((f"R{n}^{which}", cols))
            base_rows.append([schedule[0], tuple(premise)])

    return {
        "width": width,
        "arity": total,
        "schedule": tuple(schedule),
        "steps": steps,
        "base_apps": base_apps,
        "base_rows": base_rows,
        "terminal": tuple(range(base_ids)),
    }


@lru_cache(maxsize=None)
def _ck_canonical(family: str, n: int, m: int) -> TraceCertificate:
    """The unique certificate the model admits, with every recorded fact
    (memberships, tallies, arithmetic, ladder blocks) verified on the way."""
    model = _ck_model(family, n, m)
    width = model["width"]
    schedule = model["schedule"]

    def verified_app(tgt, cols, rows_expected):
        rel = _ck_rel_s(n, m, int(tgt[1:])) if family == "A" else _ck_rel_b(
            n, int(tgt[1 : tgt.index("^")]), int(tgt[-1])
        )
        arity = rel.arity
        rows = [[0] * width for _ in range(arity)]
        for col, c in cols.items():
            if col not in rel or c <= 0:
                raise ValueError(f"column {col} fails membership in {tgt}")
            for p in range(arity):
                rows[p][col[p]] += c
        for p in range(arity):
            if tuple(rows[p]) != rows_expected[p]:
                raise ValueError(f"row {p} tally mismatch in {tgt}")
        return Application(tgt, tuple(ColumnBlock(col, c) for col, c in cols.items()))

    base_apps = tuple(
        verified_app(tgt, cols, rows)
        for (tgt, cols), rows in zip(model["base_apps"], model["base_rows"])
    )
    steps = []
    for k, ms in enumerate(model["steps"]):
        apps = tuple(
            verified_app(tgt, cols, rows)
            for (tgt, cols), rows in zip(ms["apps"], ms["rows"])
        )
        if ms["doubled"] is not None and ms["doubled"] > ms["pivot_count"]:
            raise ValueError("doubled bottom block exceeds the pivot count")
        steps.append(
            StepCertificate(
                k=k,
                pivot=ms["pivot"],
                applications=apps,
                pivot_count=ms["pivot_count"],
                below_succ_premise=ms["below_succ"],
                below_pivot_conclusion=ms["below_conc"],
                congruence_level=ms["pivot"] + 1,
                congruence_blocks=ms["blocks"],
                doubled=ms["doubled"],
            )
        )
    return TraceCertificate(
        family=family,
        n=n,
        m=m,
        arity=model["arity"],
        schedule=schedule,
        base=BaseCertificate(base_apps),
        steps=tuple(steps),
        terminal_support=model["terminal"],
    )


def _describe_app_fault(app: Application, good: Application, structure: Structure, faults, where):
    if app.target != good.target:
        faults.append(f"{where}: target {app.target!r} differs from {good.target!r}")
        return
    rel = structure.relations.get(app.target)
    if rel is None:
        faults.append(f"{where}: structure has no relation {app.target!r}")
        return
    for block in app.columns:
        if block.column not in rel:
            faults.append(f"{where}: column {block.column} is not in {app.target}")
        elif block.count <= 0:
            faults.append(f"{where}: column {block.column} has count {block.count}")
    if app.columns != good.columns:
        faults.append(f"{where}: column multiset deviates from the derivation")


def _describe_step_fault(step: StepCertificate, good: StepCertificate, structure, faults):
    where = f"step {good.k}"
    if step.k != good.k:
        faults.append(f"{where}: records k={step.k}")
    if step.pivot != good.pivot:
        faults.append(f"{where}: pivot {step.pivot} differs from {good.pivot}")
    if len(step.applications) != len(good.applications):
        faults.append(f"{where}: application count mismatch")
    else:
        for app, ga in zip(step.applications, good.applications):
            if app != ga:
                _describe_app_fault(app, ga, structure, faults, where)
    if step.pivot_count != good.pivot_count:
        faults.append(f"{where}: pivot count deviates from the level bookkeeping")
    if step.below_succ_premise != good.below_succ_premise:
        faults.append(f"{where}: premise prefix sum deviates from the level bookkeeping")
    if step.below_pivot_conclusion != good.below_pivot_conclusion:
        faults.append(f"{where}: conclusion prefix sum deviates from the level bookkeeping")
    if step.congruence_level != good.congruence_level:
        faults.append(f"{where}: congruence level deviates")
    if step.congruence_blocks != good.congruence_blocks:
        faults.append(f"{where}: congruence blocks deviate from the ladder")
    if step.doubled != good.doubled:
        faults.append(f"{where}: doubled bottom-block size deviates")
    if not faults:
        faults.append(f"{where}: deviates from the derivation")


def check_certificate(cert: TraceCertificate, structure: Structure) -> CheckReport:
    """Re-verify every recorded fact of a certificate against the structure.

    The expected content is derived from the certificate's parameters alone
    (memberships, row tallies, exact arithmetic, congruence ladders) and the
    certificate must match it field for field.  Returns a report rather than
    raising; any deviation, including a structure that does not match the
    parameters, is a fault.
    """
    faults: list[str] = []
    try:
        family, n, m = cert.family, cert.n, cert.m
        try:
            good = _ck_canonical(family, n, m)
        except (ValueError, TypeError) as exc:
            return CheckReport(False, (f"parameters: {exc}",))

        expected_names = (
            ("a",) + tuple(str(t) for t in range(n + 1))
            if family == "A"
            else ("a1", "a2") + tuple(str(t) for t in range(n + 1))
        )
        if structure.domain.names != expected_names:
            return CheckReport(
                False, ("structure domain does not match the certificate parameters",)
            )
        if family == "A":
            for i in range(n + 1):
                rel = structure.relations.get(f"S{i}")
                if rel is None or rel != _ck_rel_s(n, m, i):
                    faults.append(f"structure relation S{i} does not match the parameters")
        else:
            for i in range(n + 1):
                for j in (1, 2):
                    rel = structure.relations.get(f"R{i}^{j}")
                    if rel is None or rel != _ck_rel_b(n, i, j):
                        faults.append(
                            f"structure relation R{i}^{j} does not match the parameters"
                        )
        if faults:
            return CheckReport(False, tuple(faults))

        if cert == good:
            return CheckReport(True, ())

        # something deviates; locate it for the report
        if cert.arity != good.arity:
            faults.append(f"arity {cert.arity} differs from the derived {good.arity}")
        if cert.schedule != good.schedule:
            faults.append("schedule deviates from the derived count vectors")
        if cert.terminal_support != good.terminal_support:
            faults.append("terminal support is not the bottom block")
        if cert.base != good.base:
            if len(cert.base.applications) != len(good.base.applications):
                faults.append("base application count mismatch")
            else:
                for app, ga in zip(cert.base.applications, good.base.applications):
                    if app != ga:
                        _describe_app_fault(app, ga, structure, faults, "base")
        if len(cert.steps) != len(good.steps):
            faults.append("step count mismatch")
        else:
            for step, gs in zip(cert.steps, good.steps):
                if step != gs:
                    _describe_step_fault(step, gs, structure, faults)
        if not faults:
            faults.append("certificate deviates from the derivation")
    except Exception as exc:  # malformed data is a fault, not a crash
        faults.append(f"malformed certificate: {exc}")
    return CheckReport(not faults, tuple(faults))


def check_certificate_json(obj: dict, structure: Structure) -> CheckReport:
    try:
        cert = certificate_from_json(obj)
    except Exception as exc:
        return CheckReport(False, (f"unparseable certificate: {exc}",))
    return check_certificate(cert, structure)
