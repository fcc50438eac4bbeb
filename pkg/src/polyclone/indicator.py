"""Existence of near-unanimity operation tables, decided by search.

The unknown table is a constraint problem: one variable per argument tuple,
one constraint per matrix of columns drawn from a relation (the tuple of
entries indexed by the matrix rows must land in the relation).  Unary
relations shrink variable domains directly, the near-unanimity identities
pin the constant and one-deviation tuples, and the search runs complete
backtracking with generalized arc consistency over the matrix constraints.
Verdicts are "sat" (with a full table), "unsat" (complete search exhausted),
or "unknown" (node limit hit); an unknown is never reported as unsat.
"""

from __future__ import annotations

from array import array
from collections import deque
from dataclasses import dataclass

from .relations import BudgetExceededError, OpTable, Relation, Structure, table_compatible

DEFAULT_VAR_CAP = 2 * 10**4
DEFAULT_MATRIX_BUDGET = 2 * 10**6
DEFAULT_NODE_LIMIT = 10**7


class IndicatorInstance:
    """Compiled constraint problem for one (structure, arity) question."""

    __slots__ = (
        "structure",
        "arity",
        "domain_size",
        "nvars",
        "domains",
        "rel_list",
        "con_rel",
        "con_start",
        "scopes",
        "patterns",
        "var_start",
        "var_cons",
    )

    def __init__(self, structure, arity, domains, rel_list, con_rel, con_start, scopes, patterns):
        self.structure = structure
        self.arity = arity
        self.domain_size = structure.domain.size
        self.nvars = len(domains)
        self.domains = domains
        self.rel_list = rel_list
        self.con_rel = con_rel
        self.con_start = con_start
        self.scopes = scopes
        self.patterns = patterns
        self._index_vars()

    def _index_vars(self):
        counts = [0] * (self.nvars + 1)
        for v in self.scopes:
            counts[v + 1] += 1
        for i in range(self.nvars):
            counts[i + 1] += counts[i]
        self.var_start = array("l", counts)
        var_cons = array("l", [0]) * len(self.scopes)
        fill = list(self.var_start[:-1])
        for cid in range(len(self.con_rel)):
            for off in range(self.con_start[cid], self.con_start[cid + 1]):
                v = self.scopes[off]
                var_cons[fill[v]] = cid
                fill[v] += 1
        self.var_cons = var_cons

    @property
    def n_constraints(self) -> int:
        return len(self.con_rel)


def encode_args(args, domain_size: int) -> int:
    code = 0
    for x in args:
        code = code * domain_size + x
    return code


def nu_pins(domain_size: int, arity: int):
    """Constant tuples map to their constant; one deviation loses to the
    repeated element."""
    pins = []
    for x in range(domain_size):
        pins.append(((x,) * arity, x))
        for p in range(arity):
            for y in range(domain_size):
                if y == x:
                    continue
                args = [x] * arity
                args[p] = y
                pins.append((tuple(args), x))
    return pins


def remark_pins(domain_size: int, arity: int):
    """Weaker pinning: only the tuples deviating from the top element by the
    bottom element are fixed (to the top element)."""
    top = domain_size - 1
    pins = []
    for p in range(arity):
        args = [top] * arity
        args[p] = 0
        pins.append((tuple(args), top))
    return pins


def _scopes_for_relation(rel: Relation, k: int, domain_size: int) -> array:
    """Row variables of every k-column matrix over rel, transposed on the fly."""
    weights = [domain_size ** (k - 1 - c) for c in range(k)]
    r = rel.arity
    out = array("l")
    codes = [0] * r
    tuples = rel.tuples
    extend = out.extend

    def rec(c):
        if c == k:
            extend(codes)
            return
        w = weights[c]
        for t in tuples:
            for p in range(r):
                codes[p] += t[p] * w
            rec(c + 1)
            for p in range(r):
                codes[p] -= t[p] * w

    rec(0)
    return out


def build_indicator(
    structure: Structure,
    k: int,
    identities: str = "nu",
    fixed_rows=None,
    var_cap: int = DEFAULT_VAR_CAP,
    matrix_budget: int = DEFAULT_MATRIX_BUDGET,
) -> IndicatorInstance:
    """Compile the instance for "does `structure` have an operation of arity
    `k` satisfying the identities".

    `identities` is "nu" for full near-unanimity pinning or "fixed" to use
    only the supplied `fixed_rows` (an iterable of (args, value) pairs);
    passing `fixed_rows` forces "fixed".
    """
    if k < 1:
        raise ValueError("arity must be positive")
    d = structure.domain.size
    nvars = d**k
    if nvars > var_cap:
        raise BudgetExceededError(f"{nvars} variables exceed cap {var_cap}")

    full = (1 << d) - 1
    domains = [full] * nvars

    # unary relations become per-variable domain restrictions
    unary_masks = []
    for rel in structure.relations.values():
        if rel.arity == 1:
            mask = 0
            for (e,) in rel.tuples:
                mask |= 1 << e
            unary_masks.append(mask)
    for code in range(nvars):
        coords = 0
        c = code
        for _ in range(k):
            coords |= 1 << (c % d)
            c //= d
        m = full
        for u in unary_masks:
            if coords & ~u == 0:
                m &= u
        domains[code] = m

    if fixed_rows is not None:
        identities = "fixed"
    if identities == "nu":
        pins = nu_pins(d, k)
    elif identities == "fixed":
        pins = [(tuple(args), val) for args, val in (fixed_rows or [])]
    else:
        raise ValueError(f"unknown identity set {identities!r}")
    for args, val in pins:
        if len(args) != k:
            raise ValueError("pinned tuple has wrong arity")
        domains[encode_args(args, d)] &= 1 << val

    rel_list = []
    con_rel = array("h")
    con_start = array("l", [0])
    scopes = array("l")
    for rel in structure.relations.values():
        if rel.arity < 2 or not len(rel):
            continue
        count = len(rel) ** k
        if count > matrix_budget:
            raise BudgetExceededError(
                f"{count} column matrices for a relation exceed budget {matrix_budget}"
            )
        rel_idx = len(rel_list)
        rel_list.append(rel)
        block = _scopes_for_relation(rel, k, d)
        scopes.extend(block)
        r = rel.arity
        base = con_start[-1]
        for local in range(count):
            con_rel.append(rel_idx)
            con_start.append(base + (local + 1) * r)

    # repeated rows in a scope force equal values; record the pattern
    patterns = []
    for cid in range(len(con_rel)):
        lo, hi = con_start[cid], con_start[cid + 1]
        scope = scopes[lo:hi]
        first = {}
        pat = []
        distinct = True
        for p, v in enumerate(scope):
            q = first.setdefault(v, p)
            pat.append(q)
            if q != p:
                distinct = False
        patterns.append(None if distinct else tuple(pat))

    return IndicatorInstance(
        structure, k, domains, rel_list, con_rel, con_start, scopes, patterns
    )


@dataclass
class SolveReport:
    verdict: str  # "sat" | "unsat" | "unknown"
    table: OpTable | None
    nodes: int

    def to_json(self) -> dict:
        obj = {"verdict": self.verdict, "nodes": self.nodes}
        if self.table is not None:
            obj["witness"] = {
                "arity": self.table.arity,
                "domain": self.table.domain_size,
                "values": list(self.table.values),
            }
        return obj


def _verdict_for(rel: Relation, pat, sig):
    """Allowed value bitmask per position, or False when some position has
    no support under the given domain signature."""
    r = rel.arity
    allowed = [0] * r
    if pat is None:
        for t in rel.tuples:
            for p in range(r):
                if not (sig[p] >> t[p]) & 1:
                    break
            else:
                for p in range(r):
                    allowed[p] |= 1 << t[p]
    else:
        for t in rel.tuples:
            ok = True
            for p in range(r):
                e = t[p]
                if not (sig[p] >> e) & 1 or t[pat[p]] != e:
                    ok = False
                    break
            if ok:
                for p in range(r):
                    allowed[p] |= 1 << t[p]
    for a in allowed:
        if not a:
            return False
    return tuple(allowed)


def solve(inst: IndicatorInstance, node_limit: int = DEFAULT_NODE_LIMIT) -> SolveReport:
    """Complete depth-first search with generalized arc consistency.

    Variable order is fail-first (smallest live domain, lowest index on
    ties); values are tried in ascending element order, so runs are
    deterministic.
    """
    dom = list(inst.domains)
    nvars = inst.nvars
    ncons = inst.n_constraints
    con_rel = inst.con_rel
    con_start = inst.con_start
    scopes = inst.scopes
    patterns = inst.patterns
    rel_list = inst.rel_list
    var_start = inst.var_start
    var_cons = inst.var_cons

    if any(m == 0 for m in dom):
        return SolveReport("unsat", None, 0)

    memo: dict = {}
    in_queue = bytearray(ncons)
    trail: list[tuple[int, int]] = []

    def propagate(queue) -> bool:
        while queue:
            cid = queue.popleft()
            in_queue[cid] = 0
            lo, hi = con_start[cid], con_start[cid + 1]
            scope = scopes[lo:hi]
            sig = tuple(dom[v] for v in scope)
            rel_idx = con_rel[cid]
            key = (rel_idx, patterns[cid], sig)
            verdict = memo.get(key)
            if verdict is None:
                verdict = _verdict_for(rel_list[rel_idx], patterns[cid], sig)
                memo[key] = verdict
            if verdict is False:
                while queue:
                    in_queue[queue.popleft()] = 0
                return False
            for p in range(hi - lo):
                v = scope[p]
                new = dom[v] & verdict[p]
                if new != dom[v]:
                    if not new:
                        while queue:
                            in_queue[queue.popleft()] = 0
                        return False
                    trail.append((v, dom[v]))
                    dom[v] = new
                    for idx in range(var_start[v], var_start[v + 1]):
                        c2 = var_cons[idx]
                        if not in_queue[c2]:
                            in_queue[c2] = 1
                            queue.append(c2)
        return True

    def enqueue_var(v):
        queue = deque()
        for idx in range(var_start[v], var_start[v + 1]):
            c2 = var_cons[idx]
            if not in_queue[c2]:
                in_queue[c2] = 1
                queue.append(c2)
        return queue

    def choose():
        best = -1
        best_count = 1 << 30
        for v in range(nvars):
            c = dom[v].bit_count()
            if 1 < c < best_count:
                best_count = c
                best = v
                if c == 2:
                    break
        return best

    def bits_of(mask):
        out = []
        while mask:
            b = mask & -mask
            out.append(b.bit_length() - 1)
            mask ^= b
        return out

    def extract():
        values = [dom[v].bit_length() - 1 for v in range(nvars)]
        return OpTable(inst.arity, inst.domain_size, values)

    root = deque(range(ncons))
    for cid in root:
        in_queue[cid] = 1
    if not propagate(root):
        return SolveReport("unsat", None, 0)

    nodes = 0
    var = choose()
    if var < 0:
        return SolveReport("sat", extract(), nodes)
    stack = [[var, bits_of(dom[var]), 0, len(trail)]]
    while stack:
        frame = stack[-1]
        v, vals, vi, mark = frame
        while len(trail) > mark:
            v2, old = trail.pop()
            dom[v2] = old
        if vi >= len(vals):
            stack.pop()
            continue
        frame[2] += 1
        nodes += 1
        if nodes > node_limit:
            return SolveReport("unknown", None, nodes)
        trail.append((v, dom[v]))
        dom[v] = 1 << vals[vi]
        if propagate(enqueue_var(v)):
            nxt = choose()
            if nxt < 0:
                return SolveReport("sat", extract(), nodes)
            stack.append([nxt, bits_of(dom[nxt]), 0, len(trail)])
    return SolveReport("unsat", None, nodes)


def decide_nu(
    structure: Structure,
    k: int,
    pin: str = "nu",
    fixed_rows=None,
    var_cap: int = DEFAULT_VAR_CAP,
    matrix_budget: int = DEFAULT_MATRIX_BUDGET,
    node_limit: int = DEFAULT_NODE_LIMIT,
) -> SolveReport:
    """Build and solve; `pin` is "nu", "remark" (fix only the bottom-element
    deviations from the top element), or "fixed" with explicit rows."""
    if fixed_rows is not None:
        pin = "fixed"
    if pin == "nu":
        inst = build_indicator(structure, k, "nu", None, var_cap, matrix_budget)
    elif pin == "remark":
        rows = remark_pins(structure.domain.size, k)
        inst = build_indicator(structure, k, "fixed", rows, var_cap, matrix_budget)
    elif pin == "fixed":
        inst = build_indicator(structure, k, "fixed", fixed_rows, var_cap, matrix_budget)
    else:
        raise ValueError(f"unknown pin mode {pin!r}")
    return solve(inst, node_limit)


def verify_witness_table(
    table: OpTable, structure: Structure, budget: int = 10**7
) -> bool:
    """Re-validate a search result using only the core relational machinery:
    the near-unanimity identities hold and every relation is preserved."""
    d = structure.domain.size
    if table.domain_size != d:
        return False
    k = table.arity
    for x in range(d):
        if table.apply((x,) * k) != x:
            return False
        for p in range(k):
            for y in range(d):
                if y == x:
                    continue
                args = [x] * k
                args[p] = y
                if table.apply(args) != x:
                    return False
    for rel in structure.relations.values():
        ok, _ = table_compatible(table, rel, budget=budget)
        if not ok:
            return False
    return True
