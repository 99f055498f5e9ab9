"""Orbits of unimodular rows under elementary matrices and the group law on
them.

Over finite rings everything is exhaustive: rows are encoded as tuples of
element indices, orbits come from a union-find over all one-step moves
``a * e_ij(r)``, and the group axioms are checked on the full table.  Over
infinite rings only ``normalize_pair`` (a bounded search) and
``group_law`` are available.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import product

from .errors import (
    InternalInvariantViolation,
    NormalizationNotFound,
    NotUnimodular,
    SizeMismatch,
    TooLarge,
    UnsupportedRing,
)
from .matrices import ElementaryOp, SqMatrix, apply_right
from .rings import IntegersMod, PolyRing, avoids_minimal_primes, solve_unimodular
from .rows import RowPath, UmRow, act
from .seeding import derive_rng

ENUMERATION_LIMIT = 10**7


def _finite(ring):
    return isinstance(ring, IntegersMod) or (isinstance(ring, PolyRing) and ring.is_finite)


class FiniteRingTable:
    """Elements of a finite ring by index, with addition and multiplication tables."""

    def __init__(self, ring):
        if not _finite(ring):
            raise UnsupportedRing(f"{ring.kind} ring is not finite")
        self.ring = ring
        self.elements = ring.elements()
        self.index = {x: k for k, x in enumerate(self.elements)}
        q = len(self.elements)
        self.size = q
        self.add = [[self.index[a + b] for b in self.elements] for a in self.elements]
        self.mul = [[self.index[a * b] for b in self.elements] for a in self.elements]
        self.zero = self.index[ring.zero]
        self.one = self.index[ring.one]
        self.neg = [self.index[-a] for a in self.elements]
        self.sub_from_one = [self.add[self.one][self.neg[k]] for k in range(q)]
        self.unimodular_cache = {}

    def row(self, entries):
        return tuple(self.index[self.ring(x)] for x in entries)

    def elems(self, row):
        return tuple(self.elements[k] for k in row)

    def move(self, row, i, j, r):
        """Index-level ``row * e_ij(r)`` (0-based i, j)."""
        out = list(row)
        out[j] = self.add[row[j]][self.mul[row[i]][r]]
        return tuple(out)

    def is_unimodular(self, row):
        key = tuple(sorted(set(row)))
        hit = self.unimodular_cache.get(key)
        if hit is None:
            try:
                solve_unimodular([self.elements[k] for k in key])
                hit = True
            except NotUnimodular:
                hit = False
            self.unimodular_cache[key] = hit
        return hit


def _check_size(table, m):
    if m < 2:
        raise SizeMismatch("rows need at least two entries")
    if table.size ** m > ENUMERATION_LIMIT:
        raise TooLarge(f"{table.size}^{m} rows exceed the enumeration limit")


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # smaller row tuple becomes the root so the result is order independent
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


@dataclass
class OrbitPartition:
    table: FiniteRingTable
    m: int
    classes: list
    index: dict = field(repr=False)

    @property
    def ring(self):
        return self.table.ring

    def class_of(self, row):
        return self.index[row]

    def to_json(self):
        el = self.table.elements
        return {
            "m": self.m,
            "orbit_count": len(self.classes),
            "class_sizes": [len(c) for c in self.classes],
            "classes": [[[str(el[k]) for k in row] for row in c] for c in self.classes],
        }


def _components(rows, edges_of):
    uf = _UnionFind(rows)
    for row in rows:
        for other in edges_of(row):
            uf.union(row, other)
    groups = {}
    for row in rows:
        groups.setdefault(uf.find(row), []).append(row)
    return sorted(groups.values(), key=lambda c: c[0])


def enumerate_orbits(ring, m, table=None):
    table = table or FiniteRingTable(ring)
    _check_size(table, m)
    q = table.size
    rows = [r for r in product(range(q), repeat=m) if table.is_unimodular(r)]
    members = set(rows)
    pairs = [(i, j) for i in range(m) for j in range(m) if i != j]

    def edges(row):
        for i, j in pairs:
            if row[i] == table.zero:
                continue
            for r in range(q):
                out = table.move(row, i, j, r)
                if out != row:
                    if out not in members:
                        raise InternalInvariantViolation("elementary move left the unimodular rows")
                    yield out

    classes = _components(rows, edges)
    index = {row: k for k, c in enumerate(classes) for row in c}
    return OrbitPartition(table, m, classes, index)


def orbit_path(partition, source, target):
    """Shortest list of index-level moves ``(i, j, r)`` carrying source to target."""
    table, m = partition.table, partition.m
    parent = {source: None}
    queue = deque([source])
    while queue:
        row = queue.popleft()
        if row == target:
            break
        for i in range(m):
            if row[i] == table.zero:
                continue
            for j in range(m):
                if i == j:
                    continue
                for r in range(table.size):
                    out = table.move(row, i, j, r)
                    if out not in parent:
                        parent[out] = (row, (i, j, r))
                        queue.append(out)
    if target not in parent:
        raise InternalInvariantViolation("target lies outside the source orbit")
    moves = []
    row = target
    while parent[row] is not None:
        row, mv = parent[row]
        moves.append(mv)
    return list(reversed(moves))


def _row_path_from_moves(table, start, moves):
    rows = [start]
    steps = []
    for i, j, r in moves:
        op = ElementaryOp(i + 1, j + 1, table.elements[r])
        rows.append(act(rows[-1], op))
        steps.append(op)
    return RowPath(rows, steps)


@dataclass
class NormalizedPair:
    a: UmRow
    b: UmRow
    a_path: RowPath = None
    b_path: RowPath = None

    def __post_init__(self):
        if len(self.a) != len(self.b):
            raise SizeMismatch("rows of different length")
        if self.a[1] + self.b[1] != self.a.ring.one:
            raise ValueError("first entries do not add up to 1")
        if self.a.entries[1:] != self.b.entries[1:]:
            raise ValueError("tails differ")

    def to_json(self):
        out = {"a": self.a.to_json(), "b": self.b.to_json()}
        if self.a_path is not None:
            out["a_path"] = self.a_path.to_json()
            out["b_path"] = self.b_path.to_json()
        return out


def is_normalized(a, b):
    return len(a) == len(b) and a[1] + b[1] == a.ring.one and a.entries[1:] == b.entries[1:]


def group_law(pair):
    """``(a_1 b_1, a_2, ..., a_{n+1})``."""
    a, b = pair.a, pair.b
    entries = (a[1] * b[1],) + a.entries[1:]
    try:
        return UmRow(a.ring, entries)
    except NotUnimodular as exc:
        raise InternalInvariantViolation("product row is not unimodular") from exc


def normalize_pair(a, b, budget=2000, seed=0, partition=None):
    if a.ring != b.ring or len(a) != len(b):
        raise SizeMismatch("rows must share ring and length")
    if is_normalized(a, b):
        return NormalizedPair(a, b, RowPath([a]), RowPath([b]))
    if _finite(a.ring):
        return _normalize_finite(a, b, partition)
    return _normalize_search(a, b, budget, seed)


def _normalize_finite(a, b, partition):
    if partition is None:
        partition = enumerate_orbits(a.ring, len(a))
    table = partition.table
    ra, rb = table.row(a.entries), table.row(b.entries)
    target_class = partition.class_of(rb)
    for cand in partition.classes[partition.class_of(ra)]:
        partner = (table.sub_from_one[cand[0]],) + cand[1:]
        if partition.index.get(partner) == target_class:
            a_path = _row_path_from_moves(table, a, orbit_path(partition, ra, cand))
            b_path = _row_path_from_moves(table, b, orbit_path(partition, rb, partner))
            return NormalizedPair(a_path.end, b_path.end, a_path, b_path)
    raise NormalizationNotFound("no normalized representatives exist for this pair of orbits")


def _lead(ring, x):
    return ring.alg.lead(dict(x.value))


def _unit_position(row):
    ring = row.ring
    for k, x in enumerate(row.entries):
        if isinstance(ring, PolyRing):
            c = ring.constant_value(x)
            if c is not None and not ring.field.is_zero(c):
                return k
        elif x.is_unit():
            return k
    return None


def reduce_to_e1(row, budget=200):
    """A row path from ``row`` to ``(1, 0, ..., 0)`` or None.

    Leading terms are cancelled against each other until some entry becomes
    a unit; from there the row is cleared explicitly.
    """
    ring = row.ring
    cur = row
    path = RowPath([row])

    def push(op):
        nonlocal cur
        cur = act(cur, op)
        path.rows.append(cur)
        path.steps.append(op)

    for _ in range(budget):
        if _unit_position(cur) is not None:
            break
        if not isinstance(ring, PolyRing):
            return None
        best = None
        for i, ai in enumerate(cur.entries):
            if ai.is_zero():
                continue
            mi, ci = _lead(ring, ai)
            for j, aj in enumerate(cur.entries):
                if i == j or aj.is_zero():
                    continue
                mj, cj = _lead(ring, aj)
                if all(x >= y for x, y in zip(mi, mj)):
                    quot = tuple(x - y for x, y in zip(mi, mj))
                    best = (i, j, ring.element({quot: ring.field.neg(ring.field.div(ci, cj))}))
                    break
            if best:
                break
        if best is None:
            return None
        i, j, q = best
        push(ElementaryOp(j + 1, i + 1, q))
    else:
        return None
    k = _unit_position(cur)
    if k is None:
        return None
    u = cur.entries[k]
    uinv = u.inverse()
    size = len(cur)
    for j in range(size):
        if j != k and not cur.entries[j].is_zero():
            push(ElementaryOp(k + 1, j + 1, -cur.entries[j] * uinv))
    if k != 0:
        push(ElementaryOp(k + 1, 1, uinv))
        push(ElementaryOp(1, k + 1, -u))
    elif u != ring.one:
        push(ElementaryOp(1, 2, ring.one))
        push(ElementaryOp(2, 1, uinv - ring.one))
        push(ElementaryOp(1, 2, -u))
    if cur.entries != (ring.one,) + (ring.zero,) * (size - 1):
        raise InternalInvariantViolation("reduction to e_1 missed its target")
    return path


def _normalize_search(a, b, budget, seed):
    """Move ``a`` by random constant-parameter ops until its partner
    ``(1 - a_1, a_2, ...)`` and ``b`` both reduce to ``e_1``."""
    ring = a.ring
    red_b = reduce_to_e1(b)
    if red_b is None:
        raise NormalizationNotFound("could not reduce the second row to a standard form")
    rng = derive_rng(seed, "normalize")
    a_path = RowPath([a])
    size = len(a)
    for attempt in range(budget):
        cur = a_path.end
        partner = (ring.one - cur[1],) + cur.entries[1:]
        try:
            partner_row = UmRow(ring, partner)
        except NotUnimodular:
            partner_row = None
        if partner_row is not None:
            red_p = reduce_to_e1(partner_row)
            if red_p is not None:
                b_path = red_b.concat(red_p.reversed())
                return NormalizedPair(cur, partner_row, a_path, b_path)
        i, j = rng.sample(range(1, size + 1), 2)
        box = 1 + attempt // 16
        c = ring.constant(ring.field.sample(rng, box)) if isinstance(ring, PolyRing) else ring.from_int(rng.randint(-box, box))
        if c.is_zero():
            continue
        op = ElementaryOp(i, j, c)
        a_path = RowPath(a_path.rows + [act(cur, op)], a_path.steps + [op])
    raise NormalizationNotFound(f"no normalized pair within {budget} attempts")


# -- exhaustive group-axiom oracle -------------------------------------------

def _product_table(partition):
    table = partition.table
    products = {}
    for cls in partition.classes:
        for row in cls:
            partner = (table.sub_from_one[row[0]],) + row[1:]
            cb = partition.index.get(partner)
            if cb is None:
                continue
            prod = (table.mul[row[0]][partner[0]],) + row[1:]
            cp = partition.index.get(prod)
            if cp is None:
                raise InternalInvariantViolation("product row is not unimodular")
            products.setdefault((partition.index[row], cb), set()).add(cp)
    return products


def verify_group_axioms(ring, m, partition=None):
    partition = partition or enumerate_orbits(ring, m)
    table = partition.table
    k = len(partition.classes)
    products = _product_table(partition)
    well_defined = all(len(v) == 1 for v in products.values())
    covered = all((x, y) in products for x in range(k) for y in range(k))
    op = {key: min(v) for key, v in products.items()}
    e1 = (table.one,) + (table.zero,) * (m - 1)
    neutral = partition.index[e1]
    complete = well_defined and covered
    commutative = complete and all(op[x, y] == op[y, x] for x in range(k) for y in range(k))
    associative = complete and all(
        op[op[x, y], z] == op[x, op[y, z]] for x in range(k) for y in range(k) for z in range(k)
    )
    has_neutral = complete and all(op[neutral, x] == x and op[x, neutral] == x for x in range(k))
    has_inverses = complete and all(any(op[x, y] == neutral for y in range(k)) for x in range(k))
    report = {
        "ring": ring.to_json(),
        "m": m,
        "orbit_count": k,
        "class_sizes": [len(c) for c in partition.classes],
        "neutral_class": neutral,
        "well_defined": well_defined,
        "all_pairs_covered": covered,
        "commutative": commutative,
        "associative": associative,
        "neutral": has_neutral,
        "inverses": has_inverses,
        "table": [[op.get((x, y)) for y in range(k)] for x in range(k)],
    }
    report["passed"] = all(report[key] for key in
                           ("well_defined", "all_pairs_covered", "commutative", "associative", "neutral", "inverses"))
    return report


def generic_locus_report(ring, m, partition=None):
    """Per orbit: whether its generic rows are nonempty and connected under
    moves that stay generic."""
    partition = partition or enumerate_orbits(ring, m)
    table = partition.table
    avoid = [avoids_minimal_primes(x) for x in table.elements]

    def generic(row):
        return avoid[table.mul[row[-2]][row[-1]]]

    pairs = [(i, j) for i in range(m) for j in range(m) if i != j]
    out = []
    for cls in partition.classes:
        gen = [r for r in cls if generic(r)]
        members = set(gen)

        def edges(row):
            for i, j in pairs:
                for r in range(table.size):
                    nxt = table.move(row, i, j, r)
                    if nxt in members:
                        yield nxt

        comps = _components(gen, edges) if gen else []
        out.append({"size": len(cls), "generic": len(gen), "components": len(comps)})
    return {
        "m": m,
        "orbits": out,
        "passed": all(o["generic"] > 0 and o["components"] == 1 for o in out),
    }


# -- finite-field path components ---------------------------------------------

def sl_path_components(ring, size, open_set):
    """Connected components of ``SL_size(F) & U`` under single elementary
    steps whose endpoints both lie in U, for a finite field F."""
    if not (isinstance(ring, PolyRing) and not ring.variables and ring.field.is_finite):
        raise UnsupportedRing("exhaustive path search needs a finite field")
    elems = ring.elements()
    if len(elems) ** (size * size) > ENUMERATION_LIMIT:
        raise TooLarge("too many matrices to enumerate")
    points = []
    for flat in product(elems, repeat=size * size):
        g = SqMatrix(ring, [flat[r * size:(r + 1) * size] for r in range(size)])
        if g.is_sl() and g in open_set:
            points.append(g)
    order = {g: k for k, g in enumerate(points)}
    nonzero = [x for x in elems if not x.is_zero()]

    def edges(k):
        g = points[k]
        for i in range(1, size + 1):
            for j in range(1, size + 1):
                if i == j:
                    continue
                for t in nonzero:
                    h = apply_right(g, ElementaryOp(i, j, t))
                    if h in order:
                        yield order[h]

    comps = _components(list(range(len(points))), edges)
    return [[points[k] for k in c] for c in comps]
