"""Elementary paths in SL over a field and randomized path search inside
Zariski open sets given as nonvanishing loci."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    BudgetExhausted,
    FiniteFieldUnsupported,
    NotGenericPosition,
    NotInOpenSet,
    SizeMismatch,
    UnsupportedRing,
)
from .matrices import ElementaryOp, RootSchedule, SqMatrix, apply_right, matrix_to_params
from .rings import PolyRing
from .seeding import derive_rng


@dataclass
class ElemPath:
    points: list
    steps: list = field(default_factory=list)

    @classmethod
    def single(cls, g):
        return cls([g], [])

    @property
    def start(self):
        return self.points[0]

    @property
    def end(self):
        return self.points[-1]

    def reversed(self):
        return ElemPath(list(reversed(self.points)), [op.inverse() for op in reversed(self.steps)])

    def concat(self, other):
        if self.end != other.start:
            raise ValueError("paths do not share an endpoint")
        return ElemPath(self.points + other.points[1:], self.steps + other.steps)

    def to_json(self):
        return {"points": [g.to_json() for g in self.points], "steps": [op.to_json() for op in self.steps]}

    @classmethod
    def from_json(cls, ring, data):
        return cls([SqMatrix.from_json(ring, g) for g in data["points"]],
                   [ElementaryOp.from_json(ring, op) for op in data["steps"]])


def _entry_names(size):
    return [f"m_{r}_{c}" for r in range(1, size + 1) for c in range(1, size + 1)]


class OpenSet:
    """Matrices of a given size on which every constraint polynomial is nonzero.

    Constraints are polynomials in the entry variables ``m_1_1 .. m_k_k``;
    no constraints means all of SL.
    """

    def __init__(self, ring, size, constraints=()):
        if not isinstance(ring, PolyRing) or ring.variables:
            raise UnsupportedRing("open sets live in SL over a field")
        self.ring = ring
        self.size = size
        self.entry_ring = PolyRing(ring.field, _entry_names(size))
        self.constraints = [self.entry_ring(c) for c in constraints]

    def evaluate(self, poly, g):
        K = self.ring.field
        vals = [self.ring.constant_value(x) for row in g.rows for x in row]
        total = K.zero
        for mono, c in poly.value:
            term = c
            for v, e in zip(vals, mono):
                for _ in range(e):
                    term = K.mul(term, v)
            total = K.add(total, term)
        return total

    def __contains__(self, g):
        if g.size != self.size:
            raise SizeMismatch(f"matrix of size {g.size} against open set of size {self.size}")
        K = self.ring.field
        return all(not K.is_zero(self.evaluate(f, g)) for f in self.constraints)

    def to_json(self):
        return {"size": self.size, "constraints": [str(c) for c in self.constraints]}

    @classmethod
    def from_json(cls, ring, data, size=None):
        return cls(ring, int(data.get("size", size)), data.get("constraints", []))


def path_defect(p, U=None):
    """First failing index and reason, or None for a valid path."""
    if len(p.steps) != len(p.points) - 1 or not p.points:
        return 0, "step count does not match point count"
    for k, g in enumerate(p.points):
        if U is not None:
            if g.size != U.size:
                return k, "size mismatch"
            if g not in U:
                return k, "point leaves the open set"
        if k < len(p.steps):
            try:
                nxt = apply_right(g, p.steps[k])
            except SizeMismatch:
                return k, "step does not fit the matrix size"
            if nxt != p.points[k + 1]:
                return k, "step equation fails"
    return None


def verify_path(p, U=None):
    return path_defect(p, U) is None


def _require_infinite_field(ring):
    if not isinstance(ring, PolyRing) or ring.variables:
        raise UnsupportedRing("path search needs matrices over a field")
    if ring.field.is_finite:
        raise FiniteFieldUnsupported("open subsets of SL over a finite field need not be path connected")


def walk(p, schedule, t):
    """The path ``p, p e_a1(t1), ..., p e_a1(t1)...e_aN(tN)``; zero steps are kept."""
    points, steps = [p], []
    g = p
    for (i, j), x in zip(schedule.positions, t):
        op = ElementaryOp(i, j, x)
        g = apply_right(g, op)
        points.append(g)
        steps.append(op)
    return ElemPath(points, steps)


def _sample_params(ring, rng, n, box):
    return [ring.constant(ring.field.sample(rng, box)) for _ in range(n)]


def _box(attempt):
    # grow the sampling box slowly: exact sampling from larger integer boxes
    # escapes any fixed proper closed subset with increasing probability
    return 2 + attempt // 16


def reachable_sample(p, U, seed, budget=1000):
    """A random endpoint reachable from ``p`` by an N-step path inside U."""
    _require_infinite_field(p.ring)
    if p not in U:
        raise NotInOpenSet("start point is not in the open set")
    schedule = RootSchedule.for_size(p.size)
    rng = derive_rng(seed, "reachable")
    for attempt in range(budget):
        t = _sample_params(p.ring, rng, len(schedule), _box(attempt))
        path = walk(p, schedule, t)
        if all(g in U for g in path.points):
            return path.end, path
    raise BudgetExhausted(f"no in-set sample within {budget} attempts")


def _elementary_between(p, q):
    """The op ``e`` with ``p e == q`` if ``p^-1 q`` is elementary, else None."""
    d = p.inverse() * q
    ring, n = p.ring, p.size
    off = [(r, c) for r in range(1, n + 1) for c in range(1, n + 1) if r != c and not d[r, c].is_zero()]
    if len(off) != 1 or any(d[k, k] != ring.one for k in range(1, n + 1)):
        return None
    (r, c), = off
    return ElementaryOp(r, c, d[r, c])


def connect(p, q, U, budget, seed):
    """An elementary path from p to q with every point in U.

    Meet in the middle: walk randomly from p along the root schedule to a
    point z inside U, then solve for the unique parameters carrying q to z
    and check that this second walk also stays in U.
    """
    ring = p.ring
    _require_infinite_field(ring)
    if p.size != q.size or p.size != U.size:
        raise SizeMismatch("sizes of p, q and the open set differ")
    if p not in U or q not in U:
        raise NotInOpenSet("endpoints must lie in the open set")
    if p == q:
        return ElemPath.single(p)
    op = _elementary_between(p, q)
    if op is not None:
        return ElemPath([p, q], [op])
    schedule = RootSchedule.for_size(p.size)
    q_inv = q.inverse()
    rng = derive_rng(seed, "connect", "p-frontier")
    for attempt in range(budget):
        t = _sample_params(ring, rng, len(schedule), _box(attempt))
        forward = walk(p, schedule, t)
        if not all(g in U for g in forward.points):
            continue
        z = forward.end
        try:
            s = matrix_to_params(q_inv * z)
        except NotGenericPosition:
            continue
        backward = walk(q, schedule, s)
        if backward.end != z or not all(g in U for g in backward.points):
            continue
        return forward.concat(backward.reversed())
    raise BudgetExhausted(f"no connecting path found within {budget} attempts")
