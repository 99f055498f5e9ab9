"""Unimodular rows, the generic locus and constructive prime avoidance."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .errors import (
    BudgetExhausted,
    HeightPreconditionFailed,
    InternalInvariantViolation,
    NotInfiniteField,
    NotUnimodular,
    SizeMismatch,
    TooLarge,
    UnsupportedRing,
)
from .matrices import ElementaryOp, apply_right
from .rings import UNIT_IDEAL, Ideal, IntegersMod, PolyRing, avoids_minimal_primes, height, solve_unimodular
from .seeding import derive_rng

EXHAUSTIVE_LIMIT = 10**7


class UmRow:
    """A unimodular row of length at least 4 together with a certificate
    ``x`` satisfying ``sum(a_i * x_i) == 1``."""

    __slots__ = ("ring", "entries", "certificate")

    def __init__(self, ring, entries, certificate=None):
        entries = tuple(ring(x) for x in entries)
        if len(entries) < 4:
            raise SizeMismatch(f"rows need length at least 4, got {len(entries)}")
        if certificate is None:
            certificate = solve_unimodular(entries)
        certificate = tuple(ring(x) for x in certificate)
        if len(certificate) != len(entries):
            raise SizeMismatch("certificate length differs from row length")
        total = ring.zero
        for a, x in zip(entries, certificate):
            total = total + a * x
        if total != ring.one:
            raise NotUnimodular("certificate does not certify unimodularity")
        self.ring = ring
        self.entries = entries
        self.certificate = certificate

    @property
    def n(self):
        return len(self.entries) - 1

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        """1-based entry access."""
        return self.entries[i - 1]

    def __eq__(self, other):
        return isinstance(other, UmRow) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __str__(self):
        return "(" + ", ".join(str(x) for x in self.entries) + ")"

    __repr__ = __str__

    def to_json(self, with_ring=False):
        out = {"entries": [str(x) for x in self.entries], "certificate": [str(x) for x in self.certificate]}
        if with_ring:
            from .rings import ring_to_json

            out["ring"] = ring_to_json(self.ring)
        return out

    @classmethod
    def from_json(cls, ring, data):
        if isinstance(data, list):
            return cls(ring, data)
        return cls(ring, data["entries"], data.get("certificate"))


def act(a, op):
    """``a * op``; the certificate is transported instead of re-solved.

    If ``a x = 1`` then ``(a e_ij(t)) (e_ij(-t) x) = 1`` and
    ``e_ij(-t) x`` only changes ``x_i`` to ``x_i - t x_j``.
    """
    entries = apply_right(a.entries, op)
    cert = list(a.certificate)
    cert[op.i - 1] = cert[op.i - 1] - op.t * cert[op.j - 1]
    return UmRow(a.ring, entries, cert)


@dataclass
class RowPath:
    rows: list
    steps: list = field(default_factory=list)

    @property
    def start(self):
        return self.rows[0]

    @property
    def end(self):
        return self.rows[-1]

    def reversed(self):
        return RowPath(list(reversed(self.rows)), [op.inverse() for op in reversed(self.steps)])

    def concat(self, other):
        if self.end != other.start:
            raise ValueError("row paths do not share an endpoint")
        return RowPath(self.rows + other.rows[1:], self.steps + other.steps)

    def to_json(self):
        return {"rows": [list(r.to_json()["entries"]) for r in self.rows], "steps": [op.to_json() for op in self.steps]}

    @classmethod
    def from_json(cls, ring, data):
        return cls([UmRow(ring, r) for r in data["rows"]], [ElementaryOp.from_json(ring, op) for op in data["steps"]])


def verify_row_path(p, constant_steps=False):
    """Replay a row path; optionally require every parameter to be a field constant."""
    if not p.rows or len(p.steps) != len(p.rows) - 1:
        return False
    for k, op in enumerate(p.steps):
        if constant_steps and isinstance(op.t.ring, PolyRing) and op.t.ring.constant_value(op.t) is None:
            return False
        try:
            if apply_right(p.rows[k].entries, op) != p.rows[k + 1].entries:
                return False
        except SizeMismatch:
            return False
    return True


def is_generic(a):
    return avoids_minimal_primes(a[a.n] * a[a.n + 1])


def _is_finite(ring):
    return isinstance(ring, IntegersMod) or (isinstance(ring, PolyRing) and ring.is_finite)


def _meets(ideal, required):
    h = height(ideal)
    return h is UNIT_IDEAL or h >= required, h


def _infinite_candidates(ring, rng, budget):
    """Zero, then growing integer boxes of constants, then low-degree elements."""
    yield ring.zero
    k = 0
    while k < budget:
        box = 1 + k // 8
        if k % 3 == 2 and isinstance(ring, PolyRing) and ring.variables:
            yield ring.random_element(rng, size=box, degree=1 + (k // 24) % 2, terms=2)
        else:
            yield ring.constant(ring.field.sample(rng, box))
        k += 1


def shift_search(targets, shifter, fixed=(), required=None, seed=0, budget=2000, label="shift"):
    """Coefficients ``lam`` such that ``(t_i + lam_i * shifter) + (fixed)`` has
    height at least ``required`` (default: number of generators) or is the
    unit ideal.

    Finite rings are searched exhaustively in a fixed order.  Otherwise one
    coefficient is chosen at a time, each raising the height of the partial
    ideal by one; if that greedy pass stalls, whole vectors are sampled.
    Every accepted candidate is validated by an exact height computation.
    """
    targets = list(targets)
    fixed = list(fixed)
    ring = shifter.ring
    if required is None:
        required = len(targets) + len(fixed)
    m = len(targets)

    def shifted(lam):
        return [t + c * shifter for t, c in zip(targets, lam)]

    if m == 0:
        if _meets(Ideal(ring, fixed), required)[0]:
            return []
        raise BudgetExhausted("no coefficients to choose and the fixed ideal is too small")

    if _is_finite(ring):
        elems = ring.elements()
        if len(elems) ** m > EXHAUSTIVE_LIMIT:
            raise TooLarge(f"{len(elems)}^{m} candidate shifts")
        for lam in product(elems, repeat=m):
            if _meets(Ideal(ring, shifted(lam) + fixed), required)[0]:
                return list(lam)
        raise HeightPreconditionFailed(f"no shift over the whole ring reaches height {required}")

    if not isinstance(ring, PolyRing):
        raise UnsupportedRing(f"shift search is not available for {ring.kind}")
    rng = derive_rng(seed, label)
    spent = 0
    if _meets(Ideal(ring, shifted([ring.zero] * m) + fixed), required)[0]:
        return [ring.zero] * m
    base = _meets(Ideal(ring, fixed), required)[1] if fixed else 0
    # a stage can be hopeless (e.g. a zero target with a zero shifter) while
    # the full ideal is fine, so no stage may starve the random fallback
    stage_budget = max(1, budget // (2 * m))
    lam = []
    for k in range(m):
        stage = min(required, base + k + 1)
        found = None
        for c in _infinite_candidates(ring, rng, min(stage_budget, budget - spent)):
            spent += 1
            if _meets(Ideal(ring, shifted(lam + [c]) + fixed), stage)[0]:
                found = c
                break
        if found is None:
            break
        lam.append(found)
        if _meets(Ideal(ring, shifted(lam) + fixed), required)[0]:
            return lam + [ring.zero] * (m - len(lam))
    while spent < budget:
        spent += 1
        box = 2 + spent // 16
        lam = [ring.constant(ring.field.sample(rng, box)) if rng.random() < 0.7
               else ring.random_element(rng, size=box, degree=2, terms=2) for _ in range(m)]
        if _meets(Ideal(ring, shifted(lam) + fixed), required)[0]:
            return lam
    raise BudgetExhausted(f"no valid shift within {budget} candidates")


def prime_avoidance(a, seed=0, budget=2000):
    """``lam`` with ``(a_1 + lam_1 a_{m+1}, ..., a_m + lam_m a_{m+1})`` of
    height at least m or equal to R."""
    a = list(a)
    if len(a) < 2:
        raise SizeMismatch("need at least two entries")
    solve_unimodular(a)
    return shift_search(a[:-1], a[-1], (), len(a) - 1, seed=seed, budget=budget, label="prime-avoidance")


def _require_infinite_coefficients(ring):
    if isinstance(ring, IntegersMod) or not isinstance(ring, PolyRing) or ring.field.is_finite:
        raise NotInfiniteField(f"{ring.kind} ring contains no declared infinite field")


def _small_constants(ring, limit):
    out = []
    for k in range(1, limit + 1):
        out.extend([ring.from_int(k), ring.from_int(-k)])
    return out


def make_generic(a, seed=0, budget=500):
    """A row path with constant parameters from ``a`` into the generic locus.

    Position n+1 is made to avoid the minimal primes first, then position n;
    a product of elements outside every minimal prime stays outside.
    """
    ring = a.ring
    _require_infinite_coefficients(ring)
    if is_generic(a):
        return RowPath([a], [])
    rng = derive_rng(seed, "make-generic")
    spent = 0
    rows, steps = [a], []
    for pos in (a.n + 1, a.n):
        cur = rows[-1]
        if avoids_minimal_primes(cur[pos]):
            continue
        sources = [i for i in range(1, a.n + 2) if i != pos]
        done = False
        for i in sources:
            for c in _small_constants(ring, 3):
                spent += 1
                op = ElementaryOp(i, pos, c)
                nxt = act(cur, op)
                if avoids_minimal_primes(nxt[pos]):
                    rows.append(nxt)
                    steps.append(op)
                    done = True
                    break
            if done:
                break
        while not done and spent < budget:
            spent += 1
            box = 2 + spent // 16
            ops = [ElementaryOp(i, pos, ring.constant(ring.field.sample(rng, box))) for i in sources]
            trial, nxt = [], cur
            for op in ops:
                if op.t.is_zero():
                    continue
                nxt = act(nxt, op)
                trial.append((nxt, op))
            if trial and avoids_minimal_primes(nxt[pos]):
                rows.extend(r for r, _ in trial)
                steps.extend(op for _, op in trial)
                done = True
        if not done:
            raise BudgetExhausted(f"could not move position {pos} off the minimal primes")
    path = RowPath(rows, steps)
    if not is_generic(path.end):
        raise InternalInvariantViolation("make_generic endpoint is not generic")
    return path
