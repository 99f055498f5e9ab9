"""Euler-class data, the maps phi0 / phi on unimodular rows, and witness
chains for identities between formal sums of Euler data.

A witness chain starts from the terms of a left-hand formal sum and applies
steps one at a time; each step removes some terms and adds others, and is
only accepted if its exact algebraic side conditions hold (ideal equality,
membership modulo ``J^2``, comaximality certificates, ...).  The chain
proves ``lhs == rhs`` when the final terms match ``rhs`` literally: same
signs, same ideals, and residues congruent modulo ``J^2``.

Every step type works in both directions, so a chain can be inverted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    BudgetExhausted,
    DimensionHypothesisViolated,
    HeightPreconditionFailed,
    LabError,
    NotApplicable,
    NotGeneric,
    NotUnimodular,
    SizeMismatch,
    WitnessConstructionFailed,
)
from .matrices import ElementaryOp, apply_right
from .rings import (
    UNIT_IDEAL,
    Ideal,
    comaximal,
    height,
    ideal_contains,
    ideal_membership,
    ideal_product,
    ideals_equal,
    solve_unimodular,
)
from .rows import UmRow, act, is_generic, make_generic, shift_search
from .seeding import derive_seed

DEFAULT_BUDGET = 2000


# -- Euler data -----------------------------------------------------------------

@dataclass(frozen=True)
class EulerDatum:
    """``(J, omega)`` with ``J`` given by n generators and ``omega`` by n
    residues in ``J`` presenting a surjection ``(R/J)^n -> J/J^2``."""

    ring: object
    J: tuple
    omega: tuple

    def __post_init__(self):
        if len(self.J) != len(self.omega):
            raise SizeMismatch("J and omega need the same number of entries")

    @property
    def n(self):
        return len(self.J)

    @property
    def ideal(self):
        return Ideal(self.ring, self.J)

    def square(self):
        return ideal_product(self.ideal, self.ideal)

    def to_json(self):
        return {"J": [str(x) for x in self.J], "omega": [str(x) for x in self.omega]}

    @classmethod
    def from_json(cls, ring, data):
        return cls(ring, tuple(ring(x) for x in data["J"]), tuple(ring(x) for x in data["omega"]))

    def __str__(self):
        return f"(({', '.join(map(str, self.J))}), [{', '.join(map(str, self.omega))}])"


def datum_defect(d):
    """Why ``d`` is not a valid Euler datum, or None."""
    I = d.ideal
    h = height(I)
    if h is UNIT_IDEAL:
        return "J is the unit ideal"
    if h != d.n:
        return f"J has height {h}, expected {d.n}"
    for w in d.omega:
        if not ideal_membership(w, I):
            return f"omega entry {w} is not in J"
    gen_mod = Ideal(d.ring, list(d.omega) + list(d.square().gens))
    if not ideal_contains(gen_mod, I):
        return "omega does not generate J modulo J^2"
    return None


def congruent_mod_square(u, v, d):
    sq = d.square()
    return all(ideal_membership(x - y, sq) for x, y in zip(u, v))


def literally_equal(d, e):
    return (d.ring == e.ring and d.n == e.n and ideals_equal(d.ideal, e.ideal)
            and congruent_mod_square(d.omega, e.omega, d))


@dataclass
class FormalSum:
    terms: list = field(default_factory=list)

    def __add__(self, other):
        return FormalSum(list(self.terms) + list(other.terms))

    def __neg__(self):
        return FormalSum([(-s, d) for s, d in self.terms])

    def is_zero(self):
        return not self.terms

    def canonical(self):
        return sorted(self.terms, key=lambda sd: (sd[0], str(sd[1].to_json())))

    def to_json(self):
        return [{"sign": s, **d.to_json()} for s, d in self.canonical()]

    @classmethod
    def from_json(cls, ring, data):
        return cls([(int(t.get("sign", 1)), EulerDatum.from_json(ring, t)) for t in data])

    def __str__(self):
        if not self.terms:
            return "0"
        return " ".join(("+" if s > 0 else "-") + str(d) for s, d in self.canonical())


# -- phi0 -------------------------------------------------------------------------

def phi0_datum(entries):
    """The datum of ``(a_1..a_{n+1})``: ``J = (a_1..a_n)``, ``omega = (a_1..a_{n-1}, a_n a_{n+1})``.

    None when ``J`` is the unit ideal.
    """
    entries = tuple(entries)
    ring = entries[0].ring
    n = len(entries) - 1
    J = entries[:n]
    h = height(Ideal(ring, J))
    if h is UNIT_IDEAL:
        return None
    if h < n:
        raise HeightPreconditionFailed(f"(a_1..a_n) has height {h} < {n}")
    omega = J[: n - 1] + (entries[n - 1] * entries[n],)
    return EulerDatum(ring, J, omega)


def phi0(a):
    entries = a.entries if isinstance(a, UmRow) else tuple(a)
    d = phi0_datum(entries)
    return FormalSum([] if d is None else [(1, d)])


def _shift_head(a, coeffs, pivot):
    """``(a_k + c_k a_pivot)`` for ``k < n``."""
    return tuple(a[k] + c * a[pivot] for k, c in zip(range(1, a.n), coeffs))


def d1_entries(a, lam):
    """Row whose phi0 is the ``J_1`` term: ``(a_k + lam_k a_n, a_{n+1}, a_n)``."""
    return _shift_head(a, lam, a.n) + (a[a.n + 1], a[a.n])


def d2_entries(a, mu):
    """Row whose phi0 is the ``J_2`` term: ``(a_k + mu_k a_{n+1}, a_n, a_{n+1})``."""
    return _shift_head(a, mu, a.n + 1) + (a[a.n], a[a.n + 1])


def D1(a, lam):
    return phi0_datum(d1_entries(a, lam))


def D2(a, mu):
    return phi0_datum(d2_entries(a, mu))


def check_dimension(ring, n):
    d = ring.krull_dim
    if d is None or not (3 <= d <= 2 * n - 3):
        raise DimensionHypothesisViolated(f"need 3 <= d <= 2n-3, got d={d}, n={n}")


def choose_mu(a, seed, budget=DEFAULT_BUDGET, fixed_zero=None):
    """``mu`` with ``J_2 = (a_k + mu_k a_{n+1}, a_n)`` of height at least n or unit."""
    n = a.n
    idx = [k for k in range(1, n) if k != fixed_zero]
    fixed = [a[a.n]] + ([a[fixed_zero]] if fixed_zero else [])
    found = shift_search([a[k] for k in idx], a[n + 1], fixed, n, seed=seed, budget=budget,
                         label=f"mu:{fixed_zero}")
    mu = [a.ring.zero] * (n - 1)
    for k, c in zip(idx, found):
        mu[k - 1] = c
    return mu


def choose_lambda(a, seed, budget=DEFAULT_BUDGET, fixed_zero=None):
    """``lam`` with ``J_1 = (a_k + lam_k a_n, a_{n+1})`` of height at least n or unit."""
    n = a.n
    idx = [k for k in range(1, n) if k != fixed_zero]
    fixed = [a[n + 1]] + ([a[fixed_zero]] if fixed_zero else [])
    found = shift_search([a[k] for k in idx], a[n], fixed, n, seed=seed, budget=budget,
                         label=f"lambda:{fixed_zero}")
    lam = [a.ring.zero] * (n - 1)
    for k, c in zip(idx, found):
        lam[k - 1] = c
    return lam


@dataclass
class PhiValue:
    row: UmRow
    mu: list
    value: FormalSum
    path: object = None

    def to_json(self):
        out = {"row": self.row.to_json(), "mu": [str(x) for x in self.mu], "value": self.value.to_json()}
        if self.path is not None:
            out["path"] = self.path.to_json()
        return out


def phi_generic(a, seed=0, budget=DEFAULT_BUDGET):
    check_dimension(a.ring, a.n)
    if not is_generic(a):
        raise NotGeneric("a_n * a_{n+1} lies in a minimal prime")
    mu = choose_mu(a, seed, budget)
    d = D2(a, mu)
    return PhiValue(a, mu, FormalSum([] if d is None else [(1, d)]))


def phi(a, seed=0, budget=DEFAULT_BUDGET):
    check_dimension(a.ring, a.n)
    path = make_generic(a, seed=derive_seed(seed, "path"), budget=budget)
    val = phi_generic(path.end, seed, budget)
    val.path = path
    return val


# -- witness steps ------------------------------------------------------------------

class StepRejected(Exception):
    pass


def _take(state, sign, d, what):
    for k, (s, e) in enumerate(state):
        if s == sign and literally_equal(e, d):
            return state.pop(k)
    raise StepRejected(f"{what} {'+' if sign > 0 else '-'}{d} is not a term of the current sum")


def _require_valid(d, what):
    why = datum_defect(d)
    if why is not None:
        raise StepRejected(f"{what}: {why}")


@dataclass
class ElementaryAction:
    """``s (J, omega) -> s (J, omega g)`` for ``g`` a product of elementary
    matrices; ``target`` may use other generators of the same ideal."""

    sign: int
    source: EulerDatum
    target: EulerDatum
    ops: list
    inverses: list = field(default_factory=list)
    type = "elementary-action"

    def inverse(self):
        return ElementaryAction(self.sign, self.target, self.source,
                                [op.inverse() for op in reversed(self.ops)], self.inverses)

    def apply(self, state):
        _take(state, self.sign, self.source, "source")
        src, tgt = self.source, self.target
        if tgt.n != src.n:
            raise StepRejected("source and target sizes differ")
        if not ideals_equal(src.ideal, tgt.ideal):
            raise StepRejected("source and target ideals differ")
        for x, u in self.inverses:
            if not ideal_membership(x * u - 1, src.ideal):
                raise StepRejected(f"{u} is not an inverse of {x} modulo J")
        w = src.omega
        try:
            for op in self.ops:
                w = apply_right(w, op)
        except SizeMismatch as exc:
            raise StepRejected(str(exc)) from None
        if not congruent_mod_square(w, tgt.omega, src):
            raise StepRejected("target omega differs from omega * g modulo J^2")
        state.append((self.sign, tgt))

    def to_json(self):
        return {"type": self.type, "sign": self.sign, "source": self.source.to_json(),
                "target": self.target.to_json(), "ops": [op.to_json() for op in self.ops],
                "inverses": [[str(x), str(u)] for x, u in self.inverses]}

    @classmethod
    def from_json(cls, ring, data):
        return cls(int(data["sign"]), EulerDatum.from_json(ring, data["source"]),
                   EulerDatum.from_json(ring, data["target"]),
                   [ElementaryOp.from_json(ring, op) for op in data["ops"]],
                   [(ring(x), ring(u)) for x, u in data.get("inverses", [])])


@dataclass
class DisconnectedSum:
    """``s (J, w_J) <-> s (K, w_K) + s (L, w_L)`` for comaximal ``K``, ``L``
    with ``J = K L`` and ``w_J`` reducing to ``w_K``, ``w_L``."""

    sign: int
    whole: EulerDatum
    K: EulerDatum
    L: EulerDatum
    k: object
    l: object
    mode: str = "merge"
    type = "disconnected-sum"

    def inverse(self):
        mode = "split" if self.mode == "merge" else "merge"
        return DisconnectedSum(self.sign, self.whole, self.K, self.L, self.k, self.l, mode)

    def _check(self):
        J, K, L = self.whole.ideal, self.K.ideal, self.L.ideal
        if self.k + self.l != self.k.ring.one:
            raise StepRejected("comaximality certificate: k + l != 1")
        if not ideal_membership(self.k, K) or not ideal_membership(self.l, L):
            raise StepRejected("comaximality certificate: k not in K or l not in L")
        KL = ideal_product(K, L)
        if not (ideal_contains(KL, J) and ideal_contains(J, KL)):
            raise StepRejected("J differs from K L")
        if not congruent_mod_square(self.whole.omega, self.K.omega, self.K):
            raise StepRejected("omega_J does not reduce to omega_K")
        if not congruent_mod_square(self.whole.omega, self.L.omega, self.L):
            raise StepRejected("omega_J does not reduce to omega_L")

    def apply(self, state):
        if self.mode == "merge":
            _take(state, self.sign, self.K, "part")
            _take(state, self.sign, self.L, "part")
            _require_valid(self.whole, "merged datum")
            self._check()
            state.append((self.sign, self.whole))
        elif self.mode == "split":
            _take(state, self.sign, self.whole, "whole")
            _require_valid(self.K, "first part")
            _require_valid(self.L, "second part")
            self._check()
            state.extend([(self.sign, self.K), (self.sign, self.L)])
        else:
            raise StepRejected(f"unknown mode {self.mode!r}")

    def to_json(self):
        return {"type": self.type, "mode": self.mode, "sign": self.sign, "whole": self.whole.to_json(),
                "parts": [self.K.to_json(), self.L.to_json()], "k": str(self.k), "l": str(self.l)}

    @classmethod
    def from_json(cls, ring, data):
        K, L = data["parts"]
        return cls(int(data["sign"]), EulerDatum.from_json(ring, data["whole"]), EulerDatum.from_json(ring, K),
                   EulerDatum.from_json(ring, L), ring(data["k"]), ring(data["l"]), data.get("mode", "merge"))


@dataclass
class CompleteIntersection:
    """``s (J, omega) <-> 0`` when ``omega`` lifts to generators of ``J``."""

    sign: int
    datum: EulerDatum
    lift: tuple
    mode: str = "remove"
    type = "complete-intersection"

    def inverse(self):
        return CompleteIntersection(self.sign, self.datum, self.lift,
                                    "introduce" if self.mode == "remove" else "remove")

    def apply(self, state):
        d = self.datum
        if self.mode == "remove":
            _take(state, self.sign, d, "datum")
        elif self.mode == "introduce":
            _require_valid(d, "introduced datum")
        else:
            raise StepRejected(f"unknown mode {self.mode!r}")
        if len(self.lift) != d.n:
            raise StepRejected("lift has the wrong length")
        if not congruent_mod_square(self.lift, d.omega, d):
            raise StepRejected("lift does not reduce to omega modulo J^2")
        if not ideals_equal(Ideal(d.ring, self.lift), d.ideal):
            raise StepRejected("lift does not generate J")
        if self.mode == "introduce":
            state.append((self.sign, d))

    def to_json(self):
        return {"type": self.type, "mode": self.mode, "sign": self.sign, "datum": self.datum.to_json(),
                "lift": [str(x) for x in self.lift]}

    @classmethod
    def from_json(cls, ring, data):
        return cls(int(data["sign"]), EulerDatum.from_json(ring, data["datum"]),
                   tuple(ring(x) for x in data["lift"]), data.get("mode", "remove"))


@dataclass
class LiteralCancel:
    """``d + (-d) <-> 0``."""

    datum: EulerDatum
    mode: str = "cancel"
    type = "literal-cancel"

    def inverse(self):
        return LiteralCancel(self.datum, "introduce" if self.mode == "cancel" else "cancel")

    def apply(self, state):
        if self.mode == "cancel":
            _take(state, 1, self.datum, "positive term")
            _take(state, -1, self.datum, "negative term")
        elif self.mode == "introduce":
            _require_valid(self.datum, "introduced datum")
            state.extend([(1, self.datum), (-1, self.datum)])
        else:
            raise StepRejected(f"unknown mode {self.mode!r}")

    def to_json(self):
        return {"type": self.type, "mode": self.mode, "datum": self.datum.to_json()}

    @classmethod
    def from_json(cls, ring, data):
        return cls(EulerDatum.from_json(ring, data["datum"]), data.get("mode", "cancel"))


STEP_TYPES = {cls.type: cls for cls in (ElementaryAction, DisconnectedSum, CompleteIntersection, LiteralCancel)}


def invert_chain(chain):
    return [step.inverse() for step in reversed(chain)]


@dataclass
class RelationWitness:
    lhs: FormalSum
    rhs: FormalSum
    chain: list
    notes: dict = field(default_factory=dict)

    def inverse(self):
        return RelationWitness(self.rhs, self.lhs, invert_chain(self.chain), dict(self.notes))

    def then(self, other):
        return RelationWitness(self.lhs, other.rhs, self.chain + other.chain, {**self.notes, **other.notes})

    def to_json(self):
        return {"lhs": self.lhs.to_json(), "rhs": self.rhs.to_json(),
                "chain": [s.to_json() for s in self.chain], "notes": self.notes}

    @classmethod
    def from_json(cls, ring, data):
        chain = []
        for k, s in enumerate(data.get("chain", [])):
            kind = s.get("type")
            if kind not in STEP_TYPES:
                raise ValueError(f"step {k}: unknown type {kind!r}")
            chain.append(STEP_TYPES[kind].from_json(ring, s))
        return cls(FormalSum.from_json(ring, data.get("lhs", [])), FormalSum.from_json(ring, data.get("rhs", [])),
                   chain, data.get("notes", {}))


def replay(chain, lhs, rhs):
    """``(True, None, None)`` or ``(False, step_index, reason)``.

    A failing index equal to ``len(chain)`` means every step applied but the
    final sum does not match ``rhs``; index -1 flags an invalid lhs term.
    """
    for s, d in lhs.terms:
        why = datum_defect(d)
        if why is not None:
            return False, -1, f"lhs term {d}: {why}"
    state = list(lhs.terms)
    for idx, step in enumerate(chain):
        try:
            step.apply(state)
        except StepRejected as exc:
            return False, idx, str(exc)
        except (LabError, ArithmeticError, TypeError, ValueError) as exc:
            return False, idx, f"{type(exc).__name__}: {exc}"
    remaining = list(state)
    for s, d in rhs.terms:
        try:
            _take(remaining, s, d, "rhs term")
        except StepRejected as exc:
            return False, len(chain), str(exc)
    if remaining:
        return False, len(chain), f"{len(remaining)} unmatched terms remain"
    return True, None, None


def verify_witness(w, lhs=None, rhs=None):
    chain = w.chain if isinstance(w, RelationWitness) else w
    lhs = w.lhs if lhs is None else lhs
    rhs = w.rhs if rhs is None else rhs
    return replay(chain, lhs, rhs)[0]


# -- constructions ----------------------------------------------------------------------

def _inverse_mod(x, d):
    """``u`` with ``x u - 1`` in ``J``."""
    try:
        return solve_unimodular([x] + list(d.J))[0]
    except NotUnimodular:
        raise WitnessConstructionFailed(f"{x} is not invertible modulo {d.ideal}") from None


def _sum_of(*data):
    return FormalSum([(1, d) for d in data if d is not None])


def _checked(w):
    ok, idx, why = replay(w.chain, w.lhs, w.rhs)
    if not ok:
        raise WitnessConstructionFailed(f"step {idx}: {why}")
    return w


def lemma_chain(a, lam, mu):
    """Steps taking ``D1(a, lam) + D2(a, mu)`` to 0."""
    n, ring = a.n, a.ring
    try:
        X, Z = D1(a, lam), D2(a, mu)
    except HeightPreconditionFailed as exc:
        raise WitnessConstructionFailed(f"shift data invalid: {exc}") from None
    c = tuple(a[k] + lam[k - 1] * a[n] + mu[k - 1] * a[n + 1] for k in range(1, n))
    chain = []
    parts = []
    if X is not None:
        X2 = phi0_datum(c + (a[n + 1], a[n]))
        u = _inverse_mod(a[n], X)
        ops = [ElementaryOp(n, k, mu[k - 1] * u) for k in range(1, n) if not mu[k - 1].is_zero()]
        if ops:
            chain.append(ElementaryAction(1, X, X2, ops, [(a[n], u)]))
        parts.append(X2)
    if Z is not None:
        Z2 = phi0_datum(c + (a[n], a[n + 1]))
        u = _inverse_mod(a[n + 1], Z)
        ops = [ElementaryOp(n, k, lam[k - 1] * u) for k in range(1, n) if not lam[k - 1].is_zero()]
        if ops:
            chain.append(ElementaryAction(1, Z, Z2, ops, [(a[n + 1], u)]))
        parts.append(Z2)
    if not parts:
        return chain
    merged_entries = c + (a[n + 1] * a[n], ring.one)
    M = phi0_datum(merged_entries)
    if M is None:
        raise WitnessConstructionFailed("merged ideal is unexpectedly the unit ideal")
    if len(parts) == 2:
        k, l = comaximal(parts[0].ideal, parts[1].ideal)
        chain.append(DisconnectedSum(1, M, parts[0], parts[1], k, l, "merge"))
        target = M
    else:
        target = parts[0]
    chain.append(CompleteIntersection(1, target, M.omega, "remove"))
    return chain


def lemma_vanishing_witness(a, lam, mu):
    X, Z = D1(a, lam), D2(a, mu)
    w = RelationWitness(_sum_of(X, Z), FormalSum(), lemma_chain(a, lam, mu),
                        {"lambda": [str(x) for x in lam], "mu": [str(x) for x in mu]})
    return _checked(w)


def mu_change_chain(a, mu1, mu2, lam):
    """Steps taking ``D2(a, mu1)`` to ``D2(a, mu2)`` through ``-D1(a, lam)``."""
    if list(mu1) == list(mu2):
        return []
    X = D1(a, lam)
    chain = []
    if X is not None:
        chain.append(LiteralCancel(X, "introduce"))
    chain += lemma_chain(a, lam, mu1)
    chain += invert_chain(lemma_chain(a, lam, mu2))
    if X is not None:
        chain.append(LiteralCancel(X, "cancel"))
    return chain


def mu_independence_witness(a, mu1, mu2, seed=0, budget=DEFAULT_BUDGET):
    lam = choose_lambda(a, seed, budget)
    w = RelationWitness(_sum_of(D2(a, mu1)), _sum_of(D2(a, mu2)), mu_change_chain(a, mu1, mu2, lam),
                        {"lambda": [str(x) for x in lam]})
    return _checked(w)


def swap_last(a):
    e = a.entries
    return UmRow(a.ring, e[:-2] + (e[-1], e[-2]))


def antisymmetry_witness(a, seed=0, budget=DEFAULT_BUDGET):
    """Witness for ``phi(a) + phi(a with the last two entries swapped) = 0``."""
    pa = phi_generic(a, seed, budget)
    pb = phi_generic(swap_last(a), seed, budget)
    # phi of the swapped row is exactly the J_1 term of a with lam = its mu
    w = RelationWitness(pa.value + pb.value, FormalSum(), lemma_chain(a, pb.mu, pa.mu),
                        {"mu": [str(x) for x in pa.mu], "lambda": [str(x) for x in pb.mu]})
    return _checked(w)


# -- invariance along elementary moves -------------------------------------------------

class _PhiCache:
    def __init__(self, seed, budget):
        self.seed, self.budget = seed, budget
        self.mu, self.lam = {}, {}

    def mu_of(self, a):
        if a.entries not in self.mu:
            self.mu[a.entries] = phi_generic(a, self.seed, self.budget).mu
        return self.mu[a.entries]

    def lam_of(self, a):
        if a.entries not in self.lam:
            self.lam[a.entries] = choose_lambda(a, self.seed, self.budget)
        return self.lam[a.entries]


def _ea_step(sign, src, tgt, ops, inverses):
    if src is None and tgt is None:
        return []
    if src is None or tgt is None:
        raise WitnessConstructionFailed("elementary action between a zero and a nonzero datum")
    ops = [op for op in ops if not op.t.is_zero()]
    return [ElementaryAction(sign, src, tgt, ops, inverses)]


def _step_chain(a, op, cache, depth=0):
    """Steps from ``phi(a)`` to ``phi(a op)`` (both generic)."""
    n = a.n
    i, j, r = op.i, op.j, op.t
    b = act(a, op)
    if r.is_zero() or a == b:
        return []
    mu_a, mu_b = cache.mu_of(a), cache.mu_of(b)

    def finish(row, mu_now):
        return mu_change_chain(row, mu_now, mu_b, cache.lam_of(row))

    if j < n:
        if i < n:
            mu2 = list(mu_a)
            mu2[j - 1] = mu_a[j - 1] + r * mu_a[i - 1]
            src, tgt = D2(a, mu_a), D2(b, mu2)
            return _ea_step(1, src, tgt, [ElementaryOp(i, j, r)], []) + finish(b, mu2)
        if i == n:
            src, tgt = D2(a, mu_a), D2(b, mu_a)
            if src is None:
                return finish(b, mu_a)
            u = _inverse_mod(a[n + 1], src)
            return _ea_step(1, src, tgt, [ElementaryOp(n, j, r * u)], [(a[n + 1], u)]) + finish(b, mu_a)
        mu2 = list(mu_a)
        mu2[j - 1] = mu_a[j - 1] - r
        # D2(b, mu2) is literally D2(a, mu_a)
        return finish(b, mu2)
    if j == n + 1 and i == n:
        src, tgt = D2(a, mu_a), D2(b, mu_a)
        if src is None:
            return finish(b, mu_a)
        u = _inverse_mod(a[n + 1], src)
        ops = [ElementaryOp(n, k, mu_a[k - 1] * r * u) for k in range(1, n)]
        return _ea_step(1, src, tgt, ops, [(a[n + 1], u)]) + finish(b, mu_a)
    if j == n and i == n + 1:
        def make_ops(lam, X):
            u = _inverse_mod(a[n], X)
            return [ElementaryOp(n, k, lam[k - 1] * r * u) for k in range(1, n)], [(a[n], u)]
        return _via_j1(a, b, cache, make_ops)
    if i < n and j == n + 1:
        return _core_with_premove(a, op, cache, depth, last=n, other=n + 1)
    if i < n and j == n:
        return _core_with_premove(a, op, cache, depth, last=n + 1, other=n)
    raise NotApplicable(f"no rule for e_{i},{j}")


def _via_j1(a, b, cache, make_ops, lam=None):
    """``phi(a) -> -D1(a) -> -D1(b) -> phi(b)`` for moves keeping ``J_1`` fixed."""
    lam = cache.lam_of(a) if lam is None else lam
    X, Y = D1(a, lam), D1(b, lam)
    chain = []
    if X is not None:
        chain.append(LiteralCancel(X, "introduce"))
    chain += lemma_chain(a, lam, cache.mu_of(a))
    if X is not None:
        ops, inverses = make_ops(lam, X)
        chain += _ea_step(-1, X, Y, ops, inverses)
    elif Y is not None:
        raise WitnessConstructionFailed("J_1 changed from unit to proper")
    chain += invert_chain(lemma_chain(b, lam, cache.mu_of(b)))
    if Y is not None:
        chain.append(LiteralCancel(Y, "cancel"))
    return chain


def _premove_candidates(ring, budget):
    yield ring.zero
    for k in range(1, budget):
        yield ring.from_int((k + 1) // 2 * (1 if k % 2 else -1))


def _core_with_premove(a, op, cache, depth, last, other):
    """Moves ``e_{p,other}(r)`` with ``p < n``.

    First ``a_p`` is replaced by ``a_p + nu a_last`` (a move of an
    already-handled kind) so that the shift with coefficient ``p`` set to 0
    is admissible; then ``a_other`` changes while the relevant ideal stays
    fixed.  Moving back afterwards uses two more handled moves.
    """
    n, ring = a.n, a.ring
    p, r = op.i, op.t
    pre_op = lambda nu: ElementaryOp(last, p, nu)
    for nu in _premove_candidates(ring, 40):
        c = act(a, pre_op(nu)) if not nu.is_zero() else a
        c2 = act(c, ElementaryOp(p, other, r))
        if not (is_generic(c2) and is_generic(c)):
            continue
        try:
            if other == n + 1:
                lam = choose_lambda(c, cache.seed, cache.budget, fixed_zero=p)
            else:
                mu_star = choose_mu(c, cache.seed, cache.budget, fixed_zero=p)
        except (BudgetExhausted, HeightPreconditionFailed):
            continue
        b = act(a, op)
        chain = []
        if not nu.is_zero():
            chain += _step_chain(a, pre_op(nu), cache, depth + 1)
        if other == n + 1:
            def make_ops(lam_, X):
                return [ElementaryOp(p, n, r * c[n])], []
            chain += _via_j1(c, c2, cache, make_ops, lam=lam)
        else:
            src, tgt = D2(c, mu_star), D2(c2, mu_star)
            chain += mu_change_chain(c, cache.mu_of(c), mu_star, cache.lam_of(c))
            chain += _ea_step(1, src, tgt, [ElementaryOp(p, n, r * c[n + 1])], [])
            chain += mu_change_chain(c2, mu_star, cache.mu_of(c2), cache.lam_of(c2))
        if not nu.is_zero():
            # c2 = b e_{last,p}(nu) e_{last,other}(r nu); undo both
            mid = act(c2, ElementaryOp(last, other, -r * nu))
            chain += _step_chain(c2, ElementaryOp(last, other, -r * nu), cache, depth + 1)
            chain += _step_chain(mid, ElementaryOp(last, p, -nu), cache, depth + 1)
            if act(mid, ElementaryOp(last, p, -nu)) != b:
                raise WitnessConstructionFailed("pre-move bookkeeping did not return to a e_ij(r)")
        return chain
    raise WitnessConstructionFailed(f"no admissible pre-move for e_{p},{other}")


def check_phi_step(a, op, seed=0, budget=DEFAULT_BUDGET):
    """Witness that ``phi(a) == phi(a op)`` for ``a`` and ``a op`` generic."""
    check_dimension(a.ring, a.n)
    b = act(a, op)
    if not is_generic(a) or not is_generic(b):
        raise NotApplicable("both endpoints must be generic")
    cache = _PhiCache(seed, budget)
    lhs = phi_generic(a, seed, budget)
    rhs = phi_generic(b, seed, budget)
    chain = _step_chain(a, op, cache)
    w = RelationWitness(lhs.value, rhs.value, chain,
                        {"op": op.to_json(), "mu_lhs": [str(x) for x in lhs.mu], "mu_rhs": [str(x) for x in rhs.mu]})
    return _checked(w)


# -- homomorphism -------------------------------------------------------------------------

def _hom_adjust(a, b, seed, budget):
    """Shift the first n entries by multiples of ``a_{n+1}`` (the first entry
    of b by the opposite multiple) until both phi0 values are defined."""
    from .seeding import derive_rng

    n, ring = a.n, a.ring
    rng = derive_rng(seed, "hom-adjust")
    last = a[n + 1]
    for attempt in range(budget):
        if attempt == 0:
            mu = [ring.zero] * n
        else:
            box = 1 + attempt // 16
            mu = [ring.constant(ring.field.sample(rng, box)) if hasattr(ring, "field") else ring.random_element(rng)
                  for _ in range(n)]
        ea = (a[1] + mu[0] * last,) + tuple(a[k] + mu[k - 1] * last for k in range(2, n + 1)) + (last,)
        eb = (b[1] - mu[0] * last,) + ea[1:]
        try:
            phi0_datum(ea)
            phi0_datum(eb)
        except HeightPreconditionFailed:
            continue
        return mu, UmRow(ring, ea), UmRow(ring, eb)
    raise BudgetExhausted("no adjustment makes phi0 defined on both rows")


def hom_check(a, b, seed=0, budget=DEFAULT_BUDGET):
    """Witness for ``phi0(a) + phi0(b) = phi0((a_1 b_1, a_2, ..., a_{n+1}))``
    after the adjustment that makes all three defined."""
    if a.ring != b.ring or len(a) != len(b):
        raise SizeMismatch("rows must share ring and length")
    if a[1] + b[1] != a.ring.one or a.entries[1:] != b.entries[1:]:
        raise WitnessConstructionFailed("rows are not normalized: need a_1 + b_1 = 1 and equal tails")
    n = a.n
    mu, a2, b2 = _hom_adjust(a, b, seed, budget)
    prod = (a2[1] * b2[1],) + a2.entries[1:]
    K, L, M = phi0_datum(a2.entries), phi0_datum(b2.entries), phi0_datum(prod)
    lhs, rhs = _sum_of(K, L), _sum_of(M)
    chain = []
    if K is not None and L is not None:
        chain.append(DisconnectedSum(1, M, K, L, a2[1], b2[1], "merge"))
    notes = {
        "adjustment": [str(x) for x in mu],
        "a": [str(x) for x in a2.entries],
        "b": [str(x) for x in b2.entries],
        "product": [str(x) for x in prod],
        "dimension_hypothesis": a.ring.krull_dim is not None and 3 <= a.ring.krull_dim <= 2 * n - 3,
    }
    return _checked(RelationWitness(lhs, rhs, chain, notes))
