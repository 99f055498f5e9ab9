"""Computable commutative rings with exact arithmetic and ideal operations.

Two engines back every ring kind:

* ``IntegersMod`` -- residues in ``[0, n)``; ideals are principal and all
  questions reduce to gcds.
* ``PolyRing`` -- a polynomial ring over a coefficient field, optionally
  modulo a relation ideal.  Zero variables gives the coefficient field itself,
  so rationals, prime fields and rational function fields are ``PolyRing``
  instances with kind labels of their own.  Elements are normal forms modulo
  a reduced grevlex Groebner basis of the relations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product
from math import gcd

from sympy import primefactors

from .errors import (
    MissingDimension,
    MissingMinimalPrimes,
    NotComaximal,
    NotUnimodular,
    ParseError,
    UnsupportedRing,
)
from .fields import PrimeField, RationalFunctionField, Rationals, field_from_json
from .parsing import parse_expression
from .polys import PolyAlgebra, grevlex_key


class _UnitIdeal:
    def __repr__(self):
        return "UnitIdeal"


UNIT_IDEAL = _UnitIdeal()


class RingElement:
    __slots__ = ("ring", "value")

    def __init__(self, ring, value):
        self.ring = ring
        self.value = value

    def _coerce(self, other):
        if isinstance(other, RingElement):
            if other.ring is not self.ring and other.ring != self.ring:
                raise TypeError(f"mixing elements of {self.ring} and {other.ring}")
            return other.value
        if isinstance(other, int):
            return self.ring.from_int(other).value
        return NotImplemented

    def __add__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return RingElement(self.ring, self.ring._add(self.value, v))

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return RingElement(self.ring, self.ring._sub(self.value, v))

    def __rsub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return RingElement(self.ring, self.ring._sub(v, self.value))

    def __mul__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return RingElement(self.ring, self.ring._mul(self.value, v))

    __rmul__ = __mul__

    def __neg__(self):
        return RingElement(self.ring, self.ring._neg(self.value))

    def __pow__(self, e):
        if not isinstance(e, int) or e < 0:
            raise ValueError("only nonnegative integer powers")
        out, base = self.ring.one, self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            return self.value == self.ring.from_int(other).value
        if not isinstance(other, RingElement):
            return NotImplemented
        return self.value == other.value and (self.ring is other.ring or self.ring == other.ring)

    def __hash__(self):
        return hash(self.value)

    def __str__(self):
        return self.ring.fmt(self.value)

    def __repr__(self):
        return f"RingElement({self})"

    def is_zero(self):
        return self.ring._is_zero(self.value)

    def inverse(self):
        return self.ring.inverse(self)

    def is_unit(self):
        try:
            self.ring.inverse(self)
        except NotUnimodular:
            return False
        return True


class Ring:
    kind = None

    @property
    def zero(self):
        return self.from_int(0)

    @property
    def one(self):
        return self.from_int(1)

    def __call__(self, x):
        if isinstance(x, RingElement):
            if x.ring != self:
                raise TypeError(f"element of {x.ring} given where {self} expected")
            return x
        if isinstance(x, bool):
            raise TypeError("booleans are not ring elements")
        if isinstance(x, int):
            return self.from_int(x)
        if isinstance(x, str):
            return self.parse(x)
        raise TypeError(f"cannot convert {x!r} into {self}")

    def parse(self, text):
        def divide(a, b):
            try:
                return a * b.inverse()
            except NotUnimodular as exc:
                raise ParseError(f"division by non-unit {b} in {text!r}") from exc

        return parse_expression(text, self.from_int, self._name, divide)

    @property
    def key(self):
        k = self.__dict__.get("_key")
        if k is None:
            k = json.dumps(self.to_json(), sort_keys=True)
            self.__dict__["_key"] = k
        return k

    def __eq__(self, other):
        return isinstance(other, Ring) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"<{self.kind} ring {self.key}>"

    def is_domain(self):
        return False

    def constant(self, c):
        """Embed an element of the coefficient field."""
        raise UnsupportedRing(f"{self.kind} has no coefficient field")

    def random_element(self, rng, size=3, degree=1, terms=3):
        raise NotImplementedError


class IntegersMod(Ring):
    kind = "integers-mod"
    coefficient_field = None
    infinite = False
    is_finite = True
    krull_dim = 0

    def __init__(self, n):
        n = int(n)
        if n < 2:
            raise ValueError("modulus must be at least 2")
        self.n = n

    def from_int(self, k):
        return RingElement(self, int(k) % self.n)

    def _name(self, name):
        raise ParseError(f"unknown symbol {name!r} in {self.kind}")

    def _add(self, a, b):
        return (a + b) % self.n

    def _sub(self, a, b):
        return (a - b) % self.n

    def _mul(self, a, b):
        return (a * b) % self.n

    def _neg(self, a):
        return (-a) % self.n

    def _is_zero(self, a):
        return a == 0

    def fmt(self, v):
        return str(v)

    def inverse(self, x):
        if gcd(x.value, self.n) != 1:
            raise NotUnimodular(f"{x} is not a unit modulo {self.n}")
        return RingElement(self, pow(x.value, -1, self.n))

    def elements(self):
        return [RingElement(self, k) for k in range(self.n)]

    @property
    def order(self):
        return self.n

    def minimal_prime_ideals(self):
        return [Ideal(self, [self.from_int(p)]) for p in primefactors(self.n)]

    def random_element(self, rng, size=3, degree=1, terms=3):
        return RingElement(self, rng.randrange(self.n))

    def to_json(self):
        return {"kind": self.kind, "modulus": self.n}

    # ideal operations
    def _ideal_gcd(self, gens):
        g = self.n
        for x in gens:
            g = gcd(g, x.value)
        return g

    def member(self, f, gens):
        return f.value % self._ideal_gcd(gens) == 0

    def solve(self, row):
        g, coeffs = 0, []
        for a in row:
            # g = sum(coeffs[i] * row[i]) over the integers
            x, s, t = _egcd(g, a.value)
            coeffs = [c * s for c in coeffs] + [t]
            g = x
        x, s, _ = _egcd(g, self.n)
        if x != 1:
            raise NotUnimodular(f"row generates the ideal ({x}) in Z/{self.n}")
        return [self.from_int(c * s) for c in coeffs]


def _egcd(a, b):
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


class PolyRing(Ring):
    def __init__(self, field, variables=(), relations=(), kind=None, krull_dim=None,
                 minimal_primes=None, infinite=None):
        self.field = field
        self.coefficient_field = field
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable names")
        if isinstance(field, RationalFunctionField) and field.var in self.variables:
            raise ValueError(f"variable {field.var!r} clashes with the coefficient field")
        self.alg = PolyAlgebra(field, len(self.variables))
        self._gb_cache = {}
        self._rel_gb = []
        if kind is None:
            kind = "quotient" if relations else ("polynomial-ring" if self.variables else _field_kind(field))
        self.kind = kind
        rels = [self.parse(r).value if isinstance(r, str) else r for r in relations]
        self._rel_gb = self.alg.groebner([dict(r) for r in rels]) if rels else []
        self.relations = tuple(RingElement(self, self.alg.freeze(dict(r))) for r in rels)
        if self._rel_gb and self.alg.staircase_dimension(self._rel_gb) < 0:
            raise ValueError("relations generate the unit ideal")
        computed = self.alg.staircase_dimension(self._rel_gb) if self._rel_gb else len(self.variables)
        if krull_dim is not None and int(krull_dim) != computed:
            raise ValueError(f"declared Krull dimension {krull_dim} disagrees with {computed}")
        self.krull_dim = computed
        if infinite is not None and bool(infinite) != (not field.is_finite):
            raise ValueError("declared 'infinite' flag disagrees with the coefficient field")
        self.infinite = not field.is_finite
        self.is_finite = field.is_finite and (not self.variables or self.krull_dim == 0)
        self._minimal = None
        if minimal_primes is not None:
            primes = []
            for gens in minimal_primes:
                lifted = [self.parse(g) if isinstance(g, str) else self(g) for g in gens]
                gb = self.alg.groebner([dict(g.value) for g in lifted])
                for r in self.relations:
                    if self.alg.reduce(dict(r.value), gb)[0]:
                        raise ValueError(f"declared minimal prime {[str(g) for g in lifted]} misses relation {r}")
                primes.append(Ideal(self, lifted))
            self._minimal = primes

    # element plumbing ------------------------------------------------
    def _norm(self, f):
        if self._rel_gb:
            f = self.alg.reduce(f, self._rel_gb)[0]
        return self.alg.freeze(f)

    def element(self, poly):
        return RingElement(self, self._norm(poly))

    def from_int(self, k):
        return RingElement(self, self._norm(self.alg.const(self.field.from_int(k))))

    def constant(self, c):
        return RingElement(self, self._norm(self.alg.const(c)))

    def gens(self):
        return [self.element(self.alg.var(i)) for i in range(len(self.variables))]

    def _name(self, name):
        if name in self.variables:
            return self.element(self.alg.var(self.variables.index(name)))
        if isinstance(self.field, RationalFunctionField) and name == self.field.var:
            return self.constant(self.field.gen())
        raise ParseError(f"unknown symbol {name!r}")

    def _add(self, a, b):
        return self.alg.freeze(self.alg.add(dict(a), dict(b)))

    def _sub(self, a, b):
        return self.alg.freeze(self.alg.sub(dict(a), dict(b)))

    def _neg(self, a):
        return self.alg.freeze(self.alg.neg(dict(a)))

    def _mul(self, a, b):
        return self._norm(self.alg.mul(dict(a), dict(b)))

    def _is_zero(self, a):
        return not a

    def is_domain(self):
        return not self.relations

    def fmt(self, v):
        K = self.field
        if not v:
            return "0"
        parts = []
        for mono, c in v:
            names = [n if e == 1 else f"{n}^{e}" for n, e in zip(self.variables, mono) if e]
            neg = K.is_negative(c)
            mag = K.neg(c) if neg else c
            if not names:
                body = K.fmt(mag)
            else:
                m = "*".join(names)
                if mag == K.one:
                    body = m
                else:
                    cs = K.fmt(mag)
                    body = f"{cs}*{m}" if K.is_atomic(mag) else f"({cs})*{m}"
            parts.append((neg, body))
        out = ("-" if parts[0][0] else "") + parts[0][1]
        for neg, body in parts[1:]:
            out += (" - " if neg else " + ") + body
        return out

    def constant_value(self, x):
        """The coefficient-field value of a constant element, else None."""
        v = x.value
        if not v:
            return self.field.zero
        if len(v) == 1 and sum(v[0][0]) == 0:
            return v[0][1]
        return None

    def degree(self, x):
        return max((sum(m) for m, _ in x.value), default=-1)

    def inverse(self, x):
        c = self.constant_value(x)
        if c is not None:
            if self.field.is_zero(c):
                raise NotUnimodular("zero is not a unit")
            return self.constant(self.field.inv(c))
        return self.solve([x])[0]

    # finite enumeration --------------------------------------------
    def elements(self):
        if not self.is_finite:
            raise UnsupportedRing(f"{self.kind} ring is infinite")
        monos = self.alg.standard_monomials(self._rel_gb) if self.variables else [self.alg.unit_mono]
        out = []
        for coeffs in product(self.field.elements(), repeat=len(monos)):
            poly = {m: c for m, c in zip(monos, coeffs) if c}
            out.append(self.element(poly))
        return out

    @property
    def order(self):
        return len(self.elements())

    def minimal_prime_ideals(self):
        if not self.relations:
            return [Ideal(self, [])]
        if self._minimal is None:
            raise MissingMinimalPrimes("quotient ring declares no minimal primes")
        return list(self._minimal)

    def random_element(self, rng, size=3, degree=1, terms=3):
        f = {}
        for _ in range(terms):
            mono = [0] * len(self.variables)
            for _ in range(rng.randint(0, degree) if self.variables else 0):
                mono[rng.randrange(len(self.variables))] += 1
            f = self.alg.add(f, {tuple(mono): self.field.sample(rng, size)})
        return self.element(f)

    def to_json(self):
        if self.kind in ("rationals", "prime-field", "rational-function-field"):
            return self.field.to_json()
        out = {"kind": self.kind, "field": self.field.to_json(), "vars": list(self.variables)}
        if self.kind == "quotient":
            out["relations"] = [str(r) for r in self.relations]
            if self._minimal is not None:
                out["minimal_primes"] = [[str(g) for g in P.gens] for P in self._minimal]
        return out

    # ideal operations --------------------------------------------------
    def _gb(self, gens):
        key = tuple(g.value for g in gens)
        gb = self._gb_cache.get(key)
        if gb is None:
            gb = self.alg.groebner([dict(v) for v in key] + list(self._rel_gb))
            self._gb_cache[key] = gb
        return gb

    def member(self, f, gens):
        if not f.value:
            return True
        if not gens:
            return False
        return not self.alg.reduce(dict(f.value), self._gb(gens))[0]

    def quotient_dimension(self, gens):
        gb = self._gb(gens) if gens else list(self._rel_gb)
        if not gb:
            return len(self.variables)
        return self.alg.staircase_dimension(gb)

    def solve(self, row):
        for i, a in enumerate(row):
            c = self.constant_value(a)
            if c is not None and not self.field.is_zero(c):
                out = [self.zero] * len(row)
                out[i] = self.constant(self.field.inv(c))
                return out
        inputs = [dict(a.value) for a in row] + [dict(r) for r in self._rel_gb]
        G, cof = self.alg.groebner(inputs, track=True)
        if not (len(G) == 1 and self.alg.is_const(G[0]) and G[0]):
            raise NotUnimodular("entries generate a proper ideal")
        return [self.element(c) for c in cof[0][: len(row)]]


def _field_kind(field):
    if isinstance(field, Rationals):
        return "rationals"
    if isinstance(field, PrimeField):
        return "prime-field"
    return "rational-function-field"


@dataclass(frozen=True)
class Ideal:
    ring: Ring
    gens: tuple

    def __init__(self, ring, gens):
        gens = tuple(ring(g) for g in gens)
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "gens", tuple(g for g in gens if not g.is_zero()))

    def __contains__(self, f):
        return ideal_membership(self.ring(f), self)

    def __str__(self):
        return "(" + ", ".join(str(g) for g in self.gens) + ")"


# -- constructors -----------------------------------------------------------

def rationals():
    return PolyRing(Rationals())


def prime_field(p):
    return PolyRing(PrimeField(p))


def integers_mod(n):
    return IntegersMod(n)


def rational_function_field(base=None, variable="t"):
    return PolyRing(RationalFunctionField(base or Rationals(), variable))


def polynomial_ring(field, variables):
    return PolyRing(field, variables)


def quotient_ring(field, variables, relations, minimal_primes=None, krull_dim=None):
    return PolyRing(field, variables, relations, kind="quotient", krull_dim=krull_dim,
                    minimal_primes=minimal_primes)


def ring_from_json(data):
    if not isinstance(data, dict) or "kind" not in data:
        raise ParseError("ring descriptor must be an object with a 'kind' field")
    kind = data["kind"]
    try:
        if kind == "integers-mod":
            ring = IntegersMod(data["modulus"])
            if data.get("krull_dim", 0) != 0 or data.get("infinite", False):
                raise ValueError("integers-mod rings are finite of dimension 0")
            return ring
        if kind in ("rationals", "prime-field", "rational-function-field"):
            ring = PolyRing(field_from_json(data), krull_dim=data.get("krull_dim"),
                            infinite=data.get("infinite"))
            return ring
        field = field_from_json(data.get("field", {"kind": "rationals"}))
        if kind == "polynomial-ring":
            return PolyRing(field, data["vars"], krull_dim=data.get("krull_dim"),
                            infinite=data.get("infinite"))
        if kind == "quotient":
            return PolyRing(field, data["vars"], data["relations"], kind="quotient",
                            krull_dim=data.get("krull_dim"), minimal_primes=data.get("minimal_primes"),
                            infinite=data.get("infinite"))
    except KeyError as exc:
        raise ParseError(f"ring descriptor of kind {kind!r} is missing field {exc.args[0]!r}") from exc
    except (TypeError, ValueError) as exc:
        raise ParseError(f"invalid ring descriptor: {exc}") from exc
    raise ParseError(f"unknown ring kind {kind!r}")


def ring_to_json(ring):
    out = dict(ring.to_json())
    out["krull_dim"] = ring.krull_dim
    out["infinite"] = ring.infinite
    return out


# -- ideal operations -------------------------------------------------------

def _same_ring(items):
    rings = {x.ring.key for x in items}
    if len(rings) > 1:
        raise TypeError("elements from different rings")


def solve_unimodular(row):
    """Coefficients ``x`` with ``sum(a*x) == 1`` or ``NotUnimodular``."""
    row = list(row)
    if not row:
        raise NotUnimodular("empty row")
    _same_ring(row)
    ring = row[0].ring
    if not hasattr(ring, "solve"):
        raise UnsupportedRing(f"no unimodularity solver for {ring.kind}")
    coeffs = ring.solve(row)
    total = ring.zero
    for a, x in zip(row, coeffs):
        total = total + a * x
    assert total == ring.one, "solver returned a wrong certificate"
    return coeffs


def groebner_basis(I):
    ring = I.ring
    if not isinstance(ring, PolyRing) or not ring.variables:
        if isinstance(ring, PolyRing):
            # a field: the reduced basis is (1) or empty
            return Ideal(ring, [ring.one] if I.gens else [])
        raise UnsupportedRing(f"Groebner bases need a polynomial ring, not {ring.kind}")
    gb = ring._gb(I.gens)
    elems = [ring.element(g) for g in gb]
    # drop the relation part: it normalizes to zero in the quotient
    return Ideal(ring, elems)


def ideal_membership(f, I):
    ring = I.ring
    if f.ring != ring:
        raise TypeError("element and ideal live in different rings")
    if not hasattr(ring, "member"):
        raise UnsupportedRing(f"membership is not decidable for {ring.kind}")
    return ring.member(f, I.gens)


def is_unit_ideal(I):
    return ideal_membership(I.ring.one, I)


def height(I):
    """Height of ``I`` or ``UNIT_IDEAL``.

    Computed as ``dim R - dim R/I`` which presumes an equidimensional,
    catenary ring.
    """
    ring = I.ring
    if ring.krull_dim is None:
        raise MissingDimension(f"{ring.kind} ring has no declared Krull dimension")
    if is_unit_ideal(I):
        return UNIT_IDEAL
    if isinstance(ring, IntegersMod):
        return 0
    if isinstance(ring, PolyRing):
        return ring.krull_dim - ring.quotient_dimension(I.gens)
    raise UnsupportedRing(f"height is not available for {ring.kind}")


def height_at_least(I, k):
    h = height(I)
    return h is UNIT_IDEAL or h >= k


def avoids_minimal_primes(f):
    ring = f.ring
    if isinstance(ring, IntegersMod):
        return all(f.value % p for p in primefactors(ring.n))
    if isinstance(ring, PolyRing):
        if ring.is_domain():
            return not f.is_zero()
        return not any(ideal_membership(f, P) for P in ring.minimal_prime_ideals())
    raise UnsupportedRing(f"no minimal prime data for {ring.kind}")


def comaximal(K, L):
    """Return ``(k, l)`` with ``k`` in K, ``l`` in L and ``k + l == 1``."""
    if K.ring != L.ring:
        raise TypeError("ideals of different rings")
    ring = K.ring
    gens = list(K.gens) + list(L.gens)
    if not gens:
        raise NotComaximal("both ideals are zero")
    try:
        x = solve_unimodular(gens)
    except NotUnimodular as exc:
        raise NotComaximal(f"{K} + {L} is a proper ideal") from exc
    k, l = ring.zero, ring.zero
    for i, (g, c) in enumerate(zip(gens, x)):
        if i < len(K.gens):
            k = k + g * c
        else:
            l = l + g * c
    return k, l


def ideal_sum(I, J):
    return Ideal(I.ring, list(I.gens) + list(J.gens))


def ideal_product(I, J):
    return Ideal(I.ring, [a * b for a in I.gens for b in J.gens])


def ideal_contains(I, J):
    """True iff J is a subset of I."""
    return all(ideal_membership(g, I) for g in J.gens)


def ideals_equal(I, J):
    return ideal_contains(I, J) and ideal_contains(J, I)


def element_key(x):
    """A deterministic sort key for elements."""
    if isinstance(x.ring, PolyRing):
        return tuple((grevlex_key(m), str(c)) for m, c in x.value)
    return x.value
