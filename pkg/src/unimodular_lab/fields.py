"""Coefficient fields: the rationals, prime fields and one-variable rational
function fields over either of those.

Field elements are plain hashable Python values (``Fraction``, ``int``, or a
``(numerator, denominator)`` pair of coefficient tuples); all the arithmetic
lives on the field object.
"""

from __future__ import annotations

from fractions import Fraction


class Field:
    characteristic = 0
    is_finite = False

    def from_int(self, k):
        raise NotImplementedError

    @property
    def zero(self):
        return self.from_int(0)

    @property
    def one(self):
        return self.from_int(1)

    def is_zero(self, x):
        return x == self.zero

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_negative(self, x):
        return False

    def is_atomic(self, x):
        """True when ``fmt(x)`` can be juxtaposed with ``*`` unparenthesized."""
        return True

    def __eq__(self, other):
        return isinstance(other, Field) and self.to_json() == other.to_json()

    def __hash__(self):
        return hash(repr(self.to_json()))

    def __repr__(self):
        return f"<{self.name}>"


class Rationals(Field):
    name = "QQ"

    def from_int(self, k):
        return Fraction(k)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a

    def div(self, a, b):
        if b == 0:
            raise ZeroDivisionError("division by zero")
        return a / b

    def is_zero(self, x):
        return x == 0

    def is_negative(self, x):
        return x < 0

    def fmt(self, x):
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"

    def sample(self, rng, size):
        return Fraction(rng.randint(-size, size))

    def to_json(self):
        return {"kind": "rationals"}


class PrimeField(Field):
    is_finite = True

    def __init__(self, p):
        p = int(p)
        if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.characteristic = p
        self.name = f"GF({p})"

    @property
    def order(self):
        return self.p

    def from_int(self, k):
        return int(k) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def is_zero(self, x):
        return x == 0

    def fmt(self, x):
        return str(x)

    def elements(self):
        return list(range(self.p))

    def sample(self, rng, size):
        return rng.randrange(self.p)

    def to_json(self):
        return {"kind": "prime-field", "modulus": self.p}


# univariate helpers for rational function fields; polynomials are tuples of
# base-field coefficients, lowest degree first, with no trailing zeros


def _trim(K, p):
    p = list(p)
    while p and K.is_zero(p[-1]):
        p.pop()
    return tuple(p)


def _uadd(K, f, g):
    n = max(len(f), len(g))
    z = K.zero
    return _trim(K, [K.add(f[i] if i < len(f) else z, g[i] if i < len(g) else z) for i in range(n)])


def _uneg(K, f):
    return tuple(K.neg(c) for c in f)


def _umul(K, f, g):
    if not f or not g:
        return ()
    out = [K.zero] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        for j, b in enumerate(g):
            out[i + j] = K.add(out[i + j], K.mul(a, b))
    return _trim(K, out)


def _udivmod(K, f, g):
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(f)
    q = [K.zero] * max(len(f) - len(g) + 1, 0)
    lc_inv = K.inv(g[-1])
    while len(r) >= len(g) and r:
        shift = len(r) - len(g)
        c = K.mul(r[-1], lc_inv)
        q[shift] = c
        for i, b in enumerate(g):
            r[shift + i] = K.sub(r[shift + i], K.mul(c, b))
        r = list(_trim(K, r))
    return _trim(K, q), tuple(r)


def _umonic(K, f):
    if not f:
        return f
    c = K.inv(f[-1])
    return tuple(K.mul(c, a) for a in f)


def _ugcd(K, f, g):
    while g:
        f, g = g, _udivmod(K, f, g)[1]
    return _umonic(K, f)


class RationalFunctionField(Field):
    """``base(t)``: fractions of univariate polynomials in ``var``."""

    def __init__(self, base, var="t"):
        if isinstance(base, RationalFunctionField):
            raise ValueError("nested rational function fields are not supported")
        self.base = base
        self.var = var
        self.characteristic = base.characteristic
        self.name = f"{base.name}({var})"

    def _make(self, num, den):
        K = self.base
        num, den = _trim(K, num), _trim(K, den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            return ((), (K.one,))
        g = _ugcd(K, num, den)
        if len(g) > 1:
            num = _udivmod(K, num, g)[0]
            den = _udivmod(K, den, g)[0]
        c = K.inv(den[-1])
        return (tuple(K.mul(c, a) for a in num), tuple(K.mul(c, a) for a in den))

    def from_int(self, k):
        return self._make((self.base.from_int(k),), (self.base.one,))

    def from_base(self, c):
        return self._make((c,), (self.base.one,))

    def gen(self):
        K = self.base
        return self._make((K.zero, K.one), (K.one,))

    def add(self, a, b):
        K = self.base
        if a[1] == b[1]:
            return self._make(_uadd(K, a[0], b[0]), a[1])
        return self._make(_uadd(K, _umul(K, a[0], b[1]), _umul(K, b[0], a[1])), _umul(K, a[1], b[1]))

    def neg(self, a):
        return (_uneg(self.base, a[0]), a[1])

    def mul(self, a, b):
        K = self.base
        return self._make(_umul(K, a[0], b[0]), _umul(K, a[1], b[1]))

    def inv(self, a):
        if not a[0]:
            raise ZeroDivisionError("inverse of zero")
        return self._make(a[1], a[0])

    def is_zero(self, x):
        return not x[0]

    def _fmt_poly(self, p):
        K = self.base
        terms = []
        for deg in range(len(p) - 1, -1, -1):
            c = p[deg]
            if K.is_zero(c):
                continue
            neg = K.is_negative(c)
            mag = K.neg(c) if neg else c
            if deg == 0:
                body = K.fmt(mag)
            else:
                mono = self.var if deg == 1 else f"{self.var}^{deg}"
                body = mono if mag == K.one else f"{K.fmt(mag)}*{mono}"
            terms.append((neg, body))
        if not terms:
            return "0"
        out = ("-" if terms[0][0] else "") + terms[0][1]
        for neg, body in terms[1:]:
            out += (" - " if neg else " + ") + body
        return out

    def fmt(self, x):
        num, den = x
        n = self._fmt_poly(num)
        if den == (self.base.one,):
            return n
        if len([c for c in num if not self.base.is_zero(c)]) > 1:
            n = f"({n})"
        d = self._fmt_poly(den)
        if len([c for c in den if not self.base.is_zero(c)]) > 1:
            d = f"({d})"
        return f"{n}/{d}"

    def is_atomic(self, x):
        num, den = x
        return den == (self.base.one,) and sum(1 for c in num if not self.base.is_zero(c)) <= 1

    def is_negative(self, x):
        num, den = x
        nonzero = [c for c in num if not self.base.is_zero(c)]
        return den == (self.base.one,) and len(nonzero) == 1 and self.base.is_negative(nonzero[0])

    def sample(self, rng, size):
        # polynomials in the variable with degree growing alongside the box
        degree = min(size // 4, 3)
        coeffs = [self.base.sample(rng, size) for _ in range(degree + 1)]
        return self._make(coeffs, (self.base.one,))

    def to_json(self):
        return {"kind": "rational-function-field", "field": self.base.to_json(), "variable": self.var}


def field_from_json(data):
    kind = data.get("kind")
    if kind == "rationals":
        return Rationals()
    if kind == "prime-field":
        return PrimeField(data["modulus"])
    if kind == "rational-function-field":
        return RationalFunctionField(field_from_json(data["field"]), data.get("variable", "t"))
    raise ValueError(f"not a coefficient field: {kind!r}")

