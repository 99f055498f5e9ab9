import pytest

from unimodular_lab.fields import PrimeField, Rationals
from unimodular_lab.matrices import ElementaryOp, product_of_ops
from unimodular_lab.rings import integers_mod, polynomial_ring, prime_field, quotient_ring, rationals
from unimodular_lab.rows import UmRow, act, is_generic


def finite_rings():
    """The five small rings used by the exhaustive orbit oracles."""
    return {
        "Z/4": integers_mod(4),
        "Z/6": integers_mod(6),
        "F2": prime_field(2),
        "F3": prime_field(3),
        "F2[x]/(x^2)": quotient_ring(PrimeField(2), ["x"], ["x^2"], minimal_primes=[["x"]]),
    }


@pytest.fixture(scope="session")
def Q():
    return rationals()


@pytest.fixture(scope="session")
def P():
    return polynomial_ring(Rationals(), ["x", "y", "z"])


def random_sl(ring, size, rng, length=12, box=3):
    ops = []
    for _ in range(length):
        i, j = rng.sample(range(1, size + 1), 2)
        ops.append(ElementaryOp(i, j, ring(rng.randint(-box, box))))
    return product_of_ops(ring, size, ops)


def _linear(P, rng):
    c = lambda: rng.choice([-2, -1, 1, 2, 3])
    x, y, z = P.gens()
    return c() * x * rng.randint(0, 1) + c() * y * rng.randint(0, 1) + c() * z


def proper_ideal_row(P, rng):
    """A generic row ``(l1, l2, l3, 1 + sum l_i h_i)`` whose first three
    entries are linear forms generating an ideal of height 3.

    Rows reached from e_1 by a few random moves tend to have unit-ideal
    Euler data, which makes witnesses trivially empty; this family keeps
    the data proper.
    """
    from unimodular_lab.rings import Ideal, height

    x, y, z = P.gens()
    while True:
        ls = [_linear(P, rng) if k < 2 else None for k in range(3)]
        ls[0] = ls[0] + rng.choice([-1, 1, 2]) * x
        ls[1] = ls[1] + rng.choice([-1, 1, 2]) * y
        ls[2] = rng.choice([-1, 1, 3]) * z + rng.randint(-1, 1) * x
        if height(Ideal(P, ls)) != 3:
            continue
        last = P.one
        for l in ls:
            last = last + rng.choice([-1, 0, 1]) * l
        try:
            row = UmRow(P, ls + [last])
        except Exception:
            continue
        if is_generic(row):
            return row


def in_locus_path(a, rng, steps=3):
    """Random ops keeping every row generic; returns ``[(row, op), ...]``."""
    P = a.ring
    out = []
    cur = a
    tries = 0
    while len(out) < steps and tries < 200:
        tries += 1
        i, j = rng.sample(range(1, 5), 2)
        t = P(rng.choice([1, -1, 2])) if rng.random() < 0.6 else _linear(P, rng)
        op = ElementaryOp(i, j, t)
        nxt = act(cur, op)
        if is_generic(nxt):
            out.append((cur, op))
            cur = nxt
    return out
