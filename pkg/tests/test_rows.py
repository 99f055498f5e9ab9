import random

from hypothesis import given, settings
from hypothesis import strategies as st
import pytest

from unimodular_lab.errors import NotInfiniteField, NotUnimodular, SizeMismatch
from unimodular_lab.fields import Rationals
from unimodular_lab.matrices import ElementaryOp
from unimodular_lab.rings import UNIT_IDEAL, Ideal, height, integers_mod, polynomial_ring, solve_unimodular
from unimodular_lab.rows import UmRow, act, is_generic, make_generic, prime_avoidance, verify_row_path

P = polynomial_ring(Rationals(), ["x", "y", "z"])
Z30 = integers_mod(30)


def test_row_certificate_examples():
    assert [str(x) for x in solve_unimodular([Z30(6), Z30(5)])] in (["1", "29"], ["1", "-1"])
    a = UmRow(P, ["x", "y", "z", "1+x"])
    assert a.certificate == tuple(P(v) for v in (-1, 0, 0, 1))
    with pytest.raises(NotUnimodular):
        UmRow(P, ["x", "y", "z", "x"])
    with pytest.raises(SizeMismatch):
        UmRow(P, ["1", "0", "0"])


def test_is_generic_examples():
    assert is_generic(UmRow(P, ["x", "y", "z", "1+x"]))
    assert is_generic(UmRow(Z30, [1, 0, 7, 11]))
    assert not is_generic(UmRow(Z30, [1, 0, 6, 7]))


def _revalidate(row, lam):
    m = len(row) - 1
    h = height(Ideal(row[0].ring, [a + c * row[-1] for a, c in zip(row[:-1], lam)]))
    return h is UNIT_IDEAL or h >= m


def test_prime_avoidance_examples():
    assert prime_avoidance([Z30(6), Z30(5)]) == [Z30(1)]
    P2 = polynomial_ring(Rationals(), ["x", "y"])
    assert prime_avoidance([P2("x"), P2("y"), P2(1)]) == [P2(0), P2(0)]
    row = [P(0), P(0), P(1), P(1)]
    assert _revalidate(row, prime_avoidance(row))


def test_make_generic_examples():
    g = UmRow(P, ["x", "y", "z", "1+x"])
    assert make_generic(g).steps == []
    path = make_generic(UmRow(P, [1, 0, 0, 0]))
    assert path.end == UmRow(P, [1, 0, 1, 1])
    assert is_generic(path.end) and verify_row_path(path, constant_steps=True)
    with pytest.raises(NotInfiniteField):
        make_generic(UmRow(Z30, [1, 0, 6, 0]))


def test_act_examples():
    a = UmRow(P, ["x", "y", "z", "1+x"])
    assert act(a, ElementaryOp(1, 2, P(0))) == a
    assert act(a, ElementaryOp(4, 1, P(1))) == UmRow(P, ["1+2*x", "y", "z", "1+x"])
    op = ElementaryOp(2, 3, P("x*y"))
    assert act(act(a, op), op.inverse()) == a


ops = st.tuples(st.integers(1, 4), st.integers(1, 4), st.integers(-3, 3), st.sampled_from(["1", "x", "y", "z", "x*y"]))


@settings(max_examples=80, deadline=None)
@given(st.lists(ops, min_size=1, max_size=8))
def test_act_keeps_certificates(seq):
    a = UmRow(P, [1, 0, 0, 0])
    for i, j, c, mono in seq:
        if i == j:
            continue
        a = act(a, ElementaryOp(i, j, c * P(mono)))
        # re-solving must succeed as well as the transported certificate
        solve_unimodular(a.entries)
    assert len(a) == 4


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([30, 36, 12]), st.lists(st.integers(0, 35), min_size=2, max_size=3), st.integers(0, 99))
def test_prime_avoidance_revalidates_finite(n, vals, seed):
    R = integers_mod(n)
    row = [R(v) for v in vals] + [R(1 + vals[0])]
    try:
        solve_unimodular(row)
    except NotUnimodular:
        return
    assert _revalidate(row, prime_avoidance(row, seed=seed))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_make_generic_reaches_locus(seed):
    rng = random.Random(seed)
    a = UmRow(P, [1, 0, 0, 0])
    for _ in range(3):
        i, j = rng.sample(range(1, 5), 2)
        a = act(a, ElementaryOp(i, j, P(rng.choice(["0", "x", "y", "1", "z"]))))
    path = make_generic(a, seed=seed)
    assert path.start == a and is_generic(path.end)
    assert verify_row_path(path, constant_steps=True)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([1, 7, 11, 13, 29]), st.integers(0, 29), st.integers(0, 29))
def test_generic_invariant_under_units(u, s, t):
    try:
        a = UmRow(Z30, [1, 0, s, t])
    except NotUnimodular:
        return
    b = UmRow(Z30, [1, 0, s * u, t])
    c = UmRow(Z30, [1, 0, s, t * u])
    assert is_generic(a) == is_generic(b) == is_generic(c)


def test_prime_avoidance_degenerate_stages():
    # the first partial ideal can never grow here, yet lam = 0 already gives R
    for row in (["0", "1", "0"], ["0", "1", "1 - 2*z", "0"], ["-y - 2", "0", "1", "y*z + 2*y + 2*z + 4"]):
        entries = [P(v) for v in row]
        assert _revalidate(entries, prime_avoidance(entries, budget=50))
