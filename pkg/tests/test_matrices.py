import random

from hypothesis import given, settings
from hypothesis import strategies as st
import pytest

from unimodular_lab.errors import NotGenericPosition, NotSL
from unimodular_lab.matrices import (
    ElementaryOp,
    RootSchedule,
    SqMatrix,
    apply_right,
    matrix_to_params,
    params_to_matrix,
    product_of_ops,
    reduce_generic,
)
from unimodular_lab.rings import rationals

from conftest import random_sl

Q = rationals()


def M(rows):
    return SqMatrix(Q, rows)


def test_right_action_on_rows_and_matrices():
    row = tuple(Q(v) for v in (1, 2, 3, 4))
    # e_{21}(r) adds r times entry 2 to entry 1
    assert apply_right(row, ElementaryOp(2, 1, Q(5))) == tuple(Q(v) for v in (11, 2, 3, 4))
    assert apply_right(SqMatrix.identity(Q, 2), ElementaryOp(1, 2, Q(5))) == M([[1, 5], [0, 1]])
    assert apply_right(M([[1, 1], [1, 2]]), ElementaryOp(1, 2, Q(-1))) == M([[1, 0], [1, 1]])


def test_reduce_identity_uses_zero_steps():
    ops = reduce_generic(SqMatrix.identity(Q, 3))
    assert len(ops) == 8
    assert all(op.t.is_zero() for op in ops)


def test_reduce_small_examples():
    g = M([[1, 1], [1, 2]])
    ops = reduce_generic(g)
    assert [(op.i, op.j, str(op.t)) for op in ops] == [(2, 1, "0"), (1, 2, "-1"), (2, 1, "-1")]
    assert product_of_ops(Q, 2, ops) == g.inverse()
    w = M([[0, 1], [-1, 0]])
    ops = reduce_generic(w)
    assert ops[0].t == Q(1)
    assert product_of_ops(Q, 2, ops) * w == SqMatrix.identity(Q, 2)


def test_reduce_rejects_non_sl():
    with pytest.raises(NotSL):
        reduce_generic(M([[2, 0], [0, 1]]))


def test_zero_pivot_reports_step():
    # g_11 != 1 and g_1s == 0: step 1 cannot be solved
    g = M([[2, 0, 0], [0, 1, 0], [0, 0, Q(1) * Q(2).inverse()]])
    with pytest.raises(NotGenericPosition) as exc:
        reduce_generic(g)
    assert exc.value.step == 1


def test_params_examples():
    sched = RootSchedule.for_size(3)
    assert len(sched) == 8
    assert params_to_matrix(sched, [Q(0)] * 8) == SqMatrix.identity(Q, 3)
    for k, (i, j) in enumerate(sched.positions):
        t = [Q(0)] * 8
        t[k] = Q(7)
        assert params_to_matrix(sched, t) == ElementaryOp(i, j, Q(7)).matrix(3)
    assert matrix_to_params(SqMatrix.identity(Q, 3)) == [Q(0)] * 8
    g = M([[1, 1], [1, 2]])
    assert params_to_matrix(RootSchedule.for_size(2), matrix_to_params(g)) == g


@pytest.mark.parametrize("size", [2, 3, 4, 5])
def test_reduction_length_and_product(size):
    rng = random.Random(size)
    for _ in range(10):
        g = random_sl(Q, size, rng)
        try:
            ops = reduce_generic(g)
        except NotGenericPosition:
            continue
        assert len(ops) == size * size - 1
        assert product_of_ops(Q, size, ops) == g.inverse()


fractions = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@settings(max_examples=60, deadline=None)
@given(st.lists(fractions, min_size=8, max_size=8))
def test_params_round_trip_property(vals):
    sched = RootSchedule.for_size(3)
    t = [Q(f"{v.numerator}/{v.denominator}") for v in vals]
    g = params_to_matrix(sched, t)
    assert g.det() == Q(1)
    try:
        back = matrix_to_params(g)
    except NotGenericPosition:
        return
    assert params_to_matrix(sched, back) == g


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(-9, 9))
def test_op_inverse_is_identity(i, j, t):
    if i == j:
        return
    op = ElementaryOp(i, j, Q(t))
    assert op.matrix(4) * op.inverse().matrix(4) == SqMatrix.identity(Q, 4)
