import json
from pathlib import Path

from hypothesis import given, settings
from hypothesis import strategies as st
import pytest

from unimodular_lab.errors import NormalizationNotFound
from unimodular_lab.fields import Rationals
from unimodular_lab.paths import OpenSet
from unimodular_lab.rings import integers_mod, polynomial_ring, prime_field
from unimodular_lab.rows import UmRow, verify_row_path
from unimodular_lab.wms import (
    FiniteRingTable,
    NormalizedPair,
    enumerate_orbits,
    generic_locus_report,
    group_law,
    is_normalized,
    normalize_pair,
    orbit_path,
    sl_path_components,
    verify_group_axioms,
)
from unimodular_lab.wms import _row_path_from_moves

from conftest import finite_rings

FIXTURES = json.loads((Path(__file__).parent / "fixtures" / "orbit_counts.json").read_text())
RINGS = finite_rings()


def test_small_orbit_examples():
    part = enumerate_orbits(integers_mod(4), 2)
    assert [len(c) for c in part.classes] == [12]
    part = enumerate_orbits(prime_field(2), 2)
    assert [len(c) for c in part.classes] == [3]


@pytest.mark.parametrize("name", sorted(RINGS))
def test_orbit_counts_match_fixture(name):
    part = enumerate_orbits(RINGS[name], 4)
    expected = FIXTURES[name]
    assert len(part.classes) == expected["orbit_count"]
    assert sorted(len(c) for c in part.classes) == expected["class_sizes"]


def test_partition_is_action_closed():
    R = integers_mod(6)
    part = enumerate_orbits(R, 4)
    table = FiniteRingTable(R)
    for row, cls in part.index.items():
        for i in range(4):
            for j in range(4):
                if i != j:
                    for r in range(len(table.elements)):
                        assert part.index[table.move(row, i, j, r)] == cls


def test_orbit_path_connects_class_members():
    part = enumerate_orbits(integers_mod(4), 4)
    rows = part.classes[0]
    moves = orbit_path(part, rows[0], rows[-1])
    table = part.table
    path = _row_path_from_moves(table, UmRow(table.ring, table.elems(rows[0])), moves)
    assert verify_row_path(path)
    assert path.end.entries == tuple(table.elems(rows[-1]))


def test_normalize_pair_examples():
    F5 = prime_field(5)
    pair = normalize_pair(UmRow(F5, [1, 0, 0, 0]), UmRow(F5, [0, 1, 0, 0]))
    assert is_normalized(pair.a, pair.b)
    assert pair.a_path.end == pair.a and pair.b_path.end == pair.b
    assert verify_row_path(pair.a_path) and verify_row_path(pair.b_path)
    pair = normalize_pair(UmRow(F5, [1, 0, 0, 0]), UmRow(F5, [1, 0, 0, 0]))
    assert is_normalized(pair.a, pair.b)
    a, b = UmRow(F5, [2, 1, 0, 0]), UmRow(F5, [4, 1, 0, 0])
    pair = normalize_pair(a, b)
    assert pair.a == a and pair.b == b and pair.a_path.steps == []


def test_normalize_pair_polynomial_ring():
    P = polynomial_ring(Rationals(), ["x", "y", "z"])
    pair = normalize_pair(UmRow(P, ["x", "y", "z", "1+x"]), UmRow(P, ["y", "x", "z^2", "1+z"]), seed=1)
    assert is_normalized(pair.a, pair.b)
    assert verify_row_path(pair.a_path) and verify_row_path(pair.b_path)


def test_group_law_examples():
    R = integers_mod(6)
    neutral = NormalizedPair(UmRow(R, [1, 2, 3, 5]), UmRow(R, [0, 2, 3, 5]))
    assert group_law(neutral) == neutral.b
    part = enumerate_orbits(R, 4)
    a, b = UmRow(R, [3, 1, 0, 4]), UmRow(R, [4, 1, 0, 4])
    prod = group_law(NormalizedPair(a, b))
    swapped = group_law(NormalizedPair(b, a))
    assert part.class_of(prod.entries) == part.class_of(swapped.entries)


def test_normalized_pair_validation():
    R = integers_mod(6)
    with pytest.raises(ValueError):
        NormalizedPair(UmRow(R, [1, 0, 0, 1]), UmRow(R, [1, 0, 0, 1]))


@pytest.mark.parametrize("name", ["Z/4", "F3", "Z/6"])
def test_group_axioms_small(name):
    report = verify_group_axioms(RINGS[name], 4)
    assert report["passed"] and report["orbit_count"] == FIXTURES[name]["orbit_count"]
    locus = generic_locus_report(RINGS[name], 4)
    assert locus["passed"]


def test_sl2_f2_control():
    F2 = prime_field(2)
    U = OpenSet(F2, 2, ["(1 + m_1_1 + m_2_2)*(1 + m_1_2 + m_2_1)"])
    comps = sl_path_components(F2, 2, U)
    assert sorted(len(c) for c in comps) == [1, 1]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 5), min_size=4, max_size=4), st.lists(st.integers(0, 5), min_size=4, max_size=4))
def test_normalize_pair_z6_preserves_orbits(u, v):
    R = integers_mod(6)
    try:
        a, b = UmRow(R, u), UmRow(R, v)
    except Exception:
        return
    try:
        pair = normalize_pair(a, b)
    except NormalizationNotFound:
        pytest.fail("every pair of classes over Z/6 has normalized representatives")
    assert pair.a_path.start == a and pair.b_path.start == b
    assert verify_row_path(pair.a_path) and verify_row_path(pair.b_path)
    assert is_normalized(pair.a, pair.b)
