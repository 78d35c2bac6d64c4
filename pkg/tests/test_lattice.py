import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arrlab.arrangement import canonicalize
from arrlab.errors import FlatNotFound, NotEssential
from arrlab.generators import boolean, braid, threelines
from arrlab.lattice import (
    build_lattice,
    characteristic_polynomial,
    dual_characteristic_polynomial,
    is_isomorphic_by_labels,
    lower_interval,
    mobius_values,
    region_count_check,
    truncate,
)

from .conftest import CORPUS
from .oracles import brute_force_flats, brute_force_mobius


def chi(arr):
    return characteristic_polynomial(build_lattice(arr)).high_first()


# --- flats --------------------------------------------------------------------


def test_flat_counts():
    assert len(build_lattice(threelines())) == 5
    assert len(build_lattice(boolean(3))) == 8
    lat = build_lattice(braid(3))
    assert len(lat) == 5
    assert lat.top.dim == 1 and lat.top.hyperplanes == frozenset({0, 1, 2})


def test_flats_sorted_by_rank_and_bottom_is_ambient():
    lat = build_lattice(threelines())
    assert lat.bottom.dim == 2 and lat.bottom.hyperplanes == frozenset()
    assert [lat.rho(f) for f in lat.flats] == [0, 1, 1, 1, 2]
    assert [f.label() for f in lat.flats] == ["{}", "{0}", "{1}", "{2}", "{0,1,2}"]


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_flats_match_all_subsets(name):
    arr = CORPUS[name]
    lat = build_lattice(arr)
    oracle = brute_force_flats(arr.normals, arr.dimension)
    assert {f.hyperplanes: lat.rho(f) for f in lat.flats} == oracle


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_mobius_matches_recursion_oracle(name):
    arr = CORPUS[name]
    lat = build_lattice(arr)
    oracle = brute_force_mobius(brute_force_flats(arr.normals, arr.dimension))
    assert {f.hyperplanes: lat.mu(f) for f in lat.flats} == oracle


def test_flat_lookup():
    lat = build_lattice(threelines())
    assert lat.flat({0}).id == 1
    assert lat.flat(4).dim == 0
    with pytest.raises(FlatNotFound):
        lat.flat({0, 1})
    with pytest.raises(FlatNotFound):
        lat.flat(99)
    assert lat.closure({0, 1}).dim == 0


# --- Moebius -------------------------------------------------------------------


def test_mobius_threelines():
    lat = build_lattice(threelines())
    assert [lat.mu(f) for f in lat.flats] == [1, -1, -1, -1, 2]


def test_mobius_boolean_top():
    lat = build_lattice(boolean(3))
    assert lat.mu(lat.bottom, lat.top) == -1


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_mobius_row_sums_vanish(name):
    lat = build_lattice(CORPUS[name])
    table = mobius_values(lat)
    for x in lat.flats:
        for y in lat.up(x):
            if y.id == x.id:
                continue
            assert sum(table[x.id, z.id] for z in lat.up(x) if lat.leq(z, y)) == 0
            if lat.rho(y) == lat.rho(x) + 1:
                assert table[x.id, y.id] == -1


def test_mu_of_incomparable_pair_is_zero():
    lat = build_lattice(threelines())
    assert lat.mu(lat.flat({0}), lat.flat({1})) == 0


# --- characteristic polynomials -------------------------------------------------


def test_charpoly_examples():
    assert chi(threelines()) == [1, -3, 2]
    assert chi(boolean(3)) == [1, -3, 3, -1]
    assert chi(braid(3)) == [1, -3, 2]
    assert chi(canonicalize([], 2)) == [1]
    assert str(characteristic_polynomial(build_lattice(threelines()))) == "t^2 - 3t + 2"


def test_region_count_check_examples():
    assert region_count_check(build_lattice(threelines())) == 6
    assert region_count_check(build_lattice(boolean(3))) == 8
    assert region_count_check(build_lattice(braid(3))) == 6


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_charpoly_alternates_and_is_monic(name):
    coeffs = chi(CORPUS[name])
    assert coeffs[0] == 1
    for i, c in enumerate(coeffs):
        assert c != 0 and (c > 0) == (i % 2 == 0)
    assert sum(abs(c) for c in coeffs) == region_count_check(build_lattice(CORPUS[name]))


def test_dual_charpoly_examples():
    assert dual_characteristic_polynomial(build_lattice(threelines())).high_first() == [1, -3, 2]
    assert dual_characteristic_polynomial(build_lattice(boolean(3))).high_first() == [1, -3, 3, -1]
    assert dual_characteristic_polynomial(build_lattice(boolean(2))).high_first() == [1, -2, 1]
    with pytest.raises(NotEssential):
        dual_characteristic_polynomial(build_lattice(braid(3)))


# --- truncation --------------------------------------------------------------------


def test_truncate_threelines():
    t = truncate(build_lattice(threelines()))
    assert len(t) == 2 and t.top.dim == 0 and t.ambient_dim == 1
    assert characteristic_polynomial(t).high_first() == [1, -1]


def test_truncate_boolean():
    t = truncate(build_lattice(boolean(3)))
    assert len(t) == 5
    assert characteristic_polynomial(t).high_first() == [1, -3, 2]


def test_truncate_rank_one():
    t = truncate(build_lattice(boolean(1)))
    assert len(t) == 1
    assert characteristic_polynomial(t).high_first() == [1]


def test_truncate_needs_essential():
    with pytest.raises(NotEssential):
        truncate(build_lattice(braid(3)))


@pytest.mark.parametrize("name", [n for n in sorted(CORPUS) if CORPUS[n].is_essential and CORPUS[n].dimension >= 2])
def test_truncation_coefficients(name):
    lat = build_lattice(CORPUS[name])
    d = lat.ambient_dim
    # a_i, b_i: absolute coefficients indexed by rank (highest power first)
    a = [abs(c) for c in characteristic_polynomial(lat).high_first()]
    b = [abs(c) for c in characteristic_polynomial(truncate(lat)).high_first()]
    assert len(b) == d
    assert a[: d - 1] == b[: d - 1]
    assert b[d - 1] == a[d - 1] - a[d]


# --- intervals ------------------------------------------------------------------------


def test_lower_interval_examples():
    lat = build_lattice(threelines())
    h1 = lower_interval(lat, lat.flat({0}))
    assert len(h1) == 2 and characteristic_polynomial(h1).high_first() == [1, -1]
    whole = lower_interval(lat, lat.top)
    assert is_isomorphic_by_labels(whole, lat)
    b3 = build_lattice(boolean(3))
    z_axis = lower_interval(b3, b3.flat({0, 1}))
    assert len(z_axis) == 4 and characteristic_polynomial(z_axis).high_first() == [1, -2, 1]
    with pytest.raises(FlatNotFound):
        lower_interval(lat, {0, 1})


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_lower_interval_matches_poset_interval(name):
    lat = build_lattice(CORPUS[name])
    for x in lat.flats:
        interval = lower_interval(lat, x)
        expected = {f.hyperplanes: lat.rho(f) for f in lat.flats if lat.leq(f, x)}
        assert {f.hyperplanes: interval.rho(f) for f in interval.flats} == expected
        assert interval.mu(interval.top) == lat.mu(x)


# --- invariance -------------------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3).filter(any), min_size=1, max_size=5),
    st.lists(st.integers(-4, 4).filter(bool), min_size=5, max_size=5),
    st.permutations(range(5)),
)
def test_lattice_invariant_under_rescaling_and_reordering(normals, scales, perm):
    base = canonicalize(normals, 3)
    m = len(base)
    order = [p for p in perm if p < m]
    moved = canonicalize([tuple(scales[i] * x for x in base.normals[i]) for i in order], 3)
    a = {f.hyperplanes: (f.dim, build_lattice(base).mu(f)) for f in build_lattice(base).flats}
    lat_b = build_lattice(moved)
    b = {frozenset(order[j] for j in f.hyperplanes): (f.dim, lat_b.mu(f)) for f in lat_b.flats}
    assert a == b
