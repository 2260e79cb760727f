from math import comb

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from genpos.genanalysis import (
    DegenerateInputError, NotGenericError, brute_force_nu, cell_seed, default_box,
    family_cells, general_generator_degrees, k2_cells, new_generators_by_slices, nu,
    predicted_w_dim, scan, three_point_forms, three_point_relations, upper_bound, v_bound,
    verify_thm55,
)
from genpos.multidegree import box_degrees, compute_degree_sets, graded_dim, leq, shift, unit
from genpos.points import (
    PointSet, SamplingError, hilbert, is_generic_position, random_generic_point_set,
    random_point_set,
)

nondegenerate = st.lists(st.integers(1, 3), min_size=1, max_size=3).map(tuple).flatmap(
    lambda sh: st.tuples(st.integers(max(sh) + 1, 12), st.just(sh)))


def arbitrary_sets(max_s=5, bound=2):
    def build(t):
        shape, s, seed = t
        try:
            return random_point_set(s, shape, coord_bound=bound, seed=seed)
        except SamplingError:
            return random_point_set(1, shape, coord_bound=bound, seed=seed)
    return st.tuples(st.lists(st.integers(1, 2), min_size=1, max_size=3).map(tuple),
                     st.integers(1, max_s), st.integers(0, 10**6)).map(build)


def test_v_bound_examples():
    assert v_bound(3, (1, 1, 1)) == 12
    assert v_bound(5, (2,)) == 3


@pytest.mark.parametrize("n,s", [(1, 2), (2, 4), (2, 7), (3, 5), (3, 12), (4, 20)])
def test_v_bound_single_factor(n, s):
    d = next(d for d in range(s + 2) if comb(n + d, d) > s)
    want = comb(d + n, n) - s + max(0, comb(d + 1 + n, n) - s - (n + 1) * (comb(d + n, n) - s))
    assert v_bound(s, (n,)) == want


def test_bounds_refuse_degenerate():
    for s, shape in [(2, (3,)), (1, (1, 1)), (3, (1, 3))]:
        with pytest.raises(DegenerateInputError):
            v_bound(s, shape)
        with pytest.raises(DegenerateInputError):
            upper_bound(s, shape)


@given(nondegenerate)
def test_upper_bound_dominates(case):
    s, shape = case
    assert upper_bound(s, shape) >= v_bound(s, shape)


def test_upper_bound_examples():
    assert upper_bound(3, (1, 1, 1)) >= 13
    assert upper_bound(5, (2,)) >= 3


def test_nu_three_points():
    rep = nu(random_generic_point_set(3, (1, 1, 1), seed=7))
    assert (rep.nu, rep.v, rep.gap) == (13, 12, 1)
    c = rep.per_degree[(1, 1, 1)]
    assert (c.slice_dim, c.w_dim, c.new_generators) == (5, 4, 1)


def test_nu_five_points_in_plane():
    X = random_generic_point_set(5, (2,), seed=3)
    rep = nu(X)
    assert rep.nu == 3
    assert rep.per_degree[(2,)].new_generators == 1
    assert rep.per_degree[(3,)].new_generators == 2
    assert brute_force_nu(X).total == 3


@pytest.mark.parametrize("s", range(2, 11))
def test_nu_p1_p1_equals_v(s):
    X = random_generic_point_set(s, (1, 1), seed=s, coord_bound=500)
    assert nu(X).nu == v_bound(s, (1, 1))


def test_nu_refuses_bad_input():
    with pytest.raises(DegenerateInputError):
        nu(random_point_set(2, (3,), seed=0))
    with pytest.raises(DegenerateInputError):
        nu(random_point_set(1, (1, 1), seed=0))
    Y = PointSet((1, 1), [[(1, 2), (1, 0)], [(1, 2), (1, 1)]])
    with pytest.raises(NotGenericError) as err:
        nu(Y)
    assert "(1, 0)" in str(err.value)
    assert err.value.certificate.failing == (1, 0)


@settings(max_examples=25)
@given(nondegenerate.filter(lambda c: c[0] <= 8), st.integers(0, 1000))
def test_report_invariants(case, seed):
    s, shape = case
    X = random_generic_point_set(s, shape, seed=seed, coord_bound=200)
    rep = nu(X)
    assert rep.nu == sum(c.new_generators for c in rep.per_degree.values())
    assert rep.v <= rep.nu <= rep.upper
    ds = compute_degree_sets(s, shape)
    for j, c in rep.per_degree.items():
        assert c.slice_dim == graded_dim(j, shape) - s
        if j in ds.D:
            assert c.w_dim is None and c.new_generators == c.slice_dim
        else:
            assert c.new_generators == c.slice_dim - c.w_dim >= 0
            # each slice below contributes at least twice its dimension
            for l in ds.L[j]:
                assert c.w_dim >= 2 * (graded_dim(shift(j, l, -1), shape) - s)
    js = rep.to_json()
    assert js["nu"] == rep.nu and all(isinstance(r["degree"], list) for r in js["per_degree"])


def test_brute_force_single_point():
    for shape in [(1,), (2, 3), (1, 1, 2)]:
        X = random_point_set(1, shape, seed=1)
        res = brute_force_nu(X)
        assert res.total == sum(shape)
        assert res.per_degree == {unit(len(shape), l): n for l, n in enumerate(shape)}


def test_brute_force_rejects_unknown_method():
    with pytest.raises(ValueError):
        brute_force_nu(random_point_set(1, (1,), seed=0), method="magic")


@settings(max_examples=30)
@given(arbitrary_sets(max_s=5))
def test_koszul_matches_slices(X):
    box = (2,) * X.k
    a = brute_force_nu(X, box, method="koszul")
    b = brute_force_nu(X, box, method="slices")
    assert a.per_degree == b.per_degree


def test_new_generators_by_slices_three_points():
    X = random_generic_point_set(3, (1, 1, 1), seed=7)
    assert new_generators_by_slices(X, (1, 1, 1)) == 1
    assert new_generators_by_slices(X, (2, 2, 0)) == 0


def test_general_degrees_single_point():
    for k in (1, 2, 3):
        X = random_point_set(1, (1,) * k, seed=k)
        bound = general_generator_degrees(X)
        ones = {j for j in box_degrees((1,) * k) if any(j)}
        assert bound.E == ones
        assert brute_force_nu(X).degrees <= bound.E


def test_general_degrees_non_generic_pair():
    Y = PointSet((1, 1), [[(1, 2), (1, 0)], [(1, 2), (1, 1)]])
    bound = general_generator_degrees(Y)
    found = brute_force_nu(Y, (3, 3))
    assert found.degrees and found.degrees <= bound.E
    assert all(leq(j, bound.box) for j in bound.E)
    assert all(hilbert(Y, j) < graded_dim(j, Y.shape) for j in bound.E)


@pytest.mark.parametrize("n,s", [(1, 3), (2, 5), (2, 8), (3, 7)])
def test_general_degrees_single_factor(n, s):
    X = random_generic_point_set(s, (n,), seed=s)
    d = next(d for d in range(s + 2) if comb(n + d, d) > s)
    assert general_generator_degrees(X).E <= {(d,), (d + 1,)}


@settings(max_examples=15)
@given(nondegenerate.filter(lambda c: c[0] <= 7), st.integers(0, 1000))
def test_generic_degrees_in_T_and_no_generators_past_saturation(case, seed):
    s, shape = case
    X = random_generic_point_set(s, shape, seed=seed, coord_bound=200)
    found = brute_force_nu(X)
    T = compute_degree_sets(s, shape).T
    assert found.degrees <= T
    assert found.degrees <= general_generator_degrees(X).E
    k = X.k
    for j in box_degrees(found.box):
        for l in range(k):
            for m in range(k):
                jm = shift(shift(j, l, -1), m, -1)
                if min(jm) < 0:
                    continue
                if hilbert(X, j) == hilbert(X, shift(j, l, -1)) == hilbert(X, jm) == s:
                    assert found.per_degree.get(j, 0) == 0


def test_default_box_covers_projections():
    X = random_generic_point_set(6, (1, 2), seed=2)
    box = default_box(X)
    assert box[0] >= 6 and box[1] >= 6


def test_slice_of_four_factor_example_reproduces_three_factor_counts():
    X4 = random_generic_point_set(3, (1, 1, 1, 1), seed=2)
    X3 = PointSet((1, 1, 1), [P[:3] for P in X4.points])
    assert is_generic_position(X3)
    r4 = brute_force_nu(X4)
    r3 = brute_force_nu(X3)
    for j, c in r3.per_degree.items():
        assert r4.per_degree.get(j + (0,), 0) == c
    assert r4.per_degree[(1, 1, 1, 0)] == 1


def test_predicted_w_dim_cases():
    assert predicted_w_dim(5, (2,), (3,)) == 3
    assert predicted_w_dim(3, (1, 1, 1), (2, 1, 0)) == 2
    assert predicted_w_dim(3, (1, 1, 1), (1, 1, 1)) is None
    assert predicted_w_dim(3, (1, 1, 1), (1, 1, 0)) is None


def test_three_point_identities_symbolic():
    a1, a2, a3, b1, b2, b3 = sympy.symbols("a1 a2 a3 b1 b2 b3")
    x0, x1, y0, y1, z0, z1 = sympy.symbols("x0 x1 y0 y1 z0 z1")
    F1 = (a2*b1 - a1*b2)*x1*y1 + a2*b2*(a1 - b1)*x1*y0 + a1*b1*(b2 - a2)*x0*y1
    F2 = (a3*b1 - a1*b3)*x1*z1 + a3*b3*(a1 - b1)*x1*z0 + a1*b1*(b3 - a3)*x0*z1
    F3 = (a2*b3 - a3*b2)*y1*z1 + a3*b3*(b2 - a2)*y1*z0 + a2*b2*(a3 - b3)*y0*z1
    r1 = (a1*b1*(a1 - b1)*x0*F3 - ((a1 - b1)*a3*b3*z0*F1 - (a1 - b1)*a2*b2*y0*F2
                                   + (a3*b1 - a1*b3)*z1*F1 - (a2*b1 - b2*a1)*y1*F2))
    r2 = (a1 - b1)*x1*F3 - ((b2 - a2)*y1*F2 + (a3 - b3)*z1*F1)
    assert sympy.expand(r1) == 0 and sympy.expand(r2) == 0


def test_three_point_forms_vanish():
    a, b = (3, -2, 5), (7, 4, -1)
    assert three_point_relations(a, b) == (True, True)
    assert set(three_point_forms(a, b)) == {"F1", "F2", "F3"}


def test_verify_three_points():
    rep = verify_thm55(11)
    assert rep.ok and rep.w_dim_111 == 4 and rep.gap == 1
    assert all(x != 0 for x in rep.a + rep.b)
    assert all(x != y for x, y in zip(rep.a, rep.b))
    assert verify_thm55(11).to_json() == rep.to_json()


def test_verify_resamples_degenerate_draws():
    # coord_bound 1 makes zero or repeated entries very likely; only clean draws come back
    try:
        rep = verify_thm55(0, coord_bound=1, max_tries=500)
    except SamplingError:
        return
    assert all(x != 0 for x in rep.a + rep.b)
    assert all(x != y for x, y in zip(rep.a, rep.b))


def test_verify_gives_up():
    with pytest.raises(SamplingError):
        verify_thm55(0, coord_bound=0, max_tries=5)


def test_scan_rows_and_determinism():
    cells = [(3, (1, 1, 1)), (4, (1, 1)), (2, (3,))]
    rows = scan(cells, seeds_per_cell=2, base_seed=5)
    assert [(r.s, r.shape) for r in rows] == [
        (2, (3,)), (2, (3,)), (3, (1, 1, 1)), (3, (1, 1, 1)), (4, (1, 1)), (4, (1, 1))]
    assert rows[0].status == "degenerate" and rows[0].equal is None
    assert all(r.equal is False for r in rows[2:4])
    assert all(r.equal is True for r in rows[4:])
    again = scan(list(reversed(cells)), seeds_per_cell=2, base_seed=5, jobs=2)
    assert [r.csv_fields() for r in again] == [r.csv_fields() for r in rows]


def test_scan_marks_sampling_failures():
    (row,) = scan([(5, (1,))], coord_bound=1, max_tries=3)
    assert row.status == "sampling-failure" and row.nu is None


def test_cell_helpers():
    assert cell_seed(0, 3, (1, 1), 0) == cell_seed(0, 3, (1, 1), 0)
    assert cell_seed(0, 3, (1, 1), 0) != cell_seed(0, 3, (1, 1), 1)
    assert family_cells([1, 2]) == [(3, (1, 1, 1)), (5, (1, 2, 2))]
    cells = k2_cells(2, 4)
    assert (2, (1, 1)) in cells and (3, (2, 2)) in cells and (2, (2, 2)) not in cells
