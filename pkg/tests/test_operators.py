import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from gorlicz.bmo import local_maximal
from gorlicz.grid import Cube, GridFunction, cube_family, make_grid
from gorlicz.operators import (
    PAIR_CAP,
    CapExceeded,
    cube_weight,
    fm_commutator,
    fractional_maximal,
    fractional_maximal_blocks,
    fractional_maximal_on,
    hl_maximal,
    maximal_commutator,
    restricted_maximal,
    riesz_abs_commutator,
    riesz_commutator,
    riesz_potential,
    self_cell_weight,
    sharp_maximal,
)
from gorlicz.phi import ArgumentError

rng = np.random.default_rng(7)


# naive oracles: loop over every cell and every family cube containing it


def _cells(g):
    return itertools.product(*[range(N) for N in g.shape])


def naive_fractional(f, alpha, fam):
    g = f.grid
    out = np.zeros(g.shape)
    for idx in _cells(g):
        out[idx] = max(cube_weight(Q.count(), g, alpha) * float(np.sum(np.abs(f.values[Q.slices()]))) * g.cell_volume
                       for Q in fam.cubes() if Q.contains_cell(idx))
    return out


def naive_commutator(b, f, alpha, fam):
    g = f.grid
    out = np.zeros(g.shape)
    for idx in _cells(g):
        out[idx] = max(cube_weight(Q.count(), g, alpha) * g.cell_volume
                       * float(np.sum(np.abs(b.values[idx] - b.values[Q.slices()]) * np.abs(f.values[Q.slices()])))
                       for Q in fam.cubes() if Q.contains_cell(idx))
    return out


def naive_sharp(f, fam):
    g = f.grid
    out = np.zeros(g.shape)
    for idx in _cells(g):
        best = 0.0
        for Q in fam.cubes():
            if Q.contains_cell(idx):
                v = f.values[Q.slices()]
                c, S = float(v.size), float(np.sum(v))
                best = max(best, float(np.sum(np.abs(c * v - S))) / (c * c))
        out[idx] = best
    return out


def _dyadic_rational(g):
    # multiples of 1/8 keep every sum exact, so oracle and fast path agree bit for bit
    return GridFunction(g, rng.integers(-16, 17, g.shape) / 8.0)


SETUPS = [
    ((-1.0, 1.0), 16, "standard"),
    ([(-1.0, 1.0), (0.0, 2.0)], 8, "standard"),
    ((0.0, 3.0), 12, "all"),
    ((0.0, 1.0), 16, "dyadic"),
]


@pytest.mark.parametrize("box,res,kind", SETUPS)
@pytest.mark.parametrize("alpha", [0.0, 0.5])
def test_fractional_maximal_matches_naive(box, res, kind, alpha):
    g = make_grid(box, res)
    fam = cube_family(g, kind)
    f = _dyadic_rational(g)
    assert np.array_equal(fractional_maximal(f, alpha, fam).values, naive_fractional(f, alpha, fam))


@pytest.mark.parametrize("box,res,kind", SETUPS)
@pytest.mark.parametrize("alpha", [0.0, 0.5])
def test_maximal_commutator_matches_naive(box, res, kind, alpha):
    g = make_grid(box, res)
    fam = cube_family(g, kind)
    f, b = _dyadic_rational(g), _dyadic_rational(g)
    assert np.array_equal(maximal_commutator(b, f, alpha, fam).values, naive_commutator(b, f, alpha, fam))


@pytest.mark.parametrize("box,res,kind", SETUPS)
def test_sharp_maximal_matches_naive(box, res, kind):
    g = make_grid(box, res)
    fam = cube_family(g, kind)
    f = _dyadic_rational(g)
    assert np.array_equal(sharp_maximal(f, fam).values, naive_sharp(f, fam))


def test_witness_cube_attains_value():
    g = make_grid((-1.0, 1.0), 16)
    f = _dyadic_rational(g)
    out = hl_maximal(f, cube_family(g, "standard"), witness=True)
    for idx in _cells(g):
        Q = Cube(tuple(out.argmax_cube["anchor"][idx]), int(out.argmax_cube["side"][idx]))
        assert Q.contains_cell(idx)
        val = cube_weight(Q.count(), g, 0.0) * float(np.sum(np.abs(f.values[Q.slices()]))) * g.cell_volume
        assert val == out.values[idx]


def test_witness_path_agrees_with_fast_path():
    g = make_grid((-1.0, 1.0), 64)
    fam = cube_family(g, "standard")
    f = g.sample(lambda x: np.cos(5 * x[:, 0]))
    assert np.array_equal(fractional_maximal(f, 0.3, fam).values,
                          fractional_maximal(f, 0.3, fam, witness=True).values)


@pytest.mark.parametrize("alpha", [0.0, 0.25, 0.5])
def test_centered_and_uncentered_sandwich(alpha):
    # a side-s cube containing x sits in the centred cube of side 2s - 1, so the
    # uncentred value is at most ((2s - 1)/s)^(n - alpha) < 2^(n - alpha) times the centred one
    for g in (make_grid((0.0, 1.0), 24), make_grid([(0.0, 1.0)] * 2, 8)):
        f = _dyadic_rational(g)
        fam = cube_family(g, "all")
        A = fractional_maximal(f, alpha, fam).values
        C = fractional_maximal(f, alpha, fam, centered=True).values
        assert np.all(C <= A * (1 + 1e-15))
        assert np.all(A <= 2 ** (g.n - alpha) * C * (1 + 1e-15))


def test_alpha_zero_is_hardy_littlewood():
    g = make_grid((-2.0, 2.0), 128)
    fam = cube_family(g, "standard")
    f = g.sample(lambda x: np.exp(-x[:, 0] ** 2) * np.sin(9 * x[:, 0]))
    assert np.array_equal(fractional_maximal(f, 0.0, fam).values, hl_maximal(f, fam).values)


@settings(max_examples=30, deadline=None)
@given(u=arrays(np.float64, (32,), elements=st.floats(-10, 10)),
       v=arrays(np.float64, (32,), elements=st.floats(-10, 10)), alpha=st.sampled_from([0.0, 0.25, 0.75]))
def test_fractional_maximal_sublinear(u, v, alpha):
    g = make_grid((0.0, 1.0), 32)
    fam = cube_family(g, "standard")
    f, h = GridFunction(g, u), GridFunction(g, v)
    lhs = fractional_maximal(f + h, alpha, fam).values
    rhs = fractional_maximal(f, alpha, fam).values + fractional_maximal(h, alpha, fam).values
    assert np.all(lhs <= rhs * (1 + 1e-12) + 1e-12)


@settings(max_examples=30, deadline=None)
@given(u=arrays(np.float64, (32,), elements=st.floats(-10, 10)), c=st.floats(-8, 8))
def test_fractional_maximal_homogeneous(u, c):
    g = make_grid((0.0, 1.0), 32)
    fam = cube_family(g, "standard")
    f = GridFunction(g, u)
    assert np.allclose(fractional_maximal(f * c, 0.5, fam).values, abs(c) * fractional_maximal(f, 0.5, fam).values,
                       rtol=1e-12, atol=1e-300)


def test_sharp_at_most_twice_maximal():
    g = make_grid((-1.0, 1.0), 64)
    fam = cube_family(g, "standard")
    f = _dyadic_rational(g)
    assert np.all(sharp_maximal(f, fam).values <= 2 * hl_maximal(f, fam).values)


def test_indicator_maximal_on_own_dyadic_cube():
    g = make_grid((-8.0, 8.0), 1024)
    fam = cube_family(g, "dyadic")
    for s in (1024, 64, 4, 1):
        v = np.zeros(1024)
        v[:s] = 1.0
        M = fractional_maximal(GridFunction(g, v), 0.25, fam).values[:s]
        assert np.max(np.abs(M / (s * g.cell_volume) ** 0.25 - 1.0)) < 1e-12


def test_blocks_match_full_computation():
    g = make_grid((-4.0, 4.0), 256)
    fam = cube_family(g, "standard")
    anchors = np.array([[0], [40], [128], [248]])
    vals = rng.normal(size=(4, 8))
    got = fractional_maximal_blocks(vals, anchors, 0.2, fam)
    for k, a in enumerate(anchors[:, 0]):
        v = np.zeros(256)
        v[a:a + 8] = vals[k]
        full = fractional_maximal(GridFunction(g, v), 0.2, fam).values[a:a + 8]
        assert np.allclose(got[k], full, rtol=1e-14, atol=0)


def test_blocks_reject_out_of_grid_anchor():
    g = make_grid((0.0, 1.0), 16)
    with pytest.raises(ArgumentError):
        fractional_maximal_blocks(np.ones((1, 4)), [[14]], 0.0, cube_family(g, "dyadic"))


def test_window_matches_full_computation():
    g = make_grid([(-1.0, 1.0)] * 2, 32)
    fam = cube_family(g, "standard")
    f = g.sample(lambda x: np.exp(-4 * (x ** 2).sum(axis=1)))
    W = Cube((5, 9), 10)
    assert np.array_equal(fractional_maximal_on(f, 0.5, fam, W), fractional_maximal(f, 0.5, fam).values[W.slices()])


def test_restricted_and_local_maximal_agree():
    g = make_grid((0.0, 2.0), 64)
    fam = cube_family(g, "standard")
    f = g.sample(lambda x: 1.0 + x[:, 0] ** 2)
    Q = Cube((16,), 32)
    r = restricted_maximal(f, fam, Q, 0.4)
    loc = local_maximal(f, Q, fam, 0.4)
    assert np.allclose(loc, r * Q.volume(g) ** -0.4, rtol=1e-12)


def test_anchor_box_restricts_cubes():
    g = make_grid((0.0, 1.0), 32)
    fam = cube_family(g, "standard")
    v = np.zeros(32)
    v[0] = 1.0
    Q = Cube((16,), 16)
    out = hl_maximal(GridFunction(g, v), fam, anchor_box=Q).values
    assert np.all(out[Q.slices()] == 0.0)


def test_constant_multiplier_gives_zero_commutators():
    g = make_grid((-1.0, 1.0), 64)
    fam = cube_family(g, "standard")
    f = g.sample(lambda x: np.exp(-x[:, 0] ** 2))
    b = g.sample(lambda x: 2.0 + 0 * x[:, 0])
    assert np.all(maximal_commutator(b, f, 0.3, fam).values == 0.0)
    assert np.all(fm_commutator(b, f, 0.3, fam).values == 0.0)
    assert np.all(riesz_commutator(b, f, 0.3).values == 0.0)
    assert np.all(riesz_abs_commutator(b, f, 0.3).values == 0.0)


def test_maximal_commutator_dominated_by_sum():
    # |b(x) - b(y)| <= |b(x)| + |b(y)| gives M_b f <= |b| M f + M(bf)
    g = make_grid((-1.0, 1.0), 64)
    fam = cube_family(g, "standard")
    f, b = _dyadic_rational(g), _dyadic_rational(g)
    lhs = maximal_commutator(b, f, 0.0, fam).values
    rhs = np.abs(b.values) * hl_maximal(f, fam).values + hl_maximal(b * f, fam).values
    assert np.all(lhs <= rhs * (1 + 1e-14))


def test_bad_alpha_rejected():
    g = make_grid((0.0, 1.0), 8)
    f = g.sample(lambda x: x[:, 0])
    with pytest.raises(ArgumentError):
        fractional_maximal(f, 1.0, cube_family(g, "dyadic"))
    with pytest.raises(ArgumentError):
        riesz_potential(f, 0.0)


def test_mismatched_grids_rejected():
    f = make_grid((0.0, 1.0), 8).sample(lambda x: x[:, 0])
    b = make_grid((0.0, 1.0), 16).sample(lambda x: x[:, 0])
    with pytest.raises(ArgumentError):
        maximal_commutator(b, f, 0.0, cube_family(f.grid, "dyadic"))


# Riesz potentials


def test_self_cell_weight_1d_closed_form():
    assert self_cell_weight(0.5, [0.25]) == pytest.approx(2 * 0.125 ** 0.5 / 0.5, rel=1e-15)


def test_self_cell_weight_2d_closed_form():
    # unit square centred at 0 with alpha = 1: int 1/|z| dz = 4 log(1 + sqrt 2)
    assert self_cell_weight(1.0, [1.0, 1.0]) == pytest.approx(4 * np.log1p(np.sqrt(2.0)), rel=1e-12)


def test_self_cell_weight_2d_scaling():
    assert self_cell_weight(0.5, [0.2, 0.2]) == pytest.approx(0.2 ** 0.5 * self_cell_weight(0.5, [1.0, 1.0]), rel=1e-12)


def test_riesz_potential_2d_runs():
    g = make_grid([(-1.0, 1.0)] * 2, 16)
    out = riesz_potential(g.sample(lambda p: np.ones(len(p))), 1.0).values
    assert np.all(out > 0) and out[8, 8] > out[0, 0]


@pytest.mark.parametrize("alpha", [0.25, 0.5])
def test_riesz_of_constant_on_interval(alpha):
    # 1 on [-1, 1]: I_alpha 1(x) = ((1 + x)**alpha + (1 - x)**alpha) / alpha
    errs = []
    for N in (256, 1024):
        g = make_grid((-1.0, 1.0), N)
        x = g.axis_centers(0)
        exact = ((1 + x) ** alpha + (1 - x) ** alpha) / alpha
        got = riesz_potential(g.sample(lambda p: np.ones(len(p))), alpha).values
        errs.append(np.max(np.abs(got / exact - 1.0)))
    assert errs[1] < errs[0] and errs[1] < 2e-2


def test_riesz_direct_sum_matches_loop():
    g = make_grid((0.0, 1.0), 24)
    f = _dyadic_rational(g)
    alpha = 0.5
    h = g.cell_volume
    x = g.axis_centers(0)
    ref = np.empty(24)
    for i in range(24):
        d = np.abs(x[i] - x)
        d[i] = 1.0
        w = np.where(np.arange(24) == i, self_cell_weight(alpha, [h]), d ** (alpha - 1) * h)
        ref[i] = np.sum(w * f.values)
    assert np.allclose(riesz_potential(f, alpha).values, ref, rtol=1e-12, atol=1e-12)


def test_riesz_commutator_is_difference():
    g = make_grid((-1.0, 1.0), 128)
    f = g.sample(lambda x: np.exp(-x[:, 0] ** 2))
    b = g.sample(lambda x: np.sin(3 * x[:, 0]))
    lhs = riesz_commutator(b, f, 0.3).values
    rhs = riesz_potential(b * f, 0.3).values - b.values * riesz_potential(f, 0.3).values
    assert np.allclose(lhs, rhs, rtol=1e-10, atol=1e-12)


def test_riesz_abs_commutator_dominates():
    g = make_grid((-1.0, 1.0), 128)
    f = g.sample(lambda x: np.exp(-x[:, 0] ** 2))
    b = g.sample(lambda x: np.sign(x[:, 0]))
    assert np.all(np.abs(riesz_commutator(b, f, 0.3).values) <= riesz_abs_commutator(b, f, 0.3).values + 1e-14)


def test_pair_cap_enforced():
    g = make_grid((0.0, 1.0), int(PAIR_CAP ** 0.5) + 1)
    f = g.sample(lambda x: x[:, 0])
    with pytest.raises(CapExceeded):
        riesz_potential(f, 0.5)
    with pytest.raises(CapExceeded):
        riesz_commutator(f, f, 0.5)
