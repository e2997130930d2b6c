import numpy as np
import pytest

from conftest import default_profile, random_field
from ilwlab.evolution import EquationSpec, SolveConfig, Trajectory, solve
from ilwlab.fourier import from_modes, inverse_transform, make_grid, resample, zero_field
from ilwlab.gauge import (
    GaugeConsistencyError,
    ResolutionError,
    gauge_state,
    gauge_W,
    gauge_w,
    gauge_w_formulas,
    gauged_residual,
    mean_zero_primitive,
    nonlinearity_Ndelta,
    reconstruct_check,
)

# J_n(2) for n = 2..7, 40-digit evaluation
BESSEL_J2 = {
    2: 0.35283402861563771915,
    3: 0.1289432494744020511,
    4: 0.033995719807568434146,
    5: 0.0070396297558716854842,
    6: 0.0012024289717899932755,
    7: 0.00017494407486827416851,
}


def l2(f):
    return float(np.linalg.norm(f.coeffs))


def test_primitive_examples():
    g = make_grid(1.0, 32)
    assert mean_zero_primitive(from_modes(g, {1: 0.5})).allclose(from_modes(g, {1: -0.5j}), atol=1e-17)
    F = mean_zero_primitive(from_modes(g, {2: -0.5j}))
    assert F.allclose(from_modes(g, {2: -0.25}), atol=1e-17)
    assert l2(mean_zero_primitive(zero_field(g))) == 0
    with pytest.raises(ValueError):
        mean_zero_primitive(from_modes(g, {0: 1.0, 1: 0.5}))


def test_primitive_differentiates_back(rng):
    g = make_grid(2.0, 64)
    v = random_field(rng, g, kmax=20, mean_zero=True)
    F = mean_zero_primitive(v)
    assert F.coeffs[0] == 0
    assert np.max(np.abs(1j * g.xi * F.coeffs - v.coeffs)) < 1e-15


def test_zero_data_gives_zero_gauge():
    g = make_grid(1.0, 32)
    z = zero_field(g)
    assert l2(gauge_W(z)) == 0 and l2(gauge_w(z)) == 0
    st = gauge_state(z)
    terms = nonlinearity_Ndelta(st.w, z, 1.0, state=st)
    assert all(l2(t) == 0 for t in terms)
    assert reconstruct_check(st.w, z) == 0


def test_jacobi_anger_oracle():
    g = make_grid(1.0, 64)
    v = from_modes(g, {1: 1.0})  # 2 cos x, so F = 2 sin x
    W = gauge_W(v)
    w = gauge_w(v)
    for n, j in BESSEL_J2.items():
        assert abs(W.mode(n) - j) < 1e-16
        assert abs(w.mode(n) - 1j * n * j) < 1e-15
    for n in (-3, -1, 0, 1):
        assert W.mode(n) == 0 and w.mode(n) == 0
    assert reconstruct_check(w, v) < 1e-11


def test_unimodular_exponential(rng):
    g = make_grid(1.0, 128)
    v = random_field(rng, g, kmax=16, mean_zero=True, scale=0.2)
    st = gauge_state(v)
    vals = inverse_transform(st.expiF)
    assert np.max(np.abs(np.abs(vals) - 1)) < 1e-13
    # |e^{iF}| = 1 bounds every coefficient of W
    assert np.max(np.abs(st.W.coeffs)) <= 1.0


def test_dual_formulas_random_fields(rng):
    g = make_grid(1.0, 512)
    for _ in range(20):
        v = random_field(rng, g, kmax=64, mean_zero=True, scale=0.05)
        a, b = gauge_w_formulas(v)
        assert l2(a - b) < 1e-12 * l2(v)


def test_ndelta_terms():
    g = make_grid(1.0, 64)
    v = from_modes(g, {1: 0.5})  # cos x
    st = gauge_state(v)
    terms = nonlinearity_Ndelta(st.w, v, 2.0, state=st)
    assert terms.periodic.allclose(st.w * (-0.5j), atol=1e-16)
    bo = nonlinearity_Ndelta(st.w, v, np.inf, state=st)
    assert l2(bo.depth) == 0
    assert bo.high_low.allclose(terms.high_low, atol=0)
    assert terms.total.allclose(terms.high_low + terms.low_low + terms.depth + terms.periodic)


def test_ndelta_accepts_coarse_w_and_rejects_inconsistent_pair(rng):
    g = make_grid(1.0, 64)
    v = random_field(rng, g, kmax=8, mean_zero=True, scale=0.1)
    st = gauge_state(v)
    nonlinearity_Ndelta(st.w, v, 1.0)
    with pytest.raises(GaugeConsistencyError):
        nonlinearity_Ndelta(st.w * 1.01, v, 1.0)


def test_resolution_rejected():
    g = make_grid(1.0, 16)
    v = from_modes(g, {7: 10.0})
    with pytest.raises(ResolutionError):
        gauge_state(v)


def test_gauge_needs_real_mean_zero():
    g = make_grid(1.0, 16)
    with pytest.raises(ValueError):
        gauge_state(from_modes(g, {0: 1.0}))
    with pytest.raises(ValueError):
        gauge_state(from_modes(g, {1: 1.0}, real=False))


def test_reconstruction_random_fields(rng):
    g = make_grid(1.0, 512)
    for _ in range(10):
        v = random_field(rng, g, kmax=64, mean_zero=True, scale=0.05)
        assert reconstruct_check(gauge_w(v), v) < 1e-11


def test_residual_of_zero_solution():
    g = make_grid(1.0, 32)
    tr = solve(EquationSpec.renorm(1.0), zero_field(g), SolveConfig(0.1, 0.5))
    for which in ("F_equation", "w_equation"):
        assert gauged_residual(tr, which=which).max == 0


def test_residual_needs_three_snapshots_and_valid_kind():
    g = make_grid(1.0, 32)
    tr = solve(EquationSpec.renorm(1.0), zero_field(g), SolveConfig(0.1, 0.1))
    with pytest.raises(ValueError):
        gauged_residual(tr)
    tr = solve(EquationSpec.renorm(1.0), zero_field(g), SolveConfig(0.1, 0.3))
    with pytest.raises(ValueError):
        gauged_residual(tr, which="W_equation")


def _max_ratio(eq, which, dts, g):
    u0 = default_profile(g)
    res = []
    for dt in dts:
        tr = solve(eq, u0, SolveConfig(dt, 0.4))
        r = gauged_residual(tr, which=which)
        coarse = np.searchsorted(r.times, np.arange(1, round(0.4 / dts[0])) * dts[0] - 1e-12)
        res.append(r.residuals[coarse].max())
    return [a / b for a, b in zip(res, res[1:])]


@pytest.mark.parametrize("which", ["F_equation", "w_equation"])
def test_residual_second_order_renormalized(which):
    ratios = _max_ratio(EquationSpec.renorm(1.0), which, [0.04, 0.02, 0.01], make_grid(1.0, 64))
    assert all(abs(r - 4) < 0.5 for r in ratios)


def test_residual_second_order_bo():
    ratios = _max_ratio(EquationSpec.bo(), "w_equation", [0.04, 0.02, 0.01], make_grid(1.0, 64))
    assert all(abs(r - 4) < 0.5 for r in ratios)


def test_residual_rejects_nonuniform_times():
    g = make_grid(1.0, 32)
    v = default_profile(g)
    tr = Trajectory(EquationSpec.renorm(1.0), g, np.array([0.0, 0.1, 0.3]), (v, v, v))
    with pytest.raises(ValueError):
        gauged_residual(tr)


def test_gauge_state_lives_on_fine_grid():
    g = make_grid(1.0, 32)
    st = gauge_state(default_profile(g), factor=4)
    assert st.grid.n_points == 128
    assert st.v.allclose(resample(default_profile(g), 128), atol=0)
    assert st.tail < 1e-10
