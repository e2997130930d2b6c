import numpy as np
import pytest

from conftest import default_profile, random_field
from ilwlab.diagnostics import conservation_report, hs_error, mass
from ilwlab.evolution import (
    BlowUpError,
    EquationSpec,
    SolveConfig,
    Trajectory,
    Variant,
    dealias_mask,
    etdrk4_step,
    galilean_tau,
    gamma_inverse,
    gamma_transform,
    linear_symbol,
    nonlinear_rhs,
    scale_field,
    scale_transform,
    solve,
)
from ilwlab.fourier import from_modes, make_grid, sobolev_norm, zero_field

Q1 = 0.31303528549933130364


def test_equation_spec_validation():
    assert EquationSpec.bo().delta == np.inf
    with pytest.raises(ValueError):
        EquationSpec.ilw(np.inf)
    with pytest.raises(ValueError):
        EquationSpec.renorm(0.0)
    assert EquationSpec("ScaledILW", 2).variant is Variant.SCALED_ILW


def test_solve_config_validation():
    with pytest.raises(ValueError):
        SolveConfig(0.0, 1.0)
    with pytest.raises(ValueError):
        SolveConfig(2.0, 1.0)
    with pytest.raises(ValueError):
        SolveConfig(0.3, 1.0).n_steps
    assert SolveConfig(1e-3, 1.0).n_steps == 1000


def test_linear_symbol_examples():
    assert linear_symbol(EquationSpec.bo(), 2.0) == 4j
    assert linear_symbol(EquationSpec.ilw(1.0), 1.0) == pytest.approx(Q1 * 1j, rel=1e-15)
    xi = np.linspace(-10, 10, 41)
    for eq in (EquationSpec.ilw(1.0), EquationSpec.renorm(1.0), EquationSpec.scaled(1.0)):
        s = linear_symbol(eq, xi)
        assert np.all(s.real == 0) and linear_symbol(eq, 0.0) == 0
    np.testing.assert_allclose(linear_symbol(EquationSpec.scaled(2.0), xi),
                               1.5 * linear_symbol(EquationSpec.ilw(2.0), xi), rtol=1e-15)


def test_renormalized_symbol_approaches_bo():
    xi = np.array([-3.0, -1.0, 0.5, 2.0])
    bo = linear_symbol(EquationSpec.bo(), xi)
    for delta in (1.0, 4.0, 16.0):
        gap = np.abs(linear_symbol(EquationSpec.renorm(delta), xi) - bo)
        a = 2 * delta * np.abs(xi)
        np.testing.assert_allclose(gap, 2 * xi**2 / np.expm1(a), rtol=1e-13, atol=1e-15)
        # leading-order form 2 xi^2 e^{-2 delta |xi|} once delta |xi| is large
        deep = a >= 16
        assert np.all(gap[deep] <= 2 * xi[deep] ** 2 * np.exp(-a[deep]) * (1 + 2 * np.exp(-a[deep])) + 1e-15)


def test_renormalized_symbol_is_xi_squared_coth():
    xi = np.array([-2.0, -0.5, 0.25, 1.0, 3.0])
    np.testing.assert_allclose(linear_symbol(EquationSpec.renorm(0.7), xi),
                               1j * xi**2 / np.tanh(0.7 * xi), rtol=1e-14)


def test_nonlinear_rhs_examples():
    g = make_grid(1.0, 32)
    cos = from_modes(g, {1: 0.5})
    out = nonlinear_rhs(cos)
    # d/dx cos^2 = -sin 2x
    assert out.allclose(from_modes(g, {2: 0.5j}), atol=1e-15)
    assert out.coeffs[0] == 0
    const = from_modes(g, {0: 2.0})
    assert np.max(np.abs(nonlinear_rhs(const).coeffs)) == 0


def test_nonlinear_rhs_dealiasing():
    N = 48
    g = make_grid(1.0, N)
    k = N // 3 - 1  # highest retained mode
    u = from_modes(g, {k: 0.5})
    out = nonlinear_rhs(u)
    # cos^2(kx) = (1 + cos 2kx)/2: 2k is outside the retained band, so the
    # dealiased result is zero, while an aliased product would show up at 2k - N
    assert np.max(np.abs(out.coeffs)) < 1e-15
    small = from_modes(g, {5: 0.5})
    np.testing.assert_allclose(nonlinear_rhs(small).mode(10), 1j * 10 * 0.25, rtol=1e-14)
    mask = dealias_mask(N)
    assert mask.sum() == N // 3  # modes 0..N/3-1


def test_nonlinear_rhs_rejects_nan():
    g = make_grid(1.0, 16)
    c = np.zeros(16, complex)
    c[1] = np.nan
    from ilwlab.fourier import SpectralField

    with pytest.raises(ValueError):
        nonlinear_rhs(SpectralField(g, c, real=False))


def test_etdrk4_exact_on_linear_flow(rng):
    g = make_grid(1.0, 64)
    u = random_field(rng, g, kmax=20)
    for eq in (EquationSpec.bo(), EquationSpec.ilw(0.5), EquationSpec.renorm(2.0)):
        dt = 0.01
        step = etdrk4_step(u, eq, dt, nonlinearity=lambda h: np.zeros_like(h))
        exact = u.coeffs * np.exp(dt * linear_symbol(eq, g.xi))
        assert np.max(np.abs(step.coeffs - exact)) < 1e-14


def test_etdrk4_keeps_mean(rng):
    g = make_grid(1.0, 64)
    u = random_field(rng, g, kmax=10, scale=0.05)
    for _ in range(20):
        u = etdrk4_step(u, EquationSpec.ilw(1.0), 0.01)
    assert u.real


def test_solve_zero_and_snapshots():
    g = make_grid(1.0, 32)
    tr = solve(EquationSpec.ilw(1.0), zero_field(g), SolveConfig(0.01, 0.1, snapshot_stride=5))
    assert np.allclose(tr.times, [0.0, 0.05, 0.1], rtol=0, atol=0)
    assert all(np.max(np.abs(f.coeffs)) == 0 for f in tr.fields)


def test_renormalized_requires_mean_zero():
    g = make_grid(1.0, 32)
    with pytest.raises(ValueError):
        solve(EquationSpec.renorm(1.0), from_modes(g, {0: 0.1, 1: 0.05}), SolveConfig(0.01, 0.1))


def test_mean_conserved_exactly():
    g = make_grid(1.0, 128)
    u0 = default_profile(g) + 0.3
    tr = solve(EquationSpec.ilw(1.0), u0, SolveConfig(1e-2, 1.0))
    assert max(abs(f.coeffs[0] - 0.3) for f in tr.fields) < 1e-14


def test_bo_l2_conserved():
    g = make_grid(1.0, 128)
    u0 = from_modes(g, {1: 0.05})
    tr = solve(EquationSpec.bo(), u0, SolveConfig(1e-2, 1.0))
    assert conservation_report(tr).mass_drift < 1e-10


def test_blowup_detected():
    g = make_grid(1.0, 16)
    u0 = from_modes(g, {1: 3.0, 2: 2.0})
    with pytest.raises(BlowUpError) as info:
        solve(EquationSpec.bo(), u0, SolveConfig(0.5, 20.0))
    assert info.value.trajectory is not None and info.value.time is not None


def test_integrator_order_four():
    g = make_grid(1.0, 128)
    u0 = default_profile(g)
    finals = [solve(EquationSpec.bo(), u0, SolveConfig(dt, 1.0)).final() for dt in (0.1, 0.05, 0.025, 0.0125)]
    errs = [sobolev_norm(a - b, 0) for a, b in zip(finals, finals[1:])]
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(np.abs(orders - 4) < 0.3)


def test_hamiltonian_drift_fourth_order_at_coarse_steps():
    g = make_grid(1.0, 256)
    u0 = default_profile(g)
    drifts = [conservation_report(solve(EquationSpec.bo(), u0, SolveConfig(dt, 1.0))).hamiltonian_drift
              for dt in (0.1, 0.05, 0.025)]
    assert drifts[0] / drifts[1] > 12 and drifts[1] / drifts[2] > 12


def _cos_traveling(g, times):
    return Trajectory(EquationSpec.bo(), g, times, tuple(from_modes(g, {1: 0.5 * np.exp(-1j * t)}) for t in times))


def test_galilean_tau_examples():
    g = make_grid(1.0, 16)
    times = np.linspace(0, 1, 11)
    tr = _cos_traveling(g, times)  # cos(x - t)
    assert hs_error(galilean_tau(tr, 0.0), tr, 0) == 0
    shifted = galilean_tau(tr, 1.0)
    for f in shifted.fields:
        assert f.allclose(from_modes(g, {1: 0.5}), atol=1e-16)
    with pytest.raises(ValueError):
        galilean_tau(tr.fields[0], 1.0)
    assert galilean_tau(tr.fields[3], 1.0, t=times[3]).allclose(from_modes(g, {1: 0.5}), atol=1e-16)


def test_galilean_tau_is_isometry(rng):
    g = make_grid(1.0, 64)
    times = np.linspace(0, 1, 5)
    a = Trajectory(EquationSpec.bo(), g, times, tuple(random_field(rng, g) for _ in times))
    b = Trajectory(EquationSpec.bo(), g, times, tuple(random_field(rng, g) for _ in times))
    for s in (0, 1, 2.5):
        assert hs_error(galilean_tau(a, 0.7), galilean_tau(b, 0.7), s) == pytest.approx(hs_error(a, b, s), rel=1e-14)


def test_galilean_tau_continuity():
    g = make_grid(1.0, 128)
    tr = solve(EquationSpec.bo(), default_profile(g), SolveConfig(1e-2, 1.0, snapshot_stride=10))
    errs = [hs_error(galilean_tau(tr, 2.0**-k), tr, 1.0) for k in range(11)]
    for a, b in zip(errs, errs[1:]):
        assert b < a or b < 1e-12
    assert errs[-1] < 2e-3 * errs[0]


def test_gamma_examples():
    g = make_grid(1.0, 32)
    times = np.linspace(0, 1, 5)
    tr = solve(EquationSpec.ilw(1.0), default_profile(g) + 0.2, SolveConfig(0.05, 1.0, snapshot_stride=5))
    assert hs_error(gamma_transform(solve(EquationSpec.bo(), default_profile(g), SolveConfig(0.25, 1.0)), 0.0),
                    solve(EquationSpec.bo(), default_profile(g), SolveConfig(0.25, 1.0)), 0) == 0
    const = Trajectory(EquationSpec.bo(), g, times, tuple(from_modes(g, {0: 0.4}) for _ in times))
    assert all(np.max(np.abs(f.coeffs)) == 0 for f in gamma_transform(const, 0.4).fields)
    red = gamma_transform(tr, 0.2)
    assert all(abs(f.coeffs[0]) < 1e-16 for f in red.fields)
    assert hs_error(gamma_inverse(red, 0.2), tr, 0) < 1e-13


def test_gamma_maps_solutions_to_solutions():
    g = make_grid(1.0, 128)
    u0 = default_profile(g)
    cfg = SolveConfig(1e-2, 1.0, snapshot_stride=10)
    mu = 0.15
    with_mean = solve(EquationSpec.bo(), u0 + mu, cfg)
    without = solve(EquationSpec.bo(), u0, cfg)
    assert hs_error(gamma_transform(with_mean, mu), without, 0) < 1e-8


def test_ilw_and_renormalized_related_by_tau():
    g = make_grid(1.0, 128)
    u0 = default_profile(g)
    cfg = SolveConfig(1e-2, 1.0, snapshot_stride=10)
    delta = 2.0
    ilw = solve(EquationSpec.ilw(delta), u0, cfg)
    ren = solve(EquationSpec.renorm(delta), u0, cfg)
    assert hs_error(galilean_tau(ilw, 1.0 / delta), ren, 0) < 1e-8


def test_scale_field_l2_identity(rng):
    from ilwlab.diagnostics import l2_norm

    g = make_grid(1.0, 64)
    u = random_field(rng, g)
    for lam in (1.0, 2.0, 3.5):
        assert l2_norm(scale_field(u, lam)) == pytest.approx(lam**-0.5 * l2_norm(u), rel=1e-14)
    assert mass(scale_field(u, 1.0)) == mass(u)


def test_scale_transform_identity_and_checks():
    g = make_grid(1.0, 32)
    tr = solve(EquationSpec.renorm(1.0), default_profile(g), SolveConfig(0.05, 0.5))
    same = scale_transform(tr, 1.0)
    assert hs_error(same, tr, 0) == 0
    with pytest.raises(ValueError):
        scale_transform(tr, 0.5)
    with pytest.raises(ValueError):
        scale_transform(tr, 2.0, target_times=tr.times)
    ilw = solve(EquationSpec.ilw(1.0), default_profile(g), SolveConfig(0.05, 0.5))
    with pytest.raises(ValueError):
        scale_transform(ilw, 2.0)


@pytest.mark.parametrize("lam", [2.0, 3.0])
def test_scaling_maps_solutions(lam):
    g = make_grid(1.0, 128)
    u0 = default_profile(g)
    src = solve(EquationSpec.renorm(1.0), u0, SolveConfig(1e-2 / lam**2, 0.5 / lam**2, snapshot_stride=5))
    mapped = scale_transform(src, lam)
    assert mapped.eq == EquationSpec.renorm(lam)
    tgt = solve(EquationSpec.renorm(lam), scale_field(u0, lam), SolveConfig(1e-2, 0.5, snapshot_stride=5))
    assert hs_error(mapped, tgt, 0) < 1e-8


def test_trajectory_helpers():
    g = make_grid(1.0, 32)
    tr = solve(EquationSpec.bo(), default_profile(g), SolveConfig(0.1, 0.5))
    assert len(tr) == 6 and tr.dt == pytest.approx(0.1)
    assert tr.coeff_array().shape == (6, 32)
    assert tr[2] is tr.fields[2]
    with pytest.raises(ValueError):
        Trajectory(EquationSpec.bo(), g, np.array([0.0, 0.1]), (tr.fields[0],))
