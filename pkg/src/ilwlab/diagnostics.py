"""Conserved quantities, trajectory error metrics and space-time norms.

Integrals carry the torus measure ``2 pi lambda`` explicitly (``mass`` and
``hamiltonian``), while H^s norms are plain weighted coefficient norms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from ilwlab import _fft
from ilwlab.fourier import SpectralField, bracket, lp_max_level, lp_symbol
from ilwlab.multipliers import Gdelta, Tilbert, symbol
from ilwlab.spacetime import SpaceTimeField

__all__ = [
    "mean",
    "mass",
    "l2_norm",
    "hamiltonian",
    "hamiltonian_parts",
    "ConservationReport",
    "conservation_report",
    "hs_error",
    "spacetime_norm",
    "spacetime_l4",
    "strichartz_ratio",
]


def mean(u: SpectralField) -> float:
    """Spatial mean ``(2 pi lambda)^-1 int u dx``, i.e. the zero mode."""
    return float(u.coeffs[0].real)


def mass(u: SpectralField) -> float:
    """``M(u) = int u^2 dx`` by Parseval."""
    return float(u.grid.period * np.sum(np.abs(u.coeffs) ** 2))


def l2_norm(u: SpectralField) -> float:
    """L^2 norm with the torus measure."""
    return float(np.sqrt(mass(u)))


def _cubic_integral(u: SpectralField) -> float:
    # u^3 has modes up to 3N/2, so a 2N grid integrates it exactly
    N = u.n_points
    M = 2 * N
    half = np.zeros(M // 2 + 1, dtype=np.complex128)
    half[: N // 2] = u.coeffs[: N // 2]
    x = sfft.irfft(half * M, n=M, workers=_fft.workers())
    return float(u.grid.period * np.mean(x**3))


def hamiltonian_parts(u: SpectralField, delta: float, operator: str = "G") -> tuple[float, float]:
    """Quadratic and cubic parts of the Hamiltonian.

    ``operator="G"`` uses ``G_delta`` (conserved by ILW); ``"T"`` uses the
    Tilbert operator ``T_delta`` (conserved by the renormalized flow).  For
    ``delta = inf`` both reduce to the Hilbert transform.
    """
    xi = u.grid.xi
    if operator == "G":
        spec = Gdelta(delta)
    elif operator == "T":
        spec = Tilbert(delta)
    else:
        raise ValueError(f"operator must be 'G' or 'T', got {operator!r}")
    # symbol of (op) d_x: (-i m(xi)) (i xi) = xi m(xi), real and even
    m = (1j * symbol(spec, xi)).real * xi
    m[xi == 0] = 0.0
    quad = 0.5 * u.grid.period * float(np.sum(m * np.abs(u.coeffs) ** 2))
    return quad, _cubic_integral(u) / 3.0


def hamiltonian(u: SpectralField, delta: float, operator: str = "G") -> float:
    """``E_delta(u) = 1/2 int u G_delta u_x dx + 1/3 int u^3 dx``."""
    q, c = hamiltonian_parts(u, delta, operator)
    return q + c


@dataclass(frozen=True)
class ConservationReport:
    times: np.ndarray
    mean: np.ndarray
    mass: np.ndarray
    hamiltonian: np.ndarray
    mean_drift: float
    mass_drift: float
    hamiltonian_drift: float

    def rows(self):
        for row in zip(self.times, self.mean, self.mass, self.hamiltonian):
            yield tuple(float(v) for v in row)

    def summary(self) -> dict:
        return {
            "max_drift_mean": float(self.mean_drift),
            "max_drift_mass": float(self.mass_drift),
            "max_drift_energy": float(self.hamiltonian_drift),
        }


def _rel_drift(series: np.ndarray) -> float:
    ref = abs(series[0])
    dev = float(np.max(np.abs(series - series[0])))
    return dev / ref if ref > 0 else dev


def conservation_report(trajectory, operator: str | None = None) -> ConservationReport:
    """Mean, mass and Hamiltonian per snapshot with their maximal drifts.

    The mean drift is absolute; mass and Hamiltonian drifts are relative to
    the initial value (absolute if that value is zero).  The Hamiltonian uses
    the operator matching the equation: ``T_delta`` for the renormalized
    flow, ``G_delta`` otherwise.
    """
    if len(trajectory) == 0:
        raise ValueError("empty trajectory")
    from ilwlab.evolution import Variant

    eq = trajectory.eq
    if operator is None:
        operator = "T" if eq.variant is Variant.RENORM_ILW else "G"
    fields = trajectory.fields
    mu = np.array([mean(f) for f in fields])
    ms = np.array([mass(f) for f in fields])
    delta = eq.delta
    en = np.array([hamiltonian(f, delta, operator) for f in fields])
    if eq.variant is Variant.SCALED_ILW:
        # the scaled flow conserves (3/delta) * quadratic + cubic
        parts = [hamiltonian_parts(f, delta, "G") for f in fields]
        en = np.array([3.0 / delta * q + c for q, c in parts])
    return ConservationReport(
        times=np.asarray(trajectory.times),
        mean=mu,
        mass=ms,
        hamiltonian=en,
        mean_drift=float(np.max(np.abs(mu - mu[0]))),
        mass_drift=_rel_drift(ms),
        hamiltonian_drift=_rel_drift(en),
    )


def hs_error(traj_a, traj_b, s: float) -> float:
    """``sup_t ||a(t) - b(t)||_{H^s}`` over matching snapshots."""
    if traj_a.grid != traj_b.grid:
        raise ValueError("trajectories live on different grids")
    if len(traj_a) != len(traj_b) or not np.allclose(
        traj_a.times, traj_b.times, rtol=1e-12, atol=1e-14
    ):
        raise ValueError("trajectories are sampled at different times")
    w = bracket(traj_a.grid.xi) ** s
    diff = traj_a.coeff_array() - traj_b.coeff_array()
    return float(np.max(np.sqrt(np.sum((w * np.abs(diff)) ** 2, axis=1))))


# --- space-time norms ---------------------------------------------------

SPACETIME_VARIANTS = ("X", "Z", "Ztilde", "Y")


def _weights(stf: SpaceTimeField, s: float, b: float) -> np.ndarray:
    xi = stf.grid.xi
    mod = stf.taus[None, :] - (np.abs(xi) * xi)[:, None]
    return (bracket(xi) ** s)[:, None] * bracket(mod) ** b


def _x_norm(stf, coeffs, s, b):
    return float(np.sqrt(np.sum((_weights(stf, s, b) * np.abs(coeffs)) ** 2) * stf.dtau))


def _z_norm(stf, coeffs, s, b):
    l1 = np.sum(_weights(stf, s, b) * np.abs(coeffs), axis=1) * stf.dtau
    return float(np.sqrt(np.sum(l1**2)))


def _ztilde_norm(stf, s, b):
    xi = stf.grid.xi
    total = 0.0
    for j in range(lp_max_level(stf.grid) + 1):
        piece = stf.coeffs * lp_symbol(j, xi)[:, None]
        total += _z_norm(stf, piece, s, b)
    # square root of a sum of norms, as in the definition of Z-tilde
    return float(np.sqrt(total))


def spacetime_norm(stf: SpaceTimeField, variant: str, s: float, b: float,
                   window_id: str | None = None) -> float:
    """Discrete X^{s,b}, Z^{s,b}, Ztilde^{s,b} or Y^{s,b} norm of a windowed field.

    Y^{s,b} = X^{s,b} + Ztilde^{s,b-1/2}.  These are norms of one fixed
    extension, hence upper bounds for the restriction norms.
    """
    if window_id is not None and window_id != stf.window_id:
        raise ValueError(f"field was built with window {stf.window_id!r}, not {window_id!r}")
    if variant == "X":
        return _x_norm(stf, stf.coeffs, s, b)
    if variant == "Z":
        return _z_norm(stf, stf.coeffs, s, b)
    if variant == "Ztilde":
        return _ztilde_norm(stf, s, b)
    if variant == "Y":
        return _x_norm(stf, stf.coeffs, s, b) + _ztilde_norm(stf, s, b - 0.5)
    raise ValueError(f"unknown space-time norm {variant!r}; expected one of {SPACETIME_VARIANTS}")


def spacetime_l4(stf: SpaceTimeField) -> float:
    """``||u||_{L^4_{t,x}}`` of the windowed field.

    The spatial integral is exact on a 4N grid; in time the samples are
    summed with the uniform step (the window vanishes to all orders at the
    ends, so this is spectrally accurate).
    """
    N = stf.grid.n_points
    # back to windowed time samples
    phase = np.exp(1j * stf.taus * stf.t0)[None, :]
    samples_t = sfft.ifft(stf.coeffs * phase, axis=1) * np.sqrt(2.0 * np.pi) / stf.dt
    n_keep = int(round((stf.t1 - stf.t0) / stf.dt)) + 1
    samples_t = samples_t[:, :n_keep]
    M = 4 * N
    padded = np.zeros((M, n_keep), dtype=np.complex128)
    k = N // 2
    padded[:k] = samples_t[:k]
    padded[M - k + 1:] = samples_t[N - k + 1:]
    x = sfft.ifft(padded, axis=0, workers=_fft.workers()) * M
    integrand = np.abs(x) ** 4
    total = stf.grid.period * np.mean(integrand, axis=0).sum() * stf.dt
    return float(total**0.25)


def strichartz_ratio(stf: SpaceTimeField) -> float:
    """``||u||_{L^4_{t,x}} / ||u||_{X^{0,3/8}}`` for a windowed field."""
    denom = spacetime_norm(stf, "X", 0.0, 3.0 / 8.0)
    if denom == 0:
        raise ZeroDivisionError("X^{0,3/8} norm vanishes")
    return spacetime_l4(stf) / denom
