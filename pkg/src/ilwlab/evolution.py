"""Time integration of ILW-type equations and their exact changes of variables.

All four variants share the form ``u_t = L u + d/dx (u^2)`` with a diagonal,
purely imaginary linear symbol ``L``.  Time stepping is ETDRK4 (Cox-Matthews)
with the phi-function coefficients evaluated by contour averaging
(Kassam-Trefethen), so the linear flow is integrated exactly.
"""

from __future__ import annotations

import enum
import functools
import logging
from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

import numpy as np
import scipy.fft as sfft

from ilwlab import _fft
from ilwlab.fourier import SpectralField, TorusGrid
from ilwlab.multipliers import Gdelta, Qdelta, symbol

__all__ = [
    "Variant",
    "EquationSpec",
    "SolveConfig",
    "Trajectory",
    "BlowUpError",
    "linear_symbol",
    "dealias_mask",
    "nonlinear_rhs",
    "etdrk4_step",
    "solve",
    "galilean_tau",
    "gamma_transform",
    "gamma_inverse",
    "scale_transform",
    "scale_field",
]

log = logging.getLogger(__name__)


class Variant(str, enum.Enum):
    ILW = "ILW"
    RENORM_ILW = "RenormILW"
    BO = "BO"
    SCALED_ILW = "ScaledILW"


@dataclass(frozen=True)
class EquationSpec:
    variant: Variant
    delta: float = np.inf

    def __post_init__(self):
        v = Variant(self.variant)
        object.__setattr__(self, "variant", v)
        if v is Variant.BO:
            object.__setattr__(self, "delta", np.inf)
            return
        d = float(self.delta)
        if not (np.isfinite(d) and d > 0):
            raise ValueError(f"{v.value} needs a finite depth delta > 0, got {self.delta}")
        object.__setattr__(self, "delta", d)

    @classmethod
    def ilw(cls, delta):
        return cls(Variant.ILW, delta)

    @classmethod
    def renorm(cls, delta):
        return cls(Variant.RENORM_ILW, delta)

    @classmethod
    def bo(cls):
        return cls(Variant.BO)

    @classmethod
    def scaled(cls, delta):
        return cls(Variant.SCALED_ILW, delta)


@dataclass(frozen=True)
class SolveConfig:
    dt: float
    t_final: float
    snapshot_stride: int = 1
    dealias: float = 2.0 / 3.0
    blowup_threshold: float = 10.0

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.t_final > 0:
            raise ValueError("t_final must be positive")
        if self.dt > self.t_final:
            raise ValueError("dt must not exceed t_final")
        if int(self.snapshot_stride) < 1:
            raise ValueError("snapshot_stride must be a positive integer")
        if not 0 < self.dealias <= 1:
            raise ValueError("dealias fraction must lie in (0, 1]")
        if not self.blowup_threshold > 1:
            raise ValueError("blowup_threshold must exceed 1")

    @property
    def n_steps(self) -> int:
        n = round(self.t_final / self.dt)
        if abs(n * self.dt - self.t_final) > 1e-9 * self.t_final:
            raise ValueError(f"t_final={self.t_final} is not a multiple of dt={self.dt}")
        return int(n)


@dataclass(frozen=True, eq=False)
class Trajectory:
    eq: EquationSpec
    grid: TorusGrid
    times: np.ndarray
    fields: tuple = dc_field(default=())

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.shape != (len(self.fields),):
            raise ValueError("times and fields must have equal length")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise ValueError("times must be increasing")
        for f in self.fields:
            if f.grid != self.grid:
                raise ValueError("snapshot grid differs from trajectory grid")
        t.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "fields", tuple(self.fields))

    def __len__(self):
        return len(self.fields)

    def __getitem__(self, i):
        return self.fields[i]

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0]) if len(self) > 1 else 0.0

    def coeff_array(self) -> np.ndarray:
        """Stacked coefficients, shape ``(n_snapshots, N)``."""
        return np.stack([f.coeffs for f in self.fields])

    def final(self) -> SpectralField:
        return self.fields[-1]

    def map(self, fn: Callable[[float, SpectralField], SpectralField], eq=None, grid=None):
        fields = [fn(t, f) for t, f in zip(self.times, self.fields)]
        g = grid if grid is not None else (fields[0].grid if fields else self.grid)
        return Trajectory(eq or self.eq, g, self.times, fields)


class BlowUpError(RuntimeError):
    """The L^2 norm left the admissible range; ``trajectory`` holds the
    snapshots computed before the failure."""

    def __init__(self, message, trajectory=None, time=None):
        super().__init__(message)
        self.trajectory = trajectory
        self.time = time


# --- symbols -----------------------------------------------------------

def linear_symbol(eq: EquationSpec, xi):
    """Symbol of the linear part ``L`` in ``u_t = L u + (u^2)_x``."""
    xi = np.asarray(xi, dtype=float)
    v = eq.variant
    if v is Variant.BO:
        return 1j * np.abs(xi) * xi
    if v is Variant.RENORM_ILW:
        # xi^2 coth(delta xi) = |xi| xi + xi * Q_delta(xi)
        return 1j * (np.abs(xi) * xi + xi * symbol(Qdelta(eq.delta), xi).real)
    # G_delta d_x^2 has symbol -i m(xi) * (-xi^2)
    m = 1j * symbol(Gdelta(eq.delta), xi)
    out = 1j * xi * xi * m.real
    if v is Variant.SCALED_ILW:
        out = out * (3.0 / eq.delta)
    return out


def dealias_mask(n_points: int, fraction: float = 2.0 / 3.0) -> np.ndarray:
    """Boolean mask over the non-negative modes ``0..N/2`` (rfft layout)."""
    n = np.arange(n_points // 2 + 1)
    return n < fraction * n_points / 2.0


# --- right-hand side on rfft half spectra --------------------------------

def _half(field: SpectralField) -> np.ndarray:
    N = field.n_points
    h = np.zeros(N // 2 + 1, dtype=np.complex128)
    h[: N // 2] = field.coeffs[: N // 2]
    return h


def _full(grid: TorusGrid, half: np.ndarray) -> SpectralField:
    N = grid.n_points
    c = np.zeros(N, dtype=np.complex128)
    c[: N // 2] = half[: N // 2]
    return SpectralField(grid, c, True)


def _make_rhs(grid: TorusGrid, fraction: float):
    N = grid.n_points
    mask = dealias_mask(N, fraction)
    ik = 1j * np.arange(N // 2 + 1) / grid.lam
    w = _fft.workers()

    def rhs(h):
        u = sfft.irfft(h * mask * N, n=N, workers=w)
        sq = sfft.rfft(u * u, workers=w) / N
        return ik * mask * sq

    return rhs


def nonlinear_rhs(u: SpectralField, dealias: float = 2.0 / 3.0) -> SpectralField:
    """``d/dx (u^2)`` with the square dealiased by truncation."""
    if not u.real:
        raise ValueError("nonlinear_rhs expects a real field")
    out = _make_rhs(u.grid, dealias)(_half(u))
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("NaN or inf in nonlinear term")
    return _full(u.grid, out)


# --- ETDRK4 --------------------------------------------------------------

_CONTOUR_POINTS = 32
_CONTOUR_RADIUS = 1.0


@functools.lru_cache(maxsize=64)
def _etd_coefficients(eq: EquationSpec, grid: TorusGrid, dt: float):
    N = grid.n_points
    xi = np.arange(N // 2 + 1) / grid.lam
    L = dt * linear_symbol(eq, xi)
    L[-1] = 0.0
    roots = _CONTOUR_RADIUS * np.exp(
        2j * np.pi * (np.arange(1, _CONTOUR_POINTS + 1) - 0.5) / _CONTOUR_POINTS
    )
    z = L[:, None] + roots[None, :]
    ez = np.exp(z)
    z3 = z**3
    q = dt * np.mean((np.exp(z / 2) - 1.0) / z, axis=1)
    f1 = dt * np.mean((-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3, axis=1)
    f2 = dt * np.mean((2.0 + z + ez * (z - 2.0)) / z3, axis=1)
    f3 = dt * np.mean((-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3, axis=1)
    coeffs = (np.exp(L), np.exp(L / 2), q, f1, f2, f3)
    for c in coeffs:
        c.setflags(write=False)
    return coeffs


def _etd_step(h, coeffs, rhs):
    E, E2, q, f1, f2, f3 = coeffs
    Nv = rhs(h)
    a = E2 * h + q * Nv
    Na = rhs(a)
    b = E2 * h + q * Na
    Nb = rhs(b)
    c = E2 * a + q * (2.0 * Nb - Nv)
    Nc = rhs(c)
    return E * h + f1 * Nv + 2.0 * f2 * (Na + Nb) + f3 * Nc


def etdrk4_step(
    u: SpectralField,
    eq: EquationSpec,
    dt: float,
    dealias: float = 2.0 / 3.0,
    nonlinearity: Callable[[np.ndarray], np.ndarray] | None = None,
) -> SpectralField:
    """One ETDRK4 step.

    ``nonlinearity`` overrides the default ``(u^2)_x``; it acts on the rfft
    half spectrum (modes ``0..N/2``).  Pass ``lambda h: 0 * h`` to integrate
    the linear flow alone.
    """
    rhs = nonlinearity or _make_rhs(u.grid, dealias)
    out = _etd_step(_half(u), _etd_coefficients(eq, u.grid, float(dt)), rhs)
    if not np.all(np.isfinite(out)):
        raise BlowUpError("non-finite values after ETDRK4 step")
    return _full(u.grid, out)


def _l2(h) -> float:
    # coefficient l^2 norm from the half spectrum of a real field
    return float(np.sqrt(abs(h[0]) ** 2 + 2.0 * np.sum(np.abs(h[1:]) ** 2)))


def solve(eq: EquationSpec, u0: SpectralField, config: SolveConfig) -> Trajectory:
    """Integrate ``eq`` from ``u0`` on ``[0, t_final]``.

    Snapshots are stored at ``k * snapshot_stride * dt``.  Raises
    :class:`BlowUpError` when the L^2 norm exceeds ``blowup_threshold`` times
    its initial value (or turns non-finite).
    """
    if not u0.real:
        raise ValueError("initial datum must be real-valued")
    if eq.variant is Variant.RENORM_ILW:
        scale = max(1.0, float(np.max(np.abs(u0.coeffs))))
        if abs(u0.coeffs[0]) > 1e-14 * scale:
            raise ValueError("renormalized ILW is posed on mean-zero data")
    grid = u0.grid
    n_steps = config.n_steps
    stride = int(config.snapshot_stride)
    coeffs = _etd_coefficients(eq, grid, float(config.dt))
    rhs = _make_rhs(grid, config.dealias)

    h = _half(u0)
    norm0 = _l2(h)
    limit = config.blowup_threshold * norm0
    times = [0.0]
    fields = [u0]
    for k in range(1, n_steps + 1):
        h = _etd_step(h, coeffs, rhs)
        nrm = _l2(h)
        if not np.isfinite(nrm) or (norm0 > 0 and nrm > limit):
            partial = Trajectory(eq, grid, times, fields)
            raise BlowUpError(
                f"L2 norm {nrm:.3e} exceeded {config.blowup_threshold}x initial "
                f"{norm0:.3e} at t={k * config.dt:.6g}",
                trajectory=partial,
                time=k * config.dt,
            )
        if k % stride == 0:
            times.append(k * config.dt)
            fields.append(_full(grid, h))
    log.debug("solved %s on %s: %d steps", eq, grid, n_steps)
    return Trajectory(eq, grid, times, fields)


# --- exact transforms ------------------------------------------------------

def _shift(field: SpectralField, shift: float) -> SpectralField:
    """``f(x + shift)`` as a spectral phase."""
    phase = np.exp(1j * field.grid.xi * shift)
    return SpectralField(field.grid, field.coeffs * phase, field.real)


def galilean_tau(obj, h: float, t: float | None = None):
    """Translation ``tau_h u (t, x) = u(t, x + h t)``.

    Acts on a :class:`Trajectory` (each snapshot at its own time) or on a
    single field at an explicit time ``t``.
    """
    if isinstance(obj, Trajectory):
        return obj.map(lambda tt, f: _shift(f, h * tt))
    if t is None:
        raise ValueError("a time t is required to translate a single field")
    return _shift(obj, h * t)


def gamma_transform(traj: Trajectory, mu: float) -> Trajectory:
    """``u(t, x - 2 mu t) - mu``: maps an ILW/BO solution of mean ``mu`` to a
    mean-zero solution of the same equation."""
    return traj.map(lambda t, f: _shift(f, -2.0 * mu * t) - mu)


def gamma_inverse(traj: Trajectory, mu: float) -> Trajectory:
    return traj.map(lambda t, f: _shift(f + mu, 2.0 * mu * t))


def scale_field(field: SpectralField, lam: float) -> SpectralField:
    """``lam^-1 f(x / lam)`` on the torus dilated by ``lam``."""
    grid = TorusGrid(field.grid.lam * lam, field.grid.n_points)
    return SpectralField(grid, field.coeffs / lam, field.real)


def scale_transform(
    traj: Trajectory, lam: float, target_times: Sequence[float] | None = None
) -> Trajectory:
    """``S_lam v (t, x) = lam^-1 v(lam^-2 t, lam^-1 x)``.

    A source snapshot at time ``s`` becomes a target snapshot at ``lam^2 s``;
    the mode index is unchanged, only the physical frequency is divided by
    ``lam``.  Renormalized ILW with depth ``delta`` maps to depth
    ``lam * delta``; BO maps to BO.
    """
    if lam < 1:
        raise ValueError("scaling parameter must satisfy lam >= 1")
    if traj.eq.variant not in (Variant.RENORM_ILW, Variant.BO):
        raise ValueError(f"{traj.eq.variant.value} is not invariant under S_lambda")
    new_times = lam**2 * traj.times
    if target_times is not None:
        tt = np.asarray(target_times, dtype=float)
        if tt.shape != new_times.shape or not np.allclose(tt, new_times, rtol=1e-12, atol=1e-14):
            raise ValueError("target times are not lam^2 times the source times")
    if traj.eq.variant is Variant.BO:
        eq = traj.eq
    else:
        eq = EquationSpec(Variant.RENORM_ILW, traj.eq.delta * lam)
    fields = [scale_field(f, lam) for f in traj.fields]
    return Trajectory(eq, fields[0].grid, new_times, fields)
