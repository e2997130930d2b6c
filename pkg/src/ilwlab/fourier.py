"""Torus geometry, spectral fields, frequency projectors and Sobolev norms.

Fourier convention on the dilated torus T_lambda = R / (2 pi lambda Z)::

    f_hat(n) = 1/(2 pi lambda) * int f(x) exp(-i n x / lambda) dx
    f(x)     = sum_n f_hat(n) exp(i n x / lambda)

so the physical frequency of mode ``n`` is ``n / lambda``.  Coefficient arrays
are stored in FFT order (0, 1, ..., N/2-1, -N/2, ..., -1); ``centered()``
returns them in ascending mode order.  The mode -N/2 is always zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from ilwlab import _fft

__all__ = [
    "TorusGrid",
    "SpectralField",
    "make_grid",
    "transform",
    "inverse_transform",
    "from_modes",
    "zero_field",
    "resample",
    "sobolev_norm",
    "eta",
    "lp_symbol",
    "lp_project",
    "sharp_symbol",
    "sharp_project",
    "smooth_symbol",
    "smooth_project",
    "is_hermitian",
    "dealias_symbol",
    "product",
    "pad_coeffs",
    "bracket",
]


@dataclass(frozen=True)
class TorusGrid:
    """Uniform grid of ``n_points`` nodes on the torus of period ``2 pi lam``."""

    lam: float
    n_points: int

    def __post_init__(self):
        n = self.n_points
        if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
            raise TypeError(f"n_points must be an integer, got {n!r}")
        if n % 2 != 0:
            raise ValueError(f"n_points must be even, got {n}")
        if n < 8:
            raise ValueError(f"n_points must be at least 8, got {n}")
        if not np.isfinite(self.lam) or self.lam <= 0:
            raise ValueError(f"lambda must be positive and finite, got {self.lam}")
        object.__setattr__(self, "n_points", int(n))
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def period(self) -> float:
        return 2 * np.pi * self.lam

    @property
    def nodes(self) -> np.ndarray:
        return self.period * np.arange(self.n_points) / self.n_points

    @property
    def modes(self) -> np.ndarray:
        """Integer mode indices in FFT order."""
        return np.fft.fftfreq(self.n_points, 1.0 / self.n_points).astype(np.int64)

    @property
    def xi(self) -> np.ndarray:
        """Physical frequencies ``n / lambda`` in FFT order."""
        return self.modes / self.lam

    @property
    def nyquist_index(self) -> int:
        return self.n_points // 2

    def with_points(self, n_points: int) -> "TorusGrid":
        return TorusGrid(self.lam, n_points)


def make_grid(lam: float, n_points: int) -> TorusGrid:
    return TorusGrid(lam, n_points)


def _mirror(c: np.ndarray) -> np.ndarray:
    """Hermitian mirror ``c(-n)`` -> conj for an FFT-ordered array."""
    return np.conj(np.roll(c[::-1], 1))


def is_hermitian(coeffs: np.ndarray, rtol: float = 1e-13) -> bool:
    scale = np.max(np.abs(coeffs), initial=0.0)
    if scale == 0:
        return True
    return bool(np.max(np.abs(coeffs - _mirror(coeffs))) <= rtol * scale)


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier coefficients of a field on a :class:`TorusGrid`.

    ``real`` marks a real-valued field; such fields carry exact Hermitian
    symmetry.  Complex-valued fields (e.g. gauge variables) use ``real=False``.
    """

    grid: TorusGrid
    coeffs: np.ndarray
    real: bool = True

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128)
        if c.shape != (self.grid.n_points,):
            raise ValueError(
                f"coefficient array of shape {c.shape} does not match grid "
                f"with {self.grid.n_points} points"
            )
        if not np.all(np.isfinite(c)):
            raise ValueError("non-finite Fourier coefficients")
        c[self.grid.nyquist_index] = 0.0
        if self.real:
            # imposes exact symmetry from the non-negative half
            c = _symmetrize(c)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    # --- accessors -----------------------------------------------------
    @property
    def n_points(self) -> int:
        return self.grid.n_points

    def mode(self, n: int) -> complex:
        N = self.grid.n_points
        if not -N // 2 <= n < N // 2:
            return 0j
        return complex(self.coeffs[n % N])

    def centered(self) -> np.ndarray:
        """Coefficients in ascending mode order -N/2..N/2-1."""
        return np.fft.fftshift(self.coeffs)

    @property
    def mean(self) -> float | complex:
        c0 = self.coeffs[0]
        return float(c0.real) if self.real else complex(c0)

    def samples(self, n_points: int | None = None) -> np.ndarray:
        """Physical values on a uniform grid (zero-padded when finer)."""
        if n_points is None or n_points == self.n_points:
            return inverse_transform(self)
        return inverse_transform(resample(self, n_points))

    # --- arithmetic ----------------------------------------------------
    def _like(self, coeffs, real=None):
        return SpectralField(self.grid, coeffs, self.real if real is None else real)

    def _check_grid(self, other: "SpectralField"):
        if other.grid != self.grid:
            raise ValueError(f"grid mismatch: {self.grid} vs {other.grid}")

    def __add__(self, other):
        if isinstance(other, SpectralField):
            self._check_grid(other)
            return self._like(self.coeffs + other.coeffs, self.real and other.real)
        c = self.coeffs.copy()
        c[0] += other
        return self._like(c, self.real and np.isrealobj(other))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, SpectralField):
            return self + (-other)
        return self + (-other)

    def __neg__(self):
        return self._like(-self.coeffs)

    def __mul__(self, scalar):
        if isinstance(scalar, SpectralField):
            raise TypeError("use a dealiased product for field-field multiplication")
        real = self.real and np.isreal(scalar)
        return self._like(self.coeffs * scalar, real)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / scalar)

    def conj(self) -> "SpectralField":
        return self._like(_mirror(self.coeffs))

    def real_part(self) -> "SpectralField":
        return SpectralField(self.grid, 0.5 * (self.coeffs + _mirror(self.coeffs)), True)

    def allclose(self, other: "SpectralField", atol: float = 1e-14) -> bool:
        self._check_grid(other)
        return bool(np.max(np.abs(self.coeffs - other.coeffs)) <= atol)


def _symmetrize(c: np.ndarray) -> np.ndarray:
    N = c.shape[0]
    h = N // 2
    out = np.empty_like(c)
    out[0] = c[0].real
    out[1:h] = c[1:h]
    out[h] = 0.0
    out[h + 1 :] = np.conj(c[1:h][::-1])
    return out


def transform(samples, grid: TorusGrid, real: bool | None = None) -> SpectralField:
    """Fourier coefficients of grid samples."""
    x = np.asarray(samples)
    if x.shape != (grid.n_points,):
        raise ValueError(f"expected {grid.n_points} samples, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("samples contain NaN or inf")
    if real is None:
        real = np.isrealobj(x)
    N = grid.n_points
    if real:
        half = sfft.rfft(np.real(x), workers=_fft.workers()) / N
        c = np.zeros(N, dtype=np.complex128)
        c[: N // 2] = half[: N // 2]
        return SpectralField(grid, c, True)
    return SpectralField(grid, sfft.fft(x, workers=_fft.workers()) / N, False)


def inverse_transform(field: SpectralField) -> np.ndarray:
    """Grid samples of a field (real array for real fields)."""
    N = field.n_points
    if field.real:
        half = np.zeros(N // 2 + 1, dtype=np.complex128)
        half[: N // 2] = field.coeffs[: N // 2]
        return sfft.irfft(half * N, n=N, workers=_fft.workers())
    return sfft.ifft(field.coeffs * N, workers=_fft.workers())


def from_modes(grid: TorusGrid, modes: dict, real: bool = True) -> SpectralField:
    """Build a field from a ``{mode: coefficient}`` mapping.

    Real fields need only the non-negative modes; negative ones follow by
    symmetry.  Pass ``real=False`` for a complex-valued field such as
    ``exp(i x)``.
    """
    c = np.zeros(grid.n_points, dtype=np.complex128)
    for n, v in modes.items():
        if not -grid.n_points // 2 < n < grid.n_points // 2:
            raise ValueError(f"mode {n} is not representable on {grid}")
        c[n % grid.n_points] = v
    if real:
        for n in modes:
            if n < 0 and n % grid.n_points and -n not in modes:
                c[-n] = np.conj(c[n % grid.n_points])
            elif n > 0:
                c[(-n) % grid.n_points] = np.conj(c[n])
    return SpectralField(grid, c, real)


def zero_field(grid: TorusGrid) -> SpectralField:
    return SpectralField(grid, np.zeros(grid.n_points, dtype=np.complex128))


def pad_coeffs(coeffs: np.ndarray, m: int) -> np.ndarray:
    """Copy an FFT-ordered array onto ``m`` modes (zero-pad or truncate)."""
    n = coeffs.shape[-1]
    out = np.zeros(coeffs.shape[:-1] + (m,), dtype=np.complex128)
    k = min(n, m) // 2
    out[..., :k] = coeffs[..., :k]
    out[..., m - k + 1 :] = coeffs[..., n - k + 1 :]
    return out


def resample(field: SpectralField, n_points: int) -> SpectralField:
    """Same function on a grid with a different number of points."""
    grid = field.grid.with_points(n_points)
    return SpectralField(grid, pad_coeffs(field.coeffs, n_points), field.real)


def bracket(xi):
    """Japanese bracket <xi> = sqrt(1 + xi^2)."""
    return np.sqrt(1.0 + np.square(xi))


def sobolev_norm(field: SpectralField, s: float) -> float:
    r"""H^s norm ``(sum_n <n/lambda>^{2s} |f_hat(n)|^2)^{1/2}`` (no 2 pi factor)."""
    w = bracket(field.grid.xi) ** s
    return float(np.sqrt(np.sum((w * np.abs(field.coeffs)) ** 2)))


# --- Littlewood-Paley --------------------------------------------------

ETA_PLATEAU = 5.0 / 4.0
ETA_SUPPORT = 8.0 / 5.0


def _smoothstep(theta):
    return theta**3 * (10.0 - 15.0 * theta + 6.0 * theta**2)


def eta(r):
    """Bump: 1 on [0, 5/4], 0 beyond 8/5, quintic smoothstep in between."""
    r = np.abs(np.asarray(r, dtype=float))
    theta = np.clip((ETA_SUPPORT - r) / (ETA_SUPPORT - ETA_PLATEAU), 0.0, 1.0)
    out = _smoothstep(theta)
    out = np.where(r <= ETA_PLATEAU, 1.0, out)
    out = np.where(r >= ETA_SUPPORT, 0.0, out)
    return out if out.ndim else float(out)


def lp_symbol(j: int, xi):
    """Dyadic Littlewood-Paley symbol ``phi_j(xi)``."""
    if j < 0:
        raise ValueError(f"j must be non-negative, got {j}")
    a = np.abs(np.asarray(xi, dtype=float))
    if j == 0:
        return eta(a)
    return eta(a / 2.0**j) - eta(a / 2.0 ** (j - 1))


def _apply_symbol(field: SpectralField, symbol: np.ndarray) -> SpectralField:
    return SpectralField(field.grid, field.coeffs * symbol, field.real)


def lp_project(field: SpectralField, j: int) -> SpectralField:
    return _apply_symbol(field, lp_symbol(j, field.grid.xi))


def lp_max_level(grid: TorusGrid) -> int:
    """Smallest J with phi_0 + ... + phi_J = 1 on every retained mode."""
    top = np.max(np.abs(grid.xi))
    return max(0, int(np.ceil(np.log2(max(top, 1.0)))) + 1)


SHARP_KINDS = ("P+", "P-", "P!=0", "P0", "Pi<=k")


def sharp_symbol(kind: str, xi, k: float | None = None):
    xi = np.asarray(xi, dtype=float)
    if kind == "P+":
        return (xi > 0).astype(float)
    if kind == "P-":
        return (xi < 0).astype(float)
    if kind == "P!=0":
        return (xi != 0).astype(float)
    if kind == "P0":
        return (xi == 0).astype(float)
    if kind == "Pi<=k":
        if k is None or k < 0:
            raise ValueError("Pi<=k requires k >= 0")
        return (np.abs(xi) <= k).astype(float)
    raise ValueError(f"unknown sharp projector {kind!r}; expected one of {SHARP_KINDS}")


def sharp_project(field: SpectralField, kind: str, k: float | None = None) -> SpectralField:
    """Indicator-multiplier projectors. ``P+`` maps real fields to complex ones."""
    sym = sharp_symbol(kind, field.grid.xi, k)
    real = field.real and kind not in ("P+", "P-")
    return SpectralField(field.grid, field.coeffs * sym, real)


SMOOTH_KINDS = ("P_hi", "P_HI", "P_lo", "P_LO", "P+hi", "P+HI", "P-hi", "P-HI")


def smooth_symbol(kind: str, xi):
    xi = np.asarray(xi, dtype=float)
    a = np.abs(xi)
    if kind == "P_hi":
        return 1.0 - eta(a)
    if kind == "P_HI":
        return 1.0 - eta(a / 4.0)
    if kind == "P_lo":
        return eta(a)
    if kind == "P_LO":
        return eta(a / 4.0)
    if kind in ("P+hi", "P-hi", "P+HI", "P-HI"):
        sign = sharp_symbol("P+" if kind[1] == "+" else "P-", xi)
        return sign * smooth_symbol("P_" + kind[2:], xi)
    raise ValueError(f"unknown smooth projector {kind!r}; expected one of {SMOOTH_KINDS}")


def smooth_project(field: SpectralField, kind: str) -> SpectralField:
    sym = smooth_symbol(kind, field.grid.xi)
    real = field.real and kind[1] not in "+-"
    return SpectralField(field.grid, field.coeffs * sym, real)


def dealias_symbol(grid: TorusGrid, fraction: float = 2.0 / 3.0) -> np.ndarray:
    """1 on modes ``|n| < fraction * N/2``, 0 elsewhere (FFT order)."""
    return (np.abs(grid.modes) < fraction * grid.n_points / 2.0).astype(float)


def product(a: SpectralField, b: SpectralField, fraction: float = 2.0 / 3.0) -> SpectralField:
    """Pointwise product with the 2/3 truncation applied to factors and result.

    Retained modes of the result are exact whenever ``fraction <= 2/3``.
    """
    if a.grid != b.grid:
        raise ValueError("product of fields on different grids")
    mask = dealias_symbol(a.grid, fraction)
    fa = SpectralField(a.grid, a.coeffs * mask, a.real)
    fb = SpectralField(b.grid, b.coeffs * mask, b.real)
    real = a.real and b.real
    out = transform(inverse_transform(fa) * inverse_transform(fb), a.grid, real=real)
    return SpectralField(a.grid, out.coeffs * mask, real)
