"""Fourier multiplier operators: Hilbert, Tilbert, G_delta, Q_delta and friends.

All symbols are total functions of the physical frequency ``xi``.  Operators
that involve ``coth`` are evaluated through :func:`stable_coth_minus_sgn` and
:func:`stable_coth_minus_recip`, which keep the exponentially small tail
``coth(x) - sgn(x)`` instead of rounding ``coth`` to +-1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import bernoulli

from ilwlab.fourier import SpectralField, bracket

__all__ = [
    "MultiplierSpec",
    "Hilbert",
    "Tilbert",
    "Gdelta",
    "Qdelta",
    "Dx",
    "DxInv",
    "Bessel",
    "Riesz",
    "BOPropagator",
    "symbol",
    "apply",
    "stable_coth_minus_sgn",
    "stable_coth_minus_recip",
    "smoothing_sup",
]

_ASYMPTOTIC_SWITCH = 350.0

# coth(x) - 1/x = sum_{k>=1} 2^{2k} B_{2k} x^{2k-1} / (2k)!, |x| < pi
_N_SERIES = 14
_SERIES = np.array(
    [2.0 ** (2 * k) * bernoulli(2 * k)[-1] / math.factorial(2 * k) for k in range(1, _N_SERIES + 1)]
)
_SERIES_RADIUS = 0.5


def stable_coth_minus_sgn(x):
    """``coth(x) - sgn(x) = sgn(x) * 2 / (exp(2|x|) - 1)`` for ``x != 0``."""
    x = np.asarray(x, dtype=float)
    if np.any(x == 0):
        raise ValueError("coth(x) - sgn(x) is undefined at x = 0")
    a = np.abs(x)
    with np.errstate(over="ignore"):
        direct = 2.0 / np.expm1(2.0 * np.minimum(a, _ASYMPTOTIC_SWITCH))
    e = np.exp(-2.0 * a)
    tail = 2.0 * e / (1.0 - e)
    out = np.sign(x) * np.where(a > _ASYMPTOTIC_SWITCH, tail, direct)
    return out if out.ndim else float(out)


def stable_coth_minus_recip(x):
    """``coth(x) - 1/x`` with the value 0 at ``x = 0``.

    Uses the Bernoulli series near the origin, where the direct difference
    cancels catastrophically.
    """
    x = np.asarray(x, dtype=float)
    a = np.abs(x)
    small = a < _SERIES_RADIUS
    x2 = x * x
    series = np.zeros_like(x)
    for c in _SERIES[::-1]:
        series = series * x2 + c
    series = series * x
    safe = np.where(small, 1.0, x)
    a_safe = np.abs(safe)
    big = np.sign(safe) * (1.0 + np.abs(stable_coth_minus_sgn(a_safe))) - 1.0 / safe
    out = np.where(small, series, big)
    return out if out.ndim else float(out)


_KINDS = {
    # kind: (parameter name or None, symmetry class)
    "hilbert": (None, "imag-odd"),
    "tilbert": ("delta", "imag-odd"),
    "gdelta": ("delta", "imag-odd"),
    "qdelta": ("delta", "real-even"),
    "dx": (None, "imag-odd"),
    "dxinv": (None, "imag-odd"),
    "bessel": ("s", "real-even"),
    "riesz": ("s", "real-even"),
    "bo_propagator": ("t", "unimodular-hermitian"),
}


@dataclass(frozen=True)
class MultiplierSpec:
    kind: str
    param: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown multiplier kind {self.kind!r}")
        pname, _ = _KINDS[self.kind]
        if pname is None:
            if self.param is not None:
                raise ValueError(f"{self.kind} takes no parameter")
            return
        if self.param is None:
            raise ValueError(f"{self.kind} requires parameter {pname}")
        p = float(self.param)
        if pname == "delta" and not p > 0:
            raise ValueError(f"delta must be positive (inf allowed), got {p}")
        if pname != "delta" and not np.isfinite(p):
            raise ValueError(f"{pname} must be finite, got {p}")
        object.__setattr__(self, "param", p)

    @property
    def symmetry(self) -> str:
        return _KINDS[self.kind][1]

    def __call__(self, xi):
        return symbol(self, xi)


def Hilbert():
    return MultiplierSpec("hilbert")


def Tilbert(delta):
    return MultiplierSpec("tilbert", delta)


def Gdelta(delta):
    return MultiplierSpec("gdelta", delta)


def Qdelta(delta):
    return MultiplierSpec("qdelta", delta)


def Dx():
    return MultiplierSpec("dx")


def DxInv():
    return MultiplierSpec("dxinv")


def Bessel(s):
    return MultiplierSpec("bessel", s)


def Riesz(s):
    return MultiplierSpec("riesz", s)


def BOPropagator(t):
    return MultiplierSpec("bo_propagator", t)


def _qdelta_real(delta, xi):
    """xi * (coth(delta xi) - sgn xi) = 2|xi| / (exp(2 delta |xi|) - 1)."""
    out = np.zeros_like(xi)
    if np.isinf(delta):
        return out
    nz = xi != 0
    a = np.abs(xi[nz])
    out[nz] = a * np.abs(stable_coth_minus_sgn(delta * a))
    return out


def symbol(spec: MultiplierSpec, xi):
    """Complex symbol of ``spec`` at physical frequency ``xi``."""
    xi = np.asarray(xi, dtype=float)
    scalar = xi.ndim == 0
    xi = np.atleast_1d(xi)
    if not np.all(np.isfinite(xi)):
        raise ValueError("frequencies must be finite")
    kind, p = spec.kind, spec.param
    sgn = np.sign(xi)
    nz = xi != 0
    out = np.zeros(xi.shape, dtype=np.complex128)
    if kind == "hilbert":
        out = -1j * sgn
    elif kind == "tilbert":
        if np.isinf(p):
            out = -1j * sgn
        else:
            tail = np.zeros_like(xi)
            tail[nz] = stable_coth_minus_sgn(p * xi[nz])
            out = -1j * (sgn + tail)
    elif kind == "gdelta":
        if np.isinf(p):
            out = -1j * sgn
        else:
            out = -1j * stable_coth_minus_recip(p * xi)
    elif kind == "qdelta":
        out = _qdelta_real(p, xi).astype(np.complex128)
    elif kind == "dx":
        out = 1j * xi
    elif kind == "dxinv":
        out[nz] = -1j / xi[nz]
    elif kind == "bessel":
        out = bracket(xi) ** p + 0j
    elif kind == "riesz":
        r = np.zeros_like(xi)
        r[nz] = np.abs(xi[nz]) ** p
        if p == 0:
            r[:] = 1.0
        out = r + 0j
    elif kind == "bo_propagator":
        out = np.exp(1j * p * np.abs(xi) * xi)
    out = np.asarray(out, dtype=np.complex128)
    return out[0] if scalar else out


def apply(spec: MultiplierSpec, field: SpectralField) -> SpectralField:
    """Multiply each coefficient by the symbol at its physical frequency."""
    xi = field.grid.xi
    sym = symbol(spec, xi)
    if field.real:
        # real -> real requires sym(-xi) == conj(sym(xi)) on the grid
        mirrored = np.conj(np.roll(sym[::-1], 1))
        keep = np.arange(xi.size) != field.grid.nyquist_index
        if not np.array_equal(sym[keep], mirrored[keep]):
            raise AssertionError(f"{spec} breaks Hermitian symmetry on {field.grid}")
    return SpectralField(field.grid, field.coeffs * sym, field.real)


def smoothing_sup(delta: float, s: float, n_max: int) -> tuple[float, float]:
    """Sup of ``<n>^s |Q_delta(n)|`` over ``1 <= |n| <= n_max``.

    Returns the sup and its ratio to ``delta^-1 (1 + delta^-s)``.  For
    ``delta >= 1`` and moderate ``s`` (``s <= 3``) the sup sits at ``|n| = 1``.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    if s < 0:
        raise ValueError("s must be non-negative")
    n = np.arange(1, int(n_max) + 1, dtype=float)
    vals = bracket(n) ** s * _qdelta_real(float(delta), n)
    sup = float(np.max(vals))
    if np.isinf(delta):
        return sup, 0.0
    bound = (1.0 + delta ** (-s)) / delta
    return sup, sup / bound


def smoothing_argmax(delta: float, s: float, n_max: int) -> int:
    n = np.arange(1, int(n_max) + 1, dtype=float)
    vals = bracket(n) ** s * _qdelta_real(float(delta), n)
    return int(n[np.argmax(vals)])
