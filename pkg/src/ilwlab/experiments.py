"""Experiment protocols: deep-water limit, scaling family, Galilean reduction,
gauge checks, conservation runs and symbol dumps.

Every ``run_*`` function takes an :class:`ExperimentConfig` and returns a
plain report object; :mod:`ilwlab.cli` turns those into CSV/JSON files.
"""

from __future__ import annotations

import dataclasses
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, NamedTuple

import numpy as np

from ilwlab.diagnostics import conservation_report, hs_error, l2_norm
from ilwlab.evolution import (
    EquationSpec,
    SolveConfig,
    Trajectory,
    Variant,
    galilean_tau,
    scale_field,
    scale_transform,
    solve,
)
from ilwlab.fourier import SpectralField, TorusGrid, from_modes, sobolev_norm
from ilwlab.gauge import gauge_state, gauged_residual, reconstruct_check
from ilwlab.multipliers import MultiplierSpec, symbol

__all__ = [
    "EXPERIMENTS",
    "ConfigError",
    "ExperimentConfig",
    "initial_datum",
    "LogLogFit",
    "fit_loglog",
    "ConvergenceReport",
    "run_deepwater",
    "run_scaling_check",
    "run_galilean_check",
    "run_gauge_check",
    "run_conserve",
    "run_solve",
    "run_symbols",
]

log = logging.getLogger(__name__)

EXPERIMENTS = ("solve", "deepwater", "gauge_check", "scaling_check", "galilean_check",
               "conserve", "symbols")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    """Validated experiment configuration (one JSON document).

    ``initial_data`` is either ``{"profile": "default", "a": .., "b": ..}``
    (``a cos(x/lam) + b sin(2x/lam)``), ``{"profile": "constant", "c": ..}``
    or ``{"modes": [[n, re, im], ...]}``; an optional ``"mean"`` is added.
    """

    experiment: str = "solve"
    variant: str = "BO"
    delta: float | None = None
    delta_list: list = field(default_factory=lambda: [1, 2, 4, 8, 16, 32, 64])
    mode: str = "original"
    lam: float = 1.0
    scale_lambda: float = 2.0
    n_points: int = 256
    dt: float = 1e-3
    t_final: float = 1.0
    stride: int = 10
    dealias: float = 2.0 / 3.0
    blowup_threshold: float = 10.0
    initial_data: dict = field(default_factory=lambda: {"profile": "default"})
    sobolev_s_list: list = field(default_factory=lambda: [0.0, 0.5])
    refinements: int = 3
    gauge_factor: int = 4
    symbols: list = field(default_factory=list)
    threads: int = 1
    out_dir: str | None = None

    # --- construction ----------------------------------------------------
    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "ExperimentConfig":
        if not isinstance(doc, dict):
            raise ConfigError("configuration must be a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        aliases = {"lambda": "lam"}
        clean = {}
        for k, v in doc.items():
            key = aliases.get(k, k)
            if key not in known:
                raise ConfigError(f"unknown configuration key {k!r}")
            clean[key] = v
        cfg = cls(**clean)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        def need(cond, msg):
            if not cond:
                raise ConfigError(msg)

        need(self.experiment in EXPERIMENTS, f"experiment must be one of {EXPERIMENTS}")
        try:
            Variant(self.variant)
        except ValueError:
            raise ConfigError(f"unknown variant {self.variant!r}") from None
        need(self.mode in ("original", "renormalized"), "mode must be 'original' or 'renormalized'")
        need(isinstance(self.n_points, int) and self.n_points >= 8 and self.n_points % 2 == 0,
             "n_points must be an even integer >= 8")
        for name in ("lam", "dt", "t_final", "scale_lambda"):
            val = getattr(self, name)
            need(isinstance(val, (int, float)) and val > 0, f"{name} must be positive")
        need(isinstance(self.stride, int) and self.stride >= 1, "stride must be a positive integer")
        need(isinstance(self.threads, int) and self.threads >= 1, "threads must be a positive integer")
        need(isinstance(self.refinements, int) and self.refinements >= 2, "refinements must be >= 2")
        if self.delta is not None:
            need(isinstance(self.delta, (int, float)) and self.delta > 0, "delta must be positive")
        need(isinstance(self.delta_list, list) and all(
            isinstance(d, (int, float)) and d > 0 for d in self.delta_list), "delta_list must hold positive numbers")
        need(isinstance(self.sobolev_s_list, list) and self.sobolev_s_list, "sobolev_s_list must be a non-empty list")
        need(isinstance(self.initial_data, dict), "initial_data must be an object")
        extra = set(self.initial_data) - {"profile", "a", "b", "c", "modes", "mean"}
        need(not extra, f"unknown initial_data keys {sorted(extra)}")
        if self.experiment == "deepwater":
            need(len(self.delta_list) >= 4, "deepwater needs at least four depths")
            need(all(b > a for a, b in zip(self.delta_list, self.delta_list[1:])),
                 "delta_list must be strictly increasing")
        try:
            self.solve_config()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    # --- derived objects -------------------------------------------------
    def grid(self, lam: float | None = None) -> TorusGrid:
        return TorusGrid(self.lam if lam is None else lam, self.n_points)

    def solve_config(self, dt: float | None = None, t_final: float | None = None,
                     stride: int | None = None) -> SolveConfig:
        cfg = SolveConfig(
            dt=self.dt if dt is None else dt,
            t_final=self.t_final if t_final is None else t_final,
            snapshot_stride=self.stride if stride is None else stride,
            dealias=self.dealias,
            blowup_threshold=self.blowup_threshold,
        )
        cfg.n_steps  # raises if t_final is not a multiple of dt
        return cfg

    def equation(self, delta: float | None = None) -> EquationSpec:
        v = Variant(self.variant)
        if v is Variant.BO:
            return EquationSpec.bo()
        d = self.delta if delta is None else delta
        if d is None:
            raise ConfigError(f"{v.value} needs a depth 'delta'")
        return EquationSpec(v, d)


def initial_datum(grid: TorusGrid, spec: dict | None = None) -> SpectralField:
    """Initial field from an ``initial_data`` description (see :class:`ExperimentConfig`)."""
    spec = dict(spec or {"profile": "default"})
    modes: dict[int, complex] = {}
    if "modes" in spec:
        for entry in spec["modes"]:
            n, re, im = entry
            modes[int(n)] = complex(re, im)
    else:
        profile = spec.get("profile", "default")
        if profile == "default":
            a = float(spec.get("a", 0.1))
            b = float(spec.get("b", 0.05))
            # a cos(x) + b sin(2x) on the lowest modes of the grid
            modes = {1: a / 2, 2: -0.5j * b}
        elif profile == "constant":
            modes = {0: float(spec.get("c", 0.0))}
        elif profile == "zero":
            modes = {}
        else:
            raise ConfigError(f"unknown initial profile {profile!r}")
    if "mean" in spec:
        modes[0] = modes.get(0, 0.0) + float(spec["mean"])
    return from_modes(grid, modes)


# --- log-log fitting ---------------------------------------------------

class LogLogFit(NamedTuple):
    slope: float
    intercept: float
    r_squared: float
    degenerate: bool = False

    @property
    def curved(self) -> bool:
        return not self.degenerate and self.r_squared < 0.99


def fit_loglog(pairs) -> LogLogFit:
    """Least-squares line through ``(log delta, log error)``.

    Any zero error makes the series degenerate: it is reported (NaN fit,
    ``degenerate=True``) rather than fitted.
    """
    pairs = [(float(d), float(e)) for d, e in pairs]
    if len(pairs) < 3:
        raise ValueError("need at least three (delta, error) pairs")
    d = np.array([p[0] for p in pairs])
    e = np.array([p[1] for p in pairs])
    if np.any(d <= 0) or np.any(e < 0):
        raise ValueError("depths must be positive and errors non-negative")
    if np.any(e == 0):
        return LogLogFit(math.nan, math.nan, math.nan, True)
    x, y = np.log(d), np.log(e)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    if ss_tot == 0:
        slope = 0.0
    return LogLogFit(float(slope), float(intercept), r2, False)


# --- deep-water limit ----------------------------------------------------

@dataclass
class ConvergenceReport:
    mode: str
    rows: list  # (delta, s, sup_error, runtime_seconds)
    fits: dict  # s -> LogLogFit
    noise_floor: float

    def errors(self, s: float) -> np.ndarray:
        return np.array([r[2] for r in self.rows if r[1] == s])

    def deltas(self, s: float) -> np.ndarray:
        return np.array([r[0] for r in self.rows if r[1] == s])

    def summary(self) -> dict:
        out = {"mode": self.mode, "noise_floor": self.noise_floor, "fits": {}}
        for s, fit in self.fits.items():
            out["fits"][str(s)] = {
                "slope": None if fit.degenerate else fit.slope,
                "intercept": None if fit.degenerate else fit.intercept,
                "r_squared": None if fit.degenerate else fit.r_squared,
                "degenerate": fit.degenerate,
            }
        return out


def _timed_solve(eq, u0, scfg):
    t = time.perf_counter()
    traj = solve(eq, u0, scfg)
    return traj, time.perf_counter() - t


def run_deepwater(config: ExperimentConfig) -> ConvergenceReport:
    """ILW (or renormalized ILW) family against the BO reference.

    ``original`` compares ``solve(ILW_delta, u0)`` with ``solve(BO, u0)``
    directly, so the translation by ``t/delta`` is part of the error;
    ``renormalized`` compares ``solve(RenormILW_delta, u0)`` (mean-zero data).
    """
    grid = config.grid()
    u0 = initial_datum(grid, config.initial_data)
    scfg = config.solve_config()
    deltas = [float(d) for d in config.delta_list]
    variant = Variant.ILW if config.mode == "original" else Variant.RENORM_ILW
    ref, _ = _timed_solve(EquationSpec.bo(), u0, scfg)

    def member(delta):
        return _timed_solve(EquationSpec(variant, delta), u0, scfg)

    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            results = list(pool.map(member, deltas))
    else:
        results = [member(d) for d in deltas]

    rows = []
    for s in config.sobolev_s_list:
        for delta, (traj, runtime) in zip(deltas, results):
            rows.append((delta, float(s), hs_error(traj, ref, float(s)), runtime))
    floor = 1e3 * np.finfo(float).eps * sobolev_norm(u0, 0.0)
    fits = {}
    for s in config.sobolev_s_list:
        pairs = [(d, e) for d, ss, e, _ in rows if ss == float(s)]
        usable = [(d, e) for d, e in pairs if e >= floor]
        if any(e == 0 for _, e in pairs) or len(usable) < 3:
            fits[float(s)] = LogLogFit(math.nan, math.nan, math.nan, True)
        else:
            fits[float(s)] = fit_loglog(usable)
    return ConvergenceReport(config.mode, rows, fits, floor)


# --- scaling family -------------------------------------------------------

@dataclass
class ScalingReport:
    lam: float
    delta: float
    discrepancy: float
    l2_identity_error: float
    source: Trajectory
    target: Trajectory

    def summary(self) -> dict:
        return {"lambda": self.lam, "delta": self.delta,
                "sup_H0_discrepancy": self.discrepancy,
                "l2_identity_error": self.l2_identity_error}


def run_scaling_check(config: ExperimentConfig) -> ScalingReport:
    """Renormalized ILW(delta) on T mapped by S_lam versus ILW(lam delta) on T_lam.

    The target horizon is ``t_final`` with step ``dt``; the source runs on
    ``t_final / lam^2`` with step ``dt / lam^2`` so that snapshots align.
    """
    lam = float(config.scale_lambda)
    delta = float(config.delta if config.delta is not None else 1.0)
    base = TorusGrid(1.0, config.n_points)
    u0 = initial_datum(base, config.initial_data)
    src_cfg = config.solve_config(dt=config.dt / lam**2, t_final=config.t_final / lam**2)
    source = solve(EquationSpec.renorm(delta), u0, src_cfg)
    mapped = scale_transform(source, lam)
    target = solve(EquationSpec.renorm(lam * delta), scale_field(u0, lam), config.solve_config())
    disc = hs_error(mapped, target, 0.0)
    ident = abs(l2_norm(scale_field(u0, lam)) - lam**-0.5 * l2_norm(u0))
    return ScalingReport(lam, delta, disc, ident, mapped, target)


# --- Galilean reduction ---------------------------------------------------

@dataclass
class GalileanReport:
    delta: float
    mean: float
    discrepancy: float

    def summary(self) -> dict:
        return {"delta": self.delta, "mean": self.mean, "sup_H0_discrepancy": self.discrepancy}


def run_galilean_check(config: ExperimentConfig) -> GalileanReport:
    """ILW directly versus mean removal, the ``tau_{1/delta}`` shift and
    renormalized ILW, transformed back: ``u = tau_{2 mu - 1/delta} v + mu``."""
    delta = float(config.delta if config.delta is not None else 1.0)
    grid = config.grid()
    u0 = initial_datum(grid, config.initial_data)
    scfg = config.solve_config()
    direct = solve(EquationSpec.ilw(delta), u0, scfg)
    mu = float(u0.coeffs[0].real)
    v = solve(EquationSpec.renorm(delta), u0 - mu, scfg)
    back = galilean_tau(v, 2.0 * mu - 1.0 / delta).map(lambda t, f: f + mu, eq=direct.eq)
    return GalileanReport(delta, mu, hs_error(direct, back, 0.0))


# --- gauge checks ----------------------------------------------------------

@dataclass
class GaugeReport:
    delta: float
    dts: list
    max_residual: dict  # which -> [max residual per level]
    ratios: dict  # which -> successive ratios
    reconstruction: float
    series: dict  # which -> ResidualSeries at the finest level

    def summary(self) -> dict:
        ratios = {k: [None if math.isnan(r) else r for r in v] for k, v in self.ratios.items()}
        return {"delta": self.delta, "dts": self.dts, "max_residual": self.max_residual,
                "ratios": ratios, "reconstruction_residual": self.reconstruction}


def run_gauge_check(config: ExperimentConfig) -> GaugeReport:
    """Reconstruction identity and gauged-equation residuals on a
    renormalized-ILW run, refined ``refinements`` times by halving ``dt``.

    Snapshots are taken every step; residuals are compared at the coarse
    snapshot times shared by every level.
    """
    delta = float(config.delta if config.delta is not None else 1.0)
    eq = EquationSpec.renorm(delta)
    grid = config.grid()
    u0 = initial_datum(grid, config.initial_data)
    if u0.coeffs[0] != 0:
        u0 = u0 - float(u0.coeffs[0].real)
    dts = [config.dt / 2**k for k in range(config.refinements)]
    coarse = None
    max_res: dict = {"F_equation": [], "w_equation": []}
    series = {}
    recon = 0.0
    for level, dt in enumerate(dts):
        traj = solve(eq, u0, config.solve_config(dt=dt, stride=1))
        if level == 0:
            coarse = traj.times[1:-1]
            for f in traj.fields:
                st = gauge_state(f, config.gauge_factor)
                recon = max(recon, reconstruct_check(st.w, f, config.gauge_factor))
        for which in max_res:
            r = gauged_residual(traj, delta, which, config.gauge_factor)
            idx = np.searchsorted(r.times, coarse - 1e-9 * dt)
            max_res[which].append(float(np.max(r.residuals[idx])))
            series[which] = r
    ratios = {k: [v[i] / v[i + 1] if v[i + 1] > 0 else math.nan for i in range(len(v) - 1)]
              for k, v in max_res.items()}
    return GaugeReport(delta, dts, max_res, ratios, recon, series)


# --- conservation and symbols --------------------------------------------

def run_conserve(config: ExperimentConfig):
    eq = config.equation()
    u0 = initial_datum(config.grid(), config.initial_data)
    traj = solve(eq, u0, config.solve_config())
    return traj, conservation_report(traj)


def run_solve(config: ExperimentConfig) -> Trajectory:
    eq = config.equation()
    u0 = initial_datum(config.grid(), config.initial_data)
    return solve(eq, u0, config.solve_config())


def run_symbols(config: ExperimentConfig) -> dict:
    """Symbol samples at the grid frequencies, ascending: ``{label: (xi, values)}``."""
    grid = config.grid()
    xi = np.fft.fftshift(grid.xi)
    specs = config.symbols or [{"kind": "hilbert"}, {"kind": "tilbert", "param": config.delta or 1.0},
                               {"kind": "gdelta", "param": config.delta or 1.0},
                               {"kind": "qdelta", "param": config.delta or 1.0}]
    out = {}
    for entry in specs:
        try:
            spec = MultiplierSpec(entry["kind"], entry.get("param"))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad symbol entry {entry!r}: {exc}") from None
        label = spec.kind if spec.param is None else f"{spec.kind}_{spec.param:g}"
        out[label] = (xi, symbol(spec, xi))
    return out
