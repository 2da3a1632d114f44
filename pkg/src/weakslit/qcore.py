"""Analytic and grid-based single-particle quantum states.

Everything here is free (kinetic) evolution in one dimension, in atomic
units (hbar = 1 unless stated otherwise).  The workhorse is the freely
evolving Gaussian wavepacket

    psi_G(x, t; x0, p0) = (2/pi)^(1/4) sqrt(d m) / (2 d^2 m + i hbar t)^(1/2)
        * exp( -m (x - x(t))^2 / (4 d^2 m + 2 i hbar t)
               + i p0 (x - x(t)) / hbar + i p0^2 t / (2 hbar m) )

with center x(t) = x0 + p0 t / m and width parameter d (the t = 0 position
spread).  The state is normalized to 1 for every t.  Superpositions are
kept as weighted component lists so that later evolution is exact (no grid
propagation error); sampling onto a grid happens only at the edges.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ._kernels import gauss_mixture_eval, propagate_kernel

HBAR = 1.0


@dataclass(frozen=True)
class PhysicalConstants:
    """Unit system; atomic units everywhere by default."""

    hbar: float = 1.0

    def __post_init__(self):
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")


ATOMIC_UNITS = PhysicalConstants()


@dataclass(frozen=True)
class GaussianParams:
    """One analytic Gaussian packet: center x0, mean momentum p0, width d, mass m."""

    x0: float
    p0: float
    d: float
    m: float

    def __post_init__(self):
        if self.d <= 0:
            raise ValueError("width parameter d must be positive")
        if self.m <= 0:
            raise ValueError("mass m must be positive")


@dataclass(frozen=True)
class WeightedGaussian:
    """Gaussian packet with a (signed, possibly complex) superposition weight."""

    weight: complex
    params: GaussianParams


@dataclass(frozen=True)
class Grid1D:
    """Uniform 1D spatial grid on [x_min, x_max] with n_points samples."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError("grid requires x_min < x_max")
        if self.n_points < 2:
            raise ValueError("grid requires n_points >= 2")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)


@dataclass(frozen=True)
class WaveState:
    """Complex amplitudes sampled on a grid at time t.

    When the state was built from analytic Gaussian components the component
    list rides along, enabling exact evaluation off the grid and at other
    times; grid-only states fall back to quadrature against the free
    propagator.
    """

    grid: Grid1D
    amplitudes: np.ndarray
    t: float
    components: tuple[WeightedGaussian, ...] | None = None

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=np.complex128)
        if amp.shape != (self.grid.n_points,):
            raise ValueError("amplitude array length must equal grid n_points")
        if not np.all(np.isfinite(amp.view(np.float64))):
            raise ValueError("amplitudes must be finite")
        object.__setattr__(self, "amplitudes", amp)

    def norm(self) -> float:
        return math.sqrt(abs(np.trapezoid(np.abs(self.amplitudes) ** 2, self.grid.x)))


def _component_arrays(components: Sequence[WeightedGaussian]):
    w = np.array([complex(c.weight) for c in components], dtype=np.complex128)
    x0 = np.array([c.params.x0 for c in components])
    p0 = np.array([c.params.p0 for c in components])
    d = np.array([c.params.d for c in components])
    m = np.array([c.params.m for c in components])
    return w, x0, p0, d, m


def gaussian_amplitude(params: GaussianParams, x, t: float, hbar: float = HBAR):
    """Freely evolved Gaussian amplitude psi_G(x, t); x may be scalar or array."""
    scalar = np.isscalar(x)
    xa = np.atleast_1d(np.asarray(x, dtype=np.float64))
    w, x0, p0, d, m = _component_arrays([WeightedGaussian(1.0, params)])
    psi, _ = gauss_mixture_eval(xa, float(t), w, x0, p0, d, m, hbar)
    return psi[0] if scalar else psi


def packet_center(params: GaussianParams, t: float) -> float:
    """Center of the freely moving packet, x0 + p0 t / m."""
    return params.x0 + params.p0 * t / params.m


def packet_sigma(params: GaussianParams, t: float, hbar: float = HBAR) -> float:
    """Position spread of |psi_G|^2 at time t: d sqrt(1 + (hbar t / 2 d^2 m)^2)."""
    u = hbar * t / (2.0 * params.d ** 2 * params.m)
    return params.d * math.sqrt(1.0 + u * u)


def free_propagator(x_to, t_to: float, x_from, t_from: float,
                    m: float = 1.0, hbar: float = HBAR):
    """Free-particle kernel K(x_to, t_to; x_from, t_from).

    K = (m / 2 i pi hbar dt)^(1/2) exp(i m (x_to - x_from)^2 / 2 hbar dt),
    with the principal square root, so K -> delta as dt -> 0+.
    """
    if t_to <= t_from:
        raise ValueError("free_propagator requires t_to > t_from")
    dt = t_to - t_from
    pref = cmath.sqrt(m / (2j * math.pi * hbar * dt))
    u = np.asarray(x_to) - np.asarray(x_from)
    return pref * np.exp(1j * m * u * u / (2.0 * hbar * dt))


def superposition_initial(x0: float, p0: float, d: float, m: float,
                          grid: Grid1D, hbar: float = HBAR) -> WaveState:
    """Antisymmetric two-packet initial state (psi_1 - psi_2) / sqrt(2).

    psi_1 starts at -x0 moving right (+p0), psi_2 at +x0 moving left (-p0).
    The packets should be well separated; a warning is issued when x0 < 4 d.
    """
    if x0 < 4.0 * d:
        warnings.warn("two-packet separation x0 < 4 d: the packets overlap "
                      "appreciably and the two-slit reading degrades", stacklevel=2)
    comps = (
        WeightedGaussian(1.0 / math.sqrt(2.0), GaussianParams(-x0, p0, d, m)),
        WeightedGaussian(-1.0 / math.sqrt(2.0), GaussianParams(x0, -p0, d, m)),
    )
    return evolve_analytic(comps, 0.0, grid, hbar=hbar)


def evolve_analytic(components: Iterable[WeightedGaussian], t: float,
                    grid: Grid1D, hbar: float = HBAR) -> WaveState:
    """Evolve a weighted Gaussian superposition to time t and sample it.

    Each component evolves exactly, so the only error is floating point.
    """
    comps = tuple(components)
    if not comps:
        raise ValueError("need at least one component")
    w, x0, p0, d, m = _component_arrays(comps)
    psi, _ = gauss_mixture_eval(grid.x, float(t), w, x0, p0, d, m, hbar)
    return WaveState(grid=grid, amplitudes=psi, t=float(t), components=comps)


def eval_components(components: Sequence[WeightedGaussian], x, t: float,
                    hbar: float = HBAR):
    """Exact amplitude of a weighted Gaussian superposition at (x, t)."""
    scalar = np.isscalar(x)
    xa = np.atleast_1d(np.asarray(x, dtype=np.float64))
    w, x0, p0, d, m = _component_arrays(components)
    psi, _ = gauss_mixture_eval(xa, float(t), w, x0, p0, d, m, hbar)
    return psi[0] if scalar else psi


def eval_components_gradient(components: Sequence[WeightedGaussian], x, t: float,
                             hbar: float = HBAR):
    """Exact (psi, dpsi/dx) of a weighted Gaussian superposition at (x, t)."""
    scalar = np.isscalar(x)
    xa = np.atleast_1d(np.asarray(x, dtype=np.float64))
    w, x0, p0, d, m = _component_arrays(components)
    psi, dpsi = gauss_mixture_eval(xa, float(t), w, x0, p0, d, m, hbar)
    if scalar:
        return psi[0], dpsi[0]
    return psi, dpsi


def propagate_grid(state: WaveState, t_to: float, x_to=None,
                   m: float = 1.0, hbar: float = HBAR):
    """Propagate a grid state by quadrature against the free kernel.

    Used for grid-only states (no analytic components); the trapezoid rule
    over the state's own grid is spectrally accurate for smooth amplitudes
    that decay before the grid edges.
    """
    if t_to <= state.t:
        raise ValueError("propagate_grid requires t_to > state.t")
    targets = state.grid.x if x_to is None else np.atleast_1d(np.asarray(x_to, float))
    out = propagate_kernel(state.amplitudes, state.grid.x, state.grid.dx,
                           targets, state.t, float(t_to), m, hbar)
    return out


def inner_product(a: WaveState, b: WaveState) -> complex:
    """Quadrature of conj(a) * b over the common grid (trapezoid rule)."""
    if a.grid != b.grid:
        raise ValueError("inner_product requires identical grids")
    if not math.isclose(a.t, b.t, rel_tol=1e-12, abs_tol=1e-12):
        raise ValueError("inner_product requires equal timestamps")
    return complex(np.trapezoid(np.conj(a.amplitudes) * b.amplitudes, a.grid.x))
