"""Coupled system-pointer evolution in a standing-wave box basis.

The joint wavefunction Psi(x, y, t) lives in a hard-wall box, expanded over
products of sine modes sqrt(2/L) sin(n pi (xi - offset) / L).  The kinetic
terms hbar^2 k^2 / 2m (system) and / 2M (pointer) are diagonal there, so
free stretches evolve exactly in a single phase multiplication.  While the
coupling g(t) f_w(x) P_y is on, steps are Strang-split: half kinetic, the
exact interaction unitary built from the eigendecompositions of the window
matrix and the pointer momentum matrix, half kinetic.  g(t) is a raised
cosine over [t_on, t_off] and enters each step through its exact average,
so the integrated coupling is independent of the step size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import sine_series_eval
from .qcore import HBAR, WaveState, eval_components
from .weakval import (GaussianFilter, NearOrthogonalPostSelection,
                      PositionDelta, PostSelection, WindowProfile, EPS_DENOMINATOR)

WALL_AMPLITUDE_LIMIT = 1e-8
NORM_DRIFT_LIMIT = 1e-10


class WallLeakageError(ValueError):
    """State amplitude at a box wall above the admissible threshold."""


@dataclass(frozen=True)
class BoxBasis:
    """Product sine basis: modes n = 1..N per axis on [offset, offset + L]."""

    L_x: float
    L_y: float
    N_x: int
    N_y: int
    x_offset: float
    y_offset: float

    def __post_init__(self):
        if self.L_x <= 0 or self.L_y <= 0:
            raise ValueError("box lengths must be positive")
        if self.N_x < 8 or self.N_y < 8:
            raise ValueError("need at least 8 modes per axis")

    @property
    def kx(self) -> np.ndarray:
        return np.arange(1, self.N_x + 1) * math.pi / self.L_x

    @property
    def ky(self) -> np.ndarray:
        return np.arange(1, self.N_y + 1) * math.pi / self.L_y

    @property
    def norm_x(self) -> float:
        return math.sqrt(2.0 / self.L_x)

    @property
    def norm_y(self) -> float:
        return math.sqrt(2.0 / self.L_y)


@dataclass(frozen=True)
class PointerConfig:
    """Pointer mass, initial Gaussian, coupling window in time and space."""

    M: float
    y_init: float
    sigma_y: float
    g_peak: float
    t_on: float
    t_off: float
    window: WindowProfile

    def __post_init__(self):
        if self.M <= 0:
            raise ValueError("pointer mass must be positive")
        if self.sigma_y <= 0:
            raise ValueError("pointer width must be positive")
        if self.t_off <= self.t_on:
            raise ValueError("coupling window requires t_off > t_on")

    @property
    def g_integrated(self) -> float:
        """Time integral of the raised-cosine g(t)."""
        return 0.5 * self.g_peak * (self.t_off - self.t_on)

    def g_of_t(self, t):
        t = np.asarray(t, dtype=float)
        tau = self.t_off - self.t_on
        tc = 0.5 * (self.t_on + self.t_off)
        inside = (t >= self.t_on) & (t <= self.t_off)
        return np.where(inside,
                        0.5 * self.g_peak * (1.0 + np.cos(2.0 * math.pi * (t - tc) / tau)),
                        0.0)

    def g_integral_between(self, t0: float, t1: float) -> float:
        """Exact integral of g over [t0, t1]."""
        tau = self.t_off - self.t_on
        tc = 0.5 * (self.t_on + self.t_off)

        def anti(t):
            t = min(max(t, self.t_on), self.t_off)
            u = t - tc
            return 0.5 * self.g_peak * (u + tau / (2.0 * math.pi)
                                        * math.sin(2.0 * math.pi * u / tau))

        return anti(t1) - anti(t0)


def pointer_with_integrated_g(M, y_init, sigma_y, g, t_w, duration,
                              window: WindowProfile) -> PointerConfig:
    """Pointer whose raised-cosine window integrates to coupling strength g."""
    return PointerConfig(M=M, y_init=y_init, sigma_y=sigma_y,
                         g_peak=2.0 * g / duration,
                         t_on=t_w - 0.5 * duration, t_off=t_w + 0.5 * duration,
                         window=window)


@dataclass(frozen=True)
class BipartiteState:
    """Mode coefficients of Psi over (n_x, n_y) at a timestamp."""

    coeffs: np.ndarray
    t: float

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))


@dataclass(frozen=True)
class CouplingOperator:
    """Factored interaction f_w(x) (x) P_y: real-symmetric window matrix in
    the x modes, Hermitian momentum matrix in the y modes."""

    x_window: np.ndarray
    y_momentum: np.ndarray


def momentum_matrix(N: int, L: float, hbar: float = HBAR) -> np.ndarray:
    """<n'| -i hbar d/dy |n> in the sine basis.

    Nonzero only for odd n + n' (parity selection rule):
    -4 i hbar n n' / (L (n'^2 - n^2)).
    """
    n = np.arange(1, N + 1)
    npr = n[:, None]
    nc = n[None, :]
    diff = npr ** 2 - nc ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = -4j * hbar * npr * nc / (L * diff)
    vals[(npr + nc) % 2 == 0] = 0.0
    np.fill_diagonal(vals, 0.0)
    return vals


def window_matrix(N: int, L: float, offset: float, profile: WindowProfile,
                  n_quad: int | None = None) -> np.ndarray:
    """<n'| f_w(x) |n> by quadrature, assembled from cosine moments.

    sin(a u) sin(b u) = [cos((a-b)u) - cos((a+b)u)] / 2 reduces the N x N
    element set to 2N + 1 cosine integrals of f_w.
    """
    if n_quad is None:
        n_quad = max(8192, 16 * N)
    u = np.linspace(0.0, L, n_quad + 1)
    f = profile(u + offset)
    wts = np.full(n_quad + 1, L / n_quad)
    wts[0] *= 0.5
    wts[-1] *= 0.5
    q = np.arange(0, 2 * N + 1)
    cosmom = np.cos(np.outer(q, u) * math.pi / L) @ (f * wts)
    n = np.arange(1, N + 1)
    return (cosmom[np.abs(n[:, None] - n[None, :])]
            - cosmom[n[:, None] + n[None, :]]) / L


def coupling_matrix(basis: BoxBasis, profile: WindowProfile,
                    hbar: float = HBAR) -> CouplingOperator:
    """Factored matrix representation of the interaction f_w(x) P_y."""
    return CouplingOperator(
        x_window=window_matrix(basis.N_x, basis.L_x, basis.x_offset, profile),
        y_momentum=momentum_matrix(basis.N_y, basis.L_y, hbar))


class CoupledEvolver:
    """Precomputed operators for one box basis + pointer configuration."""

    def __init__(self, basis: BoxBasis, pointer: PointerConfig,
                 system_mass: float = 1.0, hbar: float = HBAR):
        self.basis = basis
        self.pointer = pointer
        self.m = system_mass
        self.hbar = hbar
        self.E_x = (hbar * basis.kx) ** 2 / (2.0 * system_mass)
        self.E_y = (hbar * basis.ky) ** 2 / (2.0 * pointer.M)
        self.coupling = coupling_matrix(basis, pointer.window, hbar)
        if pointer.g_peak != 0.0:
            lam, U = np.linalg.eigh(self.coupling.x_window)
            mu, V = np.linalg.eigh(self.coupling.y_momentum)
            self._lam, self._U = lam, U
            self._mu, self._V = mu, V

    # -- initialization ----------------------------------------------------

    def _quad_grid_x(self):
        n = max(8192, 8 * self.basis.N_x)
        x = np.linspace(self.basis.x_offset, self.basis.x_offset + self.basis.L_x, n + 1)
        w = np.full(n + 1, self.basis.L_x / n)
        w[0] *= 0.5
        w[-1] *= 0.5
        return x, w

    def _quad_grid_y(self):
        n = max(4096, 8 * self.basis.N_y)
        y = np.linspace(self.basis.y_offset, self.basis.y_offset + self.basis.L_y, n + 1)
        w = np.full(n + 1, self.basis.L_y / n)
        w[0] *= 0.5
        w[-1] *= 0.5
        return y, w

    def _sine_matrix_x(self, x):
        xr = np.asarray(x)[:, None] - self.basis.x_offset
        return self.basis.norm_x * np.sin(self.basis.kx[None, :] * xr)

    def _sine_matrix_y(self, y):
        yr = np.asarray(y)[:, None] - self.basis.y_offset
        return self.basis.norm_y * np.sin(self.basis.ky[None, :] * yr)

    def pointer_initial_amplitude(self, y):
        """Normalized initial pointer Gaussian (zero mean momentum)."""
        p = self.pointer
        return ((2.0 * math.pi * p.sigma_y ** 2) ** -0.25
                * np.exp(-((np.asarray(y) - p.y_init) ** 2) / (4.0 * p.sigma_y ** 2)))

    def _system_amplitude(self, system, x):
        if isinstance(system, WaveState):
            if system.components is not None:
                return eval_components(system.components, x, system.t, hbar=self.hbar)
            return np.interp(x, system.grid.x, system.amplitudes.real) + \
                1j * np.interp(x, system.grid.x, system.amplitudes.imag)
        return eval_components(tuple(system), x, 0.0, hbar=self.hbar)

    def project_initial(self, system) -> BipartiteState:
        """Product-state coefficients of system (x) pointer at t = 0.

        Both factors must be negligible at the box walls; the projection is
        rank one by construction.
        """
        b = self.basis
        walls_x = np.array([b.x_offset, b.x_offset + b.L_x])
        amp_walls = np.abs(self._system_amplitude(system, walls_x))
        walls_y = np.array([b.y_offset, b.y_offset + b.L_y])
        pointer_walls = np.abs(self.pointer_initial_amplitude(walls_y))
        worst = max(amp_walls.max(), pointer_walls.max())
        if worst > WALL_AMPLITUDE_LIMIT:
            raise WallLeakageError(
                f"wall amplitude {worst:.3e} exceeds {WALL_AMPLITUDE_LIMIT:.1e}; "
                "enlarge the box or recenter it")
        xq, wx = self._quad_grid_x()
        cx = self._sine_matrix_x(xq).T @ (wx * self._system_amplitude(system, xq))
        yq, wy = self._quad_grid_y()
        cy = self._sine_matrix_y(yq).T @ (wy * self.pointer_initial_amplitude(yq))
        return BipartiteState(coeffs=np.outer(cx, cy), t=0.0)

    # -- time evolution ----------------------------------------------------

    def _kinetic_phase(self, h: float) -> np.ndarray:
        return np.exp(-1j * self.E_x * h / self.hbar)[:, None] * \
            np.exp(-1j * self.E_y * h / self.hbar)[None, :]

    def _interaction_step(self, C: np.ndarray, g_bar_h: float) -> np.ndarray:
        # exact unitary exp(-i g_bar_h F (x) P / hbar) via the eigenbases
        Ct = self._U.T @ C @ np.conj(self._V)
        Ct *= np.exp(-1j * g_bar_h * np.outer(self._lam, self._mu) / self.hbar)
        return self._U @ Ct @ self._V.T

    def evolve(self, state: BipartiteState, t_to: float,
               dt: float = 1e-3) -> BipartiteState:
        """Advance to t_to: exact free flight outside the coupling window,
        Strang steps of size dt inside it.  Norm drift beyond tolerance is
        a hard error."""
        if t_to < state.t:
            raise ValueError("evolve cannot run backwards")
        C = state.coeffs.copy()
        t = state.t
        norm_ref = float(np.sqrt(np.sum(np.abs(C) ** 2)))
        p = self.pointer
        eps = 1e-12
        while t < t_to - eps:
            if p.g_peak == 0.0 or t >= p.t_off - eps:
                h = t_to - t
                C *= self._kinetic_phase(h)
                t = t_to
            elif t < p.t_on - eps:
                h = min(p.t_on, t_to) - t
                C *= self._kinetic_phase(h)
                t += h
            else:
                h = min(dt, p.t_off - t, t_to - t)
                g_bar_h = p.g_integral_between(t, t + h)
                C *= self._kinetic_phase(0.5 * h)
                C = self._interaction_step(C, g_bar_h)
                C *= self._kinetic_phase(0.5 * h)
                t += h
                norm = float(np.sqrt(np.sum(np.abs(C) ** 2)))
                if abs(norm - norm_ref) > NORM_DRIFT_LIMIT:
                    raise RuntimeError(
                        f"norm drift {abs(norm - norm_ref):.3e} at t = {t:.6f} "
                        f"(step {h:.2e}); the interaction step lost unitarity")
        return BipartiteState(coeffs=C, t=t_to)

    # -- observables ---------------------------------------------------------

    def eval_points(self, state: BipartiteState, xs, ys):
        """(Psi, dPsi/dx, dPsi/dy) at point sets, exact in the mode expansion."""
        b = self.basis
        xs = np.ascontiguousarray(np.atleast_1d(xs), dtype=np.float64)
        ys = np.ascontiguousarray(np.atleast_1d(ys), dtype=np.float64)
        return sine_series_eval(state.coeffs, b.kx, b.ky, b.norm_x, b.norm_y,
                                b.x_offset, b.y_offset, xs, ys)

    def marginal_x(self, state: BipartiteState, x_grid) -> np.ndarray:
        """Position density of the system, pointer traced out."""
        G = self._sine_matrix_x(x_grid) @ state.coeffs
        return np.sum(np.abs(G) ** 2, axis=1)

    def marginal_y(self, state: BipartiteState, y_grid) -> np.ndarray:
        """Position density of the pointer, system traced out."""
        G = self._sine_matrix_y(y_grid) @ state.coeffs.T
        return np.sum(np.abs(G) ** 2, axis=1)

    def system_amplitude_grid(self, state: BipartiteState, x_grid, y_fixed=None):
        """Psi(x, y_fixed) on a grid (diagnostic)."""
        if y_fixed is None:
            y_fixed = self.pointer.y_init
        S = self._sine_matrix_x(x_grid)
        Sy = self._sine_matrix_y(np.array([y_fixed]))[0]
        return S @ (state.coeffs @ Sy)

    def post_overlap_vector(self, post: PostSelection) -> np.ndarray:
        """o_a = Int conj(chi(x, t_f)) phi_a(x) dx over the x modes."""
        v = post.variant
        if isinstance(v, PositionDelta):
            return self._sine_matrix_x(np.array([v.x_R]))[0].astype(complex)
        xq, wx = self._quad_grid_x()
        if isinstance(v, GaussianFilter):
            s2 = v.sigma_sel ** 2
            chi = ((2.0 * math.pi * s2) ** -0.25
                   * np.exp(-((xq - v.x_R) ** 2) / (4.0 * s2)
                            + 1j * v.p_sel * (xq - v.x_R) / self.hbar))
        else:
            chi = eval_components(v.components, xq, post.t_f, hbar=self.hbar)
        return self._sine_matrix_x(xq).T @ (wx * np.conj(chi))


@dataclass(frozen=True)
class PointerWave:
    """Normalized conditional pointer amplitude on a y grid."""

    y: np.ndarray
    amplitudes: np.ndarray

    def mean(self) -> float:
        rho = np.abs(self.amplitudes) ** 2
        return float(np.trapezoid(self.y * rho, self.y)
                     / np.trapezoid(rho, self.y))


def conditional_pointer_state(evolver: CoupledEvolver, state: BipartiteState,
                              post: PostSelection, y_grid=None,
                              eps_den: float = EPS_DENOMINATOR) -> PointerWave:
    """Pointer amplitude conditioned on the post-selection at state.t.

    phi_f(y) proportional to Int conj(chi(x)) Psi(x, y) dx, normalized.
    """
    if not math.isclose(state.t, post.t_f, rel_tol=1e-9, abs_tol=1e-9):
        raise ValueError("state time must equal the post-selection time")
    if y_grid is None:
        b = evolver.basis
        y_grid = np.linspace(b.y_offset, b.y_offset + b.L_y, 2049)
    o = evolver.post_overlap_vector(post)
    d = o @ state.coeffs
    scale = float(np.linalg.norm(d))
    if scale < eps_den:
        raise NearOrthogonalPostSelection(
            f"post-selection amplitude {scale:.3e} below floor {eps_den:.1e}")
    amp = evolver._sine_matrix_y(y_grid) @ d
    nrm = math.sqrt(abs(np.trapezoid(np.abs(amp) ** 2, y_grid)))
    return PointerWave(y=np.asarray(y_grid, float), amplitudes=amp / nrm)


def pointer_mean_shift(phi_f: PointerWave, reference: PointerWave) -> float:
    """First-moment displacement of the conditional pointer vs a reference."""
    return phi_f.mean() - reference.mean()


def imaginary_readout_gain(pointer: PointerConfig, t_f: float,
                           hbar: float = HBAR) -> float:
    """Gain of the position readout on Im(A_w).

    A complex weak value also reweights the pointer momentum distribution;
    free spreading converts that into a position displacement, so to first
    order mean(y) moves by g [Re(A_w) + kappa Im(A_w)] with
    kappa = 2 <P^2> t_f / (M hbar) = hbar t_f / (2 sigma_y^2 M).
    For real weak values (e.g. self post-selection) the plain
    g Re(A_w) law is exact to first order.
    """
    return hbar * t_f / (2.0 * pointer.sigma_y ** 2 * pointer.M)
