"""de Broglie-Bohm velocity fields and trajectory ensembles.

Velocities follow the guidance law v = (hbar/m) Im(d_x psi / psi), with the
density floored at eps_density and the speed capped at v_max near nodes
(holding the previous direction there).  1D flows use the exact analytic
Gaussian-mixture field; 2D flows differentiate the box sine modes of the
coupled system-pointer state, with masses m and M per axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import qcore
from ._kernels import rk4_free_mixture_ensemble
from .bipartite import BipartiteState, CoupledEvolver
from .qcore import HBAR, WaveState, WeightedGaussian, eval_components_gradient


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = 1e-2
    eps_density: float = 1e-12
    v_max: float = 50.0

    def __post_init__(self):
        if self.dt <= 0 or self.eps_density <= 0 or self.v_max <= 0:
            raise ValueError("integrator parameters must be positive")


@dataclass(frozen=True)
class BohmTrajectory:
    """Sampled trajectory; y is None for 1D flows."""

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray | None
    crossed_midpoint: bool
    exited: bool = False


def _regularize(psi, dpsi, mass, hbar, cfg: IntegratorConfig, v_prev=None):
    rho = np.abs(psi) ** 2
    v = hbar / mass * np.imag(np.conj(psi) * dpsi) / np.maximum(rho, cfg.eps_density)
    v = np.clip(v, -cfg.v_max, cfg.v_max)
    if v_prev is not None:
        dead = (rho <= cfg.eps_density) & (v_prev != 0.0)
        v[dead] = np.copysign(np.abs(v[dead]), v_prev[dead])
    return v


def velocity_1d(state, x, t: float, m: float = 1.0, hbar: float = HBAR,
                cfg: IntegratorConfig = IntegratorConfig()):
    """Guidance velocity of a 1D state at (x, t).

    ``state`` is a component sequence (exact derivatives) or a WaveState
    (centered finite differences on its grid, t must match).
    """
    scalar = np.isscalar(x)
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if isinstance(state, WaveState) and state.components is None:
        if not math.isclose(state.t, t, rel_tol=1e-9, abs_tol=1e-12):
            raise ValueError("grid state can only be evaluated at its own time")
        grad = np.gradient(state.amplitudes, state.grid.dx)
        psi = np.interp(xa, state.grid.x, state.amplitudes.real) + \
            1j * np.interp(xa, state.grid.x, state.amplitudes.imag)
        dpsi = np.interp(xa, state.grid.x, grad.real) + \
            1j * np.interp(xa, state.grid.x, grad.imag)
    else:
        comps = state.components if isinstance(state, WaveState) else tuple(state)
        psi, dpsi = eval_components_gradient(comps, xa, t, hbar=hbar)
    v = _regularize(psi, dpsi, m, hbar, cfg)
    return float(v[0]) if scalar else v


def velocity_2d(evolver: CoupledEvolver, state: BipartiteState, x, y,
                cfg: IntegratorConfig = IntegratorConfig()):
    """Guidance velocity (v_x, v_y) of the coupled state at points (x, y)."""
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    ya = np.atleast_1d(np.asarray(y, dtype=float))
    psi, dpx, dpy = evolver.eval_points(state, xa, ya)
    vx = _regularize(psi, dpx, evolver.m, evolver.hbar, cfg)
    vy = _regularize(psi, dpy, evolver.pointer.M, evolver.hbar, cfg)
    if np.isscalar(x):
        return float(vx[0]), float(vy[0])
    return vx, vy


def integrate_trajectory(start, velocity: Callable, cfg: IntegratorConfig,
                         t_start: float, t_end: float,
                         record_stride: int = 1) -> BohmTrajectory:
    """Fixed-step RK4 integration of dx/dt = velocity(x, t).

    ``start`` and the velocity callable may be scalar (1D) or length-2
    (2D); t_end < t_start integrates backwards.  Midpoint crossings of the
    first coordinate are recorded.
    """
    x = np.atleast_1d(np.asarray(start, dtype=float)).copy()
    ndim = len(x)
    span = t_end - t_start
    n_steps = max(1, int(round(abs(span) / cfg.dt)))
    h = span / n_steps
    ts = [t_start]
    xs = [x.copy()]
    crossed = False
    for s in range(n_steps):
        t = t_start + s * h
        k1 = np.asarray(velocity(x, t))
        k2 = np.asarray(velocity(x + 0.5 * h * k1, t + 0.5 * h))
        k3 = np.asarray(velocity(x + 0.5 * h * k2, t + 0.5 * h))
        k4 = np.asarray(velocity(x + h * k3, t + h))
        xn = x + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if x[0] * xn[0] < 0.0:
            crossed = True
        x = xn
        if (s + 1) % record_stride == 0 or s == n_steps - 1:
            ts.append(t + h)
            xs.append(x.copy())
    arr = np.array(xs)
    return BohmTrajectory(t=np.array(ts), x=arr[:, 0],
                          y=arr[:, 1] if ndim > 1 else None,
                          crossed_midpoint=crossed)


def sample_initial_positions(components: Sequence[WeightedGaussian], n: int,
                             rng: np.random.Generator) -> np.ndarray:
    """Draw n samples from the t = 0 density of a weighted Gaussian mixture."""
    weights = np.array([abs(c.weight) ** 2 for c in components])
    weights = weights / weights.sum()
    ks = rng.choice(len(components), size=n, p=weights)
    out = np.empty(n)
    for i, k in enumerate(ks):
        p = components[k].params
        out[i] = rng.normal(p.x0, p.d)
    return out


def trajectory_ensemble(components: Sequence[WeightedGaussian], starts,
                        t_end: float, cfg: IntegratorConfig = IntegratorConfig(),
                        m: float = 1.0, hbar: float = HBAR,
                        record_stride: int = 10) -> list[BohmTrajectory]:
    """Integrate an ensemble through the free 1D mixture flow (hot path)."""
    starts = np.ascontiguousarray(starts, dtype=np.float64)
    if len(starts) < 1:
        raise ValueError("need at least one start")
    w = np.array([complex(c.weight) for c in components], dtype=np.complex128)
    x0 = np.array([c.params.x0 for c in components])
    p0 = np.array([c.params.p0 for c in components])
    d = np.array([c.params.d for c in components])
    ms = np.array([c.params.m for c in components])
    n_steps = max(1, int(round(t_end / cfg.dt)))
    times, pos, crossed = rk4_free_mixture_ensemble(
        starts, 0.0, cfg.dt, n_steps, record_stride,
        w, x0, p0, d, ms, hbar, m, cfg.eps_density, cfg.v_max)
    return [BohmTrajectory(t=times, x=pos[:, i], y=None,
                           crossed_midpoint=bool(crossed[i]))
            for i in range(len(starts))]


def crossing_count(ensemble: Sequence[BohmTrajectory]) -> int:
    return sum(1 for tr in ensemble if tr.crossed_midpoint)


def ks_distance(finals, components: Sequence[WeightedGaussian], t: float,
                x_lo: float, x_hi: float, n_grid: int = 20001,
                hbar: float = HBAR) -> float:
    """Kolmogorov-Smirnov distance between trajectory endpoints and |psi(t)|^2."""
    xg = np.linspace(x_lo, x_hi, n_grid)
    rho = np.abs(qcore.eval_components(components, xg, t, hbar=hbar)) ** 2
    cdf = np.concatenate([[0.0], np.cumsum((rho[1:] + rho[:-1]) * 0.5 * np.diff(xg))])
    cdf /= cdf[-1]
    finals = np.sort(np.asarray(finals))
    n = len(finals)
    f_at = np.interp(finals, xg, cdf)
    i = np.arange(1, n + 1)
    return float(max(np.max(np.abs(i / n - f_at)), np.max(np.abs(f_at - (i - 1) / n))))


# ---------------------------------------------------------------------------
# Trajectories in the coupled system-pointer flow.  The driver advances the
# box state alongside the ensemble: exact free flight outside the coupling
# window (stages read phase-shifted copies of a fixed anchor), Strang PDE
# steps at half the trajectory step inside it.
# ---------------------------------------------------------------------------

class _StageStates:
    """Supplies box states at RK4 stage times within one driver step."""

    def __init__(self, evolver: CoupledEvolver, anchor: BipartiteState):
        self.ev = evolver
        self.anchor = anchor

    def free_at(self, t: float) -> BipartiteState:
        dt = t - self.anchor.t
        if dt == 0.0:
            return self.anchor
        phase = self.ev._kinetic_phase(dt)
        return BipartiteState(coeffs=self.anchor.coeffs * phase, t=t)


def coupled_trajectory_ensemble(evolver: CoupledEvolver, state0: BipartiteState,
                                starts_xy, t_end: float,
                                cfg: IntegratorConfig = IntegratorConfig(),
                                dt_window: float = 1e-3, dt_free: float = 1e-2,
                                record_stride: int = 10,
                                wall_margin: float = 0.5):
    """Integrate 2D Bohmian trajectories through the coupled evolution.

    Returns (trajectories, final_state).  Trajectories leaving the box
    interior margin are frozen and flagged.  Crossing refers to the system
    coordinate passing x = 0.
    """
    starts = np.asarray(starts_xy, dtype=float)
    n = len(starts)
    xy = starts.copy()
    vprev = np.zeros((n, 2))
    alive = np.ones(n, bool)
    crossed = np.zeros(n, bool)
    p = evolver.pointer
    b = evolver.basis
    x_lo, x_hi = b.x_offset + wall_margin, b.x_offset + b.L_x - wall_margin
    y_lo, y_hi = b.y_offset + wall_margin, b.y_offset + b.L_y - wall_margin

    ts_rec = [state0.t]
    xy_rec = [xy.copy()]

    def vel(state, pts, use_prev):
        psi, dpx, dpy = evolver.eval_points(state, pts[:, 0], pts[:, 1])
        rho = np.abs(psi) ** 2
        vx = evolver.hbar / evolver.m * np.imag(np.conj(psi) * dpx) \
            / np.maximum(rho, cfg.eps_density)
        vy = evolver.hbar / p.M * np.imag(np.conj(psi) * dpy) \
            / np.maximum(rho, cfg.eps_density)
        v = np.stack([np.clip(vx, -cfg.v_max, cfg.v_max),
                      np.clip(vy, -cfg.v_max, cfg.v_max)], axis=1)
        if use_prev is not None:
            dead = rho <= cfg.eps_density
            for ax in range(2):
                sel = dead & (use_prev[:, ax] != 0.0)
                v[sel, ax] = np.copysign(np.abs(v[sel, ax]), use_prev[sel, ax])
        return v

    def rk4_step(stage_state_at, t, h):
        nonlocal xy, vprev, crossed, alive
        live = np.where(alive)[0]
        if len(live) == 0:
            return
        pts = xy[live]
        s0 = stage_state_at(t)
        sh = stage_state_at(t + 0.5 * h)
        s1 = stage_state_at(t + h)
        k1 = vel(s0, pts, vprev[live])
        k2 = vel(sh, pts + 0.5 * h * k1, vprev[live])
        k3 = vel(sh, pts + 0.5 * h * k2, vprev[live])
        k4 = vel(s1, pts + h * k3, vprev[live])
        new = pts + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        crossed[live] |= pts[:, 0] * new[:, 0] < 0.0
        vprev[live] = k1
        out = (new[:, 0] < x_lo) | (new[:, 0] > x_hi) | \
            (new[:, 1] < y_lo) | (new[:, 1] > y_hi)
        xy[live] = new
        alive[live[out]] = False

    def run_segment(anchor, t_seg_end, h, stepped):
        nonlocal xy
        t = anchor.t
        n_steps = max(1, int(round((t_seg_end - t) / h)))
        h = (t_seg_end - t) / n_steps
        stages = _StageStates(evolver, anchor)
        current = anchor
        for s in range(n_steps):
            ts = t + s * h
            if stepped:
                half = evolver.evolve(current, ts + 0.5 * h, dt=0.5 * h)
                full = evolver.evolve(half, ts + h, dt=0.5 * h)
                table = {round(ts, 12): current, round(ts + 0.5 * h, 12): half,
                         round(ts + h, 12): full}
                rk4_step(lambda q: table[round(q, 12)], ts, h)
                current = full
            else:
                rk4_step(stages.free_at, ts, h)
            if (s + 1) % record_stride == 0 or s == n_steps - 1:
                ts_rec.append(ts + h)
                xy_rec.append(xy.copy())
        if stepped:
            return current
        return stages.free_at(t_seg_end)

    state = state0
    if p.g_peak != 0.0 and state.t < p.t_on < t_end:
        state = run_segment(state, p.t_on, dt_free, stepped=False)
    if p.g_peak != 0.0 and state.t < p.t_off and t_end > p.t_on:
        state = run_segment(state, min(p.t_off, t_end), dt_window, stepped=True)
    if state.t < t_end:
        state = run_segment(state, t_end, dt_free, stepped=False)

    times = np.array(ts_rec)
    path = np.array(xy_rec)
    trajs = [BohmTrajectory(t=times, x=path[:, i, 0], y=path[:, i, 1],
                            crossed_midpoint=bool(crossed[i]),
                            exited=bool(not alive[i]))
             for i in range(n)]
    return trajs, state
