"""Classical path bundles behind the weak values ("weak trajectories").

A weak trajectory is the stationary-phase skeleton of the paths that feed a
weakly coupled pointer: a straight leg from a source point x_i inside the
initial wavefunction to the window position w at the coupling time t_w, and
a straight leg from w to a detection point x_f at t_f.  Bundles sample the
endpoint densities and keep only legs whose incoming momentum the source
packet actually carries; momentum filtering of the outgoing leg mirrors the
post-selection filter acting on the weak value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .qcore import GaussianParams, WeightedGaussian, packet_center
from .weakval import GaussianFilter, PositionDelta, PostSelection, ProjectorWindow

# incoming legs must lie within this many momentum widths of their source packet
SOURCE_MOMENTUM_BAND = 4.0


@dataclass(frozen=True)
class PathSegment:
    x_start: float
    t_start: float
    x_end: float
    t_end: float
    momentum: float

    def __post_init__(self):
        if self.t_end <= self.t_start:
            raise ValueError("segment requires t_end > t_start")


def _segment(x_start, t_start, x_end, t_end, m):
    return PathSegment(x_start, t_start, x_end, t_end,
                       m * (x_end - x_start) / (t_end - t_start))


@dataclass(frozen=True)
class WeakTrajectory:
    """Two straight legs with a kink at the pointer: source -> (w, t_w) -> detector."""

    leg_in: PathSegment
    leg_out: PathSegment
    weight: float

    def __post_init__(self):
        if self.leg_in.t_end != self.leg_out.t_start or \
                self.leg_in.x_end != self.leg_out.x_start:
            raise ValueError("legs must join continuously at the pointer")

    @property
    def kink(self) -> float:
        return self.leg_out.momentum - self.leg_in.momentum


def build_weak_trajectory(x_i: float, w: float, t_w: float, x_f: float,
                          t_f: float, m: float = 1.0,
                          weight: float = 1.0) -> WeakTrajectory:
    """Two-segment path from (x_i, 0) through (w, t_w) to (x_f, t_f)."""
    if not 0.0 < t_w < t_f:
        raise ValueError("build_weak_trajectory requires 0 < t_w < t_f")
    return WeakTrajectory(_segment(x_i, 0.0, w, t_w, m),
                          _segment(w, t_w, x_f, t_f, m),
                          weight)


def _source_density(params: GaussianParams, x: float) -> float:
    # |psi_G(x, 0)|^2, the t = 0 sampling density of one packet
    return (math.exp(-((x - params.x0) ** 2) / (2.0 * params.d ** 2))
            / (params.d * math.sqrt(2.0 * math.pi)))


def _sample_detection(post: PostSelection, rng, hbar: float = 1.0):
    """One detection point and its density under the post-selection state."""
    v = post.variant
    if isinstance(v, PositionDelta):
        return v.x_R, 1.0
    if isinstance(v, GaussianFilter):
        x = rng.normal(v.x_R, v.sigma_sel)
        rho = (math.exp(-((x - v.x_R) ** 2) / (2.0 * v.sigma_sel ** 2))
               / (v.sigma_sel * math.sqrt(2.0 * math.pi)))
        return x, rho
    # evolved superposition: sample the component mixture of |chi(t_f)|^2
    weights = np.array([abs(c.weight) ** 2 for c in v.components])
    weights = weights / weights.sum()
    k = rng.choice(len(v.components), p=weights)
    p = v.components[k].params
    center = packet_center(p, post.t_f)
    # spread of |psi_G|^2 at t_f
    sig = p.d * math.sqrt(1.0 + (hbar * post.t_f / (2.0 * p.d ** 2 * p.m)) ** 2)
    x = rng.normal(center, sig)
    rho = math.exp(-((x - center) ** 2) / (2.0 * sig ** 2)) / (sig * math.sqrt(2.0 * math.pi))
    return x, rho


def path_bundle(components: Sequence[WeightedGaussian], window: ProjectorWindow,
                t_w: float, post: PostSelection, n_samples: int,
                seed: int = 0, m: float = 1.0, hbar: float = 1.0) -> list[WeakTrajectory]:
    """Sampled bundle of weak trajectories through the window at t_w.

    Per packet, n_samples source points are drawn from the initial density;
    detection points come from the post-selection density and window
    positions uniformly from the window extent.  Incoming legs whose
    momentum the source packet does not carry (outside p0 +/- 4 hbar/2d)
    are dropped: those paths carry no stationary-phase amplitude.
    """
    if n_samples < 1:
        raise ValueError("need n_samples >= 1")
    if not 0.0 < t_w < post.t_f:
        raise ValueError("path_bundle requires 0 < t_w < t_f")
    rng = np.random.default_rng(seed)
    bundle: list[WeakTrajectory] = []
    for comp in components:
        p = comp.params
        sigma_p = hbar / (2.0 * p.d)
        for _ in range(n_samples):
            x_i = rng.normal(p.x0, p.d)
            if window.width > 0:
                w = rng.uniform(window.w - 0.5 * window.width,
                                window.w + 0.5 * window.width)
            else:
                w = window.w
            p_in = m * (w - x_i) / t_w
            if abs(p_in - p.p0) > SOURCE_MOMENTUM_BAND * sigma_p:
                continue
            x_f, rho_f = _sample_detection(post, rng, hbar=hbar)
            weight = abs(comp.weight) ** 2 * _source_density(p, x_i) * rho_f
            bundle.append(build_weak_trajectory(x_i, w, t_w, x_f, post.t_f,
                                                m=m, weight=weight))
    return bundle


def filter_bundle_by_momentum(bundle: Sequence[WeakTrajectory], p_center: float,
                              p_halfwidth: float) -> list[WeakTrajectory]:
    """Keep trajectories whose outgoing leg momentum lies in the filter band.

    Mirrors a momentum-filtering post-selection: an empty result marks the
    geometry whose weak value the filter kills.
    """
    return [tr for tr in bundle
            if abs(tr.leg_out.momentum - p_center) <= p_halfwidth]


def matched_filter_halfwidth(post: PostSelection, hbar: float = 1.0) -> float:
    """Momentum half-acceptance matched to a GaussianFilter post-selection."""
    v = post.variant
    if not isinstance(v, GaussianFilter):
        return math.inf
    return SOURCE_MOMENTUM_BAND * v.momentum_width(hbar)


def bundle_rows(bundle: Sequence[WeakTrajectory]):
    """CSV rows: traj_id, leg, x_start, t_start, x_end, t_end, p, weight."""
    for i, tr in enumerate(bundle):
        for name, leg in (("in", tr.leg_in), ("out", tr.leg_out)):
            yield (i, name, leg.x_start, leg.t_start, leg.x_end, leg.t_end,
                   leg.momentum, tr.weight)
