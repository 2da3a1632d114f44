"""Weak values of position projectors for pre/post-selected free evolutions.

For a projector coupled at (w, t_w) between preparation psi(0) and
post-selection chi at t_f, the weak value is

    A_w = <chi(t_f)| U(t_f, t_w) |w><w| U(t_w, 0) |psi(0)>
          ---------------------------------------------------
                  <chi(t_f)| U(t_f, 0) |psi(0)>

i.e. numerator = B(w, t_w) * psi(w, t_w) with B the backward amplitude
<chi(t_f)|U(t_f,t)|x>, and denominator the post-selection overlap.  A point
projector gives a probability density (1/length); a finite window gives a
dimensionless number.  The conditional pointer reading after a coupling of
integrated strength g moves by g * Re(A_w).

Two bookkeeping conventions are supported.  ``full_state`` uses the full
normalized preparation in numerator and denominator.  ``per_packet``
reproduces the per-packet reading for two-packet superpositions: the
numerator takes the bare packet(s) that reach the projector and the
denominator takes only the packet that reaches the post-selection region.
For well-separated packets the two differ by at most a sign (the detected
packet's superposition weight is +1/sqrt2, the other's -1/sqrt2) plus
exponentially small cross terms.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from . import qcore
from ._kernels import propagate_kernel
from .qcore import (HBAR, GaussianParams, WaveState, WeightedGaussian,
                    eval_components, free_propagator, packet_center)


class NearOrthogonalPostSelection(ValueError):
    """Post-selection overlap below the floor: the weak value is undefined."""


EPS_DENOMINATOR = 1e-12

# relative amplitude below which a packet is considered absent at the window
# (1e-3 in amplitude = one part per million of the local probability density)
PACKET_AMPLITUDE_CUTOFF = 1e-3

# total/packet amplitude ratio below which a small weak value is annotated
# as destructive interference (grid points rarely hit nodes exactly)
INTERFERENCE_SUPPRESSION = 0.02


# ---------------------------------------------------------------------------
# Post-selection variants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PositionDelta:
    """Sharp position detection |x_R> at the post-selection time."""

    x_R: float


@dataclass(frozen=True)
class GaussianFilter:
    """Gaussian detection state centered at x_R with mean momentum p_sel.

    The spatial width sigma_sel sets the momentum acceptance
    sigma_p = hbar / (2 sigma_sel): wide filters in space are narrow in
    momentum and can exclude the classical link momentum entirely.
    """

    x_R: float
    p_sel: float
    sigma_sel: float

    def __post_init__(self):
        if self.sigma_sel <= 0:
            raise ValueError("sigma_sel must be positive")

    def momentum_width(self, hbar: float = HBAR) -> float:
        return hbar / (2.0 * self.sigma_sel)


@dataclass(frozen=True)
class EvolvedState:
    """Post-select on the free evolution of a given analytic superposition.

    Backward evolving this state to time t just gives conj(state(x, t)), so
    self post-selection of a single packet is exact.
    """

    components: tuple[WeightedGaussian, ...]


@dataclass(frozen=True)
class PostSelection:
    """Post-selected state chi at time t_f."""

    variant: PositionDelta | GaussianFilter | EvolvedState
    t_f: float

    def __post_init__(self):
        if self.t_f <= 0:
            raise ValueError("post-selection time t_f must be positive")


def self_post_selection(params: GaussianParams, t_f: float) -> PostSelection:
    """Post-select on the freely evolved packet itself."""
    return PostSelection(EvolvedState((WeightedGaussian(1.0, params),)), t_f)


# ---------------------------------------------------------------------------
# Projector windows and measurement events
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProjectorWindow:
    """Spatial window of the weakly coupled pointer: center w, top-hat width.

    width = 0 means a point projector.
    """

    w: float
    width: float = 0.0

    def __post_init__(self):
        if self.width < 0:
            raise ValueError("window width must be non-negative")


@dataclass(frozen=True)
class WindowProfile:
    """Smooth coupling profile f_w(x): 'gaussian' of width sigma (amplitude 1
    at the center) or 'tophat' of full width."""

    center: float
    width: float
    shape: str = "gaussian"

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError("profile width must be positive")
        if self.shape not in ("gaussian", "tophat"):
            raise ValueError(f"unknown profile shape {self.shape!r}")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.shape == "gaussian":
            return np.exp(-((x - self.center) ** 2) / (2.0 * self.width ** 2))
        return ((x >= self.center - 0.5 * self.width)
                & (x <= self.center + 0.5 * self.width)).astype(float)

    def support(self, n_sigma: float = 8.0):
        if self.shape == "gaussian":
            return (self.center - n_sigma * self.width, self.center + n_sigma * self.width)
        return (self.center - 0.5 * self.width, self.center + 0.5 * self.width)


@dataclass(frozen=True)
class WeakMeasurementEvent:
    """One weak coupling: window, coupling time t_w, integrated strength g."""

    window: ProjectorWindow
    t_w: float
    g: float = 0.0


class WeakValueType(Enum):
    SINGLE_PACKET = "single"
    TYPE1 = "type1"   # only the packet that is post-selected couples
    TYPE2 = "type2"   # only the mirror packet couples
    TYPE3 = "type3"   # both packets interfere at the window


class ZeroReason(Enum):
    NONE = "none"
    NO_AMPLITUDE = "no_amplitude"            # every packet absent at the window
    INTERFERENCE_NODE = "interference_node"  # packets present but sum cancels
    FILTERED_BACKWARD = "filtered_backward"  # post-selection filters the return path


@dataclass(frozen=True)
class WeakValueResult:
    value: complex
    numerator: complex
    denominator: complex
    wv_type: WeakValueType
    units: str = "density"        # 'density' for point projectors, 'dimensionless' else
    w: float = math.nan
    t_w: float = math.nan
    zero_reason: ZeroReason = ZeroReason.NONE


# ---------------------------------------------------------------------------
# Complex Gaussian algebra.  Every analytic amplitude used here is of the
# form exp(-a x^2 + b x + c) with Re(a) >= 0, so overlaps and backward
# amplitudes reduce to one closed-form integral.
# ---------------------------------------------------------------------------

def _gauss_integral(a, b, c):
    """Integral of exp(-a x^2 + b x + c) over the real line, Re(a) > 0."""
    return np.sqrt(np.pi / a) * np.exp(b * b / (4.0 * a) + c)


def _packet_quadratic(params: GaussianParams, t: float, hbar: float):
    """(a, b, c) with psi_G(x, t) = exp(-a x^2 + b x + c)."""
    m, d, p0 = params.m, params.d, params.p0
    alpha = m / (4.0 * d * d * m + 2j * hbar * t)
    xc = packet_center(params, t)
    pref = ((2.0 / math.pi) ** 0.25 * math.sqrt(d * m)
            / cmath.sqrt(2.0 * d * d * m + 1j * hbar * t))
    a = alpha
    b = 2.0 * alpha * xc + 1j * p0 / hbar
    c = (-alpha * xc * xc - 1j * p0 * xc / hbar
         + 1j * p0 * p0 * t / (2.0 * hbar * m) + cmath.log(pref))
    return a, b, c


def _filter_quadratic(post: GaussianFilter, hbar: float):
    """(a, b, c) for the filter state chi(x) at its own time."""
    s2 = post.sigma_sel ** 2
    a = 1.0 / (4.0 * s2)
    b = post.x_R / (2.0 * s2) + 1j * post.p_sel / hbar
    c = (-post.x_R ** 2 / (4.0 * s2) - 1j * post.p_sel * post.x_R / hbar
         + math.log((2.0 * math.pi * s2) ** -0.25))
    return a, b, c


def backward_amplitude(post: PostSelection, x, t: float,
                       m: float = 1.0, hbar: float = HBAR):
    """<chi(t_f)| U(t_f, t) |x>, the detection amplitude from a point source.

    Closed form for every variant; x may be scalar or array.
    """
    if t >= post.t_f:
        raise ValueError("backward amplitude requires t < t_f")
    v = post.variant
    if isinstance(v, PositionDelta):
        return free_propagator(v.x_R, post.t_f, x, t, m=m, hbar=hbar)
    if isinstance(v, EvolvedState):
        return np.conj(eval_components(v.components, x, t, hbar=hbar))
    # Gaussian filter: integrate conj(chi(u)) K(u, t_f; x, t) du in closed form
    T = post.t_f - t
    a_f, b_f, c_f = _filter_quadratic(v, hbar)
    xa = np.asarray(x, dtype=float)
    pref = cmath.sqrt(m / (2j * math.pi * hbar * T))
    a_k = -1j * m / (2.0 * hbar * T)
    b_k = -1j * m * xa / (hbar * T)
    c_k = 1j * m * xa * xa / (2.0 * hbar * T)
    out = pref * _gauss_integral(np.conj(a_f) + a_k,
                                 np.conj(b_f) + b_k,
                                 np.conj(c_f) + c_k)
    return out


def backward_amplitude_quadrature(post: PostSelection, x, t: float,
                                  m: float = 1.0, hbar: float = HBAR,
                                  span: float = 60.0, n: int = 120001):
    """Quadrature cross-check of the Gaussian-filter backward amplitude."""
    v = post.variant
    if not isinstance(v, GaussianFilter):
        raise ValueError("quadrature path only applies to GaussianFilter")
    u = np.linspace(v.x_R - span, v.x_R + span, n)
    a_f, b_f, c_f = _filter_quadratic(v, hbar)
    chi = np.exp(-a_f * u * u + b_f * u + c_f)
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(len(xa), complex)
    for i, xi in enumerate(xa):
        out[i] = np.trapezoid(np.conj(chi) * free_propagator(u, post.t_f, xi, t,
                                                             m=m, hbar=hbar), u)
    return out[0] if np.isscalar(x) else out


def post_overlap_analytic(post: PostSelection,
                          components: Sequence[WeightedGaussian],
                          hbar: float = HBAR) -> complex:
    """<chi(t_f)|psi(t_f)> for an analytic superposition, in closed form."""
    v = post.variant
    if isinstance(v, PositionDelta):
        return complex(eval_components(components, v.x_R, post.t_f, hbar=hbar))
    total = 0.0 + 0.0j
    if isinstance(v, GaussianFilter):
        a_f, b_f, c_f = _filter_quadratic(v, hbar)
        for comp in components:
            a, b, c = _packet_quadratic(comp.params, post.t_f, hbar)
            total += comp.weight * _gauss_integral(np.conj(a_f) + a,
                                                   np.conj(b_f) + b,
                                                   np.conj(c_f) + c)
        return complex(total)
    for chi_c in v.components:
        a_i, b_i, c_i = _packet_quadratic(chi_c.params, post.t_f, hbar)
        for comp in components:
            a_j, b_j, c_j = _packet_quadratic(comp.params, post.t_f, hbar)
            total += (np.conj(chi_c.weight) * comp.weight
                      * _gauss_integral(np.conj(a_i) + a_j,
                                        np.conj(b_i) + b_j,
                                        np.conj(c_i) + c_j))
    return complex(total)


def classical_link_momentum(w: float, t_w: float, post: PostSelection,
                            m: float = 1.0) -> float:
    """Momentum of the straight path from (w, t_w) to the detector at t_f."""
    v = post.variant
    x_R = v.x_R if isinstance(v, (PositionDelta, GaussianFilter)) else \
        packet_center(v.components[0].params, post.t_f)
    return m * (x_R - w) / (post.t_f - t_w)


# ---------------------------------------------------------------------------
# Classification helpers
# ---------------------------------------------------------------------------

def _post_center(post: PostSelection, hbar: float) -> float:
    v = post.variant
    if isinstance(v, (PositionDelta, GaussianFilter)):
        return v.x_R
    # density-weighted center of the evolved post state
    cs = v.components
    ws = np.array([abs(c.weight) ** 2 for c in cs])
    xs = np.array([packet_center(c.params, post.t_f) for c in cs])
    return float(np.sum(ws * xs) / np.sum(ws))


def _split_packets(components: Sequence[WeightedGaussian], post: PostSelection,
                   hbar: float):
    """Partition components into (detected, mirror) by whose free center
    lands nearest the post-selection region at t_f."""
    x_post = _post_center(post, hbar)
    dists = [abs(packet_center(c.params, post.t_f) - x_post) for c in components]
    i_det = int(np.argmin(dists))
    detected = [components[i_det]]
    mirror = [c for i, c in enumerate(components) if i != i_det]
    return detected, mirror


def _classify(components, post, w, t_w, hbar):
    """Type of the weak value at (w, t_w) plus per-packet amplitudes there."""
    if len(components) == 1:
        amp = eval_components(components, w, t_w, hbar=hbar)
        return WeakValueType.SINGLE_PACKET, complex(amp), 0.0 + 0.0j
    detected, mirror = _split_packets(components, post, hbar)
    a_det = complex(eval_components(detected, w, t_w, hbar=hbar))
    a_mir = complex(eval_components(mirror, w, t_w, hbar=hbar))
    big = max(abs(a_det), abs(a_mir))
    if big == 0.0:
        return WeakValueType.TYPE3, a_det, a_mir
    det_on = abs(a_det) > PACKET_AMPLITUDE_CUTOFF * big
    mir_on = abs(a_mir) > PACKET_AMPLITUDE_CUTOFF * big
    if det_on and mir_on:
        return WeakValueType.TYPE3, a_det, a_mir
    if mir_on:
        return WeakValueType.TYPE2, a_det, a_mir
    return WeakValueType.TYPE1, a_det, a_mir


def _zero_reason(components, post, w, t_w, b_val, m, hbar):
    """Why a weak value (numerator) vanishes at this window, if it does."""
    w_arr = np.atleast_1d(np.asarray(w, dtype=float))
    # scale for 'the packet is present': its envelope peak at this time
    peaks = [abs(c.weight) * abs(qcore.gaussian_amplitude(
        c.params, packet_center(c.params, t_w), t_w, hbar=hbar))
        for c in components]
    scale = max(peaks)
    indiv = np.zeros(len(w_arr))
    for c in components:
        indiv = np.maximum(indiv, np.abs(
            c.weight * qcore.gaussian_amplitude(c.params, w_arr, t_w, hbar=hbar)))
    total = np.abs(eval_components(components, w_arr, t_w, hbar=hbar))
    # backward amplitude compared against a momentum-matched filter of the
    # same width (for delta/self post-selections the ratio is never small)
    v = post.variant
    if isinstance(v, GaussianFilter):
        ref = np.empty(len(w_arr), complex)
        for i, wi in enumerate(w_arr):
            p_match = classical_link_momentum(wi, t_w, post, m=m)
            matched = PostSelection(GaussianFilter(v.x_R, p_match, v.sigma_sel), post.t_f)
            ref[i] = backward_amplitude(matched, wi, t_w, m=m, hbar=hbar)
        b_ratio = np.abs(np.atleast_1d(b_val)) / np.maximum(np.abs(ref), 1e-300)
    else:
        b_ratio = np.ones(len(w_arr))
    reasons = []
    for i in range(len(w_arr)):
        if indiv[i] < PACKET_AMPLITUDE_CUTOFF * scale:
            reasons.append(ZeroReason.NO_AMPLITUDE)
        elif total[i] < INTERFERENCE_SUPPRESSION * indiv[i]:
            reasons.append(ZeroReason.INTERFERENCE_NODE)
        elif b_ratio[i] < 1e-3:
            reasons.append(ZeroReason.FILTERED_BACKWARD)
        else:
            reasons.append(ZeroReason.NONE)
    return reasons if not np.isscalar(w) else reasons[0]


# ---------------------------------------------------------------------------
# Weak values
# ---------------------------------------------------------------------------

def _resolve_components(initial):
    if isinstance(initial, WaveState):
        return initial.components
    return tuple(initial)


def _check_event(event: WeakMeasurementEvent, post: PostSelection):
    if not 0.0 < event.t_w < post.t_f:
        raise ValueError("coupling time must satisfy 0 < t_w < t_f")


def _denominator(initial, post, convention, m, hbar):
    comps = _resolve_components(initial)
    if comps is not None:
        if convention == "per_packet" and len(comps) > 1:
            detected, _ = _split_packets(comps, post, hbar)
            bare = (WeightedGaussian(1.0, detected[0].params),)
            return post_overlap_analytic(post, bare, hbar=hbar)
        return post_overlap_analytic(post, comps, hbar=hbar)
    # grid state: <chi(t_f)|U(t_f,0)|psi(0)> = Int B(x, 0-) psi0(x) dx.  The
    # backward amplitude is evaluated at the state's own time.
    state = initial
    b0 = backward_amplitude(post, state.grid.x, state.t, m=m, hbar=hbar)
    return complex(np.trapezoid(b0 * state.amplitudes, state.grid.x))


def _numerator_point(initial, post, w, t_w, convention, m, hbar):
    """B(w, t_w) * psi(w, t_w) with the convention's choice of psi."""
    comps = _resolve_components(initial)
    b_val = backward_amplitude(post, w, t_w, m=m, hbar=hbar)
    if comps is not None:
        if convention == "per_packet" and len(comps) > 1:
            wv_type, _, _ = _classify(comps, post, w, t_w, hbar)
            detected, mirror = _split_packets(comps, post, hbar)
            if wv_type == WeakValueType.TYPE1:
                active = (WeightedGaussian(1.0, detected[0].params),)
            elif wv_type == WeakValueType.TYPE2:
                active = tuple(WeightedGaussian(1.0, c.params) for c in mirror)
            else:
                # both packets interfere: full normalized state, times sqrt(2)
                # to match the per-packet denominator normalization
                amp = eval_components(comps, w, t_w, hbar=hbar)
                return b_val * math.sqrt(2.0) * amp, b_val
            amp = eval_components(active, w, t_w, hbar=hbar)
            return b_val * amp, b_val
        amp = eval_components(comps, w, t_w, hbar=hbar)
        return b_val * amp, b_val
    state = initial
    if not math.isclose(state.t, 0.0, abs_tol=1e-12):
        raise ValueError("grid initial state must be given at t = 0")
    amp = propagate_kernel(state.amplitudes, state.grid.x, state.grid.dx,
                           np.atleast_1d(float(w)), state.t, t_w, m, hbar)[0]
    return b_val * amp, b_val


def weak_value_projector(initial, post: PostSelection, event: WeakMeasurementEvent,
                         convention: str = "full_state", m: float = 1.0,
                         hbar: float = HBAR,
                         eps_den: float = EPS_DENOMINATOR) -> WeakValueResult:
    """Weak value of the (point or top-hat) position projector of the event.

    ``initial`` is a WaveState (grid samples, optionally with analytic
    components) or a sequence of WeightedGaussian components at t = 0.
    """
    _check_event(event, post)
    if convention not in ("full_state", "per_packet"):
        raise ValueError(f"unknown convention {convention!r}")
    if event.window.width > 0:
        return weak_value_finite_width(initial, post, event, convention=convention,
                                       m=m, hbar=hbar, eps_den=eps_den)
    den = _denominator(initial, post, convention, m, hbar)
    if abs(den) < eps_den:
        raise NearOrthogonalPostSelection(
            f"post-selection overlap {abs(den):.3e} below floor {eps_den:.1e}")
    w = event.window.w
    num, b_val = _numerator_point(initial, post, w, event.t_w, convention, m, hbar)
    comps = _resolve_components(initial)
    if comps is not None:
        wv_type, _, _ = _classify(comps, post, w, event.t_w, hbar)
        reason = _zero_reason(comps, post, w, event.t_w, b_val, m, hbar)
    else:
        wv_type, reason = WeakValueType.SINGLE_PACKET, ZeroReason.NONE
    return WeakValueResult(value=num / den, numerator=complex(num),
                           denominator=den, wv_type=wv_type, units="density",
                           w=w, t_w=event.t_w, zero_reason=reason)


def _window_quadrature_nodes(lo: float, hi: float, n: int = 801):
    # composite Simpson nodes (odd count)
    if n % 2 == 0:
        n += 1
    x = np.linspace(lo, hi, n)
    wts = np.ones(n)
    wts[1:-1:2] = 4.0
    wts[2:-1:2] = 2.0
    wts *= (hi - lo) / (n - 1) / 3.0
    return x, wts


def weak_value_finite_width(initial, post: PostSelection,
                            event: WeakMeasurementEvent,
                            convention: str = "full_state", m: float = 1.0,
                            hbar: float = HBAR,
                            eps_den: float = EPS_DENOMINATOR) -> WeakValueResult:
    """Weak value of a projector over the event's top-hat window.

    The numerator integrates B(x, t_w) psi(x, t_w) over the window; for self
    post-selection of a single packet this reduces to the captured
    probability Int |psi|^2 dx.
    """
    _check_event(event, post)
    if event.window.width <= 0:
        raise ValueError("finite-width weak value requires window width > 0")
    den = _denominator(initial, post, convention, m, hbar)
    if abs(den) < eps_den:
        raise NearOrthogonalPostSelection(
            f"post-selection overlap {abs(den):.3e} below floor {eps_den:.1e}")
    lo = event.window.w - 0.5 * event.window.width
    hi = event.window.w + 0.5 * event.window.width
    xq, wq = _window_quadrature_nodes(lo, hi)
    comps = _resolve_components(initial)
    b_val = backward_amplitude(post, xq, event.t_w, m=m, hbar=hbar)
    if comps is not None:
        if convention == "per_packet" and len(comps) > 1:
            wv_type, _, _ = _classify(comps, post, event.window.w, event.t_w, hbar)
            detected, mirror = _split_packets(comps, post, hbar)
            if wv_type == WeakValueType.TYPE1:
                active = (WeightedGaussian(1.0, detected[0].params),)
                amp = eval_components(active, xq, event.t_w, hbar=hbar)
            elif wv_type == WeakValueType.TYPE2:
                active = tuple(WeightedGaussian(1.0, c.params) for c in mirror)
                amp = eval_components(active, xq, event.t_w, hbar=hbar)
            else:
                amp = math.sqrt(2.0) * eval_components(comps, xq, event.t_w, hbar=hbar)
        else:
            amp = eval_components(comps, xq, event.t_w, hbar=hbar)
    else:
        amp = propagate_kernel(initial.amplitudes, initial.grid.x, initial.grid.dx,
                               xq, initial.t, event.t_w, m, hbar)
    num = complex(np.sum(wq * b_val * amp))
    if comps is not None:
        wv_type, _, _ = _classify(comps, post, event.window.w, event.t_w, hbar)
        reason = _zero_reason(comps, post, event.window.w, event.t_w,
                              backward_amplitude(post, event.window.w, event.t_w,
                                                 m=m, hbar=hbar), m, hbar)
    else:
        wv_type, reason = WeakValueType.SINGLE_PACKET, ZeroReason.NONE
    return WeakValueResult(value=num / den, numerator=num, denominator=den,
                           wv_type=wv_type, units="dimensionless",
                           w=event.window.w, t_w=event.t_w, zero_reason=reason)


def weak_value_profile(initial, post: PostSelection, t_w: float,
                       profile: WindowProfile, convention: str = "full_state",
                       m: float = 1.0, hbar: float = HBAR,
                       eps_den: float = EPS_DENOMINATOR) -> complex:
    """Weak value of the smooth window operator f_w(x) (dimensionless).

    This is the observable the coupled system-pointer engine actually
    measures, so its prediction must share the pointer's coupling profile.
    """
    den = _denominator(initial, post, convention, m, hbar)
    if abs(den) < eps_den:
        raise NearOrthogonalPostSelection(
            f"post-selection overlap {abs(den):.3e} below floor {eps_den:.1e}")
    lo, hi = profile.support()
    xq, wq = _window_quadrature_nodes(lo, hi, n=1601)
    comps = _resolve_components(initial)
    if comps is not None:
        amp = eval_components(comps, xq, t_w, hbar=hbar)
    else:
        amp = propagate_kernel(initial.amplitudes, initial.grid.x, initial.grid.dx,
                               xq, initial.t, t_w, m, hbar)
    b_val = backward_amplitude(post, xq, t_w, m=m, hbar=hbar)
    num = complex(np.sum(wq * profile(xq) * b_val * amp))
    return num / den


def pointer_shift_prediction(result: WeakValueResult | complex, g: float) -> float:
    """First-order conditional pointer displacement, g * Re(A_w)."""
    value = result.value if isinstance(result, WeakValueResult) else result
    return g * float(np.real(value))


def weak_value_scan(initial, post: PostSelection, t_w: float,
                    window_width: float = 0.0, w_grid=None,
                    convention: str = "full_state", m: float = 1.0,
                    hbar: float = HBAR,
                    eps_den: float = EPS_DENOMINATOR) -> list[WeakValueResult]:
    """Weak values across a sweep of window centers at fixed t_w.

    Per-point failures are recorded as NaN results rather than raised; the
    denominator is shared by all points and its failure is fatal.
    """
    if convention != "full_state":
        raise ValueError("scans use the full_state convention (completeness "
                         "holds only there)")
    if w_grid is None:
        if not isinstance(initial, WaveState):
            raise ValueError("w_grid is required when initial is not a WaveState")
        w_grid = initial.grid.x
    w_grid = np.asarray(w_grid, dtype=float)
    den = _denominator(initial, post, convention, m, hbar)
    if abs(den) < eps_den:
        raise NearOrthogonalPostSelection(
            f"post-selection overlap {abs(den):.3e} below floor {eps_den:.1e}")
    comps = _resolve_components(initial)
    results: list[WeakValueResult] = []
    if window_width == 0.0 and comps is not None:
        # vectorized closed-form sweep
        b_val = backward_amplitude(post, w_grid, t_w, m=m, hbar=hbar)
        amp = eval_components(comps, w_grid, t_w, hbar=hbar)
        nums = b_val * amp
        reasons = _zero_reason(comps, post, w_grid, t_w, b_val, m, hbar)
        for i, w in enumerate(w_grid):
            wv_type, _, _ = _classify(comps, post, w, t_w, hbar) if len(comps) > 1 \
                else (WeakValueType.SINGLE_PACKET, 0, 0)
            results.append(WeakValueResult(
                value=nums[i] / den, numerator=complex(nums[i]), denominator=den,
                wv_type=wv_type, units="density", w=float(w), t_w=t_w,
                zero_reason=reasons[i]))
        return results
    if window_width == 0.0 and comps is None:
        # grid path: one kernel-quadrature propagation serves the whole sweep
        state = initial
        amp = propagate_kernel(state.amplitudes, state.grid.x, state.grid.dx,
                               w_grid, state.t, t_w, m, hbar)
        b_val = backward_amplitude(post, w_grid, t_w, m=m, hbar=hbar)
        nums = b_val * amp
        for i, w in enumerate(w_grid):
            results.append(WeakValueResult(
                value=nums[i] / den, numerator=complex(nums[i]), denominator=den,
                wv_type=WeakValueType.SINGLE_PACKET, units="density",
                w=float(w), t_w=t_w))
        return results
    for w in w_grid:
        event = WeakMeasurementEvent(ProjectorWindow(float(w), window_width), t_w)
        try:
            results.append(weak_value_projector(initial, post, event,
                                                convention=convention, m=m,
                                                hbar=hbar, eps_den=eps_den))
        except (ValueError, ArithmeticError):
            results.append(WeakValueResult(
                value=complex(math.nan, math.nan), numerator=complex(math.nan),
                denominator=den, wv_type=WeakValueType.SINGLE_PACKET,
                units="density", w=float(w), t_w=t_w))
    return results


def scan_completeness(results: Sequence[WeakValueResult]) -> complex:
    """Trapezoid integral of a point-projector sweep over its w grid.

    Summing the projectors over all w gives the identity, so the integral
    of the full-state weak values is exactly 1 + 0i.
    """
    w = np.array([r.w for r in results])
    v = np.array([r.value for r in results])
    return complex(np.trapezoid(v, w))
