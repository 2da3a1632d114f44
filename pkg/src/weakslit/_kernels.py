"""Hot numeric kernels, each in a pure-numpy and a numba variant.

Public names (``gauss_mixture_eval``, ``propagate_kernel``, ``sine_series_eval``,
``rk4_free_mixture_ensemble``) dispatch to the numba build unless the
WEAKSLIT_NUMBA flag selects the numpy path (see ``_accel``).
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from ._accel import NUMBA_AVAILABLE, USE_NUMBA, njit

_QUARTIC = (2.0 / math.pi) ** 0.25


# ---------------------------------------------------------------------------
# Gaussian mixture evaluation: psi(x,t) and d(psi)/dx for a weighted sum of
# freely evolving Gaussian packets (width parameter d, mass m, hbar explicit).
# ---------------------------------------------------------------------------

def _gauss_mixture_impl(x, t, w, x0, p0, d, ms, hbar):
    n = x.shape[0]
    psi = np.zeros(n, np.complex128)
    dpsi = np.zeros(n, np.complex128)
    for k in range(w.shape[0]):
        m = ms[k]
        dk = d[k]
        denom = 4.0 * dk * dk * m + 2j * hbar * t
        alpha = m / denom
        pref = _QUARTIC * math.sqrt(dk * m) / cmath.sqrt(2.0 * dk * dk * m + 1j * hbar * t)
        xc = x0[k] + p0[k] * t / m
        phi0 = 1j * p0[k] * p0[k] * t / (2.0 * hbar * m)
        ip = 1j * p0[k] / hbar
        for i in range(n):
            u = x[i] - xc
            pk = w[k] * pref * cmath.exp(-alpha * u * u + ip * u + phi0)
            psi[i] += pk
            dpsi[i] += pk * (ip - 2.0 * alpha * u)
    return psi, dpsi


def gauss_mixture_eval_numpy(x, t, w, x0, p0, d, ms, hbar):
    x = np.asarray(x, dtype=np.float64)
    psi = np.zeros(x.shape, np.complex128)
    dpsi = np.zeros(x.shape, np.complex128)
    for k in range(len(w)):
        m = ms[k]
        dk = d[k]
        alpha = m / (4.0 * dk * dk * m + 2j * hbar * t)
        pref = _QUARTIC * math.sqrt(dk * m) / np.sqrt(2.0 * dk * dk * m + 1j * hbar * t + 0j)
        xc = x0[k] + p0[k] * t / m
        u = x - xc
        pk = w[k] * pref * np.exp(-alpha * u * u + 1j * p0[k] * u / hbar
                                  + 1j * p0[k] * p0[k] * t / (2.0 * hbar * m))
        psi += pk
        dpsi += pk * (1j * p0[k] / hbar - 2.0 * alpha * u)
    return psi, dpsi


# ---------------------------------------------------------------------------
# Free-propagator quadrature: psi(x_to, t_to) = Int K(x_to,t_to; x,t_from) psi0(x) dx
# on a uniform source grid (trapezoid weights).
# ---------------------------------------------------------------------------

def _propagate_kernel_impl(psi0, x_from, dx, x_to, t_from, t_to, m, hbar):
    dt = t_to - t_from
    pref = cmath.sqrt(m / (2j * math.pi * hbar * dt))
    c = 1j * m / (2.0 * hbar * dt)
    n_from = x_from.shape[0]
    out = np.zeros(x_to.shape[0], np.complex128)
    for j in range(x_to.shape[0]):
        acc = 0.0 + 0.0j
        for i in range(n_from):
            u = x_to[j] - x_from[i]
            wt = 0.5 if (i == 0 or i == n_from - 1) else 1.0
            acc += wt * cmath.exp(c * u * u) * psi0[i]
        out[j] = pref * dx * acc
    return out


def propagate_kernel_numpy(psi0, x_from, dx, x_to, t_from, t_to, m, hbar):
    dt = t_to - t_from
    pref = cmath.sqrt(m / (2j * math.pi * hbar * dt))
    c = 1j * m / (2.0 * hbar * dt)
    wts = np.full(len(x_from), dx)
    wts[0] *= 0.5
    wts[-1] *= 0.5
    src = wts * np.asarray(psi0)
    out = np.empty(len(x_to), np.complex128)
    block = 256
    for j0 in range(0, len(x_to), block):
        u = x_to[j0:j0 + block, None] - x_from[None, :]
        out[j0:j0 + block] = np.exp(c * u * u) @ src
    return pref * out


# ---------------------------------------------------------------------------
# Sine-series evaluation: value and gradient of a 2D box state at point sets.
# ---------------------------------------------------------------------------

def _sine_series_impl(coeffs, kx, ky, norm_x, norm_y, x_off, y_off, xs, ys):
    npts = xs.shape[0]
    nx = kx.shape[0]
    ny = ky.shape[0]
    psi = np.zeros(npts, np.complex128)
    dpx = np.zeros(npts, np.complex128)
    dpy = np.zeros(npts, np.complex128)
    for p in range(npts):
        xr = xs[p] - x_off
        yr = ys[p] - y_off
        sy = np.empty(ny)
        cy = np.empty(ny)
        for b in range(ny):
            sy[b] = math.sin(ky[b] * yr)
            cy[b] = ky[b] * math.cos(ky[b] * yr)
        for a in range(nx):
            sa = math.sin(kx[a] * xr)
            ca = kx[a] * math.cos(kx[a] * xr)
            row_s = 0.0 + 0.0j
            row_c = 0.0 + 0.0j
            for b in range(ny):
                row_s += coeffs[a, b] * sy[b]
                row_c += coeffs[a, b] * cy[b]
            psi[p] += sa * row_s
            dpx[p] += ca * row_s
            dpy[p] += sa * row_c
    nf = norm_x * norm_y
    for p in range(npts):
        psi[p] *= nf
        dpx[p] *= nf
        dpy[p] *= nf
    return psi, dpx, dpy


def sine_series_eval_numpy(coeffs, kx, ky, norm_x, norm_y, x_off, y_off, xs, ys):
    xr = (np.asarray(xs) - x_off)[:, None]
    yr = (np.asarray(ys) - y_off)[:, None]
    sx = np.sin(kx[None, :] * xr)
    cx = kx[None, :] * np.cos(kx[None, :] * xr)
    sy = np.sin(ky[None, :] * yr)
    cy = ky[None, :] * np.cos(ky[None, :] * yr)
    row = sx @ coeffs
    row_c = cx @ coeffs
    nf = norm_x * norm_y
    psi = nf * np.einsum("pb,pb->p", row, sy + 0j)
    dpx = nf * np.einsum("pb,pb->p", row_c, sy + 0j)
    dpy = nf * np.einsum("pb,pb->p", row, cy + 0j)
    return psi, dpx, dpy


# ---------------------------------------------------------------------------
# Bohmian RK4 for an ensemble in a free Gaussian-mixture flow (1D). The
# velocity is hbar/m Im(psi' / psi) with the density floored at eps and the
# speed capped at v_max; below the floor the previous direction is held.
# ---------------------------------------------------------------------------

def rk4_free_mixture_ensemble_numpy(starts, t0, dt, n_steps, record_stride,
                                    w, x0, p0, d, ms, hbar, m_part, eps, v_max):
    def vel(x, t, vp):
        psi, dpsi = gauss_mixture_eval_numpy(x, t, w, x0, p0, d, ms, hbar)
        rho = np.abs(psi) ** 2
        v = hbar / m_part * np.imag(np.conj(psi) * dpsi) / np.maximum(rho, eps)
        v = np.clip(v, -v_max, v_max)
        dead = (rho <= eps) & (vp != 0.0)
        v[dead] = np.copysign(np.abs(v[dead]), vp[dead])
        return v

    x = np.array(starts, dtype=np.float64)
    n = len(x)
    n_rec = n_steps // record_stride + 1
    times = np.empty(n_rec)
    pos = np.empty((n_rec, n))
    crossed = np.zeros(n, bool)
    vp = np.zeros(n)
    times[0] = t0
    pos[0] = x
    rec = 1
    for s in range(n_steps):
        t = t0 + s * dt
        k1 = vel(x, t, vp)
        k2 = vel(x + 0.5 * dt * k1, t + 0.5 * dt, vp)
        k3 = vel(x + 0.5 * dt * k2, t + 0.5 * dt, vp)
        k4 = vel(x + dt * k3, t + dt, vp)
        xn = x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        crossed |= x * xn < 0.0
        vp = k1
        x = xn
        if (s + 1) % record_stride == 0:
            times[rec] = t0 + (s + 1) * dt
            pos[rec] = x
            rec += 1
    return times[:rec], pos[:rec], crossed


if NUMBA_AVAILABLE:
    _gauss_mixture_numba = njit(cache=True)(_gauss_mixture_impl)
    _propagate_kernel_numba = njit(cache=True)(_propagate_kernel_impl)
    _sine_series_numba = njit(cache=True)(_sine_series_impl)

    @njit(cache=True)
    def _mixture_velocity_numba(x, t, w, x0, p0, d, ms, hbar, m_part, eps, v_max, v_prev, out):
        psi, dpsi = _gauss_mixture_numba(x, t, w, x0, p0, d, ms, hbar)
        for i in range(x.shape[0]):
            rho = psi[i].real * psi[i].real + psi[i].imag * psi[i].imag
            cur = (psi[i].conjugate() * dpsi[i]).imag
            v = hbar / m_part * cur / (rho if rho > eps else eps)
            if v > v_max:
                v = v_max
            elif v < -v_max:
                v = -v_max
            if rho <= eps and v_prev[i] != 0.0:
                v = math.copysign(abs(v), v_prev[i])
            out[i] = v
        return out

    @njit(cache=True)
    def _rk4_free_mixture_numba(starts, t0, dt, n_steps, record_stride,
                                w, x0, p0, d, ms, hbar, m_part, eps, v_max):
        n = starts.shape[0]
        n_rec = n_steps // record_stride + 1
        times = np.empty(n_rec)
        pos = np.empty((n_rec, n))
        crossed = np.zeros(n, np.bool_)
        x = starts.copy()
        vp = np.zeros(n)
        k1 = np.empty(n)
        k2 = np.empty(n)
        k3 = np.empty(n)
        k4 = np.empty(n)
        xs = np.empty(n)
        times[0] = t0
        pos[0] = x
        rec = 1
        for s in range(n_steps):
            t = t0 + s * dt
            _mixture_velocity_numba(x, t, w, x0, p0, d, ms, hbar, m_part, eps, v_max, vp, k1)
            for i in range(n):
                xs[i] = x[i] + 0.5 * dt * k1[i]
            _mixture_velocity_numba(xs, t + 0.5 * dt, w, x0, p0, d, ms, hbar, m_part, eps, v_max, vp, k2)
            for i in range(n):
                xs[i] = x[i] + 0.5 * dt * k2[i]
            _mixture_velocity_numba(xs, t + 0.5 * dt, w, x0, p0, d, ms, hbar, m_part, eps, v_max, vp, k3)
            for i in range(n):
                xs[i] = x[i] + dt * k3[i]
            _mixture_velocity_numba(xs, t + dt, w, x0, p0, d, ms, hbar, m_part, eps, v_max, vp, k4)
            for i in range(n):
                xn = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                if x[i] * xn < 0.0:
                    crossed[i] = True
                vp[i] = k1[i]
                x[i] = xn
            if (s + 1) % record_stride == 0:
                times[rec] = t0 + (s + 1) * dt
                pos[rec] = x
                rec += 1
        return times[:rec], pos[:rec], crossed

    gauss_mixture_eval_numba = _gauss_mixture_numba
    propagate_kernel_numba = _propagate_kernel_numba
    sine_series_eval_numba = _sine_series_numba
    rk4_free_mixture_ensemble_numba = _rk4_free_mixture_numba

if USE_NUMBA:
    gauss_mixture_eval = gauss_mixture_eval_numba
    propagate_kernel = propagate_kernel_numba
    rk4_free_mixture_ensemble = rk4_free_mixture_ensemble_numba
else:
    gauss_mixture_eval = gauss_mixture_eval_numpy
    propagate_kernel = propagate_kernel_numpy
    rk4_free_mixture_ensemble = rk4_free_mixture_ensemble_numpy

# measured: the BLAS matmul formulation beats the scalar loops for this
# kernel's shapes (hundreds of modes, tens of points), so it is the
# production path on both flag settings; see benchmarks/bench_kernels.py
sine_series_eval = sine_series_eval_numpy
