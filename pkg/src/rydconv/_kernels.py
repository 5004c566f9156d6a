"""Numerical hot loops for the emission module.

Two operations dominate the run time of an emission analysis at the
reference ensemble size: phase-weighted sums over atoms for many
directions, and the all-pairs sinc-kernel quadratic form behind the exact
sphere integral of the directional density.  Both are provided as
numba-jitted kernels with plain numpy fallbacks (same results, slower)
when numba is unavailable.

Determinism: every parallel loop writes per-row partials that are reduced
afterwards in a fixed order, so results do not depend on the thread count.
"""

from __future__ import annotations

import warnings

import numpy as np

try:
    from numba import njit, prange
    # some container images ship a TBB too old for numba's TBB layer; numba
    # falls back to another threading layer and warns (lazily, at first
    # parallel call), which is harmless noise here
    warnings.filterwarnings("ignore", message=".*TBB.*", module=r"numba\..*")
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        return wrap

    prange = range


@njit(parallel=True, fastmath=True, cache=True)
def _phase_dot_numba(dk, pos, vr, vi):  # pragma: no cover - jitted
    m = dk.shape[0]
    n = pos.shape[0]
    p = vr.shape[1]
    outr = np.zeros((m, p))
    outi = np.zeros((m, p))
    for a in prange(m):
        kx, ky, kz = dk[a, 0], dk[a, 1], dk[a, 2]
        accr = np.zeros(p)
        acci = np.zeros(p)
        for j in range(n):
            ph = kx * pos[j, 0] + ky * pos[j, 1] + kz * pos[j, 2]
            c = np.cos(ph)
            s = np.sin(ph)
            for q in range(p):
                accr[q] += c * vr[j, q] - s * vi[j, q]
                acci[q] += c * vi[j, q] + s * vr[j, q]
        outr[a] = accr
        outi[a] = acci
    return outr, outi


def _phase_dot_numpy(dk, pos, vr, vi, chunk=320):
    vals = vr + 1j * vi
    m = dk.shape[0]
    out = np.empty((m, vals.shape[1]), dtype=complex)
    for lo in range(0, m, chunk):
        hi = min(lo + chunk, m)
        out[lo:hi] = np.exp(1j * (dk[lo:hi] @ pos.T)) @ vals
    return out


def phase_weighted_sums(positions: np.ndarray, dk: np.ndarray, values: np.ndarray) -> np.ndarray:
    """sum_j exp(i dk_m . r_j) V_jp for every row dk_m; (m,) or (m, p) complex."""
    vals = values if values.ndim == 2 else values[:, None]
    dk = np.ascontiguousarray(dk, dtype=float)
    pos = np.ascontiguousarray(positions, dtype=float)
    vr = np.ascontiguousarray(vals.real)
    vi = np.ascontiguousarray(vals.imag)
    if HAVE_NUMBA:
        outr, outi = _phase_dot_numba(dk, pos, vr, vi)
        out = outr + 1j * outi
    else:
        out = _phase_dot_numpy(dk, pos, vr, vi)
    return out if values.ndim == 2 else out[:, 0]


@njit(parallel=True, fastmath=True, cache=True)
def _pair_sinc_numba(pos, k0, ur, ui):  # pragma: no cover - jitted
    n = pos.shape[0]
    r = ur.shape[1]
    row = np.zeros(n)
    for j in prange(n):
        xj, yj, zj = pos[j, 0], pos[j, 1], pos[j, 2]
        acc = 0.0
        for l in range(n):
            dx = xj - pos[l, 0]
            dy = yj - pos[l, 1]
            dz = zj - pos[l, 2]
            arg = k0 * np.sqrt(dx * dx + dy * dy + dz * dz)
            kern = np.sin(arg) / arg if arg > 1e-30 else 1.0
            dot = 0.0
            for q in range(r):
                dot += ur[j, q] * ur[l, q] + ui[j, q] * ui[l, q]
            acc += kern * dot
        row[j] = acc
    return row


def _pair_sinc_numpy(pos, k0, ur, ui, chunk=1024):
    n = pos.shape[0]
    u = ur + 1j * ui
    sq = np.einsum("jk,jk->j", pos, pos)
    row = np.empty(n)
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        d2 = sq[lo:hi, None] + sq[None, :] - 2.0 * (pos[lo:hi] @ pos.T)
        arg = k0 * np.sqrt(np.maximum(d2, 0.0))
        kern = np.divide(np.sin(arg), arg, out=np.ones_like(arg), where=arg > 1e-300)
        inner = kern @ np.conj(u)
        row[lo:hi] = np.real(np.einsum("mr,mr->m", u[lo:hi], inner))
    return row


def pair_sinc_quadratic(positions: np.ndarray, k0: float, u_scaled: np.ndarray) -> float:
    """sum_{j,l} sinc(k0 |r_j - r_l|) Re( u_j . conj(u_l) ) over all pairs.

    ``u_scaled`` is (N, r) complex; the result is the quadratic form
    behind int_{4pi} S dOmega / 4 pi.  Row partials are reduced in fixed
    order for thread-count-independent results.
    """
    pos = np.ascontiguousarray(positions, dtype=float)
    ur = np.ascontiguousarray(u_scaled.real)
    ui = np.ascontiguousarray(u_scaled.imag)
    if HAVE_NUMBA:
        row = _pair_sinc_numba(pos, float(k0), ur, ui)
    else:
        row = _pair_sinc_numpy(pos, float(k0), ur, ui)
    return float(np.sum(row))
