"""Pump-pulse inversion for tailored photon envelopes.

The forward map (see :func:`rydconv.analytic.photon_envelope`) sends a pump
pulse to the emitted envelope eps(t) = Omega_p(t) exp(-beta int|Omega_p|^2).
This module inverts it: :func:`pump_for_emission` produces the pump that
emits a desired envelope from the sending node, and
:func:`pump_for_absorption` the pump that completely absorbs an incoming
photon of that envelope at a receiving node with its own beta.

The inversion magnitude factors use Re(beta), the part of the collective
response that moves probability; Im(beta) only chirps the carrier and is
reported as a diagnostic.  The receiving formula is singular at t = 0
where the accumulated envelope energy vanishes; the first nonzero sample
is regularized by treating |eps| as locally constant over its grid cell,
which gives the finite limit -sign(eps) / sqrt(2 Re(beta) (t - t_first)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .dynamics import TabulatedPulse
from .physics import PhysicsError


@dataclass(frozen=True)
class TargetEnvelope:
    """Desired complex photon envelope on a strictly increasing time grid."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        if times.ndim != 1 or times.size < 2 or values.shape != times.shape:
            raise PhysicsError("envelope needs matching 1-D time and value arrays")
        if np.any(np.diff(times) <= 0.0):
            raise PhysicsError("envelope time grid must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def energy(self) -> np.ndarray:
        """Cumulative int_0^t |eps|^2 dt' on the grid."""
        return cumulative_trapezoid(np.abs(self.values) ** 2, self.times, initial=0.0)

    @property
    def norm(self) -> float:
        """Total int |eps|^2 dt."""
        return float(self.energy[-1])

    @classmethod
    def from_file(cls, path) -> "TargetEnvelope":
        """Read a (t, Re eps, Im eps) or (t, eps) columnar text file."""
        data = np.atleast_2d(np.loadtxt(path))
        if data.shape[1] == 2:
            return cls(times=data[:, 0], values=data[:, 1].astype(complex))
        if data.shape[1] >= 3:
            return cls(times=data[:, 0], values=data[:, 1] + 1j * data[:, 2])
        raise PhysicsError("envelope file needs columns (t, eps) or (t, Re, Im)")

    def save(self, path) -> None:
        np.savetxt(path, np.column_stack([self.times, self.values.real, self.values.imag]),
                   header="t[s] Re_eps Im_eps")


def pump_for_emission(target: TargetEnvelope, beta: complex,
                      margin: float = 1e-3) -> TabulatedPulse:
    """Pump pulse whose emitted envelope equals the target (sending node).

        Omega_p(t) = eps(t) [1 - 2 Re(beta) int_0^t |eps|^2 dt']^{-1/2}

    Requires the bracket to stay above ``margin``: the target cannot carry
    more than the single photon the ensemble can emit.  Raises naming the
    first violating time otherwise.
    """
    if target.norm <= 0.0:
        return TabulatedPulse(times=_zero_based(target.times), values=np.zeros_like(target.values))
    bracket = 1.0 - 2.0 * beta.real * target.energy
    bad = bracket < margin
    if np.any(bad):
        t_bad = target.times[np.argmax(bad)]
        raise PhysicsError(
            f"target envelope too energetic: 1 - 2 Re(beta) int|eps|^2 falls below the "
            f"margin {margin:g} at t = {t_bad:.6e} s; reduce the envelope norm or beta")
    return TabulatedPulse(times=_zero_based(target.times), values=target.values / np.sqrt(bracket))


def pump_for_absorption(target: TargetEnvelope, beta: complex) -> TabulatedPulse:
    """Receiving-node pump that fully absorbs an incoming photon of shape eps.

        Omega_p(t) = -eps(t) [2 Re(beta) int_0^t |eps|^2 dt']^{-1/2}

    Samples where eps(t) = 0 map to Omega_p = 0 (the limit of the ratio);
    the first sample with nonzero eps but vanishing accumulated energy uses
    the locally-constant-|eps| regularization documented in the module
    docstring.  An envelope that is identically zero raises.
    """
    if beta.real <= 0.0:
        raise PhysicsError("Re(beta) must be positive for the absorption formula")
    if target.norm <= 0.0:
        raise PhysicsError("target envelope is identically zero on the whole grid")
    energy = target.energy
    values = target.values
    out = np.zeros_like(values)
    nonzero = np.abs(values) > 0.0
    ready = energy > 0.0
    regular = nonzero & ready
    out[regular] = -values[regular] / np.sqrt(2.0 * beta.real * energy[regular])
    first = nonzero & ~ready
    if np.any(first):
        idx = np.nonzero(first)[0]
        t = target.times
        # locally constant |eps|: int_0^t |eps|^2 ~ |eps(t)|^2 (t - t_onset)
        onset = t[idx[0] - 1] if idx[0] > 0 else t[0]
        dt = np.maximum(t[idx] - onset, (t[1] - t[0]) * 1e-6)
        out[idx] = -(values[idx] / np.abs(values[idx])) / np.sqrt(2.0 * beta.real * dt)
    return TabulatedPulse(times=_zero_based(target.times), values=out)


def emitted_envelope(pulse: TabulatedPulse, beta: complex) -> TargetEnvelope:
    """Forward map on a tabulated pump: eps = Omega_p exp(-Re(beta) int|Omega_p|^2).

    The magnitude-only counterpart of
    :func:`rydconv.analytic.photon_envelope`, used for shaping round
    trips; the Im(beta) chirp drops out of every |eps| comparison.
    """
    energy = cumulative_trapezoid(np.abs(pulse.values) ** 2, pulse.times, initial=0.0)
    return TargetEnvelope(times=pulse.times, values=pulse.values * np.exp(-beta.real * energy))


def _zero_based(times: np.ndarray) -> np.ndarray:
    """Shift a grid to start at 0 (TabulatedPulse requires it)."""
    return times - times[0] if times[0] != 0.0 else times
