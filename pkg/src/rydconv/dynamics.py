"""Time evolution of the ensemble amplitude equations.

Two integrators share one machinery:

* :func:`evolve_reduced` -- the adiabatically eliminated model (2N+1 coupled
  complex amplitudes b0, c_j, b_j with second-order couplings), the
  production path for clouds of any size.
* :func:`evolve_full` -- the pre-elimination model including the
  intermediate-state amplitudes d_j (3N+1 equations), with the free-field
  continuum replaced by the decay -Gamma_e/2 on b_j.  Capped at small N and
  used as a validation oracle for the elimination.

Both append two real decay accumulators to the state so that norm plus
integrated loss is conserved to integrator tolerance at every stored time.
Propagation uses an adaptive embedded Runge-Kutta (DOP853 by default) with
dense output resampled onto a fixed uniform grid; all downstream time
integrals are trapezoid sums on that grid.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy.integrate import DOP853, RK45
from scipy.special import erf

from .ensemble import AtomCloud
from .physics import PhysicalParams, PhysicsError, ValidityWarning

DEFAULT_GRID_POINTS = 2048
DEFAULT_RTOL = 1e-8
DEFAULT_ATOL = 1e-12
FULL_MODEL_CAP = 64

_METHODS = {"DOP853": DOP853, "RK45": RK45}


class IntegrationError(RuntimeError):
    """Integrator failure; carries the time at which propagation stopped."""

    def __init__(self, message: str, t_fail: float):
        super().__init__(message)
        self.t_fail = t_fail


@dataclass(frozen=True)
class ErfPulse:
    """Pump envelope Omega_0/2 * [1 + erf((t - t0)/(sqrt(2) sigma_t))]."""

    omega0: float      # rad/s peak Rabi frequency
    t0: float          # s
    sigma_t: float     # s
    t_end: float       # s

    def __post_init__(self):
        if self.sigma_t <= 0.0 or self.t_end <= 0.0:
            raise PhysicsError("sigma_t and t_end must be positive")

    def amplitude(self, t):
        return self.omega0 * 0.5 * (1.0 + erf((np.asarray(t) - self.t0) / (np.sqrt(2.0) * self.sigma_t)))


@dataclass(frozen=True)
class TabulatedPulse:
    """Pump envelope given on a time grid, linearly interpolated.

    The grid must be strictly increasing and start at 0; ``t_end`` is the
    last grid point.  Values may be complex.
    """

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        if times.ndim != 1 or times.size < 2 or values.shape != times.shape:
            raise PhysicsError("tabulated pulse needs matching 1-D time and value arrays")
        if np.any(np.diff(times) <= 0.0):
            raise PhysicsError("tabulated pulse time grid must be strictly increasing")
        if times[0] != 0.0:
            raise PhysicsError("tabulated pulse grid must start at t = 0")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    def amplitude(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < self.times[0]) or np.any(t > self.times[-1] * (1 + 1e-12) + 1e-300):
            raise PhysicsError("time outside the tabulated pulse grid")
        re = np.interp(t, self.times, self.values.real)
        im = np.interp(t, self.times, self.values.imag)
        return re + 1j * im if np.iscomplexobj(self.values) else re


PulseSpec = Union[ErfPulse, TabulatedPulse]


def paper_pulse(t_end: float = 10e-6, omega0: float = 2.0 * np.pi * 200e3) -> ErfPulse:
    """The reference erf pump pulse: t0 = t_end/3, sigma_t = t_end/8."""
    return ErfPulse(omega0=omega0, t0=t_end / 3.0, sigma_t=t_end / 8.0, t_end=t_end)


def pump_envelope(t, pulse: PulseSpec):
    """Pump Rabi frequency Omega_p(t) (rad/s, possibly complex)."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0.0) or np.any(t_arr > pulse.t_end * (1 + 1e-12)):
        raise PhysicsError(f"t outside [0, t_end = {pulse.t_end}]")
    return pulse.amplitude(t)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Time-gridded amplitudes of one evolution run.

    ``c`` and ``b`` are (N, T) complex arrays of the Rydberg |s> and excited
    |e> amplitudes; ``d`` is present only for the full model.  ``norm`` is
    |b0|^2 + sum |c|^2 + sum |b|^2 (+ sum |d|^2), and ``decayed_e``/
    ``decayed_s`` are the accumulated loss integrals Gamma_e int sum|b|^2
    and Gamma_s int sum|c|^2, integrated by the ODE solver itself.
    """

    times: np.ndarray          # (T,)
    b0: np.ndarray             # (T,) complex
    c: np.ndarray              # (N, T) complex
    b: np.ndarray              # (N, T) complex
    decayed_e: np.ndarray      # (T,)
    decayed_s: np.ndarray      # (T,)
    cloud: AtomCloud
    params: PhysicalParams
    pulse: PulseSpec
    d: Optional[np.ndarray] = None   # (N, T) complex, full model only

    @property
    def n_atoms(self) -> int:
        return self.c.shape[0]

    @property
    def norm(self) -> np.ndarray:
        total = np.abs(self.b0) ** 2
        total = total + np.einsum("nt->t", np.abs(self.c) ** 2)
        total = total + np.einsum("nt->t", np.abs(self.b) ** 2)
        if self.d is not None:
            total = total + np.einsum("nt->t", np.abs(self.d) ** 2)
        return total

    @property
    def p_e(self) -> np.ndarray:
        """Total population of state |e> versus time."""
        return np.einsum("nt->t", np.abs(self.b) ** 2)

    @property
    def total_emission_probability(self) -> float:
        """Photon emission probability Gamma_e int sum_j |b_j|^2 dt."""
        return float(self.decayed_e[-1])

    def emission_probability_per_atom(self) -> np.ndarray:
        """Spatial emission map P(r_j) = Gamma_e int |b_j(t)|^2 dt."""
        weights = _trapezoid_weights(self.times)
        return self.params.gamma_e * ((np.abs(self.b) ** 2) @ weights)

    def save_series(self, path) -> None:
        """Columnar text dump of (t, Re b0, Im b0, p_e, norm, decayed_e, decayed_s)."""
        data = np.column_stack([
            self.times, self.b0.real, self.b0.imag, self.p_e, self.norm,
            self.decayed_e, self.decayed_s,
        ])
        np.savetxt(path, data, header="t[s] Re_b0 Im_b0 p_e norm decayed_e decayed_s")

    def save_amplitudes(self, path) -> None:
        """Full amplitude arrays as a compressed .npz (times, b0, c, b[, d])."""
        arrays = {"times": self.times, "b0": self.b0, "c": self.c, "b": self.b}
        if self.d is not None:
            arrays["d"] = self.d
        np.savez_compressed(path, **arrays)


def _trapezoid_weights(t: np.ndarray) -> np.ndarray:
    w = np.empty_like(t)
    w[1:-1] = 0.5 * (t[2:] - t[:-2])
    w[0] = 0.5 * (t[1] - t[0])
    w[-1] = 0.5 * (t[-1] - t[-2])
    return w


def _integrate_to_grid(rhs: Callable, y0: np.ndarray, t_grid: np.ndarray,
                       rtol: float, atol: float, method: str) -> np.ndarray:
    """Propagate y' = rhs(t, y) and sample the dense output on ``t_grid``.

    Returns (len(y0), T).  The output array is filled in place per step to
    avoid the transient factor-of-two memory of collect-then-stack.
    """
    try:
        solver_cls = _METHODS[method]
    except KeyError:
        raise PhysicsError(f"unknown integrator {method!r}; pick from {sorted(_METHODS)}")
    out = np.empty((y0.size, t_grid.size), dtype=complex)
    out[:, 0] = y0
    solver = solver_cls(rhs, t_grid[0], y0, t_bound=t_grid[-1], rtol=rtol, atol=atol)
    filled = 1
    while filled < t_grid.size:
        message = solver.step()
        if solver.status == "failed":
            raise IntegrationError(
                f"integrator failed at t = {solver.t:.6e} s: {message}", t_fail=solver.t)
        dense = solver.dense_output()
        while filled < t_grid.size and t_grid[filled] <= solver.t + 1e-30:
            out[:, filled] = dense(t_grid[filled])
            filled += 1
        if solver.status == "finished" and filled < t_grid.size:
            # t_bound reached; remaining grid points coincide with the endpoint
            while filled < t_grid.size:
                out[:, filled] = solver.y
                filled += 1
    return out


def _output_grid(t_end: float, grid: Optional[np.ndarray], n_points: int) -> np.ndarray:
    if grid is not None:
        grid = np.asarray(grid, dtype=float)
        if grid.ndim != 1 or grid.size < 2 or grid[0] != 0.0 or np.any(np.diff(grid) <= 0):
            raise PhysicsError("output grid must be 1-D, strictly increasing and start at 0")
        if abs(grid[-1] - t_end) > 1e-12 * t_end:
            raise PhysicsError("output grid must cover [0, t_end]")
        return grid
    return np.linspace(0.0, t_end, n_points)


def evolve_reduced(cloud: AtomCloud, pulse: PulseSpec, params: PhysicalParams,
                   grid: Optional[np.ndarray] = None, *,
                   n_points: int = DEFAULT_GRID_POINTS, rtol: float = DEFAULT_RTOL,
                   atol: float = DEFAULT_ATOL, method: str = "DOP853",
                   b0_init: complex = 1.0) -> Trajectory:
    """Integrate the reduced (adiabatically eliminated) amplitude equations.

        db0/dt  = i sum_j conj(eta_t_j) c_j
        dc_j/dt = (i dl_s_j(t) - Gamma_s/2) c_j + i eta_t_j b0 + i Omega_d b_j
        db_j/dt = (i dl_e(t) - Gamma_e/2) b_j + i conj(Omega_d) c_j

    with the time-dependent second-order couplings of
    :func:`rydconv.ensemble.effective_couplings` re-evaluated from
    Omega_p(t) at every stage.  The coupling enters the b0 equation
    conjugated, which makes the Gamma = 0 system exactly norm conserving.

    ``b0_init`` scales the initial cavity-photon amplitude (diagnostic;
    all outputs are linear in it).
    """
    t_grid = _output_grid(pulse.t_end, grid, n_points)
    n = cloud.n_atoms
    delta = params.delta_intermediate
    eta = cloud.eta
    # eta_t_j(t) = eta_factor_j * Omega_p(t); static part of dl_s_j below
    eta_factor = (eta * (1.0 + cloud.delta_s / (2.0 * delta)) / delta).astype(complex)
    c_base = 1j * (cloud.delta_s - eta**2 / delta) - params.gamma_s / 2.0
    gamma_e, gamma_s = params.gamma_e, params.gamma_s
    omega_d = params.omega_d
    delta_e = params.delta_e
    amplitude = pulse.amplitude

    def rhs(t, y):
        b0 = y[0]
        c = y[1:n + 1]
        b = y[n + 1:2 * n + 1]
        omega_p = amplitude(t)
        ap2 = abs(omega_p) ** 2
        shift = ap2 / delta
        dy = np.empty_like(y)
        dy[0] = 1j * np.conj(omega_p) * np.dot(eta_factor, c)
        dy[1:n + 1] = (c_base + 1j * shift) * c + (1j * omega_p * b0) * eta_factor + (1j * omega_d) * b
        dy[n + 1:2 * n + 1] = (1j * (delta_e + shift) - gamma_e / 2.0) * b + (1j * omega_d) * c
        dy[2 * n + 1] = gamma_e * np.vdot(b, b).real
        dy[2 * n + 2] = gamma_s * np.vdot(c, c).real
        return dy

    y0 = np.zeros(2 * n + 3, dtype=complex)
    y0[0] = b0_init
    out = _integrate_to_grid(rhs, y0, t_grid, rtol, atol, method)
    return Trajectory(
        times=t_grid,
        b0=out[0],
        c=out[1:n + 1],
        b=out[n + 1:2 * n + 1],
        decayed_e=out[2 * n + 1].real.copy(),
        decayed_s=out[2 * n + 2].real.copy(),
        cloud=cloud,
        params=params,
        pulse=pulse,
    )


def evolve_full(cloud: AtomCloud, pulse: PulseSpec, params: PhysicalParams,
                grid: Optional[np.ndarray] = None, *,
                n_points: int = DEFAULT_GRID_POINTS, rtol: float = DEFAULT_RTOL,
                atol: float = DEFAULT_ATOL, method: str = "DOP853",
                n_cap: int = FULL_MODEL_CAP, b0_init: complex = 1.0) -> Trajectory:
    """Integrate the pre-elimination model with intermediate amplitudes d_j.

        db0/dt  = i sum_j conj(Omega_p) d_j
        dd_j/dt = i Delta_p d_j + i Omega_p b0 - i conj(eta_j) c_j
        dc_j/dt = (i delta_s_j - Gamma_s/2) c_j - i eta_j d_j + i Omega_d b_j
        db_j/dt = (i delta_e - Gamma_e/2) b_j + i conj(Omega_d) c_j

    The free-field mode sum is replaced by the Weisskopf-Wigner decay
    -Gamma_e/2 on b_j; the slow Rydberg loss Gamma_s acts on c_j to match
    the reduced model.  The mean detuning Delta is used for Delta_p on
    every atom, with the position dependence carried by delta_s_j.

    The bare single-excitation truncation drops the pump light shift of
    the N-1 spectator ground-state atoms on every excited configuration
    while keeping all N shift channels of the ground configuration, which
    would displace the two-photon resonance by (N-1)|Omega_p|^2/Delta and
    is not what the adiabatic elimination assumes.  The known spectator
    shift i (N-1) |Omega_p(t)|^2/Delta is therefore restored on d_j, c_j
    and b_j, making the truncation consistent to second order; b0 still
    carries its dynamical N-channel shift, so compare amplitude moduli
    (gauge-invariant) between the two models.

    This path exists to validate the elimination and refuses clouds larger
    than ``n_cap`` atoms: use :func:`evolve_reduced` for production runs.
    """
    n = cloud.n_atoms
    if n > n_cap:
        raise PhysicsError(
            f"full model capped at {n_cap} atoms (got {n}); this path is a validation "
            "oracle -- use evolve_reduced for large ensembles")
    t_grid = _output_grid(pulse.t_end, grid, n_points)
    delta = params.delta_intermediate
    eta = cloud.eta.astype(complex)
    d_coeff = 1j * delta
    c_coeff = 1j * cloud.delta_s - params.gamma_s / 2.0
    b_coeff = 1j * params.delta_e - params.gamma_e / 2.0
    gamma_e, gamma_s = params.gamma_e, params.gamma_s
    omega_d = params.omega_d
    amplitude = pulse.amplitude

    def rhs(t, y):
        b0 = y[0]
        d = y[1:n + 1]
        c = y[n + 1:2 * n + 1]
        b = y[2 * n + 1:3 * n + 1]
        omega_p = amplitude(t)
        # spectator level shift +(N-1)|Omega_p|^2/Delta enters amplitudes as -i
        spectator = -1j * (n - 1) * abs(omega_p) ** 2 / delta
        dy = np.empty_like(y)
        dy[0] = 1j * np.conj(omega_p) * d.sum()
        dy[1:n + 1] = (d_coeff + spectator) * d + (1j * omega_p) * b0 - 1j * np.conj(eta) * c
        dy[n + 1:2 * n + 1] = (c_coeff + spectator) * c - 1j * eta * d + (1j * omega_d) * b
        dy[2 * n + 1:3 * n + 1] = (b_coeff + spectator) * b + (1j * omega_d) * c
        dy[3 * n + 1] = gamma_e * np.vdot(b, b).real
        dy[3 * n + 2] = gamma_s * np.vdot(c, c).real
        return dy

    y0 = np.zeros(3 * n + 3, dtype=complex)
    y0[0] = b0_init
    out = _integrate_to_grid(rhs, y0, t_grid, rtol, atol, method)
    return Trajectory(
        times=t_grid,
        b0=out[0],
        c=out[n + 1:2 * n + 1],
        b=out[2 * n + 1:3 * n + 1],
        decayed_e=out[3 * n + 1].real.copy(),
        decayed_s=out[3 * n + 2].real.copy(),
        cloud=cloud,
        params=params,
        pulse=pulse,
        d=out[1:n + 1],
    )
