"""Closed-form adiabatic solution: the cross-check standard for the integrator.

In the regime gamma >> Gamma_s/2, |delta_e_t| with a constant drive, the
cavity amplitude decays as

    b0(t) = exp(-beta * int_0^t |Omega_p|^2 dt'),
    beta  = (1/Delta^2) sum_j |eta_j|^2 / (gamma - i delta_s_j),

the excited amplitudes follow quasi-steadily, and the photon amplitude
factorizes into a temporal mode A_k(t) and a spatial mode B_k.  Throughout
this module the second-order coupling is taken at leading order,
eta_t_j = eta_j Omega_p / Delta: that keeps b0, b_j, A_k, and B_k mutually
consistent, so the factorization identity holds exactly at quadrature
level.  beta stays complex everywhere; its imaginary part is a line pull
that chirps the emitted field, while magnitudes are controlled by Re(beta).

Time integrals are trapezoid sums on the caller's output grid (2048 points
by default), matching the quadrature used by the emission module.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .dynamics import PulseSpec, Trajectory, _output_grid, DEFAULT_GRID_POINTS
from .ensemble import AtomCloud
from .physics import PhysicalParams, PhysicsError, ValidityWarning


def beta_coefficient(cloud: AtomCloud, params: PhysicalParams,
                     gamma: Optional[float] = None) -> complex:
    """Collective response coefficient beta (s) of the cavity-amplitude decay.

    Exact sum over atoms of |eta_j|^2 / (Delta^2 (gamma - i delta_s_j)),
    with delta_s_j the static per-atom Stark detuning stored on the cloud
    (the paper-convention tilde detuning, zero at the cloud center).
    Re(beta) > 0 for any nonempty cloud: b0 decays, never grows.
    """
    if gamma is None:
        gamma = params.gamma
    if gamma <= 0.0:
        raise PhysicsError("gamma must be positive")
    terms = cloud.eta**2 / (gamma - 1j * cloud.delta_s)
    return complex(terms.sum() / params.delta_intermediate**2)


@dataclass(frozen=True)
class AnalyticSolution:
    """Adiabatic solution evaluated on a fixed time grid.

    ``atom_coeff`` holds w_j = -(gamma/Omega_d) (eta_j/Delta)/(gamma - i
    delta_s_j), so that b_j(t) = w_j * Omega_p(t) * b0(t); the full (N, T)
    array is only materialized on demand.
    """

    times: np.ndarray           # (T,)
    gamma: float
    beta: complex
    omega_p: np.ndarray         # (T,) pump amplitude on the grid
    pump_energy: np.ndarray     # (T,) int_0^t |Omega_p|^2
    b0: np.ndarray              # (T,) complex
    atom_coeff: np.ndarray      # (N,) complex
    cloud: AtomCloud
    params: PhysicalParams
    pulse: PulseSpec
    regime_notes: tuple = ()

    @property
    def envelope(self) -> np.ndarray:
        """Emitted photon envelope eps(t) = Omega_p(t) exp(-beta int |Omega_p|^2)."""
        return self.omega_p * self.b0

    def b_amplitudes(self) -> np.ndarray:
        """Excited-state amplitudes b_j(t) as an (N, T) array."""
        return self.atom_coeff[:, None] * (self.omega_p * self.b0)[None, :]

    @property
    def p_e(self) -> np.ndarray:
        """Total |e> population sum_j |b_j(t)|^2 in closed form."""
        return float(np.sum(np.abs(self.atom_coeff) ** 2)) * np.abs(self.omega_p * self.b0) ** 2

    def quasi_steady_residual(self) -> float:
        """Diagnostic max |db_j/dt| / (Gamma_e/2 |b_j|) over the run.

        The quasi-steady step assumes b_j tracks Omega_p(t) b0(t) slowly on
        the 2/Gamma_e response time; this reports how strongly that is
        violated (small is good).  No hard bound is asserted.
        """
        drive = np.abs(self.omega_p * self.b0)
        rate = np.gradient(drive, self.times)
        scale = np.max(drive) * self.params.gamma_e / 2.0
        return float(np.max(np.abs(rate)) / scale) if scale > 0 else np.inf

    def as_trajectory(self) -> Trajectory:
        """Package the closed-form amplitudes as a Trajectory.

        c_j is filled from the quasi-steady relation b_j = i Omega_d* c_j /
        (Gamma_e/2 - i delta_e); the decay accumulators are trapezoid
        integrals of the closed-form populations.
        """
        b = self.b_amplitudes()
        denom = self.params.gamma_e / 2.0 - 1j * self.params.delta_e
        if self.params.omega_d == 0.0:
            raise PhysicsError("quasi-steady c_j undefined for Omega_d = 0")
        c = b * (denom / (1j * np.conj(self.params.omega_d)))
        pe = np.einsum("nt->t", np.abs(b) ** 2)
        ps = np.einsum("nt->t", np.abs(c) ** 2)
        dec_e = self.params.gamma_e * cumulative_trapezoid(pe, self.times, initial=0.0)
        dec_s = self.params.gamma_s * cumulative_trapezoid(ps, self.times, initial=0.0)
        return Trajectory(
            times=self.times, b0=self.b0.copy(), c=c, b=b,
            decayed_e=dec_e, decayed_s=dec_s,
            cloud=self.cloud, params=self.params, pulse=self.pulse,
        )


def analytic_amplitudes(cloud: AtomCloud, pulse: PulseSpec, params: PhysicalParams,
                        grid: Optional[np.ndarray] = None, *,
                        n_points: int = DEFAULT_GRID_POINTS) -> AnalyticSolution:
    """Evaluate the closed-form b0(t) and the quasi-steady b_j coefficients.

    Emits a :class:`ValidityWarning` (never fails) when the regime
    assumptions are violated: gamma >= 5 Gamma_s/2, gamma >= 5 |delta_e|,
    Omega_d < Gamma_e/2.  Raises for Omega_d = 0, where the quasi-steady
    relation is singular and there is physically no emission channel.
    """
    if params.omega_d == 0.0:
        raise PhysicsError("analytic solution requires a nonzero drive Omega_d")
    gamma = params.gamma
    notes = []
    if gamma < 5.0 * params.gamma_s / 2.0:
        notes.append(f"gamma = {gamma:.4g} rad/s does not dominate Gamma_s/2 = {params.gamma_s / 2:.4g}")
    if params.delta_e != 0.0 and gamma < 5.0 * abs(params.delta_e):
        notes.append(f"gamma = {gamma:.4g} rad/s does not dominate |delta_e| = {abs(params.delta_e):.4g}")
    if params.omega_d >= params.gamma_e / 2.0:
        notes.append(f"Omega_d = {params.omega_d:.4g} rad/s is not below Gamma_e/2 = {params.gamma_e / 2:.4g}")
    for note in notes:
        warnings.warn("analytic regime: " + note, ValidityWarning, stacklevel=2)

    t = _output_grid(pulse.t_end, grid, n_points)
    omega_p = np.asarray(pulse.amplitude(t), dtype=complex)
    beta = beta_coefficient(cloud, params, gamma)
    energy = cumulative_trapezoid(np.abs(omega_p) ** 2, t, initial=0.0)
    b0 = np.exp(-beta * energy)
    coeff = -(gamma / params.omega_d) * (cloud.eta / params.delta_intermediate) / (gamma - 1j * cloud.delta_s)
    return AnalyticSolution(
        times=t, gamma=gamma, beta=beta, omega_p=omega_p, pump_energy=energy,
        b0=b0, atom_coeff=coeff, cloud=cloud, params=params, pulse=pulse,
        regime_notes=tuple(notes),
    )


def photon_envelope(pulse: PulseSpec, beta: complex,
                    grid: Optional[np.ndarray] = None, *,
                    n_points: int = DEFAULT_GRID_POINTS) -> tuple[np.ndarray, np.ndarray]:
    """Emitted envelope eps(t) = Omega_p(t) exp(-beta int_0^t |Omega_p|^2 dt').

    Returns ``(times, eps)``.  This is the map inverted by
    :func:`rydconv.shaping.pump_for_emission`.
    """
    t = _output_grid(pulse.t_end, grid, n_points)
    omega_p = np.asarray(pulse.amplitude(t), dtype=complex)
    energy = cumulative_trapezoid(np.abs(omega_p) ** 2, t, initial=0.0)
    return t, omega_p * np.exp(-beta * energy)


def temporal_mode(omega_k: float, pulse: PulseSpec, beta: complex,
                  grid: Optional[np.ndarray] = None, *,
                  omega_eg: float, n_points: int = DEFAULT_GRID_POINTS) -> tuple[np.ndarray, np.ndarray]:
    """Temporal mode A_k(t) of the emitted photon at frequency omega_k.

        A_k(t) = int_0^t Omega_p(t') e^{i (omega_k - omega_eg) t'}
                 e^{-beta int_0^{t'} |Omega_p|^2 dt''} dt'

    Returns ``(times, A_k)`` with nested trapezoid quadrature; the inner
    pump-energy accumulator is computed once and reused.
    """
    t = _output_grid(pulse.t_end, grid, n_points)
    omega_p = np.asarray(pulse.amplitude(t), dtype=complex)
    energy = cumulative_trapezoid(np.abs(omega_p) ** 2, t, initial=0.0)
    integrand = omega_p * np.exp(1j * (omega_k - omega_eg) * t - beta * energy)
    return t, cumulative_trapezoid(integrand, t, initial=0.0)


def spatial_mode(k_hat: np.ndarray, cloud: AtomCloud, params: PhysicalParams,
                 gamma: Optional[float] = None) -> complex:
    """Spatial mode B_k of the emitted photon, up to the constant g_k*/Delta.

        B_k = sum_j eta_j / (gamma - i delta_s_j) e^{i (k_p - k_d - k0 k_hat) . r_j}

    ``k_hat`` is a unit direction; the emitted wavenumber is fixed at k0.
    """
    if gamma is None:
        gamma = params.gamma
    k_hat = np.asarray(k_hat, dtype=float)
    k_hat = k_hat / np.linalg.norm(k_hat)
    dk = params.k_match_vec - params.k0 * k_hat
    phase = cloud.positions @ dk
    return complex(np.sum(cloud.eta / (gamma - 1j * cloud.delta_s) * np.exp(1j * phase)))
