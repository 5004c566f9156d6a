"""Scenario parameters and derived physical quantities.

All secondary quantities of a conversion scenario (Rydberg transition
frequency, cavity field per photon, vacuum Rabi frequency, laser
intensities, drive-induced broadening) derive from the primitive
parameters collected in :class:`PhysicalParams`.  Everything is SI with
angular frequencies; dipole moments are inputs in units of a0*e and are
never computed from wavefunctions here.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .constants import A0_E, C0, EPS0, HBAR, RYDBERG_RB87_HZ, TWO_PI


class PhysicsError(ValueError):
    """Raised for physically invalid parameter values."""


class ValidityWarning(UserWarning):
    """Emitted when a parameter set leaves a formula's validity regime."""


def rydberg_level_energy(n: int, defect: float, rydberg_constant: float) -> float:
    """Level energy -R/(n - defect)^2 as an angular frequency (rad/s).

    ``rydberg_constant`` is the species value in rad/s (reduced-mass
    corrected).  Raises :class:`PhysicsError` if the effective quantum
    number n - defect is not positive.
    """
    n_eff = n - defect
    if n_eff <= 0.0:
        raise PhysicsError(f"effective quantum number n - defect = {n_eff} must be > 0")
    return -rydberg_constant / n_eff**2


def field_per_photon(electrode_gap: float, cavity_length: float, omega_c: float) -> float:
    """RMS vacuum field (V/m) of the coplanar-waveguide mode.

    Uses the effective mode volume V_c = 2*pi*D^2*L of a strip-line
    resonator with electrode gap D and length L.
    """
    if electrode_gap <= 0.0 or cavity_length <= 0.0 or omega_c <= 0.0:
        raise PhysicsError("electrode gap, cavity length and omega_c must be positive")
    v_c = TWO_PI * electrode_gap**2 * cavity_length
    return float(np.sqrt(HBAR * omega_c / (EPS0 * v_c)))


def vacuum_rabi(dipole_si: float, cavity_field: float, mode_value: float = 1.0) -> float:
    """Single-photon coupling rate (rad/s) at a given cavity mode value.

    ``dipole_si`` in a0*e, ``cavity_field`` in V/m, ``mode_value`` the
    dimensionless mode function u(r) in [0, 1].
    """
    if not 0.0 <= mode_value <= 1.0:
        raise PhysicsError(f"mode value {mode_value} outside [0, 1]")
    return dipole_si * A0_E / HBAR * cavity_field * mode_value


def intensity_for_rabi(rabi: float, dipole: float) -> float:
    """Laser intensity (W/cm^2) needed for a given Rabi frequency.

    I = (eps0 c / 2) (hbar*Omega / dipole)^2 with the dipole in a0*e.
    """
    if dipole <= 0.0:
        raise PhysicsError("dipole moment must be positive")
    intensity_si = 0.5 * EPS0 * C0 * (HBAR * rabi / (dipole * A0_E)) ** 2
    return intensity_si * 1e-4  # W/m^2 -> W/cm^2


def gamma_eff(omega_d: float, gamma_e: float) -> float:
    """Drive-induced broadening |Omega_d|^2 / (Gamma_e / 2) of the upper Rydberg state.

    Valid for Omega_d < Gamma_e/2; a :class:`ValidityWarning` is emitted
    (not an error) when the drive is too strong for that picture.
    """
    if gamma_e <= 0.0:
        raise PhysicsError("Gamma_e must be positive")
    if abs(omega_d) >= gamma_e / 2.0:
        warnings.warn(
            f"Omega_d = {omega_d:.3g} rad/s is not below Gamma_e/2 = {gamma_e / 2:.3g} rad/s; "
            "the broadening formula gamma = |Omega_d|^2/(Gamma_e/2) is outside its regime",
            ValidityWarning,
            stacklevel=2,
        )
    return abs(omega_d) ** 2 / (gamma_e / 2.0)


@dataclass(frozen=True)
class PhysicalParams:
    """Fixed physical constants and species/cavity/laser parameters of a scenario.

    Frequencies and rates are angular (rad/s), lengths in meters, dipole
    moments in a0*e.  Instances are immutable and safe to share across
    threads.  ``k_p``/``k_d`` are the pump and drive wavevector magnitudes;
    the beams lie in the x-z plane, tilted from +z by ``pump_tilt_x`` and
    ``drive_tilt_x``.
    """

    rydberg_constant: float = TWO_PI * RYDBERG_RB87_HZ
    quantum_defect_s: float = 3.131
    quantum_defect_p: float = 2.651
    n_i: int = 68
    n_s: int = 69
    dipole_si: float = 2185.0           # a0*e, |i> -> |s>
    dipole_gi: float = 2.23e-4          # a0*e, |g> -> |i>
    dipole_se: float = 3.88e-3          # a0*e, |s> -> |e>
    cavity_length: float = 10.5e-3      # m
    electrode_gap: float = 10e-6        # m
    rel_permittivity: float = 5.6
    surface_position: float = 40e-6     # m, chip surface x0 above cloud center
    omega_c: float = 0.0                # rad/s; 0 -> derived from geometry
    omega_eg: float = 0.0               # rad/s; 0 -> c*(k_p - k_d), collinear
    gamma_e: float = TWO_PI * 6.1e6     # rad/s
    gamma_s: float = TWO_PI * 1.6e3     # rad/s
    gamma_i: float = TWO_PI * 1.6e3     # rad/s
    delta_intermediate: float = TWO_PI * 10e6   # rad/s, mean one-photon detuning
    delta_e: float = 0.0                # rad/s, three-photon detuning
    stark_gradient: float = TWO_PI * 0.5e12     # rad/(s m)
    omega_d: float = TWO_PI * 1e6       # rad/s, constant drive Rabi frequency
    lambda_p: float = 297e-9            # m, pump wavelength
    lambda_d: float = 480e-9            # m, drive wavelength
    pump_tilt_x: float = 0.0            # rad, pump beam tilt from +z in x-z plane
    drive_tilt_x: float = 0.0           # rad
    adiabatic_min_ratio: float = 5.0    # validity guard on |Delta| / couplings

    def __post_init__(self):
        for name in ("rydberg_constant", "cavity_length", "electrode_gap",
                     "rel_permittivity", "surface_position", "lambda_p", "lambda_d",
                     "dipole_si", "dipole_gi", "dipole_se"):
            if getattr(self, name) <= 0.0:
                raise PhysicsError(f"{name} must be positive, got {getattr(self, name)}")
        # decay rates and the drive may be exactly zero for unitarity diagnostics
        for name in ("gamma_e", "gamma_s", "gamma_i", "omega_d"):
            if getattr(self, name) < 0.0:
                raise PhysicsError(f"{name} must be non-negative, got {getattr(self, name)}")
        if self.delta_intermediate == 0.0:
            raise PhysicsError("delta_intermediate must be nonzero")
        if self.omega_c == 0.0:
            object.__setattr__(self, "omega_c", TWO_PI * C0 / (self.cavity_length * np.sqrt(self.rel_permittivity)))
        if self.omega_eg == 0.0:
            object.__setattr__(self, "omega_eg", C0 * (TWO_PI / self.lambda_p - TWO_PI / self.lambda_d))
        if self.omega_eg <= 0.0:
            raise PhysicsError("omega_eg must be positive (lambda_p must be shorter than lambda_d)")

    # -- wavevectors ------------------------------------------------------

    @property
    def k0(self) -> float:
        """Emitted-photon wavenumber omega_eg / c (rad/m)."""
        return self.omega_eg / C0

    @property
    def k_p_vec(self) -> np.ndarray:
        """Pump wavevector (rad/m), tilted from +z in the x-z plane."""
        k = TWO_PI / self.lambda_p
        return np.array([k * np.sin(self.pump_tilt_x), 0.0, k * np.cos(self.pump_tilt_x)])

    @property
    def k_d_vec(self) -> np.ndarray:
        """Drive wavevector (rad/m)."""
        k = TWO_PI / self.lambda_d
        return np.array([k * np.sin(self.drive_tilt_x), 0.0, k * np.cos(self.drive_tilt_x)])

    @property
    def k_match_vec(self) -> np.ndarray:
        """Phase-matched emission wavevector k_p - k_d (rad/m)."""
        return self.k_p_vec - self.k_d_vec

    # -- derived scalars ---------------------------------------------------

    def level_energy(self, n: int, defect: float) -> float:
        return rydberg_level_energy(n, defect, self.rydberg_constant)

    @property
    def omega_si(self) -> float:
        """Rydberg |i> -> |s> transition frequency (rad/s)."""
        e_s = self.level_energy(self.n_s, self.quantum_defect_s)
        e_i = self.level_energy(self.n_i, self.quantum_defect_p)
        return e_s - e_i

    @property
    def cavity_field(self) -> float:
        """Field per photon eps_c (V/m)."""
        return field_per_photon(self.electrode_gap, self.cavity_length, self.omega_c)

    @property
    def eta_antinode(self) -> float:
        """Vacuum Rabi frequency (rad/s) at the cavity antinode, u = 1."""
        return vacuum_rabi(self.dipole_si, self.cavity_field, 1.0)

    def mode_value(self, x) -> np.ndarray:
        """Evanescent mode function u = exp(-(x0 - x)/D) at height x below the surface."""
        return np.exp(-(self.surface_position - np.asarray(x, dtype=float)) / self.electrode_gap)

    def eta_at(self, x) -> np.ndarray:
        """Position-dependent vacuum Rabi frequency eta(x) (rad/s)."""
        return self.eta_antinode * self.mode_value(x)

    @property
    def eta_center(self) -> float:
        """eta at the cloud center x = 0."""
        return float(self.eta_at(0.0))

    @property
    def gamma(self) -> float:
        """Effective broadening of |s> by the constant drive (rad/s)."""
        return gamma_eff(self.omega_d, self.gamma_e)

    def pump_intensity(self, omega_p: float) -> float:
        """Pump intensity (W/cm^2) for a given pump Rabi frequency."""
        return intensity_for_rabi(omega_p, self.dipole_gi)

    @property
    def drive_intensity(self) -> float:
        """Drive intensity (W/cm^2) for the configured Omega_d."""
        return intensity_for_rabi(self.omega_d, self.dipole_se)

    def validity_report(self, omega_p_peak: Optional[float] = None) -> list[str]:
        """Check regime guards; returns a list of human-readable warnings.

        Guards (warnings, not errors -- the source inequalities come without
        margins): adiabatic elimination |Delta| >= ratio * max(|Omega_p|, eta),
        drive below saturation Omega_d < Gamma_e/2, and broadening dominating
        the Rydberg decay gamma >= 5 * Gamma_s/2.
        """
        notes = []
        couplings = [self.eta_center]
        if omega_p_peak is not None:
            couplings.append(abs(omega_p_peak))
        max_coupling = max(couplings)
        if max_coupling > 0 and abs(self.delta_intermediate) < self.adiabatic_min_ratio * max_coupling:
            notes.append(
                f"adiabaticity: |Delta|/2pi = {abs(self.delta_intermediate) / TWO_PI:.4g} Hz is less than "
                f"{self.adiabatic_min_ratio:g} x max coupling {max_coupling / TWO_PI:.4g} Hz"
            )
        if self.omega_d >= self.gamma_e / 2.0:
            notes.append(
                f"drive: Omega_d/2pi = {self.omega_d / TWO_PI:.4g} Hz is not below Gamma_e/2/2pi = "
                f"{self.gamma_e / 2 / TWO_PI:.4g} Hz"
            )
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ValidityWarning)
            gam = self.gamma
        if gam < 5.0 * self.gamma_s / 2.0:
            notes.append(
                f"broadening: gamma/2pi = {gam / TWO_PI:.4g} Hz does not dominate Gamma_s/2/2pi = "
                f"{self.gamma_s / 2 / TWO_PI:.4g} Hz"
            )
        if abs(self.k0 - np.linalg.norm(self.k_match_vec)) > 0.05 * self.k0:
            notes.append("phase matching: |k_p - k_d| deviates from omega_eg/c by more than 5%")
        return notes

    def with_updates(self, **changes) -> "PhysicalParams":
        """Return a copy with the given fields replaced."""
        return replace(self, **changes)


def paper_params(**overrides) -> PhysicalParams:
    """The reference Rb-87 scenario parameter set; fields may be overridden."""
    return PhysicalParams(**overrides)
