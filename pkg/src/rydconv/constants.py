"""Physical constants and unit conversions.

Internal unit policy: SI throughout, with every frequency/rate stored as an
angular frequency (rad/s).  Config files and user-facing numbers use ordinary
frequencies in Hz and lengths in micrometers; the conversion happens exactly
once, at the config boundary (see :mod:`rydconv.scenario`).
"""

import numpy as np
from scipy.constants import physical_constants

C0 = physical_constants["speed of light in vacuum"][0]          # m/s
HBAR = physical_constants["reduced Planck constant"][0]         # J s
EPS0 = physical_constants["vacuum electric permittivity"][0]    # F/m
QE = physical_constants["elementary charge"][0]                 # C
A0 = physical_constants["Bohr radius"][0]                       # m
ME = physical_constants["electron mass"][0]                     # kg
U_AMU = physical_constants["atomic mass constant"][0]           # kg

# Dipole moments are quoted in atomic units of a0*e throughout.
A0_E = A0 * QE  # C m

RYDBERG_INF_HZ = physical_constants["Rydberg constant times c in Hz"][0]

# Reduced-mass Rydberg constant for Rb-87 (the default species).
M_RB87 = 86.909180531 * U_AMU
RYDBERG_RB87_HZ = RYDBERG_INF_HZ / (1.0 + ME / M_RB87)

TWO_PI = 2.0 * np.pi


def rad_from_hz(f):
    """Ordinary frequency (Hz) -> angular frequency (rad/s)."""
    return TWO_PI * np.asarray(f, dtype=float) if np.ndim(f) else TWO_PI * float(f)


def hz_from_rad(w):
    """Angular frequency (rad/s) -> ordinary frequency (Hz)."""
    return np.asarray(w, dtype=float) / TWO_PI if np.ndim(w) else float(w) / TWO_PI


def m_from_um(x):
    """Micrometers -> meters."""
    return np.asarray(x, dtype=float) * 1e-6 if np.ndim(x) else float(x) * 1e-6


def um_from_m(x):
    """Meters -> micrometers."""
    return np.asarray(x, dtype=float) * 1e6 if np.ndim(x) else float(x) * 1e6
