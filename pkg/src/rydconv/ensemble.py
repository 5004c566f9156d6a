"""Atomic cloud sampling and position-dependent couplings.

The cloud is a Gaussian ensemble centered at the origin, elongated along z,
with the chip surface a distance x0 above the center.  Each atom carries a
cavity coupling eta_j = eta0 * exp(-(x0 - x_j)/D) from the evanescent cavity
mode and a Stark-shift detuning delta_s_j = alpha * x_j from the surface
field gradient.  That spatial texture drives every inhomogeneous effect
downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .constants import TWO_PI
from .physics import PhysicalParams, PhysicsError


@dataclass(frozen=True)
class CloudGeometry:
    """Gaussian cloud shape and size.  Lengths in meters."""

    sigma_x: float = 4e-6
    sigma_y: float = 4e-6
    sigma_z: float = 24e-6
    n_atoms: int = 15000
    rng_seed: int = 0

    def __post_init__(self):
        if min(self.sigma_x, self.sigma_y, self.sigma_z) <= 0.0:
            raise PhysicsError("all cloud standard deviations must be positive")
        if self.sigma_z < max(self.sigma_x, self.sigma_y):
            raise PhysicsError("elongated trap assumed: sigma_z must be >= sigma_x, sigma_y")
        if self.n_atoms < 1:
            raise PhysicsError("n_atoms must be >= 1")

    @property
    def peak_density(self) -> float:
        """Diagnostic peak density rho0 = N / ((2 pi)^{3/2} sx sy sz), atoms/m^3."""
        return self.n_atoms / ((TWO_PI) ** 1.5 * self.sigma_x * self.sigma_y * self.sigma_z)


@dataclass(frozen=True)
class AtomCloud:
    """Sampled atom positions with per-atom coupling and Stark detuning.

    ``positions`` is (N, 3) in meters, ``eta`` (N,) in rad/s, ``delta_s``
    (N,) in rad/s.  Immutable after sampling; reproducible from
    (geometry, params) including the seed.
    """

    positions: np.ndarray
    eta: np.ndarray
    delta_s: np.ndarray
    geometry: CloudGeometry
    eta_antinode: float        # rad/s at u = 1
    surface_position: float    # m
    decay_length: float        # m, evanescent scale D
    stark_gradient: float      # rad/(s m)

    @property
    def n_atoms(self) -> int:
        return self.positions.shape[0]

    @property
    def x(self) -> np.ndarray:
        return self.positions[:, 0]


def sample_cloud(geometry: CloudGeometry, params: PhysicalParams) -> AtomCloud:
    """Draw the atom positions and evaluate eta_j and delta_s_j.

    Positions are independent normal samples per axis from a generator
    seeded with ``geometry.rng_seed``.  Atoms landing above the chip
    surface (x_j > x0) are redrawn; with the surface ~10 sigma_x away this
    is astronomically rare, but the guard keeps eta_j <= eta0 exact.
    """
    if geometry.n_atoms < 1:
        raise PhysicsError("cannot sample an empty cloud")
    rng = np.random.default_rng(geometry.rng_seed)
    sigma = np.array([geometry.sigma_x, geometry.sigma_y, geometry.sigma_z])
    pos = rng.normal(0.0, 1.0, size=(geometry.n_atoms, 3)) * sigma
    bad = pos[:, 0] > params.surface_position
    while np.any(bad):
        pos[bad] = rng.normal(0.0, 1.0, size=(int(bad.sum()), 3)) * sigma
        bad = pos[:, 0] > params.surface_position
    eta = params.eta_at(pos[:, 0])
    delta_s = params.stark_gradient * pos[:, 0]
    return AtomCloud(
        positions=pos,
        eta=eta,
        delta_s=delta_s,
        geometry=geometry,
        eta_antinode=params.eta_antinode,
        surface_position=params.surface_position,
        decay_length=params.electrode_gap,
        stark_gradient=params.stark_gradient,
    )


def participation_fraction(cloud: AtomCloud, gamma: float, n_grid: int = 2001) -> float:
    """Effective fraction xi = Delta_x / sigma_x of atoms driving coherent emission.

    Delta_x is the FWHM, on a 1-D grid over +-6 sigma_x, of the emission
    amplitude weight along x,

        w(x) = |eta(x)|^2 / sqrt(gamma^2 + delta_s^2(x)) * exp(-x^2 / 2 sigma_x^2),

    i.e. the magnitude of the per-unit-length integrand of the collective
    response sum_j |eta_j|^2 / (gamma - i delta_s_j).  The result is clamped
    to <= 1: once the Stark layer outgrows the cloud, every atom
    participates.
    """
    if gamma <= 0.0:
        raise PhysicsError("gamma must be positive")
    geo = cloud.geometry
    x = np.linspace(-6.0 * geo.sigma_x, 6.0 * geo.sigma_x, n_grid)
    eta = cloud.eta_antinode * np.exp(-(cloud.surface_position - x) / cloud.decay_length)
    w = eta**2 / np.hypot(gamma, cloud.stark_gradient * x) * np.exp(-(x**2) / (2.0 * geo.sigma_x**2))
    width = _fwhm(x, w)
    return float(min(width / geo.sigma_x, 1.0))


def participation_width(cloud: AtomCloud, gamma: float, n_grid: int = 2001) -> float:
    """The Stark-layer width Delta_x (m) used by :func:`participation_fraction`."""
    if gamma <= 0.0:
        raise PhysicsError("gamma must be positive")
    geo = cloud.geometry
    x = np.linspace(-6.0 * geo.sigma_x, 6.0 * geo.sigma_x, n_grid)
    eta = cloud.eta_antinode * np.exp(-(cloud.surface_position - x) / cloud.decay_length)
    w = eta**2 / np.hypot(gamma, cloud.stark_gradient * x) * np.exp(-(x**2) / (2.0 * geo.sigma_x**2))
    return _fwhm(x, w)


def _fwhm(x: np.ndarray, w: np.ndarray) -> float:
    """Full width at half maximum by linear interpolation of the crossings."""
    imax = int(np.argmax(w))
    half = w[imax] / 2.0
    below_left = np.nonzero(w[:imax] < half)[0]
    below_right = np.nonzero(w[imax:] < half)[0]
    if below_left.size == 0 or below_right.size == 0:
        # weight never drops to half inside the grid: width exceeds the span
        return float(x[-1] - x[0])
    i = below_left[-1]
    x_left = np.interp(half, [w[i], w[i + 1]], [x[i], x[i + 1]])
    j = imax + below_right[0]
    x_right = np.interp(half, [w[j], w[j - 1]], [x[j], x[j - 1]])
    return float(x_right - x_left)


def effective_couplings(cloud: AtomCloud, omega_p: complex, params: PhysicalParams):
    """Second-order couplings and shifted detunings at pump amplitude omega_p.

    Returns ``(eta_t, delta_s_t, delta_e_t)``:

        eta_t_j     = eta_j * Omega_p / Delta * (1 + delta_s_j / (2 Delta))
        delta_s_t_j = delta_s_j + (|Omega_p|^2 - eta_j^2) / Delta
        delta_e_t   = delta_e + |Omega_p|^2 / Delta

    Omega_p may be time dependent, so callers re-evaluate this per time
    step; all three are odd/even in Delta exactly as the second-order
    perturbation theory dictates.
    """
    delta = params.delta_intermediate
    if delta == 0.0:
        raise PhysicsError("delta_intermediate must be nonzero for adiabatic elimination")
    eta_t = cloud.eta * (omega_p / delta) * (1.0 + cloud.delta_s / (2.0 * delta))
    ap2 = abs(omega_p) ** 2
    delta_s_t = cloud.delta_s + (ap2 - cloud.eta**2) / delta
    delta_e_t = params.delta_e + ap2 / delta
    return eta_t, delta_s_t, delta_e_t


_EXPORT_HEADER = "columns: x[m] y[m] z[m] eta[rad/s] delta_s[rad/s]"


def save_cloud(cloud: AtomCloud, path) -> None:
    """Write the cloud as a columnar text file (x, y, z, eta, delta_s)."""
    header = (
        f"{_EXPORT_HEADER}\n"
        f"seed={cloud.geometry.rng_seed} n_atoms={cloud.n_atoms}\n"
        f"sigma_x={cloud.geometry.sigma_x!r} sigma_y={cloud.geometry.sigma_y!r} "
        f"sigma_z={cloud.geometry.sigma_z!r}\n"
        f"eta_antinode={cloud.eta_antinode!r} surface_position={cloud.surface_position!r} "
        f"decay_length={cloud.decay_length!r} stark_gradient={cloud.stark_gradient!r}"
    )
    data = np.column_stack([cloud.positions, cloud.eta, cloud.delta_s])
    np.savetxt(path, data, header=header)


def load_cloud(path) -> AtomCloud:
    """Read a cloud exported by :func:`save_cloud`."""
    meta = {}
    with open(path) as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            for token in line[1:].split():
                if "=" in token:
                    key, _, val = token.partition("=")
                    meta[key] = float(val)
    data = np.loadtxt(path)
    data = np.atleast_2d(data)
    geometry = CloudGeometry(
        sigma_x=meta["sigma_x"],
        sigma_y=meta["sigma_y"],
        sigma_z=meta["sigma_z"],
        n_atoms=data.shape[0],
        rng_seed=int(meta["seed"]),
    )
    return AtomCloud(
        positions=data[:, :3],
        eta=data[:, 3],
        delta_s=data[:, 4],
        geometry=geometry,
        eta_antinode=meta["eta_antinode"],
        surface_position=meta["surface_position"],
        decay_length=meta["decay_length"],
        stark_gradient=meta["stark_gradient"],
    )
