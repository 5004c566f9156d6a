"""Microwave-to-optical photon conversion in a chip-trapped Rydberg ensemble.

Desk-scale simulation of a cold-atom wave-mixing converter coupled to a
superconducting coplanar-waveguide cavity: ensemble amplitude dynamics,
directional optical emission and phase-matched conversion probability, and
pump-pulse shaping for tailored photon envelopes.
"""

__version__ = "0.1.0"

from .analytic import (AnalyticSolution, analytic_amplitudes, beta_coefficient,
                       photon_envelope, spatial_mode, temporal_mode)
from .dynamics import (ErfPulse, IntegrationError, TabulatedPulse, Trajectory,
                       evolve_full, evolve_reduced, paper_pulse, pump_envelope)
from .emission import (AngularGrid, DirectionalModes, EmissionResult, FitError,
                       GaussianFit, analyze_emission, angular_map,
                       cavity_output_probability, cooperative_emission_estimate,
                       directional_density, directional_modes, gaussian_beam_mode,
                       gaussian_fit, paper_grid, phase_matched_probability,
                       photon_amplitude, sphere_quadrature)
from .ensemble import (AtomCloud, CloudGeometry, effective_couplings, load_cloud,
                       participation_fraction, participation_width, sample_cloud,
                       save_cloud)
from .physics import (PhysicalParams, PhysicsError, ValidityWarning, field_per_photon,
                      gamma_eff, intensity_for_rabi, paper_params,
                      rydberg_level_energy, vacuum_rabi)
from .scenario import (ConfigError, ScenarioResult, export_cloud, load_config,
                       run_scenario, validate_config)
from .shaping import (TargetEnvelope, emitted_envelope, pump_for_absorption,
                      pump_for_emission)

__all__ = [
    "AnalyticSolution", "AngularGrid", "AtomCloud", "CloudGeometry", "ConfigError",
    "DirectionalModes", "EmissionResult", "ErfPulse", "FitError", "GaussianFit",
    "IntegrationError", "PhysicalParams", "PhysicsError", "ScenarioResult",
    "TabulatedPulse", "TargetEnvelope", "Trajectory", "ValidityWarning",
    "analytic_amplitudes", "analyze_emission", "angular_map", "beta_coefficient",
    "cavity_output_probability", "cooperative_emission_estimate",
    "directional_density", "directional_modes", "effective_couplings",
    "emitted_envelope", "evolve_full", "evolve_reduced", "export_cloud",
    "field_per_photon", "gamma_eff", "gaussian_beam_mode", "gaussian_fit",
    "intensity_for_rabi", "load_cloud", "load_config", "paper_grid", "paper_params",
    "paper_pulse", "participation_fraction", "participation_width",
    "phase_matched_probability", "photon_amplitude", "photon_envelope",
    "pump_envelope", "pump_for_absorption", "pump_for_emission", "run_scenario",
    "rydberg_level_energy", "sample_cloud", "save_cloud", "spatial_mode",
    "sphere_quadrature", "temporal_mode", "vacuum_rabi", "validate_config",
]
