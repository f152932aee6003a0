"""Qubit decoherence from structurally disordered ensembles of su(2) Hamiltonians.

Build a separable distribution over Hamiltonian directions and frequencies,
evaluate the exact ensemble-averaged Bloch map, extract the time-local
generator (decay rates, effective level spacing, Kossakowski matrix), and
cross-check everything against an independent Monte-Carlo sampler and the
master-equation integrator.
"""

from .su2 import (DensityMatrix, MemberHamiltonian, UnitVector, evolve_single,
                  purity, unitary_at)
from .quadrature import QuadratureError
from .radial import (ExponentialCutoffRadial, GaussianRadial, RadialModel,
                     ReciprocalSquareRadial, TabulatedRadial, expectation_quadrature)
from .angular import (AngularModel, BagelAngular, CardioidAngular, DirectionalMoments,
                      DumbbellAngular, KneadedCardioidAngular, SphereAngular,
                      TabulatedAngular, directional_moments,
                      directional_moments_quadrature, principal_frame)
from .ensemble import (RadialExpectations, SeparableEnsemble, load_angular_table,
                       load_radial_table)
from .dynmap import (BlochAffineMap, MapFamily, apply, bloch_trajectory, choi_check,
                     choi_matrix, f_component, map_at, purity_trajectory)
from .generator import (LindbladGenerator, PoleError, RateTrajectory, anisotropic_rates,
                        azimuthal_generator, divisibility_flags, extract_generator,
                        isotropic_rate, offdiagonal_rate, pole_scan, rate_trajectory,
                        short_time_positive_window)
from .montecarlo import MCEstimate, SamplerConfig, mc_average, sample_angular, sample_radial
from .propagation import IntegrationError, StateTrajectory, integrate_master, trace_distance
from .config import ConfigError, RunConfig, load_config
from .validation import CheckResult, run_checks

__version__ = "0.1.0"

__all__ = [
    "DensityMatrix", "MemberHamiltonian", "UnitVector", "evolve_single", "purity",
    "unitary_at", "QuadratureError", "RadialModel", "GaussianRadial",
    "ExponentialCutoffRadial", "ReciprocalSquareRadial", "TabulatedRadial",
    "expectation_quadrature", "AngularModel", "SphereAngular", "BagelAngular",
    "DumbbellAngular", "CardioidAngular", "KneadedCardioidAngular", "TabulatedAngular",
    "DirectionalMoments", "directional_moments", "directional_moments_quadrature",
    "principal_frame", "SeparableEnsemble", "RadialExpectations", "load_radial_table",
    "load_angular_table", "BlochAffineMap", "MapFamily", "map_at", "apply",
    "f_component", "purity_trajectory", "bloch_trajectory", "choi_matrix", "choi_check",
    "LindbladGenerator", "PoleError", "RateTrajectory", "isotropic_rate",
    "anisotropic_rates", "azimuthal_generator", "offdiagonal_rate", "extract_generator",
    "pole_scan", "rate_trajectory", "divisibility_flags", "short_time_positive_window",
    "SamplerConfig", "MCEstimate", "mc_average", "sample_radial", "sample_angular",
    "IntegrationError", "StateTrajectory", "integrate_master", "trace_distance",
    "ConfigError", "RunConfig", "load_config", "CheckResult", "run_checks",
]
