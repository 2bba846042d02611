"""
Domain layer - the physics of the measurement.

Contains the closed-form building blocks:
- Gaussian wavepacket algebra and sampled distributions
- Spin-1/2 states, operators and weak values
- Stern-Gerlach branch evolution and post-selection
- The asymptotic (AAV) weak-measurement predictions
"""

from .errors import (ConfigError, EmptyDistribution, EmptyGrid, EmptyState,
                     EnvelopeViolation, GridMismatch, InvalidRange,
                     NonUniformGrid, OrthogonalSelection, WeakValueError,
                     WrongStageCount)
from .gaussian import (ChirpedGaussian, Distribution, Representation,
                       UniformGrid, WavepacketSum, density_on_grid, fourier,
                       inner_product, inverse_fourier)
from .spin import (Spinor, SpinOperator, alpha_beta, bloch_state,
                   postselect_prob, weak_value)
from .sgevolve import (Axis, BranchState, Particle, Regime, SGStage,
                       classify_regime, derived_kick, evolve, initial_state,
                       overlap_I, post_select, reduced_density_matrix)
from .aav import (AAVPrediction, aav_distribution, aav_position_distribution,
                  higher_order_terms_check, validity_parameter)

__all__ = [
    "WeakValueError", "OrthogonalSelection", "EmptyGrid", "NonUniformGrid",
    "WrongStageCount", "EmptyState", "EmptyDistribution", "GridMismatch",
    "EnvelopeViolation", "InvalidRange", "ConfigError",
    "ChirpedGaussian", "WavepacketSum", "UniformGrid", "Distribution",
    "Representation", "fourier", "inverse_fourier", "inner_product",
    "density_on_grid",
    "Spinor", "SpinOperator", "bloch_state", "alpha_beta", "weak_value",
    "postselect_prob",
    "Axis", "Particle", "SGStage", "BranchState", "Regime", "initial_state",
    "derived_kick", "evolve", "overlap_I", "reduced_density_matrix",
    "post_select", "classify_regime",
    "AAVPrediction", "aav_distribution", "aav_position_distribution",
    "validity_parameter", "higher_order_terms_check",
]
