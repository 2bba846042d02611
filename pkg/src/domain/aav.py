"""
The standard (asymptotic) weak-measurement formalism.

Predictions here assume the coupling can be expanded to first order and
resummed into a plane-wave kick of p' * w, so the post-selected pointer is
the initial Gaussian shifted by the real part of the weak value in momentum
space and by its imaginary part in position space.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional

from ..config.settings import AAV_VALIDITY_THRESHOLD, HBAR
from .gaussian import (ChirpedGaussian, Distribution, Representation,
                       UniformGrid, WavepacketSum, default_grid,
                       density_on_grid)
from .spin import (SIGMA_X, UP_Z, SpinOperator, Spinor, bloch_state,
                   postselect_prob, weak_value)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AAVPrediction:
    weak_value: complex
    pointer_shift: float        # p' * Re w
    position_shift: float       # -2 delta^2 p' Im w / hbar
    distribution: Distribution
    postselect_prob: float
    eta: float

    @property
    def valid(self) -> bool:
        return is_valid(self.eta)


class HigherOrderTerm(NamedTuple):
    order: int
    to_overlap: float
    to_first_order: float


def validity_parameter(p_prime: float, delta: float, weak_value: complex,
                       hbar: float = HBAR) -> float:
    """eta = delta * p' * |w| / hbar"""
    return abs(delta * p_prime * abs(weak_value) / hbar)


def is_valid(eta: float) -> bool:
    return eta < AAV_VALIDITY_THRESHOLD


def aav_prediction(chi_in: Spinor, chi_f: Spinor, p_prime: float, delta: float,
                   grid: Optional[UniformGrid] = None, A: SpinOperator = SIGMA_X,
                   hbar: float = HBAR) -> AAVPrediction:
    """AAV momentum-space pointer for an arbitrary pre/post-selection."""
    w = weak_value(chi_in, chi_f, A)
    prob = postselect_prob(chi_in, chi_f)
    center = p_prime * w.real
    width = hbar / (2.0 * delta)
    pointer = WavepacketSum(terms=(ChirpedGaussian(amp=math.sqrt(prob), x0=center,
                                                   delta=width),),
                            representation=Representation.MOMENTUM)
    if grid is None:
        grid = default_grid(pointer)
    distribution = density_on_grid(pointer, grid, axis="x", label="aav")
    eta = validity_parameter(p_prime, delta, w, hbar)
    if not is_valid(eta):
        logger.warning("AAV validity parameter eta=%.3g is not below %.3g",
                       eta, AAV_VALIDITY_THRESHOLD)
    return AAVPrediction(weak_value=w, pointer_shift=center,
                         position_shift=-2.0 * delta ** 2 * p_prime * w.imag / hbar,
                         distribution=distribution, postselect_prob=prob, eta=eta)


def aav_distribution(theta: float, p_prime: float, delta: float,
                     grid: Optional[UniformGrid] = None,
                     hbar: float = HBAR) -> AAVPrediction:
    """
    Pre-selection |up_theta>, post-selection |up_z>, observable sigma_x:
    weight cos^2(theta/2), center p' tan(theta/2), width hbar/(2 delta).
    """
    return aav_prediction(bloch_state(theta), UP_Z, p_prime, delta, grid, SIGMA_X, hbar)


def aav_position_distribution(chi_in: Spinor, chi_f: Spinor, p_prime: float,
                              delta: float, grid: Optional[UniformGrid] = None,
                              A: SpinOperator = SIGMA_X,
                              hbar: float = HBAR) -> Distribution:
    """|<chi_f|chi_in>|^2 |psi0|^2 displaced by -2 delta^2 p' Im(w) / hbar."""
    w = weak_value(chi_in, chi_f, A)
    prob = postselect_prob(chi_in, chi_f)
    shift = -2.0 * delta ** 2 * p_prime * w.imag / hbar
    pointer = WavepacketSum(terms=(ChirpedGaussian(amp=math.sqrt(prob), x0=shift,
                                                   delta=delta),),
                            representation=Representation.POSITION)
    if grid is None:
        grid = default_grid(pointer)
    return density_on_grid(pointer, grid, axis="x", label="aav")


def aav_limit_pointer(chi_in: Spinor, chi_f: Spinor, p_prime: float, delta: float,
                      A: SpinOperator = SIGMA_X, hbar: float = HBAR) -> WavepacketSum:
    """
    Resummed position-space pointer <chi_f|chi_in> psi0(x) exp(i p' w x / hbar).
    An imaginary part of w turns the carrier into a real exponential, which
    completes the square into a displaced Gaussian.
    """
    overlap = chi_f.inner(chi_in)
    w = weak_value(chi_in, chi_f, A)
    kappa = p_prime * w.imag / hbar
    packet = ChirpedGaussian(amp=overlap * math.exp(delta ** 2 * kappa ** 2),
                             x0=-2.0 * delta ** 2 * kappa, delta=delta,
                             k0=p_prime * w.real / hbar)
    return WavepacketSum(terms=(packet,), representation=Representation.POSITION)


def higher_order_terms_check(theta: float, p_prime: float, delta: float, n_max: int,
                             chi_f: Spinor = UP_Z, A: SpinOperator = SIGMA_X,
                             hbar: float = HBAR,
                             chi_in: Optional[Spinor] = None) -> List[HigherOrderTerm]:
    """
    For n = 2..n_max, (p' delta / hbar)^n |<chi_f|A^n|chi_in>| relative to
    |<chi_f|chi_in>| and to the first-order term. All ratios << 1 is needed
    for the first-order expansion to hold. An explicit chi_in replaces |up_theta>.
    """
    if n_max < 2:
        raise ValueError(f"n_max must be >= 2, got {n_max}")
    if chi_in is None:
        chi_in = bloch_state(theta)
    scale = abs(p_prime * delta / hbar)
    overlap = abs(chi_f.inner(chi_in))
    first = scale * abs(A.matrix_element(chi_f, chi_in))

    terms = []
    for n in range(2, n_max + 1):
        term = scale ** n * abs(A.power(n).matrix_element(chi_f, chi_in))
        terms.append(HigherOrderTerm(n, _ratio(term, overlap), _ratio(term, first)))
    return terms


def _ratio(numerator: float, denominator: float) -> float:
    if numerator == 0:
        return 0.0
    if denominator == 0:
        return math.inf
    return numerator / denominator
