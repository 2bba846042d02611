"""
Exact and AAV runs driven by a RunConfig, and parameter sweeps over them.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional

from ..config.run_config import RunConfig, SweepSpec
from ..config.settings import DEFAULT_SWEEP_WORKERS
from ..domain.aav import AAVPrediction, aav_position_distribution, aav_prediction
from ..domain.errors import EmptyState, OrthogonalSelection
from ..domain.gaussian import (ChirpedGaussian, Distribution, Representation,
                               WavepacketSum, default_grid, density_on_grid)
from ..domain.sgevolve import (Regime, classify_regime, derived_kick,
                               overlap_I, post_select, run_stages)
from ..domain.spin import weak_value
from .analysis import ComparisonReport, PeakSet, compare, find_peaks, mean_momentum

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunResult:
    config: RunConfig
    p_prime: float
    center_shift: float
    overlap: float
    regime: Regime
    postselect_prob: float
    exact: Distribution            # momentum space
    exact_position: Distribution
    peaks: PeakSet
    mean: float
    aav: Optional[AAVPrediction]
    aav_position: Optional[Distribution]
    comparison: Optional[ComparisonReport]

    @property
    def weak_value(self) -> Optional[complex]:
        return self.aav.weak_value if self.aav is not None else None

    @property
    def eta(self) -> Optional[float]:
        return self.aav.eta if self.aav is not None else None

    def rescaled_peaks(self) -> PeakSet:
        """Peak locations in units of p' (raw momentum when p' is zero)."""
        if self.p_prime == 0:
            return self.peaks
        return self.peaks.rescaled(self.p_prime)


def _covering(pointer: WavepacketSum, extra: WavepacketSum, count: int):
    return default_grid(WavepacketSum(terms=pointer.terms + extra.terms,
                                      representation=pointer.representation), count)


def run(config: RunConfig) -> RunResult:
    particle = config.build_particle()
    stages = config.build_stages()
    chi_in, chi_f = config.chi_in(), config.chi_f()
    measuring = stages[0]

    state = run_stages(chi_in, config.delta, stages, particle)
    pointer, probability = post_select(state, chi_f, measuring.axis)
    if probability <= 0 or not pointer.terms:
        raise EmptyState(f"post-selection onto {config.postselect} has zero probability")

    kick = derived_kick(measuring, particle)
    I = overlap_I(measuring, particle, config.delta)
    regime = classify_regime(I)
    momentum = pointer.to_momentum(particle.hbar)

    aav_pointer = None
    try:
        w = weak_value(chi_in, chi_f, measuring.axis.operator)
        aav_pointer = WavepacketSum(
            terms=(ChirpedGaussian(x0=kick.momentum_kick * w.real,
                                   delta=particle.hbar / (2.0 * config.delta)),),
            representation=Representation.MOMENTUM)
    except OrthogonalSelection as e:
        logger.info("%s: %s", config.name, e)

    if aav_pointer is not None:
        grid = _covering(momentum, aav_pointer, config.grid_points)
    else:
        grid = default_grid(momentum, config.grid_points)
    exact = density_on_grid(momentum, grid, label="exact")
    position_grid = default_grid(pointer, config.grid_points)
    exact_position = density_on_grid(pointer, position_grid, label="exact")

    aav = aav_position = comparison = None
    if aav_pointer is not None:
        aav = aav_prediction(chi_in, chi_f, kick.momentum_kick, config.delta, grid,
                             measuring.axis.operator, particle.hbar)
        aav_position = aav_position_distribution(chi_in, chi_f, kick.momentum_kick,
                                                 config.delta, position_grid,
                                                 measuring.axis.operator, particle.hbar)
        comparison = compare(exact, aav.distribution)

    peaks = find_peaks(exact)
    logger.info("%s: I=%.4g (%s), P=%.4g, %d exact peak(s)",
                config.name, I, regime.value, probability, len(peaks))
    return RunResult(config=config, p_prime=kick.momentum_kick,
                     center_shift=kick.center_shift, overlap=I, regime=regime,
                     postselect_prob=probability, exact=exact,
                     exact_position=exact_position, peaks=peaks,
                     mean=mean_momentum(exact), aav=aav, aav_position=aav_position,
                     comparison=comparison)


@dataclass(frozen=True)
class SweepRow:
    variable: str
    value: float
    overlap: float
    regime: Regime
    postselect_prob: float
    peaks: List[float]          # in units of p'
    weak_value: Optional[complex]
    eta: Optional[float]
    l1: Optional[float]
    ks: Optional[float]


def _sweep_point(config: RunConfig, spec: SweepSpec, value: float) -> SweepRow:
    result = run(spec.apply(config, value))
    return SweepRow(variable=spec.variable, value=float(value), overlap=result.overlap,
                    regime=result.regime, postselect_prob=result.postselect_prob,
                    peaks=result.rescaled_peaks().locations,
                    weak_value=result.weak_value, eta=result.eta,
                    l1=result.comparison.l1 if result.comparison else None,
                    ks=result.comparison.ks if result.comparison else None)


def sweep(config: RunConfig, spec: SweepSpec,
          workers: int = DEFAULT_SWEEP_WORKERS) -> List[SweepRow]:
    """One row per sweep value, in sweep order regardless of completion order."""
    values = spec.values()
    logger.info("sweeping %s over %d point(s) with %d worker(s)",
                spec.variable, len(values), workers)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        return list(pool.map(lambda v: _sweep_point(config, spec, v), values))
