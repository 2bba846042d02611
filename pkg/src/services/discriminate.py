"""
Telling two realizations of the maximally mixed spin state apart.

Alice sends either xi = (up_x, down_x, up_x, ...) or zeta = (up_z, down_z, ...).
Bob measures sigma_x on each particle, either strongly or weakly followed by
a post-selection, and stops as soon as the registered pointer samples single
out one of the two sequences.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats
from scipy.integrate import cumulative_trapezoid

from ..config.presets import get_preset
from ..config.run_config import RunConfig
from ..config.settings import (BRANCH_PRUNE_ATOL, DEFAULT_ALPHA,
                               DEFAULT_BATCH_SIZE, DEFAULT_MAX_PARTICLES,
                               ENVELOPE_SCALE, MAX_ENVELOPE_SCALE,
                               MAX_REJECTION_ROUNDS, SAMPLER_GRID_POINTS)
from ..domain.errors import EnvelopeViolation
from ..domain.gaussian import (ChirpedGaussian, Representation, WavepacketSum,
                               default_grid)
from ..domain.sgevolve import Particle, SGStage, evolve, initial_state, post_select
from ..domain.spin import (DOWN_X, DOWN_Z, UP_X, UP_Z, Spinor, orthogonal,
                           postselect_prob, weak_value)

logger = logging.getLogger(__name__)


class SourceKind(Enum):
    XI = "Xi"
    ZETA = "Zeta"


class Verdict(Enum):
    XI = "Xi"
    ZETA = "Zeta"
    UNDECIDED = "Undecided"


class Strategy(Enum):
    STRONG = "strong"
    EXACT_WEAK = "exact-weak"
    STANDARD_WEAK = "standard-weak"


@dataclass(frozen=True)
class Source:
    kind: SourceKind

    def state(self, index: int) -> Spinor:
        even = index % 2 == 0
        if self.kind is SourceKind.XI:
            return UP_X if even else DOWN_X
        return UP_Z if even else DOWN_Z


@dataclass(frozen=True)
class TrialRecord:
    index: int
    postselected: bool
    label: Optional[str] = None
    sample: Optional[float] = None
    outcome: Optional[int] = None     # sign of the sample, for strong readout

    @property
    def parity(self) -> str:
        return "even" if self.index % 2 == 0 else "odd"


@dataclass(frozen=True)
class Decision:
    verdict: Verdict
    particles_used: int
    statistic: float
    alpha: float
    strategy: Strategy
    source: SourceKind
    degenerate: bool = False
    trials: Tuple[TrialRecord, ...] = field(default=(), repr=False)

    @property
    def correct(self) -> bool:
        return self.verdict.value == self.source.value


@dataclass(frozen=True)
class MeasurementSetup:
    """
    One measuring stage plus the readout. postselect=None means no
    post-selection (strong readout); otherwise the channels are chi_f and,
    when keep_orthogonal is set, its orthogonal complement.
    """
    stage: SGStage
    particle: Particle
    delta: float
    postselect: Optional[Spinor]
    representation: Representation = Representation.MOMENTUM
    keep_orthogonal: bool = True
    grid_points: int = SAMPLER_GRID_POINTS

    @classmethod
    def from_run_config(cls, config: RunConfig, postselect: bool = True,
                        representation: Optional[Representation] = None,
                        keep_orthogonal: bool = True) -> "MeasurementSetup":
        return cls(stage=config.build_stages()[0],
                   particle=config.build_particle(),
                   delta=config.delta,
                   postselect=config.chi_f() if postselect else None,
                   representation=representation or config.pointer_representation,
                   keep_orthogonal=keep_orthogonal,
                   grid_points=config.grid_points)

    def channels(self) -> Tuple[Tuple[str, Spinor], ...]:
        if self.postselect is None:
            return ("up_z", UP_Z), ("down_z", DOWN_Z)
        return ("f", self.postselect), ("f_perp", orthogonal(self.postselect))

    def kept_labels(self) -> Tuple[str, ...]:
        labels = tuple(label for label, _ in self.channels())
        if self.postselect is not None and not self.keep_orthogonal:
            return labels[:1]
        return labels


def weak_setup(representation: Representation = Representation.MOMENTUM) -> MeasurementSetup:
    return MeasurementSetup.from_run_config(get_preset("fig7"), representation=representation)


def strong_setup() -> MeasurementSetup:
    return MeasurementSetup.from_run_config(get_preset("fig7-strong"), postselect=False,
                                            representation=Representation.MOMENTUM)


class PointerModel:
    """
    Normalized pointer density for one (input, channel) cell, with its
    probability, a grid CDF for the KS tests, and a rejection sampler whose
    envelope is the mixture of the branch Gaussians' densities. Cells with a
    tiny post-selection probability have a huge envelope scale; those are
    sampled by inverting the grid CDF instead.
    """

    def __init__(self, pointer: Optional[WavepacketSum], probability: float,
                 grid_points: int = SAMPLER_GRID_POINTS):
        self.probability = float(probability)
        self._pointer = pointer
        if self.is_empty:
            return

        amps = np.array([abs(complex(g.amp)) for g in pointer.terms])
        self._weights = amps / amps.sum()
        self._centers = np.array([g.x0 for g in pointer.terms])
        self._widths = np.array([g.delta for g in pointer.terms])
        self.scale = ENVELOPE_SCALE * amps.sum() ** 2 / self.probability

        self.grid = default_grid(pointer, grid_points)
        points = self.grid.points
        self.density = self.pdf(points)
        cdf = cumulative_trapezoid(self.density, dx=self.grid.step, initial=0.0)
        self._cdf = cdf / cdf[-1]
        if np.any(self.density > self.scale * self.envelope(points) * (1 + 1e-9)):
            raise EnvelopeViolation("pointer density exceeds the sampling envelope")

    @property
    def is_empty(self) -> bool:
        return self._pointer is None or not self._pointer.terms \
            or self.probability <= BRANCH_PRUNE_ATOL

    def pdf(self, x) -> np.ndarray:
        return self._pointer.density(x) / self.probability

    def envelope(self, x) -> np.ndarray:
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        return np.sum(self._weights[:, None]
                      * stats.norm.pdf(xs[None, :], self._centers[:, None],
                                       self._widths[:, None]), axis=0)

    def cdf(self, x) -> np.ndarray:
        return np.interp(x, self.grid.points, self._cdf, left=0.0, right=1.0)

    @property
    def uses_grid_sampler(self) -> bool:
        return self.scale > MAX_ENVELOPE_SCALE

    def draw(self, rng: np.random.Generator, size: int = 1) -> np.ndarray:
        if self.uses_grid_sampler:
            return self._draw_from_grid(rng, size)
        out = np.zeros(size)
        simulated = 0
        rounds = 0
        while simulated < size:
            if rounds == MAX_REJECTION_ROUNDS:
                logger.warning("rejection sampler stalled after %d rounds; drawing %d "
                               "sample(s) from the grid CDF", rounds, size - simulated)
                out[simulated:] = self._draw_from_grid(rng, size - simulated)
                break
            rounds += 1
            k = size - simulated
            component = rng.choice(self._weights.size, size=k, p=self._weights)
            x = rng.normal(self._centers[component], self._widths[component])
            u = rng.uniform(size=k)
            accept = u * self.scale * self.envelope(x) <= self.pdf(x)
            num_accept = int(np.sum(accept))
            if num_accept > 0:
                out[simulated:simulated + num_accept] = x[accept]
                simulated += num_accept
        return out

    def _draw_from_grid(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.interp(rng.uniform(size=size), self._cdf, self.grid.points)


def exact_model(setup: MeasurementSetup, chi_in: Spinor, chi: Spinor) -> PointerModel:
    state = evolve(initial_state(chi_in, setup.delta, axes=(setup.stage.axis,)),
                   setup.stage, setup.particle)
    pointer, probability = post_select(state, chi, setup.stage.axis)
    if not pointer.terms:
        return PointerModel(None, 0.0)
    pointer = pointer.in_representation(setup.representation, setup.particle.hbar)
    return PointerModel(pointer, probability, setup.grid_points)


def aav_model(setup: MeasurementSetup, chi_in: Spinor, chi: Spinor) -> PointerModel:
    """AAV prediction: Gaussian displaced by p' Re w (momentum) or by the Im w shift (position)."""
    probability = postselect_prob(chi_in, chi)
    if probability <= BRANCH_PRUNE_ATOL:
        return PointerModel(None, 0.0)
    w = weak_value(chi_in, chi, setup.stage.axis.operator)
    p_prime = setup.particle.magnetic_moment * setup.stage.gradient * setup.stage.transit_time
    hbar = setup.particle.hbar
    if setup.representation is Representation.MOMENTUM:
        packet = ChirpedGaussian(amp=math.sqrt(probability), x0=p_prime * w.real,
                                 delta=hbar / (2.0 * setup.delta))
    else:
        packet = ChirpedGaussian(amp=math.sqrt(probability),
                                 x0=-2.0 * setup.delta ** 2 * p_prime * w.imag / hbar,
                                 delta=setup.delta)
    pointer = WavepacketSum(terms=(packet,), representation=setup.representation)
    return PointerModel(pointer, probability, setup.grid_points)


class PointerLibrary:
    """Lazily built PointerModels keyed by (input state, channel label)."""

    def __init__(self, setup: MeasurementSetup,
                 predictor: Callable[[MeasurementSetup, Spinor, Spinor], PointerModel] = exact_model):
        self.setup = setup
        self._predictor = predictor
        self._channels = dict(setup.channels())
        self._models: Dict[Tuple[Spinor, str], PointerModel] = {}

    def model(self, chi_in: Spinor, label: str) -> PointerModel:
        key = (chi_in, label)
        if key not in self._models:
            self._models[key] = self._predictor(self.setup, chi_in, self._channels[label])
        return self._models[key]

    def channel_probabilities(self, chi_in: Spinor) -> List[Tuple[str, float]]:
        return [(label, self.model(chi_in, label).probability) for label in self._channels]


def particle_rng(seed: int, run_index: int, index: int) -> np.random.Generator:
    """Counter-based stream: one generator per (run, particle)."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed,
                                                        spawn_key=(run_index, index)))


def sample_pointer(chi_in: Spinor, setup: MeasurementSetup, rng: np.random.Generator,
                   library: Optional[PointerLibrary] = None, index: int = 0) -> TrialRecord:
    """Pick a channel with its post-selection probability, then draw one pointer value."""
    library = library or PointerLibrary(setup)
    probabilities = library.channel_probabilities(chi_in)
    total = sum(p for _, p in probabilities)
    u = rng.uniform() * total
    chosen = probabilities[-1][0]
    running = 0.0
    for label, p in probabilities:
        running += p
        if u < running:
            chosen = label
            break

    if chosen not in setup.kept_labels():
        return TrialRecord(index=index, postselected=False, label=chosen)
    sample = float(library.model(chi_in, chosen).draw(rng, 1)[0])
    return TrialRecord(index=index, postselected=True, label=chosen, sample=sample,
                       outcome=1 if sample >= 0 else -1)


def strong_strategy(source: Source, max_particles: int = DEFAULT_MAX_PARTICLES,
                    alpha: float = DEFAULT_ALPHA, seed: int = 0, run_index: int = 0,
                    setup: Optional[MeasurementSetup] = None,
                    library: Optional[PointerLibrary] = None) -> Decision:
    """
    Strong sigma_x readout. Bob expects +1 on even and -1 on odd particles
    under xi; after k matches the chance of zeta producing them is 2^-k.
    """
    setup = setup or strong_setup()
    library = library or PointerLibrary(setup)
    trials: List[TrialRecord] = []
    k = 0
    for index in range(max_particles):
        record = sample_pointer(source.state(index), setup,
                                particle_rng(seed, run_index, index), library, index)
        trials.append(record)
        expected = 1 if index % 2 == 0 else -1
        if record.outcome != expected:
            return Decision(Verdict.ZETA, index + 1, 0.0, alpha, Strategy.STRONG,
                            source.kind, trials=tuple(trials))
        k += 1
        if 2.0 ** -k < alpha:
            return Decision(Verdict.XI, index + 1, 2.0 ** -k, alpha, Strategy.STRONG,
                            source.kind, trials=tuple(trials))
    return Decision(Verdict.UNDECIDED, len(trials), 2.0 ** -k, alpha, Strategy.STRONG,
                    source.kind, trials=tuple(trials))


def hypothesis_pvalue(trials: Sequence[TrialRecord], kind: SourceKind,
                      library: PointerLibrary) -> float:
    """
    Bonferroni-adjusted p-value of the registered trials under one source:
    per parity, a binomial test on the chi_f channel count and a KS test of
    each kept channel's samples against the predicted CDF.
    """
    setup = library.setup
    f_label = setup.channels()[0][0]
    hypothesis = Source(kind)
    pvalues = []
    for parity in (0, 1):
        records = [t for t in trials if t.index % 2 == parity]
        if not records:
            continue
        chi_in = hypothesis.state(parity)
        if setup.postselect is not None:
            expected = min(max(library.model(chi_in, f_label).probability, 0.0), 1.0)
            hits = sum(1 for t in records if t.label == f_label)
            pvalues.append(stats.binomtest(hits, len(records), expected).pvalue)
        for label in setup.kept_labels():
            samples = [t.sample for t in records if t.postselected and t.label == label]
            if not samples:
                continue
            model = library.model(chi_in, label)
            if model.is_empty:
                pvalues.append(0.0)
                continue
            pvalues.append(stats.kstest(samples, model.cdf).pvalue)
    if not pvalues:
        return 1.0
    return min(1.0, len(pvalues) * min(pvalues))


def _sequential(strategy: Strategy, source: Source, setup: MeasurementSetup,
                data: PointerLibrary, predictions: Dict[SourceKind, PointerLibrary],
                max_particles: int, alpha: float, batch_size: int,
                seed: int, run_index: int) -> Decision:
    degenerate = alpha >= 1.0
    if degenerate:
        logger.warning("alpha=%g rejects every hypothesis; the decision is meaningless", alpha)

    trials: List[TrialRecord] = []
    statistic = 1.0
    for index in range(max_particles):
        trials.append(sample_pointer(source.state(index), setup,
                                     particle_rng(seed, run_index, index), data, index))
        if (index + 1) % batch_size:
            continue

        pvalues = {kind: hypothesis_pvalue(trials, kind, predictions[kind])
                   for kind in SourceKind}
        logger.debug("batch ending at %d: p(Xi)=%.3g p(Zeta)=%.3g", index + 1,
                     pvalues[SourceKind.XI], pvalues[SourceKind.ZETA])
        statistic = min(pvalues.values())

        if degenerate:
            best = max(pvalues, key=pvalues.get)
            return Decision(Verdict(best.value), index + 1, pvalues[best], alpha,
                            strategy, source.kind, degenerate=True, trials=tuple(trials))

        rejected = [kind for kind, p in pvalues.items() if p < alpha]
        if len(rejected) == 1:
            loser = rejected[0]
            winner = SourceKind.ZETA if loser is SourceKind.XI else SourceKind.XI
            logger.info("%s: %s after %d particles", strategy.value, winner.value, index + 1)
            return Decision(Verdict(winner.value), index + 1, pvalues[loser], alpha,
                            strategy, source.kind, trials=tuple(trials))

    return Decision(Verdict.UNDECIDED, len(trials), statistic, alpha, strategy,
                    source.kind, degenerate=degenerate, trials=tuple(trials))


def exact_weak_strategy(source: Source, setup: Optional[MeasurementSetup] = None,
                        max_particles: int = DEFAULT_MAX_PARTICLES,
                        alpha: float = DEFAULT_ALPHA, seed: int = 0, run_index: int = 0,
                        batch_size: int = DEFAULT_BATCH_SIZE,
                        library: Optional[PointerLibrary] = None) -> Decision:
    """Weak readout with odd/even registration, tested against exact pointer densities."""
    setup = setup or weak_setup()
    library = library or PointerLibrary(setup, exact_model)
    predictions = {kind: library for kind in SourceKind}
    return _sequential(Strategy.EXACT_WEAK, source, setup, library, predictions,
                       max_particles, alpha, batch_size, seed, run_index)


def standard_weak_strategy(source: Source, setup: Optional[MeasurementSetup] = None,
                           max_particles: int = DEFAULT_MAX_PARTICLES,
                           alpha: float = DEFAULT_ALPHA, seed: int = 0, run_index: int = 0,
                           batch_size: int = DEFAULT_BATCH_SIZE,
                           library: Optional[PointerLibrary] = None,
                           aav_library: Optional[PointerLibrary] = None) -> Decision:
    """Same data as the exact strategy, tested against AAV Gaussians instead."""
    setup = setup or weak_setup()
    library = library or PointerLibrary(setup, exact_model)
    aav_library = aav_library or PointerLibrary(setup, aav_model)
    predictions = {kind: aav_library for kind in SourceKind}
    return _sequential(Strategy.STANDARD_WEAK, source, setup, library, predictions,
                       max_particles, alpha, batch_size, seed, run_index)


def run_strategy(strategy: Strategy, source: Source, setup: Optional[MeasurementSetup] = None,
                 max_particles: int = DEFAULT_MAX_PARTICLES, alpha: float = DEFAULT_ALPHA,
                 seed: int = 0, run_index: int = 0,
                 batch_size: int = DEFAULT_BATCH_SIZE) -> Decision:
    if strategy is Strategy.STRONG:
        return strong_strategy(source, max_particles, alpha, seed, run_index, setup)
    if strategy is Strategy.EXACT_WEAK:
        return exact_weak_strategy(source, setup, max_particles, alpha, seed, run_index,
                                   batch_size)
    return standard_weak_strategy(source, setup, max_particles, alpha, seed, run_index,
                                  batch_size)


def simulate_runs(strategy: Strategy, source: Source, n_runs: int,
                  setup: Optional[MeasurementSetup] = None,
                  max_particles: int = DEFAULT_MAX_PARTICLES,
                  alpha: float = DEFAULT_ALPHA, seed: int = 0,
                  batch_size: int = DEFAULT_BATCH_SIZE) -> List[Decision]:
    """Independent runs sharing one set of pointer models; run i uses stream run_index=i."""
    if strategy is Strategy.STRONG:
        setup = setup or strong_setup()
        library = PointerLibrary(setup)
        return [strong_strategy(source, max_particles, alpha, seed, i, setup, library)
                for i in range(n_runs)]

    setup = setup or weak_setup()
    library = PointerLibrary(setup, exact_model)
    if strategy is Strategy.EXACT_WEAK:
        return [exact_weak_strategy(source, setup, max_particles, alpha, seed, i,
                                    batch_size, library) for i in range(n_runs)]
    aav_library = PointerLibrary(setup, aav_model)
    return [standard_weak_strategy(source, setup, max_particles, alpha, seed, i,
                                   batch_size, library, aav_library) for i in range(n_runs)]
