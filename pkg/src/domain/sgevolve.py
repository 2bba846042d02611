"""
Exact Stern-Gerlach evolution of meter (x) spin states.

A BranchState is a list of branches, each a spin eigenstate of the last
applied stage carrying a complex weight and one ChirpedGaussian per spatial
axis. Passing through a stage splits every branch in that stage's eigenbasis
and kicks the packet along the stage axis; packets along the other axes are
left alone, since free motion there is marginalized.
"""

import logging
import math
from collections import OrderedDict
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ..config.settings import (BRANCH_PRUNE_ATOL, CM_TO_M,
                               GAUSS_PER_CM_TO_TESLA_PER_M, HBAR,
                               NEUTRON_MAGNETIC_MOMENT, NEUTRON_MASS,
                               STRONG_OVERLAP_THRESHOLD,
                               WEAK_OVERLAP_THRESHOLD)
from .errors import ConfigError, EmptyState, WrongStageCount
from .gaussian import ChirpedGaussian, Representation, WavepacketSum, inner_product
from .spin import DOWN_X, DOWN_Z, UP_X, UP_Z, SpinOperator, Spinor, sigma

logger = logging.getLogger(__name__)


class Axis(Enum):
    X = "x"
    Z = "z"

    @property
    def operator(self) -> SpinOperator:
        return sigma(self.value)

    def basis(self) -> Tuple[Tuple[int, Spinor], Tuple[int, Spinor]]:
        """(sign, eigenstate) for the +1 and -1 eigenvalues."""
        if self is Axis.X:
            return (1, UP_X), (-1, DOWN_X)
        return (1, UP_Z), (-1, DOWN_Z)

    @classmethod
    def parse(cls, value: str) -> "Axis":
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ConfigError(f"unknown stage axis {value!r} (expected 'x' or 'z')",
                              field="axis")


class Regime(Enum):
    STRONG = "Strong"
    SEMIWEAK = "Semiweak"
    WEAK = "Weak"


@dataclass(frozen=True)
class Particle:
    mass: float
    magnetic_moment: float
    hbar: float = HBAR
    name: str = "custom"

    def __post_init__(self):
        for label in ("mass", "magnetic_moment", "hbar"):
            value = getattr(self, label)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"particle {label} must be positive, got {value}")

    @classmethod
    def neutron(cls) -> "Particle":
        return cls(mass=NEUTRON_MASS, magnetic_moment=NEUTRON_MAGNETIC_MOMENT,
                   hbar=HBAR, name="neutron")


PARTICLE_PRESETS = {"neutron": Particle.neutron}


@dataclass(frozen=True)
class SGStage:
    """One Stern-Gerlach magnet. gradient in T/m, transit_time in s."""
    axis: Axis
    gradient: float
    transit_time: float
    field_length: float = 0.0  # metadata only

    def __post_init__(self):
        if not math.isfinite(self.gradient):
            raise ValueError(f"stage gradient must be finite, got {self.gradient}")
        if not (self.transit_time >= 0 and math.isfinite(self.transit_time)):
            raise ValueError(f"transit time must be >= 0, got {self.transit_time}")

    @classmethod
    def from_cgs(cls, axis: Axis, gradient_gauss_per_cm: float, transit_time: float,
                 field_length_cm: float = 0.0) -> "SGStage":
        return cls(axis=axis,
                   gradient=gradient_gauss_per_cm * GAUSS_PER_CM_TO_TESLA_PER_M,
                   transit_time=transit_time,
                   field_length=field_length_cm * CM_TO_M)

    @property
    def gradient_gauss_per_cm(self) -> float:
        return self.gradient / GAUSS_PER_CM_TO_TESLA_PER_M


class Kick(NamedTuple):
    momentum_kick: float
    center_shift: float
    const_phase: float


@dataclass(frozen=True)
class Branch:
    labels: Tuple[str, ...]
    weight: complex
    spin: Spinor
    packets: Dict[Axis, ChirpedGaussian] = field(default_factory=dict)

    def packet_key(self) -> Tuple[ChirpedGaussian, ...]:
        return tuple(self.packets[a] for a in sorted(self.packets, key=lambda a: a.value))


@dataclass(frozen=True)
class BranchState:
    branches: Tuple[Branch, ...]
    stages_applied: int = 0

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple(self.branches))

    def overlap(self, i: int, j: int) -> complex:
        """<branch i|branch j> including spin and every spatial axis."""
        bi, bj = self.branches[i], self.branches[j]
        value = bi.weight.conjugate() * bj.weight * bi.spin.inner(bj.spin)
        if value == 0:
            return 0j
        for axis, packet in bi.packets.items():
            value *= inner_product(packet, bj.packets[axis])
        return value

    def squared_norm(self) -> float:
        n = len(self.branches)
        total = sum(self.overlap(i, j) for i in range(n) for j in range(n))
        return float(complex(total).real)

    @property
    def labels(self) -> List[Tuple[str, ...]]:
        return [b.labels for b in self.branches]


def initial_state(chi_in: Spinor, delta: float,
                  axes: Sequence[Axis] = (Axis.X, Axis.Z)) -> BranchState:
    """psi0 (x) chi_in, one branch per sigma_z component of chi_in."""
    if not delta > 0:
        raise ValueError(f"initial width must be positive, got {delta}")
    packets = {axis: ChirpedGaussian(delta=delta) for axis in axes}
    branches = []
    for amplitude, spin in ((chi_in.up, UP_Z), (chi_in.down, DOWN_Z)):
        if abs(amplitude) > BRANCH_PRUNE_ATOL:
            branches.append(Branch(labels=(), weight=amplitude, spin=spin,
                                   packets=dict(packets)))
    return BranchState(branches=tuple(branches), stages_applied=0)


def derived_kick(stage: SGStage, p: Particle) -> Kick:
    """p' = mu b tau, shift = p' tau / (2m), Delta = p'^2 tau / (6 m hbar)."""
    p_prime = p.magnetic_moment * stage.gradient * stage.transit_time
    shift = p_prime * stage.transit_time / (2.0 * p.mass)
    phase = p_prime ** 2 * stage.transit_time / (6.0 * p.mass * p.hbar)
    return Kick(p_prime, shift, phase)


def evolve(state: BranchState, stage: SGStage, p: Particle) -> BranchState:
    kick = derived_kick(stage, p)
    merged: "OrderedDict[tuple, Branch]" = OrderedDict()
    for branch in state.branches:
        if stage.axis not in branch.packets:
            raise ValueError(f"branch has no packet along the {stage.axis.value} axis")
        for sign, eigenstate in stage.axis.basis():
            amplitude = branch.weight * eigenstate.inner(branch.spin)
            if abs(amplitude) <= BRANCH_PRUNE_ATOL:
                continue
            packets = dict(branch.packets)
            packets[stage.axis] = packets[stage.axis].shifted(
                center_shift=sign * kick.center_shift,
                carrier_shift=sign * kick.momentum_kick / p.hbar,
                phase_shift=-kick.const_phase)
            label = f"{'+' if sign > 0 else '-'}{stage.axis.value}"
            candidate = Branch(labels=branch.labels + (label,), weight=amplitude,
                               spin=eigenstate, packets=packets)
            key = (candidate.labels, candidate.packet_key())
            if key in merged:
                previous = merged[key]
                merged[key] = Branch(labels=previous.labels,
                                     weight=previous.weight + amplitude,
                                     spin=previous.spin, packets=previous.packets)
            else:
                merged[key] = candidate

    survivors = tuple(b for b in merged.values() if abs(b.weight) > BRANCH_PRUNE_ATOL)
    return BranchState(branches=survivors, stages_applied=state.stages_applied + 1)


def run_stages(chi_in: Spinor, delta: float, stages: Iterable[SGStage],
               p: Particle) -> BranchState:
    state = initial_state(chi_in, delta)
    for stage in stages:
        state = evolve(state, stage, p)
    return state


def overlap_I(stage: SGStage, p: Particle, delta: float) -> float:
    """Closed-form |<psi_+|psi_->| after one stage."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    mu_b = p.magnetic_moment * stage.gradient
    tau = stage.transit_time
    exponent = (mu_b ** 2 * tau ** 4 / (8.0 * p.mass ** 2 * delta ** 2)
                + 2.0 * mu_b ** 2 * tau ** 2 * delta ** 2 / p.hbar ** 2)
    return math.exp(-exponent)


def classify_regime(I: float) -> Regime:
    if I < STRONG_OVERLAP_THRESHOLD:
        return Regime.STRONG
    if I > WEAK_OVERLAP_THRESHOLD:
        return Regime.WEAK
    return Regime.SEMIWEAK


def reduced_density_matrix(state: BranchState) -> np.ndarray:
    """
    Spin density matrix after a single stage, in that stage's eigenbasis
    ordered (+, -): [[alpha^2, alpha beta I], [alpha beta I*, beta^2]].
    """
    if state.stages_applied != 1:
        raise WrongStageCount(1, state.stages_applied)
    if not state.branches:
        raise EmptyState("no branches to trace over")
    order = {"+": 0, "-": 1}
    rho = np.zeros((2, 2), dtype=complex)
    n = len(state.branches)
    for i in range(n):
        for j in range(n):
            bi, bj = state.branches[i], state.branches[j]
            spatial = 1.0 + 0j
            for axis, packet in bi.packets.items():
                spatial *= inner_product(bj.packets[axis], packet)
            row = order[bi.labels[-1][0]]
            col = order[bj.labels[-1][0]]
            rho[row, col] += bi.weight * bj.weight.conjugate() * spatial
    return rho


def post_select(state: BranchState, chi_f: Spinor,
                axis_of_interest: Axis = Axis.X) -> Tuple[WavepacketSum, float]:
    """
    Project onto chi_f and trace out every axis except axis_of_interest.

    Returns the unnormalized pointer along that axis and the post-selection
    probability (its squared norm). When the discarded-axis packets differ
    between surviving branches the pointer is mixed and carries their overlaps
    as a coherence matrix.
    """
    if state.stages_applied < 1:
        raise WrongStageCount(1, state.stages_applied)
    if not state.branches:
        raise EmptyState("no branches to post-select")

    kept: List[Branch] = []
    amplitudes: List[complex] = []
    for branch in state.branches:
        amplitude = branch.weight * chi_f.inner(branch.spin)
        if abs(amplitude) > BRANCH_PRUNE_ATOL:
            kept.append(branch)
            amplitudes.append(amplitude)

    if not kept:
        return WavepacketSum(terms=(), representation=Representation.POSITION), 0.0

    terms = tuple(b.packets[axis_of_interest].scaled(a) for b, a in zip(kept, amplitudes))
    n = len(kept)
    coherence = np.ones((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            for axis, packet in kept[i].packets.items():
                if axis is not axis_of_interest:
                    coherence[i, j] *= inner_product(packet, kept[j].packets[axis])
    pure = np.allclose(coherence, 1.0, atol=1e-12, rtol=0.0)
    pointer = WavepacketSum(terms=terms, representation=Representation.POSITION,
                            coherence=None if pure else coherence)
    probability = pointer.squared_norm()
    logger.debug("post-selection kept %d of %d branches, probability %.6g",
                 n, len(state.branches), probability)
    return pointer, probability
