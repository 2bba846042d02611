"""
Closed-form algebra for complex Gaussian wavepackets.

A ChirpedGaussian is

    amp * (2 pi delta^2)^(-1/4) * exp[-(x - x0)^2 / (4 delta^2) + i (k0 x + phi0)]

with no quadratic phase: packet spreading is neglected, so every meter state
in the toolkit stays inside this family under Stern-Gerlach evolution and
Fourier transformation.
"""

import cmath
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import trapezoid

from ..config.settings import (DEFAULT_GRID_POINTS, GRID_SPAN_WIDTHS,
                               GRID_UNIFORMITY_RTOL, HBAR, MIN_GRID_POINTS)
from .errors import EmptyGrid, NonUniformGrid

ArrayLike = Union[float, Sequence[float], np.ndarray]


class Representation(Enum):
    POSITION = "position"
    MOMENTUM = "momentum"


@dataclass(frozen=True)
class ChirpedGaussian:
    amp: complex = 1.0
    x0: float = 0.0
    delta: float = 1.0
    k0: float = 0.0
    phi0: float = 0.0

    def __post_init__(self):
        if not (self.delta > 0 and math.isfinite(self.delta)):
            raise ValueError(f"Gaussian width must be positive, got {self.delta}")

    def scaled(self, factor: complex) -> "ChirpedGaussian":
        return replace(self, amp=complex(self.amp) * factor)

    def shifted(self, center_shift: float = 0.0, carrier_shift: float = 0.0,
                phase_shift: float = 0.0) -> "ChirpedGaussian":
        return replace(self, x0=self.x0 + center_shift,
                       k0=self.k0 + carrier_shift,
                       phi0=self.phi0 + phase_shift)


def _prefactor(delta: float) -> float:
    return (2.0 * math.pi * delta * delta) ** -0.25


def evaluate(G: ChirpedGaussian, x: ArrayLike):
    """Value of G at x (scalar or array)."""
    xs = np.asarray(x, dtype=float)
    exponent = -(xs - G.x0) ** 2 / (4.0 * G.delta ** 2) + 1j * (G.k0 * xs + G.phi0)
    values = complex(G.amp) * _prefactor(G.delta) * np.exp(exponent)
    if values.ndim == 0:
        return complex(values)
    return values


def fourier(G: ChirpedGaussian, hbar: float = HBAR) -> ChirpedGaussian:
    """
    Unitary transform to momentum space,
    phi(p) = (2 pi hbar)^(-1/2) * integral psi(x) exp(-i p x / hbar) dx.

    Center hbar*k0, width hbar/(2 delta), carrier -x0/hbar; the constant
    phase picks up k0*x0 so that a packet at the origin with no carrier maps
    to a real positive momentum Gaussian.
    """
    return ChirpedGaussian(
        amp=G.amp,
        x0=hbar * G.k0,
        delta=hbar / (2.0 * G.delta),
        k0=-G.x0 / hbar,
        phi0=G.phi0 + G.k0 * G.x0,
    )


def inverse_fourier(G: ChirpedGaussian, hbar: float = HBAR) -> ChirpedGaussian:
    """Inverse of fourier: momentum-space Gaussian back to position space."""
    return ChirpedGaussian(
        amp=G.amp,
        x0=-hbar * G.k0,
        delta=hbar / (2.0 * G.delta),
        k0=G.x0 / hbar,
        phi0=G.phi0 + G.x0 * G.k0,
    )


def inner_product(G1: ChirpedGaussian, G2: ChirpedGaussian) -> complex:
    """<G1|G2> = integral conj(G1(x)) G2(x) dx, in closed form."""
    a1 = 1.0 / (4.0 * G1.delta ** 2)
    a2 = 1.0 / (4.0 * G2.delta ** 2)
    a = a1 + a2
    b = 2.0 * (a1 * G1.x0 + a2 * G2.x0) + 1j * (G2.k0 - G1.k0)
    c = a1 * G1.x0 ** 2 + a2 * G2.x0 ** 2
    gaussian_integral = math.sqrt(math.pi / a) * cmath.exp(b * b / (4.0 * a) - c)
    return (complex(G1.amp).conjugate() * complex(G2.amp)
            * _prefactor(G1.delta) * _prefactor(G2.delta)
            * cmath.exp(1j * (G2.phi0 - G1.phi0)) * gaussian_integral)


@dataclass(frozen=True, eq=False)
class WavepacketSum:
    """
    Superposition of Gaussian terms in one representation.

    `coherence` is an optional Hermitian matrix K with K_ii = 1 holding the
    overlaps of marginalized degrees of freedom; None means a pure state.
    """
    terms: Tuple[ChirpedGaussian, ...]
    representation: Representation = Representation.POSITION
    coherence: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if self.coherence is not None:
            K = np.asarray(self.coherence, dtype=complex)
            n = len(self.terms)
            if K.shape != (n, n):
                raise ValueError(f"coherence must be {n}x{n}, got {K.shape}")
            object.__setattr__(self, "coherence", K)

    @property
    def is_pure(self) -> bool:
        return self.coherence is None

    def _coherence_matrix(self) -> np.ndarray:
        if self.coherence is None:
            return np.ones((len(self.terms), len(self.terms)), dtype=complex)
        return self.coherence

    def gram_matrix(self) -> np.ndarray:
        n = len(self.terms)
        gram = np.empty((n, n), dtype=complex)
        for i, gi in enumerate(self.terms):
            for j, gj in enumerate(self.terms):
                gram[i, j] = inner_product(gi, gj)
        return gram

    def squared_norm(self) -> float:
        if not self.terms:
            return 0.0
        total = np.sum(self._coherence_matrix() * self.gram_matrix())
        return max(float(total.real), 0.0)

    def term_values(self, x: ArrayLike) -> np.ndarray:
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        if not self.terms:
            return np.zeros((0, xs.size), dtype=complex)
        return np.vstack([evaluate(g, xs) for g in self.terms])

    def evaluate(self, x: ArrayLike) -> np.ndarray:
        """Amplitude sum; only meaningful for pure superpositions."""
        if not self.is_pure:
            raise ValueError("a mixed pointer state has no single wavefunction")
        return self.term_values(x).sum(axis=0)

    def density(self, x: ArrayLike) -> np.ndarray:
        values = self.term_values(x)
        if values.shape[0] == 0:
            return np.zeros(values.shape[1])
        if self.is_pure:
            return np.abs(values.sum(axis=0)) ** 2
        K = self._coherence_matrix()
        dens = np.einsum("ip,ij,jp->p", values.conj(), K, values)
        return np.clip(dens.real, 0.0, None)

    def scaled(self, factor: complex) -> "WavepacketSum":
        return replace(self, terms=tuple(g.scaled(factor) for g in self.terms))

    def to_momentum(self, hbar: float = HBAR) -> "WavepacketSum":
        if self.representation is Representation.MOMENTUM:
            return self
        return replace(self, terms=tuple(fourier(g, hbar) for g in self.terms),
                       representation=Representation.MOMENTUM)

    def to_position(self, hbar: float = HBAR) -> "WavepacketSum":
        if self.representation is Representation.POSITION:
            return self
        return replace(self, terms=tuple(inverse_fourier(g, hbar) for g in self.terms),
                       representation=Representation.POSITION)

    def in_representation(self, representation: Representation,
                          hbar: float = HBAR) -> "WavepacketSum":
        if representation is Representation.MOMENTUM:
            return self.to_momentum(hbar)
        return self.to_position(hbar)


@dataclass(frozen=True)
class UniformGrid:
    start: float
    step: float
    count: int

    def __post_init__(self):
        if self.count < MIN_GRID_POINTS:
            raise EmptyGrid(f"grid needs at least {MIN_GRID_POINTS} points, got {self.count}")
        if not self.step > 0:
            raise NonUniformGrid(f"grid step must be positive, got {self.step}")

    @property
    def points(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.count)

    @property
    def stop(self) -> float:
        return self.start + self.step * (self.count - 1)

    @classmethod
    def from_points(cls, points: Iterable[float]) -> "UniformGrid":
        xs = np.asarray(list(points), dtype=float)
        if xs.size < MIN_GRID_POINTS:
            raise EmptyGrid(f"grid needs at least {MIN_GRID_POINTS} points, got {xs.size}")
        steps = np.diff(xs)
        if np.any(steps <= 0):
            raise NonUniformGrid("grid points must be strictly increasing")
        step = (xs[-1] - xs[0]) / (xs.size - 1)
        if not np.allclose(steps, step, rtol=GRID_UNIFORMITY_RTOL, atol=0.0):
            raise NonUniformGrid("grid spacing is not uniform")
        return cls(start=float(xs[0]), step=float(step), count=int(xs.size))

    @classmethod
    def spanning(cls, lo: float, hi: float, count: int = DEFAULT_GRID_POINTS) -> "UniformGrid":
        if count < MIN_GRID_POINTS:
            raise EmptyGrid(f"grid needs at least {MIN_GRID_POINTS} points, got {count}")
        if not hi > lo:
            raise NonUniformGrid(f"grid upper bound {hi} must exceed lower bound {lo}")
        return cls(start=float(lo), step=(hi - lo) / (count - 1), count=int(count))

    def same_as(self, other: "UniformGrid") -> bool:
        return (self.count == other.count
                and math.isclose(self.start, other.start, rel_tol=1e-12, abs_tol=1e-300)
                and math.isclose(self.step, other.step, rel_tol=1e-12))


def default_grid(W: WavepacketSum, count: int = DEFAULT_GRID_POINTS,
                 span_widths: float = GRID_SPAN_WIDTHS) -> UniformGrid:
    """[min center - span*max width, max center + span*max width]."""
    if not W.terms:
        raise EmptyGrid("cannot size a grid for an empty superposition")
    centers = [g.x0 for g in W.terms]
    width = max(g.delta for g in W.terms)
    return UniformGrid.spanning(min(centers) - span_widths * width,
                                max(centers) + span_widths * width, count)


@dataclass(frozen=True, eq=False)
class Distribution:
    """Sampled 1-D density on a uniform grid."""
    values: np.ndarray
    grid: UniformGrid
    axis: str = "x"
    representation: Representation = Representation.MOMENTUM
    norm: float = 1.0
    label: str = ""

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.count,):
            raise ValueError(f"expected {self.grid.count} samples, got {vals.shape}")
        object.__setattr__(self, "values", vals)

    @property
    def coordinates(self) -> np.ndarray:
        return self.grid.points

    def integral(self) -> float:
        return float(trapezoid(self.values, dx=self.grid.step))

    def normalized(self) -> "Distribution":
        total = self.integral()
        if total <= 0:
            return self
        return replace(self, values=self.values / total)

    def rescaled(self, unit: float) -> "Distribution":
        """Same density expressed against coordinate/unit."""
        grid = UniformGrid(self.grid.start / unit, self.grid.step / unit, self.grid.count)
        return replace(self, values=self.values * unit, grid=grid)


def density_on_grid(W: WavepacketSum, grid, axis: str = "x",
                    label: str = "") -> Distribution:
    """Pointwise |sum amp_i G_i(x)|^2 on a uniform grid."""
    if not isinstance(grid, UniformGrid):
        grid = UniformGrid.from_points(grid)
    return Distribution(values=W.density(grid.points), grid=grid, axis=axis,
                        representation=W.representation,
                        norm=W.squared_norm(), label=label)
