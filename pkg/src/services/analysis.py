"""
Pointer-distribution analysis: semiweak peaks, limiting densities and
exact-vs-AAV comparison metrics.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import signal
from scipy.integrate import cumulative_trapezoid, trapezoid

from ..config.settings import DEFAULT_GRID_POINTS, HBAR, PEAK_PROMINENCE_THRESHOLD
from ..domain.errors import EmptyDistribution, GridMismatch, InvalidRange
from ..domain.gaussian import (Distribution, Representation, UniformGrid,
                               default_grid, density_on_grid)
from ..domain.sgevolve import Axis, Particle, SGStage, evolve, initial_state, post_select
from ..domain.spin import UP_Z, bloch_state

logger = logging.getLogger(__name__)


class Peak(NamedTuple):
    location: float
    height: float
    prominence: float   # height relative to the global maximum


@dataclass(frozen=True)
class PeakSet:
    peaks: Tuple[Peak, ...] = ()

    @property
    def locations(self) -> List[float]:
        return [p.location for p in self.peaks]

    def __len__(self) -> int:
        return len(self.peaks)

    def rescaled(self, unit: float) -> "PeakSet":
        """Locations in units of `unit` (p/p' when unit is the momentum kick)."""
        peaks = tuple(Peak(p.location / unit, p.height * unit, p.prominence)
                      for p in self.peaks)
        if unit < 0:
            peaks = peaks[::-1]
        return PeakSet(peaks)

    def highest(self) -> Optional[Peak]:
        if not self.peaks:
            return None
        return max(self.peaks, key=lambda p: p.height)


@dataclass(frozen=True)
class ComparisonReport:
    l1: float
    linf: float
    ks: float
    peaks_exact: PeakSet
    peaks_approx: PeakSet
    peak_shift: Optional[float]   # highest exact peak minus highest approx peak


def _refine(values: np.ndarray, index: int) -> Tuple[float, float]:
    """Vertex of the parabola through values[index-1 .. index+1], as (offset, height)."""
    if index <= 0 or index >= values.size - 1:
        return 0.0, float(values[index])
    ym1, y0, yp1 = values[index - 1], values[index], values[index + 1]
    curvature = ym1 - 2.0 * y0 + yp1
    if curvature == 0:
        return 0.0, float(y0)
    offset = 0.5 * (ym1 - yp1) / curvature
    return float(offset), float(y0 - 0.25 * (ym1 - yp1) * offset)


def find_peaks(D: Distribution,
               prominence_threshold: float = PEAK_PROMINENCE_THRESHOLD) -> PeakSet:
    """Local maxima above threshold * global max, refined to sub-grid accuracy."""
    if not 0 < prominence_threshold < 1:
        raise ValueError(f"prominence threshold must lie in (0, 1), got {prominence_threshold}")
    values = D.values
    top = float(values.max()) if values.size else 0.0
    if top <= 0:
        raise EmptyDistribution("distribution has no positive values")

    indices, _ = signal.find_peaks(values, height=prominence_threshold * top)
    peaks = []
    for index in indices:
        offset, height = _refine(values, int(index))
        location = D.grid.start + (index + offset) * D.grid.step
        peaks.append(Peak(float(location), height, height / top))
    peaks.sort(key=lambda p: p.location)
    return PeakSet(tuple(peaks))


def orthogonal_limit_density(delta: float, grid: Optional[UniformGrid] = None,
                             hbar: float = HBAR) -> Distribution:
    """Normalized p^2 exp(-2 p^2 delta^2 / hbar^2); peaks at +-hbar/(sqrt(2) delta)."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    c = 2.0 * delta ** 2 / hbar ** 2
    if grid is None:
        half_span = 10.0 * hbar / (2.0 * delta)
        grid = UniformGrid.spanning(-half_span, half_span, DEFAULT_GRID_POINTS)
    p = grid.points
    values = 2.0 * c ** 1.5 / math.sqrt(math.pi) * p ** 2 * np.exp(-c * p ** 2)
    return Distribution(values=values, grid=grid, axis="x",
                        representation=Representation.MOMENTUM, label="orthogonal-limit")


def _positive_normalized(D: Distribution) -> Distribution:
    if D.integral() <= 0:
        raise EmptyDistribution(f"distribution '{D.label}' integrates to zero")
    return D.normalized()


def compare(exact: Distribution, approx: Distribution,
            prominence_threshold: float = PEAK_PROMINENCE_THRESHOLD) -> ComparisonReport:
    if not exact.grid.same_as(approx.grid):
        raise GridMismatch("distributions are sampled on different grids")
    f = _positive_normalized(exact)
    g = _positive_normalized(approx)
    diff = f.values - g.values
    step = f.grid.step
    l1 = float(trapezoid(np.abs(diff), dx=step))
    linf = float(np.max(np.abs(diff)))
    cdf_gap = cumulative_trapezoid(f.values, dx=step, initial=0.0) - \
        cumulative_trapezoid(g.values, dx=step, initial=0.0)
    ks = float(np.max(np.abs(cdf_gap)))

    peaks_exact = find_peaks(f, prominence_threshold)
    peaks_approx = find_peaks(g, prominence_threshold)
    top_exact, top_approx = peaks_exact.highest(), peaks_approx.highest()
    shift = None
    if top_exact is not None and top_approx is not None:
        shift = top_exact.location - top_approx.location
    return ComparisonReport(l1=l1, linf=linf, ks=ks, peaks_exact=peaks_exact,
                            peaks_approx=peaks_approx, peak_shift=shift)


def mean_momentum(D: Distribution) -> float:
    """First moment of the normalized density, in whichever representation D uses."""
    total = D.integral()
    if not total > 0:
        raise EmptyDistribution(f"distribution '{D.label}' integrates to zero")
    return float(trapezoid(D.coordinates * D.values, dx=D.grid.step) / total)


@dataclass(frozen=True)
class ScanResult:
    kappa: float        # p' delta / hbar
    rho: float          # branch shift over delta
    overlap: float
    left_peak: float    # in units of p'
    peaks: PeakSet = field(default_factory=PeakSet)


def _dimensionless_pointer_peaks(theta: float, kappa: float, rho: float,
                                 grid_points: int) -> PeakSet:
    # hbar = m = mu = delta = 1: tau = 2 rho / kappa gives p' = kappa and shift = rho
    unit = Particle(mass=1.0, magnetic_moment=1.0, hbar=1.0, name="dimensionless")
    tau = 2.0 * rho / kappa
    stage = SGStage(axis=Axis.X, gradient=kappa / tau, transit_time=tau)
    state = evolve(initial_state(bloch_state(theta), 1.0, axes=(Axis.X,)), stage, unit)
    pointer, _ = post_select(state, UP_Z, Axis.X)
    momentum = pointer.to_momentum(hbar=1.0)
    distribution = density_on_grid(momentum, default_grid(momentum, grid_points))
    return find_peaks(distribution).rescaled(kappa)


def scan_left_peak(theta: float, target: float,
                   kappas: Optional[Sequence[float]] = None,
                   rhos: Optional[Sequence[float]] = None,
                   overlap_window: Tuple[float, float] = (0.3, 0.9),
                   grid_points: int = DEFAULT_GRID_POINTS) -> ScanResult:
    """
    Search the (kappa, rho) plane for the configuration whose leftmost exact
    peak (in units of p') lands closest to `target`, keeping the overlap I
    inside `overlap_window`.
    """
    kappas = np.geomspace(0.01, 0.5, 25) if kappas is None else np.asarray(kappas, float)
    rhos = np.linspace(0.1, 3.0, 30) if rhos is None else np.asarray(rhos, float)
    lo, hi = overlap_window
    if not 0 <= lo < hi <= 1:
        raise InvalidRange(f"overlap window {overlap_window} is not inside [0, 1]")
    if kappas.size == 0 or rhos.size == 0:
        raise InvalidRange("scan needs at least one kappa and one rho")

    best: Optional[ScanResult] = None
    for kappa in kappas:
        for rho in rhos:
            if not (kappa > 0 and rho > 0):
                raise InvalidRange("kappa and rho must be positive")
            overlap = math.exp(-2.0 * kappa ** 2 - rho ** 2 / 2.0)
            if not lo < overlap < hi:
                continue
            peaks = _dimensionless_pointer_peaks(theta, float(kappa), float(rho), grid_points)
            if not peaks.peaks:
                continue
            candidate = ScanResult(float(kappa), float(rho), overlap,
                                   peaks.locations[0], peaks)
            if best is None or abs(candidate.left_peak - target) < abs(best.left_peak - target):
                best = candidate

    if best is None:
        raise InvalidRange("no scanned configuration has an overlap inside the window")
    logger.info("scan: kappa=%.4g rho=%.4g I=%.3f left peak %.3f (target %.3f)",
                best.kappa, best.rho, best.overlap, best.left_peak, target)
    return best
