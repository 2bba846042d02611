import math

import numpy as np
import pytest

from src.domain.errors import EmptyDistribution, GridMismatch, InvalidRange
from src.domain.gaussian import (ChirpedGaussian, Distribution, Representation,
                                 UniformGrid, WavepacketSum, default_grid,
                                 density_on_grid)
from src.domain.sgevolve import (Axis, SGStage, evolve, initial_state, overlap_I,
                                 post_select)
from src.domain.spin import UP_Z, bloch_state
from src.services.analysis import (Peak, PeakSet, compare, find_peaks,
                                   mean_momentum, orthogonal_limit_density,
                                   scan_left_peak)


@pytest.fixture
def grid():
    return UniformGrid.spanning(-10.0, 10.0, 2001)


def two_bumps(grid, left=-3.0, right=3.0, ratio=0.5):
    W = WavepacketSum(terms=(ChirpedGaussian(amp=1.0, x0=left, delta=0.5),
                             ChirpedGaussian(amp=math.sqrt(ratio), x0=right, delta=0.5)),
                      representation=Representation.MOMENTUM)
    return density_on_grid(W, grid)


def test_find_peaks_locates_both_bumps(grid):
    peaks = find_peaks(two_bumps(grid, left=-3.0037, right=2.9981))
    assert len(peaks) == 2
    assert peaks.locations == pytest.approx([-3.0037, 2.9981], abs=1e-4)
    assert peaks.highest().location == pytest.approx(-3.0037, abs=1e-4)
    assert peaks.peaks[1].prominence == pytest.approx(0.5, rel=1e-3)


def test_find_peaks_threshold_drops_small_bumps(grid):
    D = two_bumps(grid, ratio=1e-4)
    assert len(find_peaks(D)) == 1
    assert len(find_peaks(D, prominence_threshold=1e-5)) == 2


def test_find_peaks_validation(grid):
    with pytest.raises(ValueError):
        find_peaks(two_bumps(grid), prominence_threshold=1.5)
    with pytest.raises(EmptyDistribution):
        find_peaks(Distribution(values=np.zeros(grid.count), grid=grid))


def test_peak_set_rescaling():
    peaks = PeakSet((Peak(-2.0, 1.0, 1.0), Peak(4.0, 0.5, 0.5)))
    assert peaks.rescaled(2.0).locations == [-1.0, 2.0]
    assert peaks.rescaled(-2.0).locations == [-2.0, 1.0]
    assert PeakSet().highest() is None


def test_orthogonal_limit_density():
    delta = 0.8
    D = orthogonal_limit_density(delta, hbar=1.0)
    assert D.integral() == pytest.approx(1.0, abs=1e-6)
    peaks = find_peaks(D)
    expected = 1.0 / (math.sqrt(2) * delta)
    assert peaks.locations == pytest.approx([-expected, expected], rel=1e-4)
    with pytest.raises(ValueError):
        orthogonal_limit_density(0.0)


def test_compare_identical_distributions(grid):
    D = two_bumps(grid)
    report = compare(D, D)
    assert report.l1 == pytest.approx(0.0, abs=1e-12)
    assert report.ks == pytest.approx(0.0, abs=1e-12)
    assert report.peak_shift == pytest.approx(0.0)


def test_compare_normalizes_before_measuring(grid):
    D = two_bumps(grid)
    scaled = Distribution(values=3.0 * D.values, grid=grid)
    assert compare(D, scaled).l1 == pytest.approx(0.0, abs=1e-12)


def test_compare_shifted_gaussians(grid):
    left = density_on_grid(WavepacketSum(terms=(ChirpedGaussian(x0=-0.5),)), grid)
    right = density_on_grid(WavepacketSum(terms=(ChirpedGaussian(x0=0.5),)), grid)
    report = compare(left, right)
    # unit-width normal densities one sigma apart
    assert report.ks == pytest.approx(2 * 0.19146, abs=1e-3)
    assert report.peak_shift == pytest.approx(-1.0, abs=1e-4)


def test_compare_requires_same_grid(grid):
    other = UniformGrid.spanning(-10.0, 10.0, 2000)
    with pytest.raises(GridMismatch):
        compare(two_bumps(grid), two_bumps(other))


def test_mean_momentum(grid):
    D = density_on_grid(WavepacketSum(terms=(ChirpedGaussian(x0=1.25, delta=0.7),)), grid)
    assert mean_momentum(D) == pytest.approx(1.25, abs=1e-9)


def test_scan_recovers_the_semiweak_left_peak():
    result = scan_left_peak(math.radians(171.0), -14.2, kappas=[0.0459], rhos=[1.0])
    assert result.overlap == pytest.approx(0.604, abs=1e-3)
    assert result.left_peak == pytest.approx(-14.2, abs=0.5)
    # the weak value is tan(85.5 deg) ~ 12.7; the semiweak peak is far from it
    assert abs(abs(result.left_peak) - math.tan(math.radians(85.5))) / \
        math.tan(math.radians(85.5)) > 0.05


def test_scan_rejects_bad_windows():
    with pytest.raises(InvalidRange):
        scan_left_peak(1.0, 0.0, overlap_window=(0.9, 0.3))
    with pytest.raises(InvalidRange):
        scan_left_peak(1.0, 0.0, kappas=[], rhos=[1.0])
    with pytest.raises(InvalidRange):
        scan_left_peak(1.0, 0.0, kappas=[0.01], rhos=[0.01], overlap_window=(0.1, 0.2))


def symmetric_density(rng, grid):
    c, width, amp = rng.uniform(0.5, 4.0), rng.uniform(0.3, 1.2), rng.uniform(0.2, 1.0)
    terms = [ChirpedGaussian(amp=amp, x0=-c, delta=width),
             ChirpedGaussian(amp=amp, x0=c, delta=width)]
    if rng.uniform() < 0.5:
        terms.append(ChirpedGaussian(amp=rng.uniform(-1.0, 1.0), delta=rng.uniform(0.3, 1.2)))
    coherence = np.eye(len(terms)) if rng.uniform() < 0.5 else None
    W = WavepacketSum(terms=tuple(terms), coherence=coherence,
                      representation=Representation.MOMENTUM)
    return density_on_grid(W, grid)


def test_find_peaks_is_mirror_symmetric(rng):
    grid = UniformGrid.spanning(-12.0, 12.0, 2401)
    for _ in range(25):
        peaks = find_peaks(symmetric_density(rng, grid))
        assert len(peaks) >= 1
        mirrored = [-x for x in reversed(peaks.locations)]
        assert peaks.locations == pytest.approx(mirrored, abs=1e-6)
        heights = [p.height for p in peaks.peaks]
        assert heights == pytest.approx(heights[::-1], rel=1e-9)


def kick_dominated_peaks(particle, overlap, grid_points=1024):
    # delta = 1 and tau = 0.02: p' = kappa and the branch shift is kappa / 100
    kappa = math.sqrt(-math.log(overlap) / (2.0 + 0.5e-4))
    stage = SGStage(axis=Axis.X, gradient=kappa / 0.02, transit_time=0.02)
    assert overlap_I(stage, particle, 1.0) == pytest.approx(overlap, rel=1e-9)
    state = evolve(initial_state(bloch_state(math.radians(171.0)), 1.0, axes=(Axis.X,)),
                   stage, particle)
    pointer, _ = post_select(state, UP_Z, Axis.X)
    momentum = pointer.to_momentum(hbar=particle.hbar)
    D = density_on_grid(momentum, default_grid(momentum, grid_points))
    return find_peaks(D), D.grid.step, kappa


def test_peaks_split_continuously_as_the_overlap_falls(unit_particle):
    overlaps = np.exp(-np.geomspace(-math.log(0.999), -math.log(0.001), 300))
    sweep = [kick_dominated_peaks(unit_particle, I) for I in overlaps]
    counts = [len(peaks) for peaks, _, _ in sweep]
    split = counts.index(2)
    assert split > 0
    assert set(counts[:split]) == {1}
    assert set(counts[split:]) == {2}
    for (before, step_a, _), (after, step_b, _) in zip(sweep, sweep[1:]):
        limit = 5 * max(step_a, step_b)
        if len(before) == len(after):
            assert np.all(np.abs(np.subtract(after.locations, before.locations)) <= limit)
        else:
            # the existing peak carries on next to the newborn one
            assert min(abs(x - before.locations[0]) for x in after.locations) <= limit
    final, _, kappa = sweep[-1]
    assert final.rescaled(kappa).locations == pytest.approx([-1.0, 1.0], abs=0.01)
