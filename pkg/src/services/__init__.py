"""
Service layer - runs built from the domain model.

- Exact/AAV pipeline and parameter sweeps
- Peak finding and distribution comparison
- Sequential xi/zeta discrimination
"""

from .analysis import (ComparisonReport, Peak, PeakSet, compare, find_peaks,
                       orthogonal_limit_density, scan_left_peak)
from .discriminate import (Decision, MeasurementSetup, Source, SourceKind,
                           Strategy, Verdict, run_strategy, simulate_runs)
from .pipeline import RunResult, SweepRow, run, sweep

__all__ = [
    "ComparisonReport",
    "Peak",
    "PeakSet",
    "compare",
    "find_peaks",
    "orthogonal_limit_density",
    "scan_left_peak",
    "Decision",
    "MeasurementSetup",
    "Source",
    "SourceKind",
    "Strategy",
    "Verdict",
    "run_strategy",
    "simulate_runs",
    "RunResult",
    "SweepRow",
    "run",
    "sweep",
]
