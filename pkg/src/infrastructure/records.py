"""
JSON codecs for everything the toolkit writes to disk. Each record carries a
`record_type` tag matching a schema file under schemas/.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional

from ..config.run_config import RunConfig, run_config_from_dict, run_config_to_dict
from ..domain.aav import AAVPrediction
from ..domain.gaussian import Distribution, Representation, UniformGrid
from ..services.analysis import ComparisonReport, PeakSet
from ..services.discriminate import Decision, SourceKind, Strategy, TrialRecord, Verdict
from ..services.pipeline import SweepRow

SCHEMA_VERSION = "1.0"


class RecordType(Enum):
    DISTRIBUTION = "distribution"
    PEAK_SET = "peak_set"
    AAV_PREDICTION = "aav_prediction"
    COMPARISON = "comparison_report"
    DECISION = "decision"
    RUN_METADATA = "run_metadata"
    SWEEP = "sweep"


def _complex_parts(value: Optional[complex]) -> Dict[str, Optional[float]]:
    if value is None:
        return {"re": None, "im": None}
    return {"re": float(value.real), "im": float(value.imag)}


def distribution_to_dict(D: Distribution) -> Dict[str, Any]:
    return {
        'record_type': RecordType.DISTRIBUTION.value,
        'label': D.label,
        'axis': D.axis,
        'representation': D.representation.value,
        'norm': D.norm,
        'grid_start': D.grid.start,
        'grid_step': D.grid.step,
        'values': [float(v) for v in D.values],
    }


def distribution_from_dict(data: Dict[str, Any]) -> Distribution:
    # count is implied by the value list
    grid = UniformGrid(start=data['grid_start'], step=data['grid_step'],
                       count=len(data['values']))
    return Distribution(values=data['values'], grid=grid, axis=data.get('axis', 'x'),
                        representation=Representation(data['representation']),
                        norm=data.get('norm', 1.0), label=data.get('label', ''))


def peak_set_to_dict(peaks: PeakSet, unit: float = 1.0) -> Dict[str, Any]:
    return {
        'record_type': RecordType.PEAK_SET.value,
        'unit': unit,
        'peaks': [{'location': p.location, 'height': p.height, 'prominence': p.prominence}
                  for p in peaks.peaks],
    }


def aav_to_dict(prediction: AAVPrediction) -> Dict[str, Any]:
    return {
        'record_type': RecordType.AAV_PREDICTION.value,
        'weak_value_re': float(prediction.weak_value.real),
        'weak_value_im': float(prediction.weak_value.imag),
        'pointer_shift': prediction.pointer_shift,
        'position_shift': prediction.position_shift,
        'eta': prediction.eta,
        'valid': prediction.valid,
        'prob': prediction.postselect_prob,
        'distribution': distribution_to_dict(prediction.distribution),
    }


def comparison_to_dict(report: Optional[ComparisonReport], I: float,
                       eta: Optional[float], weak_value: Optional[complex],
                       p_prime: float) -> Dict[str, Any]:
    unit = p_prime if p_prime else 1.0
    return {
        'record_type': RecordType.COMPARISON.value,
        'I': I,
        'eta': eta,
        'weak_value': _complex_parts(weak_value),
        'peaks_exact': [p / unit for p in report.peaks_exact.locations] if report else [],
        'peaks_aav': [p / unit for p in report.peaks_approx.locations] if report else [],
        'l1': report.l1 if report else None,
        'linf': report.linf if report else None,
        'ks': report.ks if report else None,
    }


def sweep_row_to_dict(row: SweepRow) -> Dict[str, Any]:
    return {
        'variable': row.variable,
        'value': row.value,
        'I': row.overlap,
        'regime': row.regime.value,
        'prob': row.postselect_prob,
        'peaks': row.peaks,
        'weak_value': _complex_parts(row.weak_value),
        'eta': row.eta,
        'l1': row.l1,
        'ks': row.ks,
    }


def trial_to_dict(trial: TrialRecord) -> Dict[str, Any]:
    return {
        'index': trial.index,
        'parity': trial.parity,
        'postselected': trial.postselected,
        'label': trial.label,
        'sample': trial.sample,
        'outcome': trial.outcome,
    }


def decision_to_dict(decision: Decision, include_trials: bool = False) -> Dict[str, Any]:
    data = {
        'record_type': RecordType.DECISION.value,
        'verdict': decision.verdict.value,
        'particles_used': decision.particles_used,
        'statistic': decision.statistic,
        'alpha': decision.alpha,
        'strategy': decision.strategy.value,
        'source': decision.source.value,
        'degenerate': decision.degenerate,
    }
    if include_trials:
        data['trials'] = [trial_to_dict(t) for t in decision.trials]
    return data


def decision_from_dict(data: Dict[str, Any]) -> Decision:
    trials = tuple(TrialRecord(index=t['index'], postselected=t['postselected'],
                               label=t.get('label'), sample=t.get('sample'),
                               outcome=t.get('outcome'))
                   for t in data.get('trials', []))
    return Decision(verdict=Verdict(data['verdict']),
                    particles_used=data['particles_used'],
                    statistic=data['statistic'], alpha=data['alpha'],
                    strategy=Strategy(data['strategy']),
                    source=SourceKind(data['source']),
                    degenerate=data.get('degenerate', False), trials=trials)


@dataclass
class RunMetadata:
    command: str
    config: RunConfig
    derived: Dict[str, Any] = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION

    def to_dict(self) -> Dict[str, Any]:
        return {
            'record_type': RecordType.RUN_METADATA.value,
            'schema_version': self.schema_version,
            'command': self.command,
            'config': run_config_to_dict(self.config),
            'derived': self.derived,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RunMetadata':
        return cls(command=data['command'],
                   config=run_config_from_dict(data['config']),
                   derived=data.get('derived', {}),
                   schema_version=data.get('schema_version', SCHEMA_VERSION))
