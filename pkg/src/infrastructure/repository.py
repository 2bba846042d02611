import csv
import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence

from ..domain.gaussian import Distribution
from ..services.analysis import PeakSet
from ..services.discriminate import Decision, TrialRecord
from ..services.pipeline import SweepRow
from .records import (RunMetadata, decision_to_dict, distribution_to_dict,
                      peak_set_to_dict, sweep_row_to_dict)

DISTRIBUTION_HEADER = ["coordinate", "density"]
PEAK_HEADER = ["location", "location_rescaled", "height", "prominence"]
SWEEP_HEADER = ["variable", "value", "I", "regime", "prob", "peaks",
                "weak_value_re", "weak_value_im", "eta", "l1", "ks"]
TRIAL_HEADER = ["index", "parity", "postselected", "label", "sample"]

FORMATS = ("csv", "json")


def _cell(value: Any) -> str:
    return "" if value is None else repr(value) if isinstance(value, float) else str(value)


class ResultRepository:
    def __init__(self, out_dir: str = "results"):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)

    def _write_json(self, name: str, data: Any) -> Path:
        path = self.out_dir / f"{name}.json"
        with open(path, 'w') as f:
            json.dump(data, f, indent=2)
        return path

    def _write_csv(self, name: str, header: Sequence[str],
                   rows: Iterable[Sequence[Any]]) -> Path:
        path = self.out_dir / f"{name}.csv"
        with open(path, 'w', newline='') as f:
            writer = csv.writer(f)
            writer.writerow(header)
            for row in rows:
                writer.writerow([_cell(v) for v in row])
        return path

    def save_distribution(self, D: Distribution, name: str, fmt: str = "csv") -> Path:
        """Save a sampled density as coordinate,density rows or a JSON record"""
        if fmt == "json":
            return self._write_json(name, distribution_to_dict(D))
        return self._write_csv(name, DISTRIBUTION_HEADER,
                               zip(D.coordinates.tolist(), D.values.tolist()))

    def save_peaks(self, peaks: PeakSet, name: str, unit: float = 1.0,
                   fmt: str = "csv") -> Path:
        if fmt == "json":
            return self._write_json(name, peak_set_to_dict(peaks, unit))
        scale = unit if unit else 1.0
        return self._write_csv(name, PEAK_HEADER,
                               ([p.location, p.location / scale, p.height, p.prominence]
                                for p in peaks.peaks))

    def save_record(self, record: Dict[str, Any], name: str) -> Path:
        return self._write_json(name, record)

    def save_metadata(self, metadata: RunMetadata, name: str = "metadata") -> Path:
        return self._write_json(name, metadata.to_dict())

    def save_sweep(self, rows: List[SweepRow], name: str = "sweep", fmt: str = "csv") -> Path:
        """Save sweep rows in sweep order"""
        if fmt == "json":
            return self._write_json(name, {'record_type': 'sweep',
                                           'rows': [sweep_row_to_dict(r) for r in rows]})
        table = []
        for r in rows:
            table.append([r.variable, r.value, r.overlap, r.regime.value, r.postselect_prob,
                          ";".join(repr(p) for p in r.peaks),
                          r.weak_value.real if r.weak_value is not None else None,
                          r.weak_value.imag if r.weak_value is not None else None,
                          r.eta, r.l1, r.ks])
        return self._write_csv(name, SWEEP_HEADER, table)

    def save_decision(self, decision: Decision, name: str = "decision") -> Path:
        return self._write_json(name, decision_to_dict(decision))

    def save_trials(self, trials: Sequence[TrialRecord], name: str = "trials") -> Path:
        return self._write_csv(name, TRIAL_HEADER,
                               ([t.index, t.parity, t.postselected, t.label, t.sample]
                                for t in trials))
