import json
from pathlib import Path

import numpy as np
import pytest

from src.config.presets import get_preset
from src.domain.aav import aav_distribution
from src.domain.gaussian import Distribution, Representation, UniformGrid
from src.domain.sgevolve import Regime
from src.services.analysis import Peak, PeakSet, compare
from src.services.discriminate import (Decision, SourceKind, Strategy,
                                       TrialRecord, Verdict)
from src.services.pipeline import SweepRow
from src.infrastructure.records import (RunMetadata, aav_to_dict,
                                        comparison_to_dict, decision_from_dict,
                                        decision_to_dict, distribution_from_dict,
                                        distribution_to_dict, peak_set_to_dict,
                                        sweep_row_to_dict)

SCHEMAS = Path(__file__).resolve().parents[2] / "schemas"

JSON_TYPES = {
    "object": lambda v: isinstance(v, dict),
    "array": lambda v: isinstance(v, list),
    "string": lambda v: isinstance(v, str),
    "boolean": lambda v: isinstance(v, bool),
    "null": lambda v: v is None,
    "integer": lambda v: isinstance(v, int) and not isinstance(v, bool),
    "number": lambda v: isinstance(v, (int, float)) and not isinstance(v, bool),
}


def load_schema(schema_name):
    return json.loads((SCHEMAS / f"{schema_name}.schema.json").read_text())


def violations(value, schema, path="$"):
    """Schema keywords the value breaks, as 'path: reason' strings."""
    if "$ref" in schema:
        return violations(value, load_schema(schema["$ref"].split(".schema.json")[0]), path)
    errors = []
    if "const" in schema and value != schema["const"]:
        errors.append(f"{path}: expected {schema['const']!r}")
    if "enum" in schema and value not in schema["enum"]:
        errors.append(f"{path}: {value!r} not in {schema['enum']}")
    if "type" in schema:
        allowed = schema["type"] if isinstance(schema["type"], list) else [schema["type"]]
        if not any(JSON_TYPES[t](value) for t in allowed):
            errors.append(f"{path}: {value!r} is not {' or '.join(allowed)}")
            return errors
    if isinstance(value, dict):
        for key in schema.get("required", []):
            if key not in value:
                errors.append(f"{path}: missing {key!r}")
        for key, sub in schema.get("properties", {}).items():
            if key in value:
                errors.extend(violations(value[key], sub, f"{path}.{key}"))
    if isinstance(value, list) and "items" in schema:
        for i, item in enumerate(value):
            errors.extend(violations(item, schema["items"], f"{path}[{i}]"))
    return errors


def assert_conforms(record, schema_name):
    errors = violations(record, load_schema(schema_name))
    assert not errors, f"{schema_name} record: {errors}"
    assert json.loads(json.dumps(record)) == record


@pytest.fixture
def distribution():
    grid = UniformGrid.spanning(-1.0, 1.0, 5)
    return Distribution(values=np.array([0.0, 0.5, 1.0, 0.5, 0.0]), grid=grid,
                        representation=Representation.POSITION, label="exact")


@pytest.fixture
def decision():
    trials = (TrialRecord(0, True, "f", 0.25, 1), TrialRecord(1, False, "f_perp"))
    return Decision(Verdict.ZETA, 2, 0.004, 0.01, Strategy.EXACT_WEAK, SourceKind.ZETA,
                    trials=trials)


def test_distribution_record(distribution):
    data = distribution_to_dict(distribution)
    assert_conforms(data, "distribution")
    assert set(data) == {"record_type", "label", "norm", "axis", "representation",
                         "grid_start", "grid_step", "values"}
    assert data["grid_start"] == -1.0
    assert data["grid_step"] == pytest.approx(0.5)
    restored = distribution_from_dict(data)
    assert restored.grid.same_as(distribution.grid)
    assert restored.grid.count == 5
    assert np.array_equal(restored.values, distribution.values)
    assert restored.representation is Representation.POSITION
    assert restored.label == "exact"


@pytest.mark.parametrize("key,bad", [
    ("values", "oops"),
    ("values", [0.1, "x"]),
    ("representation", "fourier"),
    ("record_type", "peak_set"),
    ("grid_step", None),
    ("label", 3),
])
def test_schema_rejects_malformed_distribution(distribution, key, bad):
    data = distribution_to_dict(distribution)
    data[key] = bad
    assert violations(data, load_schema("distribution"))


def test_schema_rejects_missing_key(distribution):
    data = distribution_to_dict(distribution)
    del data["grid_start"]
    assert violations(data, load_schema("distribution")) == ["$: missing 'grid_start'"]


def test_schema_checks_nested_records(decision):
    data = decision_to_dict(decision, include_trials=True)
    data["trials"][0]["parity"] = "both"
    data["particles_used"] = 2.5
    errors = violations(data, load_schema("decision"))
    assert len(errors) == 2
    assert any(e.startswith("$.trials[0].parity") for e in errors)
    prediction = aav_to_dict(aav_distribution(1.0, 0.01, 1.0,
                                              UniformGrid.spanning(-1.0, 1.0, 11), hbar=1.0))
    prediction["distribution"]["values"] = "oops"
    assert violations(prediction, load_schema("aav_prediction"))


def test_peak_set_record():
    peaks = PeakSet((Peak(-2.0, 1.0, 0.9), Peak(2.0, 0.5, 0.4)))
    data = peak_set_to_dict(peaks, unit=2.0)
    assert_conforms(data, "peak_set")
    assert data["unit"] == 2.0
    assert [p["location"] for p in data["peaks"]] == [-2.0, 2.0]
    assert data["peaks"][1] == {"location": 2.0, "height": 0.5, "prominence": 0.4}


def test_aav_record():
    prediction = aav_distribution(1.0, 0.01, 1.0, UniformGrid.spanning(-1.0, 1.0, 101),
                                  hbar=1.0)
    data = aav_to_dict(prediction)
    assert_conforms(data, "aav_prediction")
    assert_conforms(data["distribution"], "distribution")
    assert data["valid"] is True


def test_comparison_record(distribution):
    report = compare(distribution, distribution)
    data = comparison_to_dict(report, 0.5, 0.02, 3 + 0.5j, p_prime=2.0)
    assert_conforms(data, "comparison_report")
    assert data["weak_value"] == {"re": 3.0, "im": 0.5}
    assert data["peaks_exact"] == pytest.approx([0.0])


def test_comparison_record_without_prediction():
    data = comparison_to_dict(None, 0.99, None, None, p_prime=0.0)
    assert_conforms(data, "comparison_report")
    assert data["l1"] is None and data["peaks_aav"] == []
    assert data["weak_value"] == {"re": None, "im": None}


def test_decision_record(decision):
    data = decision_to_dict(decision, include_trials=True)
    assert_conforms(data, "decision")
    assert data["verdict"] == "Zeta"
    assert data["trials"][1]["parity"] == "odd"
    assert decision_from_dict(data) == decision
    assert "trials" not in decision_to_dict(decision)


def test_sweep_row_record():
    row = SweepRow("delta", 0.5, 0.98, Regime.SEMIWEAK, 0.5, [-1.0, 1.0], 2 + 0j,
                   0.2, 0.01, 0.05)
    data = sweep_row_to_dict(row)
    assert_conforms({"record_type": "sweep", "rows": [data]}, "sweep")
    assert data["regime"] == "Semiweak"


def test_run_metadata_record():
    metadata = RunMetadata(command="distribution", config=get_preset("fig3"),
                           derived={"I": 0.604})
    data = metadata.to_dict()
    assert_conforms(data, "run_metadata")
    restored = RunMetadata.from_dict(data)
    assert restored.config == get_preset("fig3")
    assert restored.derived == {"I": 0.604}
