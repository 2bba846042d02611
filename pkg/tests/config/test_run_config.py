import json

import numpy as np
import pytest

from src.config.presets import get_preset
from src.config.run_config import (SweepSpec, load_run_config,
                                   run_config_from_dict, run_config_to_dict,
                                   save_run_config)
from src.domain.errors import ConfigError, InvalidRange
from src.domain.gaussian import Representation
from src.domain.sgevolve import Axis


def minimal(**changes):
    data = {
        "delta_cm": 0.02,
        "stages": [{"axis": "x", "gradient_gauss_per_cm": 100.0, "transit_time": 1.4e-6}],
        "preselect": {"theta_deg": 173.5},
        "postselect": {"up": [1, 0], "down": [0, 0]},
    }
    data.update(changes)
    return data


def test_minimal_config_fills_defaults():
    config = run_config_from_dict(minimal())
    assert config.name == "custom"
    assert config.particle.preset == "neutron"
    assert config.pointer_representation is Representation.MOMENTUM
    assert config.preselect == {"theta_deg": 173.5, "phi_deg": 0.0}
    assert config.delta == pytest.approx(2e-4)
    stage, = config.build_stages()
    assert stage.axis is Axis.X
    assert stage.gradient_gauss_per_cm == pytest.approx(100.0)


@pytest.mark.parametrize("changes,field", [
    ({"delta_cm": -1.0}, "delta_cm"),
    ({"delta_cm": "wide"}, "delta_cm"),
    ({"stages": []}, "stages"),
    ({"stages": [{"axis": "y", "gradient_gauss_per_cm": 1.0, "transit_time": 1.0}]},
     "stages[0].axis"),
    ({"stages": [{"axis": "x", "gradient_gauss_per_cm": 1.0, "transit_time": -1.0}]},
     "stages[0].transit_time"),
    ({"stages": [{"axis": "x", "transit_time": 1.0}]}, "stages[0].gradient_gauss_per_cm"),
    ({"postselect": {"phi_deg": 3.0}}, "postselect"),
    ({"representation": "energy"}, "representation"),
    ({"grid_points": 1}, "grid_points"),
    ({"seed": -3}, "seed"),
    ({"particle": {"preset": "muon"}}, "particle.preset"),
    ({"particle": {"mass": 1.0, "magnetic_moment": 0.0}}, "particle.magnetic_moment"),
])
def test_bad_fields_are_named(changes, field):
    with pytest.raises(ConfigError) as excinfo:
        run_config_from_dict(minimal(**changes))
    assert excinfo.value.field == field
    assert field in str(excinfo.value)


def test_missing_selection_is_reported():
    data = minimal()
    del data["preselect"]
    with pytest.raises(ConfigError, match="preselect"):
        run_config_from_dict(data)


def test_custom_particle():
    config = run_config_from_dict(minimal(particle={"mass": 2.0, "magnetic_moment": 3.0,
                                                    "hbar": 1.0}))
    particle = config.build_particle()
    assert (particle.mass, particle.magnetic_moment, particle.hbar) == (2.0, 3.0, 1.0)


def test_invalid_json_reports_line(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "delta_cm": 1.0,\n  "stages": [\n}\n')
    with pytest.raises(ConfigError) as excinfo:
        load_run_config(str(path))
    assert excinfo.value.line == 4


def test_unreadable_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_run_config(str(tmp_path / "absent.json"))


@pytest.mark.parametrize("name", ["fig2a", "fig3", "fig7"])
def test_presets_survive_a_save_and_load(tmp_path, name):
    config = get_preset(name)
    path = tmp_path / f"{name}.json"
    save_run_config(config, str(path))
    assert json.loads(path.read_text())["name"] == name
    assert load_run_config(str(path)) == config
    assert run_config_from_dict(run_config_to_dict(config)) == config


def test_overrides_skip_none():
    config = get_preset("fig2a").with_overrides(seed=7, grid_points=None, out_dir="out")
    assert config.seed == 7
    assert config.grid_points == get_preset("fig2a").grid_points
    assert config.out_dir == "out"


def test_sweep_values():
    assert SweepSpec("b", 1.0, 3.0, 3).values() == pytest.approx([1.0, 2.0, 3.0])
    assert SweepSpec("delta", 1e-3, 1.0, 4, log=True).values() == \
        pytest.approx([1e-3, 1e-2, 1e-1, 1.0])
    assert np.array_equal(SweepSpec("tau", 5.0, 9.0, 1).values(), [5.0])


@pytest.mark.parametrize("kwargs", [
    dict(variable="mass", start=0.0, stop=1.0, count=2),
    dict(variable="b", start=0.0, stop=1.0, count=0),
    dict(variable="b", start=0.0, stop=float("inf"), count=2),
    dict(variable="delta", start=0.0, stop=1.0, count=2, log=True),
])
def test_sweep_validation(kwargs):
    with pytest.raises(InvalidRange):
        SweepSpec(**kwargs)


def test_sweep_apply():
    base = get_preset("fig2a")
    assert SweepSpec("delta", 0.1, 1.0, 2).apply(base, 0.5).delta_cm == 0.5
    assert SweepSpec("theta", 0.0, 90.0, 2).apply(base, 45.0).preselect == \
        {"theta_deg": 45.0, "phi_deg": 0.0}
    moved = SweepSpec("b", 1.0, 2.0, 2).apply(base, 2.0)
    assert moved.stages[0].gradient_gauss_per_cm == 2.0
    assert moved.stages[0].transit_time == base.stages[0].transit_time
    assert SweepSpec("tau", 1.0, 2.0, 2).apply(base, 1.5).stages[0].transit_time == 1.5
