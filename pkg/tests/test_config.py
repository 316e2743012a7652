"""Tests for settings and run-config loading."""

import json

import pytest
import yaml
from pydantic import ValidationError

from bregman_rates.config import (
    DEFAULT_TOLERANCE,
    ConfigManager,
    ExperimentConfig,
    RunConfigFile,
    Settings,
)
from bregman_rates.models import PConvexRegime
from bregman_rates.regularisers import Huber
from bregman_rates.sources import DiagonalDecay


def test_experiment_defaults(experiment):
    config = ExperimentConfig.model_validate(experiment())
    assert isinstance(config.operator, DiagonalDecay)
    assert isinstance(config.regime, PConvexRegime)
    assert config.window == (1, 5)
    assert config.measures == ["bregman", "sym_bregman", "norm", "residual"]
    assert config.noise_model == "gaussian"
    assert config.solve_options.kkt_tolerance == 1e-9
    assert config.solve_options.metric == "diagonal"


def test_extra_key_rejected(experiment):
    with pytest.raises(ValidationError, match="colour"):
        ExperimentConfig.model_validate(experiment(colour="blue"))


def test_inadmissible_nu_rejected(experiment):
    with pytest.raises(ValidationError, match="inadmissible nu"):
        ExperimentConfig.model_validate(experiment(nu=0.8))
    with pytest.raises(ValidationError, match="inadmissible nu"):
        qco = {"kind": "qco", "q": 2.0}
        ExperimentConfig.model_validate(experiment(nu=0.3, regime=qco))


@pytest.mark.parametrize(
    "overrides",
    [
        {"delta_max": 1e-4, "delta_min": 1e-2},
        {"delta_count": 3},
        {"fit_window": [0, 2]},
        {"fit_window": [2, 9]},
        {"alpha_constant": 0.0},
        {"solver": "direct", "regulariser": {"kind": "huber"}},
        {"measures": ["norm", "norm"]},
        {"measures": ["l2"]},
        {"noise_model": "uniform"},
        {"solve_options": {"tolerance": 1.0}},
        {"solve_options": {"metric": "newton"}},
    ],
)
def test_invalid_experiments(experiment, overrides):
    with pytest.raises(ValidationError):
        ExperimentConfig.model_validate(experiment(**overrides))


def test_fit_window(experiment):
    config = ExperimentConfig.model_validate(experiment(fit_window=[0, 6]))
    assert config.window == (0, 6)


def test_run_config_tolerance(experiment):
    config = RunConfigFile.model_validate(experiment(tolerances={"norm": 0.05}))
    assert config.tolerance("norm") == 0.05
    assert config.tolerance("bregman") == DEFAULT_TOLERANCE
    assert config.csv_name == "results.csv"


def test_load_json_and_yaml(tmp_path, experiment):
    data = experiment(
        regulariser={"kind": "huber", "threshold": 2.0}, regime={"kind": "basic"}
    )
    (tmp_path / "run.json").write_text(json.dumps(data))
    (tmp_path / "run.yaml").write_text(yaml.safe_dump(data))

    manager = ConfigManager(Settings(config_dir=tmp_path))
    from_json = manager.load_run_config(tmp_path / "run.json")
    from_yaml = manager.load_run_config("run.yaml")
    assert from_json == from_yaml
    assert from_json.regulariser == Huber(threshold=2.0)
    assert manager.list_run_configs() == ["run.json", "run.yaml"]


def test_load_caches_until_reload(tmp_path, experiment):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(experiment()))
    manager = ConfigManager(Settings(config_dir=tmp_path))
    first = manager.load_run_config(path)
    assert manager.load_run_config(path) is first
    manager.reload_config()
    assert manager.load_run_config(path) is not first


def test_seed_override(tmp_path, experiment):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(experiment(seed=3)))
    manager = ConfigManager(Settings(config_dir=tmp_path, seed=99))
    assert manager.load_run_config(path).seed == 99


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("BREGMAN_RATES_SEED", "42")
    monkeypatch.setenv("BREGMAN_RATES_JOBS", "3")
    settings = Settings()
    assert settings.seed == 42
    assert settings.jobs == 3


def test_missing_file(tmp_path):
    manager = ConfigManager(Settings(config_dir=tmp_path))
    with pytest.raises(FileNotFoundError):
        manager.load_run_config(tmp_path / "absent.json")


def test_top_level_must_be_mapping(tmp_path):
    path = tmp_path / "list.yaml"
    path.write_text("- 1\n- 2\n")
    manager = ConfigManager(Settings(config_dir=tmp_path))
    with pytest.raises(ValueError, match="mapping"):
        manager.load_run_config(path)


def test_shipped_configs_validate(config_dir):
    manager = ConfigManager(Settings(config_dir=config_dir))
    names = manager.list_run_configs()
    assert "a1_quadratic_nu05.json" in names
    assert "tv_observational.yaml" in names
    for name in names:
        config = manager.load_run_config(name)
        assert config.delta_count >= 4
