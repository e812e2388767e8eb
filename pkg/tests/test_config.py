"""Tests for Settings (pydantic-settings) and the JSON run-config."""

import json
from pathlib import Path

import pytest
from pydantic import ValidationError

from memfactor.config import RunConfig, Settings, load_config, validate_config
from memfactor.validation import ConfigError


@pytest.fixture
def clean_env(monkeypatch):
    for name in ("MFN_THREADS", "MFN_LOG_LEVEL", "MFN_LOG_FILE"):
        monkeypatch.delenv(name, raising=False)
    return monkeypatch


class TestSettings:
    """Tests for the pydantic-settings Settings class."""

    def test_defaults(self, clean_env):
        """Nothing set gives one thread and WARN logging."""
        settings = Settings()

        assert settings.threads == 1
        assert settings.log_level == "WARN"
        assert settings.log_file is None

    def test_loads_from_environment(self, clean_env, tmp_path: Path):
        clean_env.setenv("MFN_THREADS", "8")
        clean_env.setenv("MFN_LOG_LEVEL", "DEBUG")
        clean_env.setenv("MFN_LOG_FILE", str(tmp_path / "run.log"))

        settings = Settings()

        assert settings.threads == 8
        assert settings.log_level == "DEBUG"
        assert settings.log_file == tmp_path / "run.log"

    @pytest.mark.parametrize("value", ["0", "many"], ids=["zero", "non-numeric"])
    def test_bad_threads_raises(self, clean_env, value: str):
        clean_env.setenv("MFN_THREADS", value)

        with pytest.raises(ValidationError):
            Settings()

    def test_from_env_exits(self, clean_env):
        """from_env() turns a bad environment into a clean exit."""
        clean_env.setenv("MFN_THREADS", "-2")

        with pytest.raises(SystemExit):
            Settings.from_env()


class TestRunConfig:
    """Tests for RunConfig defaults and cross-field checks."""

    def test_defaults(self):
        cfg = RunConfig()

        assert cfg.task == "inpaint"
        assert cfg.trainer == "table"
        assert cfg.schedule.mode == "serial"
        assert cfg.schedule.max_iterations is None
        assert cfg.factor.alpha is None
        assert cfg.image.channels == "rgb"
        assert cfg.spectrogram.n_bins == 400
        assert cfg.output_dir == Path("out")

    @pytest.mark.parametrize("task", ["music_gap", "music_denoise"])
    def test_pca_for_music(self, task: str):
        assert RunConfig(task=task, trainer="pca").trainer == "pca"

    def test_pca_rejected_for_images(self):
        with pytest.raises(ValidationError, match="spectrogram"):
            RunConfig(task="inpaint", trainer="pca")


class TestLoadConfig:
    """Tests for load_config() / validate_config()."""

    def test_loads_nested_values(self, tmp_path: Path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"task": "noise", "schedule": {"mode": "simultaneous", "fraction": 0.2}}))

        cfg = load_config(path)

        assert cfg.task == "noise"
        assert cfg.schedule.mode == "simultaneous"
        assert cfg.schedule.fraction == 0.2
        assert cfg.schedule.rollback is True

    @pytest.mark.parametrize(
        ("raw", "key"),
        [
            ({"bogus": 1}, "bogus"),
            ({"schedule": {"fraction": 0.0}}, "schedule.fraction"),
            ({"factor": {"lam": 1.0, "extra": 2}}, "factor.extra"),
            ({"task": "paint"}, "task"),
            ({"image": {"channels": "cmyk"}}, "image.channels"),
        ],
        ids=["unknown-top", "fraction-zero", "unknown-nested", "bad-task", "bad-channels"],
    )
    def test_error_names_key(self, raw: dict, key: str):
        with pytest.raises(ConfigError, match=f"invalid key '{key}'"):
            validate_config(raw)

    def test_not_json(self, tmp_path: Path):
        path = tmp_path / "run.json"
        path.write_text("{task: inpaint")

        with pytest.raises(ConfigError, match="not valid JSON"):
            load_config(path)

    def test_cross_field_error_reports_root(self):
        with pytest.raises(ConfigError, match="pca"):
            validate_config({"task": "colorize", "trainer": "pca"})
