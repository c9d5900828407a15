import json

import pytest
import structlog
from pydantic import ValidationError

from minksym.config import GeometrySettings, Settings, get_settings
from minksym.log import configure_logging


def test_defaults():
    settings = Settings()
    assert settings.geometry.grid_m == 720
    assert settings.geometry.raster_size == 1024
    assert settings.experiment.c2 == 0.2
    assert settings.experiment.phase2_max_steps == 600


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("MINKSYM_GRID_M", "360")
    monkeypatch.setenv("MINKSYM_OUTPUT_DIR", "/tmp/minksym-out")
    monkeypatch.setenv("LOG_LEVEL", "DEBUG")
    settings = Settings()
    assert settings.geometry.grid_m == 360
    assert str(settings.output_dir) == "/tmp/minksym-out"
    assert settings.log_level == "DEBUG"


def test_oracle_size_cap():
    with pytest.raises(ValidationError):
        GeometrySettings(MINKSYM_ORACLE_G=200)


def test_cloud_size():
    settings = Settings()
    assert settings.cloud_size(2) == 720
    assert settings.cloud_size(3) == 2048
    assert settings.cloud_size(5) == 5 * 4096


def test_cached():
    assert get_settings() is get_settings()


def test_json_logs_go_to_stderr(capsys):
    configure_logging(Settings(LOG_LEVEL="INFO", LOG_FORMAT="json"))
    structlog.get_logger("minksym.test").info("hello", value=3)
    captured = capsys.readouterr()
    assert captured.out == ""
    event = json.loads(captured.err.strip().splitlines()[-1])
    assert event["event"] == "hello"
    assert event["value"] == 3
    assert event["level"] == "info"


def test_level_filters(capsys):
    configure_logging(Settings(LOG_LEVEL="WARNING"))
    structlog.get_logger("minksym.test").info("hidden")
    assert capsys.readouterr().err == ""


def test_unknown_level_falls_back_to_info(capsys):
    configure_logging(Settings(LOG_LEVEL="chatty"))
    structlog.get_logger("minksym.test").info("shown")
    assert "shown" in capsys.readouterr().err


def test_settings_fields():
    assert set(Settings.model_fields) == {"log_level", "log_format", "output_dir", "geometry", "experiment"}
    assert set(GeometrySettings.model_fields) == {
        "grid_m",
        "raster_size",
        "oracle_size",
        "cloud_size_3d",
        "cloud_size_per_dim",
    }
