"""
Unit tests - environment configuration and structured logging
"""

import json
import logging

import pytest
from pydantic import ValidationError

from jcm_entanglement.config.settings import SimSettings
from jcm_entanglement.exceptions import TruncationError
from jcm_entanglement.utils.logger import get_logger


class TestSimSettings:
    """Test defaults and JCM_ environment overrides"""

    def test_defaults(self, monkeypatch):
        for name in ("JCM_N_MAX", "JCM_OMEGA", "JCM_STEPS"):
            monkeypatch.delenv(name, raising=False)
        settings = SimSettings(_env_file=None)
        assert settings.n_max == 80
        assert settings.pad_factor == 2
        assert settings.omega == 10.0
        assert settings.t_max == 10.0
        assert settings.steps == 2000
        assert settings.esd_threshold == 1e-6

    def test_environment_override(self, monkeypatch):
        monkeypatch.setenv("JCM_N_MAX", "120")
        monkeypatch.setenv("JCM_LOG_LEVEL", "DEBUG")
        settings = SimSettings(_env_file=None)
        assert settings.n_max == 120
        assert settings.log_level == "DEBUG"

    def test_invalid_pad_factor(self, monkeypatch):
        monkeypatch.setenv("JCM_PAD_FACTOR", "1")
        with pytest.raises(ValidationError):
            SimSettings(_env_file=None)


class TestSimLogger:
    """Test structured JSON log entries"""

    @pytest.fixture
    def sim_logger(self):
        return get_logger("jcm_entanglement.test", log_level="DEBUG")

    def _payload(self, record: logging.LogRecord) -> dict:
        return json.loads(record.getMessage().split(": ", 1)[1])

    def test_run_event(self, sim_logger, caplog):
        with caplog.at_level(logging.INFO, logger="jcm_entanglement.test"):
            sim_logger.log_run_event("scenario_started", {"name": "smoke"})
        payload = self._payload(caplog.records[-1])
        assert payload["event"] == "scenario_started"
        assert payload["details"] == {"name": "smoke"}

    def test_truncation_is_a_warning(self, sim_logger, caplog):
        with caplog.at_level(logging.INFO, logger="jcm_entanglement.test"):
            sim_logger.log_truncation("field:main", 100, 3e-9, "escalated")
        record = caplog.records[-1]
        assert record.levelno == logging.WARNING
        assert self._payload(record)["n_max"] == 100

    def test_error_carries_type(self, sim_logger, caplog):
        with caplog.at_level(logging.INFO, logger="jcm_entanglement.test"):
            sim_logger.log_error(TruncationError("ceiling reached"), {"exit_status": 3})
        payload = self._payload(caplog.records[-1])
        assert payload["error_type"] == "TruncationError"
        assert payload["context"]["exit_status"] == 3

    def test_log_file(self, tmp_path):
        log_file = tmp_path / "logs" / "run.log"
        sim_logger = get_logger("jcm_entanglement.file_test", log_file=str(log_file))
        sim_logger.log_run_event("scenario_finished", {"name": "hello"})
        for handler in sim_logger.logger.handlers:
            handler.flush()
        assert "scenario_finished" in log_file.read_text(encoding="utf-8")
