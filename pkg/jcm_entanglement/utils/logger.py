"""
JCM Entanglement Logging Utilities
"""

import logging
import json
from datetime import datetime, timezone
from typing import Dict, Any, Optional
from pathlib import Path

from rich.logging import RichHandler
from rich.console import Console


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat()


class SimLogger:
    """Structured logging for simulation runs"""

    def __init__(self, name: str = "jcm_entanglement", log_file: Optional[str] = None, log_level: str = "INFO"):
        self.logger = logging.getLogger(name)
        self.logger.setLevel(getattr(logging, log_level.upper()))

        # Clear existing handlers
        self.logger.handlers.clear()

        # Setup console handler with Rich
        console = Console(stderr=True)
        console_handler = RichHandler(
            console=console,
            show_time=True,
            show_path=False,
            markup=False,
            rich_tracebacks=True
        )

        console_formatter = logging.Formatter(
            fmt="%(message)s",
            datefmt="[%X]"
        )
        console_handler.setFormatter(console_formatter)
        self.logger.addHandler(console_handler)

        # Setup file handler if specified
        if log_file:
            log_path = Path(log_file)
            log_path.parent.mkdir(parents=True, exist_ok=True)

            file_handler = logging.FileHandler(log_path, encoding='utf-8')
            file_formatter = logging.Formatter(
                '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
            )
            file_handler.setFormatter(file_formatter)
            self.logger.addHandler(file_handler)

    def log_run_event(self, event: str, details: Dict[str, Any] = None):
        """Log a scenario lifecycle event"""
        log_entry = {
            "timestamp": _timestamp(),
            "event_type": "run",
            "event": event,
            "details": details or {}
        }
        self.logger.info(f"🔧 RUN: {json.dumps(log_entry, ensure_ascii=False, default=str)}")

    def log_diagnostics(self, label: str, report: Dict[str, Any]):
        """Log invariant diagnostics of one propagated series"""
        log_entry = {
            "timestamp": _timestamp(),
            "event_type": "diagnostics",
            "series": label,
            "report": report
        }
        self.logger.info(f"📈 DIAGNOSTICS: {json.dumps(log_entry, ensure_ascii=False, default=str)}")

    def log_truncation(self, quantity: str, n_max: int, tail_mass: float, action: str):
        """Log truncation escalations and failures"""
        log_entry = {
            "timestamp": _timestamp(),
            "event_type": "truncation",
            "quantity": quantity,
            "n_max": n_max,
            "tail_mass": tail_mass,
            "action_taken": action
        }
        self.logger.warning(f"⚠️ TRUNCATION: {json.dumps(log_entry, ensure_ascii=False)}")

    def log_error(self, error: Exception, context: Dict[str, Any] = None):
        """Log error with context"""
        log_entry = {
            "timestamp": _timestamp(),
            "event_type": "error",
            "error_type": type(error).__name__,
            "error_message": str(error),
            "context": context or {}
        }
        self.logger.error(f"❌ ERROR: {json.dumps(log_entry, ensure_ascii=False, default=str)}")


def get_logger(name: str = "jcm_entanglement", log_file: Optional[str] = None, log_level: str = "INFO") -> SimLogger:
    """Get or create a logger instance"""
    return SimLogger(name, log_file=log_file, log_level=log_level)
