"""
JCM Entanglement Utilities Module
"""

from .logger import SimLogger, get_logger
from .validators import MatrixValidator, ValidationResult

__all__ = [
    "SimLogger",
    "get_logger",
    "MatrixValidator",
    "ValidationResult",
]
