"""
JCM Entanglement Configuration Module
"""

from .settings import SimSettings, config

__all__ = ["SimSettings", "config"]
