"""
JCM Entanglement Configuration Management
"""

from typing import Optional, Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class SimSettings(BaseSettings):
    """Simulator configuration (environment prefix ``JCM_``)"""

    # Logging Configuration
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = Field(
        default="INFO",
        description="Logging level"
    )
    log_file: Optional[str] = Field(
        default=None,
        description="Log file path (if not specified, logs to console)"
    )

    # Output
    output_dir: str = Field(
        default="runs",
        description="Default output directory when --out is not given"
    )

    # Truncation
    n_max: int = Field(
        default=80,
        ge=1,
        description="Retained Fock levels"
    )
    pad_factor: int = Field(
        default=2,
        ge=2,
        le=8,
        description="Workspace enlargement used when building D and S"
    )
    tail_tol: float = Field(
        default=1e-8,
        gt=0.0,
        lt=1.0,
        description="Probability mass allowed outside the retained block"
    )
    escalation_step: int = Field(
        default=20,
        ge=1,
        description="n_max increment while the tail criterion fails"
    )
    n_max_ceiling: int = Field(
        default=400,
        ge=1,
        description="Largest n_max reached by auto-escalation"
    )

    # Model
    omega: float = Field(
        default=10.0,
        description="Atomic transition frequency in units of lambda"
    )

    # Time grid (lambda*t units)
    t_max: float = Field(
        default=10.0,
        gt=0.0,
        description="End of the time grid"
    )
    steps: int = Field(
        default=2000,
        ge=1,
        description="Number of grid intervals (samples = steps + 1)"
    )

    # Measures
    esd_threshold: float = Field(
        default=1e-6,
        gt=0.0,
        description="Entanglement below this value counts as dead"
    )
    esd_min_samples: int = Field(
        default=2,
        ge=1,
        description="Shortest run of dead samples reported as an interval"
    )
    wigner_extent: float = Field(
        default=6.0,
        gt=0.0,
        description="Half-width of the default Wigner grid"
    )
    wigner_points: int = Field(
        default=101,
        ge=3,
        le=1001,
        description="Points per axis of the default Wigner grid"
    )

    # Numerical tolerances
    hermitian_tol: float = Field(
        default=1e-10,
        gt=0.0,
        description="Allowed |H - H^dagger| entry for generators"
    )
    positivity_tol: float = Field(
        default=1e-8,
        gt=0.0,
        description="Allowed negative eigenvalue of a density matrix"
    )
    invariant_stride: int = Field(
        default=1,
        ge=1,
        description="Sample stride of the eigenvalue positivity check"
    )
    full_state_stride: int = Field(
        default=10,
        ge=1,
        description="Sample stride at which the runner rebuilds the full state for invariant checks"
    )

    # Performance Configuration
    threads: int = Field(
        default=1,
        ge=1,
        le=64,
        description="Worker threads across sweep points"
    )

    model_config = SettingsConfigDict(
        env_prefix="JCM_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )


# Global configuration instance
config = SimSettings()
