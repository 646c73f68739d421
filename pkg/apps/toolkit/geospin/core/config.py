"""Toolkit configuration."""

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Toolkit settings."""

    model_config = SettingsConfigDict(env_prefix="GEOSPIN_", env_file=".env", extra="ignore")

    # Physics
    hbar: float = Field(1.0, gt=0)  # Homogeneous in every identity, so units are free

    # Integration
    integrator_step: float = Field(1e-3, gt=0)
    t_end: float = Field(1.0, gt=0)
    rk4_reference_step: float = Field(1e-5, gt=0)

    # Eigen solver
    eig_sweeps_per_dim: int = Field(30, ge=1)  # QR iteration cap is this times n
    eig_residual_tol: float = 1e-8  # Relative to ||M||; above it an eigenvector is unreliable

    # Tolerances
    trace_identity_tol: float = 1e-9
    speed_drift_tol: float = 1e-6  # Times (1 + initial speed); a geodesic drifting past it is logged
    fd_step: float = 1e-6  # Scaled by max(1, |x|) in the finite-difference oracles

    # Ricci flow
    extinction_threshold: float = 1e-6  # Flow stops once the scale factor drops to this

    # Symbolic engine limits
    symbolic_det_max_dim: int = 8
    symbolic_christoffel_max_dim: int = 4
    max_dimension: int = 16

    # Runtime
    seed: int = 42
    sweep_workers: int = 0  # 0 = one per CPU
    domain_sampling_attempts: int = 1000
    log_level: str = "INFO"


settings = Settings()
