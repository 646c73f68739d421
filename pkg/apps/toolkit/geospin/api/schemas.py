"""Pydantic models for every JSON artifact the toolkit reads or writes."""

from enum import Enum
from pathlib import Path
from typing import Any, Optional

from pydantic import BaseModel, Field, model_validator

from geospin.core.config import settings


class ComplexValue(BaseModel):
    """Complex number as {re, im}; JSON has no complex type."""

    re: float
    im: float

    @classmethod
    def of(cls, z: complex) -> "ComplexValue":
        return cls(re=float(z.real), im=float(z.imag))


class ManifoldManifest(BaseModel):
    """User metric definition loaded with --manifest."""

    name: str
    dimension: int = Field(..., ge=1)
    coordinates: list[str]
    metric: list[list[str]] = Field(..., description="n×n grid of expression strings for g_ij")
    domain: list[str] = Field(default_factory=list, description="Strict inequality constraints")
    sample_box: Optional[list[tuple[float, float]]] = Field(
        None, description="Per-coordinate (low, high) box for random in-domain points"
    )


class ManifoldSummary(BaseModel):
    name: str
    dimension: int
    parameters: dict[str, Any]
    description: str


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"


class FlowMode(str, Enum):
    AUTO = "auto"
    HOMOTHETIC = "homothetic"
    POINTWISE = "pointwise"


class RunConfig(BaseModel):
    """Resolved options of one CLI invocation."""

    manifold: Optional[str] = None
    params: dict[str, Any] = Field(default_factory=dict)
    manifest: Optional[Path] = None
    point: Optional[list[float]] = None
    velocity: Optional[list[float]] = None
    velocities: list[list[float]] = Field(default_factory=list, description="Sweep inputs, in order")
    hbar: float = Field(default_factory=lambda: settings.hbar, gt=0)
    h: float = Field(default_factory=lambda: settings.integrator_step, gt=0)
    t_end: float = Field(default_factory=lambda: settings.t_end, gt=0)
    output_format: OutputFormat = OutputFormat.JSON
    seed: int = Field(default_factory=lambda: settings.seed)
    output: Optional[Path] = None
    plot_data: Optional[Path] = None
    flow_mode: FlowMode = FlowMode.AUTO
    workers: int = Field(default_factory=lambda: settings.sweep_workers, ge=0)
    only: list[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _one_manifold_source(self) -> "RunConfig":
        if self.manifold is not None and self.manifest is not None:
            raise ValueError("--manifold and --manifest are mutually exclusive")
        return self


class ChristoffelOutput(BaseModel):
    manifold: str
    coordinates: list[str]
    point: list[float]
    index_order: str = "gamma[k][i][j] = Γ^k_ij (upper index first)"
    gamma: list[list[list[float]]]
    log_volume_gradient: list[float]
    trace_residual: float = Field(..., description="max_j |Σ_k Γ^k_kj − A_j|")


class GeospinOutput(BaseModel):
    manifold: str
    point: list[float]
    velocity: list[float]
    index_order: str = "w[i][j] = W^i_j = Γ^i_jk v^k (row = upper index, column = lower index)"
    w: list[list[float]]
    w_r: list[list[float]] = Field(..., description="Diagonal part")
    w_a: list[list[float]] = Field(..., description="Off-diagonal part")
    trace: float
    a_dot_v: float


class SpectrumOutput(BaseModel):
    manifold: str
    point: list[float]
    velocity: list[float]
    hbar: float
    W: list[list[float]]
    hamiltonian: list[list[ComplexValue]]
    energies: list[float]
    eig_W: list[ComplexValue]
    lambda_re: list[ComplexValue]
    residuals: list[Optional[float]]
    eigenvector_reliable: list[bool]
    trace_w: float
    hamiltonian_crosscheck: float = Field(..., description="max |eig(Ĥ) − (−iħ·eig(W))| after sorting")


class TrajectorySample(BaseModel):
    t: float
    x: list[float]
    v: list[float]
    speed: float
    w_r: float


class TrajectoryOutput(BaseModel):
    manifold: str
    h: float
    samples: list[TrajectorySample]
    speed_drift: float
    logdet_rate_residual: Optional[float] = None
    error: Optional[str] = Field(None, description="Set when a sweep run stopped early")


class SweepOutput(BaseModel):
    runs: list[TrajectoryOutput]


class RicciFlowSampleOut(BaseModel):
    t: float
    c: float
    scalar_curvature: float
    w_r: float
    residual: float


class CorollarySample(BaseModel):
    t: float
    H: ComplexValue
    H_prime: ComplexValue


class CorollaryReport(BaseModel):
    hbar: float
    max_abs_difference: float
    tolerance: float
    passed: bool
    samples: list[CorollarySample]


class RicciFlowOutput(BaseModel):
    manifold: str
    mode: FlowMode
    point: list[float]
    h: float
    einstein_constant: Optional[float] = None
    extinct: bool
    extinction_time: Optional[float] = None
    samples: list[RicciFlowSampleOut]
    corollary: CorollaryReport


class VerificationCheck(BaseModel):
    name: str
    group: str
    manifold: str
    tolerance: float
    observed: float
    passed: bool
    detail: Optional[str] = None


class VerificationReport(BaseModel):
    seed: int
    groups: list[str]
    checks: list[VerificationCheck]
    passed: bool

    @model_validator(mode="after")
    def _overall_matches_checks(self) -> "VerificationReport":
        if self.passed != all(c.passed for c in self.checks):
            raise ValueError("overall pass must equal the conjunction of check results")
        return self
