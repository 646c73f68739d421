"""Mode equation dψ/dt + w⁽ʳ⁾(t) ψ = 0 along a precomputed geodesic.

This is a separate scalar ODE per component, not a substitute for the
geodesic equation: −Wv equals −w⁽ʳ⁾v only when v is an eigenvector of W.
w⁽ʳ⁾ is only known at the trajectory samples, so the RK4 step must be an even
multiple of the sample spacing to put every stage time on a sample.

Closed form: ψ(t) = ψ(0)·exp(−∫w⁽ʳ⁾) = ψ(0)·√g(x(0))/√g(x(t)).
"""

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from geospin.core.config import settings
from geospin.core.errors import GridMisalignmentError, InsufficientSamplesError, InvalidParameterError
from geospin.dynamics.geodesic import GeodesicTrajectory
from geospin.dynamics.integrator import rk4_step

_GRID_TOL = 1e-9


@dataclass(frozen=True)
class ModeState:
    t: float
    psi: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "psi", tuple(float(c) for c in self.psi))
        if not all(math.isfinite(c) for c in self.psi):
            raise InvalidParameterError("psi", self.psi, "amplitudes must be finite")


@dataclass(frozen=True, eq=False)
class SampledScalar:
    """A scalar function known on a uniform time grid."""

    times: np.ndarray
    values: np.ndarray

    @classmethod
    def from_trajectory(cls, traj: GeodesicTrajectory) -> "SampledScalar":
        return cls(times=traj.times, values=np.array(traj.w_r))

    @property
    def spacing(self) -> float:
        return float(self.times[1] - self.times[0])

    def index_of(self, t: float) -> int:
        position = (t - self.times[0]) / self.spacing
        index = round(position)
        if abs(position - index) > 1e-6 or not 0 <= index < len(self.times):
            raise GridMisalignmentError(f"t = {t!r} is not a sample time", details={"t": t})
        return index

    def at(self, t: float) -> float:
        return float(self.values[self.index_of(t)])


def _stride(w: SampledScalar, psi0: ModeState, h: float) -> int:
    """Samples per RK4 step, validating the grid."""
    if len(w.times) < 3:
        raise InsufficientSamplesError(3, len(w.times))
    if not h > 0:
        raise InvalidParameterError("h", h, "step must be positive")
    diffs = np.diff(w.times)
    delta = float(diffs[0])
    if delta <= 0 or np.max(np.abs(diffs - delta)) > 1e-6 * delta:
        raise GridMisalignmentError(
            "w_r samples are not uniformly spaced", details={"min_step": float(diffs.min()), "max_step": float(diffs.max())}
        )
    ratio = h / (2.0 * delta)
    m = round(ratio)
    if m < 1 or abs(ratio - m) > 1e-6:
        raise GridMisalignmentError(
            f"step {h!r} is not an even multiple of the sample spacing {delta!r}",
            details={"h": h, "spacing": delta},
        )
    intervals = len(w.times) - 1
    if intervals % (2 * m):
        raise GridMisalignmentError(
            f"{intervals} sample intervals do not split into RK4 steps of {2 * m} intervals; "
            f"the last sample at t = {float(w.times[-1])!r} would be dropped",
            details={"h": h, "spacing": delta, "samples": len(w.times)},
        )
    if abs(psi0.t - float(w.times[0])) > _GRID_TOL * max(1.0, abs(psi0.t)):
        raise GridMisalignmentError(
            f"initial time {psi0.t!r} is not the first sample time {float(w.times[0])!r}",
            details={"t0": psi0.t},
        )
    return 2 * m


def _evolve(w: SampledScalar, psi0: ModeState, h: float, rhs, dtype) -> list[ModeState]:
    stride = _stride(w, psi0, h)
    delta = w.spacing
    psi = np.array(psi0.psi, dtype=dtype)
    states = [psi0]
    index = 0
    while index + stride < len(w.times):
        t = float(w.times[index])
        step = stride * delta
        psi = rk4_step(rhs, t, psi, step)
        index += stride
        states.append(ModeState(t=float(w.times[index]), psi=tuple(np.real(psi))))
    return states


def evolve_mode(w_r: SampledScalar, psi0: ModeState, h: float) -> list[ModeState]:
    """Integrate dψ/dt = −w⁽ʳ⁾(t) ψ with RK4 on the sample grid.

    Raises:
        GridMisalignmentError: samples not uniform, h not an even multiple of
            their spacing, the samples not ending on an RK4 step, or psi0.t
            not the first sample time
        InsufficientSamplesError: fewer than three samples
    """

    def rhs(t: float, psi: np.ndarray) -> np.ndarray:
        return -w_r.at(t) * psi

    return _evolve(w_r, psi0, h, rhs, float)


def evolve_mode_schrodinger(w_r: SampledScalar, psi0: ModeState, h: float, hbar: float | None = None) -> list[ModeState]:
    """Same evolution written as iħ dψ/dt = Hψ with H = −iħ w⁽ʳ⁾, in complex arithmetic."""
    hbar = settings.hbar if hbar is None else hbar
    if not hbar > 0:
        raise InvalidParameterError("hbar", hbar, "must be positive")

    def rhs(t: float, psi: np.ndarray) -> np.ndarray:
        H = -1j * hbar * w_r.at(t)
        return (H * psi) / (1j * hbar)

    return _evolve(w_r, psi0, h, rhs, complex)


def mode_volume_factor(traj: GeodesicTrajectory, times: Sequence[float] | None = None) -> list[float]:
    """√g(x(0)) / √g(x(t)) at the requested sample times (all samples by default)."""
    lsd = np.array(traj.log_sqrt_det)
    if times is None:
        return [float(math.exp(lsd[0] - value)) for value in lsd]
    grid = SampledScalar(times=traj.times, values=lsd)
    return [float(math.exp(lsd[0] - grid.at(t))) for t in times]
