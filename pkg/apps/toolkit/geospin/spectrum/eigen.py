"""Eigenvalues of a small dense real nonsymmetric matrix.

Pipeline: balancing (powers of two, so no rounding is introduced), Householder
reduction to upper Hessenberg form, then the Francis implicit double-shift QR
iteration with deflation on negligible subdiagonals. Complex eigenvalues come
out of 2×2 blocks as exact conjugate pairs. Eigenvectors are recovered by
inverse iteration on the original matrix and flagged when their residual is
above tolerance.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from loguru import logger

from geospin.core.config import settings
from geospin.core.errors import ConvergenceError, DimensionMismatchError, InvalidParameterError

RADIX = 2.0


@dataclass
class EigenResult:
    eigenvalues: list[complex]
    eigenvectors: list[Optional[np.ndarray]] = field(default_factory=list)
    residuals: list[Optional[float]] = field(default_factory=list)
    reliable: list[bool] = field(default_factory=list)
    iterations: int = 0


def _check_square(m) -> np.ndarray:
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(a.shape[0] if a.ndim else 0, a.shape[-1] if a.ndim else 0, "square matrix")
    if a.shape[0] < 1:
        raise InvalidParameterError("matrix", a.shape, "must be at least 1×1")
    if not np.all(np.isfinite(a)):
        raise InvalidParameterError("matrix", "nonfinite", "entries must be finite")
    return a


def balance(a: np.ndarray) -> np.ndarray:
    """Similarity-scale rows and columns by powers of two to equalize their norms."""
    a = a.copy()
    n = a.shape[0]
    sqrdx = RADIX * RADIX
    done = False
    while not done:
        done = True
        for i in range(n):
            c = float(np.sum(np.abs(a[:, i])) - abs(a[i, i]))
            r = float(np.sum(np.abs(a[i, :])) - abs(a[i, i]))
            if c == 0.0 or r == 0.0:
                continue
            g = r / RADIX
            f = 1.0
            s = c + r
            while c < g:
                f *= RADIX
                c *= sqrdx
            g = r * RADIX
            while c > g:
                f /= RADIX
                c /= sqrdx
            if (c + r) / f < 0.95 * s:
                done = False
                a[i, :] /= f
                a[:, i] *= f
    return a


def hessenberg(a: np.ndarray) -> np.ndarray:
    """Upper Hessenberg form by Householder reflections."""
    h = a.copy()
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1 :, k].copy()
        norm_x = float(np.linalg.norm(x))
        if norm_x == 0.0:
            continue
        alpha = -math.copysign(norm_x, x[0])
        v = x
        v[0] -= alpha
        v /= np.linalg.norm(v)
        h[k + 1 :, k:] -= 2.0 * np.outer(v, v @ h[k + 1 :, k:])
        h[:, k + 1 :] -= 2.0 * np.outer(h[:, k + 1 :] @ v, v)
        h[k + 2 :, k] = 0.0
    return h


def hessenberg_qr(h: np.ndarray, max_sweeps: Optional[int] = None) -> tuple[list[complex], int]:
    """Eigenvalues of an upper Hessenberg matrix by Francis double-shift QR.

    Only the active diagonal block is updated, which is enough for
    eigenvalues. Exceptional shifts are taken after 10 and 20 sweeps without
    deflation.

    Raises:
        ConvergenceError: more than `max_sweeps` sweeps in total
    """
    a = h.copy()
    n = a.shape[0]
    if max_sweeps is None:
        max_sweeps = settings.eig_sweeps_per_dim * n
    wr = [0.0] * n
    wi = [0.0] * n
    anorm = sum(abs(a[i, j]) for i in range(n) for j in range(max(i - 1, 0), n))
    total = 0
    nn = n - 1
    t = 0.0
    while nn >= 0:
        its = 0
        while True:
            l = nn
            while l >= 1:
                s = abs(a[l - 1, l - 1]) + abs(a[l, l])
                if s == 0.0:
                    s = anorm
                if abs(a[l, l - 1]) + s == s:
                    a[l, l - 1] = 0.0
                    break
                l -= 1
            x = a[nn, nn]
            if l == nn:
                # 1×1 block deflated
                wr[nn] = x + t
                wi[nn] = 0.0
                nn -= 1
            else:
                y = a[nn - 1, nn - 1]
                w = a[nn, nn - 1] * a[nn - 1, nn]
                if l == nn - 1:
                    # 2×2 block: real pair or conjugate pair
                    p = 0.5 * (y - x)
                    q = p * p + w
                    z = math.sqrt(abs(q))
                    x += t
                    if q >= 0.0:
                        z = p + math.copysign(z, p)
                        wr[nn - 1] = wr[nn] = x + z
                        if z != 0.0:
                            wr[nn] = x - w / z
                        wi[nn - 1] = wi[nn] = 0.0
                    else:
                        wr[nn - 1] = wr[nn] = x + p
                        wi[nn] = z
                        wi[nn - 1] = -z
                    nn -= 2
                else:
                    if total >= max_sweeps:
                        raise ConvergenceError(total, nn + 1)
                    if its in (10, 20):
                        t += x
                        for i in range(nn + 1):
                            a[i, i] -= x
                        s = abs(a[nn, nn - 1]) + abs(a[nn - 1, nn - 2])
                        x = y = 0.75 * s
                        w = -0.4375 * s * s
                    its += 1
                    total += 1
                    _francis_sweep(a, l, nn, x, y, w)
            if not l < nn - 1:
                break
    return [complex(re, im) for re, im in zip(wr, wi)], total


def _francis_sweep(a: np.ndarray, l: int, nn: int, x: float, y: float, w: float) -> None:
    # look for two consecutive small subdiagonals to start the bulge at row m
    m = nn - 2
    while True:
        z = a[m, m]
        r = x - z
        s = y - z
        p = (r * s - w) / a[m + 1, m] + a[m, m + 1]
        q = a[m + 1, m + 1] - z - r - s
        r = a[m + 2, m + 1]
        s = abs(p) + abs(q) + abs(r)
        p /= s
        q /= s
        r /= s
        if m == l:
            break
        u = abs(a[m, m - 1]) * (abs(q) + abs(r))
        v = abs(p) * (abs(a[m - 1, m - 1]) + abs(z) + abs(a[m + 1, m + 1]))
        if u + v == v:
            break
        m -= 1
    for i in range(m + 2, nn + 1):
        a[i, i - 2] = 0.0
        if i != m + 2:
            a[i, i - 3] = 0.0
    # chase the bulge down the active block
    for k in range(m, nn):
        if k != m:
            p = a[k, k - 1]
            q = a[k + 1, k - 1]
            r = a[k + 2, k - 1] if k != nn - 1 else 0.0
            x = abs(p) + abs(q) + abs(r)
            if x != 0.0:
                p /= x
                q /= x
                r /= x
        s = math.copysign(math.sqrt(p * p + q * q + r * r), p)
        if s == 0.0:
            continue
        if k == m:
            if l != m:
                a[k, k - 1] = -a[k, k - 1]
        else:
            a[k, k - 1] = -s * x
        p += s
        x = p / s
        y = q / s
        z = r / s
        q /= p
        r /= p
        for j in range(k, nn + 1):
            p = a[k, j] + q * a[k + 1, j]
            if k != nn - 1:
                p += r * a[k + 2, j]
                a[k + 2, j] -= p * z
            a[k + 1, j] -= p * y
            a[k, j] -= p * x
        for i in range(l, min(nn, k + 3) + 1):
            p = x * a[i, k] + y * a[i, k + 1]
            if k != nn - 1:
                p += z * a[i, k + 2]
                a[i, k + 2] -= p * r
            a[i, k + 1] -= p * q
            a[i, k] -= p


def sort_eigenvalues(values: list[complex]) -> list[complex]:
    """Ascending by real part, then imaginary part."""
    return sorted(values, key=lambda z: (z.real, z.imag))


def inverse_iteration(m: np.ndarray, lam: complex, iterations: int = 3) -> np.ndarray:
    """Unit eigenvector estimate for eigenvalue `lam` of m."""
    n = m.shape[0]
    scale = max(1.0, float(np.linalg.norm(m, ord=np.inf)))
    x = np.array([1.0 + 0.1 * k for k in range(n)], dtype=complex)
    x /= np.linalg.norm(x)
    shift = lam + 1e-10 * scale
    identity = np.eye(n)
    for _ in range(iterations):
        try:
            y = np.linalg.solve(m - shift * identity, x)
        except np.linalg.LinAlgError:
            shift += 1e-8 * scale
            continue
        norm_y = np.linalg.norm(y)
        if not np.isfinite(norm_y) or norm_y == 0.0:
            break
        x = y / norm_y
    return x


def eig_real_nonsymmetric(m, vectors: bool = True) -> EigenResult:
    """Eigenvalues (and eigenvectors) of a real square matrix.

    Args:
        m: n×n real matrix with finite entries
        vectors: Also recover eigenvectors by inverse iteration

    Returns:
        EigenResult with eigenvalues sorted by (real, imag); when vectors is
        set, per-eigenvalue unit vectors, residuals ‖Mx − λx‖ and a
        reliability flag (residual ≤ eig_residual_tol·‖M‖)

    Raises:
        ConvergenceError: QR iteration did not converge within the sweep cap
    """
    a = _check_square(m)
    values, sweeps = hessenberg_qr(hessenberg(balance(a)))
    values = sort_eigenvalues(values)
    result = EigenResult(eigenvalues=values, iterations=sweeps)
    if not vectors:
        return result
    norm_m = float(np.linalg.norm(a, ord=2))
    tolerance = settings.eig_residual_tol * norm_m
    for lam in values:
        x = inverse_iteration(a, lam)
        residual = float(np.linalg.norm(a @ x - lam * x))
        reliable = residual <= tolerance
        result.eigenvectors.append(x)
        result.residuals.append(residual)
        result.reliable.append(reliable)
        if not reliable:
            logger.warning(f"Eigenvector for λ = {lam} unreliable (residual {residual:.3e})")
    return result
