"""
Simplified Swendsen-Wang map on complete bipartite graphs.

On K_{n, kn} with per-edge percolation probability B / (n sqrt(k)), one SW
step moves the phase (alpha_L, alpha_R) of a configuration, to leading order,
through the deterministic map

    F(alpha_L, alpha_R) = (1/2 (1 + theta_L alpha_L), 1/2 (1 + theta_R alpha_R))

where (theta_L, theta_R) are the giant-component fractions of the percolated
majority spin class. This module solves for theta, iterates F, locates its
fixed point, evaluates its Jacobian, and computes the phase log-probability
psi whose maximizer is the most likely phase.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import brentq
from scipy.special import logit, xlogy

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12
CRITICAL_BAND = 1e-9
NEAR_CRITICAL_WARNING = 1e-3
DAMPING = 0.5
MAX_THETA_ITER = 10_000
MAX_F_ITER = 10_000

# theta iterations keep going past ``tol`` down to this residual when they can
_THETA_FLOOR = 64 * np.finfo(float).eps


class PhasePoint(NamedTuple):
    """Per-partition fraction of the majority spin class."""

    alpha_L: float
    alpha_R: float


class ThetaPair(NamedTuple):
    """Giant-component fractions inside the majority spin class."""

    theta_L: float
    theta_R: float


class Jacobian2(NamedTuple):
    """Entries of the 2x2 Jacobian of F."""

    dL_dL: float
    dL_dR: float
    dR_dL: float
    dR_dR: float

    def as_array(self) -> np.ndarray:
        return np.array([[self.dL_dL, self.dL_dR], [self.dR_dL, self.dR_dR]])


@dataclass(frozen=True)
class ModelScale:
    """Coupling scale ``B`` and partition ratio ``k`` of a complete bipartite model.

    Attributes:
        B: Coupling scale, > 0
        k: Ratio of the right to the left partition size, >= 1
    """

    B: float
    k: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.B) or self.B <= 0:
            raise ValueError(f"B: expected a positive finite scale, got {self.B}")
        if not math.isfinite(self.k) or self.k < 1:
            raise ValueError(
                f"k: expected a ratio >= 1, got {self.k}; swap the partitions to normalize"
            )
        if 0 < abs(self.B - 2.0) < NEAR_CRITICAL_WARNING:
            logger.warning(f"B={self.B} is close to the critical value 2")

    @property
    def sqrt_k(self) -> float:
        return math.sqrt(self.k)


class ConvergenceError(RuntimeError):
    """A numerical iteration did not converge.

    Attributes:
        residual: Last residual reached
        trajectory: Tail of the iterates, when available
    """

    def __init__(self, message: str, residual: float, trajectory: Optional[List] = None):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual
        self.trajectory = trajectory or []


def _check_alpha(alpha) -> PhasePoint:
    alpha = PhasePoint(float(alpha[0]), float(alpha[1]))
    for name, value in zip(PhasePoint._fields, alpha):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name}: expected a value in [0, 1], got {value}")
    return alpha


def _criticality(alpha: PhasePoint, scale: ModelScale) -> float:
    return math.sqrt(alpha.alpha_L * alpha.alpha_R) * scale.B


def _theta_residual(theta_l: float, theta_r: float, a: float, b: float) -> float:
    return max(
        abs(math.exp(-a * theta_r) - (1.0 - theta_l)),
        abs(math.exp(-b * theta_l) - (1.0 - theta_r)),
    )


def _theta_by_root(a: float, b: float) -> Tuple[float, float]:
    # h(x) = x - 1 + exp(-a (1 - exp(-b x))), written with expm1 to keep h(x) < 0 near 0
    def h(x: float) -> float:
        return x + math.expm1(a * math.expm1(-b * x))

    theta_l = brentq(h, 1e-300, 1.0, xtol=1e-300, rtol=4 * np.finfo(float).eps)
    return theta_l, -math.expm1(-b * theta_l)


def solve_theta(alpha, scale: ModelScale, tol: float = DEFAULT_TOL) -> ThetaPair:
    """Giant-component fractions for the phase ``alpha``.

    Solves exp(-B sqrt(k) alpha_R theta_R) = 1 - theta_L and
    exp(-(B / sqrt(k)) alpha_L theta_L) = 1 - theta_R for the positive root
    by damped fixed-point iteration, falling back to a bracketed root search
    on the one-dimensional reduction.

    Args:
        alpha: Phase point
        scale: Model scale
        tol: Residual tolerance for both equations

    Returns:
        ThetaPair; (0, 0) when sqrt(alpha_L alpha_R) B <= 1 (or within 1e-9 of 1)

    Raises:
        ConvergenceError: If neither solver reaches ``tol``
    """
    if tol <= 0:
        raise ValueError(f"tol: expected a positive tolerance, got {tol}")
    alpha = _check_alpha(alpha)
    crit = _criticality(alpha, scale)
    if crit <= 1.0 or abs(crit - 1.0) < CRITICAL_BAND:
        return ThetaPair(0.0, 0.0)

    a = scale.B * scale.sqrt_k * alpha.alpha_R
    b = scale.B / scale.sqrt_k * alpha.alpha_L

    theta_l, theta_r = -math.expm1(-a), -math.expm1(-b)
    residual = _theta_residual(theta_l, theta_r, a, b)
    target = min(tol, _THETA_FLOOR)
    iterations = 0
    while residual > target and iterations < MAX_THETA_ITER:
        new_l = -math.expm1(-a * theta_r)
        new_r = -math.expm1(-b * theta_l)
        theta_l = (1.0 - DAMPING) * theta_l + DAMPING * new_l
        theta_r = (1.0 - DAMPING) * theta_r + DAMPING * new_r
        residual = _theta_residual(theta_l, theta_r, a, b)
        iterations += 1

    if residual >= tol:
        logger.debug(
            f"Damped theta iteration stalled at residual {residual:.3e} "
            f"for alpha={tuple(alpha)}, B={scale.B}, k={scale.k}; using root search"
        )
        theta_l, theta_r = _theta_by_root(a, b)
        residual = _theta_residual(theta_l, theta_r, a, b)
        if residual >= tol:
            raise ConvergenceError(
                f"theta equations did not converge for alpha={tuple(alpha)}, "
                f"B={scale.B}, k={scale.k}",
                residual,
            )

    return ThetaPair(theta_l, theta_r)


def f_map(alpha, scale: ModelScale, tol: float = DEFAULT_TOL) -> PhasePoint:
    """One application of the simplified SW map F."""
    alpha = _check_alpha(alpha)
    theta = solve_theta(alpha, scale, tol)
    return PhasePoint(
        0.5 * (1.0 + theta.theta_L * alpha.alpha_L),
        0.5 * (1.0 + theta.theta_R * alpha.alpha_R),
    )


def iterate_f(
    alpha0,
    scale: ModelScale,
    tol: float = DEFAULT_TOL,
    max_iter: int = MAX_F_ITER,
) -> Tuple[PhasePoint, int]:
    """Iterate F until successive iterates differ by less than ``tol`` in max-norm.

    Args:
        alpha0: Starting phase
        scale: Model scale
        tol: Stopping tolerance
        max_iter: Iteration cap

    Returns:
        (limit, number of iterations)

    Raises:
        ConvergenceError: If ``max_iter`` is exceeded; carries the last 10 iterates
    """
    if max_iter < 1:
        raise ValueError(f"max_iter: expected a positive count, got {max_iter}")
    current = _check_alpha(alpha0)
    trajectory = [current]
    for iteration in range(1, max_iter + 1):
        following = f_map(current, scale, tol)
        step = max(abs(following[0] - current[0]), abs(following[1] - current[1]))
        trajectory.append(following)
        if len(trajectory) > 10:
            trajectory.pop(0)
        current = following
        if step < tol:
            logger.debug(f"F iteration converged after {iteration} steps at {tuple(current)}")
            return current, iteration

    raise ConvergenceError(
        f"F iteration did not converge within {max_iter} steps for B={scale.B}, k={scale.k}",
        step,
        trajectory,
    )


def fixed_point_residual(alpha, scale: ModelScale) -> float:
    """Max residual of the two fixed-point equations of F at ``alpha``."""
    alpha_l, alpha_r = alpha
    B, sqrt_k = scale.B, scale.sqrt_k
    left = abs(math.exp(B * sqrt_k * (1 - 2 * alpha_r)) - (1 - alpha_l) / alpha_l)
    right = abs(math.exp(B / sqrt_k * (1 - 2 * alpha_l)) - (1 - alpha_r) / alpha_r)
    return max(left, right)


def fixed_point(scale: ModelScale, tol: float = DEFAULT_TOL) -> PhasePoint:
    """The unique fixed point of F with both coordinates in [1/2, 1].

    For B < 2 this is (1/2, 1/2). For B > 2 the substitution z = 2 alpha - 1
    reduces the fixed-point equations to the scalar equation

        tanh(B sqrt(k) z_R / 2) = (2 sqrt(k) / B) artanh(z_R)

    whose unique root in (0, 1) is bracketed and refined with Brent's method.

    Args:
        scale: Model scale
        tol: Tolerance on the root

    Returns:
        PhasePoint

    Raises:
        ValueError: If B is within 1e-9 of the critical value 2
    """
    B, sqrt_k = scale.B, scale.sqrt_k
    if abs(B - 2.0) < CRITICAL_BAND:
        raise ValueError(
            f"B={B} is within {CRITICAL_BAND} of the critical value 2; "
            f"the fixed point is degenerate there"
        )
    if B < 2.0:
        return PhasePoint(0.5, 0.5)

    def phi(u: float) -> float:
        return math.tanh(B * sqrt_k * u / 2.0) - (2.0 * sqrt_k / B) * math.atanh(u)

    lo, hi = 1e-12, 1.0 - 1e-16
    if phi(hi) > 0:
        z_r = hi
    else:
        z_r = brentq(phi, lo, hi, xtol=min(tol, 1e-15), rtol=4 * np.finfo(float).eps)
    z_l = math.tanh(B * sqrt_k * z_r / 2.0)

    point = PhasePoint(0.5 * (1.0 + z_l), 0.5 * (1.0 + z_r))
    logger.debug(
        f"Fixed point for B={B}, k={scale.k}: {tuple(point)}, "
        f"residual {fixed_point_residual(point, scale):.3e}"
    )
    return point


def jacobian_f(alpha, scale: ModelScale, tol: float = DEFAULT_TOL) -> Jacobian2:
    """Closed-form Jacobian of F at ``alpha``.

    Returns the zero matrix in the subcritical regime.

    Raises:
        ValueError: At a critical point, where F is not differentiable
    """
    alpha = _check_alpha(alpha)
    crit = _criticality(alpha, scale)
    if abs(crit - 1.0) < CRITICAL_BAND:
        raise ValueError(
            f"F is not differentiable at the critical point alpha={tuple(alpha)}, B={scale.B}"
        )
    if crit < 1.0:
        return Jacobian2(0.0, 0.0, 0.0, 0.0)

    theta_l, theta_r = solve_theta(alpha, scale, tol)
    B, sqrt_k = scale.B, scale.sqrt_k
    denom = 1.0 - (1.0 - theta_l) * (1.0 - theta_r) * B**2 * alpha.alpha_L * alpha.alpha_R
    scale_factor = 0.5 / denom
    return Jacobian2(
        scale_factor * theta_l,
        scale_factor * (1.0 - theta_l) * theta_r * B * sqrt_k * alpha.alpha_L,
        scale_factor * (1.0 - theta_r) * theta_l * B / sqrt_k * alpha.alpha_R,
        scale_factor * theta_r,
    )


def spectral_radius(j) -> float:
    """Largest absolute eigenvalue of a 2x2 matrix (Jacobian2 or array-like)."""
    (a, b), (c, d) = np.asarray(j.as_array() if isinstance(j, Jacobian2) else j, dtype=float)
    half_trace = 0.5 * (a + d)
    disc = 0.25 * (a - d) ** 2 + b * c
    if disc >= 0:
        root = math.sqrt(disc)
        return max(abs(half_trace + root), abs(half_trace - root))
    return math.sqrt(a * d - b * c)


def eigenvalue_bound(theta) -> float:
    """Upper bound on the spectral radius of the Jacobian at a fixed point from theta alone."""
    theta_l, theta_r = float(theta[0]), float(theta[1])
    if not (0 < theta_l < 1 and 0 < theta_r < 1):
        raise ValueError(f"theta: both entries must lie in (0, 1), got {(theta_l, theta_r)}")
    ratio = (1 - theta_l) * (1 - theta_r) / (theta_l * theta_r)
    return 0.5 * (theta_l + theta_r) / (
        1.0 - ratio * math.log1p(-theta_l) * math.log1p(-theta_r)
    )


def psi(alpha, scale: ModelScale):
    """Exponential-order log-probability of the phase ``alpha``.

    Accepts scalars or numpy arrays for the two coordinates; x log x is taken
    as 0 at x = 0.
    """
    alpha_l = np.asarray(alpha[0], dtype=float)
    alpha_r = np.asarray(alpha[1], dtype=float)
    B, sqrt_k = scale.B, scale.sqrt_k
    value = (
        -B * (alpha_l + alpha_r - 2.0 * alpha_l * alpha_r)
        - (xlogy(alpha_l, alpha_l) + xlogy(1.0 - alpha_l, 1.0 - alpha_l)) / sqrt_k
        - sqrt_k * (xlogy(alpha_r, alpha_r) + xlogy(1.0 - alpha_r, 1.0 - alpha_r))
    )
    return float(value) if value.ndim == 0 else value


def psi_gradient(alpha, scale: ModelScale) -> np.ndarray:
    """Gradient of psi at an interior point."""
    alpha_l, alpha_r = float(alpha[0]), float(alpha[1])
    B, sqrt_k = scale.B, scale.sqrt_k
    return np.array(
        [
            -B * (1.0 - 2.0 * alpha_r) - logit(alpha_l) / sqrt_k,
            -B * (1.0 - 2.0 * alpha_l) - sqrt_k * logit(alpha_r),
        ]
    )


def psi_hessian(alpha, scale: ModelScale) -> np.ndarray:
    """Hessian of psi at an interior point."""
    alpha_l, alpha_r = float(alpha[0]), float(alpha[1])
    B, sqrt_k = scale.B, scale.sqrt_k
    return np.array(
        [
            [-1.0 / (alpha_l * (1.0 - alpha_l) * sqrt_k), 2.0 * B],
            [2.0 * B, -sqrt_k / (alpha_r * (1.0 - alpha_r))],
        ]
    )


def is_map_phase(alpha, scale: ModelScale) -> bool:
    """Whether psi is locally concave at ``alpha``: 2B <= 1 / sqrt(alpha_L(1-alpha_L)alpha_R(1-alpha_R))."""
    alpha_l, alpha_r = float(alpha[0]), float(alpha[1])
    product = alpha_l * (1 - alpha_l) * alpha_r * (1 - alpha_r)
    if product <= 0:
        return False
    return 2.0 * scale.B <= 1.0 / math.sqrt(product) * (1 + 1e-12)


def argmax_psi_grid(scale: ModelScale, resolution: int = 1000) -> PhasePoint:
    """Grid maximizer of psi over [1/2, 1] x [0, 1] (the alpha_L >= 1/2 representative).

    Args:
        scale: Model scale
        resolution: Grid points are i / resolution

    Returns:
        PhasePoint of the largest psi on the grid
    """
    if resolution < 100:
        raise ValueError(f"resolution: expected at least 100, got {resolution}")
    grid = np.arange(resolution + 1) / resolution
    left = grid[grid >= 0.5]
    values = psi(np.meshgrid(left, grid, indexing="ij"), scale)
    i, j = np.unravel_index(np.argmax(values), values.shape)
    return PhasePoint(float(left[i]), float(grid[j]))


def minority_is_subcritical(alpha, B: float) -> bool:
    """Whether the minority spin class percolates subcritically: (1-alpha_L)(1-alpha_R)B^2 < 1."""
    return (1.0 - alpha[0]) * (1.0 - alpha[1]) * B**2 < 1.0


def phase_diagram(
    B_values: Iterable[float],
    k_values: Sequence[float],
    tol: float = DEFAULT_TOL,
) -> pd.DataFrame:
    """Fixed point, theta and contraction rate over a grid of (B, k).

    Points within 1e-9 of B = 2 are skipped with a warning.

    Returns:
        DataFrame with columns B, k, alpha_L_star, alpha_R_star, theta_L,
        theta_R, spectral_radius, residual, map_phase_ok
    """
    rows = []
    for B in B_values:
        if abs(B - 2.0) < CRITICAL_BAND:
            logger.warning(f"Skipping B={B}: fixed point is degenerate at the critical value")
            continue
        for k in k_values:
            scale = ModelScale(float(B), float(k))
            point = fixed_point(scale, tol)
            theta = solve_theta(point, scale, tol)
            rows.append(
                {
                    "B": float(B),
                    "k": float(k),
                    "alpha_L_star": point.alpha_L,
                    "alpha_R_star": point.alpha_R,
                    "theta_L": theta.theta_L,
                    "theta_R": theta.theta_R,
                    "spectral_radius": spectral_radius(jacobian_f(point, scale, tol)),
                    "residual": fixed_point_residual(point, scale),
                    "map_phase_ok": is_map_phase(point, scale),
                }
            )

    logger.info(f"Computed phase diagram with {len(rows)} points")
    return pd.DataFrame(
        rows,
        columns=[
            "B",
            "k",
            "alpha_L_star",
            "alpha_R_star",
            "theta_L",
            "theta_R",
            "spectral_radius",
            "residual",
            "map_phase_ok",
        ],
    )
