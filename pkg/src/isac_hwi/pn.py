"""Wiener oscillator phase noise as a per-symbol common phase error (CPE).

The CPE over one coherent processing interval is a Gaussian random walk:
theta_m = sum_{i<=m} delta_i with delta_i ~ N(0, sigma_inc^2) and
sigma_inc^2 = 4*pi*beta*T for 3-dB linewidth beta and symbol duration T.
Its covariance is [C]_{ij} = sigma_inc^2 * min(i+1, j+1) (0-indexed).
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .frame import centered_indices

# Above this increment variance the single-rotation CPE picture starts to
# break down (inter-carrier leakage no longer negligible).
CPE_VALIDITY_LIMIT = 0.12


class SingularCovarianceError(ValueError):
    """CPE covariance is singular (zero linewidth)."""


@dataclass(frozen=True)
class PnParams:
    """Wiener phase-noise parameters; increment_var is derived, not free."""

    linewidth: float          # 3-dB linewidth in Hz
    symbol_duration: float    # seconds

    def __post_init__(self):
        if self.linewidth < 0:
            raise ValueError("linewidth must be nonnegative")
        if self.symbol_duration <= 0:
            raise ValueError("symbol_duration must be positive")
        if not self.cpe_valid:
            warnings.warn(
                f"increment variance {self.increment_var:.3g} exceeds "
                f"{CPE_VALIDITY_LIMIT}; CPE-only model is inaccurate",
                stacklevel=2,
            )

    @property
    def increment_var(self) -> float:
        return 4.0 * np.pi * self.linewidth * self.symbol_duration

    @property
    def cpe_valid(self) -> bool:
        return self.increment_var <= CPE_VALIDITY_LIMIT


@dataclass(frozen=True)
class CpeCovariance:
    """M x M random-walk covariance of the per-symbol phases."""

    matrix: np.ndarray
    m_prime: np.ndarray
    increment_var: float

    @property
    def n_symbols(self) -> int:
        return self.matrix.shape[0]


def build_cpe_covariance(pn: PnParams, n_symbols: int) -> CpeCovariance:
    """Exact min-structure covariance; positive definite for linewidth > 0."""
    if n_symbols < 2:
        raise ValueError("need at least 2 symbols")
    if pn.linewidth <= 0:
        raise SingularCovarianceError(
            "zero linewidth gives a singular CPE covariance; use the ideal path")
    steps = np.arange(1, n_symbols + 1, dtype=float)
    matrix = pn.increment_var * np.minimum.outer(steps, steps)
    return CpeCovariance(
        matrix=matrix, m_prime=centered_indices(n_symbols),
        increment_var=pn.increment_var,
    )


def sample_cpe(cov: CpeCovariance, seed: int) -> np.ndarray:
    """One CPE realization via the cumulative-sum construction (exact covariance)."""
    rng = np.random.default_rng(seed)
    increments = rng.normal(0.0, np.sqrt(cov.increment_var), size=cov.n_symbols)
    return np.cumsum(increments)


def cpe_quadratic_form(cov: CpeCovariance) -> float:
    """m'^T C^{-1} m' via a symmetric linear solve (no explicit inverse)."""
    try:
        factor = cho_factor(cov.matrix, lower=True)
    except np.linalg.LinAlgError as exc:
        raise SingularCovarianceError("CPE covariance is not positive definite") from exc
    value = float(cov.m_prime @ cho_solve(factor, cov.m_prime))
    if value <= 0:
        raise SingularCovarianceError("quadratic form is not positive")
    return value


def apply_cpe(grid: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Rotate symbol m of the grid by e^{j theta_m}; magnitudes are unchanged."""
    grid = np.asarray(grid)
    theta = np.asarray(theta, dtype=float)
    if theta.ndim != 1 or theta.size != grid.shape[1]:
        raise ValueError(
            f"theta length {theta.size} does not match symbol count {grid.shape[1]}")
    return grid * np.exp(1j * theta)[None, :]
