"""OFDM frame generation: QAM constellations, centered indexing, unitary DFT pair.

The frequency-domain grid X[k, m] holds N subcarriers by M symbols. All
spectral-moment and phase computations downstream use the centered indices
k' = k - (N-1)/2 and m' = m - (M-1)/2, which sum to zero exactly.
"""

from dataclasses import dataclass, field

import numpy as np

_SUPPORTED_QAM = (4, 16, 64)


class ConfigurationError(ValueError):
    """Invalid system or scenario configuration."""


@dataclass(frozen=True)
class SystemConfig:
    """OFDM and carrier parameters of the monostatic link.

    symbol_duration is 1/subcarrier_spacing + cp_duration; the cyclic prefix
    enters the analysis only through that total duration.
    """

    n_subcarriers: int = 256
    n_symbols: int = 14
    subcarrier_spacing: float = 120e3
    cp_duration: float = 8.9e-6 - 1.0 / 120e3
    carrier_freq: float = 28e9
    qam_order: int = 16
    symbol_energy: float = 1.0
    noise_var: float = 1e-2

    def __post_init__(self):
        if self.n_subcarriers < 2 or self.n_symbols < 2:
            raise ConfigurationError("need at least 2 subcarriers and 2 symbols")
        if self.subcarrier_spacing <= 0:
            raise ConfigurationError("subcarrier_spacing must be positive")
        if self.qam_order not in _SUPPORTED_QAM:
            raise ConfigurationError(f"unsupported QAM order {self.qam_order}")
        if self.symbol_energy <= 0 or self.noise_var <= 0:
            raise ConfigurationError("symbol_energy and noise_var must be positive")
        if self.symbol_duration <= 0:
            raise ConfigurationError("symbol duration must be positive")

    @property
    def symbol_duration(self) -> float:
        return 1.0 / self.subcarrier_spacing + self.cp_duration

    def with_noise_var(self, noise_var: float) -> "SystemConfig":
        """Copy of this config at a different noise level."""
        return SystemConfig(
            self.n_subcarriers, self.n_symbols, self.subcarrier_spacing,
            self.cp_duration, self.carrier_freq, self.qam_order,
            self.symbol_energy, noise_var,
        )


def centered_indices(n: int) -> np.ndarray:
    """Indices 0..n-1 shifted to be symmetric about zero (sum is exactly 0)."""
    return np.arange(n, dtype=float) - (n - 1) / 2.0


@dataclass(frozen=True)
class OfdmFrame:
    """Frequency-domain symbol grid with its centered index vectors."""

    symbols: np.ndarray              # complex, shape (N, M)
    centered_k: np.ndarray = field(repr=False, default=None)
    centered_m: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        n, m = self.symbols.shape
        if self.centered_k is None:
            object.__setattr__(self, "centered_k", centered_indices(n))
        if self.centered_m is None:
            object.__setattr__(self, "centered_m", centered_indices(m))

    @property
    def shape(self):
        return self.symbols.shape


def make_qam_constellation(order: int, target_power: float = 1.0) -> np.ndarray:
    """Square-grid QAM points with zero mean and average power exactly target_power.

    Per-axis levels are the odd integers +-1, +-3, ... scaled so that the
    analytic mean power 2*(L^2 - 1)/3 (L levels per axis) equals target_power.
    """
    if order not in _SUPPORTED_QAM:
        raise ConfigurationError(f"unsupported QAM order {order}")
    if target_power <= 0:
        raise ConfigurationError("target_power must be positive")
    side = int(round(np.sqrt(order)))
    levels = np.arange(-(side - 1), side, 2, dtype=float)
    points = (levels[:, None] + 1j * levels[None, :]).ravel()
    analytic_power = 2.0 * (side**2 - 1) / 3.0
    return points * np.sqrt(target_power / analytic_power)


def generate_frame(cfg: SystemConfig, seed: int) -> OfdmFrame:
    """Draw an N x M grid of i.i.d. uniform constellation symbols (deterministic per seed)."""
    rng = np.random.default_rng(seed)
    constellation = make_qam_constellation(cfg.qam_order, cfg.symbol_energy)
    idx = rng.integers(0, constellation.size, size=(cfg.n_subcarriers, cfg.n_symbols))
    return OfdmFrame(symbols=constellation[idx])


def idft_symbol(column: np.ndarray) -> np.ndarray:
    """Unitary inverse DFT, x[n] = (1/sqrt(N)) sum_k X[k] e^{+j2pi kn/N}."""
    column = np.asarray(column)
    n = column.shape[0]
    return np.fft.ifft(column, axis=0) * np.sqrt(n)


def dft_symbol(column: np.ndarray) -> np.ndarray:
    """Unitary forward DFT, X[k] = (1/sqrt(N)) sum_n x[n] e^{-j2pi kn/N}."""
    column = np.asarray(column)
    n = column.shape[0]
    return np.fft.fft(column, axis=0) / np.sqrt(n)
