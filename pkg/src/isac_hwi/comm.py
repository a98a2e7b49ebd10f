"""Communication-side metrics under PA distortion and residual phase noise.

Unlike the monostatic sensing receiver, the communication user cannot
reconstruct the distorted transmit waveform, so the Bussgang decomposition is
the correct model there: distortion acts as an SNR floor that grows with
transmit power.
"""

from dataclasses import dataclass

import numpy as np

from .pa import BussgangCoeffs


@dataclass(frozen=True)
class CommConfig:
    """Flat-fading downlink: channel gain, receiver noise and CPE pilot count."""

    channel_gain: complex = 1.0 + 0.0j
    comm_noise_var: float = 1e-2
    n_pilots: int = 16

    def __post_init__(self):
        if self.comm_noise_var <= 0:
            raise ValueError("comm_noise_var must be positive")
        if self.n_pilots < 1:
            raise ValueError("n_pilots must be at least 1")


def sinr_pa(comm: CommConfig, bussgang: BussgangCoeffs, symbol_power: float) -> float:
    """SINR |h|^2 |alpha_b|^2 P_X / (|h|^2 sigma_d^2 + sigma_c^2).

    As the receiver noise vanishes this saturates at |alpha_b|^2 P_X / sigma_d^2,
    the PA distortion floor.
    """
    h2 = abs(comm.channel_gain) ** 2
    return (h2 * abs(bussgang.alpha_b) ** 2 * symbol_power /
            (h2 * bussgang.distortion_var + comm.comm_noise_var))


def rate(sinr: float) -> float:
    """Gaussian-signaling rate log2(1 + sinr) in bits/s/Hz."""
    if sinr < 0:
        raise ValueError("sinr must be nonnegative")
    return float(np.log2(1.0 + sinr))


def pn_residual_variance(comm: CommConfig, gamma_c: float) -> float:
    """Residual CPE variance 1/(2 N_p gamma_c) after pilot-based estimation."""
    if gamma_c <= 0:
        raise ValueError("gamma_c must be positive")
    return 1.0 / (2.0 * comm.n_pilots * gamma_c)


def pn_sinr_loss_db(comm: CommConfig) -> float:
    """High-SNR SINR loss 10*log10(1 + 1/(2 N_p)) from the residual CPE, in dB.

    Independent of the operating SNR; below 0.14 dB for 16 or more pilots.
    """
    return 10.0 * np.log10(1.0 + 1.0 / (2.0 * comm.n_pilots))


def pa_comm_degradation_db(comm: CommConfig, bussgang: BussgangCoeffs,
                           symbol_power: float) -> float:
    """SNR-to-SINR loss of the PA in dB, relative to a distortion-free link."""
    ideal = abs(comm.channel_gain) ** 2 * symbol_power / comm.comm_noise_var
    return 10.0 * np.log10(ideal / sinr_pa(comm, bussgang, symbol_power))
