"""Physics-based and aggregate-noise sensing bounds for hardware-impaired OFDM ISAC.

The package models a monostatic OFDM joint sensing/communication link whose
transmitter suffers from power-amplifier compression and oscillator phase
noise, computes the corresponding delay/Doppler Cramer-Rao bounds (exploiting
that the distorted waveform is known at the co-located sensing receiver),
and validates them by Monte-Carlo maximum-likelihood estimation.
"""

__version__ = "0.1.0"

from .comm import (CommConfig, pa_comm_degradation_db, pn_residual_variance,
                   pn_sinr_loss_db, rate, sinr_pa)
from .config import Settings, apply_overrides, load_settings
from .crb import (SPEED_OF_LIGHT, CrbReport, OracleFim, TargetParams,
                  aggregated_snr, augmented_fim_oracle, crb_ideal, crb_joint,
                  crb_kappa, crb_pa, crb_pn, crb_pn_doppler, crb_pn_floor,
                  overestimation_factors, overestimation_ratio, velocity_crb)
from .frame import (ConfigurationError, OfdmFrame, SystemConfig,
                    centered_indices, dft_symbol, generate_frame, idft_symbol,
                    make_qam_constellation)
from .mc import (GridSpec, McConfig, McResult, default_grids,
                 dpd_overhead_sweep, dpd_template_perturb, ml_grid_estimate,
                 run_mc_mse, synthesize_echo)
from .pa import (BussgangCoeffs, DegenerateFrameError, PaOutputFrame,
                 RappParams, apply_pa_frame, estimate_bussgang,
                 pa_degradation_db, rapp_gain, spectral_moments,
                 spectral_symmetry_residual)
from .pn import (CpeCovariance, PnParams, SingularCovarianceError, apply_cpe,
                 build_cpe_covariance, cpe_quadratic_form, sample_cpe)
from .scenarios import (SCENARIO_COLUMNS, SCENARIOS, CsvTable, ScenarioSpec,
                        run_scenario)
