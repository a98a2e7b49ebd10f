"""Flat run settings: reference preset, TOML config files and key=value overrides.

Every tunable of the library appears here as one flat key, so a scenario run
is fully described by (settings, seed). The defaults are the reference
operating point used throughout: 256 x 14 grid at 120 kHz spacing (8.9 us
symbols), 16-QAM, 28 GHz carrier, Rapp p=3 at 5 dB back-off, 100 Hz
linewidth, 16 pilots.
"""

from dataclasses import dataclass, fields, replace

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .comm import CommConfig
from .crb import TargetParams
from .frame import ConfigurationError, SystemConfig
from .mc import GridSpec, McConfig, default_grids
from .pa import RappParams
from .pn import PnParams


@dataclass(frozen=True)
class Settings:
    # OFDM / carrier
    n_subcarriers: int = 256
    n_symbols: int = 14
    subcarrier_spacing: float = 120e3
    cp_duration: float = 8.9e-6 - 1.0 / 120e3
    carrier_freq: float = 28e9
    qam_order: int = 16
    symbol_energy: float = 1.0
    noise_var: float = 1e-2
    # power amplifier
    ibo_db: float = 5.0
    smoothness: float = 3.0
    # oscillator
    linewidth_hz: float = 100.0
    # communication link
    channel_gain: float = 1.0
    comm_noise_var: float = 1e-2
    n_pilots: int = 16
    # target
    target_delay: float = 9.25e-8
    target_doppler: float = 1234.5
    reflectivity_real: float = 1.0
    reflectivity_imag: float = 0.0
    # estimation / Monte-Carlo
    bussgang_samples: int = 1_000_000
    mc_trials: int = 1500
    pn_trials: int = 800
    dpd_trials: int = 800
    grid_oversample: int = 4
    refine_levels: int = 4
    mc_model: str = "pa"
    mc_snr_list_db: tuple = (0.0, 10.0, 20.0, 30.0)
    # sweep axes (ranges chosen to cover every quoted operating point)
    snr_start_db: float = -5.0
    snr_stop_db: float = 30.0
    snr_step_db: float = 1.0
    overest_ibo_list_db: tuple = (3.0, 5.0, 7.0)
    ibo_start_db: float = 3.0
    ibo_stop_db: float = 10.0
    ibo_step_db: float = 1.0
    ibo_snr_list_db: tuple = (0.0, 15.0, 30.0)
    beta_list_hz: tuple = (50.0, 100.0, 500.0, 1000.0)
    pn_snr_start_db: float = -5.0
    pn_snr_stop_db: float = 40.0
    pn_snr_step_db: float = 1.0
    design_snr_db: float = 20.0
    design_ibo_start_db: float = 2.0
    design_ibo_stop_db: float = 10.0
    design_ibo_step_db: float = 0.5
    design_beta_min_hz: float = 10.0
    design_beta_max_hz: float = 1000.0
    design_beta_points: int = 25
    pareto_snr_list_db: tuple = (10.0, 20.0, 30.0)
    pareto_ibo_start_db: float = 5.0
    pareto_ibo_stop_db: float = 10.0
    pareto_ibo_step_db: float = 0.5
    dpd_snr_db: float = 20.0
    dpd_ibo_db: float = 5.0
    dpd_nmse_list_db: tuple = (-40.0, -35.0, -30.0, -28.0, -25.0, -22.0, -20.0)

    # ---- component builders -------------------------------------------------

    def system(self, noise_var: float | None = None) -> SystemConfig:
        return SystemConfig(
            n_subcarriers=self.n_subcarriers, n_symbols=self.n_symbols,
            subcarrier_spacing=self.subcarrier_spacing, cp_duration=self.cp_duration,
            carrier_freq=self.carrier_freq, qam_order=self.qam_order,
            symbol_energy=self.symbol_energy,
            noise_var=self.noise_var if noise_var is None else noise_var,
        )

    def rapp(self, ibo_db: float | None = None) -> RappParams:
        return RappParams(
            ibo_db=self.ibo_db if ibo_db is None else ibo_db,
            smoothness=self.smoothness, input_power=self.symbol_energy,
        )

    def phase_noise(self, linewidth_hz: float | None = None) -> PnParams:
        return PnParams(
            linewidth=self.linewidth_hz if linewidth_hz is None else linewidth_hz,
            symbol_duration=self.system().symbol_duration,
        )

    def comm(self, comm_noise_var: float | None = None) -> CommConfig:
        return CommConfig(
            channel_gain=self.channel_gain,
            comm_noise_var=(self.comm_noise_var if comm_noise_var is None
                            else comm_noise_var),
            n_pilots=self.n_pilots,
        )

    def target(self) -> TargetParams:
        return TargetParams(
            delay=self.target_delay, doppler=self.target_doppler,
            reflectivity=self.reflectivity_real + 1j * self.reflectivity_imag,
        )

    def mc(self, n_trials: int, seed: int,
           template_nmse_db: float | None = None) -> McConfig:
        tau_grid, nu_grid = default_grids(
            self.system(), oversample=self.grid_oversample,
            refine_levels=self.refine_levels)
        return McConfig(n_trials=n_trials, tau_grid=tau_grid, nu_grid=nu_grid,
                        seed=seed, template_nmse_db=template_nmse_db)

    def noise_for_snr(self, snr_db: float) -> float:
        """Noise variance giving per-subcarrier sensing SNR snr_db at this preset."""
        amp2 = self.reflectivity_real**2 + self.reflectivity_imag**2
        return amp2 * self.symbol_energy / 10.0 ** (snr_db / 10.0)

    def snr_sweep(self, start: float, stop: float, step: float) -> np.ndarray:
        return np.arange(start, stop + 0.5 * step, step)


_FIELD_TYPES = {
    f.name: (f.type if isinstance(f.type, str) else f.type.__name__)
    for f in fields(Settings)
}


def _coerce(key: str, value):
    kind = _FIELD_TYPES[key]
    if kind == "tuple":
        if isinstance(value, (list, tuple)):
            return tuple(float(v) for v in value)
        return tuple(float(part) for part in str(value).split(",") if part.strip())
    if kind == "int":
        out = int(float(value))
        if out != float(value):
            raise ConfigurationError(f"{key} expects an integer, got {value!r}")
        return out
    if kind == "float":
        return float(value)
    return str(value)


def apply_overrides(settings: Settings, overrides: dict) -> Settings:
    """New Settings with the given key/value pairs applied.

    Unknown keys are a configuration error, so typos fail loudly.
    """
    updates = {}
    for key, value in overrides.items():
        if key not in _FIELD_TYPES:
            raise ConfigurationError(f"unknown config key {key!r}")
        try:
            updates[key] = _coerce(key, value)
        except (TypeError, ValueError) as exc:
            raise ConfigurationError(f"bad value for {key!r}: {value!r}") from exc
    return replace(settings, **updates)


def parse_set_args(pairs) -> dict:
    """Parse repeated --set key=value arguments into a dict."""
    out = {}
    for pair in pairs or ():
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise ConfigurationError(f"--set expects key=value, got {pair!r}")
        out[key.strip()] = value.strip()
    return out


def load_settings(config_path: str | None = None, overrides: dict | None = None) -> Settings:
    """Reference preset, optionally updated from a flat TOML file and overrides."""
    settings = Settings()
    if config_path is not None:
        try:
            with open(config_path, "rb") as handle:
                data = tomllib.load(handle)
        except OSError as exc:
            raise ConfigurationError(f"cannot read config file: {exc}") from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigurationError(f"invalid config file: {exc}") from exc
        for key, value in data.items():
            if isinstance(value, dict):
                raise ConfigurationError(
                    f"config must be flat key/value pairs, found table {key!r}")
        settings = apply_overrides(settings, data)
    if overrides:
        settings = apply_overrides(settings, overrides)
    return settings
