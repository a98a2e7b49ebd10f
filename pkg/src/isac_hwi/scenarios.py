"""Scenario implementations: each reproduces one quantitative experiment as a CSV table.

Column names carry unit suffixes and are stable; `isac-hwi list` prints the
contract. Two runs with the same spec produce byte-identical files (the
provenance comment carries no timestamp).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .comm import pa_comm_degradation_db, pn_sinr_loss_db, rate, sinr_pa
from .config import Settings, apply_overrides
from .crb import (crb_ideal, crb_joint, crb_kappa, crb_pa, crb_pn, crb_pn_floor,
                  overestimation_factors, overestimation_ratio, velocity_crb)
from .frame import ConfigurationError, generate_frame
from .mc import dpd_overhead_sweep, run_mc_mse
from .pa import apply_pa_frame, estimate_bussgang, pa_degradation_db
from .pn import build_cpe_covariance


@dataclass(frozen=True)
class ScenarioSpec:
    """One runnable experiment: scenario name, config overrides, output, seed."""

    name: str
    overrides: dict = field(default_factory=dict)
    output_path: str = ""
    seed: int = 0


@dataclass
class CsvTable:
    """Rectangular numeric table with a single provenance comment line."""

    header: tuple
    rows: list
    provenance: str

    def __post_init__(self):
        width = len(self.header)
        for row in self.rows:
            if len(row) != width:
                raise ValueError("ragged CSV row")
            for cell in row:
                if not math.isfinite(float(cell)):
                    raise ValueError("non-finite CSV cell")

    def body(self) -> str:
        lines = [",".join(self.header)]
        for row in self.rows:
            lines.append(",".join(_fmt(cell) for cell in row))
        return "\n".join(lines) + "\n"

    def write(self, path: str):
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(f"# {self.provenance}\n")
            handle.write(self.body())


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def _provenance(spec: ScenarioSpec) -> str:
    parts = [f"isac-hwi {__version__}", f"scenario={spec.name}", f"seed={spec.seed}"]
    if spec.overrides:
        joined = ";".join(f"{k}={v}" for k, v in sorted(spec.overrides.items()))
        parts.append(f"overrides={joined}")
    return " ".join(parts)


def _bussgang_for(settings: Settings, ibo_db: float, seed: int):
    # One deterministic Bussgang stream per (seed, back-off) pair.
    sub_seed = seed + 1 + int(round(ibo_db * 1000))
    return estimate_bussgang(settings.rapp(ibo_db),
                             n_samples=settings.bussgang_samples, seed=sub_seed)


# ---------------------------------------------------------------------------
# scenario bodies
# ---------------------------------------------------------------------------

def scenario_pa_overestimation(settings: Settings, seed: int) -> tuple:
    """kappa-vs-physics delay-CRB gap across SNR for a few back-off values."""
    cfg0 = settings.system()
    frame = generate_frame(cfg0, seed)
    target = settings.target()
    snrs = settings.snr_sweep(settings.snr_start_db, settings.snr_stop_db,
                              settings.snr_step_db)
    rows = []
    for ibo in settings.overest_ibo_list_db:
        pa_out = apply_pa_frame(frame, settings.rapp(ibo))
        bus = _bussgang_for(settings, ibo, seed)
        for snr in snrs:
            cfg = cfg0.with_noise_var(settings.noise_for_snr(snr))
            pa_rep = crb_pa(cfg, pa_out, target)
            kappa_rep = crb_kappa(cfg, bus, frame, target)
            moment_db, noise_db = overestimation_factors(cfg, pa_out, frame, bus, target)
            rows.append((snr, ibo, pa_rep.crb_delay, kappa_rep.crb_delay,
                         overestimation_ratio(kappa_rep, pa_rep),
                         moment_db, noise_db))
    header = ("snr_db", "ibo_db", "crb_pa_delay_s2", "crb_kappa_delay_s2",
              "overest_db", "moment_factor_db", "noise_factor_db")
    return header, rows


def scenario_pa_vs_ibo(settings: Settings, seed: int) -> tuple:
    """Moment degradation and kappa gap as functions of back-off at fixed SNRs."""
    cfg0 = settings.system()
    frame = generate_frame(cfg0, seed)
    target = settings.target()
    ibos = settings.snr_sweep(settings.ibo_start_db, settings.ibo_stop_db,
                              settings.ibo_step_db)
    rows = []
    for ibo in ibos:
        pa_out = apply_pa_frame(frame, settings.rapp(ibo))
        d_delay, d_doppler = pa_degradation_db(frame, pa_out)
        bus = _bussgang_for(settings, ibo, seed)
        for snr in settings.ibo_snr_list_db:
            cfg = cfg0.with_noise_var(settings.noise_for_snr(snr))
            gap = overestimation_ratio(crb_kappa(cfg, bus, frame, target),
                                       crb_pa(cfg, pa_out, target))
            rows.append((ibo, snr, d_delay, d_doppler, gap))
    header = ("ibo_db", "snr_db", "delta_sens_delay_db", "delta_sens_doppler_db",
              "overest_db")
    return header, rows


def scenario_pn_floor(settings: Settings, seed: int) -> tuple:
    """Velocity CRB vs SNR per linewidth, with the ideal baseline as beta=0 rows."""
    cfg0 = settings.system()
    frame = generate_frame(cfg0, seed)
    target = settings.target()
    snrs = settings.snr_sweep(settings.pn_snr_start_db, settings.pn_snr_stop_db,
                              settings.pn_snr_step_db)
    rows = []
    for snr in snrs:
        cfg = cfg0.with_noise_var(settings.noise_for_snr(snr))
        ideal = crb_ideal(cfg, frame, target)
        rows.append((snr, 0.0, ideal.crb_velocity, 0.0))
    for beta in settings.beta_list_hz:
        pn_cov = build_cpe_covariance(settings.phase_noise(beta), cfg0.n_symbols)
        _, floor_mps = crb_pn_floor(cfg0, pn_cov)
        for snr in snrs:
            cfg = cfg0.with_noise_var(settings.noise_for_snr(snr))
            report = crb_pn(cfg, frame, pn_cov, target)
            rows.append((snr, beta, report.crb_velocity, floor_mps))
    header = ("snr_db", "beta_hz", "crb_velocity_mps2", "floor_mps")
    return header, rows


def scenario_dpd_sweep(settings: Settings, seed: int) -> tuple:
    """Monte-Carlo range-CRB overhead versus template error NMSE."""
    cfg = settings.system(settings.noise_for_snr(settings.dpd_snr_db))
    target = settings.target()
    mc = settings.mc(n_trials=settings.dpd_trials, seed=seed)
    table = dpd_overhead_sweep(cfg, settings.rapp(settings.dpd_ibo_db),
                               settings.dpd_nmse_list_db, target, mc)
    rows = [(r["nmse_db"], r["mse_delay_s2"], r["crb_delay_s2"], r["overhead_db"],
             r["n_trials"], r["outlier_count"]) for r in table]
    header = ("nmse_db", "mse_delay_s2", "crb_delay_s2", "overhead_db",
              "n_trials", "outlier_count")
    return header, rows


def scenario_design_map(settings: Settings, seed: int) -> tuple:
    """Joint back-off x linewidth map of velocity bound and communication rate."""
    snr = settings.design_snr_db
    cfg = settings.system(settings.noise_for_snr(snr))
    comm = settings.comm(settings.noise_for_snr(snr))
    frame = generate_frame(cfg, seed)
    target = settings.target()
    ibos = settings.snr_sweep(settings.design_ibo_start_db,
                              settings.design_ibo_stop_db,
                              settings.design_ibo_step_db)
    betas = np.geomspace(settings.design_beta_min_hz, settings.design_beta_max_hz,
                         settings.design_beta_points)
    covs = [build_cpe_covariance(settings.phase_noise(b), cfg.n_symbols)
            for b in betas]
    rows = []
    for ibo in ibos:
        pa_out = apply_pa_frame(frame, settings.rapp(ibo))
        bus = _bussgang_for(settings, ibo, seed)
        link_rate = rate(sinr_pa(comm, bus, cfg.symbol_energy))
        for beta, pn_cov in zip(betas, covs):
            report = crb_joint(cfg, pa_out, pn_cov, target)
            rows.append((ibo, float(beta), snr, report.crb_velocity,
                         np.sqrt(report.crb_velocity), link_rate))
    header = ("ibo_db", "beta_hz", "snr_db", "crb_velocity_mps2", "velocity_mps",
              "rate_bps_hz")
    return header, rows


def scenario_pareto(settings: Settings, seed: int) -> tuple:
    """Rate / sensing trade-off traced by back-off, physics vs kappa bounds."""
    cfg0 = settings.system()
    frame = generate_frame(cfg0, seed)
    target = settings.target()
    ibos = settings.snr_sweep(settings.pareto_ibo_start_db,
                              settings.pareto_ibo_stop_db,
                              settings.pareto_ibo_step_db)
    per_ibo = [(ibo, apply_pa_frame(frame, settings.rapp(ibo)),
                _bussgang_for(settings, ibo, seed)) for ibo in ibos]
    rows = []
    for snr in settings.pareto_snr_list_db:
        noise = settings.noise_for_snr(snr)
        cfg = cfg0.with_noise_var(noise)
        comm = settings.comm(noise)
        for ibo, pa_out, bus in per_ibo:
            link_rate = rate(sinr_pa(comm, bus, cfg.symbol_energy))
            pa_rep = crb_pa(cfg, pa_out, target)
            kappa_rep = crb_kappa(cfg, bus, frame, target)
            rows.append((snr, ibo, link_rate, pa_rep.crb_delay,
                         kappa_rep.crb_delay,
                         overestimation_ratio(kappa_rep, pa_rep)))
    header = ("snr_db", "ibo_db", "rate_bps_hz", "crb_pa_delay_s2",
              "crb_kappa_delay_s2", "gap_db")
    return header, rows


def scenario_asymmetry(settings: Settings, seed: int) -> tuple:
    """Per-impairment degradations of both services across SNR.

    PA degrades sensing through the delay-moment loss and communication
    through the Bussgang SINR loss; phase noise degrades sensing through the
    Doppler bound inflation at the joint operating point and communication
    through the pilot-residual loss (zero when the linewidth is zero). The
    ratio columns are 10^((sens - comm)/10) per impairment.
    """
    cfg0 = settings.system()
    frame = generate_frame(cfg0, seed)
    target = settings.target()
    pa_params = settings.rapp()
    pa_out = apply_pa_frame(frame, pa_params)
    bus = _bussgang_for(settings, settings.ibo_db, seed)
    pa_sens_db, _ = pa_degradation_db(frame, pa_out)
    beta = settings.linewidth_hz
    pn_cov = (build_cpe_covariance(settings.phase_noise(beta), cfg0.n_symbols)
              if beta > 0 else None)
    snrs = settings.snr_sweep(settings.snr_start_db, settings.snr_stop_db,
                              settings.snr_step_db)
    rows = []
    for snr in snrs:
        noise = settings.noise_for_snr(snr)
        cfg = cfg0.with_noise_var(noise)
        pa_comm_db = pa_comm_degradation_db(settings.comm(noise), bus,
                                            cfg.symbol_energy)
        if pn_cov is not None:
            joint = crb_joint(cfg, pa_out, pn_cov, target)
            pa_rep = crb_pa(cfg, pa_out, target)
            pn_sens_db = 10.0 * np.log10(joint.crb_doppler / pa_rep.crb_doppler)
            pn_comm_db = pn_sinr_loss_db(settings.comm(noise))
        else:
            pn_sens_db = 0.0
            pn_comm_db = 0.0
        rows.append((snr, pa_comm_db, pa_sens_db, pn_sens_db, pn_comm_db,
                     10.0 ** ((pa_sens_db - pa_comm_db) / 10.0),
                     10.0 ** ((pn_sens_db - pn_comm_db) / 10.0)))
    header = ("snr_db", "pa_comm_db", "pa_sens_db", "pn_sens_db", "pn_comm_db",
              "pa_ratio", "pn_ratio")
    return header, rows


def scenario_mc_validate(settings: Settings, seed: int) -> tuple:
    """Monte-Carlo MSE against the analytical bounds across SNR.

    mc_model selects the run: 'pa' (grid-search ML against the PA bounds) or
    'pn' (CPE-aware estimation against the phase-noise Doppler bound).
    """
    if settings.mc_model not in ("pa", "pn"):
        raise ConfigurationError(f"mc_model must be 'pa' or 'pn', got {settings.mc_model!r}")
    with_pn = settings.mc_model == "pn"
    n_trials = settings.pn_trials if with_pn else settings.mc_trials
    pn_params = settings.phase_noise() if with_pn else None
    target = settings.target()
    pa_params = settings.rapp()
    rows = []
    for snr in settings.mc_snr_list_db:
        cfg = settings.system(settings.noise_for_snr(snr))
        mc = settings.mc(n_trials=n_trials, seed=seed)
        result = run_mc_mse(cfg, pa_params, pn_params, target, mc)
        frame = generate_frame(cfg, mc.seed)
        pa_out = apply_pa_frame(frame, pa_params)
        if with_pn:
            pn_cov = build_cpe_covariance(pn_params, cfg.n_symbols)
            reference = crb_joint(cfg, pa_out, pn_cov, target)
            _, floor_mps = crb_pn_floor(cfg, pn_cov)
        else:
            reference = crb_pa(cfg, pa_out, target)
            floor_mps = 0.0
        rows.append((
            snr, result.mse_delay, reference.crb_delay,
            10.0 * np.log10(result.mse_delay / reference.crb_delay),
            result.mse_doppler, reference.crb_doppler,
            10.0 * np.log10(result.mse_doppler / reference.crb_doppler),
            np.sqrt(result.mse_velocity), floor_mps,
            result.n_trials, result.outlier_count,
        ))
    header = ("snr_db", "mse_delay_s2", "crb_delay_s2", "ratio_delay_db",
              "mse_doppler_hz2", "crb_doppler_hz2", "ratio_doppler_db",
              "rmse_velocity_mps", "floor_mps", "n_trials", "outlier_count")
    return header, rows


SCENARIOS = {
    "pa-overestimation": scenario_pa_overestimation,
    "pa-vs-ibo": scenario_pa_vs_ibo,
    "pn-floor": scenario_pn_floor,
    "dpd-sweep": scenario_dpd_sweep,
    "design-map": scenario_design_map,
    "pareto": scenario_pareto,
    "asymmetry": scenario_asymmetry,
    "mc-validate": scenario_mc_validate,
}

SCENARIO_COLUMNS = {
    "pa-overestimation": ("snr_db", "ibo_db", "crb_pa_delay_s2",
                          "crb_kappa_delay_s2", "overest_db",
                          "moment_factor_db", "noise_factor_db"),
    "pa-vs-ibo": ("ibo_db", "snr_db", "delta_sens_delay_db",
                  "delta_sens_doppler_db", "overest_db"),
    "pn-floor": ("snr_db", "beta_hz", "crb_velocity_mps2", "floor_mps"),
    "dpd-sweep": ("nmse_db", "mse_delay_s2", "crb_delay_s2", "overhead_db",
                  "n_trials", "outlier_count"),
    "design-map": ("ibo_db", "beta_hz", "snr_db", "crb_velocity_mps2",
                   "velocity_mps", "rate_bps_hz"),
    "pareto": ("snr_db", "ibo_db", "rate_bps_hz", "crb_pa_delay_s2",
               "crb_kappa_delay_s2", "gap_db"),
    "asymmetry": ("snr_db", "pa_comm_db", "pa_sens_db", "pn_sens_db",
                  "pn_comm_db", "pa_ratio", "pn_ratio"),
    "mc-validate": ("snr_db", "mse_delay_s2", "crb_delay_s2", "ratio_delay_db",
                    "mse_doppler_hz2", "crb_doppler_hz2", "ratio_doppler_db",
                    "rmse_velocity_mps", "floor_mps", "n_trials", "outlier_count"),
}


def build_table(spec: ScenarioSpec, settings: Settings) -> CsvTable:
    """Run the scenario described by spec on top of the given settings."""
    if spec.name not in SCENARIOS:
        raise ConfigurationError(f"unknown scenario {spec.name!r}")
    settings = apply_overrides(settings, spec.overrides)
    header, rows = SCENARIOS[spec.name](settings, spec.seed)
    assert header == SCENARIO_COLUMNS[spec.name]
    return CsvTable(header=header, rows=rows, provenance=_provenance(spec))


def run_scenario(spec: ScenarioSpec, settings: Settings | None = None) -> CsvTable:
    """Run a scenario and write its CSV to spec.output_path (if set)."""
    table = build_table(spec, settings if settings is not None else Settings())
    if spec.output_path:
        table.write(spec.output_path)
    return table
