"""Render isac-hwi scenario CSVs into static figures.

Presentation only: every plotted point comes 1:1 from a CSV row (no
smoothing, subsampling or fitting). The only display conversions are unit
ones — dB columns are already dB in the CSVs, and variance columns in
(m/s)^2 are shown as root values in m/s. Schema mismatches fail before any
drawing, naming the first missing column.
"""

import csv
import math
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


class SchemaError(ValueError):
    """Input CSV does not match the schema the figure kind expects."""


REQUIRED_COLUMNS = {
    "overest-vs-snr": ("snr_db", "ibo_db", "overest_db"),
    "overest-vs-ibo": ("ibo_db", "snr_db", "overest_db"),
    "pn-lcurves": ("snr_db", "beta_hz", "crb_velocity_mps2", "floor_mps"),
    "dpd-overhead": ("nmse_db", "overhead_db"),
    "design-heatmap": ("ibo_db", "beta_hz", "velocity_mps", "rate_bps_hz"),
    "pareto": ("snr_db", "ibo_db", "rate_bps_hz", "crb_pa_delay_s2",
               "crb_kappa_delay_s2"),
    "asymmetry-bars": ("snr_db", "pa_comm_db", "pa_sens_db", "pn_sens_db",
                       "pn_comm_db"),
}

FIGURE_KINDS = tuple(sorted(REQUIRED_COLUMNS))


@dataclass(frozen=True)
class FigureSpec:
    scenario_csv: str
    figure_kind: str
    output_image: str


def load_table(path: str, kind: str) -> dict:
    """Columns of the CSV as float arrays, validated against the kind's schema."""
    if kind not in REQUIRED_COLUMNS:
        raise SchemaError(f"unknown figure kind {kind!r}")
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(line for line in handle if not line.startswith("#"))
        header = reader.fieldnames or ()
        for column in REQUIRED_COLUMNS[kind]:
            if column not in header:
                raise SchemaError(
                    f"{kind}: required column {column!r} missing from {path}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{kind}: no data rows in {path}")
    table = {}
    for column in header:
        try:
            table[column] = np.array([float(row[column]) for row in rows])
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"{kind}: non-numeric cell in column {column!r}") from exc
    return table


def _series(table: dict, key: str):
    for value in sorted(set(table[key])):
        yield value, table[key] == value


def _draw_overest_vs_snr(ax, table):
    for ibo, sel in _series(table, "ibo_db"):
        ax.plot(table["snr_db"][sel], table["overest_db"][sel],
                marker="o", ms=3, label=f"IBO {ibo:g} dB")
    ax.set_xlabel("sensing SNR (dB)")
    ax.set_ylabel("aggregate-model overestimation (dB)")
    ax.legend()


def _draw_overest_vs_ibo(ax, table):
    for snr, sel in _series(table, "snr_db"):
        ax.plot(table["ibo_db"][sel], table["overest_db"][sel],
                marker="o", ms=3, label=f"SNR {snr:g} dB")
    ax.set_xlabel("input back-off (dB)")
    ax.set_ylabel("aggregate-model overestimation (dB)")
    ax.legend()


def _draw_pn_lcurves(ax, table):
    for beta, sel in _series(table, "beta_hz"):
        velocity = np.sqrt(table["crb_velocity_mps2"][sel])
        if beta == 0:
            ax.plot(table["snr_db"][sel], velocity, "k--", label="ideal")
            continue
        line, = ax.plot(table["snr_db"][sel], velocity, marker="o", ms=3,
                        label=f"{beta:g} Hz")
        floor = table["floor_mps"][sel][0]
        if floor > 0:
            ax.axhline(floor, color=line.get_color(), ls=":", lw=0.8)
    ax.set_yscale("log")
    ax.set_xlabel("sensing SNR (dB)")
    ax.set_ylabel("velocity bound (m/s)")
    ax.legend(title="linewidth")


def _draw_dpd_overhead(ax, table):
    order = np.argsort(table["nmse_db"])
    ax.plot(table["nmse_db"][order], table["overhead_db"][order], marker="o")
    ax.set_xlabel("template error NMSE (dB)")
    ax.set_ylabel("range bound overhead (dB)")


def _draw_design_heatmap(ax, table):
    ibos = np.array(sorted(set(table["ibo_db"])))
    betas = np.array(sorted(set(table["beta_hz"])))
    shape = (betas.size, ibos.size)
    velocity = np.full(shape, np.nan)
    link_rate = np.full(shape, np.nan)
    row = {v: i for i, v in enumerate(betas)}
    col = {v: j for j, v in enumerate(ibos)}
    for b, i, v, r in zip(table["beta_hz"], table["ibo_db"],
                          table["velocity_mps"], table["rate_bps_hz"]):
        velocity[row[b], col[i]] = v
        link_rate[row[b], col[i]] = r
    if np.isnan(velocity).any():
        raise SchemaError("design-heatmap: back-off x linewidth grid is not full")
    mesh = ax.pcolormesh(ibos, betas, velocity, shading="nearest")
    ax.contour(ibos, betas, velocity, colors="white", linewidths=1.0)
    ax.contour(ibos, betas, link_rate, colors="tab:blue", linestyles="--",
               linewidths=1.0)
    ax.set_yscale("log")
    ax.set_xlabel("input back-off (dB)")
    ax.set_ylabel("oscillator linewidth (Hz)")
    plt.colorbar(mesh, ax=ax, label="velocity bound (m/s)")


def _draw_pareto(ax, table):
    for snr, sel in _series(table, "snr_db"):
        order = np.argsort(table["rate_bps_hz"][sel])
        x = table["rate_bps_hz"][sel][order]
        line, = ax.plot(x, table["crb_pa_delay_s2"][sel][order], marker="o",
                        ms=3, label=f"physics, SNR {snr:g} dB")
        ax.plot(x, table["crb_kappa_delay_s2"][sel][order], ls="--", marker="s",
                ms=3, color=line.get_color(), label=f"aggregate, SNR {snr:g} dB")
    ax.set_yscale("log")
    ax.set_xlabel("rate (bits/s/Hz)")
    ax.set_ylabel("delay bound (s^2)")
    ax.legend(fontsize=8)


def _draw_asymmetry_bars(ax, table):
    columns = ("pa_comm_db", "pa_sens_db", "pn_sens_db", "pn_comm_db")
    labels = ("PA on comm", "PA on sensing", "PN on sensing", "PN on comm")
    snr = table["snr_db"]
    width = (snr.max() - snr.min() + 1) / snr.size / (len(columns) + 1)
    for pos, (column, label) in enumerate(zip(columns, labels)):
        ax.bar(snr + (pos - 1.5) * width, table[column], width=width, label=label)
    ax.set_yscale("log")
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("degradation (dB)")
    ax.legend(fontsize=8)


_DRAWERS = {
    "overest-vs-snr": _draw_overest_vs_snr,
    "overest-vs-ibo": _draw_overest_vs_ibo,
    "pn-lcurves": _draw_pn_lcurves,
    "dpd-overhead": _draw_dpd_overhead,
    "design-heatmap": _draw_design_heatmap,
    "pareto": _draw_pareto,
    "asymmetry-bars": _draw_asymmetry_bars,
}


def render(spec: FigureSpec):
    """Draw the figure for spec and write it to spec.output_image.

    Returns the matplotlib Figure (callers that only want the file may close
    it immediately).
    """
    table = load_table(spec.scenario_csv, spec.figure_kind)
    fig, ax = plt.subplots(figsize=(6.4, 4.2), constrained_layout=True)
    _DRAWERS[spec.figure_kind](ax, table)
    ax.set_title(spec.figure_kind)
    fig.savefig(spec.output_image, dpi=150)
    return fig
