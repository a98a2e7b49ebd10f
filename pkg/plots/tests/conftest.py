import numpy as np
import pytest


def write_csv(path, header, rows, provenance="# test fixture"):
    lines = [provenance, ",".join(header)]
    lines += [",".join(format(v, ".12g") for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return str(path)


@pytest.fixture
def fixture_csvs(tmp_path):
    """Small schema-conformant CSVs for every figure kind."""
    paths = {}
    paths["overest-vs-snr"] = write_csv(
        tmp_path / "overest.csv",
        ("snr_db", "ibo_db", "crb_pa_delay_s2", "crb_kappa_delay_s2",
         "overest_db", "moment_factor_db", "noise_factor_db"),
        [(snr, ibo, 1e-21, 2e-21, 0.3 * snr + ibo, 0.01, 0.3 * snr)
         for ibo in (3.0, 5.0) for snr in (0.0, 10.0, 20.0, 30.0)])
    paths["overest-vs-ibo"] = write_csv(
        tmp_path / "vsibo.csv",
        ("ibo_db", "snr_db", "delta_sens_delay_db", "delta_sens_doppler_db",
         "overest_db"),
        [(ibo, snr, 1.0 / ibo, 0.9 / ibo, 12.0 - ibo + snr / 10)
         for snr in (15.0, 30.0) for ibo in (3.0, 5.0, 7.0, 9.0)])
    paths["pn-lcurves"] = write_csv(
        tmp_path / "pn.csv",
        ("snr_db", "beta_hz", "crb_velocity_mps2", "floor_mps"),
        [(snr, 0.0, 10.0 ** (-snr / 10), 0.0) for snr in (0.0, 10.0, 20.0)]
        + [(snr, beta, 10.0 ** (-snr / 10) + (beta / 100) ** 2, beta / 100)
           for beta in (50.0, 100.0) for snr in (0.0, 10.0, 20.0)])
    paths["dpd-overhead"] = write_csv(
        tmp_path / "dpd.csv",
        ("nmse_db", "mse_delay_s2", "crb_delay_s2", "overhead_db",
         "n_trials", "outlier_count"),
        [(nmse, 1e-21, 1e-21, 10 ** (nmse / 10 + 2.5), 500, 0)
         for nmse in (-35.0, -30.0, -25.0, -20.0)])
    paths["design-heatmap"] = write_csv(
        tmp_path / "design.csv",
        ("ibo_db", "beta_hz", "snr_db", "crb_velocity_mps2", "velocity_mps",
         "rate_bps_hz"),
        [(ibo, beta, 20.0, (beta / 100) ** 2, beta / 100, 8.0 - 10 / ibo)
         for ibo in (2.0, 4.0, 6.0, 8.0) for beta in (10.0, 100.0, 1000.0)])
    paths["pareto"] = write_csv(
        tmp_path / "pareto.csv",
        ("snr_db", "ibo_db", "rate_bps_hz", "crb_pa_delay_s2",
         "crb_kappa_delay_s2", "gap_db"),
        [(snr, ibo, 8.0 - 10 / ibo, 1e-21 * ibo, 3e-21 * ibo, 4.77)
         for snr in (10.0, 30.0) for ibo in (5.0, 7.0, 9.0)])
    paths["asymmetry-bars"] = write_csv(
        tmp_path / "asym.csv",
        ("snr_db", "pa_comm_db", "pa_sens_db", "pn_sens_db", "pn_comm_db",
         "pa_ratio", "pn_ratio"),
        [(snr, 0.1 * snr + 0.4, 0.49, snr + 13.3, 0.134, 0.65, 2050.0)
         for snr in (10.0, 20.0, 30.0)])
    return paths


def all_line_points(fig):
    pts = []
    for ax in fig.axes:
        for line in ax.lines:
            pts.extend(map(tuple, np.asarray(line.get_xydata())))
    return np.asarray(pts) if pts else np.empty((0, 2))


def assert_points_embedded(fig, xs, ys):
    pts = all_line_points(fig)
    assert pts.size, "figure has no line data"
    for x, y in zip(xs, ys):
        hit = np.any(np.isclose(pts[:, 0], x, rtol=1e-9, atol=1e-12)
                     & np.isclose(pts[:, 1], y, rtol=1e-9, atol=1e-12))
        assert hit, f"point ({x}, {y}) not embedded in the figure"
