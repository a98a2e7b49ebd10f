import numpy as np
import pytest

from isac_hwi import (PnParams, RappParams, Settings, SystemConfig,
                      TargetParams, apply_pa_frame, build_cpe_covariance,
                      crb_pa, dpd_template_perturb, generate_frame,
                      ml_grid_estimate, run_mc_mse, synthesize_echo)
from isac_hwi.mc import GridSpec, McConfig

SETTINGS = Settings()
TARGET = TargetParams()


def mc_config(n_trials=50, seed=0, nmse=None):
    return SETTINGS.mc(n_trials=n_trials, seed=seed, template_nmse_db=nmse)


class TestSynthesizeEcho:
    def test_noiseless_identity(self, ref_cfg, pa_outputs):
        grid = pa_outputs[5].symbols
        target = TargetParams(delay=0.0, doppler=0.0, reflectivity=1.0 + 0j)
        echo = synthesize_echo(ref_cfg, grid, target, noise_var=1e-300, seed=0)
        assert np.allclose(echo, grid, atol=1e-10)

    def test_noise_variance(self, ref_cfg, pa_outputs):
        grid = pa_outputs[5].symbols
        resid = []
        for seed in range(30):  # 30 * 3584 > 1e5 noise draws
            echo = synthesize_echo(ref_cfg, grid, TARGET, seed=seed)
            clean = synthesize_echo(ref_cfg, grid, TARGET, noise_var=1e-300,
                                    seed=seed)
            resid.append(echo - clean)
        var = np.mean(np.abs(np.stack(resid)) ** 2)
        assert var == pytest.approx(ref_cfg.noise_var, rel=0.02)

    def test_per_bin_energy(self, ref_cfg, pa_outputs):
        grid = pa_outputs[5].symbols
        echoes = np.stack([synthesize_echo(ref_cfg, grid, TARGET, seed=s)
                           for s in range(60)])
        mean_energy = np.mean(np.abs(echoes) ** 2, axis=0)
        expected = np.abs(grid) ** 2 + ref_cfg.noise_var
        assert np.mean(mean_energy / expected) == pytest.approx(1.0, abs=0.01)

    def test_deterministic(self, ref_cfg, pa_outputs):
        grid = pa_outputs[5].symbols
        a = synthesize_echo(ref_cfg, grid, TARGET, seed=9)
        b = synthesize_echo(ref_cfg, grid, TARGET, seed=9)
        assert np.array_equal(a, b)


class TestMlGridEstimate:
    def test_noiseless_on_grid_recovery(self, ref_cfg, pa_outputs):
        grid = pa_outputs[5].symbols
        mc = mc_config()
        # truth exactly on the coarse grid so no quantization enters
        tau_true = 11 * mc.tau_grid.spacing
        nu_true = -7 * mc.nu_grid.spacing
        alpha = 0.8 * np.exp(0.3j)
        target = TargetParams(delay=tau_true, doppler=nu_true, reflectivity=alpha)
        echo = synthesize_echo(ref_cfg, grid, target, noise_var=1e-300, seed=0)
        tau_hat, nu_hat, alpha_hat = ml_grid_estimate(ref_cfg, echo, grid, mc)
        assert tau_hat == pytest.approx(tau_true, abs=1e-10 * mc.tau_grid.spacing + 1e-18)
        assert nu_hat == pytest.approx(nu_true, abs=1e-8)
        assert abs(alpha_hat - alpha) < 1e-9

    def test_template_energy_guard(self, ref_cfg, pa_outputs):
        with pytest.raises(ValueError):
            ml_grid_estimate(ref_cfg, pa_outputs[5].symbols,
                             np.zeros_like(pa_outputs[5].symbols), mc_config())

    def test_shape_guard(self, ref_cfg, pa_outputs):
        with pytest.raises(ValueError):
            ml_grid_estimate(ref_cfg, pa_outputs[5].symbols[:, :5],
                             pa_outputs[5].symbols, mc_config())

    def test_mismatched_template_penalty(self, ref_cfg, ref_frame, pa_outputs):
        # estimating with the undistorted grid while the echo carries the PA
        # output must cost a visible MSE excess over the matched bound
        grid = pa_outputs[5].symbols
        mc = mc_config(n_trials=120, seed=5)
        errs_matched, errs_mismatched = [], []
        for trial in range(mc.n_trials):
            echo = synthesize_echo(ref_cfg, grid, TARGET, seed=mc.seed + trial)
            t_m, _, _ = ml_grid_estimate(ref_cfg, echo, grid, mc)
            t_x, _, _ = ml_grid_estimate(ref_cfg, echo, ref_frame.symbols, mc)
            errs_matched.append(t_m - TARGET.delay)
            errs_mismatched.append(t_x - TARGET.delay)
        mse_matched = np.mean(np.square(errs_matched))
        mse_mismatched = np.mean(np.square(errs_mismatched))
        assert mse_mismatched > 1.3 * mse_matched


class TestDpdPerturb:
    def test_perfect_template(self, pa_outputs):
        grid = pa_outputs[5].symbols
        assert np.array_equal(dpd_template_perturb(grid, None, seed=0), grid)

    def test_realized_nmse(self, pa_outputs):
        grid = pa_outputs[5].symbols
        for nmse_db in (-25.0, -30.0):
            perturbed = dpd_template_perturb(grid, nmse_db, seed=3)
            realized = (np.sum(np.abs(perturbed - grid) ** 2)
                        / np.sum(np.abs(grid) ** 2))
            assert realized == pytest.approx(10 ** (nmse_db / 10), rel=0.01)

    def test_independent_across_seeds(self, pa_outputs):
        grid = pa_outputs[5].symbols
        e1 = dpd_template_perturb(grid, -25.0, seed=1) - grid
        e2 = dpd_template_perturb(grid, -25.0, seed=2) - grid
        rho = np.abs(np.vdot(e1, e2)) / (np.linalg.norm(e1) * np.linalg.norm(e2))
        assert rho < 3 / np.sqrt(grid.size)

    def test_positive_nmse_rejected(self, pa_outputs):
        with pytest.raises(ValueError):
            dpd_template_perturb(pa_outputs[5].symbols, 1.0, seed=0)


class TestRunMcMse:
    def test_deterministic(self, ref_cfg):
        mc = mc_config(n_trials=12, seed=3)
        a = run_mc_mse(ref_cfg, RappParams(5.0), None, TARGET, mc)
        b = run_mc_mse(ref_cfg, RappParams(5.0), None, TARGET, mc)
        assert a == b

    def test_pa_efficiency_window(self, ref_cfg):
        # ML is asymptotically efficient: MSE/CRB in [-1 dB, +1.5 dB] window
        for snr_db in (10.0, 30.0):
            cfg = SETTINGS.system(SETTINGS.noise_for_snr(snr_db))
            result = run_mc_mse(cfg, RappParams(5.0), None, TARGET,
                                mc_config(n_trials=400, seed=11))
            assert 10 ** (-0.1) <= 10 ** (result.crb_ratio_db / 10) <= 10 ** 0.15
            assert result.outlier_count == 0

    def test_unbiased_at_high_snr(self, ref_cfg):
        # 0.1 * RMSE is ~2.4 sigma for the sample mean at this trial count
        cfg = SETTINGS.system(SETTINGS.noise_for_snr(20.0))
        mc = mc_config(n_trials=600, seed=21)
        frame = generate_frame(cfg, mc.seed)
        grid = apply_pa_frame(frame, RappParams(5.0)).symbols
        errs = []
        for trial in range(mc.n_trials):
            echo = synthesize_echo(cfg, grid, TARGET, seed=mc.seed + trial)
            tau_hat, _, _ = ml_grid_estimate(cfg, echo, grid, mc)
            errs.append(tau_hat - TARGET.delay)
        errs = np.asarray(errs)
        assert abs(errs.mean()) < 0.1 * np.sqrt(np.mean(errs**2))

    def test_pn_mode_tracks_bound(self, ref_cfg):
        # smoke-level check; the acceptance suite runs the full 800 trials
        cfg = SETTINGS.system(SETTINGS.noise_for_snr(30.0))
        result = run_mc_mse(cfg, RappParams(5.0), PnParams(100.0, cfg.symbol_duration),
                            TARGET, mc_config(n_trials=150, seed=2))
        assert abs(result.crb_ratio_db) < 1.0

    def test_trial_count_halves_spread(self, ref_cfg):
        # convergence sanity: more trials -> ratio closer to its mean
        cfg = SETTINGS.system(SETTINGS.noise_for_snr(20.0))
        small = [run_mc_mse(cfg, RappParams(5.0), None, TARGET,
                            mc_config(n_trials=40, seed=s)).crb_ratio_db
                 for s in range(6)]
        large = [run_mc_mse(cfg, RappParams(5.0), None, TARGET,
                            mc_config(n_trials=160, seed=s)).crb_ratio_db
                 for s in range(6)]
        assert np.std(large) < np.std(small)

    def test_outliers_reported_not_dropped(self):
        # threshold regime: weak echo makes sidelobe jumps likely
        cfg = SystemConfig(n_subcarriers=32, n_symbols=4, qam_order=4,
                           noise_var=10 ** 2.2)
        tau_grid = GridSpec(0.0, 1 / cfg.subcarrier_spacing, 128, 2)
        nu_grid = GridSpec(-0.5 / cfg.symbol_duration, 0.5 / cfg.symbol_duration,
                           16, 2)
        mc = McConfig(n_trials=40, tau_grid=tau_grid, nu_grid=nu_grid, seed=0)
        result = run_mc_mse(cfg, RappParams(60.0), None,
                            TargetParams(delay=2e-6, doppler=500.0), mc)
        assert result.outlier_count > 0
        # outliers dominate the average instead of being trimmed away
        assert result.mse_delay > (10 * mc.tau_grid.spacing) ** 2 / mc.n_trials
