import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isac_hwi import (CpeCovariance, PnParams, SingularCovarianceError,
                      apply_cpe, build_cpe_covariance, cpe_quadratic_form,
                      sample_cpe)

T_REF = 8.9e-6


def min_matrix(m):
    steps = np.arange(1, m + 1, dtype=float)
    return np.minimum.outer(steps, steps)


def quadratic_form_closed(cov: CpeCovariance) -> float:
    """Independent oracle: (v_1^2 + sum of squared increments of v) / sigma_inc^2.

    Valid for the random-walk (min-structure) covariance only.
    """
    v = cov.m_prime
    return (v[0] ** 2 + np.sum(np.diff(v) ** 2)) / cov.increment_var


class TestPnParams:
    def test_increment_var_arithmetic(self):
        pn = PnParams(linewidth=100.0, symbol_duration=T_REF)
        assert pn.increment_var == pytest.approx(4 * np.pi * 100 * T_REF, rel=1e-15)
        assert pn.increment_var == pytest.approx(1.1184e-2, rel=1e-4)

    def test_validity_warning(self):
        with pytest.warns(UserWarning):
            PnParams(linewidth=1200.0, symbol_duration=T_REF)
        assert PnParams(linewidth=1000.0, symbol_duration=T_REF).cpe_valid

    def test_negative_linewidth_rejected(self):
        with pytest.raises(ValueError):
            PnParams(linewidth=-1.0, symbol_duration=T_REF)


class TestCovariance:
    def test_entries(self):
        m = 14
        cov = build_cpe_covariance(PnParams(100.0, T_REF), m)
        s2 = cov.increment_var
        assert cov.matrix[0, 0] == pytest.approx(s2, rel=1e-15)
        assert cov.matrix[0, m - 1] == pytest.approx(s2, rel=1e-15)
        assert cov.matrix[m - 1, m - 1] == pytest.approx(m * s2, rel=1e-15)
        assert np.array_equal(cov.matrix, cov.matrix.T)

    def test_positive_definite(self):
        cov = build_cpe_covariance(PnParams(100.0, T_REF), 32)
        np.linalg.cholesky(cov.matrix)  # raises if not PD

    def test_cumulative_sum_identity(self):
        # C equals the covariance L L^T of cumulative i.i.d. increments exactly
        m = 14
        cov = build_cpe_covariance(PnParams(100.0, T_REF), m)
        lower = np.tril(np.ones((m, m)))
        assert np.allclose(cov.matrix, cov.increment_var * lower @ lower.T,
                           rtol=0, atol=0)

    def test_zero_linewidth_rejected(self):
        with pytest.raises(SingularCovarianceError):
            build_cpe_covariance(PnParams(0.0, T_REF), 14)


class TestSampling:
    def test_deterministic(self):
        cov = build_cpe_covariance(PnParams(100.0, T_REF), 14)
        assert np.array_equal(sample_cpe(cov, seed=5), sample_cpe(cov, seed=5))
        assert not np.array_equal(sample_cpe(cov, seed=5), sample_cpe(cov, seed=6))

    def test_empirical_covariance(self):
        # MC covariance oracle: entrywise within 3 standard errors at 1e5 draws
        m = 6
        n = 100_000
        cov = build_cpe_covariance(PnParams(100.0, T_REF), m)
        samples = np.stack([sample_cpe(cov, seed=s) for s in range(n)])
        emp = samples.T @ samples / n
        var_entry = (np.outer(np.diag(cov.matrix), np.diag(cov.matrix))
                     + cov.matrix**2)
        se = np.sqrt(var_entry / n)
        assert np.all(np.abs(emp - cov.matrix) < 3.5 * se)

    def test_increment_variance(self):
        cov = build_cpe_covariance(PnParams(100.0, T_REF), 14)
        incs = np.concatenate([np.diff(sample_cpe(cov, seed=s)) for s in range(3000)])
        assert incs.var() == pytest.approx(cov.increment_var, rel=0.1)


class TestQuadraticForm:
    def test_m14_against_dense_inverse(self):
        cov = build_cpe_covariance(PnParams(100.0, T_REF), 14)
        dense = float(cov.m_prime @ np.linalg.inv(cov.matrix) @ cov.m_prime)
        value = cpe_quadratic_form(cov)
        assert value == pytest.approx(dense, rel=1e-10)
        # unit-increment-variance normalization: (-6.5)^2 + 13 = 55.25
        assert value * cov.increment_var == pytest.approx(55.25, rel=1e-10)

    def test_m2_hand_case(self):
        # v = (-0.5, 0.5), unit variance: min-matrix [[1,1],[1,2]],
        # inverse [[2,-1],[-1,1]], quadratic form 1.25 (= 0.25 + 1.0)
        matrix = min_matrix(2)
        cov = CpeCovariance(matrix=matrix, m_prime=np.array([-0.5, 0.5]),
                            increment_var=1.0)
        dense = float(cov.m_prime @ np.linalg.inv(matrix) @ cov.m_prime)
        assert dense == pytest.approx(1.25, rel=1e-14)
        assert cpe_quadratic_form(cov) == pytest.approx(1.25, rel=1e-12)

    def test_scaling_in_increment_var(self):
        a = build_cpe_covariance(PnParams(100.0, T_REF), 14)
        b = build_cpe_covariance(PnParams(200.0, T_REF), 14)
        assert cpe_quadratic_form(a) == pytest.approx(2 * cpe_quadratic_form(b),
                                                      rel=1e-12)

    @pytest.mark.parametrize("m", [3, 8, 14, 32, 64])
    def test_solve_matches_closed_form(self, m):
        cov = build_cpe_covariance(PnParams(137.0, T_REF), m)
        assert cpe_quadratic_form(cov) == pytest.approx(
            quadratic_form_closed(cov), rel=1e-10)

    @settings(max_examples=30, deadline=None)
    @given(beta=st.floats(1.0, 1000.0), m=st.integers(2, 40))
    def test_positive_property(self, beta, m):
        cov = build_cpe_covariance(PnParams(beta, T_REF), m)
        assert cpe_quadratic_form(cov) > 0


class TestApplyCpe:
    def test_identity(self, ref_frame):
        out = apply_cpe(ref_frame.symbols, np.zeros(14))
        assert np.array_equal(out, ref_frame.symbols)

    def test_magnitude_preserved(self, ref_frame, rng):
        theta = rng.standard_normal(14)
        out = apply_cpe(ref_frame.symbols, theta)
        assert np.allclose(np.abs(out), np.abs(ref_frame.symbols), rtol=1e-14)

    def test_pi_negates(self, ref_frame):
        out = apply_cpe(ref_frame.symbols, np.full(14, np.pi))
        assert np.allclose(out, -ref_frame.symbols, atol=1e-12)

    def test_length_mismatch(self, ref_frame):
        with pytest.raises(ValueError):
            apply_cpe(ref_frame.symbols, np.zeros(13))
