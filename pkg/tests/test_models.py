"""Spike priors, noise matrices, spiked observations, RNG substreams."""

import math

import numpy as np
import pytest

from spiked_detect.models import (
    DataMatrix,
    Spike,
    SpikedModelConfig,
    add_spike,
    sample_iid,
    sample_noise,
    sample_spike,
    sample_wigner,
    substream,
)


class TestSpike:
    def test_rademacher_entries(self, rng):
        spike = sample_spike("rademacher", 4, rng)
        assert set(np.round(np.abs(spike.entries), 12)) == {0.5}

    def test_rademacher_squares(self, rng):
        N = 17
        spike = sample_spike("rademacher", N, rng)
        np.testing.assert_allclose(spike.entries**2, 1.0 / N, rtol=1e-12)

    def test_spherical_norm(self, rng):
        spike = sample_spike("spherical", 64, rng)
        assert abs(np.linalg.norm(spike.entries) - 1.0) < 1e-12

    def test_unknown_prior(self, rng):
        with pytest.raises(ValueError):
            sample_spike("cauchy", 4, rng)


class TestWigner:
    def test_symmetry(self, sech, rng):
        cfg = SpikedModelConfig(N=8, lam=0.0, off_density=sech)
        M = sample_wigner(cfg, rng)
        assert M.symmetric
        np.testing.assert_array_equal(M.values, M.values.T)

    def test_offdiag_variance(self, sech, rng):
        # variance of sqrt(N) * entry should be 1
        cfg = SpikedModelConfig(N=64, lam=0.0, off_density=sech)
        draws = []
        for _ in range(60):
            M = sample_wigner(cfg, rng)
            iu = np.triu_indices(64, k=1)
            draws.append(math.sqrt(64) * M.values[iu])
        x = np.concatenate(draws)
        se = np.sqrt((x**2).var() / len(x))
        assert abs(x.var() - 1.0) < 4 * se

    def test_diagonal_variance_scaling(self, gaussian, rng):
        cfg = SpikedModelConfig(N=32, lam=0.0, off_density=gaussian, w2=4.0)
        diags = np.concatenate(
            [np.diag(sample_wigner(cfg, rng).values) for _ in range(600)]
        )
        v = (math.sqrt(32) * diags).var()
        assert abs(v - 4.0) < 0.3

    def test_bulk_edge_near_two(self, gaussian, rng):
        cfg = SpikedModelConfig(N=1000, lam=0.0, off_density=gaussian)
        M = sample_wigner(cfg, rng)
        top = np.linalg.eigvalsh(M.values)[-1]
        assert abs(top - 2.0) < 0.15


class TestIid:
    def test_asymmetric(self, sech, rng):
        cfg = SpikedModelConfig(N=6, lam=0.0, kind="iid", off_density=sech)
        Y = sample_iid(cfg, rng)
        assert not Y.symmetric
        assert not np.array_equal(Y.values, Y.values.T)

    def test_entry_moments(self, sech, rng):
        cfg = SpikedModelConfig(N=100, lam=0.0, kind="iid", off_density=sech)
        x = np.concatenate(
            [math.sqrt(100) * sample_iid(cfg, rng).values.ravel() for _ in range(10)]
        )
        assert abs(x.mean()) < 4 * x.std() / math.sqrt(len(x))
        se = np.sqrt((x**2).var() / len(x))
        assert abs(x.var() - 1.0) < 4 * se

    def test_kind_mismatch(self, sech, rng):
        cfg = SpikedModelConfig(N=4, lam=0.0, kind="iid", off_density=sech)
        with pytest.raises(ValueError):
            sample_wigner(cfg, rng)
        cfg2 = SpikedModelConfig(N=4, lam=0.0, kind="wigner", off_density=sech)
        with pytest.raises(ValueError):
            sample_iid(cfg2, rng)


class TestAddSpike:
    def test_lambda_zero_identity(self, rng):
        noise = DataMatrix(rng.standard_normal((5, 5)), symmetric=False)
        spike = sample_spike("spherical", 5, rng)
        out = add_spike(noise, 0.0, spike)
        np.testing.assert_array_equal(out.values, noise.values)

    def test_rank_one_outer_product(self):
        noise = DataMatrix(np.zeros((2, 2)), symmetric=True)
        spike = Spike(np.array([1.0, 1.0]) / math.sqrt(2))
        out = add_spike(noise, 1.0, spike)
        np.testing.assert_allclose(out.values, 0.5 * np.ones((2, 2)), atol=1e-15)

    def test_rademacher_diagonal(self, rng):
        N = 8
        noise = DataMatrix(np.zeros((N, N)), symmetric=True)
        spike = sample_spike("rademacher", N, rng)
        out = add_spike(noise, 4.0, spike)
        np.testing.assert_allclose(np.diag(out.values), 2.0 / N, rtol=1e-12)

    def test_negative_lambda_rejected(self, rng):
        noise = DataMatrix(np.zeros((3, 3)), symmetric=True)
        with pytest.raises(ValueError):
            add_spike(noise, -0.1, sample_spike("rademacher", 3, rng))

    def test_dim_mismatch_rejected(self, rng):
        noise = DataMatrix(np.zeros((3, 3)), symmetric=True)
        with pytest.raises(ValueError):
            add_spike(noise, 0.1, sample_spike("rademacher", 4, rng))

    def test_spike_difference_is_rank_one(self, sech, rng):
        cfg = SpikedModelConfig(N=10, lam=0.0, off_density=sech)
        noise = sample_wigner(cfg, rng)
        spike = sample_spike("rademacher", 10, rng)
        lam = 0.7
        diff = add_spike(noise, lam, spike).values - noise.values
        s = np.linalg.svd(diff, compute_uv=False)
        # the added term is sqrt(lam) * x x^T with ||x|| = 1
        assert s[0] == pytest.approx(math.sqrt(lam), rel=1e-10)
        assert s[1] < 1e-12


class TestSubstreams:
    def test_same_path_same_stream(self):
        a = substream(99, 1, 2).standard_normal(8)
        b = substream(99, 1, 2).standard_normal(8)
        np.testing.assert_array_equal(a, b)

    def test_different_paths_differ(self):
        a = substream(99, 1, 2).standard_normal(8)
        b = substream(99, 1, 3).standard_normal(8)
        c = substream(98, 1, 2).standard_normal(8)
        assert not np.array_equal(a, b)
        assert not np.array_equal(a, c)


class TestConfigValidation:
    def test_bad_sizes(self, sech):
        with pytest.raises(ValueError):
            SpikedModelConfig(N=0, lam=0.0, off_density=sech)
        with pytest.raises(ValueError):
            SpikedModelConfig(N=4, lam=-1.0, off_density=sech)

    def test_diag_defaults_to_off(self, sech):
        cfg = SpikedModelConfig(N=4, lam=0.0, off_density=sech)
        assert cfg.diag_density is sech

    def test_sample_noise_dispatch(self, sech, rng):
        wig = SpikedModelConfig(N=4, lam=0.0, kind="wigner", off_density=sech)
        iid = SpikedModelConfig(N=4, lam=0.0, kind="iid", off_density=sech)
        assert sample_noise(wig, rng).symmetric
        assert not sample_noise(iid, rng).symmetric
