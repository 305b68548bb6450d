"""Spectral-statistics detector for sech noise."""

import math

import numpy as np
import pytest

from spiked_detect.lss import (
    LssIndeterminateError,
    lss_decide,
    lss_statistic,
    pretransform_sech,
)
from spiked_detect.models import DataMatrix, SpikedModelConfig, sample_wigner, substream
from spiked_detect.theory import DomainError, lss_threshold_sech

LSS_THRESH_03 = 0.410842264681496206431178135882


def _sym(values):
    return DataMatrix(np.asarray(values, dtype=float), symmetric=True)


class TestPretransform:
    def test_zero_fixed_point(self):
        out = pretransform_sech(_sym(np.zeros((4, 4))))
        np.testing.assert_array_equal(out.values, 0.0)
        assert out.symmetric

    def test_saturation(self):
        N = 3
        out = pretransform_sech(_sym(1e9 * np.ones((N, N))))
        np.testing.assert_allclose(out.values, math.sqrt(2.0 / N), rtol=1e-12)

    def test_entrywise_formula(self, rng):
        N = 5
        M = _sym((lambda a: a + a.T)(rng.standard_normal((N, N))))
        out = pretransform_sech(M)
        want = math.sqrt(2.0 / N) * np.tanh(0.5 * math.pi * math.sqrt(N) * M.values)
        np.testing.assert_allclose(out.values, want, rtol=1e-14)

    def test_requires_symmetric(self, rng):
        with pytest.raises(ValueError):
            pretransform_sech(DataMatrix(rng.standard_normal((3, 3)), symmetric=False))

    def test_null_bulk_edge(self, sech):
        # null entries of the transformed matrix have variance 1/N (the
        # tanh squashes the unit-variance entry to second moment 1/2), so
        # its spectrum fills [-2, 2]
        N = 1000
        cfg = SpikedModelConfig(N=N, lam=0.0, off_density=sech)
        M = sample_wigner(cfg, substream(42, 0))
        eigs = np.linalg.eigvalsh(pretransform_sech(M).values)
        assert 1.9 <= eigs[-1] <= 2.1
        assert -2.1 <= eigs[0] <= -1.9


class TestStatistic:
    def test_zero_matrix(self):
        # log det of a scalar matrix; the aN/2 centring and the
        # (a/2)(Tr Mt^2 - N) term cancel exactly at Mt = 0
        N, omega = 6, 0.3
        a = math.pi**2 * omega / 8.0
        want = -N * math.log1p(a)
        got = lss_statistic(_sym(np.zeros((N, N))), omega)
        assert got == pytest.approx(want, abs=1e-12)

    def test_omega_zero(self, rng):
        A = rng.standard_normal((5, 5))
        assert lss_statistic(_sym(A + A.T), 0.0) == pytest.approx(0.0, abs=1e-12)

    def test_permutation_invariance(self, sech, rng):
        cfg = SpikedModelConfig(N=16, lam=0.0, off_density=sech)
        Mt = pretransform_sech(sample_wigner(cfg, rng))
        perm = rng.permutation(16)
        permuted = _sym(Mt.values[np.ix_(perm, perm)])
        assert lss_statistic(permuted, 0.3) == pytest.approx(
            lss_statistic(Mt, 0.3), abs=1e-10
        )

    def test_indeterminate_on_large_eigenvalue(self):
        with pytest.raises(LssIndeterminateError) as exc:
            lss_statistic(_sym(10.0 * np.eye(4)), 0.3)
        assert exc.value.shift <= 0.0

    def test_domain_error(self, rng):
        A = rng.standard_normal((4, 4))
        with pytest.raises(DomainError):
            lss_statistic(_sym(A + A.T), 1.0)


class TestDecision:
    def test_boundary_inclusive(self):
        thr = lss_threshold_sech(0.3)
        assert lss_decide(thr, 0.3).decision == "accept_H0"
        assert lss_decide(thr + 1.0, 0.3).decision == "reject_H0"

    def test_threshold_frozen_value(self):
        assert lss_decide(0.0, 0.3).threshold == pytest.approx(LSS_THRESH_03, abs=1e-12)

    def test_fields(self):
        out = lss_decide(0.1, 0.3)
        assert out.value == 0.1
        assert out.omega == 0.3


class TestNullBehaviour:
    def test_null_statistic_concentrates_below_threshold(self, sech):
        # under the null the statistic should sit near its limiting centre,
        # well below the acceptance threshold on average
        N, omega, reps = 32, 0.3, 100
        cfg = SpikedModelConfig(N=N, lam=0.0, off_density=sech)
        vals = []
        for rep in range(reps):
            M = sample_wigner(cfg, substream(7, rep))
            try:
                vals.append(lss_statistic(pretransform_sech(M), omega))
            except LssIndeterminateError:
                pass
        vals = np.array(vals)
        assert len(vals) > 90
        assert vals.mean() < lss_threshold_sech(omega)
