import numpy as np
import pytest

from mcpsd import NyquistSignal, ProcessSpec, generate, metrics, true_psd, welch_subbands
from mcpsd.experiment import MA_LINES, NOTCHED, SPARSE_MULTIBAND
from mcpsd.reference import expected_welch_subbands
from mcpsd.synth import sparse_support


def test_white_flat():
    est = welch_subbands(generate(ProcessSpec.white(), 10**6, seed=0), 64)
    np.testing.assert_allclose(est.values, 1 / 64, rtol=0.05)
    assert est.total_power() == pytest.approx(1.0, rel=0.01)
    assert est.W == 1.0 and est.L == 64


def test_rate_propagates():
    x = NyquistSignal(np.random.default_rng(0).standard_normal(1024), 2e9)
    assert welch_subbands(x, 16).W == 2e9
    assert welch_subbands(x.samples, 16, W=5.0).W == 5.0


@pytest.mark.parametrize("k", [1, 5, 12, 16, -7])
def test_bin_centred_tone(k):
    L = 32
    n = np.arange(L * 200)
    x = 2.0 * np.cos(2 * np.pi * k * n / L + 0.3)
    v = welch_subbands(x, L).values
    m = k if k != -L // 2 else L // 2
    both = v[m + L // 2 - 1] + (v[-m + L // 2 - 1] if m not in (0, L // 2) else 0)
    assert both >= 0.99 * v.sum()
    # Parseval; at k = L/2 the power depends on the phase
    assert v.sum() == pytest.approx(np.mean(x**2), rel=1e-12)


def test_subband_alignment_with_fft_bins():
    # single segment: bin k of the DFT lands in subband m = k (mod L)
    L = 8
    x = np.random.default_rng(1).standard_normal(L)
    X = np.fft.fft(np.concatenate([x, x]).reshape(2, L), axis=1)[0]
    v = welch_subbands(np.concatenate([x, x]), L).values
    for k in range(L):
        m = k if k <= L // 2 else k - L
        assert v[m + L // 2 - 1] == pytest.approx(abs(X[k]) ** 2 / L**2)


def test_fine_bins_sum_into_subbands():
    L, R = 8, 3
    x = np.random.default_rng(2).standard_normal(L * R * 10)
    coarse = welch_subbands(x, L, bins_per_band=R)
    assert coarse.values.sum() == pytest.approx(np.mean(x[: L * R * 10] ** 2), rel=1e-12)
    with pytest.raises(ValueError):
        welch_subbands(x, L, bins_per_band=2)


def test_too_short():
    with pytest.raises(ValueError):
        welch_subbands(np.zeros(63), 32)


def test_expected_welch_matches_monte_carlo():
    for spec, L in [(MA_LINES, 64), (SPARSE_MULTIBAND, 128), (NOTCHED, 64)]:
        exp = expected_welch_subbands(spec, L).values
        est = np.mean([welch_subbands(generate(spec, 10**6, s), L).values for s in range(3)], axis=0)
        big = exp > 1e-3 * exp.max()
        np.testing.assert_allclose(est[big], exp[big], rtol=0.05)
        assert exp.sum() == pytest.approx(spec.total_power(), rel=1e-9)


def test_sparse_multiband_inactive_bands():
    v = np.mean(
        [welch_subbands(generate(SPARSE_MULTIBAND, 10**6, s), 128).values for s in range(3)], axis=0
    )
    support = sparse_support(SPARSE_MULTIBAND, 128)
    assert set(np.argsort(v)[-16:]) == set(support)
    # rectangular-window leakage reaches ~2% in the subbands touching the
    # support; every other inactive subband stays below 1% of the peak
    near = set(support) | set(support - 1) | set(support + 1)
    far = np.array([l for l in range(128) if l not in near])
    assert v[far].max() <= 0.01 * v.max()
    exp = expected_welch_subbands(SPARSE_MULTIBAND, 128).values
    assert exp[far].max() <= 0.01 * exp.max()


@pytest.mark.slow
@pytest.mark.parametrize("spec, L", [(MA_LINES, 64), (SPARSE_MULTIBAND, 128), (NOTCHED, 64),
                                     (ProcessSpec.white(), 64)])
def test_alignment_with_true_psd(spec, L):
    truth = true_psd(spec, L).values
    fine = np.mean([welch_subbands(generate(spec, 10**6, s), L, bins_per_band=1001).values
                    for s in range(10)], axis=0)
    big = truth > 1e-3 * truth.max()
    np.testing.assert_allclose(fine[big], truth[big], rtol=0.05)


def test_alignment_one_bin_per_band_white():
    truth = true_psd(ProcessSpec.white(), 64).values
    est = np.mean([welch_subbands(generate(ProcessSpec.white(), 10**6, s), 64).values
                   for s in range(10)], axis=0)
    np.testing.assert_allclose(est, truth, rtol=0.05)


# -- metrics -------------------------------------------------------------------------


def test_metrics_identity_and_scaling():
    x = np.array([1.0, -2.0, 3.0])
    m = metrics(x, x)
    assert m.nse == 0 and m.max_abs_error == 0 and m.total_power_error == 0
    m2 = metrics(2 * x, x)
    assert m2.nse == pytest.approx(1.0)
    assert m2.max_abs_error == pytest.approx(3.0)
    assert m2.total_power_error == pytest.approx(1.0)


def test_metrics_nonnegative_and_zero_iff_equal():
    rng = np.random.default_rng(0)
    for _ in range(20):
        a, b = rng.standard_normal(16), rng.standard_normal(16)
        m = metrics(a, b)
        assert m.nse > 0 and m.max_abs_error > 0 and m.total_power_error >= 0


def test_metrics_accepts_estimates_and_checks_length():
    est = true_psd(MA_LINES, 16)
    assert metrics(est, est).nse == 0
    with pytest.raises(ValueError):
        metrics(np.zeros(3), np.zeros(4))


def test_metrics_zero_reference():
    assert metrics(np.zeros(4), np.zeros(4)).nse == 0
    assert metrics(np.ones(4), np.zeros(4)).nse == np.inf
