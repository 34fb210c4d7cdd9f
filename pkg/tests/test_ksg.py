import numpy as np
import pytest

from crossmi import EstimatorConfig, PairedSeries, TripleSeries
from crossmi.estimators import (cross_ksg_cmi, cross_ksg_mi, ksg_cmi, ksg_mi)
from crossmi.estimators import ksg as ksg_module
from crossmi.estimators.ksg import DuplicatePointsError, jitter_offsets
from crossmi.simgen import gen_linear, gen_sinusoidal

from oracles import (HIST_MI_LINEAR, HIST_MI_SINUSOID, RHO_06_MI,
                     naive_cross_ksg)

RAW = EstimatorConfig(noise_amplitude=0.0, normalise=False)


def test_matches_naive_loop_self(normal_pair):
    data = normal_pair(60, 0.7, 2)
    res = ksg_mi(data, RAW)
    expected = naive_cross_ksg(data.joint(), data.joint(), 4, exclude_self=True)
    np.testing.assert_allclose(res.locals, expected, atol=1e-12)


def test_matches_naive_loop_cross(normal_pair):
    test = normal_pair(25, 0.2, 3)
    ref = normal_pair(80, 0.7, 4)
    for k in (1, 3, 6):
        res = cross_ksg_mi(test, ref, RAW.replace(k=k))
        np.testing.assert_allclose(res.locals,
                                   naive_cross_ksg(test.joint(), ref.joint(), k),
                                   atol=1e-12)
    assert res.n_reference == 80 and res.k == 6


def test_normalisation_is_naive_on_standardised_data(normal_pair):
    test = normal_pair(30, 0.2, 5)
    ref = normal_pair(70, 0.7, 6)
    mu = ref.joint().mean(axis=0)
    sd = ref.joint().std(axis=0)
    expected = naive_cross_ksg((test.joint() - mu) / sd, (ref.joint() - mu) / sd, 4)
    res = cross_ksg_mi(test, ref, EstimatorConfig(noise_amplitude=0.0))
    np.testing.assert_allclose(res.locals, expected, atol=1e-12)


def test_identity_with_self_exclusion(normal_pair):
    for seed in range(5):
        data = normal_pair(300, 0.4, seed)
        a = ksg_mi(data)
        b = cross_ksg_mi(data, data, exclude_self=True)
        assert np.array_equal(a.locals, b.locals)


def test_tree_and_brute_force_agree(monkeypatch, normal_pair):
    test = normal_pair(300, 0.3, 7)
    ref = normal_pair(700, 0.6, 8)
    tree = cross_ksg_mi(test, ref)
    self_tree = ksg_mi(ref)
    monkeypatch.setattr(ksg_module, "TREE_MIN_REFERENCE", 10**9)
    np.testing.assert_array_equal(cross_ksg_mi(test, ref).locals, tree.locals)
    np.testing.assert_array_equal(ksg_mi(ref).locals, self_tree.locals)


def test_permutation_invariance(normal_pair):
    data = normal_pair(400, 0.5, 9)
    perm = np.random.default_rng(0).permutation(data.n)
    cfg = EstimatorConfig(noise_amplitude=0.0)
    a = ksg_mi(data, cfg)
    b = ksg_mi(data.take(perm), cfg)
    np.testing.assert_allclose(b.locals, a.locals[perm], atol=1e-12)


def test_jitter_is_keyed_by_index():
    full = jitter_offsets(50, 2, 11)
    np.testing.assert_array_equal(jitter_offsets(20, 2, 11), full[:20])
    assert np.all(np.abs(full) <= 1)
    assert not np.array_equal(full, jitter_offsets(50, 2, 12))


def test_duplicates_need_jitter():
    x = np.repeat([0.0, 1.0, 2.0], 10)
    data = PairedSeries(x, x)
    with pytest.raises(DuplicatePointsError, match="test point 0"):
        ksg_mi(data, RAW)
    assert np.isfinite(ksg_mi(data).mean)


def test_deterministic_per_seed(normal_pair):
    data = normal_pair(200, 0.5, 1)
    assert np.array_equal(ksg_mi(data).locals, ksg_mi(data).locals)


def test_strongly_dependent_exceeds_two_nats():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(2000)
    assert ksg_mi(PairedSeries(x, x + 1e-4 * rng.standard_normal(2000))).mean > 2.0


def test_bivariate_normal_closed_form(normal_pair):
    est = [ksg_mi(normal_pair(5000, 0.6, s)).mean for s in range(3)]
    assert np.mean(est) == pytest.approx(RHO_06_MI, abs=0.03)


def test_against_histogram_oracle():
    est = np.mean([ksg_mi(gen_linear(5000, 0.5, 0.0, 1.0, -4, 4, s)).mean for s in range(4)])
    assert est == pytest.approx(HIST_MI_LINEAR, abs=0.05)
    est = np.mean([ksg_mi(gen_sinusoidal(5000, 1, 1, 0.3, -3, 3, s)).mean for s in range(4)])
    assert est == pytest.approx(HIST_MI_SINUSOID, abs=0.05)


def test_input_validation(normal_pair):
    data = normal_pair(4, 0.5, 1)
    with pytest.raises(ValueError, match="need more than k"):
        ksg_mi(data)
    with pytest.raises(ValueError, match="equal length"):
        cross_ksg_mi(normal_pair(10, 0.5, 1), normal_pair(12, 0.5, 1), exclude_self=True)
    with pytest.raises(ValueError, match="backend"):
        ksg_mi(normal_pair(50, 0.5, 1), EstimatorConfig(backend="Gaussian"))


def test_conditional_mi_examples():
    rng = np.random.default_rng(4)
    z = rng.standard_normal(3000)
    x = z + 0.3 * rng.standard_normal(3000)
    y = z + 0.3 * rng.standard_normal(3000)
    # x and y are dependent only through z
    assert ksg_mi(PairedSeries(x, y)).mean > 0.5
    assert abs(ksg_cmi(TripleSeries(x, y, z)).mean) < 0.05
    # y depends on x beyond z
    y2 = x + 0.3 * rng.standard_normal(3000)
    assert ksg_cmi(TripleSeries(x, y2, z)).mean > 0.3
    # identity with self exclusion holds for the conditional form too
    t = TripleSeries(x[:300], y[:300], z[:300])
    assert np.array_equal(ksg_cmi(t).locals, cross_ksg_cmi(t, t, exclude_self=True).locals)
