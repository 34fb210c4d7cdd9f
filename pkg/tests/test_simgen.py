import numpy as np
import pytest

from crossmi import EstimatorConfig, PairedSeries
from crossmi.estimators import gaussian_cross_mi, gaussian_fit, ksg_mi
from crossmi.significance import BlockSpec, ShuffleTarget, test_cross_mi_nonzero
from crossmi.simgen import (ConditionKind, ConditionSpec, StateSwitchingSpec,
                            gen_ar1_pair, gen_independent, gen_linear,
                            gen_sinusoidal, gen_state_switching,
                            scaling_experiment)
from crossmi.figures import fig1_outcomes, probe_local_cross_mi, resolve_config

from oracles import HIST_MI_SINUSOID, naive_acf


def _same(a: PairedSeries, b: PairedSeries):
    return a.x.tobytes() == b.x.tobytes() and a.y.tobytes() == b.y.tobytes()


@pytest.mark.parametrize("make", [
    lambda s: gen_linear(50, 0.5, 1.0, 0.1, -1, 1, s),
    lambda s: gen_independent(50, {"dist": "uniform", "low": 0, "high": 1},
                              {"dist": "normal", "mean": 2, "std": 3}, s),
    lambda s: gen_sinusoidal(50, 1.0, 2.0, 0.1, -2, 2, s),
    lambda s: gen_ar1_pair(50, 0.8, 0.3, 1.0, s),
    lambda s: ConditionSpec(x_range=(0, 1)).sample(50, s),
])
def test_determinism(make):
    assert _same(make(3), make(3))
    assert not _same(make(3), make(4))


def test_noiseless_line():
    s = gen_linear(4, 1.0, 0.0, 0.0, 0, 1, 0)
    np.testing.assert_array_equal(s.x, s.y)


def test_noiseless_sinusoid():
    s = gen_sinusoidal(1000, 1.5, 2.0, 0.0, -3, 3, 0)
    assert np.all(np.abs(s.y - 1.5 * np.sin(2.0 * s.x)) == 0)


def test_range_errors():
    with pytest.raises(ValueError, match="range"):
        gen_linear(10, 1, 0, 0.1, 1, 0, 0)
    with pytest.raises(ValueError, match="range"):
        gen_sinusoidal(10, 1, 1, 0.1, 2, 2, 0)
    with pytest.raises(ValueError):
        gen_independent(10, {"dist": "cauchy"}, {}, 0)
    with pytest.raises(ValueError, match="stationary"):
        gen_ar1_pair(100, 1.0, 0.0, 1.0, 0)
    with pytest.raises(ValueError):
        gen_ar1_pair(5, 0.5, 0.0, 1.0, 0)
    with pytest.raises(ValueError):
        ConditionSpec(noise_std=-1)
    with pytest.raises(ValueError):
        ConditionSpec(slope=float("inf"))


def _within_4se(sample, mean, var):
    n = sample.size
    assert abs(sample.mean() - mean) < 4 * np.sqrt(var / n)
    # variance of the sample variance for these distributions, bounded by the
    # fourth central moment estimated from the sample
    m4 = np.mean((sample - sample.mean()) ** 4)
    assert abs(sample.var(ddof=1) - var) < 4 * np.sqrt((m4 - var ** 2) / n)


def test_marginal_moments():
    n = 10_000
    s = gen_linear(n, 0.5, 1.0, 0.2, -2, 4, 0)
    _within_4se(s.x, 1.0, 36 / 12)
    _within_4se(s.y, 1.5, 0.25 * 3 + 0.04)
    s = gen_independent(n, {"dist": "normal", "mean": -1, "std": 2},
                        {"dist": "uniform", "low": 0, "high": 3}, 1)
    _within_4se(s.x, -1, 4)
    _within_4se(s.y, 1.5, 9 / 12)
    s = ConditionSpec(kind="INDEPENDENT", x_mean=0.5, x_std=0.5, y_offset=2,
                      noise_std=0.3).sample(n, 2)
    _within_4se(s.x, 0.5, 0.25)
    _within_4se(s.y, 2.0, 0.09)


def test_ar1_acf():
    x = gen_ar1_pair(1000, 0.8, 0.0, 1.0, 5).x
    assert naive_acf(x, 1) == pytest.approx(0.8, abs=0.1)


def test_ar1_coupling_zero_is_independent():
    d = gen_ar1_pair(5000, 0.8, 0.0, 1.0, 6)
    assert abs(np.corrcoef(d.x, d.y)[0, 1]) < 0.1


def test_independent_reference_noise_band():
    ref = gen_independent(5000, {"dist": "uniform", "low": -4, "high": 4},
                          {"dist": "uniform", "low": -2, "high": 2}, 0)
    assert abs(ksg_mi(ref).mean) < 0.03
    test = gen_linear(500, 0.5, 0.0, 0.1, 0, 2, 1)
    assert abs(gaussian_cross_mi(gaussian_fit(ref), test).mean) < 0.01


def test_sinusoid_mi_positive():
    est = ksg_mi(gen_sinusoidal(5000, 1, 1, 0.3, -3, 3, 9)).mean
    assert est > 0
    assert est == pytest.approx(HIST_MI_SINUSOID, abs=0.05)


def test_condition_spec_round_trip():
    spec = ConditionSpec(kind="SINUSOIDAL", amplitude=2.0, x_range=[0, 1])
    assert ConditionSpec.from_dict(spec.to_dict()) == spec
    assert spec.kind is ConditionKind.SINUSOIDAL


def test_state_switching_layout():
    spec = StateSwitchingSpec(({"kind": "LINEAR"}, {"kind": "INDEPENDENT"}), 30, 1)
    d = gen_state_switching(spec)
    assert d.samples.n == 60
    assert d.labels == tuple([1] * 30 + [2] * 30)
    assert d.weights == {1: 0.5, 2: 0.5}
    first = ConditionSpec().sample(30, [1, 1])
    assert _same(d.condition(1), first)
    with pytest.raises(ValueError):
        StateSwitchingSpec(())


def test_probe_outcomes_pinned_seed():
    fig = resolve_config("fig1")["figure"]
    res = probe_local_cross_mi(fig, 0, EstimatorConfig())
    assert all(fig1_outcomes(res["per_condition"], fig["noise_band_nats"]))
    # condition 3 sits in the noise band, condition 4 below it
    assert res["per_condition"][3] < res["per_condition"][2]


def test_probe_pooled_not_significant():
    fig = resolve_config("fig1")["figure"]
    res = probe_local_cross_mi(fig, 0, EstimatorConfig())
    sig = test_cross_mi_nonzero(res["probe"], res["data"].samples,
                                ShuffleTarget.REFERENCE, spec=BlockSpec(1, 200, 0))
    assert sig.p_value > 0.05


def test_scaling_experiment_rows():
    lin = ConditionSpec(x_range=(-4, 4), slope=0.5)
    rows = scaling_experiment(lin, lin, [20, 40], False, n_reference=300)
    assert [r.n_test for r in rows] == [20, 40]
    # without pooling the reference MI does not depend on the test size
    assert rows[0].I_q == rows[1].I_q
    pooled = scaling_experiment(lin, lin, [20, 40], True, n_reference=300)
    assert pooled[0].I_q != pooled[1].I_q
    with pytest.raises(ValueError, match="below k"):
        scaling_experiment(lin, lin, [3])
    with pytest.raises(ValueError):
        scaling_experiment(lin, lin, [])


def test_scaling_matched_flat():
    lin = ConditionSpec(x_range=(-4, 4), slope=0.5)
    rows = scaling_experiment(lin, lin, [50, 100, 200, 400], False)
    ci = np.array([r.CI_pq for r in rows])
    assert np.ptp(ci) < 0.3
