import numpy as np
import pytest

from survforest import (
    ConfigError,
    EmptyNode,
    EmptyRiskTable,
    StepFunction,
    SurvivalDataset,
    build_risk_table,
    kaplan_meier,
    nelson_aalen,
)
from survforest.data import event_table


def test_risk_table_hand_example():
    t = np.array([1.0, 2, 3, 4])
    s = np.ones(4, dtype=int)
    g = np.array([1, 0, 1, 0])
    tab = build_risk_table(t, s, g)
    assert tab.event_times.tolist() == [1, 2, 3, 4]
    assert tab.Y.tolist() == [4, 3, 2, 1]
    assert tab.d.tolist() == [1, 1, 1, 1]
    assert tab.Y1.tolist() == [2, 1, 1, 0]
    assert tab.d1.tolist() == [1, 0, 1, 0]
    assert tab.Y0.tolist() == [2, 2, 1, 1]
    assert tab.d0.tolist() == [0, 1, 0, 1]


def test_risk_table_all_censored_raises():
    with pytest.raises(EmptyRiskTable):
        build_risk_table([1.0, 2.0], [0, 0], [0, 1])


def test_risk_table_single_event():
    tab = build_risk_table([5.0, 6.0, 7.0], [1, 0, 0], [1, 0, 0])
    assert tab.event_times.tolist() == [5.0]
    assert tab.Y.tolist() == [3]
    assert tab.d.tolist() == [1]


def test_risk_table_tied_events_pooled():
    # tied events pool into one row; tied censoring stays at risk
    tab = build_risk_table([2.0, 2.0, 2.0, 3.0], [1, 1, 0, 1], [1, 0, 0, 1])
    assert tab.event_times.tolist() == [2.0, 3.0]
    assert tab.d.tolist() == [2, 1]
    assert tab.Y.tolist() == [4, 1]


def test_risk_table_event_total():
    rng = np.random.default_rng(5)
    for _ in range(25):
        n = rng.integers(3, 30)
        t = rng.exponential(1, n) + 0.01
        s = rng.integers(0, 2, n)
        if not s.any():
            continue
        tab = build_risk_table(t, s, rng.integers(0, 2, n))
        assert tab.d.sum() == s.sum()
        assert np.all(np.diff(tab.Y) <= 0)
        assert np.all(tab.d1 <= tab.d)
        assert np.all(tab.Y1 <= tab.Y)


def test_nelson_aalen_hand_example():
    chf = nelson_aalen([1.0, 2.0, 3.0], [1, 0, 1])
    assert chf(0.5) == 0.0
    assert chf(1.0) == pytest.approx(1 / 3, abs=1e-12)
    assert chf(2.9) == pytest.approx(1 / 3, abs=1e-12)
    assert chf(3.0) == pytest.approx(4 / 3, abs=1e-12)
    assert chf(100.0) == pytest.approx(4 / 3, abs=1e-12)


def test_nelson_aalen_all_censored_is_zero():
    chf = nelson_aalen([1.0, 2.0], [0, 0])
    assert chf(0.0) == 0.0 and chf(5.0) == 0.0


def test_nelson_aalen_single_event():
    chf = nelson_aalen([2.0], [1])
    assert chf(1.9) == 0.0 and chf(2.0) == 1.0


def test_nelson_aalen_empty_raises():
    with pytest.raises(EmptyNode):
        nelson_aalen([], [])


def test_kaplan_meier_hand_example():
    km = kaplan_meier([1.0, 2.0, 3.0], [1, 0, 1])
    assert km(0.5) == 1.0
    assert km(1.0) == pytest.approx(2 / 3, abs=1e-12)
    assert km(2.5) == pytest.approx(2 / 3, abs=1e-12)
    assert km(3.0) == 0.0


def test_kaplan_meier_no_events_is_one():
    km = kaplan_meier([1.0, 2.0], [0, 0])
    assert km(10.0) == 1.0


def test_kaplan_meier_censoring_target_all_events():
    G = kaplan_meier([1.0, 2.0, 3.0], [1, 1, 1], target="censorings")
    assert G(0.0) == 1.0 and G(10.0) == 1.0


def test_na_below_neglog_km():
    # -log(1 - x) >= x termwise, so -log S_KM dominates the Nelson-Aalen CHF
    rng = np.random.default_rng(7)
    for _ in range(30):
        n = rng.integers(2, 40)
        t = rng.exponential(1, n) + 0.01
        s = rng.integers(0, 2, n)
        chf = nelson_aalen(t, s)
        km = kaplan_meier(t, s)
        grid = np.linspace(0, t.max(), 50)
        Sv = km(grid)
        Hv = chf(grid)
        mask = Sv > 0
        assert np.all(Hv[mask] <= -np.log(Sv[mask]) + 1e-12)


def test_step_function_matches_naive_scan():
    rng = np.random.default_rng(11)
    knots = np.sort(rng.uniform(0, 10, 8))
    vals = rng.normal(size=8)
    sf = StepFunction(knots, vals, initial_value=-1.0)
    for q in np.linspace(-1, 12, 200):
        expect = -1.0
        for k, v in zip(knots, vals):
            if k <= q:
                expect = v
        assert sf(q) == expect


def test_step_function_left_limit():
    sf = StepFunction([1.0, 2.0], [0.5, 0.25], initial_value=1.0)
    assert sf.left_limit(1.0) == 1.0
    assert sf.left_limit(1.5) == 0.5
    assert sf.left_limit(2.0) == 0.5
    assert sf(2.0) == 0.25


def test_permutation_invariance():
    rng = np.random.default_rng(13)
    t = rng.exponential(1, 30) + 0.01
    s = rng.integers(0, 2, 30)
    s[0] = 1
    g = rng.integers(0, 2, 30)
    perm = rng.permutation(30)
    tab = build_risk_table(t, s, g)
    tab2 = build_risk_table(t[perm], s[perm], g[perm])
    assert np.array_equal(tab.Y, tab2.Y)
    assert np.array_equal(tab.d1, tab2.d1)
    grid = np.linspace(0, 5, 40)
    assert np.array_equal(nelson_aalen(t, s)(grid), nelson_aalen(t[perm], s[perm])(grid))
    assert np.array_equal(kaplan_meier(t, s)(grid), kaplan_meier(t[perm], s[perm])(grid))


def test_event_table_empty_when_all_censored():
    t_ev, d, Y = event_table([1.0, 2.0], [0, 0])
    assert t_ev.size == 0


def test_dataset_validation():
    with pytest.raises(ConfigError):
        SurvivalDataset([0.0, 1.0], [1, 1], np.zeros((2, 1)))
    with pytest.raises(ConfigError):
        SurvivalDataset([1.0, 2.0], [1, 2], np.zeros((2, 1)))
    with pytest.raises(ConfigError):
        SurvivalDataset([1.0, 2.0], [1, 0], np.zeros((3, 1)))
    with pytest.raises(ConfigError):
        SurvivalDataset([1.0, 2.0], [1, 0], np.array([[np.nan], [0.0]]))
    ds = SurvivalDataset([1.0, 2.0], [1, 0], np.zeros((2, 2)))
    assert ds.variable_names == ("x1", "x2")
    assert ds.n == 2 and ds.p == 2
