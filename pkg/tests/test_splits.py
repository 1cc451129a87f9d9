import numpy as np
import pytest

from survforest import (
    ConfigError,
    DegenerateSplit,
    EmptyRiskTable,
    SplitRule,
    build_risk_table,
    evaluate_split,
    gehan_u,
    harrell_c_split,
    logrank_statistic,
    parse_split_rule,
    weighted_logrank_statistic,
)
from survforest.splits import scan_harrell_c, scan_thresholds, scan_weighted_logrank

from oracles import (
    csplit_oracle,
    gehan_oracle,
    random_survival_instance,
    weighted_logrank_oracle,
)

T4 = np.array([1.0, 2.0, 3.0, 4.0])
S4 = np.ones(4, dtype=int)


def test_logrank_hand_value():
    tab = build_risk_table(T4, S4, [1, 0, 1, 0])
    assert logrank_statistic(tab).value == pytest.approx(8 / 13, abs=1e-12)


def test_logrank_one_group_empty():
    with pytest.raises(DegenerateSplit):
        logrank_statistic(build_risk_table(T4, S4, [1, 1, 1, 1]))


def test_logrank_proportional_representation_is_zero():
    # two identical copies in each group at each event time
    t = np.array([1.0, 1.0, 2.0, 2.0])
    s = np.ones(4, dtype=int)
    tab = build_risk_table(t, s, [1, 0, 1, 0])
    assert logrank_statistic(tab).value == pytest.approx(0.0, abs=1e-12)


def test_gehan_wilcoxon_hand_value():
    tab = build_risk_table(T4, S4, [1, 0, 1, 0])
    assert weighted_logrank_statistic(tab, 1.0).value == pytest.approx(4 / 7, abs=1e-12)


def test_weighted_zero_equals_logrank():
    rng = np.random.default_rng(3)
    for _ in range(100):
        t, s, g = random_survival_instance(rng)
        try:
            tab = build_risk_table(t, s, g)
            a = weighted_logrank_statistic(tab, 0.0).value
            b = logrank_statistic(tab).value
        except (DegenerateSplit, EmptyRiskTable):
            continue
        assert a == b


def test_harrell_c_split_hand_value():
    ev = harrell_c_split(T4, S4, [1, 1, 0, 0])
    assert ev.value == pytest.approx(5 / 6, abs=1e-12)
    assert not ev.orientation
    assert (ev.n_cross, ev.n_within0, ev.n_within1) == (4, 1, 1)


def test_harrell_c_split_orientation_switch():
    ev = harrell_c_split(T4, S4, [0, 0, 1, 1])
    assert ev.value == pytest.approx(5 / 6, abs=1e-12)
    assert ev.orientation


def test_harrell_c_split_single_node():
    ev = harrell_c_split(T4, S4, [1, 1, 1, 1])
    assert ev.value == pytest.approx(0.5, abs=1e-12)


def test_harrell_c_split_no_comparable_pairs():
    with pytest.raises(DegenerateSplit):
        harrell_c_split([1.0, 2.0], [0, 0], [1, 0])


def test_gehan_hand_value():
    U, N, N0, N1 = gehan_u(T4, S4, [1, 0, 1, 0])
    assert U == 2 and N == 4
    # identity U = 2*A - N with A = 3 cross pairs
    assert U == 2 * 3 - N


def test_gehan_empty_group_zero():
    U, N, _, _ = gehan_u(T4, S4, [0, 0, 0, 0])
    assert U == 0 and N == 0


def test_gehan_c_bridge_random_instances():
    # numerator identity: raw C == ((U + N)/2 + (N0 + N1)/2) / (N + N0 + N1)
    rng = np.random.default_rng(42)
    checked = 0
    while checked < 1000:
        t, s, g = random_survival_instance(rng)
        U, N, N0, N1 = gehan_u(t, s, g)
        Uo, No, N0o, N1o = gehan_oracle(t, s, g)
        assert (U, N, N0, N1) == (Uo, No, N0o, N1o)
        denom = N + N0 + N1
        if denom == 0:
            continue
        bridge = ((U + N) / 2 + 0.5 * (N0 + N1)) / denom
        raw = csplit_oracle(t, s, g)
        assert bridge == pytest.approx(raw, abs=1e-12)
        ev = harrell_c_split(t, s, g)
        assert ev.value == pytest.approx(max(raw, 1 - raw), abs=1e-12)
        checked += 1


def test_tarone_ware_degenerations_random_tables():
    rng = np.random.default_rng(17)
    checked = 0
    while checked < 1000:
        t, s, g = random_survival_instance(rng)
        for w in (0.0, 1.0):
            expect = weighted_logrank_oracle(t, s, g, w)
            try:
                got = evaluate_split(SplitRule.tarone_ware(w), t, s, g).value
            except (DegenerateSplit, EmptyRiskTable):
                assert expect is None
                continue
            assert got == pytest.approx(expect, abs=1e-12)
        checked += 1


def test_label_swap_symmetry():
    rng = np.random.default_rng(23)
    for _ in range(200):
        t, s, g = random_survival_instance(rng)
        gs = 1 - g
        U1 = gehan_u(t, s, g)
        U2 = gehan_u(t, s, gs)
        assert U1[0] == -U2[0] and U1[1] == U2[1]
        assert (U1[2], U1[3]) == (U2[3], U2[2])
        try:
            tab1 = build_risk_table(t, s, g)
            tab2 = build_risk_table(t, s, gs)
            v1 = weighted_logrank_statistic(tab1, 0.5).value
            v2 = weighted_logrank_statistic(tab2, 0.5).value
            assert v1 == pytest.approx(v2, rel=1e-12)
        except (DegenerateSplit, EmptyRiskTable):
            pass
        try:
            assert harrell_c_split(t, s, g).value == pytest.approx(
                harrell_c_split(t, s, gs).value, abs=1e-12
            )
        except DegenerateSplit:
            pass


def test_monotone_time_invariance():
    rng = np.random.default_rng(29)
    for _ in range(100):
        t, s, g = random_survival_instance(rng)
        t2 = np.exp(t / 2.0)  # strictly increasing transform
        for rule in (SplitRule.logrank(), SplitRule.harrell_c(), SplitRule.gehan()):
            try:
                v1 = evaluate_split(rule, t, s, g).value
                v2 = evaluate_split(rule, t2, s, g).value
            except (DegenerateSplit, EmptyRiskTable):
                continue
            assert v1 == pytest.approx(v2, rel=1e-9)


def test_censored_max_duplicate_adds_no_small_member_pairs():
    rng = np.random.default_rng(31)
    for _ in range(50):
        t, s, g = random_survival_instance(rng)
        # duplicate the largest time as a censored observation
        t2 = np.append(t, t.max())
        s2 = np.append(s, 0)
        g2 = np.append(g, 1)
        _, _, N0a, N1a = gehan_u(t, s, g)
        _, _, N0b, N1b = gehan_u(t2, s2, g2)
        # the new member is never the smaller member of a comparable pair
        _, Na, _, _ = gehan_u(t, s, g)
        _, Nb, _, _ = gehan_u(t2, s2, g2)
        # every new comparable pair must have the duplicate as the LARGER member
        new_pairs = (Nb + N0b + N1b) - (Na + N0a + N1a)
        expected_new = int(np.sum((s == 1) & (t < t.max())))
        assert new_pairs == expected_new


def test_evaluate_split_dispatch():
    assert evaluate_split(SplitRule.harrell_c(), T4, S4, [1, 1, 0, 0]).value == (
        pytest.approx(5 / 6, abs=1e-12)
    )
    assert evaluate_split(SplitRule.logrank(), T4, S4, [1, 0, 1, 0]).value == (
        pytest.approx(8 / 13, abs=1e-12)
    )


def test_parse_split_rule():
    assert parse_split_rule("logrank") == SplitRule.logrank()
    assert parse_split_rule("c") == SplitRule.harrell_c()
    assert parse_split_rule("gehan") == SplitRule.gehan()
    assert parse_split_rule("tarone-ware:0.5").exponent == 0.5
    with pytest.raises(ConfigError):
        parse_split_rule("tarone-ware:2.0")
    with pytest.raises(ConfigError):
        parse_split_rule("nope")


def test_scans_agree_with_direct_evaluation():
    rng = np.random.default_rng(37)
    for _ in range(60):
        n = int(rng.integers(4, 25))
        t = rng.exponential(1, n) + 0.01
        s = rng.integers(0, 2, n)
        x = rng.normal(size=n)
        for rule in (SplitRule.logrank(), SplitRule.gehan(), SplitRule.harrell_c()):
            thr, vals, valid, orient = scan_thresholds(rule, t, s, x)
            for c, v, ok in zip(thr, vals, valid):
                g = (x <= c).astype(int)
                try:
                    direct = evaluate_split(rule, t, s, g).value
                except (DegenerateSplit, EmptyRiskTable):
                    assert not ok
                    continue
                assert ok
                assert v == pytest.approx(direct, rel=1e-10, abs=1e-10)


def test_scan_constant_variable_empty():
    thr, vals, valid = scan_weighted_logrank(T4, S4, np.ones(4), 0.0)
    assert thr.size == 0
    thr, vals, valid, orient = scan_harrell_c(T4, S4, np.zeros(4))
    assert thr.size == 0
