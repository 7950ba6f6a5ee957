from fractions import Fraction as F

import pytest

from distortion_lab.analysis import worst_ratio
from distortion_lab.analysis.generators import random_instance
from distortion_lab.analysis.sweep import (
    DEFAULT_LEVELS,
    accurate_instance,
    corrupt,
    designated_adversary,
    error_sweep,
)
from distortion_lab.core import MATCHING, VOTING, ValuationProfile, random_ordinal, random_profile, validate


def test_levels_are_quarters():
    assert DEFAULT_LEVELS == (0, F(1, 4), F(1, 2), F(3, 4), 1)


@pytest.mark.parametrize("flavor,n,m", [(VOTING, 4, 4), (MATCHING, 4, 4)])
def test_zero_corruption_is_accurate(flavor, n, m, rng):
    for _ in range(10):
        o = random_ordinal(n, m, rng)
        inst = accurate_instance(flavor, random_profile(o, rng), o)
        row = error_sweep(inst, [0])[0]
        assert row.eta == 1 and row.ok


def test_corruption_endpoints(rng):
    o = random_ordinal(3, 4, rng)
    truth = random_profile(o, rng)
    adv = designated_adversary(truth, o)
    assert corrupt(truth, adv, o, 0) == truth
    assert corrupt(truth, adv, o, 1) == adv
    assert validate(corrupt(truth, adv, o, F(1, 3)), o) == []
    with pytest.raises(ValueError):
        corrupt(truth, adv, o, F(3, 2))


def test_invalid_adversary_rejected(rng):
    o = random_ordinal(2, 3, rng)
    inst = accurate_instance(VOTING, random_profile(o, rng), o)
    rows = []
    for order in o.rankings:
        row = [0, 0, 0]
        row[order[-1]] = 1  # all mass on the bottom choice
        rows.append(row)
    bottom_heavy = ValuationProfile(rows)
    with pytest.raises(ValueError):
        error_sweep(inst, adversary=bottom_heavy)


def test_sweep_needs_truth(rng):
    inst = random_instance(VOTING, 3, 3, rng)
    stripped = type(inst)(inst.flavor, inst.ordinal, inst.prediction, None, {})
    with pytest.raises(ValueError):
        error_sweep(stripped)


def test_mid_level_bound_against_oracle(rng):
    # realized ratio on the true profile never exceeds the oracle's worst case,
    # and both sit under m * eta * rho
    for _ in range(20):
        o = random_ordinal(4, 4, rng)
        inst = accurate_instance(VOTING, random_profile(o, rng, vertex_prob=0.5), o)
        for row in error_sweep(inst, [F(1, 2)], lam=2):
            assert row.realized <= row.bound
            assert row.realized <= worst_ratio(o, row.outcome).ratio
            assert row.bound == 4 * row.eta * row.rho


def test_voting_eta_winner_within_cap(rng):
    for _ in range(20):
        o = random_ordinal(4, 4, rng)
        inst = accurate_instance(VOTING, random_profile(o, rng), o)
        for row in error_sweep(inst, lam=F(3, 2)):
            assert row.eta_winner <= row.eta_cap


def test_matching_rows(rng):
    for _ in range(10):
        o = random_ordinal(5, 5, rng)
        inst = accurate_instance(MATCHING, random_profile(o, rng), o)
        rows = error_sweep(inst, k=2)
        assert all(r.ok and r.bound <= 25 for r in rows)
        assert all(r.eta_below_one == (r.eta < 1) for r in rows)
    with pytest.raises(ValueError):
        error_sweep(inst, k=6)
