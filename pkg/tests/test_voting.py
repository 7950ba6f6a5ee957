import warnings
from fractions import Fraction as F

import pytest

from distortion_lab.analysis import gen_tradeoff_lb
from distortion_lab.analysis.generators import gen_hybrid_lb
from distortion_lab.core import INF, OrdinalProfile, ValuationProfile
from distortion_lab.voting import (
    eta_voting,
    mechanism1,
    mechanism2,
    plurality_winner,
    rho,
    tally,
    top_values_from,
)


def test_tally_two_voters():
    o = OrdinalProfile([(0, 1), (0, 1)])
    t = tally(o, ["1/2", "1/2"])
    assert t.plu == (2, 0) and t.sw1 == (1, 0)
    assert t.first_voters == ((0, 1), ())


def test_tally_tradeoff_groups():
    gi = gen_tradeoff_lb(5, 1)
    t = tally(gi.instance.ordinal, top_values_from(gi.instance.prediction, gi.instance.ordinal))
    assert t.sw1[1] == t.sw1[2] == F(5, 2)
    assert t.sw1[3] == t.sw1[4] == F(25, 4)
    assert t.sw1[0] == 0
    assert sum(t.plu) == 60


def test_plurality():
    assert plurality_winner(OrdinalProfile([(0, 1), (0, 1), (1, 0)])) == 0
    assert plurality_winner(OrdinalProfile([(2, 0, 1), (1, 0, 2), (0, 1, 2)])) == 0
    assert plurality_winner(gen_hybrid_lb(8, 5, 2).instance.ordinal) == 0


def test_mechanism1_examples():
    assert mechanism1(OrdinalProfile([(0, 1)]), ["7/10"]) == 0
    gi = gen_tradeoff_lb(5, 1)
    top = top_values_from(gi.instance.prediction, gi.instance.ordinal)
    assert mechanism1(gi.instance.ordinal, top) == 3  # c_1
    assert mechanism1(OrdinalProfile([(1, 0), (0, 1)]), ["1", "1"]) == 0


def test_mechanism1_breaks_welfare_ties_by_plurality():
    o = OrdinalProfile([(0, 1), (1, 0), (1, 0)])
    assert mechanism1(o, ["1", "1/2", "1/2"]) == 1
    assert mechanism2(o, ["1", "1/2", "1/2"], 1)[0] == 1


def test_mechanism1_warns_outside_unit_sum_range():
    with pytest.warns(UserWarning):
        mechanism1(OrdinalProfile([(0, 1, 2)]), ["1/5"])
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        mechanism1(OrdinalProfile([(0, 1, 2)]), ["1/3"])


def test_mechanism2_tradeoff_lambda_two():
    gi = gen_tradeoff_lb(5, 1)
    top = top_values_from(gi.instance.prediction, gi.instance.ordinal)
    w, s = mechanism2(gi.instance.ordinal, top, 2)
    assert s.members == (3, 4) and w == 3 and s.a_star == 3


def test_mechanism2_degenerate_threshold_is_plurality():
    o = OrdinalProfile([(1, 0), (1, 0), (0, 1)])
    w, s = mechanism2(o, ["1/2", "1/2", "1"], 2)
    assert s.members == (0, 1) and w == plurality_winner(o)


def test_mechanism2_rejects_lambda():
    with pytest.raises(ValueError):
        mechanism2(OrdinalProfile([(0, 1)]), ["1"], 3)
    with pytest.raises(ValueError):
        mechanism2(OrdinalProfile([(0, 1)]), ["1"], "1/2")


def test_rho():
    o = OrdinalProfile([(0, 1), (1, 0)])
    t = tally(o, ["1", "1/2"])
    assert rho(0, t) == 1 and rho(1, t) == 2
    t0 = tally(OrdinalProfile([(0, 1)]), ["1/4"])
    assert rho(1, t0) == INF
    assert rho(0, tally(OrdinalProfile([(0, 1)]), ["0"])) == 1


def test_eta_voting_accurate_is_one():
    o = OrdinalProfile([(0, 1), (1, 0), (1, 0)])
    v = ValuationProfile([["1", "0"], ["1/2", "1/2"], ["1/2", "1/2"]])
    top = v.top_values(o)
    w, _ = mechanism2(o, top, 1)
    ev = eta_voting(w, v, top, o)
    assert ev.eta == 1 and ev.bound == 2 * ev.rho_pred


def _two_camps(m, first, second):
    rest = list(range(2, m))
    return OrdinalProfile([tuple([0, 1] + rest)] * first + [tuple([1, 0] + rest)] * second)


def test_eta_is_ratio_of_rhos():
    # three voters for 0, four for 1; lambda = 2 keeps both, plurality picks 1
    o = _two_camps(8, 3, 4)
    top = F(3, 16)
    row1 = [0, top, top, top, top, top, F(1, 16), 0]
    truth = ValuationProfile([[1] + [0] * 7] * 3 + [row1] * 4)
    pred_top = [1] * 3 + [F(3, 8)] * 4
    w, s = mechanism2(o, pred_top, 2)
    assert w == 1 and s.members == (0, 1)
    ev = eta_voting(w, truth, pred_top, o, 2)
    assert (ev.rho_true, ev.rho_pred, ev.eta_winner) == (4, 2, 2)
    assert ev.bound == 8 * ev.eta * ev.rho_pred


def test_eta_is_clamped_at_one():
    o = _two_camps(4, 3, 4)
    truth = ValuationProfile([["1/4"] * 4] * 3 + [[0, 1, 0, 0]] * 4)
    pred_top = [1] * 3 + [F(1, 4)] * 4
    w, _ = mechanism2(o, pred_top, 3)
    ev = eta_voting(w, truth, pred_top, o, 3)
    assert w == 1 and ev.rho_true == 1 and ev.rho_pred == 3
    assert ev.eta_winner == 1
    assert ev.eta == ev.per_candidate[0] == F(16, 3)


def test_eta_rejects_winner_outside_shortlist():
    o = OrdinalProfile([(0, 1), (0, 1), (1, 0)])
    v = ValuationProfile([[1, 0], [1, 0], [0, 1]])
    with pytest.raises(ValueError):
        eta_voting(1, v, v.top_values(o), o, 1)


def test_top_values_from_rejects_candidate_prediction():
    from distortion_lab.core import OptimalCandidate

    with pytest.raises(TypeError):
        top_values_from(OptimalCandidate(0), OrdinalProfile([(0, 1)]))
