import itertools
import math
from fractions import Fraction as F

import pytest

from distortion_lab.analysis import (
    SizeLimitError,
    gen_optcand_lb,
    robustness_of,
    worst_ratio,
)
from distortion_lab.analysis.generators import random_instance
from distortion_lab.analysis.oracle import VertexProfile, best_outcome
from distortion_lab.core import Matching, OrdinalProfile, random_ordinal, social_welfare


def _enumerate(ordinal, outcome, matching):
    """Plain-Python vertex enumeration, independent of the kernels."""
    n, m = ordinal.n_agents, ordinal.n_alternatives
    best = F(0)
    for prefix in itertools.product(range(1, m + 1), repeat=n):
        v = VertexProfile(prefix).expand(ordinal)
        den = social_welfare(outcome, v)
        num = social_welfare(best_outcome(v, matching), v)
        if den == 0:
            if num > 0:
                return math.inf
            continue
        best = max(best, num / den)
    return best


def test_two_by_two_ratio_three():
    o = OrdinalProfile([(0, 1), (1, 0)])
    r = worst_ratio(o, 0)
    assert r.ratio == 3
    assert r.witness_truth.values == ((F(1, 2), F(1, 2)), (0, 1))
    assert r.witness_best == 1
    assert r.recompute() == 3


def test_unanimous_top_is_one():
    o = OrdinalProfile([(2, 0, 1), (2, 1, 0), (2, 0, 1)])
    assert worst_ratio(o, 2).ratio == 1


def test_plurality_zero_candidate_unbounded():
    gi = gen_optcand_lb(4, 3)
    o = gi.instance.ordinal
    assert gi.instance.prediction.index not in o.tops()
    r = worst_ratio(o, gi.instance.prediction.index)
    assert r.ratio == math.inf
    assert social_welfare(r.mechanism_output, r.witness_truth) == 0


@pytest.mark.parametrize("n,m", [(2, 3), (3, 3), (3, 4), (4, 2)])
def test_voting_matches_plain_enumeration(n, m, rng):
    for _ in range(3):
        o = random_ordinal(n, m, rng)
        for w in range(m):
            r = worst_ratio(o, w)
            assert r.ratio == _enumerate(o, w, False)
            assert r.recompute() == r.ratio


@pytest.mark.parametrize("n", [2, 3, 4])
def test_matching_matches_plain_enumeration(n, rng):
    for _ in range(3):
        o = random_ordinal(n, n, rng)
        mu = Matching(tuple(int(x) for x in rng.permutation(n)))
        r = worst_ratio(o, mu)
        assert r.ratio == _enumerate(o, mu, True)


def test_workers_do_not_change_result(rng):
    for _ in range(5):
        o = random_ordinal(5, 4, rng)
        a = worst_ratio(o, 1, workers=1)
        b = worst_ratio(o, 1, workers=4)
        assert a == b


def test_size_guard_and_override(monkeypatch):
    o = OrdinalProfile([tuple(range(7))] * 2)
    with pytest.raises(SizeLimitError, match="m <= 6"):
        worst_ratio(o, 0)
    assert worst_ratio(o, 0, override=True).ratio == 1
    monkeypatch.setenv("DISTORTION_LAB_SIZE_OVERRIDE", "1")
    assert worst_ratio(o, 0).ratio == 1


def test_matching_size_guard():
    o = OrdinalProfile([tuple(range(7))] * 7)
    with pytest.raises(SizeLimitError, match="n <= 6"):
        worst_ratio(o, Matching(tuple(range(7))))


def test_robustness_within_known_bounds(rng):
    for _ in range(10):
        inst = random_instance("voting", 3, 3, rng, prediction="top_values")
        assert robustness_of(inst, "mech1").ratio <= min(3 * 3, 3**3)
        minst = random_instance("matching", 4, 4, rng, prediction="truncated", k=2)
        assert robustness_of(minst, "mech3", k=2).ratio <= 16
