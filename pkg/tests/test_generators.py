from fractions import Fraction as F

import numpy as np
import pytest

from distortion_lab.analysis import (
    gen_fullval_lb,
    gen_hybrid_lb,
    gen_matching_lb,
    gen_optcand_lb,
    gen_tradeoff_lb,
)
from distortion_lab.analysis.generators import random_instance
from distortion_lab.core import Matching, OptimalCandidate, Truncated, social_welfare, validate
from distortion_lab.matching import max_weight_matching

GENERATED = [
    gen_optcand_lb(4, 3),
    gen_optcand_lb(6, 4),
    gen_fullval_lb(4, 3),
    gen_fullval_lb(9, 4),
    gen_tradeoff_lb(5, 1),
    gen_tradeoff_lb(5, 2),
    gen_tradeoff_lb(7, 1),
    gen_matching_lb(6, 1),
    gen_matching_lb(8, 2),
    gen_hybrid_lb(8, 5, 2),
    gen_hybrid_lb(9, 4, 1),
]


@pytest.mark.parametrize("gi", GENERATED, ids=lambda g: f"{g.family}-{'-'.join(map(str, g.params.values()))}")
def test_all_checks_pass(gi):
    failed = [c for c in gi.checks() if not c.ok]
    assert not failed


@pytest.mark.parametrize("gi", GENERATED, ids=lambda g: g.family)
def test_adversarial_truths_are_valid(gi):
    o = gi.instance.ordinal
    for name, truth in gi.adversarial_truths.items():
        assert validate(truth, o) == [], name
        assert all(sum(r) == 1 for r in truth.values)


def test_optcand_values():
    gi = gen_optcand_lb(4, 3)
    o = gi.instance.prediction.index
    assert isinstance(gi.instance.prediction, OptimalCandidate) and o == 2
    ones = gi.adversarial_truths["ones_on_top"]
    assert social_welfare(o, ones) == 0 and social_welfare(0, ones) == 2
    uni = gi.adversarial_truths["uniform_S1"]
    assert social_welfare(0, uni) == F(2, 3) and social_welfare(o, uni) == F(5, 3)
    assert gi.expected["uniform.ratio"] == F(5, 2)


def test_fullval_values():
    gi = gen_fullval_lb(4, 3)
    pred = gi.instance.prediction.profile
    assert social_welfare(2, pred) == 2
    assert social_welfare(0, pred) == social_welfare(1, pred) == 1
    assert social_welfare(2, gi.adversarial_truths["ones_on_top"]) == 0


def test_tradeoff_m5():
    gi = gen_tradeoff_lb(5, 1)
    assert gi.instance.n == 60 == gi.expected["n"]
    case2 = gi.adversarial_truths["case2_b1"]
    assert social_welfare(1, case2) == 1
    assert social_welfare(0, case2) == F(57, 2)
    assert social_welfare(0, case2) >= F(125, 8)
    assert social_welfare(0, gi.adversarial_truths["case1_ones_on_top"]) == 0


def test_matching_lb_canonical_and_mechanism():
    gi = gen_matching_lb(8, 2)
    canon = gi.extra["canonical_matching"]
    assert social_welfare(canon, gi.adversarial_truths["canonical"]) <= 1
    assert gi.expected["opt_formula"] == F(11, 6)
    assert gi.expected["opt_lower"] == F(3, 2)
    mech = gi.extra["mechanism3_matching"]
    truth = gi.adversarial_truths["mechanism3"]
    assert social_welfare(mech, truth) == F(7, 9)
    assert max_weight_matching(truth).welfare == F(19, 9)


def test_matching_lb_adversary_is_adaptive(rng):
    gi = gen_matching_lb(6, 1)
    for _ in range(20):
        mu = Matching(tuple(int(x) for x in rng.permutation(6)))
        truth = gi.adversary(mu)
        assert validate(truth, gi.instance.ordinal) == []
        assert social_welfare(mu, truth) <= 1
        assert max_weight_matching(truth).welfare >= gi.expected["opt_lower"]


def test_hybrid_table_one():
    gi = gen_hybrid_lb(8, 5, 2)
    # a_i is index i-1, o is index 4; each set holds two identical voters
    table = [(0, 3, 2, 4, 1), (1, 0, 3, 4, 2), (2, 1, 0, 4, 3), (3, 2, 1, 4, 0)]
    assert gi.instance.ordinal.rankings == tuple(r for r in table for _ in range(2))
    pred = gi.instance.prediction.profile
    assert social_welfare(4, pred) == 1
    assert all(social_welfare(j, pred) == F(7, 4) for j in range(4))
    assert gi.expected["pred.ratio"] == F(4, 7)
    assert social_welfare(4, gi.adversarial_truths["adversarial"]) == 0


@pytest.mark.parametrize(
    "call",
    [
        lambda: gen_optcand_lb(5, 3),
        lambda: gen_fullval_lb(5, 4),
        lambda: gen_tradeoff_lb(4, 1),
        lambda: gen_tradeoff_lb(3, 1),
        lambda: gen_tradeoff_lb(5, F(1, 3)),
        lambda: gen_tradeoff_lb(5, 6),
        lambda: gen_matching_lb(5, 1),
        lambda: gen_matching_lb(4, 3),
        lambda: gen_hybrid_lb(8, 5, 3),
    ],
)
def test_parameter_errors(call):
    with pytest.raises(ValueError):
        call()


def test_random_instance_is_deterministic_and_accurate():
    a = random_instance("matching", 4, 4, np.random.default_rng(7), prediction="truncated", k=2)
    b = random_instance("matching", 4, 4, np.random.default_rng(7), prediction="truncated", k=2)
    assert a == b
    assert isinstance(a.prediction, Truncated) and a.prediction.profile == a.truth.truncate(a.ordinal, 2)
    with pytest.raises(ValueError):
        random_instance("matching", 3, 4, np.random.default_rng(0))
    with pytest.raises(ValueError):
        random_instance("matching", 3, 3, np.random.default_rng(0), prediction="optimal_candidate")
