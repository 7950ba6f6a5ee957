from fractions import Fraction as F

import numpy as np
import pytest

from distortion_lab.core import (
    INF,
    FullProfile,
    Instance,
    Matching,
    OrdinalProfile,
    TopValues,
    TruncatedProfile,
    ValuationProfile,
    as_rat,
    complete_truncated,
    fmt_ratio,
    induced_ranking,
    prediction_accurate,
    random_profile,
    social_welfare,
    validate,
)


def test_as_rat_is_exact_and_refuses_floats():
    assert as_rat("0.1") == F(1, 10)
    assert as_rat(" 2/6 ") == F(1, 3)
    assert as_rat(3) == F(3)
    with pytest.raises(TypeError):
        as_rat(0.1)
    with pytest.raises(TypeError):
        as_rat(True)


def test_fmt_ratio_always_has_denominator():
    assert fmt_ratio(F(3)) == "3/1"
    assert fmt_ratio(F(2, 4)) == "1/2"
    assert fmt_ratio(INF) == "inf"


def test_ordinal_profile_rejects_non_permutations():
    with pytest.raises(ValueError):
        OrdinalProfile([(0, 0)])
    with pytest.raises(ValueError):
        OrdinalProfile([(0, 1), (0, 1, 2)])
    o = OrdinalProfile([(2, 0, 1)])
    assert o.top(0) == 2
    assert o.positions().tolist() == [[1, 2, 0]]


def test_validate_accepts_valid_profile():
    o = OrdinalProfile([(0, 1)])
    assert validate(ValuationProfile([["1/2", "1/2"]]), o) == []


def test_validate_reports_row_sum_deficit():
    o = OrdinalProfile([(0, 1)])
    (v,) = validate(ValuationProfile([["1/2", "1/3"]]), o)
    assert v.kind == "row_sum" and v.deficit == F(1, 6)


def test_validate_reports_monotonicity():
    o = OrdinalProfile([(0, 1)])
    (v,) = validate(ValuationProfile([["1/4", "3/4"]]), o)
    assert (v.kind, v.agent) == ("monotonicity", 0)


def test_validate_negative_and_shape():
    o = OrdinalProfile([(0, 1)])
    kinds = {v.kind for v in validate(ValuationProfile([["3/2", "-1/2"]]), o)}
    assert "negative" in kinds
    assert validate(ValuationProfile([["1"]]), o)[0].kind == "shape"


@pytest.mark.parametrize(
    "row, expected",
    [(["1/2", "3/10", "1/5"], (0, 1, 2)), (["1/2", "1/2", "0"], (0, 1, 2)), (["1/3"] * 3, (0, 1, 2)), (["0", "1"], (1, 0))],
)
def test_induced_ranking(row, expected):
    assert induced_ranking(row) == expected


def test_social_welfare_candidate_and_matching():
    p = ValuationProfile([["1/2", "1/2"], ["3/4", "1/4"]])
    assert social_welfare(1, p) == F(3, 4)
    eye = ValuationProfile([[1 if i == j else 0 for j in range(4)] for i in range(4)])
    assert social_welfare(Matching(range(4)), eye) == 4


def test_ones_on_top_gives_second_choice_zero():
    o = OrdinalProfile([(0, 2, 1), (1, 2, 0)])
    p = ValuationProfile([[1, 0, 0], [0, 1, 0]])
    assert social_welfare(2, p) == 0


def test_complete_truncated():
    o = OrdinalProfile([(2, 0, 1), (0, 1, 2), (1, 0, 2)])
    w = complete_truncated(TruncatedProfile(1, [["1/2"], ["1"], ["1/3"]]), o)
    assert w.values[0] == (0, 0, F(1, 2)) and not w.unit_sum
    o4 = OrdinalProfile([(0, 1, 2, 3)] * 4)
    rows = complete_truncated(TruncatedProfile(2, [["1/3", "1/3"]] * 4), o4).values
    assert rows[0] == (F(1, 3), F(1, 3), 0, 0)
    full = ValuationProfile([["1/2", "1/3", "1/6"]] * 3)
    o3 = OrdinalProfile([(0, 1, 2)] * 3)
    assert complete_truncated(full.truncate(o3, 3), o3).values == full.values
    with pytest.raises(ValueError):
        complete_truncated(TruncatedProfile(4, [[0, 0, 0, 0]] * 3), o3)


def test_truncated_extendability():
    t = TruncatedProfile(1, [["1/4"]])
    assert t.violations() == []
    assert not t.extendable(3)  # 1/4 + 2 * 1/4 < 1
    assert TruncatedProfile(1, [["1/3"]]).extendable(3)
    assert TruncatedProfile(2, [["1/4", "1/2"]]).violations()[0].kind == "monotonicity"


def test_instance_validation():
    o = OrdinalProfile([(0, 1), (1, 0)])
    with pytest.raises(ValueError):
        Instance("matching", OrdinalProfile([(0, 1, 2)]), TopValues(["1"]))
    with pytest.raises(ValueError):
        Instance("voting", o, TopValues(["1"]))
    with pytest.raises(ValueError):
        Instance("voting", o, TopValues(["1", "1"]), ValuationProfile([["1/4", "3/4"], [0, 1]]))
    with pytest.raises(ValueError):
        Instance("bogus", o, TopValues(["1", "1"]))


def test_prediction_accurate_variants():
    o = OrdinalProfile([(0, 1), (1, 0)])
    v = ValuationProfile([["1/2", "1/2"], [0, 1]])
    assert prediction_accurate(v, TopValues(["1/2", "1"]), o)
    assert not prediction_accurate(v, TopValues(["1", "1"]), o)
    assert prediction_accurate(v, FullProfile(v), o)


def test_matching_must_be_bijection():
    with pytest.raises(ValueError):
        Matching([0, 0])
    assert Matching([1, 0]).agent_of(0) == 1


def test_random_profile_is_valid(rng):
    for _ in range(50):
        n, m = int(rng.integers(1, 6)), int(rng.integers(1, 6))
        o = OrdinalProfile([tuple(int(x) for x in rng.permutation(m)) for _ in range(n)])
        assert validate(random_profile(o, rng, vertex_prob=0.5), o) == []


def test_to_integer_roundtrip():
    p = ValuationProfile([["1/2", "1/3", "1/6"]])
    ints, d = p.to_integer()
    assert d == 6 and ints.tolist() == [[3, 2, 1]]
    assert np.all(ints >= 0)
