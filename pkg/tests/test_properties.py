from fractions import Fraction as F

from hypothesis import given
from hypothesis import strategies as st

from distortion_lab.core import (
    Matching,
    OrdinalProfile,
    ValuationProfile,
    as_rat,
    fmt_ratio,
    induced_ranking,
    social_welfare,
    validate,
)
from distortion_lab.matching import max_weight_matching, top_item_fix
from distortion_lab.voting import tally

rats = st.fractions(min_value=-50, max_value=50, max_denominator=40)


@st.composite
def unit_row(draw, m):
    """Non-increasing rank values summing to 1."""
    den = draw(st.integers(1, 60))
    cuts = sorted(draw(st.lists(st.integers(0, den), min_size=m - 1, max_size=m - 1)))
    parts = [b - a for a, b in zip([0] + cuts, cuts + [den])]
    return sorted((F(p, den) for p in parts), reverse=True)


@st.composite
def profiles(draw, n=None, m=None, square=False):
    n = n or draw(st.integers(1, 6))
    m = n if square else (m or draw(st.integers(1, 5)))
    rankings = [tuple(draw(st.permutations(range(m)))) for _ in range(n)]
    rows = []
    for order in rankings:
        ranks = draw(unit_row(m))
        row = [F(0)] * m
        for pos, x in enumerate(order):
            row[x] = ranks[pos]
        rows.append(row)
    return OrdinalProfile(rankings), ValuationProfile(rows)


@given(rats, rats, rats)
def test_rational_field_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert as_rat(fmt_ratio(a)) == a


@given(profiles())
def test_generated_profiles_validate(pair):
    o, v = pair
    assert validate(v, o) == []


@given(profiles())
def test_welfare_is_additive_over_agents(pair):
    o, v = pair
    m = o.n_alternatives
    for x in range(m):
        parts = [social_welfare(x, ValuationProfile([row])) for row in v.values]
        assert social_welfare(x, v) == sum(parts)


@given(profiles())
def test_first_place_inequalities(pair):
    o, v = pair
    m = o.n_alternatives
    t = tally(o, v.top_values(o))
    best1 = max(t.sw1)
    for x in range(m):
        assert social_welfare(x, v) <= m * best1
        assert t.sw1[x] <= t.plu[x]
        assert F(t.plu[x], m) <= t.sw1[x]


@given(profiles())
def test_induced_ranking_is_consistent(pair):
    o, v = pair
    for row in v.values:
        r = induced_ranking(row)
        assert all(row[a] >= row[b] for a, b in zip(r, r[1:]))
        # the induced order is itself a ranking the row is valid for
        assert validate(ValuationProfile([row]), OrdinalProfile([r])) == []


@given(profiles(square=True), st.data())
def test_top_item_fix_never_loses_welfare(pair, data):
    o, v = pair
    n = o.n_agents
    mu = Matching(tuple(data.draw(st.permutations(range(n)))))
    fixed = top_item_fix(mu, o)
    assert social_welfare(fixed, v) >= social_welfare(mu, v)
    assert any(o.top(i) == x for i, x in enumerate(fixed.item_of))


@given(profiles(square=True))
def test_optimal_matching_stays_optimal_after_fix(pair):
    o, v = pair
    r = max_weight_matching(v)
    assert social_welfare(top_item_fix(r.matching, o, v), v) == r.welfare
