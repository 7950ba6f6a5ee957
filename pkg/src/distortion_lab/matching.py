"""One-sided matching: exact assignment, top-item repair and mechanisms."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    INF,
    Matching,
    OrdinalProfile,
    Ratio,
    TruncatedProfile,
    ValuationProfile,
    complete_truncated,
    rat_matrix,
    social_welfare,
    validate,
)


@dataclass(frozen=True)
class WeightMatrix:
    """Square agent-by-item value matrix.

    ``unit_sum`` is True only when the rows are a certified unit-sum profile;
    zero-completed truncations are evaluation-only.
    """

    values: tuple[tuple[Fraction, ...], ...]
    unit_sum: bool = False

    def __post_init__(self):
        values = rat_matrix(self.values)
        object.__setattr__(self, "values", values)
        n = len(values)
        if any(len(row) != n for row in values):
            raise ValueError("weight matrix must be square")
        if any(v < 0 for row in values for v in row):
            raise ValueError("weights must be non-negative")
        if self.unit_sum and any(sum(row) != 1 for row in values):
            raise ValueError("rows of a unit-sum weight matrix must sum to 1")

    @property
    def n(self) -> int:
        return len(self.values)

    @classmethod
    def from_profile(cls, profile: ValuationProfile) -> "WeightMatrix":
        return cls(profile.values, unit_sum=all(sum(r) == 1 for r in profile.values))


@dataclass(frozen=True)
class MatchingResult:
    matching: Matching
    welfare: Fraction
    top_matched_agent: int | None = None


def _as_weights(weights) -> WeightMatrix:
    if isinstance(weights, WeightMatrix):
        return weights
    if isinstance(weights, ValuationProfile):
        return WeightMatrix.from_profile(weights)
    return WeightMatrix(weights)


def _hungarian_min(cost: list[list[int]]) -> list[int]:
    """Minimum-cost perfect assignment on an integer matrix (row -> column).

    Shortest augmenting path with potentials; O(n^3), exact on Python ints.
    """
    n = len(cost)
    u = [0] * (n + 1)
    v = [0] * (n + 1)
    p = [0] * (n + 1)  # p[j]: row matched to column j (1-based, 0 = free)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [None] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = None
            j1 = 0
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = cost[i0 - 1][j - 1] - u[i0] - v[j]
                if minv[j] is None or cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if delta is None or minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    row_to_col = [0] * n
    for j in range(1, n + 1):
        row_to_col[p[j] - 1] = j - 1
    return row_to_col


def max_weight_matching(weights) -> MatchingResult:
    """Exact maximum-welfare perfect matching.

    Among all optimal matchings the lexicographically smallest ``item_of``
    is returned. Weights are scaled to integers and a tie-break term
    ``j * n**(n-1-i)`` (smaller than one unit of welfare after scaling by
    ``n**n``) is subtracted, which encodes lexicographic order exactly.
    """
    w = _as_weights(weights)
    n = w.n
    if n == 0:
        raise ValueError("empty weight matrix")
    den = 1
    for row in w.values:
        for x in row:
            den = math.lcm(den, x.denominator)
    scale = n**n
    cost = [
        [-int(x * den) * scale + j * n ** (n - 1 - i) for j, x in enumerate(row)]
        for i, row in enumerate(w.values)
    ]
    m = Matching(_hungarian_min(cost))
    return MatchingResult(m, social_welfare(m, w))


def _top_matched(mu: Matching, ordinal: OrdinalProfile) -> int | None:
    for i, x in enumerate(mu.item_of):
        if ordinal.top(i) == x:
            return i
    return None


def top_item_fix(mu: Matching, ordinal: OrdinalProfile, weights=None) -> Matching:
    """Rotate one cycle so that some agent holds her top-ranked item.

    Follows ``agent -> holder of agent's top item`` from the lowest-index
    agent; every agent on the resulting cycle takes her top item. Welfare
    cannot drop for weights that respect the rankings. ``weights`` is only
    used for a sanity check when supplied.
    """
    if _top_matched(mu, ordinal) is not None:
        return mu
    holder = {x: i for i, x in enumerate(mu.item_of)}
    seen: dict[int, int] = {}
    path = []
    i = 0
    while i not in seen:
        seen[i] = len(path)
        path.append(i)
        i = holder[ordinal.top(i)]
    cycle = path[seen[i]:]
    item_of = list(mu.item_of)
    for a in cycle:
        item_of[a] = ordinal.top(a)
    fixed = Matching(item_of)
    if weights is not None:
        w = _as_weights(weights)
        if social_welfare(fixed, w) < social_welfare(mu, w):
            raise ValueError("weights are inconsistent with the rankings: cycle rotation lost welfare")
    return fixed


def _finish(mu: Matching, ordinal: OrdinalProfile, w: WeightMatrix) -> MatchingResult:
    fixed = top_item_fix(mu, ordinal, w)
    return MatchingResult(fixed, social_welfare(fixed, w), _top_matched(fixed, ordinal))


def mechanism_full(ordinal: OrdinalProfile, predicted: ValuationProfile) -> MatchingResult:
    """Welfare-optimal matching for a full predicted profile, top-item repaired."""
    bad = validate(predicted, ordinal)
    if bad:
        raise ValueError(f"predicted profile is invalid: {bad[0]}")
    if ordinal.n_agents != ordinal.n_alternatives:
        raise ValueError("matching needs as many items as agents")
    w = WeightMatrix(predicted.values, unit_sum=True)
    return _finish(max_weight_matching(w).matching, ordinal, w)


def mechanism3(ordinal: OrdinalProfile, predicted: TruncatedProfile) -> MatchingResult:
    """Optimal matching on the zero-completed ``k``-truncated prediction."""
    n = ordinal.n_agents
    if ordinal.n_alternatives != n:
        raise ValueError("matching needs as many items as agents")
    if not 1 <= predicted.k <= n:
        raise ValueError(f"k={predicted.k} outside [1, {n}]")
    w = complete_truncated(predicted, ordinal)
    return _finish(max_weight_matching(w).matching, ordinal, w)


@dataclass(frozen=True)
class EtaMatching:
    eta: Ratio
    true_opt_k: Matching  # optimal on the true zero-completed truncation
    pred_opt_k: Matching  # optimal on the predicted zero-completed truncation
    sw_true_opt_k: Fraction
    sw_pred_opt_k: Fraction
    bound: Ratio  # min{(n/k + 1) * eta, n^2}
    below_one: bool


def eta_matching(truth: ValuationProfile, predicted: TruncatedProfile, ordinal: OrdinalProfile, k: int | None = None) -> EtaMatching:
    """True-welfare ratio of the true- and predicted-truncation optima.

    The raw ratio is reported; values below one are flagged, not clamped.
    """
    k = predicted.k if k is None else k
    if k != predicted.k:
        raise ValueError(f"k={k} does not match the prediction's k={predicted.k}")
    n = ordinal.n_agents
    true_k = mechanism3(ordinal, truth.truncate(ordinal, k)).matching
    pred_k = mechanism3(ordinal, predicted).matching
    num = social_welfare(true_k, truth)
    den = social_welfare(pred_k, truth)
    eta: Ratio = INF if den == 0 else num / den
    bound = n * n if eta == INF else min((Fraction(n, k) + 1) * eta, Fraction(n * n))
    return EtaMatching(eta, true_k, pred_k, num, den, bound, eta < 1)
