"""Single-winner voting rules driven by first-place welfare.

Every rule here only looks at each voter's value for her top-ranked
candidate. Remaining ties are broken towards the lowest candidate index.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import (
    INF,
    FullProfile,
    OrdinalProfile,
    Prediction,
    Ratio,
    TopValues,
    Truncated,
    ValuationProfile,
    as_rat,
)


@dataclass(frozen=True)
class Tally:
    first_voters: tuple[tuple[int, ...], ...]
    plu: tuple[int, ...]
    sw1: tuple[Fraction, ...]

    @property
    def max_sw1(self) -> Fraction:
        return max(self.sw1)


@dataclass(frozen=True)
class Shortlist:
    lam: Fraction
    a_star: int
    members: tuple[int, ...]
    winner: int


def _argmax(values: Sequence) -> int:
    best = 0
    for x in range(1, len(values)):
        if values[x] > values[best]:
            best = x
    return best


def tally(ordinal: OrdinalProfile, top_values: Sequence) -> Tally:
    """Group voters by their top candidate and sum their top values."""
    m = ordinal.n_alternatives
    if len(top_values) != ordinal.n_agents:
        raise ValueError("need one top value per voter")
    groups: list[list[int]] = [[] for _ in range(m)]
    sw1 = [Fraction(0)] * m
    for i, v in enumerate(top_values):
        x = ordinal.top(i)
        groups[x].append(i)
        sw1[x] += as_rat(v)
    return Tally(tuple(tuple(g) for g in groups), tuple(len(g) for g in groups), tuple(sw1))


def top_values_from(prediction: Prediction, ordinal: OrdinalProfile) -> tuple[Fraction, ...]:
    """Project a cardinal prediction onto the voters' top-ranked values."""
    if isinstance(prediction, TopValues):
        return prediction.values
    if isinstance(prediction, FullProfile):
        return prediction.profile.top_values(ordinal)
    if isinstance(prediction, Truncated):
        return tuple(row[0] for row in prediction.profile.values)
    raise TypeError(f"{type(prediction).__name__} carries no predicted values")


def plurality_winner(ordinal: OrdinalProfile) -> int:
    counts = [0] * ordinal.n_alternatives
    for x in ordinal.tops():
        counts[x] += 1
    return _argmax(counts)


def _warn_out_of_range(ordinal: OrdinalProfile, predicted_top: Sequence) -> None:
    lo = Fraction(1, ordinal.n_alternatives)
    if any(not lo <= as_rat(v) <= 1 for v in predicted_top):
        warnings.warn("predicted top values outside [1/m, 1] cannot come from a unit-sum profile", stacklevel=3)


def mechanism1(ordinal: OrdinalProfile, predicted_top: Sequence) -> int:
    """Candidate with maximum predicted first-place welfare.

    Ties go to the higher plurality score, then to the lower index. This is
    the order Mechanism 2 applies inside its ``lam = 1`` shortlist, so the
    two rules agree everywhere.
    """
    _warn_out_of_range(ordinal, predicted_top)
    t = tally(ordinal, predicted_top)
    return max(range(ordinal.n_alternatives), key=lambda x: (t.sw1[x], t.plu[x], -x))


def mechanism2(ordinal: OrdinalProfile, predicted_top: Sequence, lam) -> tuple[int, Shortlist]:
    """Most-plurality candidate among those within factor ``lam`` of the best
    predicted first-place welfare.

    With ``lam == 1`` this picks the same winner as :func:`mechanism1`.
    """
    lam = as_rat(lam)
    m = ordinal.n_alternatives
    if not 1 <= lam <= m:
        raise ValueError(f"lambda must lie in [1, {m}], got {lam}")
    _warn_out_of_range(ordinal, predicted_top)
    t = tally(ordinal, predicted_top)
    a_star = _argmax(t.sw1)
    # sw1(x) >= sw1(a*)/lam, kept division-free
    members = tuple(x for x in range(m) if lam * t.sw1[x] >= t.sw1[a_star])
    winner = max(members, key=lambda x: (t.plu[x], -x))
    return winner, Shortlist(lam, a_star, members, winner)


def rho(candidate: int, t: Tally) -> Ratio:
    """Factor by which ``candidate`` falls short of the best first-place welfare."""
    best = t.max_sw1
    if best == 0:
        return Fraction(1)
    if t.sw1[candidate] == 0:
        return INF
    return best / t.sw1[candidate]


@dataclass(frozen=True)
class EtaVoting:
    eta_winner: Ratio
    eta: Ratio  # max over the shortlist
    per_candidate: dict[int, Ratio]
    rho_pred: Ratio  # rho(winner | prediction)
    rho_true: Ratio
    bound: Ratio  # m * eta * rho_pred
    shortlist: Shortlist


def _eta(rho_true: Ratio, rho_pred: Ratio) -> Ratio:
    if rho_true == INF:
        return INF
    if rho_pred == INF:
        return Fraction(1)
    return max(rho_true / rho_pred, Fraction(1))


def eta_voting(
    winner: int,
    true_profile: ValuationProfile,
    predicted_top: Sequence,
    ordinal: OrdinalProfile,
    lam=1,
) -> EtaVoting:
    """Prediction error of the shortlist built from ``predicted_top``."""
    m = ordinal.n_alternatives
    _, shortlist = mechanism2(ordinal, predicted_top, lam)
    if winner not in shortlist.members:
        raise ValueError(f"winner {winner} is not in the shortlist {shortlist.members}")
    t_true = tally(ordinal, true_profile.top_values(ordinal))
    t_pred = tally(ordinal, predicted_top)
    per = {x: _eta(rho(x, t_true), rho(x, t_pred)) for x in shortlist.members}
    eta = max(per.values())
    rho_pred = rho(winner, t_pred)
    return EtaVoting(
        eta_winner=per[winner],
        eta=eta,
        per_candidate=per,
        rho_pred=rho_pred,
        rho_true=rho(winner, t_true),
        bound=m * eta * rho_pred,
        shortlist=shortlist,
    )
