"""Prediction-error sweeps: corrupt an accurate prediction step by step and
compare the realized ratio with the error-dependent bound."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..core import (
    INF,
    MATCHING,
    FullProfile,
    Instance,
    Matching,
    OrdinalProfile,
    Ratio,
    ValuationProfile,
    as_rat,
    social_welfare,
    validate,
    vertex_row,
)
from ..matching import eta_matching, mechanism3
from ..voting import eta_voting, mechanism2
from .mechanisms import optimum

DEFAULT_LEVELS = tuple(Fraction(i, 4) for i in range(5))


@dataclass(frozen=True)
class SweepRow:
    level: Fraction
    outcome: int | Matching
    true_welfare: Fraction
    optimal_welfare: Fraction
    realized: Ratio
    eta: Ratio
    rho: Ratio | None  # voting only: rho(w | prediction)
    bound: Ratio
    eta_winner: Ratio | None = None  # voting only: eta of the winner alone
    eta_cap: Ratio | None = None  # voting only: m^2 / (lambda * rho), compared with eta_winner
    eta_below_one: bool = False

    @property
    def ok(self) -> bool:
        return self.realized <= self.bound


def designated_adversary(truth: ValuationProfile, ordinal: OrdinalProfile) -> ValuationProfile:
    """Push every agent to the far vertex: flat if her top value is at least
    1/2, all mass on the top alternative otherwise."""
    m = ordinal.n_alternatives
    rows = []
    for i, order in enumerate(ordinal.rankings):
        top = truth.values[i][order[0]]
        rows.append(vertex_row(order, m if top >= Fraction(1, 2) else 1))
    return ValuationProfile(rows)


def corrupt(
    truth: ValuationProfile, adversary: ValuationProfile, ordinal: OrdinalProfile, level
) -> ValuationProfile:
    """Convex combination ``(1 - level) * truth + level * adversary``, clamped
    so values never increase along each ranking, then revalidated."""
    t = as_rat(level)
    if not 0 <= t <= 1:
        raise ValueError(f"corruption level {t} outside [0, 1]")
    rows = []
    for i, order in enumerate(ordinal.rankings):
        row = [Fraction(0)] * len(order)
        cap = None
        for x in order:
            v = (1 - t) * truth.values[i][x] + t * adversary.values[i][x]
            if cap is not None and v > cap:
                v = cap
            row[x] = cap = v
        rows.append(row)
    out = ValuationProfile(rows)
    bad = validate(out, ordinal)
    if bad:
        raise ValueError(f"corrupted prediction is not consistent with the rankings: {bad[0]}")
    return out


def error_sweep(
    instance: Instance,
    levels: Sequence = DEFAULT_LEVELS,
    *,
    lam=1,
    k: int | None = None,
    adversary: ValuationProfile | None = None,
) -> list[SweepRow]:
    """One row per corruption level.

    Voting instances run the shortlist mechanism with parameter ``lam``;
    the bound is ``m * eta * rho``. Matching instances run the truncated
    mechanism with ``k`` (default ``n // 2``, at least 1); the bound is
    ``min((n/k + 1) * eta, n^2)``.
    """
    truth = instance.truth
    if truth is None:
        raise ValueError("an error sweep needs a true profile")
    ordinal = instance.ordinal
    if adversary is None:
        adversary = designated_adversary(truth, ordinal)
    elif validate(adversary, ordinal):
        raise ValueError("adversarial prediction is not consistent with the rankings")
    matching = instance.flavor == MATCHING
    n, m = instance.n, instance.m
    opt = optimum(truth, matching)
    if matching:
        k = max(1, n // 2) if k is None else k
        if not 1 <= k <= n:
            raise ValueError(f"k={k} outside [1, {n}]")
    else:
        lam = as_rat(lam)
    rows = []
    for level in levels:
        pred = corrupt(truth, adversary, ordinal, level)
        if matching:
            trunc = pred.truncate(ordinal, k)
            mu = mechanism3(ordinal, trunc).matching
            em = eta_matching(truth, trunc, ordinal, k)
            sw = social_welfare(mu, truth)
            rows.append(
                SweepRow(as_rat(level), mu, sw, opt, _ratio(opt, sw), em.eta, None, em.bound, eta_below_one=em.below_one)
            )
        else:
            top = pred.top_values(ordinal)
            w, _ = mechanism2(ordinal, top, lam)
            ev = eta_voting(w, truth, top, ordinal, lam)
            sw = social_welfare(w, truth)
            cap = INF if ev.rho_pred == INF else Fraction(m * m) / (lam * ev.rho_pred)
            rows.append(
                SweepRow(as_rat(level), w, sw, opt, _ratio(opt, sw), ev.eta, ev.rho_pred, ev.bound, ev.eta_winner, cap)
            )
    return rows


def _ratio(num: Fraction, den: Fraction) -> Ratio:
    if den == 0:
        return INF if num > 0 else Fraction(1)
    return num / den


def accurate_instance(flavor: str, truth: ValuationProfile, ordinal: OrdinalProfile, meta=None) -> Instance:
    """Instance whose prediction is the full true profile."""
    return Instance(flavor, ordinal, FullProfile(truth), truth, dict(meta or {}))
