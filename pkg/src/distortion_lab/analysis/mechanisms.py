"""Mechanism registry plus consistency/robustness evaluators."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

from ..core import (
    MATCHING,
    VOTING,
    FullProfile,
    Instance,
    Matching,
    OptimalCandidate,
    Ratio,
    Truncated,
    TruncatedProfile,
    ValuationProfile,
    as_rat,
    prediction_accurate,
    social_welfare,
)
from .._kernels import assignment_values
from ..matching import max_weight_matching, mechanism3, mechanism_full
from ..voting import mechanism1, mechanism2, plurality_winner, top_values_from
from .oracle import DistortionReport, worst_ratio

MECHANISMS = ("plurality", "mech1", "mech2", "match_full", "mech3")
FLAVOR = {"plurality": VOTING, "mech1": VOTING, "mech2": VOTING, "match_full": MATCHING, "mech3": MATCHING}


class MechanismMismatch(ValueError):
    """The mechanism cannot run on this instance (flavor, prediction or parameter)."""


def truncated_prediction(instance: Instance, k: int | None):
    """The ``k``-truncated prediction that ``mech3`` would see."""
    p = instance.prediction
    n = instance.n
    if isinstance(p, Truncated):
        k = p.profile.k if k is None else k
        if not 1 <= k <= p.profile.k:
            raise MechanismMismatch(f"k={k} outside [1, {p.profile.k}] for this truncated prediction")
        if k == p.profile.k:
            return p.profile
        return TruncatedProfile(k, [row[:k] for row in p.profile.values])
    if isinstance(p, FullProfile):
        k = n if k is None else k
        if not 1 <= k <= n:
            raise MechanismMismatch(f"k={k} outside [1, {n}]")
        return p.profile.truncate(instance.ordinal, k)
    raise MechanismMismatch(f"mech3 needs a truncated or full prediction, got {type(p).__name__}")


def run_mechanism(instance: Instance, mechanism: str, lam=None, k: int | None = None):
    """Outcome (candidate index or :class:`Matching`) of a named mechanism."""
    if mechanism not in MECHANISMS:
        raise MechanismMismatch(f"unknown mechanism {mechanism!r}; choose from {', '.join(MECHANISMS)}")
    if FLAVOR[mechanism] != instance.flavor:
        raise MechanismMismatch(f"{mechanism} runs on {FLAVOR[mechanism]} instances, not {instance.flavor}")
    ordinal = instance.ordinal
    p = instance.prediction
    if mechanism == "plurality":
        return plurality_winner(ordinal)
    if mechanism in ("mech1", "mech2"):
        if isinstance(p, OptimalCandidate):
            raise MechanismMismatch(f"{mechanism} needs predicted values, not a predicted candidate")
        top = top_values_from(p, ordinal)
        if mechanism == "mech1":
            return mechanism1(ordinal, top)
        if lam is None:
            raise MechanismMismatch("mech2 needs lambda")
        lam = as_rat(lam)
        if not 1 <= lam <= instance.m:
            raise MechanismMismatch(f"lambda={lam} outside [1, {instance.m}]")
        return mechanism2(ordinal, top, lam)[0]
    if mechanism == "match_full":
        if not isinstance(p, FullProfile):
            raise MechanismMismatch("match_full needs a full predicted profile")
        return mechanism_full(ordinal, p.profile).matching
    return mechanism3(ordinal, truncated_prediction(instance, k)).matching


def optimum(profile, matching: bool) -> Fraction:
    """Optimal welfare, computed independently of the mechanisms' solver.

    Candidates are enumerated; matchings go through the integer subset DP
    (exact, and unrelated to the Hungarian code it is used to check).
    """
    if not matching:
        return max(social_welfare(x, profile) for x in range(profile.n_alternatives))
    vals = profile.values
    n = len(vals)
    den = math.lcm(*(v.denominator for row in vals for v in row))
    if n > 16 or n * den * max(max(row) for row in vals) >= 2**62:
        return max_weight_matching(profile).welfare
    ints = np.array([[[int(v * den) for v in row] for row in vals]], dtype=np.int64)
    return Fraction(int(assignment_values(ints)[0]), den)


def brute_force_optimum(profile) -> Fraction:
    """Maximum matching welfare over all ``n!`` permutations."""
    vals = profile.values
    n = len(vals)
    return max(sum((vals[i][p[i]] for i in range(n)), Fraction(0)) for p in itertools.permutations(range(n)))


def ratio_on(truth: ValuationProfile, outcome, matching: bool) -> Ratio:
    num = optimum(truth, matching)
    den = social_welfare(outcome, truth)
    if den == 0:
        return float("inf") if num > 0 else Fraction(1)
    return num / den


def consistency_of(instance: Instance, mechanism: str, lam=None, k: int | None = None) -> Ratio:
    """Ratio of optimal to achieved true welfare when the prediction is accurate."""
    if instance.truth is None:
        raise ValueError("consistency needs a true profile")
    p = instance.prediction
    if mechanism == "mech3" and isinstance(p, FullProfile) and k is not None:
        accurate = prediction_accurate(instance.truth, Truncated(truncated_prediction(instance, k)), instance.ordinal)
    else:
        accurate = prediction_accurate(instance.truth, p, instance.ordinal)
    if not accurate:
        raise ValueError("the prediction is not accurate for the stored truth")
    outcome = run_mechanism(instance, mechanism, lam=lam, k=k)
    return ratio_on(instance.truth, outcome, isinstance(outcome, Matching))


def robustness_of(instance: Instance, mechanism: str, lam=None, k: int | None = None, **oracle_kw) -> DistortionReport:
    """Worst case over every truth consistent with the ordinal profile, the
    prediction held fixed."""
    outcome = run_mechanism(instance, mechanism, lam=lam, k=k)
    return worst_ratio(instance.ordinal, outcome, **oracle_kw)


def theoretical_bound(mechanism: str, ratio_class: str, n: int, m: int, lam=None, k=None, eta=None, rho=None) -> Ratio | None:
    """Proven upper bound for a mechanism and ratio class, or None when none applies."""
    if mechanism == "plurality":
        return None
    if mechanism in ("mech1", "mech2"):
        lam = Fraction(1) if mechanism == "mech1" else as_rat(lam)
        if ratio_class == "consistency":
            return lam * m
        if ratio_class == "robustness":
            b = Fraction(m**3) / lam
            return min(b, Fraction(n * m)) if mechanism == "mech1" else b
        return m * eta * rho
    if mechanism == "match_full":
        return Fraction(1) if ratio_class == "consistency" else Fraction(n * n)
    if ratio_class == "consistency":
        return Fraction(n, k) + 2
    if ratio_class == "robustness":
        return Fraction(n * n)
    return min((Fraction(n, k) + 1) * eta, Fraction(n * n))
