"""Exact worst-case distortion by vertex enumeration.

For a fixed outcome ``w`` the worst-case ratio ``max_z SW(z|v) / SW(w|v)``
is a maximum of linear-fractional functions of ``v``. Each agent's feasible
set (non-negative, unit-sum, non-increasing along her ranking) is a simplex
whose extreme points are the prefix-uniform rows: ``1/p`` on her top ``p``
alternatives and ``0`` elsewhere. A maximum of linear-fractional functions is
quasiconvex where the denominator is positive, so its supremum over the
product of these simplices is reached at a product of extreme points. A
vertex with zero denominator and positive numerator makes the ratio
unbounded; those are reported as ``inf``.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .. import _kernels
from ..core import (
    INF,
    Matching,
    OrdinalProfile,
    Ratio,
    ValuationProfile,
    social_welfare,
    vertex_row,
)
from ..matching import max_weight_matching

VOTING_MAX_AGENTS = 8
VOTING_MAX_CANDIDATES = 6
MATCHING_MAX_AGENTS = 6


class SizeLimitError(ValueError):
    pass


def size_override() -> bool:
    return os.environ.get("DISTORTION_LAB_SIZE_OVERRIDE", "0") not in ("", "0")


@dataclass(frozen=True)
class VertexProfile:
    """Per-agent prefix lengths; agent ``i`` values her top ``prefix[i]`` at ``1/prefix[i]``."""

    prefix: tuple[int, ...]

    def expand(self, ordinal: OrdinalProfile) -> ValuationProfile:
        return ValuationProfile([vertex_row(order, p) for order, p in zip(ordinal.rankings, self.prefix)])


@dataclass(frozen=True)
class DistortionReport:
    ratio: Ratio
    witness_truth: ValuationProfile
    witness_best: int | Matching
    mechanism_output: int | Matching

    def recompute(self) -> Ratio:
        num = social_welfare(self.witness_best, self.witness_truth)
        den = social_welfare(self.mechanism_output, self.witness_truth)
        if den == 0:
            return INF if num > 0 else Fraction(1)
        return num / den


def best_outcome(profile: ValuationProfile, matching: bool):
    """Welfare-maximising candidate (lowest index) or matching (lex-smallest)."""
    if matching:
        return max_weight_matching(profile).matching
    sw = [social_welfare(x, profile) for x in range(profile.n_alternatives)]
    return sw.index(max(sw))


def _guard(ordinal: OrdinalProfile, matching: bool, override: bool) -> None:
    if override or size_override():
        return
    n, m = ordinal.n_agents, ordinal.n_alternatives
    if matching and n > MATCHING_MAX_AGENTS:
        raise SizeLimitError(f"matching oracle limited to n <= {MATCHING_MAX_AGENTS} (got n={n})")
    if not matching and (n > VOTING_MAX_AGENTS or m > VOTING_MAX_CANDIDATES):
        raise SizeLimitError(
            f"voting oracle limited to n <= {VOTING_MAX_AGENTS}, m <= {VOTING_MAX_CANDIDATES} (got n={n}, m={m})"
        )


def worst_ratio(
    ordinal: OrdinalProfile,
    outcome: int | Matching,
    *,
    override: bool = False,
    workers: int = 1,
) -> DistortionReport:
    """Exact supremum of ``best welfare / welfare of outcome`` over all
    unit-sum profiles consistent with ``ordinal``.

    The search is split into slices by the first agent's prefix length; with
    ``workers > 1`` slices run on a thread pool (the kernels release the GIL)
    and are reduced in slice order, so the witness does not depend on timing.
    """
    matching = isinstance(outcome, Matching)
    _guard(ordinal, matching, override)
    m = ordinal.n_alternatives
    table, _ = _kernels.vertex_table(ordinal.positions())
    _kernels.check_range(table)
    if matching:
        item_of = np.array(outcome.item_of, dtype=np.int64)

        def run(lo, hi):
            return _kernels.matching_vertex_max(table, item_of, lo, hi)
    else:

        def run(lo, hi):
            return _kernels.voting_vertex_max(table, int(outcome), lo, hi)

    slices = [(p, p + 1) for p in range(m)] if workers > 1 else [(0, m)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda s: run(*s), slices))
    else:
        results = [run(*s) for s in slices]
    best = (0, 1, None)
    for num, den, digits in results:
        if digits is not None and _kernels._better(num, den, best[0], best[1]):
            best = (num, den, digits)
    witness = VertexProfile(tuple(int(d) + 1 for d in best[2])).expand(ordinal)
    best_alt = best_outcome(witness, matching)
    report = DistortionReport(Fraction(0), witness, best_alt, outcome)
    ratio = report.recompute()
    expected = _kernels.as_fraction(best[0], best[1])
    if ratio != expected:  # pragma: no cover - kernel/exact path disagreement
        raise RuntimeError(f"kernel ratio {expected} disagrees with exact recomputation {ratio}")
    return DistortionReport(ratio, witness, best_alt, outcome)
