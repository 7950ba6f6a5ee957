"""Domain types, exact arithmetic helpers and welfare computation.

All values are :class:`fractions.Fraction`. A worst-case ratio may also be
``math.inf``; ``Fraction`` compares correctly against it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence, Union

import numpy as np

Rat = Fraction
Ratio = Union[Fraction, float]
INF = math.inf


def as_rat(x) -> Fraction:
    """Exact conversion of ints, Fractions, ``"p/q"`` and decimal strings.

    Floats are refused because their binary expansion is almost never the
    value the caller meant.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational value")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError(f"refusing inexact float {x!r}; pass a string instead")
    return Fraction(x)


def fmt_ratio(x: Ratio) -> str:
    """Render as ``"p/q"`` (always with a denominator) or ``"inf"``."""
    if x == INF:
        return "inf"
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def rat_matrix(rows) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(as_rat(v) for v in row) for row in rows)


# --------------------------------------------------------------------------
# ordinal data


def _check_permutation(order: Sequence[int], size: int) -> None:
    if sorted(order) != list(range(size)):
        raise ValueError(f"ranking {list(order)} is not a permutation of 0..{size - 1}")


@dataclass(frozen=True)
class OrdinalProfile:
    """One strict ranking (best first) per agent over ``0..n_alternatives-1``."""

    rankings: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rankings = tuple(tuple(int(x) for x in r) for r in self.rankings)
        object.__setattr__(self, "rankings", rankings)
        if not rankings:
            raise ValueError("an ordinal profile needs at least one agent")
        size = len(rankings[0])
        if size == 0:
            raise ValueError("an ordinal profile needs at least one alternative")
        for r in rankings:
            if len(r) != size:
                raise ValueError("all rankings must have the same length")
            _check_permutation(r, size)

    @property
    def n_agents(self) -> int:
        return len(self.rankings)

    @property
    def n_alternatives(self) -> int:
        return len(self.rankings[0])

    def top(self, agent: int) -> int:
        return self.rankings[agent][0]

    def tops(self) -> tuple[int, ...]:
        return tuple(r[0] for r in self.rankings)

    def positions(self) -> np.ndarray:
        """``pos[i, x]`` is the 0-based rank of alternative ``x`` for agent ``i``."""
        n, m = self.n_agents, self.n_alternatives
        pos = np.empty((n, m), dtype=np.int64)
        for i, r in enumerate(self.rankings):
            pos[i, list(r)] = np.arange(m)
        return pos


# --------------------------------------------------------------------------
# cardinal data


@dataclass(frozen=True)
class ValuationProfile:
    """``values[i][x]``: value of agent ``i`` for alternative ``x`` (item space).

    Construction does not validate; use :func:`validate` against an ordinal
    profile to get the list of violations.
    """

    values: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "values", rat_matrix(self.values))

    @property
    def n_agents(self) -> int:
        return len(self.values)

    @property
    def n_alternatives(self) -> int:
        return len(self.values[0]) if self.values else 0

    def row(self, agent: int) -> tuple[Fraction, ...]:
        return self.values[agent]

    def top_values(self, ordinal: OrdinalProfile) -> tuple[Fraction, ...]:
        return tuple(self.values[i][ordinal.top(i)] for i in range(self.n_agents))

    def truncate(self, ordinal: OrdinalProfile, k: int) -> "TruncatedProfile":
        rows = [[self.values[i][x] for x in ordinal.rankings[i][:k]] for i in range(self.n_agents)]
        return TruncatedProfile(k, rows)

    def to_integer(self) -> tuple[np.ndarray, int]:
        """Common-denominator form ``(numerators, D)`` with ``values == numerators / D``."""
        den = 1
        for row in self.values:
            for v in row:
                den = math.lcm(den, v.denominator)
        arr = np.array([[int(v * den) for v in row] for row in self.values], dtype=np.int64)
        return arr, den


@dataclass(frozen=True)
class TruncatedProfile:
    """Values of each agent for her ``k`` best alternatives, stored by rank.

    ``values[i][l]`` is agent ``i``'s value for the alternative she ranks at
    (0-based) position ``l``.
    """

    k: int
    values: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "values", rat_matrix(self.values))
        if self.k < 1:
            raise ValueError(f"k must be at least 1, got {self.k}")
        for row in self.values:
            if len(row) != self.k:
                raise ValueError(f"truncated rows must have exactly k={self.k} entries")

    @property
    def n_agents(self) -> int:
        return len(self.values)

    def violations(self) -> list["Violation"]:
        out = []
        for i, row in enumerate(self.values):
            for l, v in enumerate(row):
                if v < 0:
                    out.append(Violation("negative", i, f"rank {l} value {v}"))
            for l in range(1, len(row)):
                if row[l] > row[l - 1]:
                    out.append(Violation("monotonicity", i, f"rank {l} exceeds rank {l - 1}"))
            if sum(row) > 1:
                out.append(Violation("row_sum", i, f"prefix sum {sum(row)} exceeds 1"))
        return out

    def extendable(self, n_alternatives: int) -> bool:
        """Whether every row can be completed to a unit-sum ordered profile."""
        if self.violations():
            return False
        for row in self.values:
            if sum(row) + (n_alternatives - self.k) * row[-1] < 1:
                return False
            if self.k == n_alternatives and sum(row) != 1:
                return False
        return True


# --------------------------------------------------------------------------
# predictions and instances


@dataclass(frozen=True)
class OptimalCandidate:
    index: int


@dataclass(frozen=True)
class FullProfile:
    profile: ValuationProfile


@dataclass(frozen=True)
class TopValues:
    values: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(as_rat(v) for v in self.values))


@dataclass(frozen=True)
class Truncated:
    profile: TruncatedProfile


Prediction = Union[OptimalCandidate, FullProfile, TopValues, Truncated]

VOTING = "voting"
MATCHING = "matching"


@dataclass(frozen=True)
class Instance:
    flavor: str
    ordinal: OrdinalProfile
    prediction: Prediction
    truth: ValuationProfile | None = None
    meta: dict[str, Any] = field(default_factory=dict, compare=True)

    def __post_init__(self):
        if self.flavor not in (VOTING, MATCHING):
            raise ValueError(f"unknown flavor {self.flavor!r}")
        n, m = self.ordinal.n_agents, self.ordinal.n_alternatives
        if self.flavor == MATCHING and n != m:
            raise ValueError(f"matching instances need n == m, got n={n}, m={m}")
        if self.truth is not None:
            if (self.truth.n_agents, self.truth.n_alternatives) != (n, m):
                raise ValueError("truth dimensions do not match the ordinal profile")
            bad = validate(self.truth, self.ordinal)
            if bad:
                raise ValueError(f"truth is not a valid profile: {bad[0]}")
        _check_prediction_shape(self.prediction, n, m)

    @property
    def n(self) -> int:
        return self.ordinal.n_agents

    @property
    def m(self) -> int:
        return self.ordinal.n_alternatives


def _check_prediction_shape(p: Prediction, n: int, m: int) -> None:
    if isinstance(p, OptimalCandidate):
        if not 0 <= p.index < m:
            raise ValueError(f"predicted candidate {p.index} out of range")
    elif isinstance(p, FullProfile):
        if (p.profile.n_agents, p.profile.n_alternatives) != (n, m):
            raise ValueError("predicted profile dimensions do not match")
    elif isinstance(p, TopValues):
        if len(p.values) != n:
            raise ValueError("need exactly one predicted top value per agent")
    elif isinstance(p, Truncated):
        if p.profile.n_agents != n or not 1 <= p.profile.k <= m:
            raise ValueError("truncated prediction has the wrong shape or k")
    else:
        raise TypeError(f"unknown prediction type {type(p).__name__}")


def prediction_accurate(truth: ValuationProfile, prediction: Prediction, ordinal: OrdinalProfile) -> bool:
    """Whether ``truth`` agrees with every value the prediction defines."""
    if isinstance(prediction, OptimalCandidate):
        sw = [social_welfare(x, truth) for x in range(truth.n_alternatives)]
        return sw[prediction.index] == max(sw)
    if isinstance(prediction, FullProfile):
        return prediction.profile.values == truth.values
    if isinstance(prediction, TopValues):
        return tuple(prediction.values) == truth.top_values(ordinal)
    if isinstance(prediction, Truncated):
        return truth.truncate(ordinal, prediction.profile.k).values == prediction.profile.values
    raise TypeError(f"unknown prediction type {type(prediction).__name__}")


# --------------------------------------------------------------------------
# matchings


@dataclass(frozen=True)
class Matching:
    """Perfect matching; ``item_of[i]`` is the item assigned to agent ``i``."""

    item_of: tuple[int, ...]

    def __post_init__(self):
        item_of = tuple(int(x) for x in self.item_of)
        object.__setattr__(self, "item_of", item_of)
        _check_permutation(item_of, len(item_of))

    def __len__(self):
        return len(self.item_of)

    def agent_of(self, item: int) -> int:
        return self.item_of.index(item)


# --------------------------------------------------------------------------
# operations


@dataclass(frozen=True)
class Violation:
    kind: str  # "negative" | "row_sum" | "monotonicity" | "shape"
    agent: int
    detail: str
    deficit: Fraction | None = None


def validate(profile: ValuationProfile, ordinal: OrdinalProfile) -> list[Violation]:
    """List every violation of non-negativity, unit-sum and rank monotonicity.

    Value ties are allowed; monotonicity only asks that values never increase
    along the agent's ranking.
    """
    if (profile.n_agents, profile.n_alternatives) != (ordinal.n_agents, ordinal.n_alternatives):
        return [Violation("shape", -1, "profile and ordinal dimensions differ")]
    out = []
    for i, row in enumerate(profile.values):
        for x, v in enumerate(row):
            if v < 0:
                out.append(Violation("negative", i, f"value {v} for alternative {x}"))
        total = sum(row, Fraction(0))
        if total != 1:
            out.append(Violation("row_sum", i, f"row sums to {total}", deficit=1 - total))
        order = ordinal.rankings[i]
        for a, b in zip(order, order[1:]):
            if row[b] > row[a]:
                out.append(Violation("monotonicity", i, f"alternative {b} valued above {a}"))
                break
    return out


def induced_ranking(values: Sequence) -> tuple[int, ...]:
    """Alternatives by value, best first; ties go to the lower index."""
    vals = [as_rat(v) for v in values]
    return tuple(sorted(range(len(vals)), key=lambda x: (-vals[x], x)))


def social_welfare(outcome, profile) -> Fraction:
    """Total value of a candidate (int) or of a :class:`Matching`.

    ``profile`` may be a :class:`ValuationProfile` or anything with a
    ``values`` matrix, e.g. a zero-completed weight matrix.
    """
    values = profile.values
    if isinstance(outcome, Matching):
        return sum((values[i][x] for i, x in enumerate(outcome.item_of)), Fraction(0))
    return sum((row[outcome] for row in values), Fraction(0))


def complete_truncated(t: TruncatedProfile, ordinal: OrdinalProfile):
    """Item-space matrix with every rank beyond ``k`` set to zero.

    The result is an evaluation-only weight matrix; its rows generally sum to
    less than one.
    """
    from .matching import WeightMatrix

    m = ordinal.n_alternatives
    if not 1 <= t.k <= m:
        raise ValueError(f"k={t.k} outside [1, {m}]")
    if t.n_agents != ordinal.n_agents:
        raise ValueError("truncated profile and ordinal profile have different agent counts")
    rows = []
    for i, order in enumerate(ordinal.rankings):
        row = [Fraction(0)] * m
        for l in range(t.k):
            row[order[l]] = t.values[i][l]
        rows.append(row)
    return WeightMatrix(rows, unit_sum=False)


# --------------------------------------------------------------------------
# sampling helpers (used by tests, the CLI random family and the sweeps)


def vertex_row(order: Sequence[int], prefix: int) -> list[Fraction]:
    """Value ``1/prefix`` on the top ``prefix`` alternatives of ``order``."""
    row = [Fraction(0)] * len(order)
    for x in order[:prefix]:
        row[x] = Fraction(1, prefix)
    return row


def random_ordinal(n: int, m: int, rng: np.random.Generator) -> OrdinalProfile:
    return OrdinalProfile(tuple(tuple(int(x) for x in rng.permutation(m)) for _ in range(n)))


def random_rank_values(n: int, m: int, rng: np.random.Generator, denominator: int) -> np.ndarray:
    """Integer rows in rank space, non-increasing, each summing to ``denominator``."""
    cuts = np.sort(rng.integers(0, denominator + 1, size=(n, m - 1)), axis=1)
    edges = np.concatenate(
        [np.zeros((n, 1), dtype=np.int64), cuts, np.full((n, 1), denominator, dtype=np.int64)], axis=1
    )
    parts = np.diff(edges, axis=1)
    return -np.sort(-parts, axis=1)


def random_profile(
    ordinal: OrdinalProfile, rng: np.random.Generator, denominator: int = 720, vertex_prob: float = 0.0
) -> ValuationProfile:
    """Random valid profile consistent with ``ordinal``.

    With probability ``vertex_prob`` an agent's row is a prefix-uniform
    vertex instead of an interior point.
    """
    n, m = ordinal.n_agents, ordinal.n_alternatives
    ranks = random_rank_values(n, m, rng, denominator)
    rows = []
    for i, order in enumerate(ordinal.rankings):
        if vertex_prob and rng.random() < vertex_prob:
            rows.append(vertex_row(order, int(rng.integers(1, m + 1))))
            continue
        row = [Fraction(0)] * m
        for l, x in enumerate(order):
            row[x] = Fraction(int(ranks[i, l]), denominator)
        rows.append(row)
    return ValuationProfile(rows)
