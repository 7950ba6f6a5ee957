"""Lower-bound instance families.

Every generator returns a :class:`GeneratedInstance` whose ``expected``
values are closed forms in the parameters. :meth:`GeneratedInstance.checks`
recomputes them from the emitted profiles, so nothing stored here is trusted
at check time.

Indexing (0-based): in the voting families ``a_1..a_{m-1}`` are ``0..m-2``
and ``o`` is ``m-1``; in the tradeoff family ``a`` is ``0``, ``b_l`` is ``l``
and ``c_l`` is ``k+l``. Voter groups are laid out in order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from ..core import (
    MATCHING,
    VOTING,
    FullProfile,
    Instance,
    Matching,
    OptimalCandidate,
    OrdinalProfile,
    TopValues,
    Truncated,
    TruncatedProfile,
    ValuationProfile,
    prediction_accurate,
    random_ordinal,
    social_welfare,
    validate,
    vertex_row,
)
from ..matching import mechanism3
from .mechanisms import optimum


@dataclass(frozen=True)
class Check:
    name: str
    actual: Any
    relation: str  # "==", "<=", ">=", "<", ">"
    target: Any
    anchor: str = ""

    @property
    def ok(self) -> bool:
        a, t = self.actual, self.target
        return {
            "==": lambda: a == t,
            "<=": lambda: a <= t,
            ">=": lambda: a >= t,
            "<": lambda: a < t,
            ">": lambda: a > t,
        }[self.relation]()


@dataclass
class GeneratedInstance:
    family: str
    params: dict[str, Any]
    instance: Instance
    adversarial_truths: dict[str, ValuationProfile]
    expected: dict[str, Any]
    adversary: Callable[[Matching], ValuationProfile] | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    def checks(self) -> list[Check]:
        return _CHECKS[self.family](self)


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


def _vertex_profile(ordinal: OrdinalProfile, prefix: list[int]) -> ValuationProfile:
    return ValuationProfile([vertex_row(order, p) for order, p in zip(ordinal.rankings, prefix)])


def _rank_profile(ordinal: OrdinalProfile, rank_values: list[list[Fraction]]) -> ValuationProfile:
    rows = []
    for order, vals in zip(ordinal.rankings, rank_values):
        row = [Fraction(0)] * len(order)
        for x, v in zip(order, vals):
            row[x] = v
        rows.append(row)
    return ValuationProfile(rows)


def _validity_checks(gi: GeneratedInstance) -> list[Check]:
    out = []
    for name, truth in gi.adversarial_truths.items():
        out.append(Check(f"{name} valid", len(validate(truth, gi.instance.ordinal)), "==", 0))
    p = gi.instance.prediction
    if isinstance(p, FullProfile):
        out.append(Check("prediction valid", len(validate(p.profile, gi.instance.ordinal)), "==", 0))
    return out


# --------------------------------------------------------------------------
# optimal-candidate prediction


def _a_then_o(n: int, m: int) -> OrdinalProfile:
    o = m - 1
    size = n // (m - 1)
    rankings = []
    for l in range(m - 1):
        rest = [x for x in range(m - 1) if x != l]
        rankings += [tuple([l, o] + rest)] * size
    return OrdinalProfile(rankings)


def gen_optcand_lb(n: int, m: int) -> GeneratedInstance:
    """Groups ``S_l`` rank ``a_l`` first and ``o`` second; ``o`` is predicted optimal."""
    _require(m >= 2, "m must be at least 2")
    _require(n >= 1 and n % (m - 1) == 0, "(m-1) must divide n")
    ordinal = _a_then_o(n, m)
    size = n // (m - 1)
    truths = {"ones_on_top": _vertex_profile(ordinal, [1] * n)}
    for l in range(m - 1):
        prefix = [m if i // size == l else 2 for i in range(n)]
        truths[f"uniform_S{l + 1}"] = _vertex_profile(ordinal, prefix)
    sw_a = Fraction(n, m * (m - 1))
    sw_o = sw_a + Fraction(n - size, 2)
    expected = {
        "ones_on_top.sw_o": Fraction(0),
        "ones_on_top.sw_a": Fraction(size),
        "uniform.sw_a_l": sw_a,
        "uniform.sw_o": sw_o,
        "uniform.ratio": sw_o / sw_a,
        "uniform.sw_o_lower": Fraction(n, 2) * Fraction(m - 1, m),
    }
    inst = Instance(VOTING, ordinal, OptimalCandidate(m - 1), None, {"family": "optcand_lb", "n": n, "m": m})
    return GeneratedInstance("optcand_lb", {"n": n, "m": m}, inst, truths, expected)


def _check_optcand(gi: GeneratedInstance) -> list[Check]:
    n, m = gi.params["n"], gi.params["m"]
    o = m - 1
    e = gi.expected
    ordinal = gi.instance.ordinal
    ones = gi.adversarial_truths["ones_on_top"]
    out = _validity_checks(gi)
    anchor = "the social welfare of o is 0"
    out.append(Check("ones_on_top SW(o)", social_welfare(o, ones), "==", e["ones_on_top.sw_o"], anchor))
    for l in range(m - 1):
        out.append(Check(f"ones_on_top SW(a_{l + 1})", social_welfare(l, ones), "==", e["ones_on_top.sw_a"], anchor))
    for l in range(m - 1):
        t = gi.adversarial_truths[f"uniform_S{l + 1}"]
        sw_a, sw_o = social_welfare(l, t), social_welfare(o, t)
        out.append(Check(f"uniform_S{l + 1} SW(a_{l + 1})", sw_a, "==", e["uniform.sw_a_l"]))
        out.append(Check(f"uniform_S{l + 1} SW(o)", sw_o, "==", e["uniform.sw_o"]))
        out.append(Check(f"uniform_S{l + 1} SW(o) lower bound", sw_o, ">=", e["uniform.sw_o_lower"], "n/2 * (m-1)/m"))
        out.append(Check(f"uniform_S{l + 1} ratio if a_{l + 1} wins", sw_o / sw_a, "==", e["uniform.ratio"]))
        out.append(
            Check(f"uniform_S{l + 1} predicts o accurately", prediction_accurate(t, gi.instance.prediction, ordinal), "==", True)
        )
    return out


# --------------------------------------------------------------------------
# full-profile prediction, voting


def gen_fullval_lb(n: int, m: int) -> GeneratedInstance:
    """Same rankings as the optimal-candidate family, predicted ``1/2, 1/2`` tops."""
    _require(m >= 2, "m must be at least 2")
    _require(n >= 1 and n % (m - 1) == 0, "(m-1) must divide n")
    ordinal = _a_then_o(n, m)
    pred = _vertex_profile(ordinal, [2] * n)
    truths = {"ones_on_top": _vertex_profile(ordinal, [1] * n)}
    expected = {
        "pred.sw_o": Fraction(n, 2),
        "pred.sw_a": Fraction(n, 2 * (m - 1)),
        "pred.ratio_if_a": Fraction(m - 1),
        "truth.sw_o": Fraction(0),
    }
    inst = Instance(VOTING, ordinal, FullProfile(pred), None, {"family": "fullval_lb", "n": n, "m": m})
    return GeneratedInstance("fullval_lb", {"n": n, "m": m}, inst, truths, expected)


def _check_fullval(gi: GeneratedInstance) -> list[Check]:
    n, m = gi.params["n"], gi.params["m"]
    o = m - 1
    e = gi.expected
    pred = gi.instance.prediction.profile
    out = _validity_checks(gi)
    out.append(Check("predicted SW(o)", social_welfare(o, pred), "==", e["pred.sw_o"], "optimal one with social welfare n/2"))
    for l in range(m - 1):
        sw = social_welfare(l, pred)
        out.append(Check(f"predicted SW(a_{l + 1})", sw, "==", e["pred.sw_a"], "n/(2(m-1))"))
        out.append(Check(f"predicted ratio if a_{l + 1} wins", social_welfare(o, pred) / sw, "==", e["pred.ratio_if_a"]))
    out.append(Check("ones_on_top SW(o)", social_welfare(o, gi.adversarial_truths["ones_on_top"]), "==", e["truth.sw_o"]))
    return out


# --------------------------------------------------------------------------
# consistency/robustness tradeoff, voting


def gen_tradeoff_lb(m: int, lam=1) -> GeneratedInstance:
    """Groups ``B_l`` (``lam*m`` voters) and ``C_l`` (``m^2`` voters) around a common second choice ``a``."""
    lam = Fraction(lam)
    _require(m >= 5 and m % 2 == 1, "m must be odd and at least 5")
    _require(1 <= lam <= m, f"lambda must lie in [1, {m}]")
    _require((lam * m).denominator == 1, "lambda*m must be an integer")
    k = (m - 1) // 2
    a = 0
    bs = list(range(1, k + 1))
    cs = list(range(k + 1, 2 * k + 1))
    size_b = int(lam * m)
    rankings, prefix_pred, groups = [], [], []
    for l in range(k):
        r = tuple([bs[l], a] + cs + [b for b in bs if b != bs[l]])
        rankings += [r] * size_b
        prefix_pred += [2] * size_b
        groups += [("B", l)] * size_b
    for l in range(k):
        r = tuple([cs[l], a] + bs + [c for c in cs if c != cs[l]])
        rankings += [r] * (m * m)
        prefix_pred += [k + 2] * (m * m)
        groups += [("C", l)] * (m * m)
    ordinal = OrdinalProfile(rankings)
    n = ordinal.n_agents
    pred = _vertex_profile(ordinal, prefix_pred)
    truths = {"case1_ones_on_top": _vertex_profile(ordinal, [1] * n)}
    for l in range(k):
        prefix = [m if g == ("B", l) else 2 for g in groups]
        truths[f"case2_b{l + 1}"] = _vertex_profile(ordinal, prefix)
    km2 = Fraction(k * m * m)
    expected = {
        "n": int(k * m * (lam + m)),
        "pred.sw_a": k * lam * m / 2 + km2 / (k + 2),
        "pred.sw_b": lam * m / 2 + km2 / (k + 2),
        "pred.sw_c": Fraction(m * m, k + 2),
        "pred.sw_a_lower": lam * m * m / 8,
        "pred.sw_b_upper": Fraction(2 * m * m),
        "pred.sw_c_upper": Fraction(4 * m),
        "consistency_if_c_lower": lam * m / 16,
        "case1.sw_a": Fraction(0),
        "case2.sw_b": lam,
        "case2.sw_a": (k - 1) * lam * m / 2 + lam + km2 / 2,
        "case2.sw_a_lower": km2 / 2,
        "case2.ratio_lower": Fraction(m**3) / (8 * lam),
    }
    params = {"m": m, "lam": lam, "k": k}
    inst = Instance(VOTING, ordinal, FullProfile(pred), None, {"family": "tradeoff_lb", "m": m, "lambda": str(lam)})
    return GeneratedInstance("tradeoff_lb", params, inst, truths, expected, extra={"groups": groups})


def _check_tradeoff(gi: GeneratedInstance) -> list[Check]:
    m, lam, k = gi.params["m"], gi.params["lam"], gi.params["k"]
    e = gi.expected
    pred = gi.instance.prediction.profile
    out = _validity_checks(gi)
    out.append(Check("n", gi.instance.n, "==", e["n"], "n = km(lambda+m) voters"))
    sw_a = social_welfare(0, pred)
    out.append(Check("predicted SW(a)", sw_a, "==", e["pred.sw_a"]))
    out.append(Check("predicted SW(a) lower bound", sw_a, ">=", e["pred.sw_a_lower"], "lambda m^2 / 8"))
    for l in range(k):
        b, c = 1 + l, k + 1 + l
        sw_b, sw_c = social_welfare(b, pred), social_welfare(c, pred)
        out.append(Check(f"predicted SW(b_{l + 1})", sw_b, "==", e["pred.sw_b"]))
        out.append(Check(f"predicted SW(b_{l + 1}) upper bound", sw_b, "<=", e["pred.sw_b_upper"], "2 m^2"))
        out.append(Check(f"predicted SW(c_{l + 1})", sw_c, "==", e["pred.sw_c"]))
        out.append(Check(f"predicted SW(c_{l + 1}) upper bound", sw_c, "<=", e["pred.sw_c_upper"], "4 m"))
        out.append(
            Check(f"consistency if c_{l + 1} wins", optimum(pred, False) / sw_c, ">=", e["consistency_if_c_lower"], "at least lambda m/16")
        )
    case1 = gi.adversarial_truths["case1_ones_on_top"]
    out.append(Check("case 1 SW(a)", social_welfare(0, case1), "==", e["case1.sw_a"], "plu(a) = 0"))
    for l in range(k):
        t = gi.adversarial_truths[f"case2_b{l + 1}"]
        sw_b, sw_a = social_welfare(1 + l, t), social_welfare(0, t)
        out.append(Check(f"case 2 (b_{l + 1}) SW(b_{l + 1})", sw_b, "==", e["case2.sw_b"], "SW(b_l|v) = lambda"))
        out.append(Check(f"case 2 (b_{l + 1}) SW(a)", sw_a, "==", e["case2.sw_a"]))
        out.append(Check(f"case 2 (b_{l + 1}) SW(a) lower bound", sw_a, ">=", e["case2.sw_a_lower"], "k m^2 / 2"))
        out.append(
            Check(f"case 2 (b_{l + 1}) ratio", optimum(t, False) / sw_b, ">=", e["case2.ratio_lower"], "at least m^3/(8 lambda)")
        )
    return out


# --------------------------------------------------------------------------
# consistency lower bound, matching


def gen_matching_lb(n: int, k: int) -> GeneratedInstance:
    """Agent pairs sharing the ranking ``a_1..a_k, b_pair, rest``; adaptive adversary.

    Items: ``a_j = j-1``, ``b_p = k+p-1`` for ``p = 1..n/2``, then the ``c``
    items. Agents ``2p`` and ``2p+1`` (0-based) form pair ``p``.
    """
    _require(n % 2 == 0 and n >= 2, "n must be even")
    _require(k >= 1 and 2 * k <= n, "need 1 <= k and n >= 2k")
    half = n // 2
    b_of = [k + i // 2 for i in range(n)]
    rankings = []
    for i in range(n):
        head = list(range(k)) + [b_of[i]]
        rankings.append(tuple(head + [x for x in range(k, n) if x != b_of[i]]))
    ordinal = OrdinalProfile(rankings)
    top = Fraction(1, k + 1)
    spread = Fraction(1, (n - k) * (k + 1))
    lover_row = [top] * (k + 1) + [Fraction(0)] * (n - k - 1)
    spread_row = [top] * k + [spread] * (n - k)

    def adversary(mu: Matching) -> ValuationProfile:
        kinds = ["lover"] * n
        for p in range(half):
            i, j = 2 * p, 2 * p + 1
            if mu.item_of[i] == b_of[i]:
                kinds[i] = "spread"
            elif mu.item_of[j] == b_of[j]:
                kinds[j] = "spread"
        return _rank_profile(ordinal, [spread_row if t == "spread" else lover_row for t in kinds])

    canonical = _canonical_matching(n, k, b_of)
    mech = mechanism3(ordinal, TruncatedProfile(k, [[top] * k] * n)).matching
    truths = {"canonical": adversary(canonical), "mechanism3": adversary(mech)}
    expected = {
        "mechanism_sw_upper": Fraction(1),
        "opt_formula": Fraction(k, k + 1) + Fraction(n - k, 2) * top + Fraction(n - k, 2) * spread,
        "opt_lower": Fraction(n + 1, 2 * (k + 1)),
    }
    pred = Truncated(TruncatedProfile(k, [[top] * k] * n))
    inst = Instance(MATCHING, ordinal, pred, truths["mechanism3"], {"family": "matching_lb", "n": n, "k": k})
    extra = {"canonical_matching": canonical, "mechanism3_matching": mech, "b_of": b_of}
    return GeneratedInstance("matching_lb", {"n": n, "k": k}, inst, truths, expected, adversary, extra)


def _canonical_matching(n: int, k: int, b_of: list[int]) -> Matching:
    # last k agents take the a items; the first agent of every other pair takes its b
    item_of = [-1] * n
    for j in range(k):
        item_of[n - k + j] = j
    for i in range(0, n, 2):
        for a in (i, i + 1):
            if item_of[a] == -1:
                item_of[a] = b_of[a]
                break
    free = iter(x for x in range(n) if x not in item_of)
    return Matching([x if x != -1 else next(free) for x in item_of])


def construction_optimum(gi: GeneratedInstance, mu: Matching, truth: ValuationProfile) -> Matching:
    """The explicit good matching against an adversarial truth.

    Holders of ``a`` items keep them; in each pair the agent that values
    ``b_pair`` at ``1/(k+1)`` takes it; everyone else gets leftovers.
    """
    n, k = gi.params["n"], gi.params["k"]
    b_of = gi.extra["b_of"]
    item_of = [x if x < k else -1 for x in mu.item_of]
    top = Fraction(1, k + 1)
    for i in range(0, n, 2):
        for a in (i, i + 1):
            if item_of[a] == -1 and truth.values[a][b_of[a]] == top:
                item_of[a] = b_of[a]
                break
    free = iter(x for x in range(n) if x not in item_of)
    return Matching([x if x != -1 else next(free) for x in item_of])


def matching_lb_checks(gi: GeneratedInstance, mu: Matching, label: str) -> list[Check]:
    truth = gi.adversary(mu)
    e = gi.expected
    opt = optimum(truth, True)
    return [
        Check(f"{label}: adaptive truth valid", len(validate(truth, gi.instance.ordinal)), "==", 0),
        Check(
            f"{label}: truth matches the prediction",
            prediction_accurate(truth, gi.instance.prediction, gi.instance.ordinal),
            "==",
            True,
        ),
        Check(f"{label}: SW(mu|v)", social_welfare(mu, truth), "<=", e["mechanism_sw_upper"], "SW(mu|v) <= ... = 1"),
        Check(f"{label}: SW(mu*|v)", opt, ">=", e["opt_lower"], "(n+1)/(2(k+1))"),
    ]


def _check_matching(gi: GeneratedInstance) -> list[Check]:
    n, k = gi.params["n"], gi.params["k"]
    e = gi.expected
    out = _validity_checks(gi)
    canonical = gi.extra["canonical_matching"]
    out += matching_lb_checks(gi, canonical, "canonical")
    truth = gi.adversarial_truths["canonical"]
    built = social_welfare(construction_optimum(gi, canonical, truth), truth)
    if (n - k) % 2 == 0:
        out.append(Check("canonical: constructed SW(mu*|v)", built, "==", e["opt_formula"], "k/(k+1) + (n-k)/2 * 1/(k+1) + ..."))
    out.append(Check("canonical: constructed SW(mu*|v) lower bound", built, ">=", e["opt_lower"], "(n+1)/(2(k+1))"))
    out += matching_lb_checks(gi, gi.extra["mechanism3_matching"], "mechanism3")
    return out


# --------------------------------------------------------------------------
# hybrid information, voting


def hybrid_rankings(n: int, m: int, k: int) -> list[tuple[int, ...]]:
    o = m - 1
    size = n // (m - 1)
    rankings = []
    for s in range(1, m):
        head = []
        for l in range(1, k + 2):
            i = (s - l) % (m - 1) + 1  # a_i sits at position l for voters in S_{i+l-1 mod m-1}
            head.append(i - 1)
        head.append(o)
        rankings += [tuple(head + [x for x in range(m - 1) if x not in head])] * size
    return rankings


def gen_hybrid_lb(n: int, m: int, k: int) -> GeneratedInstance:
    """Cyclic top-(k+1) rankings with ``o`` fixed at position ``k+2``."""
    _require(m >= 3 and n >= 1 and n % (m - 1) == 0, "(m-1) must divide n")
    _require(k >= 1 and 2**k <= m, "need 1 <= k <= log2(m)")
    _require(k + 2 <= m, "need k + 2 <= m so that o has a position")
    ordinal = OrdinalProfile(hybrid_rankings(n, m, k))
    zeros = [Fraction(0)] * m
    pred_ranks = [Fraction(1, 2**l) for l in range(1, k + 1)] + [Fraction(1, 2 ** (k + 1))] * 2
    pred_ranks = (pred_ranks + zeros)[:m]
    truth_ranks = [Fraction(1, 2**l) for l in range(1, k)] + [Fraction(1, 2 ** (k - 1))]
    truth_ranks = (truth_ranks + zeros)[:m]
    pred = _rank_profile(ordinal, [pred_ranks] * n)
    truth = _rank_profile(ordinal, [truth_ranks] * n)
    tail = 1 - Fraction(1, 2 ** (k + 1))
    expected = {
        "pred.sw_o": Fraction(n, 2 ** (k + 1)),
        "pred.sw_a": Fraction(n, m - 1) * tail,
        "pred.ratio": Fraction(m - 1, 2 ** (k + 1) - 1),
        "truth.sw_o": Fraction(0),
    }
    inst = Instance(VOTING, ordinal, FullProfile(pred), None, {"family": "hybrid_lb", "n": n, "m": m, "k": k})
    return GeneratedInstance("hybrid_lb", {"n": n, "m": m, "k": k}, inst, {"adversarial": truth}, expected)


def _check_hybrid(gi: GeneratedInstance) -> list[Check]:
    m = gi.params["m"]
    o = m - 1
    e = gi.expected
    pred = gi.instance.prediction.profile
    truth = gi.adversarial_truths["adversarial"]
    out = _validity_checks(gi)
    sw_o = social_welfare(o, pred)
    out.append(Check("predicted SW(o)", sw_o, "==", e["pred.sw_o"], "n * 2^-(k+1)"))
    for j in range(m - 1):
        sw_a = social_welfare(j, pred)
        out.append(Check(f"predicted SW(a_{j + 1})", sw_a, "==", e["pred.sw_a"], "n/(m-1) * (1 - 2^-(k+1))"))
        out.append(Check(f"predicted SW(o)/SW(a_{j + 1})", sw_o / sw_a, "==", e["pred.ratio"], "(m-1)/(2^(k+1)-1)"))
        out.append(Check(f"adversarial SW(a_{j + 1}) positive", social_welfare(j, truth), ">", 0))
    out.append(Check("adversarial SW(o)", social_welfare(o, truth), "==", e["truth.sw_o"], "SW(o|v) = 0"))
    return out


_CHECKS = {
    "optcand_lb": _check_optcand,
    "fullval_lb": _check_fullval,
    "tradeoff_lb": _check_tradeoff,
    "matching_lb": _check_matching,
    "hybrid_lb": _check_hybrid,
}


# --------------------------------------------------------------------------
# seeded random instances


def random_instance(
    flavor: str,
    n: int,
    m: int,
    rng,
    prediction: str = "full",
    k: int | None = None,
    meta: dict | None = None,
) -> Instance:
    """Uniform random rankings and a uniform random vertex-profile truth,
    paired with an accurate prediction of the requested type."""
    if flavor == MATCHING and n != m:
        raise ValueError("matching instances need n == m")
    ordinal = random_ordinal(n, m, rng)
    truth = _vertex_profile(ordinal, [int(p) for p in rng.integers(1, m + 1, size=n)])
    if prediction == "full":
        pred = FullProfile(truth)
    elif prediction == "top_values":
        pred = TopValues(truth.top_values(ordinal))
    elif prediction == "truncated":
        k = m if k is None else k
        _require(1 <= k <= m, f"k must lie in [1, {m}]")
        pred = Truncated(truth.truncate(ordinal, k))
    elif prediction == "optimal_candidate":
        _require(flavor == VOTING, "optimal_candidate predictions are voting-only")
        sw = [social_welfare(x, truth) for x in range(m)]
        pred = OptimalCandidate(sw.index(max(sw)))
    else:
        raise ValueError(f"unknown prediction type {prediction!r}")
    return Instance(flavor, ordinal, pred, truth, dict(meta or {}))
