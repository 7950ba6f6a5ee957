"""Theorem-shaped checks, one entry per verifiable claim.

Each catalog function recomputes its constructions or corpora from fixed
seeds and returns a list of :class:`~.generators.Check` with exact values.
Large corpora are summarized by their tightest case (largest ratio/bound).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from .. import _kernels
from ..core import (
    INF,
    MATCHING,
    VOTING,
    Matching,
    OrdinalProfile,
    Ratio,
    ValuationProfile,
    complete_truncated,
    fmt_ratio,
    random_ordinal,
    random_profile,
    random_rank_values,
    social_welfare,
    vertex_row,
)
from ..matching import max_weight_matching, mechanism3, mechanism_full
from ..voting import mechanism1, mechanism2, plurality_winner, tally
from .generators import (
    Check,
    gen_fullval_lb,
    hybrid_rankings,
    gen_hybrid_lb,
    gen_matching_lb,
    gen_optcand_lb,
    gen_tradeoff_lb,
    matching_lb_checks,
)
from .mechanisms import optimum, ratio_on
from .oracle import worst_ratio
from .sweep import accurate_instance, error_sweep


@dataclass(frozen=True)
class Case:
    ratio: Ratio
    bound: Ratio
    label: str


def _slack_key(c: Case):
    if c.ratio == INF:
        return (INF, INF)
    if c.bound == INF:
        return (0, c.ratio)
    return (c.ratio / c.bound, c.ratio)


def tightest(name: str, cases: Iterable[Case], anchor: str = "") -> Check:
    """Summarize many ``ratio <= bound`` cases by the one closest to its bound."""
    cases = list(cases)
    if not cases:
        return Check(f"{name} [no cases]", 0, ">", 0, anchor)
    worst = max(cases, key=_slack_key)
    return Check(f"{name} [{len(cases)} cases, tightest: {worst.label}]", worst.ratio, "<=", worst.bound, anchor)


def format_check(c: Check) -> str:
    def show(v):
        if isinstance(v, bool) or v is None:
            return str(v)
        if isinstance(v, int):
            return str(v)
        if isinstance(v, Fraction) or v == INF:
            return fmt_ratio(v)
        if isinstance(v, (tuple, list)):
            return "(" + ", ".join(show(x) for x in v) + ")"
        return str(v)

    tag = "PASS" if c.ok else "FAIL"
    anchor = f'  ["{c.anchor}"]' if c.anchor else ""
    return f"{tag} {c.name}: {show(c.actual)} {c.relation} {show(c.target)}{anchor}"


# --------------------------------------------------------------------------
# corpora


def all_ordinals(n: int, m: int) -> Iterable[OrdinalProfile]:
    for combo in itertools.product(itertools.permutations(range(m)), repeat=n):
        yield OrdinalProfile(combo)


def vertex_profiles(ordinal: OrdinalProfile) -> Iterable[ValuationProfile]:
    n, m = ordinal.n_agents, ordinal.n_alternatives
    for prefix in itertools.product(range(1, m + 1), repeat=n):
        yield ValuationProfile([vertex_row(r, p) for r, p in zip(ordinal.rankings, prefix)])


def _label(ordinal: OrdinalProfile, extra: str = "") -> str:
    r = ";".join("".join(str(x) for x in rk) for rk in ordinal.rankings)
    return f"rankings {r}{extra}"


# --------------------------------------------------------------------------
# lemma


def lemma_batch(batch: int, n: int, m: int, rng: np.random.Generator, denominator: int = 720) -> dict[str, int]:
    """Violation counts of the first-place lemma over ``batch`` random profiles.

    Profiles are integer numerators over ``denominator``, so every comparison
    is exact integer arithmetic.
    """
    D = denominator
    ranks = random_rank_values(batch * n, m, rng, D).reshape(batch, n, m)
    order = np.argsort(rng.random((batch, n, m)), axis=2)
    values = np.zeros((batch, n, m), dtype=np.int64)
    np.put_along_axis(values, order, ranks, axis=2)
    sw = values.sum(axis=1)
    onehot = order[:, :, :1] == np.arange(m)[None, None, :]
    sw1 = (onehot * ranks[:, :, :1]).sum(axis=1)
    plu = onehot.sum(axis=1)
    return {
        "profiles": batch,
        "(i)": int((sw > m * sw1.max(axis=1, keepdims=True)).sum()),
        "(ii)": int((sw1 > plu * D).sum()),
        "(iii) lower": int((plu * D > m * sw1).sum()),
        "(iii) upper": int((sw1 > sw).sum()),
    }


def lemma_exact(profile: ValuationProfile, ordinal: OrdinalProfile) -> list[str]:
    """Failed lemma parts for one profile, computed through the voting module."""
    m = ordinal.n_alternatives
    t = tally(ordinal, profile.top_values(ordinal))
    bad = []
    for x in range(m):
        sw = social_welfare(x, profile)
        if sw > m * t.max_sw1:
            bad.append("(i)")
        if t.sw1[x] > t.plu[x]:
            bad.append("(ii)")
        if not Fraction(t.plu[x], m) <= t.sw1[x] <= sw:
            bad.append("(iii)")
    return bad


def verify_lemma(profiles_per_shape: int = 250, seed: int = 1) -> list[Check]:
    rng = np.random.default_rng(seed)
    totals: dict[str, int] = {}
    for n in range(1, 9):
        for m in range(1, 7):
            for key, v in lemma_batch(profiles_per_shape, n, m, rng).items():
                totals[key] = totals.get(key, 0) + v
    out = [Check("vectorized profiles checked (n<=8, m<=6)", totals.pop("profiles"), ">", 0)]
    anchors = {
        "(i)": "SW(x|v) <= m * max_y SW1(y|v)",
        "(ii)": "SW1(x|v) <= plu(x)",
        "(iii) lower": "plu(x)/m <= SW1(x|v)",
        "(iii) upper": "SW1(x|v) <= SW(x|v)",
    }
    for key, count in totals.items():
        out.append(Check(f"lemma {key} violations", count, "==", 0, anchors[key]))
    exact_bad = 0
    for _ in range(200):
        n, m = int(rng.integers(1, 9)), int(rng.integers(1, 7))
        o = random_ordinal(n, m, rng)
        exact_bad += len(lemma_exact(random_profile(o, rng, denominator=60, vertex_prob=0.3), o))
    out.append(Check("lemma violations via tally on 200 rational profiles", exact_bad, "==", 0))
    return out


# --------------------------------------------------------------------------
# voting bounds


def _voting_bound_cases(
    ordinal: OrdinalProfile,
    mech: Callable[[OrdinalProfile, tuple], int],
    truths: Iterable[ValuationProfile],
    predictions: Iterable[tuple],
    cons_bound: Ratio,
    rob_bound: Ratio,
    label: str,
    cache: dict,
) -> tuple[list[Case], list[Case]]:
    """Consistency cases over accurate ``truths``; robustness over the
    winners reachable from ``predictions``, each sent to the oracle."""
    cons = []
    for v in truths:
        w = mech(ordinal, v.top_values(ordinal))
        cons.append(Case(ratio_on(v, w, False), cons_bound, label))
    rob = []
    for w in sorted({mech(ordinal, p) for p in predictions}):
        key = (ordinal, w)
        if key not in cache:
            cache[key] = worst_ratio(ordinal, w).ratio
        rob.append(Case(cache[key], rob_bound, f"{label} winner {w}"))
    return cons, rob


def _vertex_top_values(ordinal: OrdinalProfile) -> Iterable[tuple]:
    m = ordinal.n_alternatives
    for prefix in itertools.product(range(1, m + 1), repeat=ordinal.n_agents):
        yield tuple(Fraction(1, p) for p in prefix)


def voting_corpus(random_count: int, seed: int, max_n: int = 3, max_m: int = 3):
    """Exhaustive ordinal profiles with ``n <= max_n, m <= max_m`` (every
    vertex truth, every vertex prediction) then ``random_count`` larger
    random instances with one accurate and one independent prediction."""
    for n in range(1, max_n + 1):
        for m in range(2, max_m + 1):
            for o in all_ordinals(n, m):
                yield o, list(vertex_profiles(o)), list(_vertex_top_values(o)), _label(o)
    rng = np.random.default_rng(seed)
    for j in range(random_count):
        n, m = int(rng.integers(4, 7)), int(rng.integers(2, 6))
        o = random_ordinal(n, m, rng)
        truth = random_profile(o, rng, denominator=60, vertex_prob=0.3)
        wrong = random_profile(o, rng, denominator=60, vertex_prob=0.3)
        yield o, [truth], [wrong.top_values(o)], f"random #{j} n={n} m={m}"


def mech1_cases(random_count: int = 40, seed: int = 2):
    cons, rob, cache = [], [], {}
    for o, truths, preds, label in voting_corpus(random_count, seed):
        n, m = o.n_agents, o.n_alternatives
        c, r = _voting_bound_cases(o, mechanism1, truths, preds, Fraction(m), Fraction(min(n * m, m**3)), label, cache)
        cons += c
        rob += r
    return cons, rob


def verify_mech1(random_count: int = 40, seed: int = 2) -> list[Check]:
    cons, rob = mech1_cases(random_count, seed)
    return [
        tightest("mech1 consistency <= m", cons, "consistency at most m"),
        tightest("mech1 robustness <= min{nm, m^3}", rob, "robustness at most min{nm,m^3}"),
    ]


def mech2_lambdas(m: int) -> list[Fraction]:
    return sorted({lam for lam in (Fraction(1), Fraction(3, 2), Fraction(2), Fraction(m)) if lam <= m})


def mech2_cases(random_count: int = 40, seed: int = 2):
    cons, rob, same, cache = [], [], [], {}
    for o, truths, preds, label in voting_corpus(random_count, seed):
        m = o.n_alternatives
        for lam in mech2_lambdas(m):

            def mech(ordinal, top, lam=lam):
                return mechanism2(ordinal, top, lam)[0]

            c, r = _voting_bound_cases(o, mech, truths, preds, lam * m, Fraction(m**3) / lam, f"{label} lambda={lam}", cache)
            cons += c
            rob += r
        for top in list(preds) + [v.top_values(o) for v in truths]:
            same.append(mechanism2(o, top, 1)[0] == mechanism1(o, top))
    return cons, rob, same


def verify_mech2(random_count: int = 40, seed: int = 2) -> list[Check]:
    cons, rob, same = mech2_cases(random_count, seed)
    return [
        tightest("mech2 consistency <= lambda m", cons, "consistency at most lambda m"),
        tightest("mech2 robustness <= m^3/lambda", rob, "robustness at most m^3/lambda"),
        Check(f"mech2(lambda=1) == mech1 disagreements over {len(same)} predictions", same.count(False), "==", 0, "reduces to Mechanism 1"),
    ]


# --------------------------------------------------------------------------
# lower-bound constructions


def _expected_checks(gi) -> list[Check]:
    return [Check(c.name, c.actual, c.relation, c.target, c.anchor) for c in gi.checks()]


def verify_optcand(n: int = 4, m: int = 3) -> list[Check]:
    gi = gen_optcand_lb(n, m)
    out = _expected_checks(gi)
    ordinal = gi.instance.ordinal
    out.append(Check("oracle: o as winner", worst_ratio(ordinal, m - 1).ratio, "==", INF, "leading to infinite robustness"))
    return out


def verify_fullval(n: int = 4, m: int = 3) -> list[Check]:
    return _expected_checks(gen_fullval_lb(n, m))


def verify_tradeoff(m: int = 5, lam=1) -> list[Check]:
    gi = gen_tradeoff_lb(m, lam)
    out = _expected_checks(gi)
    pred = gi.instance.prediction.profile
    top = pred.top_values(gi.instance.ordinal)
    k = gi.params["k"]
    out.append(Check("mech1 winner (c_1 index)", mechanism1(gi.instance.ordinal, top), "==", k + 1))
    for l2 in (2,):
        w, s = mechanism2(gi.instance.ordinal, top, l2)
        out.append(Check(f"mech2(lambda={l2}) winner (c_1 index)", w, "==", k + 1))
        out.append(Check(f"mech2(lambda={l2}) shortlist (c indices)", s.members, "==", tuple(range(k + 1, 2 * k + 1))))
    return out


def verify_matching_lb(n: int = 8, k: int = 2, random_matchings: int = 20, seed: int = 3) -> list[Check]:
    gi = gen_matching_lb(n, k)
    out = _expected_checks(gi)
    rng = np.random.default_rng(seed)
    worst_sw, worst_opt = Fraction(0), None
    for _ in range(random_matchings):
        mu = Matching(tuple(int(x) for x in rng.permutation(n)))
        for c in matching_lb_checks(gi, mu, "random"):
            if not c.ok:
                out.append(c)
        truth = gi.adversary(mu)
        worst_sw = max(worst_sw, social_welfare(mu, truth))
        o = optimum(truth, True)
        worst_opt = o if worst_opt is None else min(worst_opt, o)
    out.append(Check(f"max SW(mu|v) over {random_matchings} random matchings", worst_sw, "<=", gi.expected["mechanism_sw_upper"], "SW(mu|v) <= ... = 1"))
    out.append(Check(f"min SW(mu*|v) over {random_matchings} random matchings", worst_opt, ">=", gi.expected["opt_lower"], "(n+1)/(2(k+1))"))
    return out


def verify_hybrid(n: int = 8, m: int = 5, k: int = 2) -> list[Check]:
    gi = gen_hybrid_lb(n, m, k)
    out = _expected_checks(gi)
    if (n, m, k) == (8, 5, 2):
        table = [(0, 3, 2, 4, 1), (1, 0, 3, 4, 2), (2, 1, 0, 4, 3), (3, 2, 1, 4, 0)]
        got = sorted(set(hybrid_rankings(n, m, k)))
        out.append(Check("rankings of S_1..S_4 (0-based)", got, "==", table, "Table 1"))
    out.append(Check("plurality winner", plurality_winner(gi.instance.ordinal), "==", 0))
    return out


# --------------------------------------------------------------------------
# matching bounds


def matching_full_cases(count: int = 150, seed: int = 4, robust_max_n: int = 5):
    rng = np.random.default_rng(seed)
    cons, topped, rob = [], [], []
    for j in range(count):
        n = int(rng.integers(2, 7))
        o = random_ordinal(n, n, rng)
        truth = random_profile(o, rng, denominator=60, vertex_prob=0.3)
        res = mechanism_full(o, truth)
        cons.append(Case(ratio_on(truth, res.matching, True), Fraction(1), f"#{j} n={n}"))
        topped.append(res.top_matched_agent is not None)
        if n <= robust_max_n:
            wrong = random_profile(o, rng, denominator=60, vertex_prob=0.3)
            mu = mechanism_full(o, wrong).matching
            rob.append(Case(worst_ratio(o, mu).ratio, Fraction(n * n), f"#{j} n={n}"))
    return cons, topped, rob


def verify_matching_full(count: int = 150, seed: int = 4) -> list[Check]:
    cons, topped, rob = matching_full_cases(count, seed)
    return [
        tightest("match_full accurate ratio == 1", cons, "consistency 1"),
        Check(f"outputs without a top-matched agent (of {len(topped)})", topped.count(False), "==", 0, "at least one agent is matched to her most-preferred item"),
        tightest("match_full robustness <= n^2", rob, "robustness at most n^2"),
    ]


def mech3_cases(count: int = 150, seed: int = 5, robust_max_n: int = 5):
    rng = np.random.default_rng(seed)
    cons, floor, decomp, rob = [], [], [], []
    for j in range(count):
        n = int(rng.integers(2, 7))
        o = random_ordinal(n, n, rng)
        truth = random_profile(o, rng, denominator=60, vertex_prob=0.3)
        opt = optimum(truth, True)
        for k in range(1, n + 1):
            label = f"#{j} n={n} k={k}"
            mu = mechanism3(o, truth.truncate(o, k)).matching
            sw = social_welfare(mu, truth)
            cons.append(Case(opt / sw, Fraction(n, k) + 2, label))
            floor.append(Case(Fraction(1, n), sw, label))
            opt_k = max_weight_matching(_zero_completed(truth, o, k)).welfare
            decomp.append(Case(opt, (Fraction(n, k) + 1) * opt_k, label))
        if n <= robust_max_n:
            k = int(rng.integers(1, n + 1))
            wrong = random_profile(o, rng, denominator=60, vertex_prob=0.3)
            mu = mechanism3(o, wrong.truncate(o, k)).matching
            rob.append(Case(worst_ratio(o, mu).ratio, Fraction(n * n), f"#{j} n={n} k={k}"))
    return cons, floor, decomp, rob


def _zero_completed(truth: ValuationProfile, o: OrdinalProfile, k: int):
    return complete_truncated(truth.truncate(o, k), o)


def verify_matching_consistency(count: int = 150, seed: int = 5) -> list[Check]:
    cons, floor, decomp, _ = mech3_cases(count, seed, robust_max_n=0)
    return [
        tightest("mech3 accurate ratio <= n/k + 2", cons, "consistency at most n/k+2"),
        tightest("1/n <= SW(mech3|v)", floor, "the achieved social welfare is at least 1/n"),
        tightest("SW(mu*|v) <= (n/k+1) SW(mu*_k|v)", decomp, "ceil(n/k) SW(mu*_k|v) >= sum v_i(mu*(i))"),
    ]


def verify_matching_robustness(count: int = 60, seed: int = 6) -> list[Check]:
    _, _, _, rob = mech3_cases(count, seed)
    return [tightest("mech3 robustness <= n^2", rob, "robustness at most n^2")]


# --------------------------------------------------------------------------
# error analysis


def voting_error_rows(count: int = 30, seed: int = 7, max_n: int = 6, max_m: int = 5):
    rng = np.random.default_rng(seed)
    out = []
    for j in range(count):
        n, m = int(rng.integers(2, max_n + 1)), int(rng.integers(2, max_m + 1))
        o = random_ordinal(n, m, rng)
        inst = accurate_instance(VOTING, random_profile(o, rng, denominator=60, vertex_prob=0.3), o)
        for lam in mech2_lambdas(m):
            for row in error_sweep(inst, lam=lam):
                out.append((f"#{j} n={n} m={m} lambda={lam} level={row.level}", lam, m, row))
    return out


def verify_error_voting(count: int = 30, seed: int = 7) -> list[Check]:
    rows = voting_error_rows(count, seed)
    realized = [Case(r.realized, r.bound, lab) for lab, _, _, r in rows]
    tight = [Case(r.realized, r.rho * r.eta_winner * m, lab) for lab, _, m, r in rows]
    zero = [r.eta for _, _, _, r in rows if r.level == 0]
    cap = [Case(r.eta_winner, r.eta_cap, lab) for lab, _, _, r in rows]
    return [
        tightest("realized <= m * eta * rho", realized, "the distortion of Mechanism 2 is m*eta*rho"),
        tightest("realized <= m * eta(w) * rho", tight, "m * eta(w) * rho(w|v^) * SW(w|v)"),
        Check("max eta at corruption level 0", max(zero), "==", 1),
        tightest("eta(w) <= m^2/(lambda rho)", cap, "eta(w) <= m^2/(lambda rho(w|v^))"),
    ]


def matching_error_rows(count: int = 30, seed: int = 8, max_n: int = 6):
    rng = np.random.default_rng(seed)
    out = []
    for j in range(count):
        n = int(rng.integers(2, max_n + 1))
        o = random_ordinal(n, n, rng)
        inst = accurate_instance(MATCHING, random_profile(o, rng, denominator=60, vertex_prob=0.3), o)
        k = int(rng.integers(1, n + 1))
        for row in error_sweep(inst, k=k):
            out.append((f"#{j} n={n} k={k} level={row.level}", row))
    return out


def verify_error_matching(count: int = 30, seed: int = 8) -> list[Check]:
    rows = matching_error_rows(count, seed)
    zero = [r.eta for _, r in rows if r.level == 0]
    return [
        tightest("realized <= min{(n/k+1) eta, n^2}", [Case(r.realized, r.bound, lab) for lab, r in rows], "O(min{n/k*eta, n^2})"),
        Check("max eta at corruption level 0", max(zero), "==", 1),
        Check("min eta at corruption level 0", min(zero), "==", 1),
        Check("rows with raw eta < 1 (reported, not an error)", sum(r.eta_below_one for _, r in rows), ">=", 0),
    ]


# --------------------------------------------------------------------------
# oracle soundness


def interior_sample_max(ordinal: OrdinalProfile, outcome, samples: int, rng, denominator: int = 720) -> tuple[Fraction, int]:
    """Largest exact ratio over random interior profiles and the number of
    samples with a zero denominator (those are skipped)."""
    n, m = ordinal.n_agents, ordinal.n_alternatives
    matching = isinstance(outcome, Matching)
    ranks = random_rank_values(samples * n, m, rng, denominator).reshape(samples, n, m)
    pos = ordinal.positions()
    values = ranks[:, np.arange(n)[:, None], pos]  # item space
    if matching:
        num = _kernels.assignment_values(values)
        den = values[:, np.arange(n), np.array(outcome.item_of)].sum(axis=1)
    else:
        sw = values.sum(axis=1)
        num, den = sw.max(axis=1), sw[:, int(outcome)]
    keep = den > 0
    num, den = num[keep], den[keep]
    best = max((Fraction(int(a), int(b)) for a, b in zip(num, den)), default=Fraction(0))
    return best, int((~keep).sum())


def soundness_cases(instances: int = 10, samples: int = 2000, seed: int = 9):
    rng = np.random.default_rng(seed)
    cases = []
    for j in range(instances):
        if j % 2 == 0:
            n, m = int(rng.integers(2, 6)), int(rng.integers(2, 5))
            o = random_ordinal(n, m, rng)
            outcome = int(rng.integers(0, m))
            label = f"#{j} voting n={n} m={m} outcome {outcome}"
        else:
            n = int(rng.integers(2, 6))
            o = random_ordinal(n, n, rng)
            outcome = Matching(tuple(int(x) for x in rng.permutation(n)))
            label = f"#{j} matching n={n}"
        vertex = worst_ratio(o, outcome).ratio
        sampled, _ = interior_sample_max(o, outcome, samples, rng)
        cases.append(Case(sampled, vertex, label))
    return cases


def verify_oracle_soundness(instances: int = 10, samples: int = 2000, seed: int = 9) -> list[Check]:
    o = OrdinalProfile([(0, 1), (1, 0)])
    rep = worst_ratio(o, 0)
    out = [
        Check("n=2, m=2, outcome a: worst ratio", rep.ratio, "==", 3),
        Check("witness truth", rep.witness_truth.values, "==", ((Fraction(1, 2), Fraction(1, 2)), (Fraction(0), Fraction(1)))),
        Check("witness best outcome", rep.witness_best, "==", 1),
        Check("report recomputes", rep.recompute(), "==", rep.ratio),
        Check("unanimous first choice: worst ratio", worst_ratio(OrdinalProfile([(0, 1, 2)] * 3), 0).ratio, "==", 1),
        tightest("interior samples <= vertex maximum", soundness_cases(instances, samples, seed), "sup_v max_z SW(z|v)/SW(M|v)"),
    ]
    return out


CATALOG: dict[str, Callable[[], list[Check]]] = {
    "lemma": verify_lemma,
    "mech1_bounds": verify_mech1,
    "mech2_bounds": verify_mech2,
    "optcand_lb": verify_optcand,
    "fullval_lb": verify_fullval,
    "tradeoff_lb": verify_tradeoff,
    "matching_full": verify_matching_full,
    "matching_consistency": verify_matching_consistency,
    "matching_robustness": verify_matching_robustness,
    "matching_lb": verify_matching_lb,
    "hybrid_lb": verify_hybrid,
    "error_voting": verify_error_voting,
    "error_matching": verify_error_matching,
    "oracle_soundness": verify_oracle_soundness,
}
