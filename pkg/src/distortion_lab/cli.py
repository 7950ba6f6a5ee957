"""``distortion-lab`` command line: gen, run, verify and sweep.

Exit codes: 0 success, 1 a verification or bound check failed, 2 usage or
schema error, 3 the mechanism does not fit the instance.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from .analysis.catalog import CATALOG, format_check
from .analysis.generators import (
    gen_fullval_lb,
    gen_hybrid_lb,
    gen_matching_lb,
    gen_optcand_lb,
    gen_tradeoff_lb,
    random_instance,
)
from .analysis.mechanisms import (
    MECHANISMS,
    MechanismMismatch,
    optimum,
    theoretical_bound,
    ratio_on,
    robustness_of,
    run_mechanism,
    truncated_prediction,
)
from .analysis.oracle import SizeLimitError
from .analysis.sweep import DEFAULT_LEVELS, error_sweep
from .core import (
    MATCHING,
    VOTING,
    Instance,
    Matching,
    Truncated,
    as_rat,
    prediction_accurate,
    social_welfare,
)
from .matching import eta_matching
from .serialization import (
    ResultRow,
    SchemaError,
    load_instance,
    make_row,
    render_instance,
    rows_to_csv,
)
from .voting import eta_voting, top_values_from

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_MISMATCH = 0, 1, 2, 3
FAMILIES = ("optcand_lb", "fullval_lb", "tradeoff_lb", "matching_lb", "hybrid_lb", "random")
RATIO_CLASSES = ("auto", "consistency", "robustness", "realized")


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# evaluation shared by run and sweep


def _param(mechanism: str, instance: Instance, lam, k) -> str:
    if mechanism == "mech2":
        return f"lambda={as_rat(lam)}"
    if mechanism == "mech3":
        return f"k={truncated_prediction(instance, k).k}"
    return ""


def _accurate_for(instance: Instance, mechanism: str, k) -> bool:
    p = instance.prediction
    if mechanism == "mech3":
        p = Truncated(truncated_prediction(instance, k))
    return prediction_accurate(instance.truth, p, instance.ordinal)


def evaluate(instance: Instance, mechanism: str, *, lam=None, k=None, ratio_class="auto", instance_id="-", workers=1) -> ResultRow:
    """Run ``mechanism`` and measure it as one :class:`ResultRow`.

    ``auto`` picks robustness when the instance has no truth, consistency
    when the prediction is accurate for it and realized otherwise.
    """
    outcome = run_mechanism(instance, mechanism, lam=lam, k=k)
    param = _param(mechanism, instance, lam, k)
    matching = isinstance(outcome, Matching)
    n, m = instance.n, instance.m
    k_used = truncated_prediction(instance, k).k if mechanism == "mech3" else None
    truth = instance.truth
    if ratio_class == "auto":
        if truth is None:
            ratio_class = "robustness"
        else:
            ratio_class = "consistency" if _accurate_for(instance, mechanism, k) else "realized"
    if ratio_class != "robustness" and truth is None:
        raise MechanismMismatch(f"{ratio_class} needs a true profile in the instance")
    if ratio_class == "robustness":
        rep = robustness_of(instance, mechanism, lam=lam, k=k, workers=workers)
        sw = social_welfare(outcome, rep.witness_truth)
        opt = social_welfare(rep.witness_best, rep.witness_truth)
        bound = theoretical_bound(mechanism, "robustness", n, m, lam=lam, k=k_used)
        return make_row(instance_id, mechanism, param, outcome, sw, opt, rep.ratio, ratio_class, bound=bound)
    sw = social_welfare(outcome, truth)
    opt = optimum(truth, matching)
    ratio = ratio_on(truth, outcome, matching)
    if ratio_class == "consistency":
        if not _accurate_for(instance, mechanism, k):
            raise MechanismMismatch("consistency needs a prediction that is accurate for the stored truth")
        bound = theoretical_bound(mechanism, "consistency", n, m, lam=lam, k=k_used)
        return make_row(instance_id, mechanism, param, outcome, sw, opt, ratio, ratio_class, bound=bound)
    eta = rho = bound = None
    if mechanism in ("mech1", "mech2"):
        top = top_values_from(instance.prediction, instance.ordinal)
        ev = eta_voting(outcome, truth, top, instance.ordinal, 1 if mechanism == "mech1" else lam)
        eta, rho, bound = ev.eta, ev.rho_pred, ev.bound
    elif mechanism in ("mech3", "match_full"):
        trunc = truncated_prediction(instance, k if mechanism == "mech3" else n)
        em = eta_matching(truth, trunc, instance.ordinal)
        eta, bound = em.eta, em.bound
    return make_row(instance_id, mechanism, param, outcome, sw, opt, ratio, ratio_class, eta=eta, rho=rho, bound=bound)


# --------------------------------------------------------------------------
# gen


def _generated(args):
    fam = args.family
    if fam == "optcand_lb":
        return gen_optcand_lb(args.n or 4, args.m or 3)
    if fam == "fullval_lb":
        return gen_fullval_lb(args.n or 4, args.m or 3)
    if fam == "tradeoff_lb":
        return gen_tradeoff_lb(args.m or 5, as_rat(args.lam or "1"))
    if fam == "matching_lb":
        return gen_matching_lb(args.n or 8, args.k or 2)
    return gen_hybrid_lb(args.n or 8, args.m or 5, args.k or 2)


def cmd_gen(args) -> int:
    if args.family == "random":
        flavor = args.flavor
        n = args.n or 4
        m = n if flavor == MATCHING else (args.m or 3)
        if flavor == MATCHING and args.m not in (None, n):
            raise ValueError("matching instances need m == n")
        rng = np.random.default_rng(args.seed)
        instances = []
        for i in range(args.count):
            meta = {"family": "random", "seed": args.seed, "index": i}
            instances.append(random_instance(flavor, n, m, rng, args.prediction, args.k, meta))
    else:
        if args.count != 1:
            raise UsageError("--count applies to the random family only")
        gi = _generated(args)
        inst = gi.instance
        if args.truth:
            if args.truth not in gi.adversarial_truths:
                raise UsageError(f"unknown truth {args.truth!r}; choose from {', '.join(gi.adversarial_truths)}")
            inst = Instance(inst.flavor, inst.ordinal, inst.prediction, gi.adversarial_truths[args.truth], {**inst.meta, "truth": args.truth})
        instances = [inst]
    if args.out is None:
        if len(instances) != 1:
            raise UsageError("--out DIR is required with --count > 1")
        sys.stdout.write(render_instance(instances[0]))
        return EXIT_OK
    out = Path(args.out)
    if len(instances) == 1:
        out.write_text(render_instance(instances[0]), encoding="utf-8")
    else:
        out.mkdir(parents=True, exist_ok=True)
        for i, inst in enumerate(instances):
            (out / f"{args.family}_{i:04d}.json").write_text(render_instance(inst), encoding="utf-8")
    return EXIT_OK


# --------------------------------------------------------------------------
# run


def cmd_run(args) -> int:
    if args.mechanism == "mech2" and args.lam is None:
        raise UsageError("mech2 needs --lam")
    inst = load_instance(args.instance)
    row = evaluate(
        inst,
        args.mechanism,
        lam=args.lam,
        k=args.k,
        ratio_class=args.ratio_class,
        instance_id=args.id or Path(args.instance).stem,
        workers=args.workers,
    )
    sys.stdout.write(rows_to_csv([row], header=not args.no_header))
    return EXIT_OK if row.bound_satisfied != "0" else EXIT_FAIL


# --------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    if args.theorem == "list":
        print("\n".join(CATALOG))
        return EXIT_OK
    ids = list(CATALOG) if args.theorem == "all" else [args.theorem]
    if any(t not in CATALOG for t in ids):
        raise UsageError(f"unknown theorem id {args.theorem!r}; run 'verify list' for the catalog")
    failed = 0
    for t in ids:
        checks = CATALOG[t]()
        bad = sum(not c.ok for c in checks)
        failed += bad
        print(f"# {t}")
        for c in checks:
            print(format_check(c))
        print(f"# {t}: {len(checks) - bad}/{len(checks)} checks passed")
    return EXIT_FAIL if failed else EXIT_OK


# --------------------------------------------------------------------------
# sweep


def parse_grid(text: str | None, integer: bool = False) -> list:
    """Comma-separated rationals; ``a..b`` expands to the integers a..b."""
    out: list = []
    for tok in (text or "").split(","):
        tok = tok.strip()
        if not tok:
            continue
        if ".." in tok:
            lo, hi = (int(x) for x in tok.split(".."))
            out.extend(range(lo, hi + 1))
        else:
            out.append(int(tok) if integer else as_rat(tok))
    if not out:
        raise UsageError("empty range")
    return out


def _sweep_sources(args) -> list[tuple[str, Instance]]:
    if args.instances:
        paths = []
        for p in map(Path, args.instances):
            paths += sorted(p.glob("*.json")) if p.is_dir() else [p]
        if not paths:
            raise UsageError("no instance files found")
        return [(p.stem, load_instance(p)) for p in paths]
    if args.random is None:
        raise UsageError("give instance files or --random N")
    flavor = MATCHING if args.axis == "k" else (args.flavor or VOTING)
    if args.axis == "lambda":
        flavor = VOTING
    n = args.n or 4
    m = n if flavor == MATCHING else (args.m or 3)
    rng = np.random.default_rng(args.seed)
    return [
        (f"random-{args.seed}-{i}", random_instance(flavor, n, m, rng, "full", meta={"family": "random", "seed": args.seed, "index": i}))
        for i in range(args.random)
    ]


def _sweep_instance(iid: str, inst: Instance, args, grid) -> list[ResultRow]:
    if args.axis == "lambda":
        return [evaluate(inst, "mech2", lam=lam, instance_id=iid) for lam in grid]
    if args.axis == "k":
        return [evaluate(inst, "mech3", k=int(k), instance_id=iid) for k in grid]
    if inst.truth is None:
        raise MechanismMismatch(f"{iid}: a corruption sweep needs a true profile")
    if inst.flavor == MATCHING:
        k = args.k or max(1, inst.n // 2)
        if not 1 <= k <= inst.n:
            raise MechanismMismatch(f"{iid}: k={k} outside [1, {inst.n}]")
        mech, fixed = "mech3", f"k={k}"
        rows = error_sweep(inst, grid, k=k)
    else:
        lam = as_rat(args.lam or "1")
        if not 1 <= lam <= inst.m:
            raise MechanismMismatch(f"{iid}: lambda={lam} outside [1, {inst.m}]")
        mech, fixed = "mech2", f"lambda={lam}"
        rows = error_sweep(inst, grid, lam=lam)
    return [
        make_row(iid, mech, f"{fixed};level={r.level}", r.outcome, r.true_welfare, r.optimal_welfare, r.realized, "realized", eta=r.eta, rho=r.rho, bound=r.bound)
        for r in rows
    ]


def _check_flavor(args, sources):
    want = {"lambda": VOTING, "k": MATCHING}.get(args.axis)
    for iid, inst in sources:
        if want and inst.flavor != want:
            raise MechanismMismatch(f"{iid}: the {args.axis} axis needs {want} instances, got {inst.flavor}")


def _k_monotonicity_note(rows: list[list[ResultRow]]) -> str:
    ok = 0
    for block in rows:
        ratios = [Fraction(r.ratio) for r in block if r.ratio_class == "consistency"]
        ok += all(a >= b for a, b in zip(ratios, ratios[1:]))
    return f"note: ratio non-increasing in k on {ok} of {len(rows)} instances (reported, not asserted)"


def cmd_sweep(args) -> int:
    if args.axis == "corruption":
        grid = parse_grid(args.values) if args.values is not None else list(DEFAULT_LEVELS)
        if any(not 0 <= g <= 1 for g in grid):
            raise UsageError("corruption levels must lie in [0, 1]")
    else:
        grid = parse_grid(args.values, integer=args.axis == "k")
    sources = _sweep_sources(args)
    _check_flavor(args, sources)

    def job(src):
        return _sweep_instance(src[0], src[1], args, grid)

    if args.workers > 1:
        with ThreadPoolExecutor(max_workers=args.workers) as pool:
            blocks = list(pool.map(job, sources))  # map keeps grid order
    else:
        blocks = [job(s) for s in sources]
    rows = [r for b in blocks for r in b]
    text = rows_to_csv(rows)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.axis == "k":
        print(_k_monotonicity_note(blocks), file=sys.stderr)
    return EXIT_FAIL if any(r.bound_satisfied == "0" for r in rows) else EXIT_OK


# --------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2 as well; keep its message format
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="distortion-lab", description="Learning-augmented voting and matching: mechanisms, oracles, constructions.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="write a lower-bound or random instance as JSON")
    g.add_argument("family", choices=FAMILIES)
    g.add_argument("--n", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--lam", help="lambda as a rational, e.g. 3/2")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--flavor", choices=(VOTING, MATCHING), default=VOTING)
    g.add_argument("--prediction", choices=("full", "top_values", "truncated", "optimal_candidate"), default="full")
    g.add_argument("--truth", help="embed this adversarial truth (lower-bound families)")
    g.add_argument("--out", help="output file, or directory when --count > 1")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="run a mechanism on an instance and print one CSV row")
    r.add_argument("instance")
    r.add_argument("--mechanism", required=True, choices=MECHANISMS)
    r.add_argument("--lam")
    r.add_argument("--k", type=int)
    r.add_argument("--class", dest="ratio_class", choices=RATIO_CLASSES, default="auto")
    r.add_argument("--id")
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--no-header", action="store_true")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", help="recompute a theorem-shaped check ('list' shows ids, 'all' runs every one)")
    v.add_argument("theorem")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="CSV over a lambda, k or corruption grid")
    s.add_argument("--axis", required=True, choices=("lambda", "k", "corruption"))
    s.add_argument("--values", help="e.g. '1,3/2,2,3' or '1..6'")
    s.add_argument("--instances", nargs="*", help="instance files or directories")
    s.add_argument("--random", type=int, help="number of seeded random instances instead of files")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--flavor", choices=(VOTING, MATCHING))
    s.add_argument("--n", type=int)
    s.add_argument("--m", type=int)
    s.add_argument("--lam", help="lambda for voting corruption sweeps (default 1)")
    s.add_argument("--k", type=int, help="k for matching corruption sweeps (default n//2)")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, SchemaError, SizeLimitError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MechanismMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except ValueError as exc:
        # generator and parameter constraints
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
