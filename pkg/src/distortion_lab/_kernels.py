"""Integer kernels behind the exhaustive oracles.

Each kernel has a numba implementation and a pure-numpy one. The numba path
is used when numba imports and ``DISTORTION_LAB_PURE_NUMPY`` is unset (or
``0``). Both work on integer-scaled values, so they are exact; ratios are
compared by cross-multiplication.

Vertex tables have shape ``(n, P, m)``: ``table[i, p, x]`` is agent ``i``'s
scaled value for alternative ``x`` at the vertex with prefix length ``p+1``.
"""

from __future__ import annotations

import itertools
import math
import os
from fractions import Fraction

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

PURE_NUMPY = os.environ.get("DISTORTION_LAB_PURE_NUMPY", "0") not in ("", "0")
BACKEND = "numba" if HAVE_NUMBA and not PURE_NUMPY else "numpy"

_INT_LIMIT = 2**62


def vertex_table(positions: np.ndarray) -> tuple[np.ndarray, int]:
    """Prefix-uniform vertex values scaled by ``L = lcm(1..m)``."""
    n, m = positions.shape
    scale = math.lcm(*range(1, m + 1))
    p = np.arange(1, m + 1)
    table = np.where(positions[:, None, :] < p[None, :, None], scale // p[None, :, None], 0)
    return table.astype(np.int64), scale


def check_range(table: np.ndarray) -> None:
    n = table.shape[0]
    top = int(table.max()) * n if table.size else 0
    if top * top >= _INT_LIMIT:
        raise OverflowError("instance too large for exact int64 ratio comparison")


def _better(num: int, den: int, best_num: int, best_den: int) -> bool:
    return num * best_den > best_num * den


# --------------------------------------------------------------------------
# numba implementations

if HAVE_NUMBA:

    @njit(cache=True, nogil=True)
    def _voting_vertex_max_nb(table, outcome, lo, hi):
        n, P, m = table.shape
        digits = np.zeros(n, np.int64)
        digits[0] = lo
        sw = np.zeros(m, np.int64)
        for i in range(n):
            for x in range(m):
                sw[x] += table[i, digits[i], x]
        best_num = 0
        best_den = 1
        best_digits = digits.copy()
        while True:
            den = sw[outcome]
            num = sw[0]
            for x in range(1, m):
                if sw[x] > num:
                    num = sw[x]
            if num * best_den > best_num * den:
                best_num = num
                best_den = den
                best_digits[:] = digits
                if den == 0:
                    break
            j = n - 1
            while j >= 0:
                for x in range(m):
                    sw[x] -= table[j, digits[j], x]
                digits[j] += 1
                limit = hi if j == 0 else P
                if digits[j] < limit:
                    for x in range(m):
                        sw[x] += table[j, digits[j], x]
                    break
                digits[j] = lo if j == 0 else 0
                for x in range(m):
                    sw[x] += table[j, digits[j], x]
                j -= 1
            if j < 0:
                break
        return best_num, best_den, best_digits

    @njit(cache=True, nogil=True)
    def _relax_layers(table, digits, dp, layer_masks, layer_start, first):
        # dp[mask] = best value assigning agents 0..popcount(mask)-1 to items in mask
        n = table.shape[0]
        for c in range(first, n):
            for t in range(layer_start[c + 1], layer_start[c + 2]):
                dp[layer_masks[t]] = -1
            for t in range(layer_start[c], layer_start[c + 1]):
                mask = layer_masks[t]
                base = dp[mask]
                if base < 0:
                    continue
                for x in range(n):
                    if (mask >> x) & 1 == 0:
                        val = base + table[c, digits[c], x]
                        nxt = mask | (1 << x)
                        if val > dp[nxt]:
                            dp[nxt] = val

    @njit(cache=True, nogil=True)
    def _matching_vertex_max_nb(table, item_of, lo, hi, layer_masks, layer_start):
        n, P, _ = table.shape
        full = (1 << n) - 1
        digits = np.zeros(n, np.int64)
        digits[0] = lo
        dp = np.full(1 << n, -1, np.int64)
        dp[0] = 0
        _relax_layers(table, digits, dp, layer_masks, layer_start, 0)
        best_num = 0
        best_den = 1
        best_digits = digits.copy()
        while True:
            den = 0
            for i in range(n):
                den += table[i, digits[i], item_of[i]]
            num = dp[full]
            if num * best_den > best_num * den:
                best_num = num
                best_den = den
                best_digits[:] = digits
                if den == 0:
                    break
            j = n - 1
            while j >= 0:
                digits[j] += 1
                limit = hi if j == 0 else P
                if digits[j] < limit:
                    break
                digits[j] = lo if j == 0 else 0
                j -= 1
            if j < 0:
                break
            _relax_layers(table, digits, dp, layer_masks, layer_start, j)
        return best_num, best_den, best_digits

    @njit(cache=True, nogil=True)
    def _assignment_values_nb(weights, layer_masks, layer_start):
        B, n, _ = weights.shape
        out = np.empty(B, np.int64)
        dp = np.empty(1 << n, np.int64)
        for b in range(B):
            dp[:] = -1
            dp[0] = 0
            for c in range(n):
                for t in range(layer_start[c], layer_start[c + 1]):
                    mask = layer_masks[t]
                    base = dp[mask]
                    if base < 0:
                        continue
                    for x in range(n):
                        if (mask >> x) & 1 == 0:
                            val = base + weights[b, c, x]
                            nxt = mask | (1 << x)
                            if val > dp[nxt]:
                                dp[nxt] = val
            out[b] = dp[(1 << n) - 1]
        return out


def _layers(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Masks over ``n`` bits grouped by popcount, with group offsets."""
    masks = sorted(range(1 << n), key=lambda s: (bin(s).count("1"), s))
    counts = np.bincount([bin(s).count("1") for s in masks], minlength=n + 1)
    start = np.concatenate([[0], np.cumsum(counts), [len(masks)]])
    return np.array(masks, dtype=np.int64), start.astype(np.int64)


# --------------------------------------------------------------------------
# numpy implementations

_CHUNK = 1 << 15


def _digits(flat: np.ndarray, n: int, radix: int, lo: int) -> np.ndarray:
    out = np.empty((flat.size, n), dtype=np.int64)
    rest = flat.copy()
    for j in range(n - 1, 0, -1):
        out[:, j] = rest % radix
        rest //= radix
    out[:, 0] = rest + lo
    return out


def _chunk_best(num: np.ndarray, den: np.ndarray) -> int:
    """Index of the first exact maximum of ``num/den`` (den may be 0)."""
    inf = np.flatnonzero((den == 0) & (num > 0))
    if inf.size:
        return int(inf[0])
    ratio = num / den
    top = ratio.max()
    cand = np.flatnonzero(ratio >= top * (1 - 1e-9))
    best = int(cand[0])
    for c in cand[1:]:
        if _better(int(num[c]), int(den[c]), int(num[best]), int(den[best])):
            best = int(c)
    return best


def _enumerate_numpy(n, P, lo, hi, evaluate):
    total = (hi - lo) * P ** (n - 1)
    best = (0, 1, None)
    for start in range(0, total, _CHUNK):
        flat = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        digits = _digits(flat, n, P, lo)
        num, den = evaluate(digits)
        b = _chunk_best(num, den)
        if _better(int(num[b]), int(den[b]), best[0], best[1]):
            best = (int(num[b]), int(den[b]), digits[b].copy())
            if best[1] == 0:
                break
    return best


def voting_vertex_max_numpy(table, outcome, lo, hi):
    n, P, m = table.shape
    agents = np.arange(n)

    def evaluate(digits):
        sw = table[agents[None, :], digits].sum(axis=1)
        return sw.max(axis=1), sw[:, outcome]

    return _enumerate_numpy(n, P, lo, hi, evaluate)


def _perms(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)


def assignment_values_numpy(weights: np.ndarray) -> np.ndarray:
    B, n, _ = weights.shape
    perms = _perms(n)
    agents = np.arange(n)
    step = max(1, 2_000_000 // (len(perms) * n))
    out = np.empty(B, dtype=np.int64)
    for s in range(0, B, step):
        w = weights[s : s + step]
        out[s : s + step] = w[:, agents[None, :], perms].sum(axis=2).max(axis=1)
    return out


def matching_vertex_max_numpy(table, item_of, lo, hi):
    n, P, _ = table.shape
    agents = np.arange(n)
    item_of = np.asarray(item_of, dtype=np.int64)

    def evaluate(digits):
        w = table[agents[None, :], digits]  # (C, n, n)
        den = w[:, agents, item_of].sum(axis=1)
        return assignment_values_numpy(w), den

    return _enumerate_numpy(n, P, lo, hi, evaluate)


if HAVE_NUMBA:

    def voting_vertex_max_numba(table, outcome, lo, hi):
        num, den, digits = _voting_vertex_max_nb(table, int(outcome), int(lo), int(hi))
        return int(num), int(den), digits

    def matching_vertex_max_numba(table, item_of, lo, hi):
        masks, start = _layers(table.shape[0])
        num, den, digits = _matching_vertex_max_nb(
            table, np.asarray(item_of, dtype=np.int64), int(lo), int(hi), masks, start
        )
        return int(num), int(den), digits

    def assignment_values_numba(weights):
        masks, start = _layers(weights.shape[1])
        return _assignment_values_nb(np.ascontiguousarray(weights, dtype=np.int64), masks, start)


def _pick(name):
    return globals()[f"{name}_{BACKEND}"]


def voting_vertex_max(table, outcome, lo, hi):
    """Best ``(num, den, prefix_digits)`` over agent-0 prefixes in ``[lo, hi)``.

    ``num/den`` is ``max_z SW(z) / SW(outcome)``; the first vertex in
    enumeration order wins exact ties, and a zero denominator stops the search.
    """
    if hi <= lo:
        return 0, 1, None
    return _pick("voting_vertex_max")(table, outcome, lo, hi)


def matching_vertex_max(table, item_of, lo, hi):
    """As :func:`voting_vertex_max` with the numerator a maximum-weight matching."""
    if hi <= lo:
        return 0, 1, None
    return _pick("matching_vertex_max")(table, item_of, lo, hi)


def assignment_values(weights: np.ndarray) -> np.ndarray:
    """Maximum perfect-matching weight of each ``n x n`` integer matrix in a batch."""
    weights = np.asarray(weights, dtype=np.int64)
    if weights.shape[0] == 0:
        return np.empty(0, dtype=np.int64)
    return _pick("assignment_values")(weights)


def as_fraction(num: int, den: int) -> Fraction | float:
    if den == 0:
        return math.inf
    return Fraction(num, den)
