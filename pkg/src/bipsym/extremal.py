"""Closed forms for the minimum and maximum automorphism orders of
(k, l)-bipartite graphs, explicit partwise-fixed minimizers for each residue
class of l modulo k, and the factorial-product minimizer over constrained
multisets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    InvalidSequence,
    OutsideTheoremRange,
    SearchFailed,
    WindowUndefined,
)
from .matrix_core import IntersectionMatrix, RectMatrix, cyclic_shift, patched, validate
from .stabilizer import factorial_product, is_partwise_fixed

DEFAULT_JAMES_BUDGET = 100_000
DEFAULT_JAMES_SEED = 20_240_917


@dataclass(frozen=True)
class ResidueDecomposition:
    """l = q*k + r with -2 <= r <= k-3."""

    q: int
    r: int

    @property
    def eps(self) -> int | None:
        return self.r // 2 if self.r in (-2, 2) else None


def decompose(k: int, l: int) -> ResidueDecomposition:
    if k <= 4:
        raise WindowUndefined(f"residue window [-2, k-3] is ambiguous for k={k}")
    r = l % k
    if r > k - 3:
        r -= k
    return ResidueDecomposition((l - r) // k, r)


def _ceil_half(k: int) -> int:
    return (k + 1) // 2


def chi_formula(k: int, l: int) -> int:
    """Minimum |Aut| over (k, l)-bipartite graphs for k >= 8, or l = 2 with k >= 3."""
    if l == 2 and k >= 3:
        return 2 * k
    if k < 8 or l < 2:
        raise OutsideTheoremRange(f"closed form only covers k >= 8 (or l = 2, k >= 3); got k={k}, l={l}")
    d = decompose(k, l)
    q, r = d.q, d.r
    f = math.factorial
    if r == 0:
        return f(q + 1) ** k * f(q) ** (k * k - 2 * k) * f(q - 1) ** k
    if 3 <= r <= k - 3:
        return f(q + 1) ** (r * k) * f(q) ** (k * k - r * k)
    c = _ceil_half(k)
    if r in (1, -1):
        return f(q + r) ** (k + c) * f(q) ** (k * k - k - 2 * c) * f(q - r) ** c
    eps = r // 2
    return f(q + eps) ** (2 * k + 1) * f(q) ** (k * k - 2 * k - 2) * f(q - eps)


def mu_formula(k: int, l: int) -> int:
    """k! * (l!)^k, attained by l times the identity."""
    return math.factorial(k) * math.factorial(l) ** k


# ---------------------------------------------------------------------------
# explicit minimizers

@dataclass(frozen=True)
class Minimizer:
    matrix: IntersectionMatrix
    provenance: str
    decomposition: ResidueDecomposition


def _const(rows: int, cols: int, value: int) -> list[list[int]]:
    return [[value] * cols for _ in range(rows)]


def minimizer_r_pm2(k: int, q: int, eps: int) -> IntersectionMatrix:
    """theta(v) - eps E(k-2,k-2) + eps E(k-2,k-3) + eps E(k,k-2) - eps E(k,k-3)."""
    v = [q + eps, q + eps] + [q] * (k - 2)
    return patched(cyclic_shift(v),
                   (-eps, k - 2, k - 2), (eps, k - 2, k - 3),
                   (eps, k, k - 2), (-eps, k, k - 3))


def minimizer_r0(k: int, q: int) -> IntersectionMatrix:
    """theta(v) + E(k-3,k) - E(k-3,1) - E(k,k) + E(k,1) with v = (q+1, q-1, q, ..., q)."""
    v = [q + 1, q - 1] + [q] * (k - 2)
    return patched(cyclic_shift(v), (1, k - 3, k), (-1, k - 3, 1), (-1, k, k), (1, k, 1))


def _theta_rows(v: Sequence[int]) -> list[list[int]]:
    n = len(v)
    return [[v[(j - i) % n] for j in range(n)] for i in range(n)]


def block_minimizer_odd(k: int, q: int, r: int) -> IntersectionMatrix:
    """The block matrix [[N1, N2], [N3, qJ]] for odd k and r = +-1."""
    if k % 2 == 0:
        raise ValueError("odd k required")
    c, f = _ceil_half(k), k // 2
    u = [q - r] + [q] * (c - 2) + [q + r]
    v = [q + r] + [q] * (f - 1)
    w = [q + r] + [q] * (c - 1)
    n1 = _theta_rows(u)
    n1[0][1] += r
    n2 = [[q] * f] + _theta_rows(v)
    tw = _theta_rows(w)
    n3 = tw[:1] + tw[2:]
    top = [a + b for a, b in zip(n1, n2)]
    bottom = [a + b for a, b in zip(n3, _const(f, f, q))]
    return validate(top + bottom)


def block_minimizer(k: int, q: int, r: int) -> IntersectionMatrix:
    """Odd k: the block matrix itself. Even k: the (k-1) block matrix bordered by (q, ..., q, q+r)."""
    if k % 2:
        return block_minimizer_odd(k, q, r)
    inner = block_minimizer_odd(k - 1, q, r)
    rows = [list(row) + [q] for row in inner.entries]
    rows.append([q] * (k - 1) + [q + r])
    return validate(rows)


def construct_minimizer(k: int, l: int, seed: int = DEFAULT_JAMES_SEED,
                        budget: int = DEFAULT_JAMES_BUDGET) -> Minimizer:
    """A partwise-fixed (k, l)-intersection matrix whose |Aut| equals chi_formula(k, l)."""
    if k < 8 or l <= 2:
        raise OutsideTheoremRange(f"explicit minimizers need k >= 8 and l > 2; got k={k}, l={l}")
    d = decompose(k, l)
    q, r = d.q, d.r
    if r in (-2, 2):
        return Minimizer(minimizer_r_pm2(k, q, r // 2), "staircase-pm2", d)
    if r == 0:
        return Minimizer(minimizer_r0(k, q), "staircase-r0", d)
    if r in (-1, 1):
        tag = "block-odd" if k % 2 else "block-even"
        return Minimizer(block_minimizer(k, q, r), tag, d)
    A = james_witness(k, r, seed=seed, budget=budget)
    N = validate([[x + q for x in row] for row in A.entries])
    return Minimizer(N, "james-shift", d)


def cycle_minimizer(k: int) -> IntersectionMatrix:
    """theta(1, 1, 0, ..., 0): the 2k-cycle, with |Aut| = 2k for l = 2."""
    return cyclic_shift([1, 1] + [0] * (k - 2))


# ---------------------------------------------------------------------------
# 0/1 partwise-fixed witnesses

_james_cache: dict[tuple[int, int, int], IntersectionMatrix] = {}


def complement(A: RectMatrix) -> IntersectionMatrix:
    """Entrywise 1 - a_ij of a 0/1 matrix; preserves K_N."""
    return validate([[1 - x for x in row] for row in A.entries])


def random_binary_matrix(k: int, r: int, rng: np.random.Generator, swaps: int | None = None) -> np.ndarray:
    """0/1 matrix with margins r: stack r disjoint random permutations, then mix with 2x2 swaps."""
    while True:
        a = np.zeros((k, k), dtype=np.int64)
        ok = True
        for _ in range(r):
            for _attempt in range(1000):
                p = rng.permutation(k)
                if not a[np.arange(k), p].any():
                    a[np.arange(k), p] = 1
                    break
            else:
                ok = False
                break
        if ok:
            break
    for _ in range(swaps if swaps is not None else 4 * k * k):
        i, i2 = rng.choice(k, 2, replace=False)
        j, j2 = rng.choice(k, 2, replace=False)
        if a[i, j] == a[i2, j2] == 1 and a[i, j2] == a[i2, j] == 0:
            a[i, j] = a[i2, j2] = 0
            a[i, j2] = a[i2, j] = 1
    return a


def _exhaustive_binary(k: int, r: int, budget: int):
    """0/1 margin-r matrices in row-lexicographic order, at most ``budget`` of them."""
    col_left = [r] * k
    rows: list[tuple[int, ...]] = []
    seen = 0

    def row_choices(i):
        # columns whose remaining budget equals the number of rows left are forced
        rows_left = k - i
        forced = [j for j in range(k) if col_left[j] == rows_left]
        free = [j for j in range(k) if 0 < col_left[j] < rows_left]
        need = r - len(forced)
        if need < 0 or need > len(free):
            return
        from itertools import combinations

        for extra in combinations(free, need):
            yield sorted(forced + list(extra))

    def rec(i):
        nonlocal seen
        if i == k:
            seen += 1
            yield tuple(rows)
            return
        for cols in row_choices(i):
            if seen >= budget:
                return
            row = tuple(int(j in cols) for j in range(k))
            for j in cols:
                col_left[j] -= 1
            rows.append(row)
            yield from rec(i + 1)
            rows.pop()
            for j in cols:
                col_left[j] += 1

    yield from rec(0)


def james_witness(k: int, r: int, seed: int = DEFAULT_JAMES_SEED,
                  budget: int = DEFAULT_JAMES_BUDGET) -> IntersectionMatrix:
    """A partwise-fixed 0/1 (k, r)-intersection matrix, found by randomized search.

    Falls back to an exhaustive scan for k <= 9 if the random budget runs out.
    Results are cached per (k, r, seed).
    """
    if not (3 <= r <= k - 3 and k >= 8):
        raise OutsideTheoremRange(f"need 3 <= r <= k-3 and k >= 8; got k={k}, r={r}")
    key = (k, r, seed)
    if key in _james_cache:
        return _james_cache[key]
    rng = np.random.default_rng(seed)
    for _ in range(budget):
        A = validate(random_binary_matrix(k, r, rng).tolist())
        if is_partwise_fixed(A):
            _james_cache[key] = A
            return A
    if k <= 9:
        for grid in _exhaustive_binary(k, r, budget):
            A = validate(grid)
            if is_partwise_fixed(A):
                _james_cache[key] = A
                return A
    raise SearchFailed(f"no partwise-fixed 0/1 ({k},{r}) matrix within budget {budget}")


# ---------------------------------------------------------------------------
# constrained factorial products

@dataclass(frozen=True)
class MultiplicitySequence:
    """[(m_1, r_1), ..., (m_d, r_d)]: at least m_1 + ... + m_i entries beyond rank r_i."""

    pairs: tuple[tuple[int, int], ...]
    s: int
    t: int

    def __post_init__(self):
        pairs = tuple((int(m), int(r)) for m, r in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        s, t = self.s, self.t
        if s <= 0 or t <= 0:
            raise InvalidSequence("s and t must be positive")
        if any(m < 1 or r < 0 for m, r in pairs):
            raise InvalidSequence("multiplicities must be positive and ranks non-negative")
        if sum(m for m, _ in pairs) >= t:
            raise InvalidSequence("sum of multiplicities must be below t")
        if sum(m * r for m, r in pairs) >= s:
            raise InvalidSequence("sum of m_i r_i must be below s")
        if pairs:
            ranks = [r for _, r in pairs]
            up = all(a > b for a, b in zip(ranks, ranks[1:])) and ranks[-1] > -(-s // t)
            down = all(a < b for a, b in zip(ranks, ranks[1:])) and ranks[-1] < s // t
            if not (up or down):
                raise InvalidSequence(f"ranks {ranks} are neither all above ceil(s/t) "
                                      f"decreasing nor all below floor(s/t) increasing")

    @property
    def upper(self) -> bool:
        return bool(self.pairs) and self.pairs[0][1] > self.s / self.t

    @property
    def fill_count(self) -> int:
        return self.t - sum(m for m, _ in self.pairs)

    @property
    def fill_sum(self) -> int:
        return self.s - sum(m * r for m, r in self.pairs)

    @property
    def x(self):
        from fractions import Fraction

        return Fraction(self.fill_sum, self.fill_count)

    @property
    def b(self) -> int:
        """How many filler entries take the ceiling of x (0 when x is an integer)."""
        return self.fill_sum % self.fill_count

    def admits(self, multiset: Sequence[int]) -> bool:
        """Membership of a size-t, sum-s multiset in S(s, t, X)."""
        if len(multiset) != self.t or sum(multiset) != self.s or min(multiset) < 0:
            return False
        need = 0
        for m, r in self.pairs:
            need += m
            if self.upper:
                have = sum(1 for a in multiset if a >= r)
            else:
                have = sum(1 for a in multiset if a <= r)
            if have < need:
                return False
        return True


def min_factorial_product(s: int, t: int, pairs: Sequence[tuple[int, int]] = ()) -> tuple[int, tuple[int, ...]]:
    """Minimum of prod a! over S(s, t, X) and the multiset attaining it.

    The witness holds each rank with its multiplicity and spreads the rest of
    the sum as evenly as possible.
    """
    X = pairs if isinstance(pairs, MultiplicitySequence) else MultiplicitySequence(tuple(pairs), s, t)
    f, F = X.fill_count, X.fill_sum
    lo, b = divmod(F, f)
    hi = lo + 1 if b else lo
    value = math.factorial(hi) ** b * math.factorial(lo) ** (f - b)
    witness = []
    for m, r in X.pairs:
        value *= math.factorial(r) ** m
        witness += [r] * m
    witness += [hi] * b + [lo] * (f - b)
    return value, tuple(sorted(witness, reverse=True))


def expected_entry_multiset(k: int, l: int) -> dict[int, int]:
    """The entry multiset every minimizer must have, per residue class."""
    d = decompose(k, l)
    q, r = d.q, d.r
    c = _ceil_half(k)
    if r == 0:
        out = {q + 1: k, q: k * k - 2 * k, q - 1: k}
    elif 3 <= r <= k - 3:
        out = {q + 1: r * k, q: k * k - r * k}
    elif r in (1, -1):
        out = {q - r: c, q: k * k - k - 2 * c, q + r: k + c}
    else:
        eps = r // 2
        out = {q - eps: 1, q: k * k - 2 * k - 2, q + eps: 2 * k + 1}
    return {v: m for v, m in sorted(out.items()) if m}


def product_lower_bound_ok(N: IntersectionMatrix) -> bool:
    """True when prod n_ij! alone already reaches chi_formula, so K_N need not be computed."""
    return factorial_product(N) >= chi_formula(N.k, N.l)
