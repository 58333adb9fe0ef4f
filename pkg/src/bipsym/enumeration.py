"""Exhaustive generation of Omega_{k,l} (all k x k matrices with margins l)
and the brute-force oracles built on it.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterator, Sequence

from .errors import BudgetExceeded, DegreeMismatch
from .extremal import MultiplicitySequence
from .matrix_core import IntersectionMatrix
from .stabilizer import factorial_product, stabilizer

DEFAULT_BUDGET = 10 ** 8


def _compositions(total: int, caps: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Vectors c with sum(c) == total and 0 <= c[j] <= caps[j], in lexicographic order."""
    n = len(caps)
    suffix = [0] * (n + 1)
    for j in range(n - 1, -1, -1):
        suffix[j] = suffix[j + 1] + caps[j]
    out = [0] * n

    def rec(j, left):
        if j == n - 1:
            if left <= caps[j]:
                out[j] = left
                yield tuple(out)
            return
        lo = max(0, left - suffix[j + 1])
        for x in range(lo, min(left, caps[j]) + 1):
            out[j] = x
            yield from rec(j + 1, left - x)

    if total <= suffix[0]:
        yield from rec(0, total)


def first_rows(k: int, l: int) -> list[tuple[int, ...]]:
    return list(_compositions(l, [l] * k))


def iter_matrices(k: int, l: int, first_row: Sequence[int] | None = None) -> Iterator[IntersectionMatrix]:
    """Row-by-row backtracking; entries bounded by the remaining column budget,
    last row forced. Order is row-lexicographic."""
    cols = [l] * k
    rows: list[tuple[int, ...]] = []

    def rec(i):
        if i == k - 1:
            yield IntersectionMatrix(tuple(rows) + (tuple(cols),))
            return
        choices = [tuple(first_row)] if (i == 0 and first_row is not None) else _compositions(l, cols)
        for row in choices:
            for j, x in enumerate(row):
                cols[j] -= x
            rows.append(row)
            yield from rec(i + 1)
            rows.pop()
            for j, x in enumerate(row):
                cols[j] += x

    if k == 1:
        yield IntersectionMatrix(((l,),))
        return
    yield from rec(0)


@lru_cache(maxsize=None)
def _count_from(k_left: int, l: int, cols: tuple[int, ...]) -> int:
    if k_left == 1:
        return 1
    total = 0
    for row in _compositions(l, cols):
        rest = tuple(sorted(c - x for c, x in zip(cols, row)))
        total += _count_from(k_left - 1, l, rest)
    return total


def count_matrices(k: int, l: int) -> int:
    """H_k(l) by memoized row-by-row counting over sorted column budgets (no explicit listing)."""
    return _count_from(k, l, tuple([l] * k))


@dataclass
class EnumerationStats:
    k: int
    l: int
    count: int = 0
    min_aut: int | None = None
    min_witness: IntersectionMatrix | None = None
    max_aut: int | None = None
    max_witness: IntersectionMatrix | None = None
    sum_factorial_products: int = 0
    trivial_KN_count: int = 0
    with_symmetry: bool = True

    def add(self, N: IntersectionMatrix) -> None:
        self.count += 1
        fp = factorial_product(N)
        self.sum_factorial_products += fp
        if not self.with_symmetry:
            return
        rep = stabilizer(N)
        if rep.partwise_fixed:
            self.trivial_KN_count += 1
        if self.min_aut is None or rep.aut_order < self.min_aut:
            self.min_aut, self.min_witness = rep.aut_order, N
        if self.max_aut is None or rep.aut_order >= self.max_aut:
            self.max_aut, self.max_witness = rep.aut_order, N

    def merge(self, other: "EnumerationStats") -> "EnumerationStats":
        """Combine shard totals. On ties the minimum keeps the earlier witness and
        the maximum the later one, so merging shards in first-row order
        reproduces the single-pass witnesses."""
        out = EnumerationStats(self.k, self.l, with_symmetry=self.with_symmetry and other.with_symmetry)
        out.count = self.count + other.count
        out.sum_factorial_products = self.sum_factorial_products + other.sum_factorial_products
        out.trivial_KN_count = self.trivial_KN_count + other.trivial_KN_count
        for name in ("min", "max"):
            better = (lambda x, y: x < y) if name == "min" else (lambda x, y: x >= y)
            a, aw = getattr(self, f"{name}_aut"), getattr(self, f"{name}_witness")
            b, bw = getattr(other, f"{name}_aut"), getattr(other, f"{name}_witness")
            if a is None or (b is not None and better(b, a)):
                a, aw = b, bw
            setattr(out, f"{name}_aut", a)
            setattr(out, f"{name}_witness", aw)
        return out

    @property
    def trivial_KN_fraction(self) -> float:
        return self.trivial_KN_count / self.count if self.count else 0.0

    def mean_factorial_product(self) -> Fraction:
        return Fraction(self.sum_factorial_products, self.count)

    def factexp_ratio(self, digits: int = 30) -> Decimal:
        """E(prod X_ij!) * l^((k-1)^2) / (l!)^k, from exact integers."""
        k, l = self.k, self.l
        num = self.sum_factorial_products * l ** ((k - 1) ** 2)
        den = self.count * math.factorial(l) ** k
        with localcontext() as ctx:
            ctx.prec = digits
            return Decimal(num) / Decimal(den)

    def to_json(self) -> dict:
        def m(N):
            return None if N is None else [list(r) for r in N.entries]

        return {
            "k": self.k, "l": self.l, "count": str(self.count),
            "min_aut": None if self.min_aut is None else str(self.min_aut),
            "min_witness": m(self.min_witness),
            "max_aut": None if self.max_aut is None else str(self.max_aut),
            "max_witness": m(self.max_witness),
            "sum_factorial_products": str(self.sum_factorial_products),
            "trivial_KN_count": self.trivial_KN_count,
            "trivial_KN_fraction": self.trivial_KN_fraction,
            "factexp_ratio": str(self.factexp_ratio()),
        }


def _shard(args) -> EnumerationStats:
    k, l, row, with_symmetry = args
    stats = EnumerationStats(k, l, with_symmetry=with_symmetry)
    for N in iter_matrices(k, l, first_row=row):
        stats.add(N)
    return stats


def enumerate_matrices(k: int, l: int, visitor: Callable[[IntersectionMatrix], None] | None = None,
                       budget: int = DEFAULT_BUDGET, with_symmetry: bool = True,
                       workers: int = 1) -> EnumerationStats:
    """Visit every matrix in Omega_{k,l} once and aggregate statistics.

    Raises BudgetExceeded up front when H_k(l) exceeds ``budget``. With
    ``workers > 1`` the first rows are farmed out to processes (no visitor);
    totals and witnesses match the single-worker run.
    """
    total = count_matrices(k, l)
    if total > budget:
        raise BudgetExceeded(f"H_{k}({l}) = {total} exceeds budget {budget}")
    if workers > 1 and visitor is None and k > 1:
        jobs = [(k, l, row, with_symmetry) for row in first_rows(k, l)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_shard, jobs))
        out = EnumerationStats(k, l, with_symmetry=with_symmetry)
        for part in parts:
            out = out.merge(part)
        return out
    stats = EnumerationStats(k, l, with_symmetry=with_symmetry)
    for N in iter_matrices(k, l):
        stats.add(N)
        if visitor is not None:
            visitor(N)
    return stats


def chi_oracle(k: int, l: int, budget: int = DEFAULT_BUDGET) -> tuple[int, IntersectionMatrix]:
    s = enumerate_matrices(k, l, budget=budget)
    return s.min_aut, s.min_witness


def mu_oracle(k: int, l: int, budget: int = DEFAULT_BUDGET) -> tuple[int, IntersectionMatrix]:
    s = enumerate_matrices(k, l, budget=budget)
    return s.max_aut, s.max_witness


# ---------------------------------------------------------------------------
# polynomial fit of H_k(l)

@dataclass
class StanleyFit:
    k: int
    degree: int
    coefficients: list[Fraction]  # ascending powers of l
    data: list[int]
    predicted_next: int
    actual_next: int

    def __call__(self, l: int) -> Fraction:
        return sum(c * l ** i for i, c in enumerate(self.coefficients))

    @property
    def held_out_ok(self) -> bool:
        return self.predicted_next == self.actual_next


def interpolate(values: Sequence[int]) -> list[Fraction]:
    """Coefficients (ascending) of the polynomial through (0, v0), (1, v1), ..."""
    n = len(values)
    # Newton forward differences, then expand the falling-factorial basis
    diffs = [Fraction(v) for v in values]
    newton = []
    for _ in range(n):
        newton.append(diffs[0])
        diffs = [b - a for a, b in zip(diffs, diffs[1:])]
    coeffs = [Fraction(0)] * n
    basis = [Fraction(1)]  # coefficients of l(l-1)...(l-i+1)/i!
    for i, c in enumerate(newton):
        for p, bc in enumerate(basis):
            coeffs[p] += c * bc
        nxt = [Fraction(0)] * (len(basis) + 1)
        for p, bc in enumerate(basis):
            nxt[p + 1] += bc / (i + 1)
            nxt[p] -= bc * i / (i + 1)
        basis = nxt
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def stanley_fit(k: int, lmax: int | None = None, counter: Callable[[int, int], int] = count_matrices) -> StanleyFit:
    """Fit H_k(0..lmax) with a degree (k-1)^2 polynomial and predict H_k(lmax + 1)."""
    degree = (k - 1) ** 2
    if lmax is None:
        lmax = degree
    if lmax < degree:
        raise DegreeMismatch(f"need lmax >= {degree} for a degree-{degree} fit")
    data = [counter(k, l) for l in range(lmax + 1)]
    coeffs = interpolate(data[: degree + 1])
    if len(coeffs) - 1 != degree:
        raise DegreeMismatch(f"interpolant has degree {len(coeffs) - 1}, expected {degree}")

    def ev(l):
        return sum(c * l ** i for i, c in enumerate(coeffs))

    for l, h in enumerate(data):
        if ev(l) != h:
            raise DegreeMismatch(f"polynomial misses H_{k}({l}) = {h}")
    pred = ev(lmax + 1)
    if pred.denominator != 1:
        raise DegreeMismatch("prediction is not an integer")
    return StanleyFit(k, degree, coeffs, data, int(pred), counter(k, lmax + 1))


# ---------------------------------------------------------------------------
# brute force for the constrained factorial-product minimum

def bounded_multisets(s: int, t: int) -> Iterator[tuple[int, ...]]:
    """Non-increasing tuples of t non-negative integers summing to s."""

    def rec(left, slots, cap):
        if slots == 0:
            if left == 0:
                yield ()
            return
        for x in range(min(left, cap), -1, -1):
            if x * slots < left:
                break
            for tail in rec(left - x, slots - 1, x):
                yield (x,) + tail

    yield from rec(s, t, s)


def min_factorial_product_oracle(s: int, t: int, pairs: Sequence[tuple[int, int]] = ()) -> tuple[int, tuple[int, ...]]:
    """Exhaustive minimum of prod a! over S(s, t, X); returns (value, a minimizing multiset)."""
    X = MultiplicitySequence(tuple(pairs), s, t)
    best = None
    for A in bounded_multisets(s, t):
        if not X.admits(A):
            continue
        v = 1
        for a in A:
            v *= math.factorial(a)
        if best is None or v < best[0]:
            best = (v, A)
    return best


def valid_sequences(s: int, t: int, max_d: int = 2) -> Iterator[tuple[tuple[int, int], ...]]:
    """Every valid multiplicity sequence with d <= max_d for the given (s, t)."""
    yield ()
    ceil_, floor_ = -(-s // t), s // t

    def rec(prefix, d_left, up):
        if prefix:
            try:
                MultiplicitySequence(prefix, s, t)
            except ValueError:
                return
            yield prefix
        if d_left == 0:
            return
        used_m = sum(m for m, _ in prefix)
        if up:
            ranks = range(ceil_ + 1, s + 1) if not prefix else range(ceil_ + 1, prefix[-1][1])
        else:
            ranks = range(0, floor_) if not prefix else range(prefix[-1][1] + 1, floor_)
        for r in ranks:
            for m in range(1, t - used_m):
                yield from rec(prefix + ((m, r),), d_left - 1, up)

    yield from rec((), max_d, True)
    yield from rec((), max_d, False)
