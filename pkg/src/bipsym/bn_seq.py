"""b_n = sum over integer partitions lambda of n of prod lambda_j!, and the
inequalities used to bound it."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

from .errors import RangeTooSmall


@dataclass(frozen=True)
class BnTable:
    values: tuple[int, ...]

    def __getitem__(self, n: int) -> int:
        return self.values[n]

    def __len__(self) -> int:
        return len(self.values)


@lru_cache(maxsize=None)
def divisor_weight(t: int) -> int:
    """sum over d | t of d * (d!)^(t/d)."""
    total = 0
    for d in range(1, math.isqrt(t) + 1):
        if t % d == 0:
            e = t // d
            total += d * math.factorial(d) ** e
            if e != d:
                total += e * math.factorial(e) ** d
    return total


def bn_recurrence(nmax: int) -> BnTable:
    """b_0..b_nmax from n b_n = sum_{t=1}^n b_{n-t} * divisor_weight(t)."""
    b = [1]
    for n in range(1, nmax + 1):
        acc = sum(b[n - t] * divisor_weight(t) for t in range(1, n + 1))
        q, rem = divmod(acc, n)
        if rem:
            raise ArithmeticError(f"recurrence not divisible at n={n}: remainder {rem}")
        b.append(q)
    return BnTable(tuple(b))


def integer_partitions(n: int) -> Iterator[tuple[int, ...]]:
    """Partitions of n as non-increasing tuples, largest parts first."""
    if n == 0:
        yield ()
        return
    # iterative descent over (remaining, max part) to avoid deep recursion
    stack = [((), n, n)]
    while stack:
        prefix, left, cap = stack.pop()
        if left == 0:
            yield prefix
            continue
        for part in range(1, min(left, cap) + 1):
            stack.append((prefix + (part,), left - part, part))


def bn_direct(n: int) -> int:
    fact = [math.factorial(i) for i in range(n + 1)]
    total = 0
    for lam in integer_partitions(n):
        p = 1
        for part in lam:
            p *= fact[part]
        total += p
    return total


def verify_comps_bound(nmax: int, table: BnTable | None = None) -> list[int]:
    """n with n * b_n > n! * (n + 4), i.e. violations of b_n <= n!(1 + 4/n)."""
    table = table or bn_recurrence(nmax)
    out = []
    f = 1
    for n in range(1, nmax + 1):
        f *= n
        if n * table[n] > f * (n + 4):
            out.append(n)
    return out


def verify_prodmin(n_range: Iterable[int]) -> list[tuple[int, int]]:
    """(n, t) violating (n-t)! t! (1 + 4/(n-t)) 2t <= 3 (n-1)! for 1 <= t <= n-3.

    Checked as (n-t)! t! (n-t+4) 2t <= 3 (n-1)! (n-t), all in integers.
    """
    ns = list(n_range)
    if not ns:
        return []
    if min(ns) < 17:
        raise RangeTooSmall(f"the inequality needs n >= 17; got {min(ns)}")
    fact = [1]
    for i in range(1, max(ns) + 1):
        fact.append(fact[-1] * i)
    bad = []
    for n in ns:
        rhs_base = 3 * fact[n - 1]
        for t in range(1, n - 2):
            if fact[n - t] * fact[t] * (n - t + 4) * 2 * t > rhs_base * (n - t):
                bad.append((n, t))
    return bad
