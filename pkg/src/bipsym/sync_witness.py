"""Clique number = chromatic number for the "no common part" graph on (k, l)-partitions.

Vertices are the partitions of {1..kl} into k parts of size l, with an edge when
two partitions share no part. Colouring a partition by the part that contains a
fixed point x uses C(kl-1, l-1) colours and is proper, since equal colours mean
a shared part. A Baranyai family (every l-subset lies in exactly one member)
is a clique of the same size, so both numbers equal C(kl-1, l-1).
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Sequence

import networkx as nx

from .errors import BadShape, BudgetExceeded, FlowInfeasible, SearchFailed, VerificationFailed
from .partitions import SetPartition, format_partition

MAX_GRAPH_POINTS = 10
MAX_WITNESS_POINTS = 12
MAX_BACKTRACK_POINTS = 9


def _check_shape(k: int, l: int, limit: int) -> None:
    if k < 1 or l < 1:
        raise BadShape(f"need k, l >= 1, got ({k}, {l})")
    if k * l > limit:
        raise BudgetExceeded(f"kl = {k * l} exceeds the desk-scale limit {limit}")


def iter_partitions(k: int, l: int) -> Iterator[SetPartition]:
    """All (k, l)-partitions, each once, in canonical order (parts by minimum)."""
    n = k * l

    def rec(left: tuple[int, ...]):
        if not left:
            yield ()
            return
        head, rest = left[0], left[1:]
        for others in itertools.combinations(rest, l - 1):
            part = (head,) + others
            remaining = tuple(x for x in rest if x not in others)
            for tail in rec(remaining):
                yield (part,) + tail

    for parts in rec(tuple(range(1, n + 1))):
        yield SetPartition(parts)


def partition_count(k: int, l: int) -> int:
    """(kl)! / (l!^k k!)."""
    return math.factorial(k * l) // (math.factorial(l) ** k * math.factorial(k))


def adjacent(P: SetPartition, Q: SetPartition) -> bool:
    return P != Q and not P.shares_part(Q)


@dataclass
class PartitionGraph:
    k: int
    l: int
    vertices: list[SetPartition] = field(default_factory=list)

    @classmethod
    def build(cls, k: int, l: int) -> "PartitionGraph":
        _check_shape(k, l, MAX_GRAPH_POINTS)
        return cls(k, l, list(iter_partitions(k, l)))

    def adjacent(self, P: SetPartition, Q: SetPartition) -> bool:
        return adjacent(P, Q)

    def to_networkx(self) -> nx.Graph:
        G = nx.Graph()
        G.add_nodes_from(range(len(self.vertices)))
        sets = [P.part_set() for P in self.vertices]
        for i, j in itertools.combinations(range(len(sets)), 2):
            if sets[i].isdisjoint(sets[j]):
                G.add_edge(i, j)
        return G


@dataclass(frozen=True)
class Coloring:
    """Colour of P is the set (part of P containing x) minus x, numbered in lex order."""

    k: int
    l: int
    x: int
    classes: tuple[tuple[int, ...], ...]

    @property
    def color_count(self) -> int:
        return len(self.classes)

    def color_set(self, P: SetPartition) -> tuple[int, ...]:
        return tuple(y for y in P.part_of(self.x) if y != self.x)

    def color(self, P: SetPartition) -> int:
        return self._index[self.color_set(P)]

    @cached_property
    def _index(self) -> dict[tuple[int, ...], int]:
        return {c: i for i, c in enumerate(self.classes)}


def build_coloring(k: int, l: int, x: int = 1) -> Coloring:
    n = k * l
    if not 1 <= x <= n:
        raise BadShape(f"distinguished point {x} not in 1..{n}")
    others = [y for y in range(1, n + 1) if y != x]
    return Coloring(k, l, x, tuple(itertools.combinations(others, l - 1)))


# ---------------------------------------------------------------------------
# Baranyai families

def baranyai_clique(k: int, l: int) -> list[SetPartition]:
    """C(kl-1, l-1) partitions using every l-subset of {1..kl} exactly once.

    Grows the ground set one point at a time. At stage i each class is a
    multiset of k disjoint subsets of {1..i} covering it, and a subset S occurs
    over all classes exactly C(kl-i, l-|S|) times. Adding point i+1 to one part
    per class is an integral flow problem: class -> S with capacity the
    multiplicity of S in the class, S -> sink with capacity C(kl-i-1, l-|S|-1).
    A fractional solution always exists, so an integral maximum flow of value
    C(kl-1, l-1) does too.
    """
    _check_shape(k, l, MAX_WITNESS_POINTS)
    n = k * l
    m = math.comb(n - 1, l - 1)
    classes: list[list[frozenset]] = [[frozenset()] * k for _ in range(m)]
    for i in range(n):
        new = i + 1
        G = nx.DiGraph()
        demand: dict[frozenset, int] = {}
        for c, parts in enumerate(classes):
            G.add_edge("s", ("c", c), capacity=1)
            counts: dict[frozenset, int] = {}
            for S in parts:
                counts[S] = counts.get(S, 0) + 1
            for S in sorted(counts, key=lambda s: (len(s), sorted(s))):
                need = math.comb(n - i - 1, l - len(S) - 1) if len(S) < l else 0
                if need:
                    demand[S] = need
                    G.add_edge(("c", c), ("S", S), capacity=counts[S])
        for S, need in demand.items():
            G.add_edge(("S", S), "t", capacity=need)
        value, flow = nx.maximum_flow(G, "s", "t")
        if value != m:
            raise FlowInfeasible(f"stage {new}: flow {value} < {m}")
        for c, parts in enumerate(classes):
            chosen = next(node[1] for node, f in flow[("c", c)].items() if f > 0)
            pos = parts.index(chosen)
            classes[c] = parts[:pos] + [chosen | {new}] + parts[pos + 1:]
    return [SetPartition(tuple(tuple(sorted(S)) for S in parts)).canonical() for parts in classes]


def baranyai_backtrack(k: int, l: int) -> list[SetPartition]:
    """Exact-cover search for a Baranyai family; one class per colour of the point 1."""
    _check_shape(k, l, MAX_BACKTRACK_POINTS)
    n = k * l
    heads = list(itertools.combinations(range(2, n + 1), l - 1))
    used: set[tuple[int, ...]] = set()
    family: list[SetPartition] = []

    def fill(parts: list[tuple[int, ...]], free: tuple[int, ...], c: int) -> bool:
        if not free:
            family.append(SetPartition(tuple(parts)))
            if build(c + 1):
                return True
            family.pop()
            return False
        head, rest = free[0], free[1:]
        for others in itertools.combinations(rest, l - 1):
            part = (head,) + others
            if part in used:
                continue
            used.add(part)
            parts.append(part)
            if fill(parts, tuple(y for y in rest if y not in others), c):
                return True
            parts.pop()
            used.discard(part)
        return False

    def build(c: int) -> bool:
        if c == len(heads):
            return True
        first = (1,) + heads[c]
        used.add(first)
        ok = fill([first], tuple(y for y in range(2, n + 1) if y not in heads[c]), c)
        if not ok:
            used.discard(first)
        return ok

    if not build(0):
        raise SearchFailed(f"no Baranyai family found for ({k}, {l})")
    return family


def covers_each_subset_once(family: Sequence[SetPartition], k: int, l: int) -> bool:
    seen: dict[tuple[int, ...], int] = {}
    for P in family:
        for part in P.parts:
            seen[part] = seen.get(part, 0) + 1
    total = math.comb(k * l, l)
    return len(seen) == total and all(v == 1 for v in seen.values())


# ---------------------------------------------------------------------------
# the certified witness

@dataclass
class SyncWitness:
    k: int
    l: int
    x: int
    clique: list[SetPartition]
    coloring: dict[SetPartition, int]
    color_count: int
    degenerate: bool
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def clique_number(self) -> int:
        return len(self.clique)

    def to_json(self) -> dict:
        return {"k": self.k, "l": self.l, "x": self.x, "clique_size": len(self.clique),
                "color_count": self.color_count, "degenerate": self.degenerate,
                "checks": dict(self.checks)}


def _same_color_pairs(col: Coloring, rng: random.Random, samples: int) -> Iterator[tuple[SetPartition, SetPartition]]:
    """Random pairs of partitions that both contain the part {x} + A for random A."""
    n = col.k * col.l
    for _ in range(samples):
        A = rng.choice(col.classes)
        part = tuple(sorted((col.x,) + A))
        rest = [y for y in range(1, n + 1) if y not in part]
        pair = []
        for _ in range(2):
            rng.shuffle(rest)
            pair.append(SetPartition((part,) + tuple(tuple(rest[i:i + col.l]) for i in range(0, len(rest), col.l))))
        yield tuple(pair)


def verify_witness(k: int, l: int, x: int = 1, method: str = "flow",
                   samples: int = 2000, seed: int = 0) -> SyncWitness:
    """Build a Baranyai clique and the point-x colouring and certify both.

    Raises VerificationFailed if any check fails.
    """
    _check_shape(k, l, MAX_WITNESS_POINTS)
    col = build_coloring(k, l, x)
    clique = baranyai_clique(k, l) if method == "flow" else baranyai_backtrack(k, l)
    m = math.comb(k * l - 1, l - 1)
    checks = {
        "clique_size": len(clique) == m,
        "color_count": col.color_count == m,
        "each_subset_once": covers_each_subset_once(clique, k, l),
        "pairwise_adjacent": all(adjacent(P, Q) for P, Q in itertools.combinations(clique, 2)),
        "clique_colors_distinct": len({col.color(P) for P in clique}) == len(clique),
    }
    if k * l <= MAX_GRAPH_POINTS:
        by_color: dict[int, list[SetPartition]] = {}
        count = 0
        for P in iter_partitions(k, l):
            by_color.setdefault(col.color(P), []).append(P)
            count += 1
        checks["vertex_count"] = count == partition_count(k, l)
        checks["proper"] = all(not adjacent(P, Q) for group in by_color.values()
                               for P, Q in itertools.combinations(group, 2))
    else:
        rng = random.Random(seed)
        checks["proper"] = all(P == Q or not adjacent(P, Q) for P, Q in _same_color_pairs(col, rng, samples))
    failed = [name for name, ok in checks.items() if not ok]
    if failed:
        raise VerificationFailed(f"witness for ({k}, {l}) failed: {', '.join(failed)}")
    return SyncWitness(k, l, x, clique, {P: col.color(P) for P in clique}, col.color_count,
                       degenerate=(k == 2), checks=checks)


def format_witness(w: SyncWitness) -> str:
    """Header ``k l x``, then each clique partition as a block, then ``id color`` lines."""
    out = [f"{w.k} {w.l} {w.x}", ""]
    for P in w.clique:
        out.append(format_partition(P))
    out.append("coloring")
    out.extend(f"{i} {w.coloring[P]}" for i, P in enumerate(w.clique))
    return "\n".join(out) + "\n"


def parse_witness(text: str) -> tuple[tuple[int, int, int], list[SetPartition], dict[int, int]]:
    lines = text.splitlines()
    k, l, x = (int(t) for t in lines[0].split())
    body = lines[1:]
    cut = body.index("coloring")
    nums = [ln for ln in body[:cut] if ln.strip()]
    clique = [SetPartition.of([int(t) for t in ln.split()] for ln in nums[i:i + k])
              for i in range(0, len(nums), k)]
    colors = {}
    for ln in body[cut + 1:]:
        if ln.strip():
            i, c = ln.split()
            colors[int(i)] = int(c)
    return (k, l, x), clique, colors
