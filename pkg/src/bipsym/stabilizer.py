"""The pair stabilizer K_N <= S_a x S_b of a matrix and derived automorphism orders.

(rho, gamma) lies in K_N when n[rho(i)][gamma(j)] == n[i][j] for all i, j.
The group order is computed by individualization and colour refinement on
the weighted bipartite graph of N, counting orbits along a base
(orbit-stabilizer), so the group itself is never listed. A second, simpler
counter (:func:`order_by_row_arrangements`) enumerates row arrangements and
is kept as an independent check.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .errors import EqualInputs, NotFixedPointFree, NotInvolution
from .matrix_core import RectMatrix

DEFAULT_GENERATOR_CAP = 64


@dataclass(frozen=True)
class PermPair:
    """rho permutes rows, gamma permutes columns; both 0-based image tuples."""

    rho: tuple[int, ...]
    gamma: tuple[int, ...]

    def to_json(self) -> dict:
        return {"rho": [x + 1 for x in self.rho], "gamma": [x + 1 for x in self.gamma]}

    @classmethod
    def from_json(cls, obj: dict) -> "PermPair":
        return cls(tuple(x - 1 for x in obj["rho"]), tuple(x - 1 for x in obj["gamma"]))

    def is_identity(self) -> bool:
        return all(i == x for i, x in enumerate(self.rho)) and all(j == x for j, x in enumerate(self.gamma))

    def fixes(self, N: RectMatrix) -> bool:
        e = N.entries
        return all(e[self.rho[i]][self.gamma[j]] == e[i][j]
                   for i in range(N.rows) for j in range(N.cols))


@dataclass
class StabilizerReport:
    order_KN: int
    partwise_fixed: bool
    aut_order: int
    generators: list[PermPair] | None = None

    def to_json(self) -> dict:
        out = {
            "order_KN": self.order_KN,
            "partwise_fixed": self.partwise_fixed,
            "aut_order": str(self.aut_order),
        }
        if self.generators is not None:
            out["generators"] = [g.to_json() for g in self.generators]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "StabilizerReport":
        gens = obj.get("generators")
        return cls(
            order_KN=int(obj["order_KN"]),
            partwise_fixed=bool(obj["partwise_fixed"]),
            aut_order=int(obj["aut_order"]),
            generators=None if gens is None else [PermPair.from_json(g) for g in gens],
        )


def factorial_product(N: RectMatrix) -> int:
    """prod n_ij!, the order of the vertex-fixing part of Aut."""
    out = 1
    for row in N.entries:
        for x in row:
            if x > 1:
                out *= math.factorial(x)
    return out


# ---------------------------------------------------------------------------
# colour refinement on the bipartite graph; vertices 0..a-1 are rows and
# a..a+b-1 are columns

class _Graph:
    __slots__ = ("a", "b", "e", "cols")

    def __init__(self, N: RectMatrix):
        self.a, self.b = N.shape
        self.e = N.entries
        self.cols = tuple(zip(*N.entries))

    def keys(self, colors: Sequence[int]) -> list:
        a, b = self.a, self.b
        ccol = colors[a:]
        crow = colors[:a]
        out = []
        for i in range(a):
            out.append((colors[i], tuple(sorted(zip(ccol, self.e[i])))))
        for j in range(b):
            out.append((colors[a + j], tuple(sorted(zip(crow, self.cols[j])))))
        return out

    def refine(self, colors: Sequence[int]) -> list[int]:
        ncolors = len(set(colors))
        colors = list(colors)
        while True:
            keys = self.keys(colors)
            index = {key: n for n, key in enumerate(sorted(set(keys)))}
            colors = [index[key] for key in keys]
            if len(index) == ncolors:
                return colors
            ncolors = len(index)

    def refine_pair(self, ca: Sequence[int], cb: Sequence[int]):
        """Refine two colourings in lockstep; None as soon as their traces differ."""
        ncolors = len(set(ca))
        ca, cb = list(ca), list(cb)
        while True:
            ka, kb = self.keys(ca), self.keys(cb)
            sa, sb = sorted(ka), sorted(kb)
            if sa != sb:
                return None
            index = {key: n for n, key in enumerate(sorted(set(sa)))}
            ca = [index[key] for key in ka]
            cb = [index[key] for key in kb]
            if len(index) == ncolors:
                return ca, cb
            ncolors = len(index)

    def is_automorphism(self, g: Sequence[int]) -> bool:
        a, e = self.a, self.e
        rho = g[:a]
        gamma = [x - a for x in g[a:]]
        for i in range(a):
            ri = e[rho[i]]
            row = e[i]
            for j in range(self.b):
                if ri[gamma[j]] != row[j]:
                    return False
        return True

    def initial(self) -> list[int]:
        return [0] * self.a + [1] * self.b


def _individualize(colors: Sequence[int], v: int) -> list[int]:
    out = list(colors)
    out[v] = -1
    return out


def _cells(colors: Sequence[int]) -> dict[int, list[int]]:
    cells: dict[int, list[int]] = {}
    for v, c in enumerate(colors):
        cells.setdefault(c, []).append(v)
    return cells


def _target_cell(colors: Sequence[int]) -> list[int] | None:
    best = None
    for c, cell in sorted(_cells(colors).items()):
        if len(cell) > 1 and (best is None or len(cell) < len(best)):
            best = cell
    return best


class _FoundNontrivial(Exception):
    pass


class _Search:
    def __init__(self, graph: _Graph, early_exit: bool = False):
        self.g = graph
        self.early_exit = early_exit
        self.gens: list[tuple[int, ...]] = []

    def orbit(self, v: int) -> set[int]:
        seen = {v}
        stack = [v]
        while stack:
            x = stack.pop()
            for g in self.gens:
                y = g[x]
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen

    def order(self, colors: list[int]) -> int:
        cell = _target_cell(colors)
        if cell is None:
            return 1
        v = cell[0]
        sub = self.order(self.g.refine(_individualize(colors, v)))
        orb = self.orbit(v)
        for w in cell[1:]:
            if w in orb:
                continue
            pair = self.g.refine_pair(_individualize(colors, v), _individualize(colors, w))
            if pair is None:
                continue
            iso = self.find_iso(*pair)
            if iso is not None:
                self.gens.append(iso)
                if self.early_exit:
                    raise _FoundNontrivial
                orb = self.orbit(v)
        return len(orb) * sub

    def find_iso(self, ca: list[int], cb: list[int]) -> tuple[int, ...] | None:
        cell_a = _target_cell(ca)
        if cell_a is None:
            where = {c: v for v, c in enumerate(cb)}
            g = tuple(where[c] for c in ca)
            return g if self.g.is_automorphism(g) else None
        x = cell_a[0]
        for y in _cells(cb)[ca[x]]:
            pair = self.g.refine_pair(_individualize(ca, x), _individualize(cb, y))
            if pair is None:
                continue
            iso = self.find_iso(*pair)
            if iso is not None:
                return iso
        return None


def _to_pair(g: Sequence[int], a: int) -> PermPair:
    return PermPair(tuple(g[:a]), tuple(x - a for x in g[a:]))


def stabilizer(N: RectMatrix, generators: bool = False,
               cap: int = DEFAULT_GENERATOR_CAP) -> StabilizerReport:
    """Exact |K_N|, the partwise-fixed flag and |Aut| = |K_N| * prod n_ij!."""
    graph = _Graph(N)
    search = _Search(graph)
    order = search.order(graph.refine(graph.initial()))
    gens = None
    if generators:
        gens = [_to_pair(g, graph.a) for g in search.gens[:cap]]
    return StabilizerReport(order_KN=order, partwise_fixed=(order == 1),
                            aut_order=order * factorial_product(N), generators=gens)


def order_KN(N: RectMatrix) -> int:
    return stabilizer(N).order_KN


def aut_order(N: RectMatrix) -> int:
    return stabilizer(N).aut_order


def is_partwise_fixed(N: RectMatrix) -> bool:
    """K_N == 1, stopping at the first non-identity element found."""
    graph = _Graph(N)
    colors = graph.refine(graph.initial())
    if _target_cell(colors) is None:
        return True
    try:
        _Search(graph, early_exit=True).order(colors)
    except _FoundNontrivial:
        return False
    return True


def order_by_row_arrangements(N: RectMatrix) -> int:
    """|K_N| by backtracking over row arrangements.

    Rows are placed one position at a time, each position receiving a row whose
    entry multiset matches the original row there; a partial arrangement
    survives while its column prefixes agree, as a multiset, with those of N.
    Each complete arrangement accounts for prod(r!) row maps times prod(c!)
    column maps, r and c running over the multiplicities of repeated rows and
    repeated columns.
    """
    a, b = N.shape
    rows = N.entries
    row_mult = Counter(rows)
    col_mult = Counter(zip(*rows))
    distinct = sorted(row_mult)
    sig = [tuple(sorted(r)) for r in rows]
    target_prefixes = [sorted(zip(*rows[: i + 1])) for i in range(a)]
    remaining = dict(row_mult)
    placed: list[tuple[int, ...]] = []

    def rec(i: int) -> int:
        if i == a:
            return 1
        total = 0
        for r in distinct:
            if remaining[r] == 0 or tuple(sorted(r)) != sig[i]:
                continue
            placed.append(r)
            if sorted(zip(*placed)) == target_prefixes[i]:
                remaining[r] -= 1
                total += rec(i + 1)
                remaining[r] += 1
            placed.pop()
        return total

    arrangements = rec(0)
    factor = 1
    for m in list(row_mult.values()) + list(col_mult.values()):
        factor *= math.factorial(m)
    return arrangements * factor


def group_elements(gens: Sequence[PermPair], a: int, b: int, limit: int = 1_000_000) -> set[PermPair]:
    """Closure of a generating set; only for small groups."""
    ident = PermPair(tuple(range(a)), tuple(range(b)))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = PermPair(tuple(g.rho[i] for i in x.rho), tuple(g.gamma[j] for j in x.gamma))
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    if len(seen) > limit:
                        raise OverflowError("group too large to list")
        frontier = nxt
    return seen


# ---------------------------------------------------------------------------
# l = 2: pairs of fixed-point-free involutions

@dataclass(frozen=True)
class FppInvolution:
    """A fixed-point-free involution of {1..2k}, stored as 1-based images."""

    images: tuple[int, ...]

    def __post_init__(self):
        img = tuple(int(x) for x in self.images)
        n = len(img)
        if sorted(img) != list(range(1, n + 1)):
            raise NotInvolution("not a permutation of 1..n")
        for i, x in enumerate(img, start=1):
            if img[x - 1] != i:
                raise NotInvolution(f"{i} -> {x} -> {img[x - 1]}")
            if x == i:
                raise NotFixedPointFree(f"{i} is fixed")
        if n % 2:
            raise NotFixedPointFree("odd degree")
        object.__setattr__(self, "images", img)

    @classmethod
    def from_cycles(cls, pairs, n: int | None = None) -> "FppInvolution":
        pairs = [tuple(p) for p in pairs]
        if any(len(p) != 2 for p in pairs):
            raise NotInvolution("cycles must be transpositions")
        n = n or 2 * len(pairs)
        img = list(range(1, n + 1))
        used = set()
        for x, y in pairs:
            if x in used or y in used or x == y:
                raise NotInvolution("transpositions must be disjoint")
            used.update((x, y))
            img[x - 1], img[y - 1] = y, x
        return cls(tuple(img))

    @property
    def degree(self) -> int:
        return len(self.images)

    def pairs(self) -> list[tuple[int, int]]:
        return [(i, x) for i, x in enumerate(self.images, start=1) if i < x]


@dataclass
class CentralizerProfile:
    order: int
    components: dict[int, int] = field(default_factory=dict)  # half-length k_i -> count l_i


def involution_centralizer_order(x: FppInvolution, y: FppInvolution) -> CentralizerProfile:
    """|C_{S_2k}(<x, y>)| = prod (2 k_i)^{l_i} l_i! from the alternating cycles of x and y."""
    if x.degree != y.degree:
        raise NotInvolution("degrees differ")
    if x == y:
        raise EqualInputs("x and y must be distinct")
    n = x.degree
    seen = [False] * (n + 1)
    sizes = Counter()
    for start in range(1, n + 1):
        if seen[start]:
            continue
        length = 0
        v = start
        use_x = True
        while True:
            seen[v] = True
            v = x.images[v - 1] if use_x else y.images[v - 1]
            use_x = not use_x
            length += 1
            if v == start and use_x:
                break
        sizes[length // 2] += 1
    order = 1
    for ki, li in sizes.items():
        order *= (2 * ki) ** li * math.factorial(li)
    return CentralizerProfile(order, dict(sorted(sizes.items())))


def fpf_involutions(n: int):
    """All fixed-point-free involutions of {1..n} (n even)."""

    def rec(free):
        if not free:
            yield []
            return
        a = free[0]
        for idx in range(1, len(free)):
            b = free[idx]
            rest = free[1:idx] + free[idx + 1:]
            for tail in rec(rest):
                yield [(a, b)] + tail

    for pairs in rec(list(range(1, n + 1))):
        yield FppInvolution.from_cycles(pairs, n)
