"""Intersection matrices (uniform-margin contingency tables) and the special
families built from them: cyclic shifts, truncated staircases, elementary
and all-one matrices, and the inner-block parameterization.

Entries are stored as tuples of tuples of Python ints, so every value is
immutable and hashable. Indices passed to :func:`elementary` are 1-based to
match the external formats; everything else is 0-based.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import (
    BadShape,
    IndexOutOfRange,
    NegativeEntry,
    NonUniformMargins,
    NotExtendable,
    NotStaircase,
)

Grid = tuple[tuple[int, ...], ...]


def _as_grid(entries: Iterable[Iterable[int]]) -> Grid:
    grid = tuple(tuple(int(x) for x in row) for row in entries)
    if not grid or not grid[0]:
        raise BadShape("matrix must have at least one row and one column")
    width = len(grid[0])
    if any(len(row) != width for row in grid):
        raise BadShape("ragged rows")
    return grid


@dataclass(frozen=True)
class RectMatrix:
    """An a x b grid of non-negative integers."""

    entries: Grid

    def __post_init__(self):
        grid = _as_grid(self.entries)
        for row in grid:
            for x in row:
                if x < 0:
                    raise NegativeEntry(f"negative entry {x}")
        object.__setattr__(self, "entries", grid)

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def row_sums(self) -> list[int]:
        return [sum(row) for row in self.entries]

    def col_sums(self) -> list[int]:
        return [sum(col) for col in zip(*self.entries)]

    def transpose(self) -> "RectMatrix":
        return type(self)(tuple(zip(*self.entries)))

    def permuted(self, rho: Sequence[int], gamma: Sequence[int]) -> "RectMatrix":
        """Return N^(rho, gamma), the matrix with (i, j) entry n[rho[i]][gamma[j]]."""
        e = self.entries
        return type(self)(tuple(tuple(e[rho[i]][gamma[j]] for j in range(self.cols))
                                for i in range(self.rows)))

    def multiset(self) -> dict[int, int]:
        """Entry value -> multiplicity (the multiset N*)."""
        counts: dict[int, int] = {}
        for row in self.entries:
            for x in row:
                counts[x] = counts.get(x, 0) + 1
        return dict(sorted(counts.items()))

    def _combine(self, other: "RectMatrix", sign: int) -> "RectMatrix":
        if self.shape != other.shape:
            raise BadShape(f"shape mismatch {self.shape} vs {other.shape}")
        return RectMatrix(tuple(tuple(x + sign * y for x, y in zip(r, s))
                                for r, s in zip(self.entries, other.entries)))

    def __add__(self, other: "RectMatrix") -> "RectMatrix":
        return self._combine(other, 1)

    def __sub__(self, other: "RectMatrix") -> "RectMatrix":
        return self._combine(other, -1)

    def __mul__(self, c: int) -> "RectMatrix":
        return RectMatrix(tuple(tuple(c * x for x in row) for row in self.entries))

    __rmul__ = __mul__

    def to_array(self):
        import numpy as np

        return np.array(self.entries, dtype=np.int64)


class _Signed:
    """Signed integer grid used only while assembling ``theta(v) + eps*E(a,b) - ...``.

    Intermediate sums may dip below zero before the correction terms land, so
    :class:`RectMatrix` cannot hold them.
    """

    def __init__(self, grid):
        self.grid = [list(row) for row in grid]

    def add(self, i: int, j: int, delta: int) -> "_Signed":
        self.grid[i - 1][j - 1] += delta
        return self


@dataclass(frozen=True)
class IntersectionMatrix(RectMatrix):
    """A k x k matrix of non-negative integers with every row and column sum equal to l."""

    l: int = -1

    def __post_init__(self):
        super().__post_init__()
        k = len(self.entries)
        if any(len(row) != k for row in self.entries):
            raise BadShape("intersection matrix must be square")
        l = sum(self.entries[0])
        if self.l not in (-1, l):
            raise NonUniformMargins(f"declared margin {self.l} but row 1 sums to {l}")
        object.__setattr__(self, "l", l)
        for i, s in enumerate(self.row_sums()):
            if s != l:
                raise NonUniformMargins(f"row {i + 1} sums to {s}, expected {l}")
        for j, s in enumerate(self.col_sums()):
            if s != l:
                raise NonUniformMargins(f"column {j + 1} sums to {s}, expected {l}")

    @property
    def k(self) -> int:
        return len(self.entries)

    def __repr__(self):
        return f"IntersectionMatrix(k={self.k}, l={self.l}, entries={self.entries})"


def validate(entries) -> IntersectionMatrix:
    """Check square shape, non-negativity and uniform margins; infer l from row 1."""
    if isinstance(entries, RectMatrix):
        entries = entries.entries
    return IntersectionMatrix(_as_grid(entries))


def is_intersection_matrix(entries) -> bool:
    try:
        validate(entries)
    except (NonUniformMargins, NegativeEntry, BadShape):
        return False
    return True


def cyclic_shift(v: Sequence[int]) -> IntersectionMatrix:
    """theta(v): row i is v shifted i places to the right, so v[0] sits on the diagonal."""
    v = tuple(int(x) for x in v)
    k = len(v)
    if k == 0:
        raise BadShape("empty vector")
    return validate([[v[(j - i) % k] for j in range(k)] for i in range(k)])


theta = cyclic_shift


@dataclass(frozen=True)
class Staircase:
    matrix: RectMatrix
    weak: bool

    @property
    def strong(self) -> bool:
        return not self.weak


def truncated_staircase(t: int, v: Sequence[int]) -> Staircase:
    """First t rows of theta(v) for v = (x, y, z, ..., z) with x, y != z."""
    v = tuple(int(x) for x in v)
    k = len(v)
    if not 2 <= t < k:
        raise BadShape(f"need 2 <= t < k, got t={t}, k={k}")
    x, y = v[0], v[1]
    tail = v[2:]
    z = tail[0] if tail else None
    if z is None or any(c != z for c in tail) or x == z or y == z:
        raise NotStaircase(f"{v} is not of the form (x, y, z, ..., z) with x, y != z")
    rows = [[v[(j - i) % k] for j in range(k)] for i in range(t)]
    return Staircase(RectMatrix(rows), weak=(x == y))


def elementary(i: int, j: int, k: int) -> RectMatrix:
    """E(i, j): the k x k indicator of position (i, j), 1-based."""
    if not (1 <= i <= k and 1 <= j <= k):
        raise IndexOutOfRange(f"({i}, {j}) outside 1..{k}")
    return RectMatrix([[int(r == i - 1 and c == j - 1) for c in range(k)] for r in range(k)])


def all_ones(k: int) -> IntersectionMatrix:
    return validate([[1] * k for _ in range(k)])


def identity(k: int, l: int = 1) -> IntersectionMatrix:
    if l == 0:
        return validate([[0] * k for _ in range(k)])
    return validate([[l if i == j else 0 for j in range(k)] for i in range(k)])


def zero(k: int) -> IntersectionMatrix:
    return identity(k, 0)


def patched(base: RectMatrix, *terms: tuple[int, int, int]) -> IntersectionMatrix:
    """base + sum(c * E(i, j)) for (c, i, j) in terms, validated at the end."""
    acc = _Signed(base.entries)
    for c, i, j in terms:
        if not (1 <= i <= base.rows and 1 <= j <= base.cols):
            raise IndexOutOfRange(f"({i}, {j}) outside the matrix")
        acc.add(i, j, c)
    return validate(acc.grid)


def inner_block(N: RectMatrix) -> RectMatrix:
    """Restriction to the first k-1 rows and columns."""
    if N.rows < 2 or N.cols < 2:
        raise BadShape("inner block needs at least a 2 x 2 matrix")
    return RectMatrix([row[: N.cols - 1] for row in N.entries[: N.rows - 1]])


def extension_entries(A: Sequence[Sequence[int]], l: int) -> list[list[int]]:
    """The unique k x k integer completion of A to margins l. May contain negatives."""
    grid = [list(row) for row in A]
    m = len(grid)
    if any(len(row) != m for row in grid):
        raise BadShape("inner block must be square")
    last_col = [l - sum(row) for row in grid]
    last_row = [l - sum(grid[i][j] for i in range(m)) for j in range(m)]
    corner = l - sum(last_row)
    out = [row + [c] for row, c in zip(grid, last_col)]
    out.append(last_row + [corner])
    return out


def extend(A, l: int) -> IntersectionMatrix:
    """phi_l(A); raises NotExtendable when a completed entry is negative (A not in I_{k,l})."""
    if isinstance(A, RectMatrix):
        A = A.entries
    if any(x < 0 for row in A for x in row):
        raise NegativeEntry("inner block has a negative entry")
    full = extension_entries(A, l)
    bad = [(i + 1, j + 1, x) for i, row in enumerate(full) for j, x in enumerate(row) if x < 0]
    if bad:
        raise NotExtendable(f"completion has negative entries {bad}")
    return validate(full)


# ---------------------------------------------------------------------------
# text / JSON formats

def format_matrix(N: RectMatrix, l: int | None = None) -> str:
    """Text format: a header ``k l`` then k lines of space-separated entries."""
    if l is None:
        l = N.l if isinstance(N, IntersectionMatrix) else sum(N.entries[0])
    lines = [f"{N.rows} {l}"] if N.rows == N.cols else [f"{N.rows} {N.cols}"]
    lines += [" ".join(str(x) for x in row) for row in N.entries]
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> IntersectionMatrix:
    stripped = text.strip()
    if stripped.startswith("{"):
        return matrix_from_json(json.loads(stripped))
    lines = [ln.split() for ln in stripped.splitlines() if ln.strip()]
    if not lines or len(lines[0]) != 2:
        raise BadShape("first line must be 'k l'")
    k, l = int(lines[0][0]), int(lines[0][1])
    body = lines[1:]
    if len(body) != k or any(len(r) != k for r in body):
        raise BadShape(f"expected {k} rows of {k} entries")
    N = validate([[int(x) for x in r] for r in body])
    if N.l != l:
        raise NonUniformMargins(f"header says l={l} but rows sum to {N.l}")
    return N


def matrix_to_json(N: IntersectionMatrix) -> dict:
    return {"k": N.k, "l": N.l, "rows": [list(r) for r in N.entries]}


def matrix_from_json(obj: dict) -> IntersectionMatrix:
    N = validate(obj["rows"])
    if N.k != obj.get("k", N.k) or N.l != obj.get("l", N.l):
        raise NonUniformMargins("JSON k/l disagree with rows")
    return N


def read_matrix(path) -> IntersectionMatrix:
    with open(path, encoding="utf-8") as fh:
        return parse_matrix(fh.read())
