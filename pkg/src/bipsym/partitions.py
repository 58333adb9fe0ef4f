"""(k, l)-partitions of {1..kl} and their intersection matrices."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import BadShape, MismatchedShape
from .matrix_core import IntersectionMatrix, validate


@dataclass(frozen=True)
class SetPartition:
    """k disjoint parts of size l covering {1..kl}.

    ``parts`` keeps whatever order it was built in; :meth:`canonical` sorts the
    parts by their smallest element. Elements inside a part are always sorted.
    """

    parts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        parts = tuple(tuple(sorted(int(x) for x in p)) for p in self.parts)
        if not parts:
            raise BadShape("partition needs at least one part")
        l = len(parts[0])
        if l == 0 or any(len(p) != l for p in parts):
            raise BadShape("parts must be non-empty and of equal size")
        flat = sorted(x for p in parts for x in p)
        if flat != list(range(1, len(parts) * l + 1)):
            raise BadShape(f"parts do not partition 1..{len(parts) * l}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def of(cls, parts: Iterable[Iterable[int]]) -> "SetPartition":
        return cls(tuple(tuple(p) for p in parts))

    @property
    def k(self) -> int:
        return len(self.parts)

    @property
    def l(self) -> int:
        return len(self.parts[0])

    def canonical(self) -> "SetPartition":
        return SetPartition(tuple(sorted(self.parts, key=lambda p: p[0])))

    def is_canonical(self) -> bool:
        return list(self.parts) == sorted(self.parts, key=lambda p: p[0])

    def part_of(self, x: int) -> tuple[int, ...]:
        for p in self.parts:
            if x in p:
                return p
        raise KeyError(x)

    def part_set(self) -> frozenset[tuple[int, ...]]:
        return frozenset(self.parts)

    def shares_part(self, other: "SetPartition") -> bool:
        return not self.part_set().isdisjoint(other.part_set())

    def relabel(self, perm: Sequence[int]) -> "SetPartition":
        """Image under the point map x -> perm[x - 1] (1-based values)."""
        return SetPartition(tuple(tuple(perm[x - 1] for x in p) for p in self.parts)).canonical()


def intersection_matrix(P: SetPartition, Q: SetPartition) -> IntersectionMatrix:
    """M(P, Q) with (i, j) entry |P_i & Q_j|, using the parts in their stored order."""
    if P.k != Q.k or P.l != Q.l:
        raise MismatchedShape(f"({P.k},{P.l}) vs ({Q.k},{Q.l})")
    qsets = [set(q) for q in Q.parts]
    return validate([[len(qs.intersection(p)) for qs in qsets] for p in P.parts])


def canonical_partition(N: IntersectionMatrix, P: SetPartition, reorder: bool = False) -> SetPartition:
    """Q(N, P): part j collects, from each P_i, the smallest n_ij elements not yet used.

    In construction order M(P, Q) == N. With ``reorder=True`` the parts are
    then sorted by minimum element, which permutes the columns of M(P, Q).
    """
    if N.k != P.k or N.l != P.l:
        raise MismatchedShape(f"matrix is ({N.k},{N.l}) but partition is ({P.k},{P.l})")
    remaining = [list(p) for p in P.parts]
    parts = []
    for j in range(N.k):
        part = []
        for i in range(N.k):
            take = N.entries[i][j]
            part.extend(remaining[i][:take])
            del remaining[i][:take]
        parts.append(part)
    Q = SetPartition.of(parts)
    return Q.canonical() if reorder else Q


def standard_partition(k: int, l: int) -> SetPartition:
    """{1..l}, {l+1..2l}, ..."""
    return SetPartition.of(range(i * l + 1, (i + 1) * l + 1) for i in range(k))


def format_partition(P: SetPartition) -> str:
    return "\n".join(" ".join(str(x) for x in p) for p in P.parts) + "\n"


def parse_partition(text: str) -> SetPartition:
    """k lines of l integers; returned in canonical order."""
    rows = [[int(x) for x in ln.split()] for ln in text.strip().splitlines() if ln.strip()]
    return SetPartition.of(rows).canonical()
