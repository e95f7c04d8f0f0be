"""Permutations of outcome sets and the canonical XOR-d constraint family.

The winning constraints of an XOR-d game are the ``d`` involutions
``pi_i(a) = (i - a) mod d``.  This module builds that family, checks the
two structural properties that single it out (every member is its own
inverse; every ordered outcome pair is hit exactly once), and counts
competing structures by brute force for small odd ``d``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InvalidParameter, ResourceLimit, Unsupported


@dataclass(frozen=True)
class Permutation:
    """A bijection of ``{0, ..., d-1}`` stored as its image table."""

    map: tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(v) for v in self.map)
        object.__setattr__(self, "map", m)
        if sorted(m) != list(range(len(m))):
            raise InvalidParameter(f"not a bijection on range({len(m)}): {m}")

    @property
    def d(self) -> int:
        return len(self.map)

    def __call__(self, a: int) -> int:
        return self.map[a]

    def compose(self, other: "Permutation") -> "Permutation":
        """Return ``self o other`` (``other`` is applied first)."""
        if other.d != self.d:
            raise InvalidParameter("composing permutations of different degree")
        return Permutation(tuple(self.map[other.map[a]] for a in range(self.d)))

    __matmul__ = compose

    def inverse(self) -> "Permutation":
        inv = [0] * self.d
        for a, b in enumerate(self.map):
            inv[b] = a
        return Permutation(tuple(inv))

    def fixed_points(self) -> list[int]:
        return [a for a, b in enumerate(self.map) if a == b]

    def fixed_point_count(self) -> int:
        return sum(1 for a, b in enumerate(self.map) if a == b)

    def is_involution(self) -> bool:
        return all(self.map[b] == a for a, b in enumerate(self.map))

    def is_identity(self) -> bool:
        return all(a == b for a, b in enumerate(self.map))

    def cycles(self) -> list[tuple[int, ...]]:
        """Cycle decomposition, fixed points omitted."""
        seen, out = set(), []
        for start in range(self.d):
            if start in seen:
                continue
            cyc, a = [], start
            while a not in seen:
                seen.add(a)
                cyc.append(a)
                a = self.map[a]
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return out

    @classmethod
    def identity(cls, d: int) -> "Permutation":
        return cls(tuple(range(d)))

    def __str__(self):
        cyc = self.cycles()
        if not cyc:
            return "id"
        return "".join("(" + "".join(str(a) for a in c) + ")" for c in cyc)


@dataclass(frozen=True)
class PermutationSet:
    d: int
    perms: tuple[Permutation, ...]

    def __post_init__(self):
        object.__setattr__(self, "perms", tuple(self.perms))
        for p in self.perms:
            if p.d != self.d:
                raise InvalidParameter("permutation degree does not match the set")

    def __len__(self):
        return len(self.perms)

    def __getitem__(self, i) -> Permutation:
        return self.perms[i]

    def __iter__(self):
        return iter(self.perms)

    def relabel(self, relabeling: Permutation) -> "PermutationSet":
        """Apply an outcome relabeling to both sides of every pair: ``R pi R^-1``."""
        inv = relabeling.inverse()
        return PermutationSet(self.d, tuple(relabeling @ p @ inv for p in self.perms))

    def as_frozenset(self) -> frozenset:
        return frozenset(p.map for p in self.perms)


def _check_d(d) -> int:
    if int(d) != d or d < 2:
        raise InvalidParameter(f"outcome count d must be an integer >= 2, got {d!r}")
    return int(d)


def ld_perm(i: int, d: int) -> Permutation:
    """``pi_i(a) = (i - a) mod d``."""
    return Permutation(tuple((i - a) % d for a in range(d)))


def shift_perm(k: int, d: int) -> Permutation:
    """``sigma_k(a) = (a + k) mod d``, the switching permutations."""
    return Permutation(tuple((a + k) % d for a in range(d)))


def make_ld(d: int) -> PermutationSet:
    d = _check_d(d)
    return PermutationSet(d, tuple(ld_perm(i, d) for i in range(d)))


def make_shifts(d: int) -> PermutationSet:
    d = _check_d(d)
    return PermutationSet(d, tuple(shift_perm(k, d) for k in range(d)))


def ld_index(p: Permutation) -> int | None:
    """Color index ``i`` with ``p == pi_i``, or None if ``p`` is not in L_d."""
    i = p.map[0]
    return i if p == ld_perm(i, p.d) else None


@dataclass(frozen=True)
class P1P2Report:
    ok: bool
    p1: bool
    p2: bool
    violated: str | None = None
    witness: object = None

    def __bool__(self):
        return self.ok


def verify_p1p2(pset: PermutationSet | Sequence[Permutation]) -> P1P2Report:
    """Check that every member is an involution (P1) and that the members
    cover every ordered pair ``(a, b)`` exactly once (P2).

    The report names the first violated property with a witness: the
    offending permutation index for P1, the first repeated or missing pair
    for P2.
    """
    perms = list(pset)
    d = perms[0].d if perms else 0
    p1_witness = next((i for i, p in enumerate(perms) if not p.is_involution()), None)
    seen: dict[tuple[int, int], int] = {}
    p2_witness = None
    for i, p in enumerate(perms):
        for a in range(d):
            pair = (a, p(a))
            if pair in seen and p2_witness is None:
                p2_witness = ("repeated", pair)
            seen[pair] = i
    if p2_witness is None and len(seen) != d * d:
        missing = next((a, b) for a in range(d) for b in range(d) if (a, b) not in seen)
        p2_witness = ("missing", missing)
    p1 = p1_witness is None
    p2 = p2_witness is None
    if not p1:
        return P1P2Report(False, False, p2, "P1", p1_witness)
    if not p2:
        return P1P2Report(False, True, False, "P2", p2_witness)
    return P1P2Report(True, True, True)


def md_formula(d: int) -> int:
    """Closed-form count of involutions on ``d`` (odd) points with one fixed point."""
    half = (d - 1) // 2
    val = Fraction(d, math.factorial(half))
    for j in range(half):
        val *= math.comb(d - 2 * j - 1, 2)
    if val.denominator != 1:
        raise ArithmeticError(f"non-integer count {val}")
    return int(val)


def _one_fixed_point_involutions(d: int) -> list[tuple[int, ...]]:
    out = []
    for m in itertools.permutations(range(d)):
        if all(m[b] == a for a, b in enumerate(m)) and sum(1 for a in range(d) if m[a] == a) == 1:
            out.append(m)
    return out


def _all_p1p2_sets(d: int) -> list[frozenset]:
    """Every set of d involutions covering each ordered pair exactly once.

    Members are indexed by the image of 0, so the search fixes them in the
    order ``pi(0) = 0, 1, ..., d-1`` and never revisits a set.
    """
    invols = [m for m in itertools.permutations(range(d)) if all(m[b] == a for a, b in enumerate(m))]
    by_first: list[list[tuple[int, ...]]] = [[] for _ in range(d)]
    for m in invols:
        by_first[m[0]].append(m)
    found = []

    def rec(k, used, chosen):
        if k == d:
            found.append(frozenset(chosen))
            return
        for m in by_first[k]:
            if all(not used[a][m[a]] for a in range(d)):
                for a in range(d):
                    used[a][m[a]] = True
                chosen.append(m)
                rec(k + 1, used, chosen)
                chosen.pop()
                for a in range(d):
                    used[a][m[a]] = False

    rec(0, [[False] * d for _ in range(d)], [])
    return found


def count_p1p2_structures(d: int) -> tuple[int, int, bool]:
    """Return ``(formula count, brute-force count, all P1/P2 sets are relabelings of L_d)``."""
    d = _check_d(d)
    if d % 2 == 0:
        raise Unsupported("even d admits P1/P2 sets beyond relabelings of L_d")
    if d > 7:
        raise ResourceLimit("exhaustive enumeration of S_d is limited to d <= 7")
    m_formula = md_formula(d)
    m_brute = len(_one_fixed_point_involutions(d))
    ld = make_ld(d)
    relabelings = {ld.relabel(Permutation(r)).as_frozenset() for r in itertools.permutations(range(d))}
    all_sets = _all_p1p2_sets(d)
    return m_formula, m_brute, all(s in relabelings for s in all_sets)


def p1p2_sets(d: int) -> list[PermutationSet]:
    """All P1/P2 sets for small ``d`` (any parity), members ordered by ``pi(0)``."""
    d = _check_d(d)
    if d > 7:
        raise ResourceLimit("exhaustive enumeration of S_d is limited to d <= 7")
    out = []
    for s in _all_p1p2_sets(d):
        out.append(PermutationSet(d, tuple(Permutation(m) for m in sorted(s, key=lambda m: m[0]))))
    return out


def all_permutations(d: int) -> Iterable[Permutation]:
    return (Permutation(m) for m in itertools.permutations(range(d)))
