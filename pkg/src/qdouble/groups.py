"""Finite groups as multiplication tables, coset splits, and solvable chains.

All APIs work with 0-based element indices; the identity is always index 0.
Labels are cosmetic. Groups are immutable after construction and safe for
concurrent reads.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import NotCyclicQuotient, NotSolvable, TableNotAGroup

MAX_ORDER = 48


@dataclass(frozen=True)
class FiniteGroup:
    """A finite group given by its multiplication table.

    Attributes:
        order: number of elements n.
        mul: n x n table, ``mul[g, h]`` = index of g*h.
        inv: length-n table of inverses.
        labels: human-readable element names (cosmetic only).
        name: short group name for reports.
    """

    order: int
    mul: np.ndarray
    inv: np.ndarray
    labels: tuple[str, ...]
    name: str = "G"

    @property
    def identity(self) -> int:
        return 0

    def elements(self) -> range:
        return range(self.order)

    def product(self, *gs: int) -> int:
        """Left-to-right product of element indices (empty product = identity)."""
        acc = 0
        for g in gs:
            acc = int(self.mul[acc, g])
        return acc

    def power(self, g: int, k: int) -> int:
        if k < 0:
            return self.power(int(self.inv[g]), -k)
        acc = 0
        for _ in range(k):
            acc = int(self.mul[acc, g])
        return acc

    def conj(self, g: int, x: int) -> int:
        """g x g^{-1}."""
        return int(self.mul[self.mul[g, x], self.inv[g]])

    def element_order(self, g: int) -> int:
        k, acc = 1, g
        while acc != 0:
            acc = int(self.mul[acc, g])
            k += 1
        return k

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    def is_cyclic(self) -> bool:
        return any(self.element_order(g) == self.order for g in self.elements())

    def label(self, g: int) -> str:
        return self.labels[g]

    def __repr__(self) -> str:  # keep reprs short in pytest output
        return f"FiniteGroup({self.name}, order={self.order})"


def _validate_table(mul: np.ndarray) -> None:
    """Exhaustive group-law validation; raises TableNotAGroup with a witness."""
    n = mul.shape[0]
    if mul.shape != (n, n):
        raise TableNotAGroup(f"table is not square: {mul.shape}")
    if n == 0 or n > MAX_ORDER:
        raise TableNotAGroup(f"order {n} outside supported range 1..{MAX_ORDER}")
    if mul.min() < 0 or mul.max() >= n:
        raise TableNotAGroup("table entries out of range")
    if not (np.array_equal(mul[0], np.arange(n)) and np.array_equal(mul[:, 0], np.arange(n))):
        raise TableNotAGroup("identity is not index 0")
    # Latin-square property (cancellation) gives cheap early failure.
    for g in range(n):
        if len(set(mul[g])) != n:
            raise TableNotAGroup(f"row {g} is not a permutation")
        if len(set(mul[:, g])) != n:
            raise TableNotAGroup(f"column {g} is not a permutation")
    # inverses
    for g in range(n):
        if not (mul[g] == 0).any():
            raise TableNotAGroup(f"element {g} has no inverse")
    # associativity, vectorized: mul[mul[a,b],c] == mul[a,mul[b,c]]
    left = mul[mul, :]                      # (a,b,c) -> (ab)c
    right = mul[:, mul]                     # (a,b,c) -> a(bc) via fancy indexing
    bad = np.argwhere(left != right)
    if bad.size:
        a, b, c = (int(v) for v in bad[0])
        raise TableNotAGroup(f"associativity fails at triple ({a}, {b}, {c})")


def _from_table(mul: np.ndarray, labels: Sequence[str] | None, name: str) -> FiniteGroup:
    mul = np.asarray(mul, dtype=np.int64)
    _validate_table(mul)
    n = mul.shape[0]
    inv = np.empty(n, dtype=np.int64)
    for g in range(n):
        inv[g] = int(np.nonzero(mul[g] == 0)[0][0])
    if labels is None:
        labels = tuple(str(g) for g in range(n))
    mul.setflags(write=False)
    inv.setflags(write=False)
    return FiniteGroup(order=n, mul=mul, inv=inv, labels=tuple(labels), name=name)


def _perm_compose(g: Sequence[int], h: Sequence[int]) -> tuple[int, ...]:
    """Composition convention (g*h)(x) = g(h(x))."""
    return tuple(g[h[x]] for x in range(len(g)))


def _cycle_label(p: Sequence[int]) -> str:
    """1-based cycle notation, 'e' for the identity."""
    n = len(p)
    seen = [False] * n
    cycles = []
    for start in range(n):
        if seen[start] or p[start] == start:
            seen[start] = True
            continue
        cyc = [start]
        seen[start] = True
        x = p[start]
        while x != start:
            cyc.append(x)
            seen[x] = True
            x = p[x]
        cycles.append("(" + " ".join(str(v + 1) for v in cyc) + ")")
    return "".join(cycles) if cycles else "e"


def _group_from_perms(perms: list[tuple[int, ...]], labels: list[str], name: str) -> FiniteGroup:
    index = {p: i for i, p in enumerate(perms)}
    n = len(perms)
    mul = np.empty((n, n), dtype=np.int64)
    for i, g in enumerate(perms):
        for j, h in enumerate(perms):
            mul[i, j] = index[_perm_compose(g, h)]
    return _from_table(mul, labels, name)


def cyclic_group(d: int) -> FiniteGroup:
    if d < 1 or d > MAX_ORDER:
        raise TableNotAGroup(f"cyclic order {d} outside 1..{MAX_ORDER}")
    idx = np.arange(d)
    mul = (idx[:, None] + idx[None, :]) % d
    return _from_table(mul, [str(j) for j in range(d)], f"Z{d}")


def symmetric_group(n: int) -> FiniteGroup:
    """S_n for n <= 4, elements in lexicographic one-line order (identity first)."""
    if n < 1 or n > 4:
        raise TableNotAGroup("symmetric groups supported for n <= 4 only")
    perms = [tuple(p) for p in itertools.permutations(range(n))]
    labels = [_cycle_label(p) for p in perms]
    return _group_from_perms(perms, labels, f"S{n}")


def dihedral_group(n: int) -> FiniteGroup:
    """D_n of order 2n (symmetries of the n-gon): rotations first, then reflections."""
    if n < 1 or 2 * n > MAX_ORDER:
        raise TableNotAGroup(f"dihedral parameter {n} gives unsupported order")
    rots = [tuple((x + k) % n for x in range(n)) for k in range(n)]
    refls = [tuple((k - x) % n for x in range(n)) for k in range(n)]
    labels = ["e"] + [f"r{k}" if k > 1 else "r" for k in range(1, n)]
    labels += ["s"] + [f"sr{k}" if k > 1 else "sr" for k in range(1, n)]
    return _group_from_perms(rots + refls, labels, f"D{n}")


def group_from_table(table: Iterable[Iterable[int]] | np.ndarray,
                     labels: Sequence[str] | None = None,
                     name: str = "G") -> FiniteGroup:
    return _from_table(np.asarray(list(table)), labels, name)


def load_group_file(path: str | Path) -> FiniteGroup:
    """Parse the group file format: 'n' on line 1, then n rows of the table.

    Trailing '# label' comments on table rows attach element labels.
    """
    lines = Path(path).read_text().splitlines()
    body = [ln for ln in lines if ln.strip()]
    if not body:
        raise TableNotAGroup("empty group file")
    try:
        n = int(body[0].split("#")[0].strip())
    except ValueError as exc:
        raise TableNotAGroup(f"bad header line: {body[0]!r}") from exc
    if len(body) < n + 1:
        raise TableNotAGroup(f"expected {n} table rows, found {len(body) - 1}")
    rows, labels = [], []
    for ln in body[1:n + 1]:
        data, _, comment = ln.partition("#")
        rows.append([int(tok) for tok in data.split()])
        labels.append(comment.strip())
    has_labels = any(labels)
    return _from_table(
        np.asarray(rows),
        [lab if lab else str(i) for i, lab in enumerate(labels)] if has_labels else None,
        Path(path).stem,
    )


def build_group(kind: str, *, d: int | None = None, n: int | None = None,
                path: str | Path | None = None) -> FiniteGroup:
    """Build a group by kind: cyclic(d), symmetric(n), dihedral(n), from_table(path)."""
    if kind == "cyclic":
        return cyclic_group(int(d if d is not None else n))
    if kind == "symmetric":
        return symmetric_group(int(n))
    if kind == "dihedral":
        return dihedral_group(int(n))
    if kind == "from_table":
        return load_group_file(path)
    raise TableNotAGroup(f"unknown group kind {kind!r}")


def builtin_group(name: str) -> FiniteGroup:
    """Named groups used throughout tests and configs, e.g. 'Z2', 'S3', 'D4'."""
    name = name.strip()
    if name.upper().startswith("Z"):
        return cyclic_group(int(name[1:]))
    if name.upper().startswith("S"):
        return symmetric_group(int(name[1:]))
    if name.upper().startswith("D"):
        return dihedral_group(int(name[1:]))
    raise TableNotAGroup(f"unknown builtin group {name!r}")


# ---------------------------------------------------------------------------
# Subgroups, cosets, solvable chains
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NormalSubgroup:
    """A (validated) normal subgroup, stored as a sorted element-index tuple."""

    elements: tuple[int, ...]
    parent: FiniteGroup

    def __contains__(self, g: int) -> bool:
        return g in self._set

    @property
    def _set(self) -> frozenset[int]:
        return frozenset(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)


def subgroup_closure(G: FiniteGroup, gens: Iterable[int]) -> tuple[int, ...]:
    """Smallest subgroup containing the generators, as a sorted tuple."""
    elems = {0}
    frontier = list(gens)
    while frontier:
        g = frontier.pop()
        if g in elems:
            continue
        elems.add(g)
        for h in list(elems):
            for prod in (int(G.mul[g, h]), int(G.mul[h, g])):
                if prod not in elems:
                    frontier.append(prod)
        frontier.append(int(G.inv[g]))
    return tuple(sorted(elems))


def all_subgroups(G: FiniteGroup) -> list[tuple[int, ...]]:
    """All subgroups (sorted element tuples), by iterated closure of cyclic parts."""
    cyclic = {subgroup_closure(G, [g]) for g in G.elements()}
    found = set(cyclic)
    frontier = list(cyclic)
    while frontier:
        H = frontier.pop()
        for g in G.elements():
            if g in H:
                continue
            K = subgroup_closure(G, list(H) + [g])
            if K not in found:
                found.add(K)
                frontier.append(K)
    return sorted(found, key=lambda s: (len(s), s))


def is_normal(G: FiniteGroup, elems: Sequence[int]) -> bool:
    s = frozenset(elems)
    return all(G.conj(g, x) in s for g in G.elements() for x in s)


def is_subgroup_closed(G: FiniteGroup, elems: Sequence[int]) -> bool:
    s = frozenset(elems)
    if 0 not in s:
        return False
    return all(int(G.mul[a, b]) in s and int(G.inv[a]) in s for a in s for b in s)


def normal_subgroup(G: FiniteGroup, elems: Sequence[int]) -> NormalSubgroup:
    elems = tuple(sorted(int(e) for e in elems))
    if not is_subgroup_closed(G, elems):
        raise TableNotAGroup(f"{elems} is not closed under mul/inv")
    if not is_normal(G, elems):
        raise TableNotAGroup(f"{elems} is not normal")
    return NormalSubgroup(elements=elems, parent=G)


@dataclass(frozen=True)
class SubgroupView:
    """A subgroup re-indexed as its own FiniteGroup.

    ``to_parent[i]`` is the parent index of child element i; ``to_child``
    inverts it (parent index -> child index) for members.
    """

    group: FiniteGroup
    to_parent: tuple[int, ...]
    to_child: dict[int, int]


def subgroup_view(G: FiniteGroup, elems: Sequence[int], name: str | None = None) -> SubgroupView:
    elems = tuple(sorted(int(e) for e in elems))
    to_child = {p: i for i, p in enumerate(elems)}
    n = len(elems)
    mul = np.empty((n, n), dtype=np.int64)
    for i, a in enumerate(elems):
        for j, b in enumerate(elems):
            mul[i, j] = to_child[int(G.mul[a, b])]
    child = _from_table(mul, [G.labels[p] for p in elems],
                        name or f"{G.name}_sub{n}")
    return SubgroupView(group=child, to_parent=elems, to_child=to_child)


@dataclass(frozen=True)
class CosetSplit:
    """The bijection g = a^j h between G and Z_d x H.

    ``split[g] = (j, h)`` with h a parent element index in H;
    ``merge[j][h_child]`` uses child indexing of H via ``sub``.
    """

    parent: FiniteGroup
    subgroup: NormalSubgroup
    generator: int
    quotient_order: int
    sub: SubgroupView
    split_j: np.ndarray = field(repr=False)     # g -> j
    split_h: np.ndarray = field(repr=False)     # g -> h (child index in H)
    merge_table: np.ndarray = field(repr=False)  # (j, h_child) -> g

    def split(self, g: int) -> tuple[int, int]:
        """g -> (j, h) with h given as a parent element index."""
        return int(self.split_j[g]), int(self.sub.to_parent[self.split_h[g]])

    def split_child(self, g: int) -> tuple[int, int]:
        """g -> (j, h_child) with h in the subgroup's own indexing."""
        return int(self.split_j[g]), int(self.split_h[g])

    def merge(self, j: int, h_parent: int) -> int:
        return int(self.merge_table[j, self.sub.to_child[h_parent]])

    def merge_child(self, j: int, h_child: int) -> int:
        return int(self.merge_table[j, h_child])


def coset_split(G: FiniteGroup, H: NormalSubgroup, a: int) -> CosetSplit:
    """Decompose G as the disjoint union H, aH, ..., a^{d-1}H.

    Raises NotCyclicQuotient if the powers of aH do not enumerate G/H.
    """
    d = G.order // H.order
    hset = H._set
    covered: set[int] = set()
    split_j = np.full(G.order, -1, dtype=np.int64)
    split_h = np.full(G.order, -1, dtype=np.int64)
    sub = subgroup_view(G, H.elements)
    merge = np.empty((d, H.order), dtype=np.int64)
    aj = 0
    for j in range(d):
        for hc, hp in enumerate(sub.to_parent):
            g = int(G.mul[aj, hp])
            if g in covered:
                raise NotCyclicQuotient(
                    f"cosets of <{G.labels[a]}>H overlap at element {G.labels[g]}")
            covered.add(g)
            split_j[g] = j
            split_h[g] = hc
            merge[j, hc] = g
        aj = int(G.mul[aj, a])
    if len(covered) != G.order:
        raise NotCyclicQuotient("powers of aH do not exhaust G/H")
    if aj not in hset:  # aj = a^d here
        raise NotCyclicQuotient("a^d is not in H")
    return CosetSplit(parent=G, subgroup=H, generator=a, quotient_order=d,
                      sub=sub, split_j=split_j, split_h=split_h, merge_table=merge)


def _quotient_is_cyclic(G: FiniteGroup, elems: tuple[int, ...]) -> int | None:
    """Smallest-index a whose coset generates the (cyclic) quotient, else None."""
    hset = frozenset(elems)
    d = G.order // len(elems)
    for a in G.elements():
        # walk powers of aH
        seen = 1
        x = a
        while x not in hset:
            x = int(G.mul[x, a])
            seen += 1
            if seen > d:
                break
        if seen == d:
            return a
    return None


@dataclass(frozen=True)
class ChainStage:
    """One solvable-chain stage: group -> normal subgroup with cyclic quotient."""

    group: FiniteGroup
    subgroup: NormalSubgroup
    generator: int
    quotient_order: int
    split: CosetSplit

    @property
    def sub_view(self) -> SubgroupView:
        return self.split.sub


@dataclass(frozen=True)
class SolvableChain:
    stages: tuple[ChainStage, ...]

    @property
    def quotient_orders(self) -> tuple[int, ...]:
        return tuple(s.quotient_order for s in self.stages)

    @property
    def top(self) -> FiniteGroup:
        return self.stages[0].group


def solvable_chain(G: FiniteGroup) -> SolvableChain:
    """Deterministic chain of normal subgroups with cyclic quotients.

    At each step, among proper normal subgroups with cyclic quotient, the one
    with the largest quotient order wins; ties break on the smallest
    lexicographic element set. Raises NotSolvable if no step exists.
    """
    stages: list[ChainStage] = []
    current = G
    while current.order > 1:
        best: tuple[int, tuple[int, ...]] | None = None
        for elems in all_subgroups(current):
            if len(elems) == current.order:
                continue  # exclude H = G (quotient order 1 makes no progress)
            if not is_normal(current, elems):
                continue
            if _quotient_is_cyclic(current, elems) is None:
                continue
            d = current.order // len(elems)
            key = (-d, elems)
            if best is None or key < (-best[0], best[1]):
                best = (d, elems)
        if best is None:
            raise NotSolvable(f"{current.name} has no normal subgroup with cyclic quotient")
        d, elems = best
        H = normal_subgroup(current, elems)
        a = _quotient_is_cyclic(current, elems)
        split = coset_split(current, H, a)
        stages.append(ChainStage(group=current, subgroup=H, generator=a,
                                 quotient_order=d, split=split))
        current = split.sub.group
    return SolvableChain(stages=tuple(stages))
