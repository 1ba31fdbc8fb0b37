"""Finite groups by permutation generators.

Groups are fully materialized element lists (closure up to a configurable
cap), which keeps all the subgroup machinery needed for symbols -- abelian
subgroups up to conjugacy, centralizers, normalizers, coset quotients --
simple and certifiably correct at the scales this library targets.

Permutations are 0-based one-line tuples; products apply the right factor
first, p*q : i -> p[q[i]].  The canonical order everywhere is lexicographic
on one-line tuples, and a subgroup's canonical encoding is its sorted
element tuple.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import reduce

from . import zlat
from .abgrp import AbElement, FinAbGroup

DEFAULT_ORDER_CAP = 20000

Perm = tuple[int, ...]


class CapExceeded(RuntimeError):
    pass


class NotNormal(ValueError):
    pass


def pmul(p: Perm, q: Perm) -> Perm:
    return tuple(p[q[i]] for i in range(len(p)))


def pinv(p: Perm) -> Perm:
    inv = [0] * len(p)
    for i, v in enumerate(p):
        inv[v] = i
    return tuple(inv)


def pconj(p: Perm, g: Perm) -> Perm:
    """g p g^-1."""
    return pmul(pmul(g, p), pinv(g))


def perm_cycles(p: Perm) -> str:
    seen = [False] * len(p)
    parts = []
    for i in range(len(p)):
        if seen[i] or p[i] == i:
            seen[i] = True
            continue
        cyc = [i]
        seen[i] = True
        j = p[i]
        while j != i:
            cyc.append(j)
            seen[j] = True
            j = p[j]
        parts.append("(" + " ".join(str(k) for k in cyc) + ")")
    return "".join(parts) if parts else "()"


class PermGroup:
    def __init__(self, degree: int, gens, elements):
        self.degree = degree
        self.gens = tuple(tuple(g) for g in gens)
        self.elements = tuple(sorted(tuple(e) for e in elements))
        self.identity = tuple(range(degree))
        self._index = {e: i for i, e in enumerate(self.elements)}
        self._key = (degree, self.elements)

    @classmethod
    def generate(cls, degree: int, gens, cap: int = DEFAULT_ORDER_CAP) -> "PermGroup":
        ident = tuple(range(degree))
        gens = [tuple(g) for g in gens]
        for g in gens:
            if sorted(g) != list(range(degree)):
                raise ValueError(f"not a permutation of degree {degree}: {g}")
        elems = {ident}
        frontier = [ident]
        while frontier:
            cur = frontier.pop()
            for g in gens:
                nxt = pmul(cur, g)
                if nxt not in elems:
                    if len(elems) >= cap:
                        raise CapExceeded(f"group order exceeds cap {cap}")
                    elems.add(nxt)
                    frontier.append(nxt)
        return cls(degree, gens, elems)

    def key(self):
        return self._key

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, p: Perm) -> bool:
        return p in self._index

    def __eq__(self, other):
        return isinstance(other, PermGroup) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def is_abelian(self) -> bool:
        return all(
            pmul(a, b) == pmul(b, a)
            for a, b in itertools.combinations(self.gens or self.elements, 2)
        )

    def full_subgroup(self) -> "SubgroupG":
        return SubgroupG(self, self.elements)

    def trivial_subgroup(self) -> "SubgroupG":
        return SubgroupG(self, (self.identity,))

    def __repr__(self):
        return f"PermGroup(degree={self.degree}, order={self.order})"


@dataclass(frozen=True)
class SubgroupG:
    parent: PermGroup
    elems: tuple[Perm, ...]

    def __post_init__(self):
        object.__setattr__(self, "elems", tuple(sorted(tuple(e) for e in self.elems)))
        eset = set(self.elems)
        if self.parent.identity not in eset:
            raise ValueError("subgroup is missing the identity")
        for e in self.elems:
            if e not in self.parent:
                raise ValueError("element outside the parent group")
            if pinv(e) not in eset:
                raise ValueError("subgroup not closed under inverse")
        # Closure check; quadratic but the groups here are small.
        for a in self.elems:
            for b in self.elems:
                if pmul(a, b) not in eset:
                    raise ValueError("subgroup not closed under product")

    @property
    def order(self) -> int:
        return len(self.elems)

    def key(self):
        return self.elems

    def __contains__(self, p: Perm) -> bool:
        return tuple(p) in set(self.elems)

    def is_abelian(self) -> bool:
        return all(
            pmul(a, b) == pmul(b, a) for a, b in itertools.combinations(self.elems, 2)
        )

    def conjugate(self, g: Perm) -> "SubgroupG":
        return SubgroupG(self.parent, tuple(pconj(e, g) for e in self.elems))

    def __le__(self, other: "SubgroupG") -> bool:
        return set(self.elems) <= set(other.elems)

    def __str__(self):
        return "{" + ", ".join(perm_cycles(e) for e in self.elems) + "}"


def subgroup_closure(G: PermGroup, gens) -> SubgroupG:
    elems = {G.identity}
    frontier = [G.identity]
    gens = [tuple(g) for g in gens]
    while frontier:
        cur = frontier.pop()
        for g in gens:
            nxt = pmul(cur, g)
            if nxt not in elems:
                elems.add(nxt)
                frontier.append(nxt)
    return SubgroupG(G, tuple(elems))


def all_abelian_subgroups(G: PermGroup) -> list[SubgroupG]:
    """Every abelian subgroup of G (not fused under conjugacy), sorted."""
    trivial = (G.identity,)
    found = {trivial}
    frontier = [trivial]
    while frontier:
        elems = frontier.pop()
        eset = set(elems)
        for g in G.elements:
            if g in eset:
                continue
            if all(pmul(g, h) == pmul(h, g) for h in elems):
                grown = subgroup_closure(G, list(elems) + [g]).elems
                if grown not in found:
                    found.add(grown)
                    frontier.append(grown)
    return [SubgroupG(G, e) for e in sorted(found, key=lambda e: (len(e), e))]


def abelian_subgroups(G: PermGroup) -> list[SubgroupG]:
    """All abelian subgroups of G, one canonical representative per
    conjugacy class, sorted by (order, element encoding)."""
    reps = set()
    for sub in all_abelian_subgroups(G):
        orbit = {tuple(sorted(pconj(e, g) for e in sub.elems)) for g in G.elements}
        reps.add(min(orbit))
    return [SubgroupG(G, e) for e in sorted(reps, key=lambda e: (len(e), e))]


def centralizer(G: PermGroup, H: SubgroupG) -> SubgroupG:
    elems = tuple(
        g for g in G.elements if all(pmul(g, h) == pmul(h, g) for h in H.elems)
    )
    return SubgroupG(G, elems)


def normalizer(G: PermGroup, H: SubgroupG) -> SubgroupG:
    hset = set(H.elems)
    elems = tuple(
        g for g in G.elements if all(pconj(h, g) in hset for h in H.elems)
    )
    return SubgroupG(G, elems)


def is_central_in(H: SubgroupG, D: SubgroupG) -> bool:
    return all(
        pmul(h, d) == pmul(d, h) for h in H.elems for d in D.elems
    )


class QuotientGroup:
    """Coset group of a normal subgroup, materialized as a table.

    Cosets are canonicalized by their minimal element; the table acts on
    coset indices in the sorted-representative order.
    """

    def __init__(self, base: SubgroupG, normal: SubgroupG):
        if not normal <= base:
            raise NotNormal("subgroup is not contained in the base")
        nset = set(normal.elems)
        for y in base.elems:
            for h in normal.elems:
                if pconj(h, y) not in nset:
                    raise NotNormal("subgroup is not normal in the base")
        self.base = base
        self.normal = normal
        rep_of = {}
        for y in base.elems:
            coset = tuple(sorted(pmul(y, h) for h in normal.elems))
            rep_of[coset] = coset[0]
        self.reps = tuple(sorted(rep_of.values()))
        self._rep_index = {r: i for i, r in enumerate(self.reps)}
        self._coset_of = {}
        for y in base.elems:
            coset = tuple(sorted(pmul(y, h) for h in normal.elems))
            self._coset_of[y] = self._rep_index[coset[0]]
        self.table = tuple(
            tuple(self._coset_of[pmul(a, b)] for b in self.reps) for a in self.reps
        )

    @property
    def order(self) -> int:
        return len(self.reps)

    def coset_index(self, y: Perm) -> int:
        return self._coset_of[tuple(y)]

    def identity_index(self) -> int:
        return self._coset_of[self.base.parent.identity]

    def subgroups(self) -> list[tuple[int, ...]]:
        """All subgroups of the quotient, as sorted index tuples."""
        n = self.order
        ident = self.identity_index()
        inv = [0] * n
        for i in range(n):
            for j in range(n):
                if self.table[i][j] == ident:
                    inv[i] = j
        found = {(ident,)}
        frontier = [(ident,)]
        while frontier:
            sub = frontier.pop()
            sset = set(sub)
            for g in range(n):
                if g in sset:
                    continue
                closure = set(sub)
                queue = [g]
                while queue:
                    x = queue.pop()
                    if x in closure:
                        continue
                    closure.add(x)
                    queue.append(inv[x])
                    for y in list(closure):
                        queue.append(self.table[x][y])
                        queue.append(self.table[y][x])
                grown = tuple(sorted(closure))
                if grown not in found:
                    found.add(grown)
                    frontier.append(grown)
        return sorted(found, key=lambda s: (len(s), s))

    def subgroup_preimage(self, indices) -> SubgroupG:
        """Union of the chosen cosets, as a subgroup of the parent."""
        chosen = set(indices)
        elems = tuple(
            y for y in self.base.elems if self._coset_of[y] in chosen
        )
        return SubgroupG(self.base.parent, elems)


def quotient(Y0: SubgroupG, H: SubgroupG) -> QuotientGroup:
    return QuotientGroup(Y0, H)


@dataclass(frozen=True)
class AbIso:
    """Invariant-factor coordinates for an abelian permutation subgroup."""

    group: FinAbGroup
    to_coords: dict[Perm, tuple[int, ...]]
    from_coords: dict[tuple[int, ...], Perm]
    generators: tuple[Perm, ...] = field(default=())

    def coords(self, p: Perm) -> AbElement:
        return self.group.element(self.to_coords[tuple(p)])

    def perm(self, e: AbElement) -> Perm:
        return self.from_coords[e.coords]


_ABISO_CACHE: dict[tuple, AbIso] = {}


def abelian_invariants(S: SubgroupG) -> AbIso:
    """Invariant factors of an abelian subgroup plus explicit coordinates.

    Uses every element as a generator and the multiplication table as the
    relation lattice; Smith normal form then produces canonical coordinates.
    """
    cache_key = (S.parent.key(), S.elems)
    hit = _ABISO_CACHE.get(cache_key)
    if hit is not None:
        return hit
    if not S.is_abelian():
        raise ValueError("subgroup is not abelian")
    elems = list(S.elems)
    m = len(elems)
    index = {e: i for i, e in enumerate(elems)}
    rows = []
    for i in range(m):
        for j in range(i, m):
            k = index[pmul(elems[i], elems[j])]
            row = [0] * m
            row[i] += 1
            row[j] += 1
            row[k] -= 1
            rows.append(row)
    s = zlat.snf(rows)
    V = [list(r) for r in s.V]
    kept = [i for i, d in enumerate(s.diag[:m]) if d >= 2]
    A = FinAbGroup(tuple(s.diag[i] for i in kept))
    to_coords = {}
    for i, e in enumerate(elems):
        z = V[i]
        to_coords[e] = tuple(z[k] % s.diag[k] for k in kept)
    from_coords = {c: e for e, c in to_coords.items()}
    assert len(from_coords) == m, "coordinates failed to separate elements"
    gens = tuple(
        from_coords[tuple(1 if i == j else 0 for i in range(len(kept)))]
        for j in range(len(kept))
    )
    iso = AbIso(group=A, to_coords=to_coords, from_coords=from_coords, generators=gens)
    _ABISO_CACHE[cache_key] = iso
    return iso


def permgroup_to_json(G: PermGroup) -> dict:
    return {
        "type": "perm",
        "degree": G.degree,
        "gens": [list(g) for g in G.gens],
    }


def permgroup_from_json(d: dict, cap: int = DEFAULT_ORDER_CAP) -> PermGroup:
    if d.get("type") != "perm":
        raise ValueError("expected a permutation group literal")
    return PermGroup.generate(d["degree"], [tuple(g) for g in d["gens"]], cap=cap)


def regular_representation(A: FinAbGroup, cap: int = DEFAULT_ORDER_CAP):
    """Regular permutation representation of a finite abelian group.

    Returns (G, points, perm_of) where points[i] are the element coordinates
    represented by index i and perm_of maps coordinates to the translation
    permutation.
    """
    if A.order > cap:
        raise CapExceeded(f"group order {A.order} exceeds cap {cap}")
    points = sorted(e.coords for e in A.elements())
    index = {c: i for i, c in enumerate(points)}

    def perm_of(coords) -> Perm:
        a = A.element(coords)
        return tuple(index[(A.element(c) + a).coords] for c in points)

    gens = [
        perm_of(tuple(1 if i == j else 0 for i in range(A.rank)))
        for j in range(A.rank)
    ]
    G = PermGroup.generate(len(points), gens, cap=cap)
    assert G.order == A.order
    return G, points, perm_of
