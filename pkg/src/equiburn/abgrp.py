"""Finite abelian groups in invariant-factor coordinates.

A group is a tuple of orders d_1 | d_2 | ... | d_r (each >= 2); elements and
characters are reduced integer vectors of that shape.  The dual group is
represented in the same coordinates, with the pairing

    <chi, a> = sum_i chi_i * a_i * (exponent / d_i)   (mod exponent)

as the single source of truth.  Subgroups are canonicalized as the row
Hermite form of their preimage lattice in Z^r, so subgroup equality is a
plain comparison.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce
from math import gcd, lcm, prod

from . import zlat


@dataclass(frozen=True)
class FinAbGroup:
    orders: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "orders", tuple(int(d) for d in self.orders))
        for d in self.orders:
            if d < 2:
                raise ValueError(f"invariant factor {d} < 2")
        for a, b in zip(self.orders, self.orders[1:]):
            if b % a != 0:
                raise ValueError(f"orders {self.orders} violate the divisibility chain")

    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def exponent(self) -> int:
        return self.orders[-1] if self.orders else 1

    @property
    def order(self) -> int:
        return prod(self.orders)

    def element(self, coords) -> "AbElement":
        return AbElement(self, tuple(coords))

    def character(self, coords) -> "Character":
        return Character(self, tuple(coords))

    def zero(self) -> "AbElement":
        return self.element((0,) * self.rank)

    def zero_character(self) -> "Character":
        return self.character((0,) * self.rank)

    def elements(self):
        for coords in itertools.product(*(range(d) for d in self.orders)):
            yield self.element(coords)

    def characters(self):
        for coords in itertools.product(*(range(d) for d in self.orders)):
            yield self.character(coords)

    def full_subgroup(self) -> "AbSubgroup":
        return AbSubgroup.from_lattice(self, [])

    def __str__(self):
        return " x ".join(f"Z/{d}" for d in self.orders) if self.orders else "1"


class _Vector:
    """Shared arithmetic for reduced coordinate vectors."""

    __slots__ = ()

    def _reduce(self):
        g = self.group
        if len(self.coords) != g.rank:
            raise ValueError("coordinate length does not match the group rank")
        object.__setattr__(
            self, "coords", tuple(c % d for c, d in zip(self.coords, g.orders))
        )

    def _same(self, other):
        if self.group != other.group:
            raise ValueError("mixed parent groups")

    def __add__(self, other):
        self._same(other)
        return type(self)(
            self.group, tuple(a + b for a, b in zip(self.coords, other.coords))
        )

    def __sub__(self, other):
        self._same(other)
        return type(self)(
            self.group, tuple(a - b for a, b in zip(self.coords, other.coords))
        )

    def __neg__(self):
        return type(self)(self.group, tuple(-a for a in self.coords))

    def __mul__(self, k: int):
        return type(self)(self.group, tuple(k * a for a in self.coords))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)


@dataclass(frozen=True)
class AbElement(_Vector):
    group: FinAbGroup
    coords: tuple[int, ...]

    def __post_init__(self):
        self._reduce()

    def order(self) -> int:
        return reduce(
            lcm,
            (d // gcd(c, d) for c, d in zip(self.coords, self.group.orders)),
            1,
        )


@dataclass(frozen=True)
class Character(_Vector):
    group: FinAbGroup
    coords: tuple[int, ...]

    def __post_init__(self):
        self._reduce()

    def pair(self, elem: AbElement) -> int:
        """Pairing value in Z/exponent."""
        if elem.group != self.group:
            raise ValueError("character and element live on different groups")
        e = self.group.exponent
        return (
            sum(
                x * a * (e // d)
                for x, a, d in zip(self.coords, elem.coords, self.group.orders)
            )
            % e
        )

    def order(self) -> int:
        return char_order(self)


def char_order(chi: Character) -> int:
    """Least m >= 1 with m*chi = 0; equals lcm_i(d_i / gcd(chi_i, d_i))."""
    return reduce(
        lcm,
        (d // gcd(c, d) for c, d in zip(chi.coords, chi.group.orders)),
        1,
    )


@dataclass(frozen=True)
class AbSubgroup:
    """Subgroup as the Hermite basis of its preimage lattice in Z^r."""

    parent: FinAbGroup
    basis: tuple[tuple[int, ...], ...]

    @classmethod
    def from_lattice(cls, parent: FinAbGroup, rows) -> "AbSubgroup":
        r = parent.rank
        lattice = [list(row) for row in rows]
        lattice += [
            [parent.orders[i] if j == i else 0 for j in range(r)] for i in range(r)
        ]
        if not lattice:
            return cls(parent, ())
        H, _ = zlat.hnf(lattice)
        basis = tuple(tuple(row) for row in H[:r])
        assert all(any(row) for row in basis), "preimage lattice lost full rank"
        return cls(parent, basis)

    @classmethod
    def from_elements(cls, parent: FinAbGroup, elems) -> "AbSubgroup":
        return cls.from_lattice(parent, [list(e.coords) for e in elems])

    def order(self) -> int:
        index = prod(self.basis[i][i] for i in range(self.parent.rank))
        return self.parent.order // index

    def contains(self, elem: AbElement) -> bool:
        if elem.group != self.parent:
            raise ValueError("element of a different group")
        return zlat.member([list(b) for b in self.basis], list(elem.coords)) is not None

    def elements(self):
        for e in self.parent.elements():
            if self.contains(e):
                yield e

    def is_full(self) -> bool:
        return self.order() == self.parent.order

    def structure(self):
        return structure_of_subgroup(self)


def structure(gens: list[AbElement], ambient: FinAbGroup):
    """Invariant-factor form of the subgroup generated by ``gens``.

    Returns (group, to_sub, from_sub) where to_sub maps a subgroup element of
    the ambient group to its coordinates in the new group and from_sub is its
    inverse.
    """
    for g in gens:
        if g.group != ambient:
            raise ValueError("generator outside the ambient group")
    sub = AbSubgroup.from_elements(ambient, gens)
    return structure_of_subgroup(sub)


def structure_of_subgroup(sub: AbSubgroup):
    """Invariant factors plus coordinate maps for a canonical subgroup.

    The preimage lattice L has basis B; diag(orders) = C.B inside L, so the
    subgroup is Z^r / rowspan(C), which Smith normal form diagonalizes.
    """
    A = sub.parent
    r = A.rank
    B = [list(row) for row in sub.basis]
    diag = [[A.orders[i] if j == i else 0 for j in range(r)] for i in range(r)]
    C = [zlat.member(B, row) for row in diag]
    assert all(row is not None for row in C)
    s = zlat.snf(C)
    V = [list(row) for row in s.V]
    Vinv = zlat.inverse_unimodular(V)
    kept = [i for i, d in enumerate(s.diag) if d >= 2]
    S = FinAbGroup(tuple(s.diag[i] for i in kept))

    def to_sub(elem: AbElement) -> AbElement:
        x = zlat.member(B, list(elem.coords))
        if x is None:
            raise ValueError("element is not in the subgroup")
        z = zlat.vecmat(x, V)
        return S.element(tuple(z[i] for i in kept))

    def from_sub(selem: AbElement) -> AbElement:
        if selem.group != S:
            raise ValueError("element of a different subgroup presentation")
        z = [0] * r
        for pos, i in enumerate(kept):
            z[i] = selem.coords[pos]
        x = zlat.vecmat(z, Vinv)
        return A.element(tuple(zlat.vecmat(x, B)))

    return S, to_sub, from_sub


def kernel(chi: Character) -> AbSubgroup:
    """{a in A : <chi, a> = 0}, canonical; its index equals char_order(chi)."""
    A = chi.group
    e = A.exponent
    r = A.rank
    if r == 0:
        return A.full_subgroup()
    # Lifts a with sum_i c_i a_i = 0 (mod e): project the integer kernel of
    # the column (c_1, ..., c_r, e) onto the first r coordinates.
    col = [[chi.coords[i] * (e // A.orders[i])] for i in range(r)] + [[e]]
    rows = [x[:r] for x in zlat.kernel_basis(col)]
    return AbSubgroup.from_lattice(A, rows)


def character_from_generator_values(
    target: FinAbGroup, values: list[int], source_exponent: int
) -> Character:
    """Character of ``target`` from its values on the unit generators.

    ``values[j]`` is the pairing value on the j-th generator, expressed in
    Z/source_exponent; it must be representable as a target-exponent root of
    unity, which holds for restrictions and conjugation transports.
    """
    et = target.exponent
    coords = []
    for j, v in enumerate(values):
        assert (v * et) % source_exponent == 0, "value is not an exponent-th root"
        w = (v * et // source_exponent) % et
        step = et // target.orders[j]
        assert w % step == 0, "value incompatible with the generator order"
        coords.append((w // step) % target.orders[j])
    return target.character(tuple(coords))


def restrict(chi: Character, sub: AbSubgroup) -> Character:
    """Restriction of chi to the invariant-factor form of ``sub``."""
    if chi.group != sub.parent:
        raise ValueError("character and subgroup live on different groups")
    S, _, from_sub = structure_of_subgroup(sub)
    values = []
    for j in range(S.rank):
        unit = S.element(tuple(1 if i == j else 0 for i in range(S.rank)))
        values.append(chi.pair(from_sub(unit)))
    return character_from_generator_values(S, values, chi.group.exponent)


@dataclass(frozen=True)
class WedgeClass:
    """Top-wedge value of a character tuple, normalized up to global sign.

    Components are indexed by n-element subsets of the coordinate slots; the
    subset {i_1 < ... < i_n} carries the corresponding minor reduced modulo
    d_{i_1}, the smallest chosen order.  The stored representative is the
    lexicographically smaller of {v, -v} over the sorted subset order.
    """

    group: FinAbGroup
    n: int
    subsets: tuple[tuple[int, ...], ...]
    values: tuple[int, ...]
    sign_normalized: bool = True

    @property
    def moduli(self) -> tuple[int, ...]:
        return tuple(self.group.orders[s[0]] if s else 0 for s in self.subsets)

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values)

    def __str__(self):
        if self.is_zero():
            return "0"
        neg = tuple((-v) % m for v, m in zip(self.values, self.moduli))
        if len(self.values) == 1:
            v, w = self.values[0], neg[0]
            return "{%d,%d}" % (v, w) if v != w else "{%d}" % v
        return "{%s,%s}" % (
            "(" + ",".join(map(str, self.values)) + ")",
            "(" + ",".join(map(str, neg)) + ")",
        )


def finabgroup_to_json(A: FinAbGroup) -> dict:
    return {"type": "abelian", "orders": list(A.orders)}


def finabgroup_from_json(d: dict) -> FinAbGroup:
    if d.get("type") != "abelian":
        raise ValueError("expected an abelian group literal")
    return FinAbGroup(tuple(d["orders"]))


def wedge_det(beta: list[Character]) -> WedgeClass:
    """Sign-normalized top-wedge of n characters.

    Each n-subset of coordinate slots contributes the n x n minor of the
    coefficient matrix modulo the smallest chosen order; the class is zero
    when n exceeds the rank.
    """
    if not beta:
        raise ValueError("empty character tuple")
    A = beta[0].group
    for b in beta:
        if b.group != A:
            raise ValueError("characters on different groups")
    n = len(beta)
    r = A.rank
    subsets = tuple(itertools.combinations(range(r), n))
    rows = [list(b.coords) for b in beta]
    values = []
    for sub in subsets:
        minor = [[row[j] for j in sub] for row in rows]
        values.append(zlat.det(minor) % A.orders[sub[0]])
    moduli = [A.orders[s[0]] for s in subsets]
    neg = tuple((-v) % m for v, m in zip(values, moduli))
    rep = min(tuple(values), neg)
    return WedgeClass(group=A, n=n, subsets=subsets, values=rep)
