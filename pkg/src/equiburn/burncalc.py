"""Presentations of symbol groups as finitely presented abelian groups.

Symbols are enumerated into an ordered basis, the blow-up and vanishing
relations become integer rows over that basis, and questions about classes
(equality, vanishing) reduce to exact lattice membership with certificates.
Filtered quotients kill the symbols whose stabilizer pair falls outside a
conjugation- and extension-closed filter.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import os
import tempfile
from dataclasses import dataclass, field
from functools import cached_property

from . import zlat
from .abgrp import FinAbGroup
from .grp import (
    PermGroup,
    SubgroupG,
    abelian_invariants,
    abelian_subgroups,
    all_abelian_subgroups,
    centralizer,
    pmul,
    quotient,
    regular_representation,
)
from .symb import (
    BSymbol,
    ClassVector,
    CSymbol,
    NotAbelian,
    canon_b,
    canon_c,
    expand_B_b,
    expand_B_c,
    generates_dual,
    vanish_V,
)

BASIS_CAP = 200_000
ROW_CAP = 2_000_000


class CapExceeded(RuntimeError):
    pass


class UnknownSymbol(KeyError):
    pass


class FilterError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Filters


@dataclass(frozen=True)
class GFilter:
    """Conjugation- and extension-closed set of stabilizer pairs.

    A pair is keyed exactly like the symbol encoding: the sorted element
    tuple of H and the sorted minimal coset representatives of Y.
    """

    G: PermGroup
    pairs: frozenset

    @staticmethod
    def pair_key(H: SubgroupG, Y0: SubgroupG):
        reps = {min(pmul(y, h) for h in H.elems) for y in Y0.elems}
        return (H.elems, tuple(sorted(reps)))

    @classmethod
    def build(cls, G: PermGroup, pairs) -> "GFilter":
        keyset = set()
        subs = []
        for H, Y0 in pairs:
            keyset.add(cls.pair_key(H, Y0))
            subs.append((H, Y0))
        filt = cls(G=G, pairs=frozenset(keyset))
        filt._validate(subs)
        return filt

    def _validate(self, subs):
        for H, Y0 in subs:
            for g in self.G.elements:
                key = self.pair_key(H.conjugate(g), Y0.conjugate(g))
                if key not in self.pairs:
                    raise FilterError("pair set is not closed under conjugation")
            if H.order == 1:
                continue
            Z = centralizer(self.G, H)
            y0set = set(Y0.elems)
            for g in Z.elems:
                if g not in y0set:
                    continue
                if not all(pmul(g, y) == pmul(y, g) for y in Y0.elems):
                    continue
                from .grp import subgroup_closure

                grown = subgroup_closure(self.G, list(H.elems) + [g])
                if self.pair_key(grown, Y0) not in self.pairs:
                    raise FilterError(
                        "pair set is not closed under the extension property"
                    )

    def contains(self, s: CSymbol) -> bool:
        return (s.H.elems, s.y_reps) in self.pairs

    @classmethod
    def full(cls, G: PermGroup) -> "GFilter":
        pairs = []
        for H in all_abelian_subgroups(G):
            Z = centralizer(G, H)
            Q = quotient(Z, H)
            for idx in Q.subgroups():
                pairs.append((H, Q.subgroup_preimage(idx)))
        return cls.build(G, pairs)

    def to_json(self):
        return {
            "pairs": [
                {"H": [list(e) for e in h], "Y": [list(r) for r in reps]}
                for h, reps in sorted(self.pairs)
            ]
        }


# ---------------------------------------------------------------------------
# Enumeration


def enumerate_b(group: FinAbGroup, n: int, cap: int = BASIS_CAP) -> list[BSymbol]:
    """All generating multisets of n characters (zeros allowed), canonical."""
    chars = sorted(group.characters(), key=lambda c: c.coords)
    out = []
    for beta in itertools.combinations_with_replacement(chars, n):
        if generates_dual(group, beta):
            out.append(BSymbol(group=group, n=n, beta=beta))
            if len(out) > cap:
                raise CapExceeded(f"symbol basis exceeds cap {cap}")
    out.sort(key=lambda s: s.sort_key())
    return out


def enumerate_c(G: PermGroup, n: int, cap: int = BASIS_CAP) -> list[CSymbol]:
    """All canonical triples (H, Y, beta) with |beta| <= n.

    Zero characters are allowed, matching the symbol group in which the
    vanishing relation is imposed as an explicit relation row rather than
    by shrinking the generating set.
    """
    seen = {}
    for H in abelian_subgroups(G):
        iso = abelian_invariants(H)
        Z = centralizer(G, H)
        Q = quotient(Z, H)
        chars = sorted(iso.group.characters(), key=lambda c: c.coords)
        preimages = [Q.subgroup_preimage(idx) for idx in Q.subgroups()]
        for Y0 in preimages:
            for m in range(n + 1):
                for beta in itertools.combinations_with_replacement(chars, m):
                    if not generates_dual(iso.group, beta):
                        continue
                    s = canon_c(G, H, Y0, beta, n)
                    seen[s.key()] = s
                    if len(seen) > cap:
                        raise CapExceeded(f"symbol basis exceeds cap {cap}")
    return sorted(seen.values(), key=lambda s: s.sort_key())


# ---------------------------------------------------------------------------
# Presentations


@dataclass
class Presentation:
    """Indexed symbol basis plus relation lattice with certificates."""

    flavor: str
    group_json: dict
    n: int
    basis: tuple
    relations: tuple
    filter_json: dict | None = None

    def __post_init__(self):
        self._index = {s.key(): i for i, s in enumerate(self.basis)}

    @cached_property
    def _rowspace(self) -> zlat.RowSpace:
        rs = zlat.RowSpace(len(self.basis))
        for row in self.relations:
            rs.insert(list(row))
        return rs

    @cached_property
    def _echelon(self) -> list[list[int]]:
        return self._rowspace.echelon_rows()

    @cached_property
    def snf(self) -> zlat.SNFData | None:
        if not self._echelon:
            return None
        return zlat.snf(self._echelon)

    @cached_property
    def invariants(self) -> tuple[int, list[int]]:
        """(free_rank, torsion) of the presented group."""
        if self.snf is None:
            return len(self.basis), []
        diag = self.snf.diag
        rank = sum(1 for d in diag if d != 0)
        return len(self.basis) - rank, [d for d in diag if d >= 2]

    def position(self, symbol) -> int:
        i = self._index.get(symbol.key())
        if i is None:
            raise UnknownSymbol(f"symbol outside the basis: {symbol}")
        return i

    def vector(self, cv: ClassVector) -> list[int]:
        out = [0] * len(self.basis)
        for s, c in cv.terms.items():
            out[self.position(s)] += c
        return out

    def member(self, vec: list[int]) -> list[int] | None:
        """Certificate over self.relations rows, or None."""
        return self._rowspace.member(vec)

    def snf_image(self, vec: list[int]) -> list[tuple[int, int, int]]:
        """Nonzero coordinates of vec in the diagonalized quotient.

        Entries are (coordinate, residue, modulus) with modulus 0 on free
        coordinates; the list is empty exactly when vec is a relation.
        """
        if self.snf is None:
            return [(i, v, 0) for i, v in enumerate(vec) if v]
        V = [list(r) for r in self.snf.V]
        z = zlat.vecmat(vec, V)
        diag = self.snf.diag
        out = []
        for i, zi in enumerate(z):
            modulus = diag[i] if i < len(diag) else 0
            residue = zi % modulus if modulus else zi
            if residue:
                out.append((i, residue, modulus))
        return out

    def contains_vector(self, vec: list[int]) -> bool:
        return self._rowspace.contains(vec)


@dataclass
class EqResult:
    verdict: str  # "equal" | "distinct"
    coefficients: dict[int, int] | None = None
    snf_image: list[tuple[int, int, int]] | None = None

    @property
    def equal(self) -> bool:
        return self.verdict == "equal"


def class_eq(p: Presentation, u: ClassVector, v: ClassVector) -> EqResult:
    """Decide equality of two classes in the presented group.

    Equal comes with membership coefficients over p.relations; distinct
    comes with the nonzero coordinates in the diagonalized quotient.
    """
    d = [a - b for a, b in zip(p.vector(u), p.vector(v))]
    coeffs = p.member(d)
    if coeffs is not None:
        return EqResult(
            "equal", coefficients={i: c for i, c in enumerate(coeffs) if c}
        )
    return EqResult("distinct", snf_image=p.snf_image(d))


def _finish_rows(rows: set, cap: int) -> tuple:
    out = sorted(r for r in rows if any(r))
    if len(out) > cap:
        raise CapExceeded(f"relation rows exceed cap {cap}")
    return tuple(out)


def present_b(
    group: FinAbGroup,
    n: int,
    basis_cap: int = BASIS_CAP,
    row_cap: int = ROW_CAP,
) -> Presentation:
    """Quotient of the free group on length-n symbols by the blow-up rows."""
    basis = enumerate_b(group, n, cap=basis_cap)
    index = {s.key(): i for i, s in enumerate(basis)}
    rows = set()
    for s in basis:
        for i, j in itertools.combinations(range(n), 2):
            row = [0] * len(basis)
            row[index[s.key()]] += 1
            for t, c in expand_B_b(s, i, j).terms.items():
                row[index[t.key()]] -= c
            rows.add(tuple(row))
    return Presentation(
        flavor="b",
        group_json={"type": "abelian", "orders": list(group.orders)},
        n=n,
        basis=tuple(basis),
        relations=_finish_rows(rows, row_cap),
    )


def present_bc(
    G: PermGroup,
    n: int,
    gfilter: GFilter | None = None,
    basis_cap: int = BASIS_CAP,
    row_cap: int = ROW_CAP,
) -> Presentation:
    """Quotient of the free group on triples by blow-up, vanishing, and
    (optionally) filter rows."""
    basis = enumerate_c(G, n, cap=basis_cap)
    index = {s.key(): i for i, s in enumerate(basis)}
    rows = set()
    for s in basis:
        if vanish_V(s):
            row = [0] * len(basis)
            row[index[s.key()]] = 1
            rows.add(tuple(row))
        for i, j in itertools.combinations(range(len(s.beta)), 2):
            row = [0] * len(basis)
            row[index[s.key()]] += 1
            for t, c in expand_B_c(s, i, j).terms.items():
                row[index[t.key()]] -= c
            rows.add(tuple(row))
        if gfilter is not None and not gfilter.contains(s):
            row = [0] * len(basis)
            row[index[s.key()]] = 1
            rows.add(tuple(row))
    return Presentation(
        flavor="bc",
        group_json={
            "type": "perm",
            "degree": G.degree,
            "gens": [list(g) for g in G.gens],
        },
        n=n,
        basis=tuple(basis),
        relations=_finish_rows(rows, row_cap),
        filter_json=None if gfilter is None else gfilter.to_json(),
    )


# ---------------------------------------------------------------------------
# The abelian identification between filtered triples and plain symbols


@dataclass
class BCGBReport:
    group: FinAbGroup
    n: int
    b_invariants: tuple[int, list[int]]
    bc_invariants: tuple[int, list[int]]
    invariants_match: bool
    b_rows_in_bc: bool
    bc_rows_in_b: bool
    bijection_ok: bool

    @property
    def holds(self) -> bool:
        return (
            self.invariants_match
            and self.b_rows_in_bc
            and self.bc_rows_in_b
            and self.bijection_ok
        )


def bc_g_equals_b(group, n: int) -> BCGBReport:
    """Compare the full-stabilizer filtered quotient with the plain one.

    Both presentations are computed independently; the natural bijection
    pads a triple's characters with zeros (and, backwards, strips them),
    and every relation row is transported and tested for membership on the
    other side.
    """
    if isinstance(group, PermGroup):
        if not group.is_abelian():
            raise NotAbelian("the identification needs an abelian group")
        A = abelian_invariants(group.full_subgroup()).group
    else:
        A = group
    G, _, _ = regular_representation(A)
    FULL = G.full_subgroup()
    iso = abelian_invariants(FULL)
    AA = iso.group
    assert AA.orders == A.orders

    bp = present_b(AA, n)
    filt = GFilter.build(G, [(FULL, FULL)])
    cp = present_bc(G, n, filt)

    def to_c(bsymbol: BSymbol) -> CSymbol:
        nonzero = [c for c in bsymbol.beta if not c.is_zero()]
        return canon_c(G, FULL, FULL, nonzero, n)

    def to_b(csymbol: CSymbol) -> BSymbol | None:
        if csymbol.H.order != G.order:
            return None
        if any(c.is_zero() for c in csymbol.beta):
            return None
        beta = list(csymbol.beta) + [AA.zero_character()] * (n - len(csymbol.beta))
        return canon_b(AA, beta, n)

    # Precompute both transport maps on the bases.
    b_to_c_pos = [cp.position(to_c(s)) for s in bp.basis]
    c_to_b_pos = []
    for s in cp.basis:
        img = to_b(s)
        c_to_b_pos.append(None if img is None else bp.position(img))

    bijection_ok = True
    for s in bp.basis:
        if to_b(to_c(s)) != s:
            bijection_ok = False
    for s in cp.basis:
        img = to_b(s)
        if img is not None and to_c(img) != s:
            bijection_ok = False

    b_rows_in_bc = True
    for row in bp.relations:
        vec = [0] * len(cp.basis)
        for i, c in enumerate(row):
            if c:
                vec[b_to_c_pos[i]] += c
        if not cp.contains_vector(vec):
            b_rows_in_bc = False
            break

    bc_rows_in_b = True
    for row in cp.relations:
        vec = [0] * len(bp.basis)
        for i, c in enumerate(row):
            if c and c_to_b_pos[i] is not None:
                vec[c_to_b_pos[i]] += c
        if not bp.contains_vector(vec):
            bc_rows_in_b = False
            break

    return BCGBReport(
        group=A,
        n=n,
        b_invariants=bp.invariants,
        bc_invariants=cp.invariants,
        invariants_match=bp.invariants == cp.invariants,
        b_rows_in_bc=b_rows_in_bc,
        bc_rows_in_b=bc_rows_in_b,
        bijection_ok=bijection_ok,
    )


# ---------------------------------------------------------------------------
# Cache

SCHEMA = 1


def presentation_cache_key(
    flavor: str, group_json: dict, n: int, filter_json=None
) -> str:
    payload = json.dumps(
        {"flavor": flavor, "group": group_json, "n": n, "filter": filter_json},
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode()).hexdigest()[:24]


def presentation_to_json(p: Presentation) -> dict:
    from .symb import symbol_to_json

    return {
        "schema": SCHEMA,
        "flavor": p.flavor,
        "group": p.group_json,
        "n": p.n,
        "filter": p.filter_json,
        "basis": [symbol_to_json(s, ambient=False) for s in p.basis],
        "relations": [list(r) for r in p.relations],
        "snf_diag": list(p.snf.diag) if p.snf is not None else [],
        "free_rank": p.invariants[0],
        "torsion": list(p.invariants[1]),
    }


def presentation_from_json(d: dict) -> Presentation:
    from .symb import symbol_from_json

    if d.get("schema") != SCHEMA:
        raise ValueError(f"unsupported cache schema {d.get('schema')}")
    group_json = d["group"]
    context = {"group": group_json, "n": d["n"]}
    basis = tuple(symbol_from_json({**s, **context}) for s in d["basis"])
    return Presentation(
        flavor=d["flavor"],
        group_json=group_json,
        n=d["n"],
        basis=basis,
        relations=tuple(tuple(r) for r in d["relations"]),
        filter_json=d.get("filter"),
    )


class PresentationCache:
    """Content-addressed on-disk cache with atomic writes."""

    def __init__(self, directory: str):
        self.directory = directory
        os.makedirs(directory, exist_ok=True)

    def path_for(self, key: str) -> str:
        return os.path.join(self.directory, f"pres-{key}.json")

    def load(self, key: str) -> Presentation | None:
        path = self.path_for(key)
        if not os.path.exists(path):
            return None
        with open(path) as fh:
            return presentation_from_json(json.load(fh))

    def store(self, key: str, p: Presentation) -> str:
        path = self.path_for(key)
        data = json.dumps(presentation_to_json(p), sort_keys=True)
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(data)
            os.replace(tmp, path)
        finally:
            if os.path.exists(tmp):
                os.unlink(tmp)
        return path
