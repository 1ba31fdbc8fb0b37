"""Symbols of stabilizer strata and their blow-up calculus.

Three symbol flavors are supported: plain character tuples for a fixed
finite abelian group, combinatorial triples (H, Y, beta) inside an ambient
finite group, and the same triples decorated with bookkeeping for the
birational type of the stratum (an opaque field label with transcendence
degree and adjoined-parameter counts).

Symbols only exist in canonical form: character tuples are sorted, and
triples are minimized over conjugation by the ambient group, so symbol
equality is plain equality of keys.  Expansion operations return integer
combinations of canonical symbols (ClassVector), ready to be turned into
relation rows.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import zlat
from .abgrp import (
    AbElement,
    Character,
    FinAbGroup,
    char_order,
    character_from_generator_values,
)
from .grp import (
    AbIso,
    PermGroup,
    SubgroupG,
    abelian_invariants,
    abelian_subgroups,
    centralizer,
    pconj,
    perm_cycles,
    pinv,
    pmul,
    quotient,
)

SUMZERO_MAX_LEN = 12


class NotGenerating(ValueError):
    pass


class NotAbelian(ValueError):
    pass


class YNotInCentralizerQuotient(ValueError):
    pass


class BadIndex(ValueError):
    pass


class TrdegTooLarge(ValueError):
    pass


class TooLong(ValueError):
    pass


class EmptyBeta(ValueError):
    pass


class NotDivisorSymbol(ValueError):
    pass


def generates_dual(group: FinAbGroup, chars) -> bool:
    """True when the characters generate the full dual group."""
    r = group.rank
    if r == 0:
        return True
    rows = [list(c.coords) for c in chars]
    rows += [[group.orders[i] if j == i else 0 for j in range(r)] for i in range(r)]
    H, _ = zlat.hnf(rows)
    return H[:r] == zlat.identity(r)


# ---------------------------------------------------------------------------
# Plain character-tuple symbols


@dataclass(frozen=True)
class BSymbol:
    """Sorted generating tuple of exactly n characters (zeros allowed)."""

    group: FinAbGroup
    n: int
    beta: tuple[Character, ...]

    def sort_key(self):
        return tuple(c.coords for c in self.beta)

    def key(self):
        return ("b", self.group.orders, self.n, self.sort_key())

    def __str__(self):
        return "[" + ",".join(
            "(" + ",".join(str(x) for x in c.coords) + ")" for c in self.beta
        ) + "]"


def canon_b(group: FinAbGroup, beta, n: int) -> BSymbol:
    beta = tuple(beta)
    if len(beta) != n:
        raise BadIndex(f"expected {n} characters, got {len(beta)}")
    for c in beta:
        if c.group != group:
            raise ValueError("character on the wrong group")
    if not generates_dual(group, beta):
        raise NotGenerating("characters do not generate the dual group")
    return BSymbol(group=group, n=n, beta=tuple(sorted(beta, key=lambda c: c.coords)))


# ---------------------------------------------------------------------------
# Combinatorial triples


def _coset_reps(Y0_elems, H_elems) -> tuple:
    hset = list(H_elems)
    reps = {min(pmul(y, h) for h in hset) for y in Y0_elems}
    return tuple(sorted(reps))


@dataclass(frozen=True, eq=False)
class CSymbol:
    """Conjugation-canonical triple; construct via canon_c only."""

    G: PermGroup
    H: SubgroupG
    Y0: SubgroupG
    beta: tuple[Character, ...]
    n: int
    ckey: tuple = field(repr=False, default=None)

    @property
    def iso(self) -> AbIso:
        return abelian_invariants(self.H)

    @property
    def y_reps(self) -> tuple:
        return self.ckey[3]

    def beta_values(self) -> tuple:
        return self.ckey[4]

    def key(self):
        return self.ckey

    def sort_key(self):
        # Total order: (|H|, H encoding, Y encoding, beta, stratum type).
        return (len(self.ckey[2]),) + self.ckey[2:]

    def __eq__(self, other):
        return (
            isinstance(other, CSymbol)
            and type(self) is type(other)
            and self.G.key() == other.G.key()
            and self.ckey == other.ckey
        )

    def __hash__(self):
        return hash(self.ckey)

    def __str__(self):
        h = "{" + ",".join(perm_cycles(e) for e in self.H.elems) + "}"
        y = "{" + ",".join(perm_cycles(r) for r in self.y_reps) + "}"
        b = "[" + ",".join(
            "(" + ",".join(str(v) for v in vt) + ")" for vt in self.beta_values()
        ) + "]"
        return f"(H={h}, Y={y}, beta={b})"


@dataclass(frozen=True)
class FieldData:
    """Opaque stand-in for the function field of a stratum."""

    label: str
    trdeg: int
    params: int = 0

    def __post_init__(self):
        if not (0 <= self.params <= self.trdeg):
            raise ValueError("need 0 <= params <= trdeg")

    def grown(self, extra: int) -> "FieldData":
        return FieldData(self.label, self.trdeg + extra, self.params + extra)


@dataclass(frozen=True, eq=False)
class KSymbol(CSymbol):
    """CSymbol with stratum-type bookkeeping; |beta| = n - trdeg."""

    field_data: FieldData = None
    h1_surjective: bool = True  # caller-asserted; never verified here

    def __str__(self):
        k = f"K=({self.field_data.label},{self.field_data.trdeg},{self.field_data.params})"
        return super().__str__()[:-1] + f", {k})"


def _beta_value_tuples(H_elems_sorted, iso_src: AbIso, beta, transport) -> tuple:
    """Character encodings as value tuples on the sorted target elements.

    ``transport`` maps a target element back to the source subgroup.
    """
    out = []
    for b in beta:
        out.append(
            tuple(b.pair(iso_src.coords(transport(h))) for h in H_elems_sorted)
        )
    return tuple(sorted(out))


def _validate_triple(G, H, Y0, beta, n):
    if not H.is_abelian():
        raise NotAbelian("stabilizer subgroup must be abelian")
    Z = centralizer(G, H)
    if not (H <= Y0 and Y0 <= Z):
        raise YNotInCentralizerQuotient(
            "residual subgroup must sit between H and its centralizer"
        )
    iso = abelian_invariants(H)
    beta = tuple(beta)
    for c in beta:
        if c.group != iso.group:
            raise ValueError("character is not expressed on the stabilizer")
    if len(beta) > n:
        raise BadIndex(f"{len(beta)} characters exceed ambient dimension {n}")
    if not generates_dual(iso.group, beta):
        raise NotGenerating("characters do not generate the stabilizer dual")
    return iso, beta


def canon_c(G: PermGroup, H: SubgroupG, Y0: SubgroupG, beta, n: int) -> CSymbol:
    return _canonicalize(CSymbol, G, H, Y0, beta, n)


def canon_k(
    G: PermGroup,
    H: SubgroupG,
    Y0: SubgroupG,
    beta,
    n: int,
    field_data: FieldData,
    h1_surjective: bool = True,
) -> KSymbol:
    beta = tuple(beta)
    if len(beta) != n - field_data.trdeg:
        raise BadIndex(
            f"need n - trdeg = {n - field_data.trdeg} characters, got {len(beta)}"
        )
    return _canonicalize(
        KSymbol, G, H, Y0, beta, n,
        field_data=field_data, h1_surjective=h1_surjective,
    )


def _canonicalize(cls, G, H, Y0, beta, n, **extra):
    iso, beta = _validate_triple(G, H, Y0, beta, n)
    best = None
    best_g = None
    for g in G.elements:
        ginv = pinv(g)
        H_elems = tuple(sorted(pconj(h, g) for h in H.elems))
        Y_elems = tuple(sorted(pconj(y, g) for y in Y0.elems))
        reps = _coset_reps(Y_elems, H_elems)
        values = _beta_value_tuples(
            H_elems, iso, beta, lambda h: pconj(h, ginv)
        )
        cand = (H_elems, reps, values)
        if best is None or cand < best:
            best = cand
            best_g = g
    H_elems, reps, values = best
    Hc = SubgroupG(G, H_elems)
    Yc = SubgroupG(G, tuple(sorted(pconj(y, best_g) for y in Y0.elems)))
    iso_c = abelian_invariants(Hc)
    ginv = pinv(best_g)
    beta_c = []
    for b in beta:
        vals = [
            b.pair(iso.coords(pconj(gen, ginv))) for gen in iso_c.generators
        ]
        beta_c.append(
            character_from_generator_values(iso_c.group, vals, iso.group.exponent)
        )
    beta_c.sort(key=lambda c: c.coords)
    flavor = "k" if cls is KSymbol else "c"
    ckey = (flavor, n, H_elems, reps, values)
    if cls is KSymbol:
        fd = extra["field_data"]
        ckey = ckey + ((fd.label, fd.trdeg, fd.params),)
    return cls(G=G, H=Hc, Y0=Yc, beta=tuple(beta_c), n=n, ckey=ckey, **extra)


# ---------------------------------------------------------------------------
# Integer combinations of symbols


class ClassVector:
    """Integer combination of canonical symbols with no zero coefficients."""

    __slots__ = ("flavor", "terms")

    def __init__(self, flavor: str, terms=None):
        self.flavor = flavor
        self.terms = {}
        if terms:
            for s, c in dict(terms).items():
                if c:
                    self.terms[s] = c

    @classmethod
    def of(cls, symbol, coeff: int = 1):
        flavor = symbol.key()[0]
        return cls(flavor, {symbol: coeff})

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: kv[0].sort_key())

    def __add__(self, other):
        if self.flavor != other.flavor:
            raise ValueError("mixed symbol flavors")
        out = dict(self.terms)
        for s, c in other.terms.items():
            out[s] = out.get(s, 0) + c
        return ClassVector(self.flavor, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return ClassVector(self.flavor, {s: -c for s, c in self.terms.items()})

    def scaled(self, k: int):
        return ClassVector(self.flavor, {s: k * c for s, c in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return (
            isinstance(other, ClassVector)
            and self.flavor == other.flavor
            and self.terms == other.terms
        )

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for s, c in self.items():
            if c == 1:
                parts.append(f"{s}")
            elif c == -1:
                parts.append(f"-{s}")
            else:
                parts.append(f"{c}·{s}")
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# Blow-up expansions


def _replaced(beta, idx, newchar):
    out = list(beta)
    out[idx] = newchar
    return tuple(out)


def expand_B_b(s: BSymbol, i: int, j: int) -> ClassVector:
    """Blow-up expansion of a character-tuple symbol at one index pair.

    Equal characters collapse to a single symbol with a zero in place;
    distinct characters split into the two shear substitutions.
    """
    n = len(s.beta)
    if not (0 <= i < n and 0 <= j < n) or i == j:
        raise BadIndex(f"bad index pair ({i}, {j})")
    bi, bj = s.beta[i], s.beta[j]
    if bi == bj:
        out = canon_b(s.group, _replaced(s.beta, i, s.group.zero_character()), s.n)
        return ClassVector.of(out)
    beta1 = canon_b(s.group, _replaced(s.beta, i, bi - bj), s.n)
    beta2 = canon_b(s.group, _replaced(s.beta, j, bj - bi), s.n)
    return ClassVector.of(beta1) + ClassVector.of(beta2)


def _restrict_to_perm_subgroup(b: Character, iso_src: AbIso, iso_dst: AbIso) -> Character:
    """Restriction of a stabilizer character to a smaller stabilizer."""
    vals = [b.pair(iso_src.coords(g)) for g in iso_dst.generators]
    return character_from_generator_values(
        iso_dst.group, vals, iso_src.group.exponent
    )


def _kernel_of_difference(s: CSymbol, chars) -> SubgroupG:
    """Subgroup of H where all the given characters agree pairwise."""
    iso = s.iso
    base = chars[0]
    elems = tuple(
        h
        for h in s.H.elems
        if all((c - base).pair(iso.coords(h)) == 0 for c in chars[1:])
    )
    return SubgroupG(s.G, elems)


def expand_B_c(s: CSymbol, i: int, j: int) -> ClassVector:
    """Blow-up expansion of a combinatorial triple at one index pair.

    Always three terms: the two shears plus the barred term on the kernel
    of the character difference.  Terms with zero characters are kept; the
    caller decides whether the vanishing relation applies.
    """
    m = len(s.beta)
    if not (0 <= i < m and 0 <= j < m) or i == j:
        raise BadIndex(f"bad index pair ({i}, {j})")
    if isinstance(s, KSymbol):
        return _expand_pair_k(s, i, j)
    bi, bj = s.beta[i], s.beta[j]
    t1 = canon_c(s.G, s.H, s.Y0, _replaced(s.beta, i, bi - bj), s.n)
    t2 = canon_c(s.G, s.H, s.Y0, _replaced(s.beta, j, bj - bi), s.n)
    Hbar = _kernel_of_difference(s, [bi, bj])
    iso_bar = abelian_invariants(Hbar)
    beta_bar = [
        _restrict_to_perm_subgroup(b, s.iso, iso_bar)
        for k, b in enumerate(s.beta)
        if k != i
    ]
    tbar = canon_c(s.G, Hbar, s.Y0, beta_bar, s.n)
    return ClassVector.of(t1) + ClassVector.of(t2) + ClassVector.of(tbar)


def _expand_pair_k(s: KSymbol, i: int, j: int) -> ClassVector:
    bi, bj = s.beta[i], s.beta[j]
    t1 = canon_k(s.G, s.H, s.Y0, _replaced(s.beta, i, bi - bj), s.n, s.field_data)
    t2 = canon_k(s.G, s.H, s.Y0, _replaced(s.beta, j, bj - bi), s.n, s.field_data)
    Hbar = _kernel_of_difference(s, [bi, bj])
    iso_bar = abelian_invariants(Hbar)
    beta_bar = [
        _restrict_to_perm_subgroup(b, s.iso, iso_bar)
        for k, b in enumerate(s.beta)
        if k != i
    ]
    tbar = canon_k(s.G, Hbar, s.Y0, beta_bar, s.n, s.field_data.grown(1))
    return ClassVector.of(t1) + ClassVector.of(t2) + ClassVector.of(tbar)


def expand_codimj(s: CSymbol, positions) -> ClassVector:
    """Expansion for a blow-up center of codimension j = len(positions).

    One term per nonempty subset I of the chosen positions, supported on the
    subgroup where the chosen characters agree; its weights are the common
    restriction plus the shears of the other chosen characters plus the
    restrictions of the untouched ones.  For decorated symbols the stratum
    type gains |I| - 1 parameters, subject to trdeg <= n - j.
    """
    positions = tuple(positions)
    m = len(s.beta)
    j = len(positions)
    if j < 2 or len(set(positions)) != j:
        raise BadIndex(f"bad position tuple {positions}")
    # The side condition precedes the range check: too few characters on a
    # decorated symbol is precisely the trdeg > n - j failure.
    if isinstance(s, KSymbol) and s.field_data.trdeg > s.n - j:
        raise TrdegTooLarge(
            f"trdeg {s.field_data.trdeg} exceeds n - j = {s.n - j}"
        )
    if any(not 0 <= p < m for p in positions):
        raise BadIndex(f"bad position tuple {positions}")
    out = ClassVector("k" if isinstance(s, KSymbol) else "c")
    iso = s.iso
    rest = [p for p in range(m) if p not in positions]
    for size in range(1, j + 1):
        for I in itertools.combinations(positions, size):
            chars_I = [s.beta[p] for p in I]
            H_I = _kernel_of_difference(s, chars_I)
            iso_I = abelian_invariants(H_I)
            bbar = _restrict_to_perm_subgroup(chars_I[0], iso, iso_I)
            beta_I = [bbar]
            for p in positions:
                if p not in I:
                    beta_I.append(
                        _restrict_to_perm_subgroup(s.beta[p], iso, iso_I) - bbar
                    )
            for p in rest:
                beta_I.append(_restrict_to_perm_subgroup(s.beta[p], iso, iso_I))
            if isinstance(s, KSymbol):
                term = canon_k(
                    s.G, H_I, s.Y0, beta_I, s.n, s.field_data.grown(size - 1)
                )
            else:
                term = canon_c(s.G, H_I, s.Y0, beta_I, s.n)
            out = out + ClassVector.of(term)
    return out


# ---------------------------------------------------------------------------
# Vanishing predicates and comparison maps


def vanish_V(s) -> bool:
    """True when the character tuple contains the zero character."""
    return any(b.is_zero() for b in s.beta)


def vanish_sumzero(s) -> bool:
    """True when some nonempty sub-multiset of the characters sums to zero."""
    beta = s.beta
    if len(beta) > SUMZERO_MAX_LEN:
        raise TooLong(f"subset-sum limited to {SUMZERO_MAX_LEN} characters")
    for mask in range(1, 1 << len(beta)):
        total = None
        for t in range(len(beta)):
            if mask >> t & 1:
                total = beta[t] if total is None else total + beta[t]
        if total.is_zero():
            return True
    return False


def vanish_stable(s: KSymbol) -> bool:
    """Sufficient stable-range vanishing: enough adjoined parameters.

    True when the number of adjoined parameters is at least one less than
    the minimum order of the characters.  A trusted rule, not a lattice
    computation.
    """
    if not s.beta:
        raise EmptyBeta("stable-range test needs a nonempty character tuple")
    return s.field_data.params >= min(char_order(b) for b in s.beta) - 1


def forget_K(s: KSymbol) -> CSymbol:
    """Forget the stratum type (multiplicity one over a closed base field)."""
    return canon_c(s.G, s.H, s.Y0, s.beta, s.n)


def project_BG(s: CSymbol) -> BSymbol | None:
    """Quotient map to plain symbols for abelian ambient groups.

    Symbols with full stabilizer pad their characters with zeros to length
    n; symbols with smaller stabilizer map to zero (None).
    """
    if not s.G.is_abelian():
        raise NotAbelian("projection to plain symbols needs an abelian group")
    if s.H.order != s.G.order:
        return None
    A = s.iso.group
    beta = list(s.beta) + [A.zero_character()] * (s.n - len(s.beta))
    return canon_b(A, beta, s.n)


def project_BG_vector(cv: ClassVector) -> ClassVector:
    out = ClassVector("b")
    for s, c in cv.terms.items():
        b = project_BG(s)
        if b is not None:
            out = out + ClassVector.of(b, c)
    return out


# ---------------------------------------------------------------------------
# Compressibility search


def compress_witnesses(s: CSymbol) -> list[tuple[CSymbol, tuple[int, int]]]:
    """All parents whose blow-up expansion has s as its barred term.

    The input must be a divisor-type symbol: a single character generating
    the dual of a nontrivial cyclic stabilizer.  The search is exhaustive
    within the ambient group; an empty list certifies that no blow-up
    relation inside this group produces the symbol.
    """
    if len(s.beta) != 1:
        raise NotDivisorSymbol("need exactly one character")
    if s.iso.group.rank != 1:
        raise NotDivisorSymbol("stabilizer must be nontrivial cyclic")
    if s.n < 2:
        return []
    witnesses = {}
    G = s.G
    for Hp in abelian_subgroups(G):
        if Hp.order % s.H.order != 0:
            continue
        iso_p = abelian_invariants(Hp)
        Z = centralizer(G, Hp)
        Q = quotient(Z, Hp)
        chars = list(iso_p.group.characters())
        for Yidx in Q.subgroups():
            Y0p = Q.subgroup_preimage(Yidx)
            for b1, b2 in itertools.combinations_with_replacement(chars, 2):
                if not generates_dual(iso_p.group, (b1, b2)):
                    continue
                try:
                    parent = canon_c(G, Hp, Y0p, (b1, b2), s.n)
                except NotGenerating:
                    continue
                bar = _bar_term(parent, 0, 1)
                if bar == s:
                    witnesses[parent.key()] = (parent, (0, 1))
    return [witnesses[k] for k in sorted(witnesses)]


def _bar_term(s: CSymbol, i: int, j: int) -> CSymbol:
    Hbar = _kernel_of_difference(s, [s.beta[i], s.beta[j]])
    iso_bar = abelian_invariants(Hbar)
    beta_bar = [
        _restrict_to_perm_subgroup(b, s.iso, iso_bar)
        for k, b in enumerate(s.beta)
        if k != i
    ]
    return canon_c(s.G, Hbar, s.Y0, beta_bar, s.n)


# ---------------------------------------------------------------------------
# Wire format


def _ambient_group_json(s) -> dict:
    from .abgrp import finabgroup_to_json
    from .grp import permgroup_to_json

    if isinstance(s, BSymbol):
        return finabgroup_to_json(s.group)
    return permgroup_to_json(s.G)


def symbol_to_json(s, ambient: bool = True) -> dict:
    """Stable wire form of a canonical symbol.

    Character tuples are coordinate vectors for plain symbols and value
    tuples on the sorted stabilizer elements for triples.
    """
    if isinstance(s, BSymbol):
        d = {"flavor": "b", "beta": [list(c.coords) for c in s.beta]}
    else:
        d = {
            "flavor": "k" if isinstance(s, KSymbol) else "c",
            "H": [list(e) for e in s.H.elems],
            "Y": [list(r) for r in s.y_reps],
            "beta": [list(vt) for vt in s.beta_values()],
        }
        if isinstance(s, KSymbol):
            d["field"] = {
                "label": s.field_data.label,
                "trdeg": s.field_data.trdeg,
                "params": s.field_data.params,
            }
    if ambient:
        d["group"] = _ambient_group_json(s)
        d["n"] = s.n
    return d


def _resolve_ambient(d: dict):
    """(G, coord_to_perm) for a group literal; abelian literals get their
    regular permutation representation."""
    from .abgrp import finabgroup_from_json
    from .grp import permgroup_from_json, regular_representation

    g = d["group"]
    if g.get("type") == "abelian":
        A = finabgroup_from_json(g)
        G, _, perm_of = regular_representation(A)
        return G, perm_of
    return permgroup_from_json(g), None


def symbol_from_json(d: dict):
    from .abgrp import finabgroup_from_json

    flavor = d["flavor"]
    n = d["n"]
    if flavor == "b":
        A = finabgroup_from_json(d["group"])
        return canon_b(A, [A.character(tuple(c)) for c in d["beta"]], n)
    if flavor not in ("c", "k"):
        raise ValueError(f"unknown symbol flavor {flavor!r}")
    G, perm_of = _resolve_ambient(d)

    def as_perm(x):
        return perm_of(tuple(x)) if perm_of is not None else tuple(x)

    H = SubgroupG(G, tuple(as_perm(e) for e in d["H"]))
    iso = abelian_invariants(H)
    reps = [as_perm(r) for r in d["Y"]]
    y_elems = {pmul(r, h) for r in reps for h in H.elems}
    Y0 = SubgroupG(G, tuple(y_elems))
    elems_sorted = H.elems
    beta = []
    for vt in d["beta"]:
        vt = tuple(vt)
        if len(vt) != len(elems_sorted):
            raise ValueError("character value tuple has the wrong length")
        vals = [vt[elems_sorted.index(g)] for g in iso.generators]
        b = character_from_generator_values(iso.group, vals, iso.group.exponent)
        got = tuple(b.pair(iso.coords(h)) % iso.group.exponent for h in elems_sorted)
        if got != tuple(v % iso.group.exponent for v in vt):
            raise ValueError("character values are not a homomorphism")
        beta.append(b)
    if flavor == "c":
        return canon_c(G, H, Y0, beta, n)
    f = d["field"]
    return canon_k(
        G, H, Y0, beta, n,
        FieldData(f["label"], f["trdeg"], f.get("params", 0)),
        h1_surjective=d.get("h1_surjective", True),
    )


def classvector_to_json(cv: ClassVector, schema: int = 1) -> dict:
    terms = []
    group_json = None
    n = None
    for s, c in cv.items():
        terms.append({"symbol": symbol_to_json(s, ambient=False), "coeff": c})
        group_json = _ambient_group_json(s)
        n = s.n
    return {
        "schema": schema,
        "flavor": cv.flavor,
        "group": group_json,
        "n": n,
        "terms": terms,
    }


def classvector_from_json(d: dict) -> ClassVector:
    cv = ClassVector(d["flavor"])
    context = {"group": d["group"], "n": d["n"]}
    for t in d["terms"]:
        s = symbol_from_json({**t["symbol"], **context})
        cv = cv + ClassVector.of(s, t["coeff"])
    return cv
