import itertools
import random

import pytest

from equiburn.abgrp import FinAbGroup
from equiburn.grp import (
    PermGroup,
    abelian_invariants,
    abelian_subgroups,
    centralizer,
    quotient,
    regular_representation,
    subgroup_closure,
)
from equiburn.symb import (
    BadIndex,
    BSymbol,
    ClassVector,
    CSymbol,
    EmptyBeta,
    FieldData,
    KSymbol,
    NotDivisorSymbol,
    NotGenerating,
    TooLong,
    TrdegTooLarge,
    canon_b,
    canon_c,
    canon_k,
    compress_witnesses,
    expand_B_b,
    expand_B_c,
    expand_codimj,
    forget_K,
    generates_dual,
    project_BG,
    vanish_stable,
    vanish_sumzero,
    vanish_V,
)


def chars(A, *coord_lists):
    return tuple(A.character(c) for c in coord_lists)


def bsym(A, n, *coord_lists):
    return canon_b(A, chars(A, *coord_lists), n)


def reg(orders):
    A = FinAbGroup(orders)
    G, points, perm_of = regular_representation(A)
    return A, G, perm_of


def full_triple(orders):
    """(G, H=G, Y0=G, iso) for the regular representation of an abelian group."""
    A, G, _ = reg(orders)
    H = G.full_subgroup()
    return G, H, H, abelian_invariants(H)


def test_canon_b():
    Z2 = FinAbGroup((2,))
    a = bsym(Z2, 2, (1,), (0,))
    b = bsym(Z2, 2, (0,), (1,))
    assert a == b
    Z5 = FinAbGroup((5,))
    s = bsym(Z5, 3, (3,), (1,), (4,))
    assert [c.coords for c in s.beta] == [(1,), (3,), (4,)]
    with pytest.raises(NotGenerating):
        bsym(Z2, 2, (0,), (0,))
    with pytest.raises(BadIndex):
        bsym(Z2, 1, (1,), (1,))


def test_generates_dual():
    A = FinAbGroup((2, 2))
    assert generates_dual(A, chars(A, (1, 0), (0, 1)))
    assert not generates_dual(A, chars(A, (1, 0), (1, 0)))
    assert generates_dual(FinAbGroup(()), ())


def test_canon_c_abelian_is_sorting():
    G, H, Y0, iso = full_triple((5,))
    s = canon_c(G, H, Y0, chars(iso.group, (3,), (1,)), 2)
    assert [c.coords for c in s.beta] == [(1,), (3,)]


def test_canon_c_conjugation_collision():
    # In S3 the subgroups <(0 1)> and <(0 2)> are conjugate: same key.
    G = PermGroup.generate(3, [(1, 2, 0), (1, 0, 2)])
    H1 = subgroup_closure(G, [(1, 0, 2)])
    H2 = subgroup_closure(G, [(2, 1, 0)])
    iso1 = abelian_invariants(H1)
    iso2 = abelian_invariants(H2)
    s1 = canon_c(G, H1, H1, chars(iso1.group, (1,)), 2)
    s2 = canon_c(G, H2, H2, chars(iso2.group, (1,)), 2)
    assert s1 == s2
    # Idempotence.
    s3 = canon_c(s1.G, s1.H, s1.Y0, s1.beta, s1.n)
    assert s3 == s1 and s3.key() == s1.key()


def test_canon_c_randomized_conjugates_collide():
    rng = random.Random(4)
    G = PermGroup.generate(4, [(1, 2, 3, 0), (1, 0, 3, 2)])  # D4
    for H in abelian_subgroups(G):
        iso = abelian_invariants(H)
        Z = centralizer(G, H)
        Q = quotient(Z, H)
        for Yidx in Q.subgroups():
            Y0 = Q.subgroup_preimage(Yidx)
            all_chars = list(iso.group.characters())
            for _ in range(3):
                beta = [rng.choice(all_chars) for _ in range(rng.randint(0, 2))]
                if not generates_dual(iso.group, beta):
                    continue
                base = canon_c(G, H, Y0, beta, 2)
                g = rng.choice(G.elements)
                Hg = H.conjugate(g)
                Yg = Y0.conjugate(g)
                isog = abelian_invariants(Hg)
                from equiburn.symb import _restrict_to_perm_subgroup

                # transport beta via conjugation and re-canonicalize
                from equiburn.grp import pconj, pinv
                from equiburn.abgrp import character_from_generator_values

                betag = [
                    character_from_generator_values(
                        isog.group,
                        [
                            b.pair(iso.coords(pconj(gen, pinv(g))))
                            for gen in isog.generators
                        ],
                        iso.group.exponent,
                    )
                    for b in beta
                ]
                assert canon_c(G, Hg, Yg, betag, 2) == base


def test_expand_B_b_frozen():
    Z2 = FinAbGroup((2,))
    cv = expand_B_b(bsym(Z2, 2, (1,), (1,)), 0, 1)
    assert cv == ClassVector.of(bsym(Z2, 2, (0,), (1,)))

    cv = expand_B_b(bsym(Z2, 2, (0,), (1,)), 0, 1)
    want = ClassVector.of(bsym(Z2, 2, (1,), (1,))) + ClassVector.of(
        bsym(Z2, 2, (0,), (1,))
    )
    assert cv == want

    Z5 = FinAbGroup((5,))
    cv = expand_B_b(bsym(Z5, 2, (1,), (3,)), 0, 1)
    want = ClassVector.of(bsym(Z5, 2, (3,), (3,))) + ClassVector.of(
        bsym(Z5, 2, (1,), (2,))
    )
    assert cv == want

    with pytest.raises(BadIndex):
        expand_B_b(bsym(Z5, 2, (1,), (3,)), 1, 1)


def test_expand_B_b_preserves_generation():
    # Exhaustive over all length-2 symbols for |H| <= 9 (generation closure
    # is implied by canon_b succeeding on every expansion output).
    for orders in [(2,), (3,), (4,), (5,), (6,), (7,), (8,), (9,), (2, 2), (2, 4), (3, 3), (2, 2, 2)]:
        A = FinAbGroup(orders)
        allchars = list(A.characters())
        for pair in itertools.combinations_with_replacement(allchars, 2):
            if not generates_dual(A, pair):
                continue
            s = canon_b(A, pair, 2)
            expand_B_b(s, 0, 1)


def test_expand_B_c_frozen_z2():
    G, H, Y0, iso = full_triple((2,))
    s = canon_c(G, H, Y0, chars(iso.group, (1,), (1,)), 2)
    cv = expand_B_c(s, 0, 1)
    # (0,1) appears twice: both shears hit the same canonical symbol.
    zero_one = canon_c(G, H, Y0, chars(iso.group, (0,), (1,)), 2)
    bar = canon_c(G, H, Y0, chars(iso.group, (1,)), 2)
    assert cv.terms[zero_one] == 2
    assert cv.terms[bar] == 1


def test_expand_B_c_frozen_z4():
    G, H, Y0, iso = full_triple((4,))
    s = canon_c(G, H, Y0, chars(iso.group, (1,), (3,)), 2)
    cv = expand_B_c(s, 0, 1)
    t1 = canon_c(G, H, Y0, chars(iso.group, (2,), (3,)), 2)
    t2 = canon_c(G, H, Y0, chars(iso.group, (1,), (2,)), 2)
    assert cv.terms[t1] == 1 and cv.terms[t2] == 1
    # barred term lives on ker(1-3) = {0, 2} of order 2 with character (1)
    bars = [s2 for s2 in cv.terms if s2.H.order == 2]
    assert len(bars) == 1
    bar = bars[0]
    assert bar.beta_values() == ((0, 1),)
    # restriction of 3 to {0,2} is the faithful character of Z/2
    assert [c.coords for c in bar.beta] == [(1,)]


def test_expand_codimj_matches_pair_expansion():
    rng = random.Random(8)
    for orders in [(2,), (4,), (2, 2), (5,)]:
        G, H, Y0, iso = full_triple(orders)
        allchars = list(iso.group.characters())
        for _ in range(6):
            beta = [rng.choice(allchars) for _ in range(3)]
            if not generates_dual(iso.group, beta):
                continue
            s = canon_c(G, H, Y0, beta, 3)
            for i, j in itertools.combinations(range(3), 2):
                assert expand_codimj(s, (i, j)) == expand_B_c(s, i, j)


def test_expand_codimj_seven_terms():
    G, H, Y0, iso = full_triple((2,))
    s = canon_c(G, H, Y0, chars(iso.group, (1,), (1,), (1,)), 3)
    cv = expand_codimj(s, (0, 1, 2))
    assert sum(cv.terms.values()) == 7


def test_expand_codimj_trdeg_guard():
    G, H, Y0, iso = full_triple((2,))
    k = canon_k(G, H, Y0, chars(iso.group, (1,), (1,)), 4, FieldData("k(F)", 2, 0))
    expand_codimj(k, (0, 1))  # trdeg 2 <= n - j = 2: boundary, allowed
    k2 = canon_k(G, H, Y0, chars(iso.group, (1,), (1,), (1,)), 4, FieldData("k(F)", 1, 0))
    expand_codimj(k2, (0, 1, 2))  # trdeg 1 <= 4 - 3
    # One character short of j positions is exactly trdeg > n - j.
    k3 = canon_k(G, H, Y0, chars(iso.group, (1,)), 3, FieldData("k(F)", 2, 0))
    with pytest.raises(TrdegTooLarge):
        expand_codimj(k3, (0, 1))
    with pytest.raises(BadIndex):
        expand_codimj(k, (0, 0))


def test_expand_codimj_k_growth():
    G, H, Y0, iso = full_triple((2,))
    k = canon_k(G, H, Y0, chars(iso.group, (1,), (1,), (1,)), 3, FieldData("k(F)", 0, 0))
    cv = expand_codimj(k, (0, 1, 2))
    by_trdeg = {}
    for sym in cv.terms:
        by_trdeg.setdefault(sym.field_data.trdeg, 0)
        by_trdeg[sym.field_data.trdeg] += cv.terms[sym]
    # |I|=1 gives trdeg 0 (3 terms), |I|=2 trdeg 1 (3 terms), |I|=3 trdeg 2.
    assert by_trdeg == {0: 3, 1: 3, 2: 1}


def test_vanish_predicates():
    Z5 = FinAbGroup((5,))
    assert vanish_V(bsym(Z5, 2, (0,), (1,)))
    assert not vanish_V(bsym(Z5, 2, (1,), (3,)))
    assert vanish_sumzero(bsym(Z5, 2, (1,), (4,)))
    assert not vanish_sumzero(bsym(Z5, 2, (1,), (1,)))
    assert vanish_sumzero(bsym(Z5, 2, (0,), (1,)))

    G, H, Y0, iso = full_triple((5,))
    long = canon_k(
        G, H, Y0, [iso.group.character((1,))] * 13, 13, FieldData("K", 0, 0)
    )
    with pytest.raises(TooLong):
        vanish_sumzero(long)


def test_vanish_stable():
    G, H, Y0, iso = full_triple((2,))
    s = canon_k(G, H, Y0, chars(iso.group, (1,), (1,)), 3, FieldData("K", 1, 1))
    assert vanish_stable(s)  # orders all 2, params 1 >= 2 - 1
    s0 = canon_k(G, H, Y0, chars(iso.group, (1,), (1,)), 2, FieldData("K", 0, 0))
    assert not vanish_stable(s0)

    G10, H10, Y10, iso10 = full_triple((10,))
    # orders {2, 5}: min order 2, so one parameter is enough
    s10 = canon_k(
        G10, H10, Y10, chars(iso10.group, (5,), (2,)), 3, FieldData("K", 1, 1)
    )
    assert vanish_stable(s10)

    empty = canon_k(
        PermGroup.generate(1, []).full_subgroup().parent,
        PermGroup.generate(1, []).full_subgroup(),
        PermGroup.generate(1, []).full_subgroup(),
        (),
        1,
        FieldData("K", 1, 1),
    )
    with pytest.raises(EmptyBeta):
        vanish_stable(empty)


def test_forget_and_project():
    G, H, Y0, iso = full_triple((2,))
    k = canon_k(G, H, Y0, chars(iso.group, (1,)), 2, FieldData("K", 1, 0))
    c = forget_K(k)
    assert isinstance(c, CSymbol) and not isinstance(c, KSymbol)
    assert c.H == k.H and [x.coords for x in c.beta] == [(1,)]

    b = project_BG(c)
    assert b is not None
    assert [x.coords for x in b.beta] == [(0,), (1,)]

    triv = canon_c(G, G.trivial_subgroup(), H, (), 2)
    assert project_BG(triv) is None


def test_compress_witnesses_frozen():
    G, H, Y0, iso = full_triple((2,))
    s = canon_c(G, H, Y0, chars(iso.group, (1,)), 2)
    wit = compress_witnesses(s)
    assert len(wit) == 1
    parent, pair = wit[0]
    assert pair == (0, 1)
    assert [c.coords for c in parent.beta] == [(1,), (1,)]

    with pytest.raises(NotDivisorSymbol):
        compress_witnesses(canon_c(G, H, Y0, chars(iso.group, (1,), (1,)), 2))
    # dimension 1 leaves no room for a parent
    s1 = canon_c(G, H, Y0, chars(iso.group, (1,)), 1)
    assert compress_witnesses(s1) == []


def test_compress_witnesses_z4():
    # The faithful divisor symbol on Z/4 has parents with H' = Z/4 only;
    # search confirms the barred term matches for (1,1)-type pairs and for
    # pairs whose difference has full kernel.
    G, H, Y0, iso = full_triple((4,))
    s = canon_c(G, H, Y0, chars(iso.group, (1,)), 2)
    wit = compress_witnesses(s)
    assert wit, "faithful divisor symbol on Z/4 is compressible"
    for parent, _ in wit:
        assert parent.H.order == 4
        bar_vals = s.beta_values()
        assert bar_vals == ((0, 1, 2, 3),)
