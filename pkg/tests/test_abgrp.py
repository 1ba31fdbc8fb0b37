import itertools
import random

import pytest

from equiburn.abgrp import (
    AbSubgroup,
    Character,
    FinAbGroup,
    char_order,
    kernel,
    restrict,
    structure,
    structure_of_subgroup,
    wedge_det,
)


def brute_closure(ambient, gens):
    # Oracle: subgroup generated by gens, as a set of coordinate tuples.
    seen = {ambient.zero().coords}
    frontier = [ambient.zero()]
    while frontier:
        cur = frontier.pop()
        for g in gens:
            nxt = cur + g
            if nxt.coords not in seen:
                seen.add(nxt.coords)
                frontier.append(nxt)
    return seen


def brute_order(elem):
    # Oracle: repeated addition until zero.
    acc = elem
    m = 1
    while not acc.is_zero():
        acc = acc + elem
        m += 1
    return m


def test_group_validation():
    FinAbGroup((2, 4, 8))
    FinAbGroup(())
    with pytest.raises(ValueError):
        FinAbGroup((3, 2))
    with pytest.raises(ValueError):
        FinAbGroup((1,))


def test_element_reduction_and_arithmetic():
    A = FinAbGroup((4, 12))
    a = A.element((5, -1))
    assert a.coords == (1, 11)
    assert (a + a).coords == (2, 10)
    assert (-a).coords == (3, 1)
    assert (3 * a).coords == (3, 9)


def test_structure_frozen_examples():
    Z6 = FinAbGroup((6,))
    S, _, _ = structure([], Z6)
    assert S.orders == ()

    S, to_sub, from_sub = structure([Z6.element((2,))], Z6)
    assert S.orders == (3,)
    img = to_sub(Z6.element((2,)))
    assert brute_order(img) == 3

    A = FinAbGroup((4, 4))
    gens = [A.element((2, 0)), A.element((0, 2))]
    S, to_sub, from_sub = structure(gens, A)
    assert S.orders == (2, 2)
    want = brute_closure(A, gens)
    assert len(want) == 4 == S.order


def test_structure_maps_are_mutually_inverse():
    rng = random.Random(1)
    for orders in [(2,), (6,), (4, 4), (2, 4), (3, 9), (2, 2, 2)]:
        A = FinAbGroup(orders)
        elems = list(A.elements())
        gens = [rng.choice(elems) for _ in range(rng.randint(0, 3))]
        S, to_sub, from_sub = structure(gens, A)
        members = brute_closure(A, gens)
        assert S.order == len(members)
        for coords in members:
            e = A.element(coords)
            assert from_sub(to_sub(e)) == e
        for s in S.elements():
            assert to_sub(from_sub(s)) == s
        # Maps are homomorphisms.
        mem = [A.element(c) for c in members]
        for _ in range(10):
            x, y = rng.choice(mem), rng.choice(mem)
            assert to_sub(x + y) == to_sub(x) + to_sub(y)


def test_structure_idempotent():
    A = FinAbGroup((4, 4))
    gens = [A.element((2, 0)), A.element((0, 2))]
    S, to_sub, _ = structure(gens, A)
    S2, to2, _ = structure([to_sub(g) for g in gens], S)
    assert S2.orders == S.orders
    for g in gens:
        assert to2(to_sub(g)) == to_sub(g)


def test_kernel_frozen_examples():
    Z4 = FinAbGroup((4,))
    assert kernel(Z4.character((0,))).order() == 4
    assert kernel(Z4.character((1,))).order() == 1
    k = kernel(Z4.character((2,)))
    assert sorted(e.coords for e in k.elements()) == [(0,), (2,)]


def test_kernel_matches_pairing_enumeration():
    for orders in [(4,), (6,), (2, 4), (3, 3), (2, 2, 2)]:
        A = FinAbGroup(orders)
        for chi in A.characters():
            k = kernel(chi)
            want = {e.coords for e in A.elements() if chi.pair(e) == 0}
            got = {e.coords for e in k.elements()}
            assert got == want
            assert A.order == k.order() * char_order(chi)


def test_restrict_frozen_examples():
    Z4 = FinAbGroup((4,))
    sub = AbSubgroup.from_elements(Z4, [Z4.element((2,))])
    # <1, 2> = 2 mod 4 is the nontrivial square root of unity.
    r = restrict(Z4.character((1,)), sub)
    assert r.group.orders == (2,)
    assert r.coords == (1,)
    # <2, 2> = 0 mod 4.
    r = restrict(Z4.character((2,)), sub)
    assert r.coords == (0,)
    # Restriction to the trivial subgroup.
    triv = AbSubgroup.from_elements(Z4, [])
    r = restrict(Z4.character((3,)), triv)
    assert r.group.orders == ()


def test_restrict_is_a_pairing_respecting_homomorphism():
    rng = random.Random(2)
    for orders in [(4,), (2, 4), (6,), (3, 3)]:
        A = FinAbGroup(orders)
        elems = list(A.elements())
        for _ in range(8):
            gens = [rng.choice(elems) for _ in range(rng.randint(0, 2))]
            sub = AbSubgroup.from_elements(A, gens)
            S, to_sub, _ = structure_of_subgroup(sub)
            chis = [rng.choice(list(A.characters())) for _ in range(2)]
            for chi in chis:
                r = restrict(chi, sub)
                e = A.exponent
                es = S.exponent
                for s in sub.elements():
                    # The restricted pairing agrees after the canonical
                    # rescaling of roots of unity.
                    assert chi.pair(s) * es % e == 0
                    assert r.pair(to_sub(s)) == chi.pair(s) * es // e % es
            r01 = restrict(chis[0] + chis[1], sub)
            assert r01 == restrict(chis[0], sub) + restrict(chis[1], sub)


def test_char_order():
    Z5 = FinAbGroup((5,))
    assert char_order(Z5.character((0,))) == 1
    assert char_order(Z5.character((1,))) == 5
    A = FinAbGroup((4, 12))
    # lcm(4/gcd(2,4), 12/gcd(3,12)) = lcm(2, 4); matches repeated addition.
    assert char_order(A.character((2, 3))) == 4
    for orders in [(4,), (4, 12), (2, 2)]:
        B = FinAbGroup(orders)
        for chi in B.characters():
            assert char_order(chi) == brute_order(chi)


def test_wedge_det_frozen_examples():
    A = FinAbGroup((5, 5))
    beta = [A.character((1, 0)), A.character((0, 1))]
    w = wedge_det(beta)
    assert w.values == (1,)
    assert str(w) == "{1,4}"

    w2 = wedge_det([A.character((1, 0)), A.character((0, 2))])
    assert w2.values == (2,)
    assert str(w2) == "{2,3}"

    w0 = wedge_det([A.character((1, 0)), A.character((2, 0))])
    assert w0.is_zero()

    # n > rank: zero class with no components.
    Z5 = FinAbGroup((5,))
    assert wedge_det([Z5.character((1,)), Z5.character((2,))]).is_zero()


def test_wedge_det_sign_count_is_half_of_units():
    # Over all faithful 2x2 weight matrices of (Z/p)^2 there are exactly
    # (p-1)/2 sign classes.
    for p in (5, 7):
        A = FinAbGroup((p, p))
        classes = set()
        for rows in itertools.product(itertools.product(range(p), repeat=2), repeat=2):
            beta = [A.character(rows[0]), A.character(rows[1])]
            w = wedge_det(beta)
            if not w.is_zero():
                classes.add(w)
        assert len(classes) == (p - 1) // 2


def test_wedge_det_alternating_and_multilinear():
    rng = random.Random(3)
    for orders in [(5, 5), (2, 4), (3, 3, 3)]:
        A = FinAbGroup(orders)
        chars = list(A.characters())
        for _ in range(20):
            n = rng.randint(1, min(2, A.rank))
            beta = [rng.choice(chars) for _ in range(n)]
            w = wedge_det(beta)
            if n == 2:
                swapped = wedge_det([beta[1], beta[0]])
                assert swapped == w  # sign class is swap-invariant
                assert wedge_det([beta[0], beta[0]]).is_zero()
                shear = wedge_det([beta[0] + beta[1], beta[1]])
                assert shear == w
