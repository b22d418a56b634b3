"""Finite permutation group helpers."""

import math
import random

from treeclose.permgroup import (
    closure_group,
    compose_perm,
    identity_perm,
    invert_perm,
    is_abelian,
    is_closed,
    is_transitive,
    perm_from_cycles,
    perm_order,
    product_set_equal,
    structure_fingerprint,
)


def test_closure_of_nothing_is_trivial():
    g = closure_group([], 4)
    assert len(g) == 1
    assert identity_perm(4) in g


def test_closure_generates_s3():
    three_cycle = perm_from_cycles(3, [(0, 1, 2)])
    swap = perm_from_cycles(3, [(0, 1)])
    g = closure_group([three_cycle, swap], 3)
    assert len(g) == 6
    assert is_closed(g)
    assert not is_abelian(g)
    assert is_transitive(g, 3)


def test_closure_of_n_cycle_is_cyclic():
    for n in (2, 5, 7):
        cyc = perm_from_cycles(n, [tuple(range(n))])
        g = closure_group([cyc], n)
        assert len(g) == n
        assert is_abelian(g)


def test_closure_order_divides_factorial():
    rng = random.Random(3)
    for _ in range(10):
        n = rng.randint(2, 6)
        gens = []
        for _ in range(2):
            p = list(range(n))
            rng.shuffle(p)
            gens.append(tuple(p))
        g = closure_group(gens, n)
        assert math.factorial(n) % len(g) == 0
        assert is_closed(g)


def test_perm_order():
    assert perm_order(identity_perm(5)) == 1
    assert perm_order(perm_from_cycles(5, [(0, 1), (2, 3, 4)])) == 6


def test_fingerprint_cyclic_six():
    cyc = perm_from_cycles(6, [tuple(range(6))])
    fp = structure_fingerprint(closure_group([cyc], 6))
    assert fp["order"] == 6
    assert fp["abelian"] is True
    assert sorted(fp["element_orders"]) == [1, 2, 3, 3, 6, 6]
    assert fp["transitive"] is True


def test_fingerprint_s3():
    g = closure_group(
        [perm_from_cycles(3, [(0, 1, 2)]), perm_from_cycles(3, [(0, 1)])], 3
    )
    fp = structure_fingerprint(g)
    assert fp["order"] == 6
    assert fp["abelian"] is False
    assert sorted(fp["element_orders"]) == [1, 2, 2, 2, 3, 3]
    assert fp["transitive"] is True


def test_fingerprint_trivial_group():
    fp = structure_fingerprint([identity_perm(1)])
    assert fp["order"] == 1
    assert fp["abelian"] is True
    assert sorted(fp["element_orders"]) == [1]


def test_fingerprint_invariant_under_conjugation():
    rng = random.Random(9)
    gens = [perm_from_cycles(4, [(0, 1, 2, 3)]), perm_from_cycles(4, [(0, 1)])]
    g = closure_group(gens, 4)
    c = list(range(4))
    rng.shuffle(c)
    c = tuple(c)
    conj = [compose_perm(invert_perm(c), compose_perm(p, c)) for p in gens]
    h = closure_group(conj, 4)
    fa, fb = structure_fingerprint(g), structure_fingerprint(h)
    assert fa["order"] == fb["order"]
    assert fa["abelian"] == fb["abelian"]
    assert sorted(fa["element_orders"]) == sorted(fb["element_orders"])
    assert fa["transitive"] == fb["transitive"]


def test_product_set_equal_degenerate_cases():
    ident = identity_perm(3)
    mul = compose_perm
    assert product_set_equal({ident}, {ident}, {ident}, mul)[0]
    g = closure_group([perm_from_cycles(3, [(0, 1, 2)])], 3)
    assert product_set_equal({ident}, set(g), set(g), mul)[0]
    assert product_set_equal(set(g), {ident}, set(g), mul)[0]


def test_product_set_equal_by_construction():
    mul = compose_perm
    a = set(closure_group([perm_from_cycles(4, [(0, 1)])], 4))
    b = set(closure_group([perm_from_cycles(4, [(2, 3)])], 4))
    ab = {mul(x, y) for x in a for y in b}
    ok, missing, extra = product_set_equal(a, b, ab, mul)
    assert ok and not missing and not extra
    stray = perm_from_cycles(4, [(0, 2)])
    ok, missing, extra = product_set_equal(a, b, ab | {stray}, mul)
    assert not ok
    assert stray in missing
