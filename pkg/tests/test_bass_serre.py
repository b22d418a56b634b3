"""Coset-tree backend for the two-generator one-relator family.

The oracle values below were derived by hand from the rewriting rule
a^(cn) t = t a^(cm): pushing a power of a through a t-type edge divides
the exponent by n and multiplies it by m, so fixing every vertex to
depth d needs the exponent divisible by (mn)^d.
"""

import itertools
import random

import pytest

from treeclose.kclosure import check_k_legal
from treeclose.models import build_model
from treeclose.models.bass_serre import render_britton
from treeclose.permgroup import induced_perm_group, structure_fingerprint
from treeclose.tree_core import ROOT, VertexAddr, ball_vertices, geodesic


@pytest.fixture(scope="module")
def bs23():
    return build_model({"model": "bs", "m": 2, "n": 3})


def test_degree_is_m_plus_n(bs23):
    assert bs23.degree == 5


def test_pinch_rewrites():
    bs = build_model({"model": "bs", "m": 2, "n": 3})
    assert render_britton(bs.from_britton("t a^2 t^-1")) == "a^3"
    assert render_britton(bs.from_britton("a^3 t")) == "t a^2"
    assert bs.from_britton("a^0") == bs.identity()
    assert render_britton(bs.identity()) == "1"


def test_unpinchable_letters_stay(bs23):
    el = bs23.from_britton("t a t^-1")
    assert el.segs  # exponent 1 is not a multiple of m, no pinch
    assert bs23.rho(el) == 0


def test_normal_form_is_multiplicative(bs23):
    rng = random.Random(4)
    letters = ["a", "a^-1", "t", "t^-1", "a^2", "a^3"]
    for _ in range(60):
        u = " ".join(rng.choice(letters) for _ in range(rng.randint(1, 6)))
        v = " ".join(rng.choice(letters) for _ in range(rng.randint(1, 6)))
        eu, ev = bs23.from_britton(u), bs23.from_britton(v)
        assert bs23.from_britton(u + " " + v) == bs23.mul(eu, ev)


def test_rho_is_a_homomorphism(bs23):
    assert bs23.rho(bs23.from_britton("t")) == 1
    assert bs23.rho(bs23.from_britton("a t a t a t")) == 3
    rng = random.Random(8)
    letters = ["a", "t", "t^-1", "a^-1"]
    for _ in range(40):
        u = " ".join(rng.choice(letters) for _ in range(rng.randint(1, 5)))
        v = " ".join(rng.choice(letters) for _ in range(rng.randint(1, 5)))
        eu, ev = bs23.from_britton(u), bs23.from_britton(v)
        assert bs23.rho(bs23.mul(eu, ev)) == bs23.rho(eu) + bs23.rho(ev)


def test_vertex_transitive(bs23):
    for w in ball_vertices(ROOT, 2, 5):
        t = bs23.transporter(ROOT, w)
        assert bs23.act(t, ROOT) == w


def test_edge_labels_split_three_two(bs23):
    labels = [bs23.edge_label(ROOT, ROOT.step(c)) for c in range(5)]
    assert sorted(labels) == [-1, -1, 1, 1, 1]
    w = ROOT.step(0)
    assert bs23.edge_label(w, ROOT) == -bs23.edge_label(ROOT, w)


def test_stab_germs_cyclic_of_order_six(bs23):
    germs = bs23.stab_germ_group(ROOT, 1)
    assert len(germs) == 6
    group = induced_perm_group(germs, [ROOT.step(c) for c in range(5)])
    fp = structure_fingerprint(group)
    assert fp["order"] == 6
    assert fp["abelian"] is True
    assert sorted(fp["element_orders"]) == [1, 2, 3, 3, 6, 6]
    assert fp["transitive"] is False  # 3-cycle and 2-cycle halves


def test_powers_of_a_fixing_balls(bs23):
    # depth d needs 6^d: the two edge types consume one factor 3 and one 2
    assert bs23.germ_of(bs23.a_power(6), ROOT, 1).is_identity_map
    assert not bs23.germ_of(bs23.a_power(6), ROOT, 2).is_identity_map
    assert bs23.germ_of(bs23.a_power(36), ROOT, 2).is_identity_map
    assert not bs23.germ_of(bs23.a_power(36), ROOT, 3).is_identity_map
    assert bs23.germ_of(bs23.a_power(216), ROOT, 3).is_identity_map


def test_fixator_exponent_on_balls():
    for (m, n) in ((2, 3), (1, 2), (2, 4)):
        bs = build_model({"model": "bs", "m": m, "n": n})
        for radius in range(4):
            A = ball_vertices(ROOT, radius, bs.degree)
            N = bs.fixator_exponent(A)
            assert N == (m * n) ** radius
            germ = bs.germ_of(bs.a_power(N), ROOT, max(radius, 1))
            assert all(germ.apply(v) == v for v in A)


def test_minimal_fixing_exponent_matches_edge_type(bs23):
    lengths = sorted(
        bs23.minimal_fixing_exponent(ROOT.step(c)) for c in range(5)
    )
    assert lengths == [2, 2, 3, 3, 3]


def test_valid_base_exponents(bs23):
    lcm, residues, per_edge = bs23.valid_base_exponents(ROOT)
    assert lcm == 6
    assert residues == (0, 2, 3, 4)
    assert sorted(per_edge.values()) == [2, 2, 3, 3, 3]


def test_one_sided_fixator_triviality_tracks_coprimality():
    edge = (ROOT, ROOT.step(0))
    assert build_model({"model": "bs", "m": 2, "n": 3}).one_sided_fixators_trivial(edge)
    assert not build_model({"model": "bs", "m": 2, "n": 4}).one_sided_fixators_trivial(edge)


def test_legal_germs_preserve_edge_labels(bs23):
    rng = random.Random(21)
    elements = [bs23.from_britton(w) for w in ("a", "t", "a t^-1", "a^2 t a")]
    checked = 0
    for el in elements:
        for center in rng.sample(ball_vertices(ROOT, 1, 5), 3):
            germ = bs23.germ_of(el, center, 2)
            assert check_k_legal(bs23, germ, 1)
            for u, w in itertools.permutations(germ.domain(), 2):
                if geodesic(u, w) and len(geodesic(u, w)) == 2:
                    assert bs23.edge_label(u, w) == bs23.edge_label(
                        germ.apply(u), germ.apply(w)
                    )
                    checked += 1
    assert checked > 100


def test_sigma_construction_zero_twists(bs23):
    ident = bs23.sigma_construction(ROOT, 0, {}, 2)
    assert ident.is_identity_map
    built = bs23.sigma_construction(ROOT, 6, {}, 2)
    assert built == bs23.germ_of(bs23.a_power(6), ROOT, 2)


def test_sigma_construction_fixes_an_edge_for_split_exponents(bs23):
    for c in (2, 3, 4):
        germ = bs23.sigma_construction(ROOT, c, {}, 2)
        assert germ.apply(ROOT) == ROOT
        fixed_neighbor = [
            w for w in (ROOT.step(i) for i in range(5)) if germ.apply(w) == w
        ]
        assert fixed_neighbor
