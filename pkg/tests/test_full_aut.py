"""Full automorphism group backend: rigid germ extensions and translations."""

import pytest

from treeclose.kclosure import check_k_legal, element_germs_at, local_action
from treeclose.models import build_model
from treeclose.tree_core import (
    ROOT,
    ball_vertices,
    iterate_ball_germs,
    restrict,
    tree_distance,
)


@pytest.fixture(scope="module")
def fa():
    return build_model({"model": "full_aut", "d": 3})


def test_stab_germ_counts(fa):
    assert len(fa.stab_germ_group(ROOT, 1)) == 6
    assert len(fa.stab_germ_group(ROOT, 2)) == 48


def test_local_action_s3(fa):
    fp = local_action(fa, ROOT)
    assert fp["order"] == 6
    assert fp["transitive"] is True


def test_every_ball_germ_is_an_element_germ(fa):
    want = {g.sort_key() for g in iterate_ball_germs(3, ROOT, ROOT, 2)}
    got = {g.sort_key() for g in element_germs_at(fa, ROOT, 2, ROOT)}
    assert want == got
    assert len(want) == 48


def test_everything_is_legal(fa):
    for g in iterate_ball_germs(3, ROOT, ROOT, 2):
        assert check_k_legal(fa, g, 1)
        assert check_k_legal(fa, g, 2)


def test_rigid_extension_is_consistent(fa):
    # the canonical extension of a germ restricts back to that germ
    for germ in list(iterate_ball_germs(3, ROOT, ROOT, 2))[:12]:
        el = fa.from_germ(germ)
        wide = fa.germ_of(el, ROOT, 4)
        assert restrict(wide, ROOT, 2, 3) == germ
        wide.validate(3)


def test_translation_shifts_the_axis(fa):
    h = fa.translation(1, 6)
    for z in range(-3, 3):
        assert fa.act(h, fa.axis_vertex(z)) == fa.axis_vertex(z + 1)
    h2 = fa.translation(2, 6)
    assert fa.act(h2, fa.axis_vertex(0)) == fa.axis_vertex(2)


def test_axis_vertices_lie_on_a_line(fa):
    for z in range(-4, 4):
        assert tree_distance(fa.axis_vertex(z), fa.axis_vertex(z + 1)) == 1
    assert tree_distance(fa.axis_vertex(-3), fa.axis_vertex(3)) == 6


def test_translation_cache_reuses_elements(fa):
    assert fa.translation(1, 5) is fa.translation(1, 5)


def test_word_element_acts_by_its_permutations(fa):
    el = fa.from_word_element((), (1, 0, 2), 1)
    assert fa.act(el, ROOT.step(0)) == ROOT.step(1)
    assert fa.act(el, ROOT.step(2)) == ROOT.step(2)


def test_ball_fixators_are_nontrivial(fa):
    germs = fa.fixator_germs(ROOT, 2, ball_vertices(ROOT, 1, 3))
    assert any(not g.is_identity_map for g in germs)
