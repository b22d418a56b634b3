"""Addresses, balls, geodesics, and germs on the d-regular tree.

A vertex is a reduced word over the edge colors 0..d-1 (consecutive
letters differ); the empty word is the base vertex. Stepping along
color c from v appends c, or cancels a trailing c, so every vertex has
exactly one neighbor per color and the coloring is legal. Words form
the free product of d copies of the order-2 group, which is why every
letter is its own inverse.

A germ is a finite chunk of automorphism: a bijection between two balls
of equal radius that preserves adjacency. On a tree that is enough to
preserve all distances inside the balls, and it forces center to map to
center (the center is the unique vertex of eccentricity <= radius).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache

from .errors import (
    CenterMismatch,
    NotContained,
    NotRegular,
    RadiusMismatch,
    TooLarge,
    ValidationError,
)


def require_regular(degree):
    if not isinstance(degree, int) or degree < 3:
        raise NotRegular(f"tree degree must be an integer >= 3, got {degree!r}")


def word_mul(a, b):
    """Reduced concatenation of two reduced words (letters are involutions)."""
    out = list(a)
    i = 0
    while out and i < len(b) and out[-1] == b[i]:
        out.pop()
        i += 1
    return tuple(out) + tuple(b[i:])


def word_inv(a):
    return tuple(reversed(a))


@dataclass(frozen=True)
class VertexAddr:
    """Reduced color word addressing a vertex; the empty word is the root."""

    word: tuple = ()

    def __post_init__(self):
        w = tuple(self.word)
        object.__setattr__(self, "word", w)
        for x, y in zip(w, w[1:]):
            if x == y:
                raise ValidationError(f"address not reduced: {w!r}")
        for x in w:
            if not isinstance(x, int) or x < 0:
                raise ValidationError(f"bad edge color {x!r}")

    def step(self, color):
        if self.word and self.word[-1] == color:
            return VertexAddr(self.word[:-1])
        return VertexAddr(self.word + (color,))

    def neighbors(self, degree):
        return [self.step(c) for c in range(degree)]

    @property
    def depth(self):
        return len(self.word)

    def render(self):
        if not self.word:
            return "ε"
        return ".".join(str(c) for c in self.word)

    @staticmethod
    def parse(text):
        t = str(text).strip()
        # "e" is an ASCII alias for the root, handy on the command line
        if t in ("ε", "e", ""):
            return VertexAddr()
        try:
            word = tuple(int(part) for part in t.split("."))
        except ValueError:
            raise ValidationError(f"cannot parse vertex address {text!r}") from None
        return VertexAddr(word)

    def __repr__(self):
        return f"VertexAddr({self.render()})"


ROOT = VertexAddr()


def common_prefix_len(a, b):
    k = 0
    for x, y in zip(a, b):
        if x != y:
            break
        k += 1
    return k


def tree_distance(u, v):
    k = common_prefix_len(u.word, v.word)
    return len(u.word) + len(v.word) - 2 * k


def are_adjacent(u, v):
    return tree_distance(u, v) == 1


def edge_color(u, v):
    """Color of the edge between two adjacent vertices."""
    if not are_adjacent(u, v):
        raise ValidationError(f"{u!r} and {v!r} are not adjacent")
    longer = u if len(u.word) > len(v.word) else v
    return longer.word[-1]


def geodesic(u, v):
    """The unique path from u to v, inclusive."""
    k = common_prefix_len(u.word, v.word)
    out = [VertexAddr(u.word[:i]) for i in range(len(u.word), k - 1, -1)]
    out += [VertexAddr(v.word[:i]) for i in range(k + 1, len(v.word) + 1)]
    return out


def ball_size(degree, radius):
    if radius == 0:
        return 1
    return 1 + degree * ((degree - 1) ** radius - 1) // (degree - 2)


@lru_cache(maxsize=None)
def ball_vertices(center, radius, degree):
    """All vertices within the given distance, sorted by (distance, word)."""
    require_regular(degree)
    if radius < 0:
        raise ValidationError(f"radius must be >= 0, got {radius}")
    out = [center]
    seen = {center}
    layer = [center]
    for _ in range(radius):
        nxt = []
        for v in layer:
            for c in range(degree):
                w = v.step(c)
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        nxt.sort(key=lambda x: x.word)
        out.extend(nxt)
        layer = nxt
    return tuple(out)


def sphere_vertices(center, radius, degree):
    return tuple(
        v for v in ball_vertices(center, radius, degree) if tree_distance(center, v) == radius
    )


def project_to_path(x, path):
    """Nearest vertex of the path; unique when the path is a geodesic."""
    return min(path, key=lambda p: (tree_distance(x, p), p.word))


def thicken(path, radius, degree):
    """All vertices within the given distance of the path, sorted."""
    seen = set()
    for p in path:
        seen.update(ball_vertices(p, radius, degree))
    return tuple(sorted(seen, key=lambda v: (v.depth, v.word)))


# ---------------------------------------------------------------------------
# germs


@dataclass(frozen=True)
class Germ:
    """Adjacency-preserving bijection between two balls of equal radius.

    pairs is the canonical serialization: (source, image) sorted by the
    source word. Equality and hashing go through it.
    """

    src_center: VertexAddr
    dst_center: VertexAddr
    radius: int
    pairs: tuple

    @staticmethod
    def from_mapping(src_center, dst_center, radius, mapping):
        pairs = tuple(sorted(mapping.items(), key=lambda kv: kv[0].word))
        return Germ(src_center, dst_center, radius, pairs)

    @cached_property
    def mapping(self):
        return dict(self.pairs)

    @cached_property
    def inverse_mapping(self):
        return {w: u for u, w in self.pairs}

    def apply(self, v):
        try:
            return self.mapping[v]
        except KeyError:
            raise NotContained(f"{v!r} is outside the domain ball") from None

    def domain(self):
        return tuple(u for u, _ in self.pairs)

    def image(self):
        return tuple(w for _, w in self.pairs)

    def fixes(self, vertices):
        return all(self.apply(v) == v for v in vertices)

    def moved_points(self):
        return tuple(u for u, w in self.pairs if u != w)

    @property
    def is_identity_map(self):
        return self.src_center == self.dst_center and not self.moved_points()

    def sort_key(self):
        return (
            self.src_center.word,
            self.dst_center.word,
            self.radius,
            tuple((u.word, w.word) for u, w in self.pairs),
        )

    def validate(self, degree):
        if not isinstance(self.radius, int) or self.radius < 0:
            raise ValidationError(f"bad radius {self.radius!r}")
        dom = ball_vertices(self.src_center, self.radius, degree)
        if set(self.domain()) != set(dom) or len(self.pairs) != len(dom):
            raise ValidationError("domain is not the source ball")
        img = ball_vertices(self.dst_center, self.radius, degree)
        if set(self.image()) != set(img) or len(set(self.image())) != len(img):
            raise ValidationError("image is not a bijection onto the target ball")
        if self.mapping[self.src_center] != self.dst_center:
            raise ValidationError("center does not map to center")
        for u in dom:
            if tree_distance(self.src_center, u) >= self.radius:
                continue
            for c in range(degree):
                v = u.step(c)
                if not are_adjacent(self.mapping[u], self.mapping[v]):
                    raise ValidationError(f"adjacency broken at ({u!r}, {v!r})")
        return self


def identity_germ(center, radius, degree):
    return Germ.from_mapping(
        center, center, radius, {v: v for v in ball_vertices(center, radius, degree)}
    )


def compose(outer, inner):
    """outer after inner; centers must chain and radii must match."""
    if outer.radius != inner.radius:
        raise RadiusMismatch(f"radii {outer.radius} != {inner.radius}")
    if outer.src_center != inner.dst_center:
        raise CenterMismatch(
            f"outer source center {outer.src_center!r} != inner image center {inner.dst_center!r}"
        )
    om = outer.mapping
    return Germ.from_mapping(
        inner.src_center,
        om[inner.dst_center],
        inner.radius,
        {u: om[w] for u, w in inner.pairs},
    )


def invert(germ):
    return Germ.from_mapping(
        germ.dst_center, germ.src_center, germ.radius, {w: u for u, w in germ.pairs}
    )


def restrict(germ, center, radius, degree):
    """Restriction to a smaller ball inside the domain."""
    if tree_distance(germ.src_center, center) + radius > germ.radius:
        raise NotContained(
            f"ball of radius {radius} at {center!r} is not inside the domain"
        )
    m = germ.mapping
    sub = {v: m[v] for v in ball_vertices(center, radius, degree)}
    return Germ.from_mapping(center, m[center], radius, sub)


def germ_of_map(func, center, radius, degree):
    """Germ of an arbitrary vertex map; caller vouches it is an automorphism."""
    mapping = {v: func(v) for v in ball_vertices(center, radius, degree)}
    return Germ.from_mapping(center, mapping[center], radius, mapping)


# ---------------------------------------------------------------------------
# enumeration of tree isomorphisms on finite pieces


def _parent_toward(v, root):
    return geodesic(v, root)[1]


def iterate_subtree_isos(degree, src_vertices, src_root, dst_vertices, dst_root, pins=None, guard=None):
    """All graph isomorphisms between two finite subtrees, root to root.

    pins maps source vertices to forced images; inconsistent branches are
    pruned. Yields plain dicts. Every yielded map extends to a full tree
    automorphism: matching subtree degrees leave matching ambient degrees
    free on both sides.
    """
    require_regular(degree)
    src_set = frozenset(src_vertices)
    dst_set = frozenset(dst_vertices)
    if src_root not in src_set or dst_root not in dst_set:
        raise ValidationError("root not contained in its vertex set")
    pins = dict(pins or {})
    for k in pins:
        if k not in src_set:
            raise ValidationError(f"pin source {k!r} outside the domain")
    if len(src_set) != len(dst_set):
        return
    if pins.get(src_root, dst_root) != dst_root:
        return

    def layout(vertices, root):
        depth = {v: tree_distance(v, root) for v in vertices}
        order = sorted(vertices, key=lambda v: (depth[v], v.word))
        children = {}
        for v in order:
            if v != root and _parent_toward(v, root) not in vertices:
                raise ValidationError(f"{v!r} is disconnected from the root")
            kids = [
                v.step(c)
                for c in range(degree)
                if v.step(c) in vertices and depth[v.step(c)] == depth[v] + 1
            ]
            children[v] = sorted(kids, key=lambda x: x.word)
        return order, children

    src_order, src_children = layout(src_set, src_root)
    _, dst_children = layout(dst_set, dst_root)

    mapping = {src_root: dst_root}
    count = 0

    def rec(i):
        nonlocal count
        if i == len(src_order):
            count += 1
            if guard is not None and count > guard:
                raise TooLarge(f"more than {guard} isomorphisms")
            yield dict(mapping)
            return
        v = src_order[i]
        cs = src_children[v]
        ct = dst_children[mapping[v]]
        if len(cs) != len(ct):
            return
        for perm in itertools.permutations(ct):
            ok = True
            for a, b in zip(cs, perm):
                want = pins.get(a)
                if want is not None and want != b:
                    ok = False
                    break
            if not ok:
                continue
            for a, b in zip(cs, perm):
                mapping[a] = b
            yield from rec(i + 1)
            for a in cs:
                del mapping[a]

    yield from rec(0)


def iterate_ball_germs(degree, src_center, dst_center, radius, pins=None, guard=None):
    """All germs between the two balls; d! * ((d-1)!)^k of them unpinned."""
    src = ball_vertices(src_center, radius, degree)
    dst = ball_vertices(dst_center, radius, degree)
    for m in iterate_subtree_isos(degree, src, src_center, dst, dst_center, pins=pins, guard=guard):
        yield Germ.from_mapping(src_center, dst_center, radius, m)
