"""Baumslag-Solitar group BS(m,n) = <a,t | t a^m t^-1 = a^n> on its tree.

Vertices of the tree are cosets u<a>, which normalize to the sequence of
(residue, sign) syllables of u: the word a^{r1} t^{e1} ... a^{rL} t^{eL} a^{tail}
with r_i in [0,n) before t and [0,m) before t^-1, and no pinch
t a^{r} t^-1 with r = 0 after a +1 syllable nor t^-1 a^{r} t after a -1
one. The tail is the element's position inside its coset; dropping it
names the coset, and the syllable prefixes are exactly the geodesic from
the base coset, which makes the tree embedding a prefix walk.

The coset tree is (m+n)-regular: n outgoing t-type edges and m t^-1-type
ones at every vertex.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from ..errors import (
    BadElement,
    InconsistentAssignment,
    TooLarge,
    ValidationError,
)
from ..tree_core import (
    Germ,
    ball_vertices,
    compose,
    geodesic,
    identity_germ,
    require_regular,
    tree_distance,
)
from .base import GroupModel, LazyEmbedding


@dataclass(frozen=True)
class BSElement:
    segs: tuple  # ((residue, sign), ...)
    tail: int


class _Normalizer:
    """Pushes letters into normal form one at a time."""

    def __init__(self, m, n, segs=(), tail=0):
        self.m, self.n = m, n
        self.segs = list(segs)
        self.tail = tail

    def push_a(self, c):
        self.tail += c

    def push_t(self, sign):
        if sign == 1:
            r = self.tail % self.n
            carry = (self.tail - r) // self.n
            if r == 0 and self.segs and self.segs[-1][1] == -1:
                prev, _ = self.segs.pop()
                self.tail = prev + carry * self.m
            else:
                self.segs.append((r, 1))
                self.tail = carry * self.m
        elif sign == -1:
            r = self.tail % self.m
            carry = (self.tail - r) // self.m
            if r == 0 and self.segs and self.segs[-1][1] == 1:
                prev, _ = self.segs.pop()
                self.tail = prev + carry * self.n
            else:
                self.segs.append((r, -1))
                self.tail = carry * self.n
        else:
            raise ValidationError(f"bad t sign {sign!r}")

    def push_element(self, el):
        for r, e in el.segs:
            self.push_a(r)
            self.push_t(e)
        self.push_a(el.tail)

    def value(self):
        return BSElement(tuple(self.segs), self.tail)


def parse_britton(text):
    """Parse words like "a^2 t a t^-1 a^-3"; "1" is the identity."""
    letters = []
    t = text.strip()
    if t in ("", "1"):
        return letters
    for tok in t.split():
        if "^" in tok:
            base, _, exp = tok.partition("^")
            try:
                k = int(exp)
            except ValueError:
                raise ValidationError(f"bad exponent in token {tok!r}") from None
        else:
            base, k = tok, 1
        if base not in ("a", "t"):
            raise ValidationError(f"unknown generator {base!r}")
        letters.append((base, k))
    return letters


def render_britton(el):
    parts = []
    for r, e in el.segs:
        if r:
            parts.append(f"a^{r}" if r != 1 else "a")
        parts.append("t" if e == 1 else "t^-1")
    if el.tail:
        parts.append(f"a^{el.tail}" if el.tail != 1 else "a")
    return " ".join(parts) if parts else "1"


class BassSerreModel(GroupModel):
    name = "bs"

    def __init__(self, m, n):
        if not (isinstance(m, int) and isinstance(n, int) and m >= 1 and n >= 1):
            raise ValidationError(f"need integer m, n >= 1, got {m!r}, {n!r}")
        require_regular(m + n)
        self.m, self.n = m, n
        self.degree = m + n
        self._letters = [(e, 1) for e in range(n)] + [(f, -1) for f in range(m)]
        self.embedding = LazyEmbedding(
            self.degree, (), self._coset_neighbors, lambda segs: segs[:-1]
        )
        self._stab_cache = {}

    # --- group arithmetic ---------------------------------------------------

    def identity(self):
        return BSElement((), 0)

    def a_power(self, j):
        return BSElement((), j)

    def from_letters(self, letters):
        nz = _Normalizer(self.m, self.n)
        for base, k in letters:
            if base == "a":
                nz.push_a(k)
            else:
                sign = 1 if k > 0 else -1
                for _ in range(abs(k)):
                    nz.push_t(sign)
        return nz.value()

    def from_britton(self, text):
        return self.from_letters(parse_britton(text))

    def mul(self, a, b):
        nz = _Normalizer(self.m, self.n, a.segs, a.tail)
        nz.push_element(b)
        return nz.value()

    def inv(self, a):
        nz = _Normalizer(self.m, self.n)
        nz.push_a(-a.tail)
        for r, e in reversed(a.segs):
            nz.push_t(-e)
            nz.push_a(-r)
        return nz.value()

    # --- the coset tree ---------------------------------------------------------

    def _coset_neighbors(self, segs):
        out = []
        for r, e in self._letters:
            nz = _Normalizer(self.m, self.n, segs, 0)
            nz.push_a(r)
            nz.push_t(e)
            out.append(tuple(nz.segs))
        return out

    def act(self, g, v):
        segs = self.embedding.obj_of(v)
        moved = self.mul(g, BSElement(segs, 0))
        return self.embedding.addr_of(moved.segs)

    def transporter(self, u, w):
        gu = BSElement(self.embedding.obj_of(u), 0)
        gw = BSElement(self.embedding.obj_of(w), 0)
        return self.mul(gw, self.inv(gu))

    def stab_generator(self, v):
        """Generator of the (infinite cyclic) full stabilizer of v."""
        u = BSElement(self.embedding.obj_of(v), 0)
        return self.mul(self.mul(u, self.a_power(1)), self.inv(u))

    def stab_germ_group(self, v, k, guard=10**6):
        key = (v, k)
        got = self._stab_cache.get(key)
        if got is not None:
            return got
        gen_germ = self.germ_of(self.stab_generator(v), v, k)
        ident = identity_germ(v, k, self.degree)
        out = [ident]
        cur = gen_germ
        while cur != ident:
            out.append(cur)
            cur = compose(gen_germ, cur)
            if len(out) > guard:
                raise TooLarge(f"stabilizer germ group exceeded {guard}")
        result = tuple(sorted(out, key=lambda g: g.sort_key()))
        self._stab_cache[key] = result
        return result

    def edge_label(self, x, y):
        """+1 for a t-type edge out of x, -1 for a t^-1-type one."""
        sx = self.embedding.obj_of(x)
        sy = self.embedding.obj_of(y)
        if len(sy) == len(sx) + 1 and sy[: len(sx)] == sx:
            return sy[-1][1]
        if len(sx) == len(sy) + 1 and sx[: len(sy)] == sy:
            return -sx[-1][1]
        raise ValidationError(f"{x!r} and {y!r} are not adjacent")

    def rho(self, el):
        """t-exponent sum, a homomorphism onto the integers."""
        return sum(sign for _, sign in el.segs)

    def fixator_exponent(self, vertices):
        """m**J * n**I over the deepest t-minus / t counts along root
        geodesics; a() to this power fixes every listed vertex."""
        from ..tree_core import ROOT

        i_max = j_max = 0
        for v in vertices:
            path = geodesic(ROOT, v)
            i = sum(
                1 for x, y in zip(path, path[1:]) if self.edge_label(x, y) == 1
            )
            j = len(path) - 1 - i
            i_max = max(i_max, i)
            j_max = max(j_max, j)
        return self.m ** j_max * self.n ** i_max

    # --- searches ------------------------------------------------------------------

    def iter_elements(self):
        gens = [("a", 1), ("a", -1), ("t", 1), ("t", -1)]
        seen = {self.identity()}
        frontier = [self.identity()]
        yield self.identity()
        while frontier:
            new = []
            for el in frontier:
                for g in gens:
                    cand = self.mul(el, self.from_letters([g]))
                    if cand not in seen:
                        seen.add(cand)
                        new.append(cand)
                        yield cand
            frontier = new

    def nondiscreteness_candidates(self, k):
        for j in itertools.count(1):
            yield self.a_power(j)

    def one_sided_fixators_trivial(self, edge):
        # valuation argument; needs the two scales to be coprime
        return math.gcd(self.m, self.n) == 1

    # --- exponent machinery for generator constructions -----------------------------

    def minimal_fixing_exponent(self, v, anchor=None):
        """Smallest l >= 1 with (stab generator at anchor)^l fixing v."""
        from ..tree_core import ROOT

        anchor = ROOT if anchor is None else anchor
        radius = max(tree_distance(anchor, v), 1)
        germ = self.germ_of(self.stab_generator(anchor), anchor, radius)
        return _cycle_length(germ, v)

    def valid_base_exponents(self, v):
        """Residues i (mod the lcm of the neighbor exponents) whose stab
        generator power fixes at least one neighbor of v; per-neighbor
        sets are returned too."""
        germ = self.germ_of(self.stab_generator(v), v, 1)
        per_edge = {}
        lcm = 1
        for w in (v.step(c) for c in range(self.degree)):
            l = _cycle_length(germ, w)
            per_edge[w] = l
            lcm = lcm * l // math.gcd(lcm, l)
        residues = sorted(
            {i for w, l in per_edge.items() for i in range(0, lcm, l)}
        )
        return lcm, tuple(residues), per_edge

    def sigma_construction(self, v, base_exponent, twists, radius):
        """Germ at (v, radius) twisting each subtree by stabilizer powers.

        Vertex y at distance >= 1 maps to gen^{c(parent(y))} applied to y,
        where c(v) is the base exponent and each child may add any
        multiple of its own minimal fixing exponent (the twist). Every
        choice glues to a well-defined germ because the added power fixes
        the child it is attached at.
        """
        germ = self.germ_of(self.stab_generator(v), v, radius)
        exps = {v: base_exponent}
        mapping = {v: v}
        for y in ball_vertices(v, radius, self.degree):
            if y == v:
                continue
            parent = geodesic(y, v)[1]
            l = _cycle_length(germ, y)
            exps[y] = exps[parent] + l * int(twists.get(y, 0))
            mapping[y] = _germ_power_apply(germ, exps[parent] % l, y)
        return Germ.from_mapping(v, v, radius, mapping)

    def exponent_assignment_germ(self, v, exponents, radius):
        """Same construction from explicit per-vertex exponents; raises
        InconsistentAssignment when a child exponent is not congruent to
        its parent's modulo the child's minimal fixing exponent."""
        germ = self.germ_of(self.stab_generator(v), v, radius)
        mapping = {v: v}
        for y in ball_vertices(v, radius, self.degree):
            if y == v:
                continue
            parent = geodesic(y, v)[1]
            l = _cycle_length(germ, y)
            cy, cp = exponents[y], exponents[parent]
            if (cy - cp) % l:
                raise InconsistentAssignment(
                    f"exponent {cy} at {y!r} vs {cp} at parent; need a multiple of {l}"
                )
            mapping[y] = _germ_power_apply(germ, cp % l, y)
        return Germ.from_mapping(v, v, radius, mapping)

    # --- serialization ----------------------------------------------------------------

    def element_to_json(self, g):
        return {"britton": render_britton(g)}

    def element_from_json(self, data):
        if "britton" in data:
            return self.from_britton(data["britton"])
        try:
            segs = tuple((int(r), int(e)) for r, e in data["segs"])
            return BSElement(segs, int(data["tail"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise BadElement(f"bad element payload: {exc}") from None

    def describe(self):
        return {"model": self.name, "m": self.m, "n": self.n, "degree": self.degree}


def _cycle_length(germ, y):
    z = germ.apply(y)
    l = 1
    while z != y:
        z = germ.apply(z)
        l += 1
    return l


def _germ_power_apply(germ, k, y):
    z = y
    for _ in range(k):
        z = germ.apply(z)
    return z
