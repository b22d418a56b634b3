"""Shared contract for group-on-tree backends.

A model owns a d-regular tree addressed by VertexAddr words plus a group
acting on it with exact arithmetic. Everything the closure laboratory
consumes goes through this interface, so certificates never depend on
how a particular group stores its elements.
"""

from __future__ import annotations

import abc
import itertools

from ..errors import ValidationError
from ..tree_core import (
    ball_vertices,
    germ_of_map,
    tree_distance,
)


class GroupModel(abc.ABC):
    name = "abstract"
    degree = None
    vertex_transitive = True

    # --- group operations ------------------------------------------------

    @abc.abstractmethod
    def identity(self):
        ...

    @abc.abstractmethod
    def mul(self, a, b):
        """a after b."""

    @abc.abstractmethod
    def inv(self, a):
        ...

    @abc.abstractmethod
    def act(self, g, v):
        """Image of the vertex v under g."""

    def germ_of(self, g, center, radius):
        return germ_of_map(lambda u: self.act(g, u), center, radius, self.degree)

    # --- orbit structure --------------------------------------------------

    @abc.abstractmethod
    def transporter(self, u, w):
        """Some element sending u to w, or None if they sit in different orbits."""

    def orbit_reps(self):
        from ..tree_core import ROOT

        return (ROOT,)

    # --- germ data ---------------------------------------------------------

    @abc.abstractmethod
    def stab_germ_group(self, v, k):
        """Sorted tuple of all radius-k germs of elements fixing v. Exact."""

    def fixator_germs(self, center, radius, fixed):
        """Germs at (center, radius) of elements fixing the given set pointwise."""
        fixed = tuple(fixed)
        if center not in fixed:
            raise ValidationError("the germ center must be among the fixed vertices")
        return tuple(
            g for g in self.stab_germ_group(center, radius) if g.fixes(fixed)
        )

    def fixator_maps_on(self, tube, pinned):
        """Restrictions to the tube of all elements fixing `pinned` pointwise.

        Returned as dicts, deduplicated, sorted canonically. The default
        reads them off the stabilizer germs at the middle pinned vertex
        with a radius that covers the tube; backends with cheaper exact
        enumerations override this.
        """
        pinned = tuple(pinned)
        tube = tuple(tube)
        center = pinned[len(pinned) // 2]
        radius = max(tree_distance(center, x) for x in tube)
        seen = {}
        for g in self.stab_germ_group(center, radius):
            if not g.fixes(pinned):
                continue
            m = {x: g.apply(x) for x in tube}
            key = tuple(sorted((a.word, b.word) for a, b in m.items()))
            if key not in seen:
                seen[key] = m
        return tuple(seen[k] for k in sorted(seen))

    # --- searches ----------------------------------------------------------

    @abc.abstractmethod
    def iter_elements(self):
        """Deterministic stream of elements, short data first."""

    def nondiscreteness_candidates(self, k):
        return self.iter_elements()

    def region_fixator_trivial(self, region):
        """True when the model certifies that only the identity fixes the
        region pointwise; None when it has no such certificate."""
        return None

    def one_sided_fixators_trivial(self, edge):
        """True when the model certifies that an element fixing either
        half-tree at the edge pointwise is the identity."""
        return False

    def common_transitive_pairs(self, other, probe_radius):
        """Candidate (self element, other element) pairs expected to act
        identically, anchored at the root and covering all root neighbors.
        None when the model has no pairing hook."""
        return None

    # --- serialization -----------------------------------------------------

    @abc.abstractmethod
    def element_to_json(self, g):
        ...

    @abc.abstractmethod
    def element_from_json(self, data):
        ...

    def describe(self):
        return {"model": self.name, "degree": self.degree}

    def __repr__(self):
        return f"<{type(self).__name__} {self.describe()!r}>"


def take(iterable, n):
    return list(itertools.islice(iterable, n))


class LazyEmbedding:
    """Bijection between a model's own vertex objects and tree addresses.

    The model supplies the root object, a canonical neighbor ordering,
    and a parent function. Colors are assigned on demand: the root gets
    its neighbors in canonical order; elsewhere the edge to the parent
    reuses the inward color and the remaining neighbors take the
    remaining colors in ascending order. Objects must be hashable.
    """

    def __init__(self, degree, root_obj, ordered_neighbors, parent_of):
        self.degree = degree
        self.root_obj = root_obj
        self._ordered_neighbors = ordered_neighbors
        self._parent_of = parent_of
        from ..tree_core import ROOT

        self._addr_of = {root_obj: ROOT}
        self._obj_of = {ROOT: root_obj}
        self._charts = {}

    def chart(self, obj):
        """color -> neighbor object, built lazily."""
        got = self._charts.get(obj)
        if got is not None:
            return got
        nbrs = list(self._ordered_neighbors(obj))
        if len(nbrs) != self.degree or len(set(nbrs)) != self.degree:
            raise ValidationError(
                f"neighbor list of {obj!r} is not {self.degree} distinct vertices"
            )
        addr = self.addr_of(obj)
        if not addr.word:
            chart = dict(enumerate(nbrs))
        else:
            parent = self._parent_of(obj)
            if parent not in nbrs:
                raise ValidationError(f"parent of {obj!r} missing from its neighbors")
            inward = addr.word[-1]
            chart = {inward: parent}
            rest = [x for x in nbrs if x != parent]
            free = [c for c in range(self.degree) if c != inward]
            chart.update(zip(free, rest))
        self._charts[obj] = chart
        return chart

    def addr_of(self, obj):
        got = self._addr_of.get(obj)
        if got is not None:
            return got
        chain = [obj]
        cur = obj
        while cur not in self._addr_of:
            cur = self._parent_of(cur)
            chain.append(cur)
        # descend from the first known ancestor, assigning colors
        for parent, child in zip(reversed(chain), list(reversed(chain))[1:]):
            chart = self.chart(parent)
            color = next(c for c, nb in chart.items() if nb == child)
            addr = self._addr_of[parent].step(color)
            self._addr_of[child] = addr
            self._obj_of[addr] = child
        return self._addr_of[obj]

    def obj_of(self, addr):
        got = self._obj_of.get(addr)
        if got is not None:
            return got
        cur_addr = None
        cur_obj = None
        # walk down from the deepest cached prefix
        from ..tree_core import VertexAddr

        for i in range(len(addr.word), -1, -1):
            prefix = VertexAddr(addr.word[:i])
            if prefix in self._obj_of:
                cur_addr, cur_obj = prefix, self._obj_of[prefix]
                break
        for color in addr.word[len(cur_addr.word) :]:
            cur_obj = self.chart(cur_obj)[color]
            cur_addr = cur_addr.step(color)
            self._addr_of[cur_obj] = cur_addr
            self._obj_of[cur_addr] = cur_obj
        return cur_obj
