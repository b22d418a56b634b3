"""Small exact permutation-group utilities.

Permutations are tuples of images on 0..n-1. Nothing here claims an
isomorphism type; structure_fingerprint returns invariants only.
"""

from __future__ import annotations

from .errors import NotStabilized, TooLarge, ValidationError


def identity_perm(n):
    return tuple(range(n))


def compose_perm(p, q):
    """Apply q first, then p."""
    return tuple(p[q[i]] for i in range(len(p)))


def invert_perm(p):
    out = [0] * len(p)
    for i, img in enumerate(p):
        out[img] = i
    return tuple(out)


def perm_from_cycles(n, cycles):
    images = list(range(n))
    for cyc in cycles:
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            images[a] = b
    p = tuple(images)
    check_perm(p, n)
    return p


def check_perm(p, n):
    if len(p) != n or sorted(p) != list(range(n)):
        raise ValidationError(f"not a permutation of 0..{n - 1}: {p!r}")
    return p


def perm_order(p):
    k = 1
    q = p
    ident = identity_perm(len(p))
    while q != ident:
        q = compose_perm(p, q)
        k += 1
    return k


def mulclose(generators, mul=None, guard=10**6):
    """Closure under the product, breadth-first from the generators.

    Works for any hashable elements. In a finite setting the semigroup
    generated this way is the full group.
    """
    if mul is None:
        mul = compose_perm
    gens = list(dict.fromkeys(generators))
    els = dict.fromkeys(gens)
    frontier = gens
    while frontier:
        new = []
        for a in frontier:
            for b in gens:
                c = mul(a, b)
                if c not in els:
                    els[c] = None
                    new.append(c)
                    if guard is not None and len(els) > guard:
                        raise TooLarge(f"closure exceeded {guard} elements")
        frontier = new
    return tuple(els)


def closure_group(generators, n, guard=10**6):
    for p in generators:
        check_perm(p, n)
    els = mulclose(list(generators) + [identity_perm(n)], compose_perm, guard)
    return tuple(sorted(els))


def is_closed(perms):
    s = set(perms)
    return all(compose_perm(a, b) in s for a in s for b in s)


def is_abelian(perms):
    els = list(perms)
    return all(
        compose_perm(a, b) == compose_perm(b, a) for i, a in enumerate(els) for b in els[i + 1 :]
    )


def is_transitive(perms, n):
    if n == 0:
        return True
    seen = {0}
    frontier = [0]
    while frontier:
        x = frontier.pop()
        for p in perms:
            y = p[x]
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    return len(seen) == n


def structure_fingerprint(perms):
    """Invariants of a closed permutation set: order, abelianness,
    transitivity, and the multiset of element orders."""
    els = tuple(sorted(set(perms)))
    if not els:
        raise ValidationError("empty permutation set")
    n = len(els[0])
    if not is_closed(els):
        raise ValidationError("set is not closed under composition")
    return {
        "order": len(els),
        "abelian": is_abelian(els),
        "transitive": is_transitive(els, n),
        "element_orders": tuple(sorted(perm_order(p) for p in els)),
    }


def induced_perm_group(germs, points):
    """Permutations induced on an ordered point tuple by a set of germs."""
    points = list(points)
    index = {p: i for i, p in enumerate(points)}
    out = []
    for g in germs:
        images = [g.apply(p) for p in points]
        if set(images) != set(points):
            raise NotStabilized(f"germ does not stabilize the point set: {points!r}")
        out.append(tuple(index[img] for img in images))
    return tuple(sorted(set(out)))


def product_set_equal(left, right, whole, mul):
    """Is {a*b : a in left, b in right} equal to whole, with witnesses."""
    prod = {mul(a, b) for a in left for b in right}
    target = set(whole)
    missing = tuple(sorted(target - prod, key=repr))
    extra = tuple(sorted(prod - target, key=repr))
    return (not missing and not extra, missing, extra)
