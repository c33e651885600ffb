"""Finite groupoids, the functors between them, and compiled groupoid sites.

A groupoid is written as connected components joined by ``+``; each
component is ``n x G`` (``n`` isomorphic objects with vertex group ``G``)
or just ``G``.  Groups: ``1``, ``Z<k>``, ``K4``, ``S3``.  So ``Z2`` is the
one-object group, ``2 x 1`` the walking isomorphism and ``1 + 1`` the
discrete two-point groupoid.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

from ..errors import PreconditionError, SiteBudgetExceeded
from ..fincat import FinCat, pullback
from ..idtypes import FunctorialIdAssignment, IdAssignment, make_entry, slice_triangles
from ..lifting import MorClass
from .bundle import InstanceBundle

# ----------------------------------------------------------------- groups


def _cyclic(k):
    return [[(a + b) % k for b in range(k)] for a in range(k)]


def _klein():
    return [[a ^ b for b in range(4)] for a in range(4)]


def _s3():
    perms = list(itertools.permutations(range(3)))
    idx = {p: k for k, p in enumerate(perms)}
    return [[idx[tuple(p[q[i]] for i in range(3))] for q in perms] for p in perms]


def group_table(name: str) -> list:
    if name == "1":
        return [[0]]
    if name == "K4":
        return _klein()
    if name == "S3":
        return _s3()
    m = re.fullmatch(r"Z(\d+)", name)
    if m and int(m.group(1)) >= 1:
        return _cyclic(int(m.group(1)))
    raise PreconditionError(f"unknown group {name!r}; use 1, Z<k>, K4 or S3")


# -------------------------------------------------------------- groupoids

@dataclass(frozen=True, eq=False)
class Groupoid:
    """Explicit finite groupoid; ``comp[(g, f)]`` is ``g o f``."""

    name: str
    n_obj: int
    src: tuple
    dst: tuple
    ident: tuple
    comp: dict = field(repr=False)

    @property
    def n_mor(self) -> int:
        return len(self.src)

    @cached_property
    def inv(self) -> tuple:
        out = []
        for f in range(self.n_mor):
            a = self.ident[self.src[f]]
            out.append(next(g for g in self.out_of(self.dst[f]) if self.comp[(g, f)] == a))
        return tuple(out)

    @cached_property
    def _out(self) -> tuple:
        out = [[] for _ in range(self.n_obj)]
        for f in range(self.n_mor):
            out[self.src[f]].append(f)
        return tuple(tuple(o) for o in out)

    def out_of(self, x) -> tuple:
        return self._out[x]

    def hom(self, a, b) -> list:
        return [f for f in self._out[a] if self.dst[f] == b]

    @cached_property
    def components(self) -> tuple:
        """``(base, tree, vertex_group, generators)`` per component.

        ``tree[x]`` is an arrow ``base -> x``.
        """
        seen, out = set(), []
        for base in range(self.n_obj):
            if base in seen:
                continue
            tree = {base: self.ident[base]}
            for f in self._out[base]:
                tree.setdefault(self.dst[f], f)
            seen.update(tree)
            vertex = self.hom(base, base)
            gens, span = [], {self.ident[base]}
            for g in vertex:
                if g not in span:
                    gens.append(g)
                    span = _generate(self, span | {g}, gens)
            out.append((base, tree, tuple(vertex), tuple(gens)))
        return tuple(out)


def _generate(G, start, gens):
    span = set(start)
    frontier = list(span)
    while frontier:
        x = frontier.pop()
        for s in gens:
            y = G.comp[(x, s)]
            if y not in span:
                span.add(y)
                frontier.append(y)
    return span


def _explicit(name, objects, mors, compose) -> Groupoid:
    """``objects`` and ``mors`` are hashable labels; ``mors`` are ``(label, src, dst)``."""
    oi = {o: k for k, o in enumerate(objects)}
    mi = {m[0]: k for k, m in enumerate(mors)}
    src = tuple(oi[m[1]] for m in mors)
    dst = tuple(oi[m[2]] for m in mors)
    comp = {}
    for f, (fl, _, fd) in enumerate(mors):
        for g, (gl, gs, _) in enumerate(mors):
            if gs == fd:
                comp[(g, f)] = mi[compose(gl, fl)]
    ident = [None] * len(objects)
    for f in range(len(mors)):
        if src[f] == dst[f] and comp[(f, f)] == f:
            ident[src[f]] = f
    return Groupoid(name, len(objects), src, dst, tuple(ident), comp)


def parse_groupoid(spec: str) -> Groupoid:
    comps = []
    for part in spec.split("+"):
        part = part.strip()
        m = re.fullmatch(r"(?:(\d+)\s*x\s*)?(\S+)", part)
        if not m:
            raise PreconditionError(f"bad groupoid component {part!r}")
        comps.append((int(m.group(1) or 1), m.group(2), group_table(m.group(2))))
    objects, mors = [], []
    for c, (n, _, table) in enumerate(comps):
        objects += [(c, i) for i in range(n)]
        mors += [((c, a, b, g), (c, a), (c, b)) for a in range(n) for b in range(n)
                 for g in range(len(table))]

    def compose(gl, fl):
        c, b, d, h = gl
        _, a, _, g = fl
        return (c, a, d, comps[c][2][h][g])

    name = " + ".join(f"{n} x {g}" if n > 1 else g for n, g, _ in comps)
    return _explicit(name, objects, mors, compose)


# ---------------------------------------------------------------- functors

@dataclass(frozen=True)
class Functor:
    obj: tuple
    mor: tuple


def compose_functors(g: Functor, f: Functor) -> Functor:
    return Functor(tuple(g.obj[x] for x in f.obj), tuple(g.mor[m] for m in f.mor))


def identity_functor(G: Groupoid) -> Functor:
    return Functor(tuple(range(G.n_obj)), tuple(range(G.n_mor)))


def _group_homs(A: Groupoid, vertex, gens, B: Groupoid, y):
    """Homomorphisms from a vertex group of ``A`` to ``Aut_B(y)``."""
    auts = B.hom(y, y)
    base_id = A.ident[A.src[vertex[0]]]
    for images in itertools.product(auts, repeat=len(gens)):
        phi = {base_id: B.ident[y]}
        frontier = [base_id]
        ok = True
        while frontier and ok:
            x = frontier.pop()
            for s, t in zip(gens, images):
                h, v = A.comp[(x, s)], B.comp[(phi[x], t)]
                if h in phi:
                    ok = phi[h] == v
                    if not ok:
                        break
                else:
                    phi[h] = v
                    frontier.append(h)
        if ok and all(phi[A.comp[(g, h)]] == B.comp[(phi[g], phi[h])] for g in vertex for h in vertex):
            yield phi


def _component_options(A, comp, B):
    base, tree, vertex, gens = comp
    others = sorted(x for x in tree if x != base)
    for y in range(B.n_obj):
        homs = list(_group_homs(A, vertex, gens, B, y))
        for arrows in itertools.product(B.out_of(y), repeat=len(others)):
            for phi in homs:
                yield y, phi, dict(zip(others, arrows))


def count_functors(A: Groupoid, B: Groupoid) -> int:
    total = 1
    for base, tree, vertex, gens in A.components:
        n = 0
        for y in range(B.n_obj):
            homs = sum(1 for _ in _group_homs(A, vertex, gens, B, y))
            n += homs * len(B.out_of(y)) ** (len(tree) - 1)
        total *= n
    return total


def functors(A: Groupoid, B: Groupoid):
    """All functors ``A -> B`` in a fixed deterministic order."""
    per_comp = [list(_component_options(A, c, B)) for c in A.components]
    for choice in itertools.product(*per_comp):
        obj = [None] * A.n_obj
        mor = [None] * A.n_mor
        for (base, tree, _, _), (y, phi, arrows) in zip(A.components, choice):
            img = {base: B.ident[y], **arrows}
            for x, t in img.items():
                obj[x] = B.dst[t]
            for x in tree:
                for m in A.out_of(x):
                    b = A.dst[m]
                    core = A.comp[(A.inv[tree[b]], A.comp[(m, tree[x])])]
                    mor[m] = B.comp[(B.comp[(img[b], phi[core])], B.inv[img[x]])]
        yield Functor(tuple(obj), tuple(mor))


def is_isofibration(A: Groupoid, B: Groupoid, F: Functor) -> bool:
    for a in range(A.n_obj):
        images = {F.mor[m] for m in A.out_of(a)}
        if any(beta not in images for beta in B.out_of(F.obj[a])):
            return False
    return True


def find_iso(A: Groupoid, B: Groupoid) -> Optional[Functor]:
    if (A.n_obj, A.n_mor) != (B.n_obj, B.n_mor):
        return None
    for F in functors(A, B):
        if len(set(F.mor)) == A.n_mor:
            return F
    return None


def invert(A: Groupoid, B: Groupoid, F: Functor) -> Functor:
    obj = [0] * B.n_obj
    mor = [0] * B.n_mor
    for x, y in enumerate(F.obj):
        obj[y] = x
    for m, n in enumerate(F.mor):
        mor[n] = m
    return Functor(tuple(obj), tuple(mor))


# ------------------------------------------------------------ constructions

def strict_pullback(A, B, C, F: Functor, G: Functor, name=None):
    """``(P, proj_A, proj_B)`` for ``A --F--> C <--G-- B``."""
    objects = [(a, b) for a in range(A.n_obj) for b in range(B.n_obj) if F.obj[a] == G.obj[b]]
    mors = [((f, g), (A.src[f], B.src[g]), (A.dst[f], B.dst[g]))
            for f in range(A.n_mor) for g in range(B.n_mor) if F.mor[f] == G.mor[g]]
    P = _explicit(name or f"({A.name}) x ({B.name})", objects, mors,
                  lambda gl, fl: (A.comp[(gl[0], fl[0])], B.comp[(gl[1], fl[1])]))
    pa = Functor(tuple(o[0] for o in objects), tuple(m[0][0] for m in mors))
    pb = Functor(tuple(o[1] for o in objects), tuple(m[0][1] for m in mors))
    return P, pa, pb


def _arrow_parts(X: Groupoid, Y: Groupoid, d: Functor):
    objects = [a for a in range(X.n_mor) if d.mor[a] == Y.ident[d.obj[X.src[a]]]]
    mors = []
    for a in objects:
        for b in objects:
            for u in X.hom(X.src[a], X.src[b]):
                for v in X.hom(X.dst[a], X.dst[b]):
                    if X.comp[(v, a)] == X.comp[(b, u)] and d.mor[u] == d.mor[v]:
                        mors.append(((a, b, u, v), a, b))
    return objects, mors


def arrow_groupoid(X: Groupoid, Y: Groupoid, d: Functor, name=None):
    """Fibrewise arrows of ``d`` with ``(r, source, target)``."""
    objects, mors = _arrow_parts(X, Y, d)
    P = _explicit(name or f"Arr({X.name})", objects, mors,
                  lambda gl, fl: (fl[0], gl[1], X.comp[(gl[2], fl[2])], X.comp[(gl[3], fl[3])]))
    oi = {o: k for k, o in enumerate(objects)}
    mi = {m[0]: k for k, m in enumerate(mors)}
    r = Functor(tuple(oi[X.ident[x]] for x in range(X.n_obj)),
                tuple(mi[(X.ident[X.src[u]], X.ident[X.dst[u]], u, u)] for u in range(X.n_mor)))
    s = Functor(tuple(X.src[a] for a in objects), tuple(m[0][2] for m in mors))
    t = Functor(tuple(X.dst[a] for a in objects), tuple(m[0][3] for m in mors))
    return P, r, s, t


def whisker(X, Y, d, X2, d2, m: Functor) -> Functor:
    """``Id(m)``: ``a |-> m(a)``, ``(u, v) |-> (m u, m v)`` on arrow groupoids."""
    obj1, mors1 = _arrow_parts(X, Y, d)
    obj2, mors2 = _arrow_parts(X2, Y, d2)
    oi = {o: k for k, o in enumerate(obj2)}
    mi = {lab: k for k, (lab, _, _) in enumerate(mors2)}
    return Functor(tuple(oi[m.mor[a]] for a in obj1),
                   tuple(mi[(m.mor[a], m.mor[b], m.mor[u], m.mor[v])] for (a, b, u, v), _, _ in mors1))


# ------------------------------------------------------------------- sites

@dataclass
class GroupoidSite:
    groupoids: list
    functors: list             # morphism index -> (src index, dst index, Functor)
    bundle: InstanceBundle

    def functor(self, f: int) -> Functor:
        return self.functors[f][2]


def _register(groupoids, G):
    """Index of an existing groupoid isomorphic to ``G`` and the iso ``G -> it``."""
    for k, H in enumerate(groupoids):
        iso = find_iso(G, H)
        if iso is not None:
            return k, iso
    return None, None


def _budget_check(groupoids, max_objects, max_morphisms):
    if len(groupoids) > max_objects:
        raise SiteBudgetExceeded(f"site closure needs more than {max_objects} groupoids")
    total = 0
    for A in groupoids:
        for B in groupoids:
            total += count_functors(A, B)
            if total > max_morphisms:
                raise SiteBudgetExceeded(
                    f"site closure needs more than {max_morphisms} functors "
                    f"({len(groupoids)} groupoids so far)")


def _compile(groupoids, name):
    mors, table = [], []
    for i, A in enumerate(groupoids):
        for j, B in enumerate(groupoids):
            for k, F in enumerate(functors(A, B)):
                mors.append((f"F{i}_{j}_{k}", f"G{i}", f"G{j}"))
                table.append((i, j, F))
    key = {(i, j, F.mor): n for n, (i, j, F) in enumerate(table)}
    identity = {}
    comp = {}
    for n, (i, j, F) in enumerate(table):
        if i == j and F == identity_functor(groupoids[i]):
            identity[f"G{i}"] = mors[n][0]
        for n2, (j2, k2, G) in enumerate(table):
            if j2 == j:
                comp[(mors[n2][0], mors[n][0])] = mors[key[(i, k2, compose_functors(G, F).mor)]][0]
    cat = FinCat.build(name, [f"G{i}" for i in range(len(groupoids))], mors, identity, comp)
    return cat, table, key


def gen_groupoid_site(specs, close: str = "full", max_objects: int = 16,
                      max_morphisms: int = 512, name: str = "groupoid-site") -> GroupoidSite:
    """Compile the full subcategory of groupoids on ``specs`` (plus the terminal).

    ``close``: ``"full"`` closes under pullbacks of isofibrations and fibrewise
    arrow groupoids; ``"once"`` adds one round of fibre squares and arrow
    groupoids; ``"none"`` adds nothing.
    """
    if close not in ("full", "once", "none"):
        raise PreconditionError("close must be full, once or none")
    groupoids = []
    for spec in ["1", *specs]:
        G = parse_groupoid(spec)
        if _register(groupoids, G)[0] is None:
            groupoids.append(G)
    _budget_check(groupoids, max_objects, max_morphisms)
    rounds = 0
    while close != "none":
        added = False
        snapshot = list(groupoids)
        for i, A in enumerate(snapshot):
            for j, B in enumerate(snapshot):
                for d in functors(A, B):
                    if not is_isofibration(A, B, d):
                        continue
                    bases = [(k, C) for k, C in enumerate(snapshot) if close == "full" or k == i]
                    for k, C in bases:
                        for alpha in functors(C, B):
                            if close == "once" and alpha != d:
                                continue
                            P, _, _ = strict_pullback(A, C, B, d, alpha)
                            if _register(groupoids, P)[0] is None:
                                groupoids.append(P)
                                added = True
                                _budget_check(groupoids, max_objects, max_morphisms)
                    P, *_ = arrow_groupoid(A, B, d)
                    if _register(groupoids, P)[0] is None:
                        groupoids.append(P)
                        added = True
                        _budget_check(groupoids, max_objects, max_morphisms)
        rounds += 1
        if not added or close == "once":
            break
    return _site(groupoids, name, close)


def _site(groupoids, name, close):
    cat, table, key = _compile(groupoids, name)
    D = MorClass(n for n, (i, j, F) in enumerate(table)
                 if is_isofibration(groupoids[i], groupoids[j], F))
    ida = IdAssignment()
    paths = {}
    for d in D:
        i, j, F = table[d]
        X, Y = groupoids[i], groupoids[j]
        P, r, s, t = arrow_groupoid(X, Y, F)
        k, iso = _register(groupoids, P)
        pair = pullback(cat, d, d)
        if k is None or pair is None:
            continue
        back = invert(P, groupoids[k], iso)
        r_ = key[(i, k, compose_functors(iso, r).mor)]
        s_ = key[(k, i, compose_functors(s, back).mor)]
        t_ = key[(k, i, compose_functors(t, back).mor)]
        eps = pair.mediator.get((s_, t_))
        if eps is None:
            continue
        ida.entries[d] = make_entry(cat, d, k, r_, eps)
        paths[d] = (P, iso, back)
    action = {}
    for d, d2, m in slice_triangles(cat, list(ida.entries)):
        i, j, F = table[d]
        i2, _, F2 = table[d2]
        (P1, _, back1), (P2, iso2, _) = paths[d], paths[d2]
        w = whisker(groupoids[i], groupoids[j], F, groupoids[i2], F2, table[m][2])
        k1, k2 = int(cat.dst[ida[d].r]), int(cat.dst[ida[d2].r])
        action[(d, d2, m)] = key[(k1, k2, compose_functors(iso2, compose_functors(w, back1)).mor)]
    meta = {"family": "groupoid-site", "closure": close,
            "groupoids": [G.name for G in groupoids],
            "id_coverage": f"{len(ida)}/{len(D)}"}
    bundle = InstanceBundle(cat, D, ida, FunctorialIdAssignment(ida, action), None, meta)
    return GroupoidSite(groupoids, table, bundle)
