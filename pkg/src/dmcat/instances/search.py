"""Bounded search for a display map category whose right class exceeds D.

Candidates, in shard order:

1. finite lattices (meet-semilattices with top), up to isomorphism;
2. inflated preorders: such a lattice with some elements replaced by
   cliques of isomorphic copies;
3. a short catalogue of other small categories (walking shapes and the
   Karoubi envelope of the walking idempotent).

For each candidate every class D that contains the isos and maps into the
terminal and is closed under composition and pullback is enumerated by
backtracking.  Survivors go through Id-type search, functorial Id-type
search, and finally the right-class comparison.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Optional

from ..cauchy import karoubi_envelope
from ..dmc import check_dmc, check_sigma
from ..fincat import FinCat, isos, pullback, terminal, terminals
from ..idtypes import search_functorial_id, search_id
from ..lifting import MorClass, dbar
from ..parallel import sweep
from .bundle import InstanceBundle
from .heyting import meet, poset_category
from .walking import SHAPES, gen_walking


@dataclass
class SearchStats:
    candidates: int = 0
    classes: int = 0
    dmc_classes: int = 0
    with_id: int = 0
    with_functorial_id: int = 0
    elapsed: float = 0.0
    per_family: dict = field(default_factory=dict)

    def summary(self) -> str:
        fam = ", ".join(f"{k}={v}" for k, v in sorted(self.per_family.items()))
        return (f"{self.candidates} categories ({fam}); {self.classes} closed classes, "
                f"{self.dmc_classes} display map categories, {self.with_id} with Id-types, "
                f"{self.with_functorial_id} functorial; {self.elapsed:.1f}s")


# ------------------------------------------------------------ candidates

def _posets(n):
    """Naturally labelled posets on ``range(n)`` as sets of strict pairs."""
    if n == 0:
        yield frozenset()
        return
    for rel in _posets(n - 1):
        below = {y: {x for x, z in rel if z == y} for y in range(n - 1)}
        for k in range(n):
            for down in itertools.combinations(range(n - 1), k):
                s = set(down)
                if all(below[y] <= s for y in s):
                    yield rel | {(x, n - 1) for x in s}


def _canon(n, rel):
    return min(tuple(sorted((p[x], p[y]) for x, y in rel)) for p in itertools.permutations(range(n)))


def lattices(max_n):
    """Lattices with at most ``max_n`` elements, one per isomorphism class."""
    out, seen = [], set()
    for n in range(1, max_n + 1):
        for rel in _posets(n):
            els = list(range(n))
            leq = {(x, x) for x in els} | set(rel)
            if not any(all((x, t) in leq for x in els) for t in els):
                continue
            if any(meet(els, leq, x, y) is None for x, y in itertools.combinations(els, 2)):
                continue
            key = (n, _canon(n, rel))
            if key not in seen:
                seen.add(key)
                out.append((els, leq))
    return out


def inflated_preorder(els, leq, mult, name) -> FinCat:
    objs = [f"{x}.{i}" for x in els for i in range(mult[x])]
    base = {f"{x}.{i}": x for x in els for i in range(mult[x])}
    pairs = [(a, b) for a in objs for b in objs if (base[a], base[b]) in leq]
    mors = [(f"{a}<={b}", a, b) for a, b in pairs]
    comp = {(f"{b}<={c}", f"{a}<={b}"): f"{a}<={c}"
            for a, b in pairs for b2, c in pairs if b == b2}
    return FinCat.build(name, objs, mors, {a: f"{a}<={a}" for a in objs}, comp)


def candidates(max_objects, max_morphisms):
    """``(family, FinCat)`` in shard order, within the bounds."""
    lats = lattices(max_objects)
    for k, (els, leq) in enumerate(lats):
        if len(leq) <= max_morphisms:
            yield "lattice", poset_category([str(x) for x in els],
                                            {(str(a), str(b)) for a, b in leq}, f"lattice-{k}")
    for k, (els, leq) in enumerate(lats):
        for mult in itertools.product(range(1, max_objects + 1), repeat=len(els)):
            if max(mult) < 2 or sum(mult) > max_objects:
                continue
            m = dict(zip(els, mult))
            if sum(m[a] * m[b] for a, b in leq) > max_morphisms:
                continue
            yield "inflated", inflated_preorder(els, leq, m, f"inflated-{k}-{''.join(map(str, mult))}")
    others = [gen_walking(s) for s in SHAPES] + [karoubi_envelope(gen_walking("idempotent"))[0]]
    for cat in others:
        if cat.n_obj <= max_objects and cat.n_mor <= max_morphisms:
            yield "catalogue", cat


# -------------------------------------------------------------- D classes

def _closure(cat, S, forced):
    """Least class over ``S | forced`` closed under composition and pullback,
    or ``None`` when some needed pullback is missing."""
    comp = cat.comp
    cls = set(S) | forced
    frontier = list(cls)
    while frontier:
        d = frontier.pop()
        new = []
        for a in cat.into(cat.dst[d]):
            pb = pullback(cat, d, int(a))
            if pb is None:
                return None
            new += [p1 for _, _, p1 in pb.representatives()]
        for e in list(cls):
            for h in (comp[e, d], comp[d, e]):
                if h >= 0:
                    new.append(int(h))
        for h in new:
            if h not in cls:
                cls.add(h)
                frontier.append(h)
    return frozenset(cls)


def closed_classes(cat: FinCat):
    """Every display-map class of ``cat``, each exactly once."""
    if terminal(cat) is None:
        return
    forced = set(isos(cat)) | {int(f) for t in terminals(cat) for f in cat.into(t)}
    base = _closure(cat, (), forced)
    if base is None:
        return
    free = [f for f in range(cat.n_mor) if f not in base]
    memo = {}

    def close(S):
        if S not in memo:
            memo[S] = _closure(cat, S, forced)
        return memo[S]

    def rec(i, cls, excluded):
        if i == len(free):
            yield cls
            return
        f = free[i]
        if f in cls:
            yield from rec(i + 1, cls, excluded)
            return
        yield from rec(i + 1, cls, excluded | {f})
        grown = close(cls | {f})
        if grown is not None and not (grown & excluded):
            yield from rec(i + 1, grown, excluded)

    yield from rec(0, base, frozenset())


# ------------------------------------------------------------------ search

def _examine(item):
    family, cat = item
    found, counts = None, [0, 0, 0, 0]
    for cls in closed_classes(cat):
        counts[0] += 1
        D = MorClass(cls)
        if not (check_dmc(cat, D).ok and check_sigma(cat, D).ok):
            continue
        counts[1] += 1
        ida = search_id(cat, D, check_pre=False)
        if ida is None:
            continue
        counts[2] += 1
        fida = search_functorial_id(cat, D, ida)
        if fida is None:
            continue
        counts[3] += 1
        if dbar(cat, D) != D:
            found = InstanceBundle(cat, D, ida, fida, None,
                                   {"family": family, "source": "search_nonclosed_instance"})
            break
    return family, found, counts


def search_nonclosed_instance(max_objects: int = 6, max_morphisms: int = 24,
                              jobs=None, stats: Optional[SearchStats] = None,
                              chunk: int = 32) -> Optional[InstanceBundle]:
    """First bundle (in shard order) with ``dbar(D) != D``, or ``None``."""
    stats = stats if stats is not None else SearchStats()
    t0 = time.perf_counter()
    stream = candidates(max_objects, max_morphisms)
    try:
        while True:
            batch = list(itertools.islice(stream, chunk))
            if not batch:
                return None
            for family, found, counts in sweep(_examine, batch, jobs):
                stats.candidates += 1
                stats.per_family[family] = stats.per_family.get(family, 0) + 1
                stats.classes += counts[0]
                stats.dmc_classes += counts[1]
                stats.with_id += counts[2]
                stats.with_functorial_id += counts[3]
                if found is not None:
                    return found
    finally:
        stats.elapsed = time.perf_counter() - t0
