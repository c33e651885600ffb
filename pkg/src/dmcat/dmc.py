"""Display map category axioms, dependent sums and dependent products."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import PreconditionError
from .fincat import (FinCat, PullbackResult, is_iso, iter_composable, pullback,
                     terminal, terminals)
from .lifting import MorClass, left_complement, unliftable_square
from .parallel import sweep
from .report import Report


def check_dmc(cat: FinCat, D: Iterable[int]) -> Report:
    """Isos and maps into the terminal are display maps; display maps pull back."""
    D = MorClass(D)
    if terminal(cat) is None:
        raise PreconditionError(f"{cat.name} has no terminal object")
    nm = cat.mor_names
    rep = Report()
    bad = [f for f in range(cat.n_mor) if f not in D and is_iso(cat, f) is not None]
    for f in bad:
        rep.fail("dmc.isos", nm[f], "isomorphism is not a display map")
    if not bad:
        rep.ok_("dmc.isos", cat.name)
    bad = [int(f) for t in terminals(cat) for f in cat.into(t) if f not in D]
    for f in sorted(bad):
        rep.fail("dmc.terminal", nm[f], "map into the terminal is not a display map")
    if not bad:
        rep.ok_("dmc.terminal", cat.name)
    missing = unstable = 0
    for d in D:
        for a in cat.into(cat.dst[d]):
            pb = pullback(cat, d, a)
            if pb is None:
                missing += 1
                rep.fail("dmc.pullback-exists", f"{nm[d]} along {nm[a]}",
                         "no pullback", witnesses=(nm[d], nm[a]))
                continue
            for apex, _, p1 in pb.representatives():
                if p1 not in D:
                    unstable += 1
                    rep.fail("dmc.pullback-stable", f"{nm[d]} along {nm[a]}",
                             f"pulled back map {nm[p1]} is not a display map",
                             witnesses=(nm[p1],))
    if not missing:
        rep.ok_("dmc.pullback-exists", cat.name)
    if not unstable and not missing:
        rep.ok_("dmc.pullback-stable", cat.name)
    return rep


def check_sigma(cat: FinCat, D: Iterable[int]) -> Report:
    """Display maps are closed under composition."""
    D = MorClass(D)
    nm = cat.mor_names
    rep = Report()
    for f, g in iter_composable(cat, D):
        h = int(cat.comp[g, f])
        if h not in D:
            rep.fail("sigma.composition", f"{nm[g]}.{nm[f]}",
                     f"composite {nm[h]} is not a display map", witnesses=(nm[g], nm[f]))
    if rep.ok:
        rep.ok_("sigma.composition", cat.name)
    return rep


# ------------------------------------------------------------------- Pi

@dataclass(frozen=True, eq=False)
class PiResult:
    """A representing display map ``pi`` for ``y |-> C/X(f*y, g)``.

    ``ev`` is the universal element, a morphism ``f*pi -> W`` over ``X``
    where ``f*pi`` is ``pb.proj1``.  ``transpose_table[y]`` lists the pairs
    ``(m, ev o f*(m))`` for every ``m`` in ``C/Y(y, pi)``.
    """

    cat: FinCat = field(repr=False)
    f: int
    g: int
    pi: int
    ev: int
    pb: PullbackResult = field(repr=False)
    transpose_table: dict = field(repr=False)

    def transpose(self, y: int, m: int) -> int:
        for mm, w in self.transpose_table[y]:
            if mm == m:
                return w
        raise KeyError((y, m))

    def untranspose(self, y: int, w: int) -> int:
        for m, ww in self.transpose_table[y]:
            if ww == w:
                return m
        raise KeyError((y, w))


def pullback_along(cat: FinCat, y: int, f: int) -> PullbackResult:
    """Canonical ``f*y``: the pullback of ``y`` along ``f``; ``f*y`` is ``proj1``."""
    pb = pullback(cat, y, f)
    if pb is None:
        raise PreconditionError(
            f"no pullback of {cat.mname(y)} along {cat.mname(f)}")
    return pb


def universal_element_table(cat: FinCat, f: int, g: int, p: int, ev: int) -> Optional[dict]:
    """Transpose table if ``m |-> ev o f*(m)`` is bijective for every ``y``."""
    comp = cat.comp
    pb_p = pullback_along(cat, p, f)
    if comp[g, ev] != pb_p.proj1:
        return None
    W = cat.src[g]
    table = {}
    for y in cat.into(cat.dst[f]):
        y = int(y)
        pby = pullback_along(cat, y, f)
        targets = sorted(int(w) for w in cat.hom(pby.apex, W) if comp[g, w] == pby.proj1)
        images = []
        for m in cat.hom(cat.src[y], cat.src[p]):
            if comp[p, m] != y:
                continue
            fm = pb_p.mediate(int(comp[m, pby.proj0]), pby.proj1)
            images.append((int(m), int(comp[ev, fm])))
        if sorted(w for _, w in images) != targets:
            return None
        table[y] = tuple(images)
    return table


def find_pi(cat: FinCat, D: Iterable[int], f: int, g: int) -> Optional[PiResult]:
    """Least-index display map ``pi`` into ``dst(f)`` with a universal element."""
    D = MorClass(D)
    f, g = int(f), int(g)
    if cat.dst[g] != cat.src[f]:
        raise PreconditionError("find_pi needs dst(g) == src(f)")
    if f not in D or g not in D:
        raise PreconditionError("find_pi needs f and g to be display maps")
    Y, W = cat.dst[f], cat.src[g]
    for p in D:
        if cat.dst[p] != Y:
            continue
        pb_p = pullback_along(cat, p, f)
        for ev in cat.hom(pb_p.apex, W):
            if cat.comp[g, ev] != pb_p.proj1:
                continue
            table = universal_element_table(cat, f, g, p, int(ev))
            if table is not None:
                return PiResult(cat, f, g, int(p), int(ev), pb_p, table)
    return None


def pi_comparison_iso(cat: FinCat, a: PiResult, b: PiResult) -> int:
    """The iso ``a.pi -> b.pi`` over the base matching the universal elements."""
    phi = b.untranspose(a.pi, a.ev)
    psi = a.untranspose(b.pi, b.ev)
    if cat.comp[psi, phi] != cat.ident[cat.src[a.pi]] or \
            cat.comp[phi, psi] != cat.ident[cat.src[b.pi]]:
        raise PreconditionError("Pi objects are not isomorphic")
    return phi


def check_pi(cat: FinCat, D: Iterable[int], jobs: int = 1) -> Report:
    """Run :func:`find_pi` on every composable pair of display maps.

    Witnesses are kept in ``report.data["pi"]`` keyed by ``(f, g)``.
    """
    D = MorClass(D)
    nm = cat.mor_names
    pairs = [(f, g) for g, f in iter_composable(cat, D)]
    results = sweep(lambda fg: find_pi(cat, D, *fg), pairs, jobs)
    rep = Report()
    table = {}
    for (f, g), res in zip(pairs, results):
        target = f"Pi({nm[f]}, {nm[g]})"
        if res is None:
            rep.fail("pi.exists", target, "no representing display map")
        else:
            table[(f, g)] = res
            rep.ok_("pi.exists", target, f"pi = {nm[res.pi]}")
    rep.data["pi"] = table
    return rep


def check_llp_pullback_stable(cat: FinCat, D: Iterable[int]):
    """Is the left class stable under pullback along display maps?

    Returns ``(True, None)`` or ``(False, witness)`` where the witness is
    ``(l, d, pulled_back, square)``.
    """
    D = MorClass(D)
    left = left_complement(cat, D)
    for l in left:
        for d in D:
            if cat.dst[d] != cat.dst[l]:
                continue
            pb = pullback(cat, d, l)
            if pb is None:
                raise PreconditionError(
                    f"no pullback of display map {cat.mname(d)} along {cat.mname(l)}")
            if pb.proj0 not in left:
                sq = None
                for e in D:
                    sq = unliftable_square(cat, pb.proj0, e)
                    if sq is not None:
                        break
                return False, (l, d, pb.proj0, sq)
    return True, None
