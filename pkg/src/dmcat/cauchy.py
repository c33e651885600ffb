"""Idempotents, their splittings, and the Karoubi envelope."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import CertifiedRefutation, PreconditionError
from .fincat import FinCat, is_iso


@dataclass(frozen=True)
class Splitting:
    """``incl o retr == e`` and ``retr o incl == id``."""

    retract_obj: int
    incl: int
    retr: int


def is_idempotent(cat: FinCat, e: int) -> bool:
    return cat.src[e] == cat.dst[e] and cat.comp[e, e] == e


def idempotents(cat: FinCat) -> list:
    return [f for f in range(cat.n_mor) if is_idempotent(cat, f)]


def is_splitting(cat: FinCat, e: int, s: Splitting) -> bool:
    c = int(cat.src[e])
    return (cat.src[s.incl] == s.retract_obj and cat.dst[s.incl] == c
            and cat.src[s.retr] == c and cat.dst[s.retr] == s.retract_obj
            and cat.comp[s.incl, s.retr] == e
            and cat.comp[s.retr, s.incl] == cat.ident[s.retract_obj])


def splittings(cat: FinCat, e: int):
    """Every splitting of ``e``: objects ascending, then ``(i, r)`` ascending."""
    if not is_idempotent(cat, e):
        raise PreconditionError(f"{cat.mname(e)} is not idempotent")
    c = int(cat.src[e])
    comp = cat.comp
    for obj in range(cat.n_obj):
        for i in cat.hom(obj, c):
            for r in cat.hom(c, obj):
                if comp[i, r] == e and comp[r, i] == cat.ident[obj]:
                    yield Splitting(obj, int(i), int(r))


def split_idempotent(cat: FinCat, e: int) -> Optional[Splitting]:
    return next(splittings(cat, e), None)


def is_cauchy_complete(cat: FinCat):
    """``(True, None)`` or ``(False, e)`` for the least unsplit idempotent."""
    for e in idempotents(cat):
        if split_idempotent(cat, e) is None:
            return False, e
    return True, None


# ------------------------------------------------------------ coequalizers

def coequalizes(cat: FinCat, e: int, h: int) -> bool:
    return cat.src[h] == cat.src[e] and cat.comp[h, e] == h


def is_coequalizer(cat: FinCat, e: int, q: int) -> bool:
    """``q`` coequalizes ``(e, 1)`` and every other such map factors uniquely."""
    if not coequalizes(cat, e, q):
        return False
    comp = cat.comp
    for h in cat.out_of(cat.src[e]):
        if comp[h, e] != h:
            continue
        hits = [u for u in cat.hom(cat.dst[q], cat.dst[h]) if comp[u, q] == h]
        if len(hits) != 1:
            return False
    return True


def verify_splitting_coequalizer(cat: FinCat, e: int, s: Splitting) -> bool:
    if not is_splitting(cat, e, s):
        return False
    return is_coequalizer(cat, e, s.retr)


def coequalizers(cat: FinCat, e: int) -> list:
    return [int(q) for q in cat.out_of(cat.src[e]) if is_coequalizer(cat, e, int(q))]


def splitting_from_coequalizer(cat: FinCat, e: int, q: int) -> Splitting:
    """``e`` coequalizes ``(e, 1)``, so ``e = i o q``; then ``q o i = 1``."""
    if not is_coequalizer(cat, e, q):
        raise PreconditionError(f"{cat.mname(q)} is not a coequalizer of (e, 1)")
    hits = [int(i) for i in cat.hom(cat.dst[q], cat.src[e]) if cat.comp[i, q] == e]
    s = Splitting(int(cat.dst[q]), hits[0], int(q))
    if not is_splitting(cat, e, s):
        raise CertifiedRefutation("coequalizer-splitting",
                                  f"coequalizer {cat.mname(q)} does not split {cat.mname(e)}")
    return s


# ---------------------------------------------------------------- squares

def split_square(cat: FinCat, e: int, f: int, c: int, se: Splitting, sf: Splitting) -> int:
    """The unique ``u: R_e -> R_f`` with ``u r_e = r_f c`` and ``i_f u = c i_e``.

    It is ``r_f o c o i_e``; an iso whenever ``c`` is.
    """
    comp = cat.comp
    if not (is_idempotent(cat, e) and is_idempotent(cat, f)):
        raise PreconditionError("split_square needs two idempotents")
    if cat.src[c] != cat.src[e] or cat.dst[c] != cat.src[f] or comp[c, e] != comp[f, c]:
        raise PreconditionError("c does not commute with the idempotents")
    if not (is_splitting(cat, e, se) and is_splitting(cat, f, sf)):
        raise PreconditionError("split_square needs splittings of both idempotents")
    u = cat.compose(sf.retr, c, se.incl)
    want_top, want_bot = comp[sf.retr, c], comp[c, se.incl]
    hits = [int(v) for v in cat.hom(se.retract_obj, sf.retract_obj)
            if comp[v, se.retr] == want_top and comp[sf.incl, v] == want_bot]
    if hits != [u]:
        raise CertifiedRefutation("split-square", f"induced map not unique: {hits}")
    if is_iso(cat, c) is not None and is_iso(cat, u) is None:
        raise CertifiedRefutation("split-square", "c is an iso but the induced map is not")
    return u


def splitting_comparison_iso(cat: FinCat, e: int, s1: Splitting, s2: Splitting) -> int:
    """The unique iso ``R1 -> R2`` commuting with both splittings."""
    comp = cat.comp
    hits = [int(p) for p in cat.hom(s1.retract_obj, s2.retract_obj)
            if comp[s2.incl, p] == s1.incl and comp[p, s1.retr] == s2.retr
            and is_iso(cat, int(p)) is not None]
    if len(hits) != 1:
        raise CertifiedRefutation("splitting-comparison",
                                  f"{len(hits)} comparison isos between splittings of {cat.mname(e)}")
    return hits[0]


# ---------------------------------------------------------------- envelope

@dataclass(frozen=True)
class Embedding:
    """``X |-> (X, 1)``; ``obj[x]`` and ``mor[m]`` are indices in the envelope."""

    obj: tuple
    mor: tuple


def karoubi_envelope(cat: FinCat):
    """Objects ``(X, e)``, morphisms ``m: X -> Y`` with ``e' m e = m``."""
    comp = cat.comp
    on, mn = cat.objects, cat.mor_names
    objs = [(int(cat.src[e]), e) for e in idempotents(cat)]
    oname = {p: f"({on[p[0]]},{mn[p[1]]})" for p in objs}
    mors, mkey = [], {}
    for a in objs:
        for b in objs:
            for m in cat.hom(a[0], b[0]):
                if comp[comp[b[1], m], a[1]] == m:
                    name = f"{mn[m]}:{oname[a]}->{oname[b]}"
                    mkey[(a, b, int(m))] = name
                    mors.append((name, oname[a], oname[b]))
    identity = {oname[a]: mkey[(a, a, a[1])] for a in objs}
    compt = {}
    for (a, b, m), nm1 in mkey.items():
        for (b2, c, m2), nm2 in mkey.items():
            if b2 == b:
                compt[(nm2, nm1)] = mkey[(a, c, int(comp[m2, m]))]
    env = FinCat.build(f"karoubi({cat.name})", [oname[a] for a in objs], mors, identity, compt)
    obj = tuple(env.obj(oname[(x, int(cat.ident[x]))]) for x in range(cat.n_obj))
    mor = tuple(env.mor(mkey[((int(cat.src[m]), int(cat.ident[cat.src[m]])),
                              (int(cat.dst[m]), int(cat.ident[cat.dst[m]])), m)])
                for m in range(cat.n_mor))
    return env, Embedding(obj, mor)
