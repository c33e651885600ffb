"""Finite presented categories as explicit composition tables.

Objects and morphisms are plain integer indices into the tables of a
:class:`FinCat`.  Every search in this package scans candidates in
ascending index order and returns the first hit, so results are
reproducible bit for bit.
"""
from __future__ import annotations

import contextlib
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional

import numpy as np

from . import kernels
from .errors import PreconditionError, SizeLimitError
from .report import Report


@dataclass
class Limits:
    max_objects: int = 64
    max_morphisms: int = 512


LIMITS = Limits()


@contextlib.contextmanager
def limits(max_objects=None, max_morphisms=None):
    """Temporarily raise (or lower) the table size limits."""
    old = (LIMITS.max_objects, LIMITS.max_morphisms)
    if max_objects is not None:
        LIMITS.max_objects = max_objects
    if max_morphisms is not None:
        LIMITS.max_morphisms = max_morphisms
    try:
        yield LIMITS
    finally:
        LIMITS.max_objects, LIMITS.max_morphisms = old


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.int64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FinCat:
    """A finite category given by its full composition table.

    ``comp[g, f]`` holds the index of ``g o f`` when ``dst(f) == src(g)``
    and -1 otherwise.  Instances are never mutated after construction;
    derived data is memoised in ``memo``.
    """

    name: str
    objects: tuple
    mor_names: tuple
    src: np.ndarray
    dst: np.ndarray
    ident: np.ndarray
    comp: np.ndarray
    memo: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        n, m = len(self.objects), len(self.mor_names)
        if n > LIMITS.max_objects or m > LIMITS.max_morphisms:
            raise SizeLimitError(
                f"{self.name}: {n} objects / {m} morphisms exceeds limit "
                f"{LIMITS.max_objects}/{LIMITS.max_morphisms}")
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "mor_names", tuple(self.mor_names))
        for attr in ("src", "dst", "ident", "comp"):
            object.__setattr__(self, attr, _frozen(getattr(self, attr)))
        if self.comp.shape != (m, m):
            raise ValueError("composition table must be square over morphisms")

    @classmethod
    def build(cls, name, objects, morphisms, identity, comp):
        """Build from names.

        ``morphisms`` is a list of ``(name, src_name, dst_name)``,
        ``identity`` maps object name to morphism name and ``comp`` maps
        ``(g, f)`` name pairs to the name of ``g o f``.
        """
        objects = list(objects)
        oi = {o: k for k, o in enumerate(objects)}
        names = [m[0] for m in morphisms]
        mi = {nm: k for k, nm in enumerate(names)}
        src = [oi[m[1]] for m in morphisms]
        dst = [oi[m[2]] for m in morphisms]
        ident = [mi[identity[o]] for o in objects]
        table = np.full((len(names), len(names)), -1, dtype=np.int64)
        for (g, f), h in comp.items():
            table[mi[g], mi[f]] = mi[h]
        return cls(name, tuple(objects), tuple(names), src, dst, ident, table)

    # -- sizes and lookups

    @property
    def n_obj(self) -> int:
        return len(self.objects)

    @property
    def n_mor(self) -> int:
        return len(self.mor_names)

    @cached_property
    def _obj_index(self):
        return {o: k for k, o in enumerate(self.objects)}

    @cached_property
    def _mor_index(self):
        return {nm: k for k, nm in enumerate(self.mor_names)}

    def obj(self, name) -> int:
        return self._obj_index[name]

    def mor(self, name) -> int:
        return self._mor_index[name]

    def mname(self, f) -> str:
        return self.mor_names[f]

    def oname(self, x) -> str:
        return self.objects[x]

    @cached_property
    def hom_ptr(self) -> np.ndarray:
        keys = self.src * self.n_obj + self.dst
        ptr = np.searchsorted(np.sort(keys), np.arange(self.n_obj ** 2 + 1))
        return _frozen(ptr)

    @cached_property
    def hom_idx(self) -> np.ndarray:
        keys = self.src * self.n_obj + self.dst
        return _frozen(np.argsort(keys, kind="stable"))

    def hom(self, a, b) -> np.ndarray:
        k = a * self.n_obj + b
        return self.hom_idx[self.hom_ptr[k]:self.hom_ptr[k + 1]]

    def into(self, y) -> np.ndarray:
        """All morphisms with codomain ``y``, ascending."""
        return np.flatnonzero(self.dst == y)

    def out_of(self, x) -> np.ndarray:
        return np.flatnonzero(self.src == x)

    def compose(self, *fs) -> int:
        """``compose(h, g, f) == h o g o f``."""
        out = int(fs[-1])
        for g in reversed(fs[:-1]):
            h = int(self.comp[g, out])
            if h < 0:
                raise PreconditionError(
                    f"{self.mor_names[g]} o {self.mor_names[out]} not composable")
            out = h
        return out

    def id(self, x) -> int:
        return int(self.ident[x])

    def is_identity(self, f) -> bool:
        return self.ident[self.src[f]] == f

    def endpoints(self, f) -> tuple:
        return int(self.src[f]), int(self.dst[f])

    def __repr__(self):
        return f"FinCat({self.name!r}, {self.n_obj} objects, {self.n_mor} morphisms)"


# ------------------------------------------------------------- validation

def validate_category(cat: FinCat) -> Report:
    """List every violated category law; an empty report means valid."""
    rep = Report()
    n, m = cat.n_obj, cat.n_mor
    src, dst, comp = cat.src, cat.dst, cat.comp
    nm = cat.mor_names
    for x in range(n):
        i = cat.ident[x]
        if not (0 <= i < m) or src[i] != x or dst[i] != x:
            rep.fail("identity", cat.objects[x], "identity is not an endomorphism of its object")
    composable = dst[:, None] == src[None, :]            # [f, g]: dst f == src g
    table = comp.T                                       # [f, g] -> g o f
    for f, g in np.argwhere(composable & (table < 0)):
        rep.fail("totality", f"{nm[g]}.{nm[f]}", "missing composite")
    for f, g in np.argwhere(~composable & (table >= 0)):
        rep.fail("typing", f"{nm[g]}.{nm[f]}", "composite given for non-composable pair")
    valid = composable & (table >= 0)
    bad_type = np.zeros_like(valid)
    fi, gi = np.nonzero(valid)
    h = table[fi, gi]
    wrong = (src[h] != src[fi]) | (dst[h] != dst[gi])
    bad_type[fi[wrong], gi[wrong]] = True
    for f, g in np.argwhere(bad_type):
        rep.fail("typing", f"{nm[g]}.{nm[f]}", f"composite {nm[table[f, g]]} has wrong endpoints")
    good = valid & ~bad_type
    for f in range(m):
        i_dst, i_src = cat.ident[dst[f]], cat.ident[src[f]]
        if 0 <= i_dst < m and comp[i_dst, f] != f:
            rep.fail("unit", f"{nm[i_dst]}.{nm[f]}", "left unit law fails")
        if 0 <= i_src < m and comp[f, i_src] != f:
            rep.fail("unit", f"{nm[f]}.{nm[i_src]}", "right unit law fails")
    for g in range(m):
        fs = np.flatnonzero(good[:, g])
        hs = np.flatnonzero(good[g, :])
        if fs.size == 0 or hs.size == 0:
            continue
        gf = table[fs, g]
        hg = table[g, hs]
        ok_l = good[gf[:, None], hs[None, :]]
        ok_r = good[fs[:, None], hg[None, :]]
        both = ok_l & ok_r
        left = np.where(both, table[gf[:, None], hs[None, :]], -1)
        right = np.where(both, table[fs[:, None], hg[None, :]], -1)
        for a, b in np.argwhere(both & (left != right)):
            rep.fail("associativity", f"{nm[hs[b]]}.{nm[g]}.{nm[fs[a]]}",
                     "h(gf) != (hg)f")
    rep.records.sort(key=lambda r: (r.check, r.target))
    return rep


# ---------------------------------------------------------- basic queries

def hom_set(cat: FinCat, a: int, b: int) -> list:
    return [int(x) for x in cat.hom(a, b)]


def is_iso(cat: FinCat, f: int) -> Optional[int]:
    """The two-sided inverse of ``f`` or ``None``."""
    a, b = cat.endpoints(f)
    for g in cat.hom(b, a):
        if cat.comp[g, f] == cat.ident[a] and cat.comp[f, g] == cat.ident[b]:
            return int(g)
    return None


def isos(cat: FinCat) -> list:
    key = "isos"
    if key not in cat.memo:
        cat.memo[key] = [f for f in range(cat.n_mor) if is_iso(cat, f) is not None]
    return cat.memo[key]


def terminals(cat: FinCat) -> list:
    out = []
    for t in range(cat.n_obj):
        if all(cat.hom(x, t).size == 1 for x in range(cat.n_obj)):
            out.append(t)
    return out


def terminal(cat: FinCat) -> Optional[int]:
    """Least-index terminal object, or ``None``."""
    ts = terminals(cat)
    return ts[0] if ts else None


def to_terminal(cat: FinCat, x: int) -> int:
    t = terminal(cat)
    if t is None:
        raise PreconditionError(f"{cat.name} has no terminal object")
    return int(cat.hom(x, t)[0])


# -------------------------------------------------------------- pullbacks

@dataclass(frozen=True, eq=False)
class PullbackResult:
    """A pullback square over the cospan ``f: A -> C <- B: g``.

    ``proj0`` goes to ``A`` (over ``f``) and ``proj1`` to ``B``.
    """

    cat: FinCat = field(repr=False)
    f: int
    g: int
    apex: int
    proj0: int
    proj1: int

    def mediate(self, q0: int, q1: int) -> int:
        """The unique ``m`` with ``proj0 m = q0`` and ``proj1 m = q1``."""
        cat = self.cat
        if cat.src[q0] != cat.src[q1] or cat.comp[self.f, q0] != cat.comp[self.g, q1] \
                or cat.comp[self.f, q0] < 0:
            raise PreconditionError(
                f"({cat.mname(q0)}, {cat.mname(q1)}) is not a cone over the cospan")
        hs = cat.hom(cat.src[q0], self.apex)
        hit = hs[(cat.comp[self.proj0, hs] == q0) & (cat.comp[self.proj1, hs] == q1)]
        if hit.size != 1:
            raise PreconditionError("cone has no unique mediator; not a pullback")
        return int(hit[0])

    @cached_property
    def mediator(self) -> dict:
        """Every cone ``(q0, q1)`` mapped to its unique mediator."""
        cat = self.cat
        out = {}
        for q in range(cat.n_obj):
            for m in cat.hom(q, self.apex):
                out[(int(cat.comp[self.proj0, m]), int(cat.comp[self.proj1, m]))] = int(m)
        return out

    def representatives(self) -> list:
        """All pullback squares over the same cospan: ``(P', proj0 phi, proj1 phi)``."""
        out = []
        cat = self.cat
        for p in range(cat.n_obj):
            for phi in cat.hom(p, self.apex):
                if is_iso(cat, int(phi)) is not None:
                    out.append((p, int(cat.comp[self.proj0, phi]),
                                int(cat.comp[self.proj1, phi])))
        return out


def pullback(cat: FinCat, f: int, g: int) -> Optional[PullbackResult]:
    """Least-index pullback of the cospan ``(f, g)``, checked exhaustively."""
    f, g = int(f), int(g)
    if cat.dst[f] != cat.dst[g]:
        raise PreconditionError("pullback needs a cospan: dst(f) != dst(g)")
    key = ("pb", f, g)
    if key not in cat.memo:
        hit = kernels.pullback_search(cat, f, g)
        cat.memo[key] = None if hit is None else PullbackResult(cat, f, g, *hit)
    return cat.memo[key]


def require_pullback(cat: FinCat, f: int, g: int) -> PullbackResult:
    pb = pullback(cat, f, g)
    if pb is None:
        raise PreconditionError(
            f"no pullback of ({cat.mname(f)}, {cat.mname(g)}) in {cat.name}")
    return pb


def is_pullback_square(cat, f, g, apex, p0, p1) -> bool:
    return kernels.is_pullback(cat, f, g, apex, p0, p1)


def pullback_comparison(cat: FinCat, a: PullbackResult, b: PullbackResult) -> int:
    """The canonical iso ``a.apex -> b.apex`` commuting with projections."""
    fwd = b.mediate(a.proj0, a.proj1)
    bwd = a.mediate(b.proj0, b.proj1)
    if cat.comp[bwd, fwd] != cat.ident[a.apex] or cat.comp[fwd, bwd] != cat.ident[b.apex]:
        raise PreconditionError("pullback apexes are not canonically isomorphic")
    return fwd


def product(cat: FinCat, x: int, y: int) -> PullbackResult:
    """Binary product as the pullback of ``x -> 1 <- y``."""
    return require_pullback(cat, to_terminal(cat, x), to_terminal(cat, y))


# ------------------------------------------------------------------ views

@dataclass(frozen=True, eq=False)
class SliceView:
    """A slice ``C/y`` compiled to its own :class:`FinCat`.

    Slice object ``k`` is the base morphism ``obj_mor[k]``; slice morphism
    ``j`` is the triangle with base morphism ``mor_base[j]``.
    """

    cat: FinCat
    base: FinCat = field(repr=False)
    over: int
    obj_mor: tuple
    mor_base: tuple

    def obj_of(self, base_mor: int) -> int:
        return self.obj_mor.index(int(base_mor))

    def mor_of(self, a: int, b: int, m: int) -> int:
        """Slice morphism for the triangle ``m: a -> b`` (a, b base morphisms)."""
        ia, ib = self.obj_of(a), self.obj_of(b)
        for j in self.cat.hom(ia, ib):
            if self.mor_base[j] == m:
                return int(j)
        raise KeyError((a, b, m))


def slice_category(cat: FinCat, y: int) -> SliceView:
    key = ("slice", int(y))
    if key in cat.memo:
        return cat.memo[key]
    objs = [int(a) for a in cat.into(y)]
    nm = cat.mor_names
    morphisms, base, lookup = [], [], {}
    for ia, a in enumerate(objs):
        for ib, b in enumerate(objs):
            for m in cat.hom(cat.src[a], cat.src[b]):
                if cat.comp[b, m] == a:
                    lookup[(ia, ib, int(m))] = len(morphisms)
                    morphisms.append((f"{nm[m]}:{nm[a]}->{nm[b]}", ia, ib))
                    base.append(int(m))
    k = len(morphisms)
    table = np.full((k, k), -1, dtype=np.int64)
    for j1, (_, a1, b1) in enumerate(morphisms):
        for j2, (_, a2, b2) in enumerate(morphisms):
            if b1 == a2:
                table[j2, j1] = lookup[(a1, b2, int(cat.comp[base[j2], base[j1]]))]
    ident = [lookup[(ia, ia, int(cat.ident[cat.src[a]]))] for ia, a in enumerate(objs)]
    sc = FinCat(f"{cat.name}/{cat.objects[y]}", tuple(nm[a] for a in objs),
                tuple(x[0] for x in morphisms), [x[1] for x in morphisms],
                [x[2] for x in morphisms], ident, table)
    view = SliceView(sc, cat, int(y), tuple(objs), tuple(base))
    cat.memo[key] = view
    return view


# conventional name, shadowing nothing in this module
slice = slice_category  # noqa: A001


@dataclass(frozen=True, eq=False)
class ArrowView:
    """The arrow category: objects are morphisms, morphisms commuting squares.

    ``squares[j] = (f, g, u, v)`` with ``g u = v f``.
    """

    cat: FinCat
    base: FinCat = field(repr=False)
    squares: tuple


def arrow_category(cat: FinCat) -> ArrowView:
    key = "arrow"
    if key in cat.memo:
        return cat.memo[key]
    nm = cat.mor_names
    sq, lookup = [], {}
    for f in range(cat.n_mor):
        for g in range(cat.n_mor):
            for u in cat.hom(cat.src[f], cat.src[g]):
                for v in cat.hom(cat.dst[f], cat.dst[g]):
                    if cat.comp[g, u] == cat.comp[v, f]:
                        lookup[(f, g, int(u), int(v))] = len(sq)
                        sq.append((f, g, int(u), int(v)))
    k = len(sq)
    table = np.full((k, k), -1, dtype=np.int64)
    by_src = {}
    for j, s in enumerate(sq):
        by_src.setdefault(s[0], []).append(j)
    for j1, (f, g, u, v) in enumerate(sq):
        for j2 in by_src.get(g, ()):
            _, h, u2, v2 = sq[j2]
            table[j2, j1] = lookup[(f, h, int(cat.comp[u2, u]), int(cat.comp[v2, v]))]
    ident = [lookup[(f, f, int(cat.ident[cat.src[f]]), int(cat.ident[cat.dst[f]]))]
             for f in range(cat.n_mor)]
    ac = FinCat(f"{cat.name}^->", tuple(nm), tuple(f"<{nm[u]},{nm[v]}>:{nm[f]}->{nm[g]}"
                                                   for f, g, u, v in sq),
                [s[0] for s in sq], [s[1] for s in sq], ident, table)
    view = ArrowView(ac, cat, tuple(sq))
    cat.memo[key] = view
    return view


# --------------------------------------------------------------- retracts

@dataclass(frozen=True)
class RetractData:
    """``retraction o inclusion = id``.

    In the arrow category both fields are ``(top, bottom)`` square pairs;
    in a slice over ``over`` they are single morphisms.
    """

    inclusion: object
    retraction: object
    over: Optional[int] = None


def find_retract(cat: FinCat, f: int, g: int, over: Optional[int] = None) -> Optional[RetractData]:
    """Least-index witness that ``f`` is a retract of ``g``."""
    comp, ident = cat.comp, cat.ident
    if over is not None:
        if cat.dst[f] != over or cat.dst[g] != over:
            raise PreconditionError("slice retracts need both morphisms into `over`")
        a, x = int(cat.src[f]), int(cat.src[g])
        for i in cat.hom(a, x):
            if comp[g, i] != f:
                continue
            for s in cat.hom(x, a):
                if comp[f, s] == g and comp[s, i] == ident[a]:
                    return RetractData(int(i), int(s), int(over))
        return None
    A, B = cat.endpoints(f)
    X, Y = cat.endpoints(g)
    for i0 in cat.hom(A, X):
        for i1 in cat.hom(B, Y):
            if comp[g, i0] != comp[i1, f]:
                continue
            for s0 in cat.hom(X, A):
                if comp[s0, i0] != ident[A]:
                    continue
                for s1 in cat.hom(Y, B):
                    if comp[s1, i1] == ident[B] and comp[f, s0] == comp[s1, g]:
                        return RetractData((int(i0), int(i1)), (int(s0), int(s1)))
    return None


def check_retract(cat: FinCat, f: int, g: int, rd: RetractData) -> bool:
    """Do the equations of ``rd`` exhibit ``f`` as a retract of ``g``?"""
    comp, ident = cat.comp, cat.ident
    if rd.over is not None:
        i, s = rd.inclusion, rd.retraction
        return (comp[g, i] == f and comp[f, s] == g
                and comp[s, i] == ident[cat.src[f]])
    (i0, i1), (s0, s1) = rd.inclusion, rd.retraction
    return (comp[g, i0] == comp[i1, f] >= 0 and comp[f, s0] == comp[s1, g] >= 0
            and comp[s0, i0] == ident[cat.src[f]] and comp[s1, i1] == ident[cat.dst[f]])


def iter_composable(cat: FinCat, ms: Iterable[int]):
    """Pairs ``(f, g)`` from ``ms`` with ``g o f`` defined, ascending."""
    ms = sorted(int(m) for m in ms)
    for f, g in itertools.product(ms, ms):
        if cat.dst[f] == cat.src[g]:
            yield f, g
