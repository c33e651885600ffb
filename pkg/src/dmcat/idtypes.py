"""Identity types: factorizations of fibrewise diagonals and their variants.

For a display map ``f: X -> Y`` the fibre square ``X x_Y X`` is the
canonical pullback of ``(f, f)``; ``diag`` is the mediator of ``(1, 1)``
and ``f x f`` is ``f o proj0``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .dmc import check_dmc, check_llp_pullback_stable, check_sigma
from .errors import PreconditionError
from .fincat import FinCat, PullbackResult, pullback, require_pullback
from .lifting import MorClass, left_complement, unliftable_square
from .parallel import sweep
from .report import Report


@dataclass(frozen=True)
class IdEntry:
    """``r: X -> Id(f)``, ``eps: Id(f) -> X x_Y X`` with ``eps o r == diag``."""

    idobj: int
    r: int
    eps: int
    diag: int
    iota: int


@dataclass
class IdAssignment:
    entries: dict = field(default_factory=dict)

    def __getitem__(self, f) -> IdEntry:
        return self.entries[int(f)]

    def __contains__(self, f) -> bool:
        return int(f) in self.entries

    def __iter__(self):
        return iter(sorted(self.entries))

    def __len__(self):
        return len(self.entries)


@dataclass
class FunctorialIdAssignment:
    """Id-structure plus its action on morphisms of each ``D/Y``.

    ``action[(d, d2, m)]`` is ``Id(m): Id(d) -> Id(d2)`` for a triangle
    ``m: src(d) -> src(d2)`` with ``d2 o m == d``.
    """

    base: IdAssignment
    action: dict = field(default_factory=dict)


# ---------------------------------------------------------------- helpers

def fibre_square(cat: FinCat, f: int) -> PullbackResult:
    return require_pullback(cat, f, f)


def diagonal(cat: FinCat, f: int) -> int:
    pair = fibre_square(cat, f)
    x = cat.id(cat.src[f])
    return pair.mediate(x, x)


def make_entry(cat: FinCat, f: int, idobj: int, r: int, eps: int, iota: Optional[int] = None) -> IdEntry:
    """Fill in ``diag`` and (unless given) ``iota = (f x f) o eps``."""
    pair = fibre_square(cat, f)
    if iota is None:
        iota = int(cat.comp[cat.comp[f, pair.proj0], eps])
    return IdEntry(int(idobj), int(r), int(eps), diagonal(cat, f), int(iota))


def fibre_product_map(cat: FinCat, d: int, d2: int, m: int) -> int:
    """``m x m: X x_Y X -> X' x_Y X'`` for a triangle ``m: d -> d2``."""
    p, p2 = fibre_square(cat, d), fibre_square(cat, d2)
    return p2.mediate(int(cat.comp[m, p.proj0]), int(cat.comp[m, p.proj1]))


def slice_triangles(cat: FinCat, D: Iterable[int]) -> list:
    """Every morphism ``(d, d2, m)`` of every ``D/Y``, ascending."""
    D = sorted(MorClass(D))
    out = []
    for d in D:
        for d2 in D:
            if cat.dst[d] != cat.dst[d2]:
                continue
            for m in cat.hom(cat.src[d], cat.src[d2]):
                if cat.comp[d2, m] == d:
                    out.append((d, d2, int(m)))
    out.sort(key=lambda t: (int(cat.dst[t[0]]), t))
    return out


def trivial_id(cat: FinCat, D: Iterable[int]) -> FunctorialIdAssignment:
    """``Id(f) = X``, ``r = 1``, ``eps = diag``, ``Id(m) = m``.

    A valid structure whenever every fibrewise diagonal is a display map,
    e.g. in any preorder.
    """
    base = IdAssignment()
    for f in MorClass(D):
        diag = diagonal(cat, f)
        base.entries[f] = make_entry(cat, f, cat.src[f], cat.id(cat.src[f]), diag)
    action = {(d, d2, m): m for d, d2, m in slice_triangles(cat, D)}
    return FunctorialIdAssignment(base, action)


def _require_sigma(cat, D):
    if not (check_dmc(cat, D).ok and check_sigma(cat, D).ok):
        raise PreconditionError("Id-types need a display map category with Sigma-types")


def pulled_back_r(cat: FinCat, f: int, entry: IdEntry, alpha: int, i: int):
    """Pullback of ``r_f`` along ``alpha: A -> X`` over the leg ``pi_i eps_f``."""
    pair = fibre_square(cat, f)
    leg = int(cat.comp[pair.proj1 if i else pair.proj0, entry.eps])
    pb = pullback(cat, leg, alpha)
    if pb is None:
        raise PreconditionError(
            f"no pullback of {cat.mname(leg)} along {cat.mname(alpha)}")
    return pb, pb.mediate(int(cat.comp[entry.r, alpha]), cat.id(cat.src[alpha]))


def _entry_shape_failures(cat, f, entry, D):
    """Clauses (1) and (2) plus typing; returns a list of (check, detail)."""
    nm = cat.mor_names
    comp = cat.comp
    out = []
    pair = fibre_square(cat, f)
    if (cat.src[entry.r] != cat.src[f] or cat.dst[entry.r] != entry.idobj
            or cat.src[entry.eps] != entry.idobj or cat.dst[entry.eps] != pair.apex):
        out.append(("id.typing", "r or eps has the wrong endpoints"))
        return out
    if comp[entry.eps, entry.r] != entry.diag or entry.diag != diagonal(cat, f):
        out.append(("id.factorization", f"eps o r != diag ({nm[entry.eps]} o {nm[entry.r]})"))
    if entry.eps not in D:
        out.append(("id.eps-display", f"eps = {nm[entry.eps]} is not a display map"))
    if entry.iota != comp[comp[f, pair.proj0], entry.eps]:
        out.append(("id.iota", f"iota = {nm[entry.iota]} is not (f x f) o eps"))
    return out


def _clause3_failures(cat, f, entry, left, first_only=False):
    out = []
    for alpha in cat.into(cat.src[f]):
        for i in (0, 1):
            _, ar = pulled_back_r(cat, f, entry, int(alpha), i)
            if ar not in left:
                out.append((int(alpha), i, ar))
                if first_only:
                    return out
    return out


def check_id_factorization(cat: FinCat, D: Iterable[int], f: int, entry: IdEntry) -> Report:
    """Clauses (1) and (2) only, for a single display map; no preconditions."""
    rep = Report()
    for check, detail in _entry_shape_failures(cat, f, entry, MorClass(D)):
        rep.fail(check, cat.mname(f), detail)
    if rep.ok:
        rep.ok_("id.factorization", cat.mname(f))
    return rep


# ------------------------------------------------------------- verifiers

def verify_id(cat: FinCat, D: Iterable[int], ida: IdAssignment, check_pre=True, jobs=1) -> Report:
    """Paulin-Mohring Id-types, itemised per display map and per (alpha, i)."""
    D = MorClass(D)
    if check_pre:
        _require_sigma(cat, D)
    left = left_complement(cat, D)
    nm = cat.mor_names

    def one(f):
        rep = Report()
        if f not in ida:
            rep.fail("id.coverage", nm[f], "no Id-structure given")
            return rep
        entry = ida[f]
        shape = _entry_shape_failures(cat, f, entry, D)
        for check, detail in shape:
            rep.fail(check, nm[f], detail)
        if any(c == "id.typing" for c, _ in shape):
            return rep
        for alpha, i, ar in _clause3_failures(cat, f, entry, left):
            sq = _square_against(cat, ar, D)
            rep.fail("id.left-class", f"{nm[f]} alpha={nm[alpha]} i={i}",
                     f"pulled back r = {nm[ar]} lacks the left lifting property",
                     witnesses=sq.describe(cat) if sq else ())
        if rep.ok:
            rep.ok_("id.paulin-mohring", nm[f])
        return rep

    out = Report()
    for r in sweep(one, list(D), jobs):
        out.extend(r)
    return out


def _square_against(cat, f, D):
    for d in D:
        sq = unliftable_square(cat, f, d)
        if sq is not None:
            return sq
    return None


def verify_functorial_id(cat: FinCat, D: Iterable[int], fida: FunctorialIdAssignment,
                         check_pre=True) -> Report:
    """Naturality squares and functor laws on every ``D/Y``."""
    D = MorClass(D)
    if check_pre and not verify_id(cat, D, fida.base).ok:
        raise PreconditionError("functorial Id-types need a verified base structure")
    comp = cat.comp
    nm = cat.mor_names
    base = fida.base
    rep = Report()
    tri = slice_triangles(cat, D)
    act = fida.action
    for key in tri:
        d, d2, m = key
        target = f"{nm[m]}:{nm[d]}->{nm[d2]}"
        if key not in act:
            rep.fail("fid.coverage", target, "no action given")
            continue
        k = act[key]
        e1, e2 = base[d], base[d2]
        if cat.src[k] != e1.idobj or cat.dst[k] != e2.idobj:
            rep.fail("fid.typing", target, f"{nm[k]} is not Id(d) -> Id(d2)")
            continue
        if comp[k, e1.r] != comp[e2.r, m]:
            rep.fail("fid.natural-r", target, "Id(m) o r_d != r_d2 o m")
        if comp[e2.eps, k] != comp[fibre_product_map(cat, d, d2, m), e1.eps]:
            rep.fail("fid.natural-eps", target, "eps_d2 o Id(m) != (m x m) o eps_d")
        if d == d2 and cat.is_identity(m) and k != cat.id(e1.idobj):
            rep.fail("fid.identity", target, "Id(1) is not the identity")
    for (d, d2, m), (d2b, d3, m2) in _composable_triangles(tri):
        k1, k2 = act.get((d, d2, m)), act.get((d2, d3, m2))
        k3 = act.get((d, d3, int(comp[m2, m])))
        if None in (k1, k2, k3):
            continue
        if comp[k2, k1] != k3:
            rep.fail("fid.composition", f"{nm[m2]}.{nm[m]} over {nm[d]}->{nm[d3]}",
                     "Id(m2 o m) != Id(m2) o Id(m)")
    if rep.ok:
        rep.ok_("fid.functor", cat.name, f"{len(tri)} slice morphisms")
    return rep


def _composable_triangles(tri):
    by_src = {}
    for t in tri:
        by_src.setdefault(t[0], []).append(t)
    for t in tri:
        for u in by_src.get(t[1], ()):
            yield t, u


def verify_ml_id(cat: FinCat, D: Iterable[int], ida: IdAssignment, check_pre=True) -> Report:
    """Martin-Loef variant: ``sigma* r_d`` over ``iota_d`` is in the left class."""
    D = MorClass(D)
    if check_pre:
        _require_sigma(cat, D)
    rep, _ = _ml_sweep(cat, D, ida, param=False)
    return rep


def verify_param_ml_id(cat: FinCat, D: Iterable[int], ida: IdAssignment, check_pre=True) -> Report:
    """Parametrised Martin-Loef variant (includes the plain Martin-Loef clauses)."""
    D = MorClass(D)
    if check_pre:
        _require_sigma(cat, D)
    rep, _ = _ml_sweep(cat, D, ida, param=True)
    return rep


def ml_pulled_back_r(cat: FinCat, d: int, entry: IdEntry, sigma: int):
    """``(pb over iota, pb over d, sigma* r_d)``."""
    pb_i = pullback(cat, entry.iota, sigma)
    pb_a = pullback(cat, d, sigma)
    if pb_i is None or pb_a is None:
        raise PreconditionError(f"missing pullback along {cat.mname(sigma)}")
    s = pb_i.mediate(int(cat.comp[entry.r, pb_a.proj0]), pb_a.proj1)
    return pb_i, pb_a, s


def param_ml_instance(cat: FinCat, D: Iterable[int], ida: IdAssignment, d: int, sigma: int, theta: int) -> int:
    """``theta* (sigma* r_d)`` for one display map ``theta`` into ``sigma* Id(d)``."""
    D = MorClass(D)
    if theta not in D:
        raise PreconditionError(f"theta = {cat.mname(theta)} is not a display map")
    pb_i, _, s = ml_pulled_back_r(cat, d, ida[d], sigma)
    if cat.dst[theta] != pb_i.apex:
        raise PreconditionError("theta must land in sigma* Id(d)")
    pb = pullback(cat, theta, s)
    if pb is None:
        raise PreconditionError("missing pullback of sigma* r_d along theta")
    return pb.proj0


def _ml_sweep(cat, D, ida, param):
    left = left_complement(cat, D)
    nm = cat.mor_names
    comp = cat.comp
    rep = Report()
    for d in D:
        entry = ida[d]
        pair = fibre_square(cat, d)
        if entry.iota != comp[comp[d, pair.proj0], entry.eps]:
            rep.fail("ml.iota", nm[d], f"iota = {nm[entry.iota]} is not (d x d) o eps")
            continue
        if comp[entry.eps, entry.r] != entry.diag:
            rep.fail("ml.factorization", nm[d], "eps o r != diag")
            continue
        for sigma in cat.into(cat.dst[d]):
            pb_i, _, s = ml_pulled_back_r(cat, d, entry, int(sigma))
            tgt = f"{nm[d]} sigma={nm[sigma]}"
            if s not in left:
                rep.fail("ml.left-class", tgt, f"sigma* r = {nm[s]} lacks the left lifting property")
            if not param:
                continue
            for theta in D:
                if cat.dst[theta] != pb_i.apex:
                    continue
                pb = pullback(cat, theta, s)
                if pb is None:
                    raise PreconditionError(f"missing pullback along display map {nm[theta]}")
                if pb.proj0 not in left:
                    rep.fail("pml.left-class", f"{tgt} theta={nm[theta]}",
                             f"theta* sigma* r = {nm[pb.proj0]} lacks the left lifting property")
    if rep.ok:
        rep.ok_("pml.id" if param else "ml.id", cat.name)
    return rep, left


def crosscheck_id_variants(cat: FinCat, D: Iterable[int], ida: IdAssignment) -> Report:
    """Both implications between the parametrised Martin-Loef and Paulin-Mohring
    variants, observed on this instance; a violation is a refutation."""
    D = MorClass(D)
    _require_sigma(cat, D)
    for f in D:
        if f not in ida or _entry_shape_failures(cat, f, ida[f], D):
            raise PreconditionError("cross-check needs the factorization clauses to hold")
    pm = verify_id(cat, D, ida, check_pre=False).ok
    ml = verify_ml_id(cat, D, ida, check_pre=False).ok
    pml = verify_param_ml_id(cat, D, ida, check_pre=False).ok
    stable, _ = check_llp_pullback_stable(cat, D)
    rep = Report()
    rep.ok_("variants.observed", cat.name,
            f"paulin-mohring={pm} martin-loef={ml} parametrised={pml} left-stable={stable}")
    if pml and not pm:
        rep.fail("variants.param-implies-pm", cat.name,
                 "parametrised Martin-Loef holds but Paulin-Mohring fails", refutation=True)
    else:
        rep.ok_("variants.param-implies-pm", cat.name, "vacuous" if not pml else "")
    if pm and stable and not pml:
        rep.fail("variants.pm-stable-implies-param", cat.name,
                 "Paulin-Mohring and left stability hold but parametrised Martin-Loef fails",
                 refutation=True)
    else:
        rep.ok_("variants.pm-stable-implies-param", cat.name,
                "vacuous" if not (pm and stable) else "")
    return rep


# ---------------------------------------------------------------- search

def search_id(cat: FinCat, D: Iterable[int], log: Optional[list] = None,
              check_pre=True) -> Optional[IdAssignment]:
    """Least-index factorization per display map passing all three clauses."""
    D = MorClass(D)
    if check_pre:
        _require_sigma(cat, D)
    left = left_complement(cat, D)
    out = IdAssignment()
    comp = cat.comp
    for f in D:
        pair = pullback(cat, f, f)
        if pair is None:
            _log(log, f"{cat.mname(f)}: no fibre square")
            return None
        diag = diagonal(cat, f)
        found = None
        for obj in range(cat.n_obj):
            for r in cat.hom(cat.src[f], obj):
                for eps in cat.hom(obj, pair.apex):
                    if eps not in D or comp[eps, r] != diag:
                        continue
                    entry = make_entry(cat, f, obj, r, eps)
                    if _clause3_failures(cat, f, entry, left, first_only=True):
                        _log(log, f"{cat.mname(f)}: candidate r={cat.mname(r)} "
                                  f"eps={cat.mname(eps)} fails the left-class clause")
                        continue
                    found = entry
                    break
                if found:
                    break
            if found:
                break
        if found is None:
            _log(log, f"{cat.mname(f)}: no factorization of the diagonal qualifies")
            return None
        out.entries[f] = found
    return out


def _log(log, msg):
    if log is not None:
        log.append(msg)


def search_functorial_id(cat: FinCat, D: Iterable[int], ida: IdAssignment) -> Optional[FunctorialIdAssignment]:
    """Backtracking search for a strictly functorial action extending ``ida``."""
    D = MorClass(D)
    comp = cat.comp
    tri = slice_triangles(cat, D)
    domains = {}
    for key in tri:
        d, d2, m = key
        e1, e2 = ida[d], ida[d2]
        mm = fibre_product_map(cat, d, d2, m)
        want_eps = comp[mm, e1.eps]
        want_r = comp[e2.r, m]
        cands = [int(k) for k in cat.hom(e1.idobj, e2.idobj)
                 if comp[k, e1.r] == want_r and comp[e2.eps, k] == want_eps]
        if d == d2 and cat.is_identity(m):
            cands = [k for k in cands if k == cat.id(e1.idobj)]
        if not cands:
            return None
        domains[key] = cands
    checks = {}
    for t, u in _composable_triangles(tri):
        v = (t[0], u[1], int(comp[u[2], t[2]]))
        for key in {t, u, v}:
            checks.setdefault(key, []).append((t, u, v))
    order = sorted(tri, key=lambda k: (len(domains[k]), k))
    assign = {}

    def consistent(key):
        for t, u, v in checks.get(key, ()):
            if t in assign and u in assign and v in assign:
                if comp[assign[u], assign[t]] != assign[v]:
                    return False
        return True

    def solve(i):
        if i == len(order):
            return True
        key = order[i]
        for k in domains[key]:
            assign[key] = k
            if consistent(key) and solve(i + 1):
                return True
        del assign[key]
        return False

    import sys
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, len(order) + 100))
    try:
        ok = solve(0)
    finally:
        sys.setrecursionlimit(limit)
    if not ok:
        return None
    return FunctorialIdAssignment(ida, {k: assign[k] for k in tri})
