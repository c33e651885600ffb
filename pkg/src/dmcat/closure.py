"""Display-map structure on the retract closure, built from the structure on D.

Every construction here goes through a retract ``e <| d`` with ``d`` in D,
an idempotent derived from it, and a splitting of that idempotent.  The
results are then re-verified against the closure class from scratch.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from . import cauchy
from .dmc import (PiResult, check_dmc, check_pi, check_sigma, find_pi, pi_comparison_iso,
                  pullback_along, universal_element_table)
from .errors import CertifiedRefutation, PreconditionError
from .fincat import (FinCat, PullbackResult, RetractData, check_retract, find_retract,
                     is_pullback_square, iter_composable, product, pullback,
                     pullback_comparison, require_pullback, to_terminal)
from .idtypes import (FunctorialIdAssignment, IdAssignment, fibre_product_map, make_entry,
                      pulled_back_r, slice_triangles, verify_functorial_id, verify_id)
from .lifting import LiftSquare, MorClass, all_lifts, dbar
from .parallel import sweep
from .report import Report
from .wfs import exhibit_retract_of_rho, factorize


@dataclass(frozen=True)
class ClosureRetract:
    """``e`` as a retract over ``Y`` of ``d`` in D: ``d i == e``, ``e s == d``, ``s i == 1``."""

    e: int
    d: int
    incl: int
    retr: int


def closure_retract(cat: FinCat, D: MorClass, ida: IdAssignment, e: int) -> ClosureRetract:
    """Identity retract for members of D, otherwise ``e <| rho(e)``."""
    e = int(e)
    if e in D:
        x = cat.id(cat.src[e])
        return ClosureRetract(e, e, x, x)
    fac = factorize(cat, D, ida, e)
    rd = exhibit_retract_of_rho(cat, D, ida, e, fac)
    return ClosureRetract(e, fac.rho, rd.inclusion, rd.retraction)


def _split(cat, k, step):
    if not cauchy.is_idempotent(cat, k):
        raise CertifiedRefutation(step, f"{cat.mname(k)} is not idempotent")
    sp = cauchy.split_idempotent(cat, k)
    if sp is None:
        raise CertifiedRefutation(step, f"idempotent {cat.mname(k)} does not split; "
                                  "category is not Cauchy complete")
    return sp


# ------------------------------------------------------------- pullbacks

@dataclass(frozen=True, eq=False)
class ClosurePullback:
    result: PullbackResult
    direct: PullbackResult
    comparison: int
    retract: ClosureRetract
    idempotent: int
    splitting: cauchy.Splitting


def closure_pullback(cat: FinCat, D: Iterable[int], ida: IdAssignment, e: int, alpha: int,
                     Dbar: Optional[MorClass] = None) -> ClosurePullback:
    """Pullback of ``e`` along ``alpha``, assembled from a split idempotent."""
    D = MorClass(D)
    Dbar = Dbar if Dbar is not None else dbar(cat, D)
    e, alpha = int(e), int(alpha)
    if e not in Dbar:
        raise PreconditionError(f"{cat.mname(e)} is not in the closure class")
    if cat.dst[alpha] != cat.dst[e]:
        raise PreconditionError("alpha must share the codomain of e")
    ret = closure_retract(cat, D, ida, e)
    comp = cat.comp
    pb = require_pullback(cat, ret.d, alpha)
    i_s = comp[ret.incl, ret.retr]
    k = pb.mediate(int(comp[i_s, pb.proj0]), pb.proj1)
    sp = _split(cat, k, "closure-pullback")
    p0 = cat.compose(ret.retr, pb.proj0, sp.incl)
    p1 = int(comp[pb.proj1, sp.incl])
    if not is_pullback_square(cat, e, alpha, sp.retract_obj, p0, p1):
        raise CertifiedRefutation("closure-pullback", "assembled square is not a pullback")
    result = PullbackResult(cat, e, alpha, sp.retract_obj, p0, p1)
    direct = pullback(cat, e, alpha)
    if direct is None:
        raise CertifiedRefutation("closure-pullback", "direct search finds no pullback")
    return ClosurePullback(result, direct, pullback_comparison(cat, result, direct), ret, int(k), sp)


# ------------------------------------------------------------ Id-types

@dataclass
class ClosureId:
    fida: FunctorialIdAssignment
    retracts: dict = field(default_factory=dict)
    splittings: dict = field(default_factory=dict)
    checks: Report = field(default_factory=Report)

    @property
    def ida(self) -> IdAssignment:
        return self.fida.base


def closure_id(cat: FinCat, D: Iterable[int], fida: FunctorialIdAssignment,
               Dbar: Optional[MorClass] = None) -> ClosureId:
    """Functorial Id-structure for every member of the closure class.

    For ``e <| d`` with ``k = Id(i s)`` split as ``(j, q)``:
    ``Id(e) = Q``, ``r_e = q r_d i`` and ``eps_e = (s x s) eps_d j``.
    """
    D = MorClass(D)
    Dbar = Dbar if Dbar is not None else dbar(cat, D)
    ok, bad = cauchy.is_cauchy_complete(cat)
    if not ok:
        raise PreconditionError(f"idempotent {cat.mname(bad)} does not split")
    comp = cat.comp
    nm = cat.mor_names
    act = fida.action
    base = fida.base
    out = ClosureId(FunctorialIdAssignment(IdAssignment(), {}))
    for e in Dbar:
        ret = closure_retract(cat, D, base, e)
        d = ret.d
        ed = base[d]
        key = (d, d, int(comp[ret.incl, ret.retr]))
        k = act[key]
        sp = _split(cat, k, f"closure-id {nm[e]}")
        r_e = cat.compose(sp.retr, ed.r, ret.incl)
        ss = fibre_product_map(cat, d, e, ret.retr)
        eps_e = cat.compose(ss, ed.eps, sp.incl)
        entry = make_entry(cat, e, sp.retract_obj, r_e, eps_e)
        if comp[entry.eps, entry.r] != entry.diag:
            raise CertifiedRefutation(f"closure-id {nm[e]}", "eps_e o r_e != diag")
        out.fida.base.entries[e] = entry
        out.retracts[e] = ret
        out.splittings[e] = (k, sp)
        rd = RetractData((ret.incl, sp.incl), (ret.retr, sp.retr))
        if check_retract(cat, r_e, ed.r, rd):
            out.checks.ok_("closure-id.r-retract", nm[e])
        else:
            out.checks.fail("closure-id.r-retract", nm[e], "r_e is not a retract of r_d",
                            refutation=True)
    _pulled_back_retracts(cat, out, base)
    for e, e2, m in slice_triangles(cat, Dbar):
        r1, r2 = out.retracts[e], out.retracts[e2]
        (k1, s1), (k2, s2) = out.splittings[e], out.splittings[e2]
        c = act[(r1.d, r2.d, cat.compose(r2.incl, m, r1.retr))]
        try:
            out.fida.action[(e, e2, m)] = cauchy.split_square(cat, k1, k2, c, s1, s2)
        except PreconditionError as exc:
            raise CertifiedRefutation(f"closure-id action {nm[m]}", str(exc)) from None
    return out


def _pulled_back_retracts(cat, out: ClosureId, source: IdAssignment):
    """Each ``alpha* r_e`` is a retract of ``(i alpha)* r_d``."""
    nm = cat.mor_names
    base = out.fida.base
    for e, ret in out.retracts.items():
        bad = 0
        for alpha in cat.into(cat.src[e]):
            for leg in (0, 1):
                _, ar_e = pulled_back_r(cat, e, base[e], int(alpha), leg)
                _, ar_d = pulled_back_r(cat, ret.d, source[ret.d], cat.compose(ret.incl, alpha), leg)
                if find_retract(cat, ar_e, ar_d) is None:
                    bad += 1
                    out.checks.fail("closure-id.pulled-back-retract",
                                    f"{nm[e]} alpha={nm[alpha]} i={leg}",
                                    "alpha* r_e is not a retract of alpha* r_d", refutation=True)
        if not bad:
            out.checks.ok_("closure-id.pulled-back-retract", nm[e])


# --------------------------------------------------------------- Pi-types

@dataclass(frozen=True, eq=False)
class ClosurePi:
    result: PiResult
    big: PiResult
    idempotent: int
    splitting: cauchy.Splitting
    lifts: tuple
    brute: Optional[PiResult]
    comparison: Optional[int]


def _least_lift(cat, sq, eqs, step):
    """Least-index lift satisfying every ``(pre, want)``: ``h o pre == want``."""
    for h in all_lifts(cat, sq):
        if all(cat.comp[h, pre] == want for pre, want in eqs):
            return h
    raise CertifiedRefutation(step, "no lift satisfies the required equations")


def closure_pi(cat: FinCat, D: Iterable[int], ida: IdAssignment, piD: dict, f: int, g: int,
               Dbar: Optional[MorClass] = None) -> ClosurePi:
    """``Pi_f g`` as a split retract of ``Pi_{rho f} M(rho g)``."""
    D = MorClass(D)
    Dbar = Dbar if Dbar is not None else dbar(cat, D)
    f, g = int(f), int(g)
    if f not in Dbar or g not in Dbar or cat.dst[g] != cat.src[f]:
        raise PreconditionError("closure_pi needs composable f, g in the closure class")
    comp = cat.comp
    X, Y = cat.endpoints(f)
    W = int(cat.src[g])
    ff, fg = factorize(cat, D, ida, f), factorize(cat, D, ida, g)
    Mf, Mg = ff.pb_witness, fg.pb_witness        # X x Id(Y), W x Id(X)
    u = Mf.proj0
    N = require_pullback(cat, fg.rho, u)         # M(rho g): N -> Mf is N.proj1
    m_rho_g = N.proj1
    big = piD.get((ff.rho, m_rho_g)) or find_pi(cat, D, ff.rho, m_rho_g)
    if big is None:
        raise PreconditionError("Pi along rho(f) is missing from the table for D")

    eX, eY = ida[to_terminal(cat, X)], ida[to_terminal(cat, Y)]
    eX0, eX1 = _legs(cat, X, eX)
    eY0, eY1 = _legs(cat, Y, eY)
    XY = product(cat, X, Y)

    step = f"closure-pi ({cat.mname(f)}, {cat.mname(g)})"
    sq_a = LiftSquare(ff.lam, XY.mediate(eX0, int(comp[f, eX1])), eX.r,
                      XY.mediate(u, int(comp[eY1, Mf.proj1])))
    a = _least_lift(cat, sq_a, [(ff.lam, eX.r)], step + " lift a")
    Qb = require_pullback(cat, eX1, g)
    rg1 = Qb.mediate(int(comp[eX.r, g]), cat.id(W))
    sq_b = LiftSquare(rg1, fg.rho, fg.lam, int(comp[eX0, Qb.proj0]))
    b = _least_lift(cat, sq_b, [(rg1, fg.lam)], step + " lift b")
    sq_c = LiftSquare(fg.lam, g, cat.id(W), fg.rho)
    c = _least_lift(cat, sq_c, [(fg.lam, cat.id(W))], step + " lift c")

    def i_at(z, m):
        Pz2 = pullback_along(cat, z, ff.rho)
        Pz = pullback_along(cat, z, f)
        pf, zp = Pz2.proj1, Pz2.proj0
        a_ = int(comp[a, pf])
        w = comp[m, Pz.mediate(zp, int(comp[eX1, a_]))]
        mg = comp[b, Qb.mediate(a_, int(w))]
        return N.mediate(int(mg), pf)

    def r_at(z, n):
        Pz2 = pullback_along(cat, z, ff.rho)
        Pz = pullback_along(cat, z, f)
        lift_in = Pz2.mediate(Pz.proj0, int(comp[ff.lam, Pz.proj1]))
        return cat.compose(c, N.proj0, n, lift_in)

    for z in cat.into(Y):
        z = int(z)
        Pz = pullback_along(cat, z, f)
        for m in cat.hom(Pz.apex, W):
            if comp[g, m] != Pz.proj1:
                continue
            if r_at(z, i_at(z, int(m))) != m:
                raise CertifiedRefutation(step, f"r o i != 1 at {cat.mname(z)}")

    P = big.pi
    t = big.untranspose(P, i_at(P, r_at(P, big.ev)))
    sp = _split(cat, t, step)
    pi = int(comp[P, sp.incl])
    ev = r_at(pi, big.transpose(pi, sp.incl))
    table = universal_element_table(cat, f, g, pi, ev)
    if table is None:
        raise CertifiedRefutation(step, "split object fails the universal property")
    if pi not in Dbar:
        raise CertifiedRefutation(step, f"{cat.mname(pi)} is not in the closure class")
    if not check_retract(cat, pi, P, RetractData(sp.incl, sp.retr, Y)):
        raise CertifiedRefutation(step, "result is not a retract of the big Pi over Y")
    result = PiResult(cat, f, g, pi, ev, pullback_along(cat, pi, f), table)
    brute = find_pi(cat, Dbar, f, g)
    cmp_iso = None
    if brute is not None:
        try:
            cmp_iso = pi_comparison_iso(cat, result, brute)
        except PreconditionError:
            raise CertifiedRefutation(step, "constructed Pi is not isomorphic to the searched one") from None
    return ClosurePi(result, big, int(t), sp, (a, b, c), brute, cmp_iso)


def _legs(cat, x, entry):
    pair = require_pullback(cat, to_terminal(cat, x), to_terminal(cat, x))
    return int(cat.comp[pair.proj0, entry.eps]), int(cat.comp[pair.proj1, entry.eps])


# ------------------------------------------------------------ certificate

@dataclass
class ClosureCertificate:
    dbar: Optional[MorClass]
    pre_report: Report
    dmc_report: Report = field(default_factory=Report)
    sigma_report: Report = field(default_factory=Report)
    id_report: Report = field(default_factory=Report)
    pi_report: Optional[Report] = None
    provenance: dict = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return all(r.ok for r in self.reports())

    def reports(self) -> list:
        out = [self.pre_report, self.dmc_report, self.sigma_report, self.id_report]
        return out + ([self.pi_report] if self.pi_report is not None else [])

    def report(self) -> Report:
        rep = Report()
        for r in self.reports():
            rep.extend(r)
        return rep


def _refuted(rep: Report, exc: CertifiedRefutation):
    rep.fail("refutation", exc.step, exc.detail, refutation=True)


def verify_main_theorem(cat: FinCat, D: Iterable[int], fida: FunctorialIdAssignment,
                        with_pi=False, pi_table: Optional[dict] = None, jobs=None) -> ClosureCertificate:
    """Build Id- (and optionally Pi-) structure on the closure class and verify it."""
    D = MorClass(D)
    pre = Report()
    pre.extend(check_dmc(cat, D))
    pre.extend(check_sigma(cat, D))
    if pre.ok:
        pre.extend(verify_functorial_id(cat, D, fida, check_pre=True))
    ok, bad = cauchy.is_cauchy_complete(cat)
    if ok:
        pre.ok_("cauchy.complete", cat.name)
    else:
        pre.fail("cauchy.complete", cat.name, f"idempotent {cat.mname(bad)} does not split")
    if with_pi and pre.ok:
        pi_rep = check_pi(cat, D, jobs=jobs)
        pi_table = pi_rep.data["pi"] if pi_table is None else pi_table
        pre.extend(pi_rep)
    cert = ClosureCertificate(None, pre)
    if not pre.ok:
        return cert
    Dbar = dbar(cat, D)
    cert.dbar = Dbar
    cert.provenance["dbar"] = Dbar.names(cat)
    cert.dmc_report = check_dmc(cat, Dbar)
    cert.sigma_report = check_sigma(cat, Dbar)
    try:
        cid = closure_id(cat, D, fida, Dbar)
    except CertifiedRefutation as exc:
        _refuted(cert.id_report, exc)
        return cert
    cert.provenance["retracts"] = cid.retracts
    cert.provenance["splittings"] = cid.splittings
    cert.provenance["closure_id"] = cid
    ida_bar = cid.ida
    cert.id_report.extend(cid.checks)
    cert.id_report.extend(verify_id(cat, Dbar, ida_bar, check_pre=False, jobs=jobs))
    cert.id_report.extend(verify_functorial_id(cat, Dbar, cid.fida, check_pre=False))
    if with_pi:
        cert.pi_report = _closure_pi_sweep(cat, D, fida.base, pi_table, Dbar, jobs, cert.provenance)
    return cert


def _closure_pi_sweep(cat, D, ida, pi_table, Dbar, jobs, provenance):
    nm = cat.mor_names
    pairs = [(f, g) for g, f in iter_composable(cat, Dbar)]

    def one(fg):
        try:
            return closure_pi(cat, D, ida, pi_table, *fg, Dbar=Dbar)
        except CertifiedRefutation as exc:
            return exc

    rep = Report()
    built = {}
    for (f, g), res in zip(pairs, sweep(one, pairs, jobs)):
        target = f"Pi({nm[f]}, {nm[g]})"
        if isinstance(res, CertifiedRefutation):
            _refuted(rep, res)
            continue
        built[(f, g)] = res
        if res.brute is None:
            rep.fail("closure-pi.oracle", target, "constructed Pi exists but search finds none",
                     refutation=True)
        else:
            rep.ok_("closure-pi.oracle", target,
                    f"{nm[res.result.pi]} ~ {nm[res.brute.pi]} via {nm[res.comparison]}")
    provenance["closure_pi"] = built
    rep.extend(check_pi(cat, Dbar, jobs=jobs))
    return rep


def check_reflection(cat: FinCat, D: Iterable[int], R: Iterable[int]) -> bool:
    """``dbar(D) <= R`` iff ``D <= R``, for a right class ``R``."""
    D, R = MorClass(D), MorClass(R)
    if dbar(cat, R) != R:
        raise PreconditionError("R is not closed: dbar(R) != R")
    return (dbar(cat, D) <= R) == (D <= R)
