"""The weak factorization system generated by an Id-structure.

Every morphism ``f: X -> Y`` factors through ``M = X x_Y Id(Y)``, where
``Id(Y)`` is the Id-object of the display map ``Y -> 1``:

    lambda = <1, r_Y f>: X -> M        rho = eps_1 o proj: M -> Y
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import CertifiedRefutation, PreconditionError
from .fincat import FinCat, PullbackResult, RetractData, check_retract, pullback, to_terminal
from .idtypes import IdAssignment, fibre_square, verify_id
from .lifting import (LiftSquare, MorClass, WfsReport, dbar, left_complement,
                      retract_closure, solve_lift, verify_wfs)
from .parallel import sweep
from .report import Report


@dataclass(frozen=True)
class Factorization:
    """``rho o lambda == f`` through the middle object ``mid``."""

    f: int
    lam: int
    mid: int
    rho: int
    pb_witness: PullbackResult = field(repr=False, compare=False)


def _endpoint_legs(cat: FinCat, ida: IdAssignment, y: int):
    """``(entry, eps_0, eps_1)`` for the Id-structure of ``y -> 1``."""
    t = to_terminal(cat, y)
    if t not in ida:
        raise PreconditionError(f"no Id-structure for {cat.mname(t)}")
    entry = ida[t]
    pair = fibre_square(cat, t)
    return entry, int(cat.comp[pair.proj0, entry.eps]), int(cat.comp[pair.proj1, entry.eps])


def factorize(cat: FinCat, D: Iterable[int], ida: IdAssignment, f: int) -> Factorization:
    D = MorClass(D)
    f = int(f)
    x, y = cat.endpoints(f)
    entry, e0, e1 = _endpoint_legs(cat, ida, y)
    pb = pullback(cat, f, e0)
    if pb is None:
        raise PreconditionError(f"no pullback of {cat.mname(f)} along eps_0; not a display map category")
    lam = pb.mediate(cat.id(x), int(cat.comp[entry.r, f]))
    rho = int(cat.comp[e1, pb.proj1])
    if cat.comp[rho, lam] != f:
        raise CertifiedRefutation("factorize", f"rho o lambda != {cat.mname(f)}")
    if lam not in left_complement(cat, D):
        raise CertifiedRefutation("factorize", f"lambda({cat.mname(f)}) = {cat.mname(lam)} "
                                  "lacks the left lifting property")
    if rho not in D:
        raise CertifiedRefutation("factorize", f"rho({cat.mname(f)}) = {cat.mname(rho)} "
                                  "is not a display map")
    return Factorization(f, lam, pb.apex, rho, pb)


def exhibit_retract_of_rho(cat: FinCat, D: Iterable[int], ida: IdAssignment, f: int,
                           fac: Optional[Factorization] = None) -> RetractData:
    """``f`` as a retract of ``rho(f)`` over ``dst(f)``: ``(lambda, s)``."""
    D = MorClass(D)
    f = int(f)
    if f not in dbar(cat, D):
        raise PreconditionError(f"{cat.mname(f)} is not in the right class of the left class")
    fac = fac or factorize(cat, D, ida, f)
    sq = LiftSquare(fac.lam, f, cat.id(cat.src[f]), fac.rho)
    s = solve_lift(cat, sq)
    if s is None:
        raise CertifiedRefutation("retract-of-rho", f"no lift of lambda against {cat.mname(f)}")
    rd = RetractData(fac.lam, s, int(cat.dst[f]))
    if not check_retract(cat, f, fac.rho, rd):
        raise CertifiedRefutation("retract-of-rho", "retract equations fail")
    return rd


@dataclass
class GeneratedWfs:
    gate: Report
    wfs: Optional[WfsReport] = None
    factorizations: dict = field(default_factory=dict)
    dbar_is_retract_closure: Optional[bool] = None

    @property
    def ok(self) -> bool:
        return (self.gate.ok and self.wfs is not None and self.wfs.ok
                and bool(self.dbar_is_retract_closure))

    def report(self, cat: FinCat) -> Report:
        rep = Report()
        if not self.gate.ok:
            rep.extend(self.gate)
            rep.fail("wfs.gate", cat.name, "Id-structure does not verify")
            return rep
        nm = cat.mor_names
        for f, fac in sorted(self.factorizations.items()):
            rep.ok_("wfs.factor", nm[f], f"{nm[fac.rho]} . {nm[fac.lam]}")
        for f, why in self.wfs.factorization_failures:
            rep.fail("wfs.factor", nm[f], why)
        if self.wfs.left_is_llp:
            rep.ok_("wfs.left-is-llp", cat.name)
        else:
            rep.fail("wfs.left-is-llp", cat.name, _cx(cat, self.wfs.left_counterexample))
        if self.wfs.right_is_rlp:
            rep.ok_("wfs.right-is-rlp", cat.name)
        else:
            rep.fail("wfs.right-is-rlp", cat.name, _cx(cat, self.wfs.right_counterexample))
        if self.dbar_is_retract_closure:
            rep.ok_("wfs.retract-closure", cat.name)
        else:
            rep.fail("wfs.retract-closure", cat.name,
                     "right class differs from the retract closure", refutation=True)
        return rep


def _cx(cat, cx):
    if cx is None:
        return ""
    why, f, _ = cx
    return f"{why}: {cat.mname(f)}"


def verify_generated_wfs(cat: FinCat, D: Iterable[int], ida: IdAssignment,
                         check_pre=True, jobs=None) -> GeneratedWfs:
    D = MorClass(D)
    gate = verify_id(cat, D, ida, check_pre=check_pre)
    out = GeneratedWfs(gate)
    if not gate.ok:
        return out
    facs = sweep(lambda f: factorize(cat, D, ida, f), range(cat.n_mor), jobs)
    out.factorizations = {fac.f: fac for fac in facs}
    pairs = {f: (fac.lam, fac.rho) for f, fac in out.factorizations.items()}
    rc = dbar(cat, D)
    out.wfs = verify_wfs(cat, left_complement(cat, D), rc, pairs)
    out.dbar_is_retract_closure = rc == retract_closure(cat, D)
    return out
