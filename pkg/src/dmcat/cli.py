"""``dmcat`` command line.

Every verb loads an instance file, runs one operation, prints its report and
exits with 0 (all pass), 1 (a check failed), 2 (bad input) or 3 (a
construction that must succeed did not).
"""
from __future__ import annotations

import argparse
import sys

from . import cauchy
from .closure import check_reflection, closure_id, verify_main_theorem
from .dmc import check_dmc, check_pi, check_sigma
from .errors import CertifiedRefutation, ParseError, PreconditionError, SiteBudgetExceeded
from .fincat import is_iso, isos, validate_category
from .idtypes import (crosscheck_id_variants, search_id, verify_id, verify_ml_id,
                      verify_param_ml_id)
from .instances import emit_fincat, load_bundle, save_bundle
from .instances.bundle import InstanceBundle
from .instances.groupoids import gen_groupoid_site
from .instances.heyting import gen_heyting
from .instances.lattices import by_name
from .instances.search import SearchStats, search_nonclosed_instance
from .instances.walking import SHAPES, gen_walking
from .lifting import MorClass, dbar
from .parallel import set_default_jobs
from .report import EXIT_INPUT, EXIT_REFUTED, Report
from .wfs import factorize, verify_generated_wfs


class InputError(Exception):
    pass


def _needs(b: InstanceBundle, *parts):
    for p in parts:
        if getattr(b, p) is None:
            label = {"D": "display", "ida": "idstruct", "fida": "idaction",
                     "pi_expected": "pi"}[p]
            raise InputError(f"{b.name}: instance file has no '{label}' lines")


def _mors(cat, names):
    try:
        return [cat.mor(m) for m in names]
    except KeyError as exc:
        raise InputError(f"{cat.name}: no morphism named {exc.args[0]!r}") from None


def _gated(rep: Report, b: InstanceBundle) -> bool:
    """Run the DMC and Sigma checks first; later stages only on success."""
    rep.extend(check_dmc(b.cat, b.D))
    rep.extend(check_sigma(b.cat, b.D))
    return rep.ok


# ------------------------------------------------------------------ verbs

def cmd_validate(b, args):
    return b.verify()


def cmd_check_dmc(b, args):
    _needs(b, "D")
    return check_dmc(b.cat, b.D)


def cmd_check_sigma(b, args):
    _needs(b, "D")
    return check_sigma(b.cat, b.D)


def cmd_check_id(b, args):
    _needs(b, "D")
    rep = Report()
    if not _gated(rep, b):
        return rep
    if b.ida is None:
        ida = search_id(b.cat, b.D, check_pre=False)
        if ida is None:
            return rep.fail("id.search", b.name, "no factorization satisfies all clauses")
        rep.ok_("id.search", b.name, f"{len(ida)} entries found")
        b.ida = ida
    return rep.extend(verify_id(b.cat, b.D, b.ida, check_pre=False, jobs=args.jobs))


def cmd_check_id_variants(b, args):
    _needs(b, "D", "ida")
    rep = Report()
    if not _gated(rep, b):
        return rep
    rep.extend(verify_ml_id(b.cat, b.D, b.ida, check_pre=False))
    rep.extend(verify_param_ml_id(b.cat, b.D, b.ida, check_pre=False))
    return rep.extend(crosscheck_id_variants(b.cat, b.D, b.ida))


def cmd_check_pi(b, args):
    _needs(b, "D")
    cat, nm = b.cat, b.cat.mor_names
    rep = Report()
    if not _gated(rep, b):
        return rep
    pis = check_pi(cat, b.D, jobs=args.jobs)
    rep.extend(pis)
    found = pis.data["pi"]
    for (f, g), want in sorted((b.pi_expected or {}).items()):
        target = f"Pi({nm[f]}, {nm[g]})"
        got = found.get((f, g))
        if want is None and got is None:
            rep.ok_("pi.expected", target, "absent as expected")
        elif want is None or got is None:
            rep.fail("pi.expected", target,
                     f"expected {'none' if want is None else nm[want]}, "
                     f"found {'none' if got is None else nm[got.pi]}")
        elif _iso_over(cat, want, got.pi):
            rep.ok_("pi.expected", target, nm[want])
        else:
            rep.fail("pi.expected", target, f"expected {nm[want]}, found {nm[got.pi]}")
    return rep


def _iso_over(cat, a, b) -> bool:
    """Is there an iso ``u`` with ``a o u == b``?"""
    return any(cat.comp[a, u] == b and is_iso(cat, int(u)) is not None
               for u in cat.hom(cat.src[b], cat.src[a]))


def cmd_factorize(b, args):
    _needs(b, "D", "ida")
    cat, nm = b.cat, b.cat.mor_names
    targets = _mors(cat, args.mor) if args.mor else range(cat.n_mor)
    rep = Report()
    for f in targets:
        fac = factorize(cat, b.D, b.ida, f)
        rep.ok_("factorize", nm[f], f"{nm[fac.rho]} . {nm[fac.lam]} through {cat.objects[fac.mid]}")
    return rep


def cmd_wfs(b, args):
    _needs(b, "D", "ida")
    rep = Report()
    if not _gated(rep, b):
        return rep
    return rep.extend(verify_generated_wfs(b.cat, b.D, b.ida, check_pre=False,
                                           jobs=args.jobs).report(b.cat))


def cmd_closure(b, args):
    _needs(b, "D", "fida")
    rep = Report()
    if not _gated(rep, b):
        return rep
    cat, nm = b.cat, b.cat.mor_names
    Dbar = dbar(cat, b.D)
    extra = [nm[f] for f in Dbar if f not in b.D]
    rep.ok_("closure.class", cat.name,
            f"{len(Dbar)} maps, {len(extra)} new" + (f": {' '.join(extra)}" if extra else ""))
    cid = closure_id(cat, b.D, b.fida, Dbar)
    for e, ret in sorted(cid.retracts.items()):
        rep.ok_("closure.retract", nm[e], f"of {nm[ret.d]} via {nm[ret.incl]}, {nm[ret.retr]}")
    rep.extend(cid.checks)
    return rep.extend(verify_id(cat, Dbar, cid.ida, check_pre=False, jobs=args.jobs))


def cmd_split(b, args):
    cat, nm = b.cat, b.cat.mor_names
    rep = Report()
    for e in cauchy.idempotents(cat):
        s = cauchy.split_idempotent(cat, e)
        if s is None:
            rep.fail("split.exists", nm[e], "idempotent does not split")
            continue
        rep.ok_("split.exists", nm[e], f"through {cat.objects[s.retract_obj]}: "
                                       f"{nm[s.incl]} . {nm[s.retr]}")
        if cauchy.verify_splitting_coequalizer(cat, e, s):
            rep.ok_("split.coequalizer", nm[e])
        else:
            rep.fail("split.coequalizer", nm[e], f"{nm[s.retr]} is not a coequalizer of (e, 1)")
    ok, _ = cauchy.is_cauchy_complete(cat)
    if ok:
        rep.ok_("split.cauchy-complete", cat.name)
    else:
        rep.fail("split.cauchy-complete", cat.name)
    return rep


def cmd_verify_theorem(b, args):
    _needs(b, "D", "fida")
    cert = verify_main_theorem(b.cat, b.D, b.fida, with_pi=args.with_pi, jobs=args.jobs)
    rep = cert.report()
    if cert.valid:
        rep.ok_("theorem.certificate", b.name, "closure carries the structure")
    else:
        rep.fail("theorem.certificate", b.name, "see failures above")
    return rep


def cmd_reflect(b, args):
    _needs(b, "D")
    cat = b.cat
    if args.right:
        classes = [("given", MorClass(_mors(cat, args.right)))]
    else:
        classes = [("isos", MorClass(isos(cat))), ("closure", dbar(cat, b.D)),
                   ("all", MorClass.all(cat))]
    rep = Report()
    for label, R in classes:
        try:
            ok = check_reflection(cat, b.D, R)
        except PreconditionError as exc:
            rep.fail("reflect.closed", label, str(exc))
            continue
        if ok:
            rep.ok_("reflect", label, f"{len(R)} maps")
        else:
            rep.fail("reflect", label, "closure is not below R although D is, or conversely")
    return rep


def cmd_search_instance(args, out):
    mo, mm = args.seed_bounds
    stats = SearchStats()
    found = search_nonclosed_instance(mo, mm, jobs=args.jobs, stats=stats)
    rep = Report()
    summary = stats.summary().rsplit(";", 1)[0]
    if found is None:
        rep.add("search.witness", f"objects<={mo} morphisms<={mm}", "SKIP",
                f"no display map category with a larger closure; searched {summary}")
        return rep
    rep.ok_("search.witness", found.name, summary)
    if args.out:
        save_bundle(found, args.out)
    else:
        out.write(emit_fincat(found))
    return rep


def cmd_gen(args, out):
    if args.family == "heyting":
        if len(args.spec) != 1:
            raise InputError("gen heyting takes one lattice: chain:N, boolean:K, b2, m3 or n5")
        try:
            els, leq = by_name(args.spec[0])
        except ValueError as exc:
            raise InputError(str(exc)) from None
        bundle = gen_heyting(els, leq, args.name or f"heyting-{args.spec[0].replace(':', '')}")
    elif args.family == "groupoid":
        site = gen_groupoid_site(args.spec, close=args.close, name=args.name or "groupoid-site")
        bundle = site.bundle
    else:
        if len(args.spec) != 1 or args.spec[0] not in SHAPES:
            raise InputError(f"gen walking takes one of {', '.join(SHAPES)}")
        bundle = InstanceBundle(gen_walking(args.spec[0]))
    text = emit_fincat(bundle)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return validate_category(bundle.cat)


VERBS = {
    "validate": cmd_validate,
    "check-dmc": cmd_check_dmc,
    "check-sigma": cmd_check_sigma,
    "check-id": cmd_check_id,
    "check-id-variants": cmd_check_id_variants,
    "check-pi": cmd_check_pi,
    "factorize": cmd_factorize,
    "wfs": cmd_wfs,
    "closure": cmd_closure,
    "split": cmd_split,
    "verify-theorem": cmd_verify_theorem,
    "reflect": cmd_reflect,
}


def _bounds(s):
    try:
        a, b = (int(x) for x in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected OBJECTS,MORPHISMS") from None
    return a, b


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--machine", action="store_true", help="tab-separated records")
    common.add_argument("--jobs", type=int, default=1, help="parallel sweep width")
    p = argparse.ArgumentParser(prog="dmcat", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True)
    for verb in VERBS:
        sp = sub.add_parser(verb, parents=[common])
        sp.add_argument("bundle")
        if verb == "factorize":
            sp.add_argument("--mor", nargs="*", default=None, help="only these morphisms")
        if verb == "verify-theorem":
            sp.add_argument("--with-pi", action="store_true")
        if verb == "reflect":
            sp.add_argument("--right", nargs="*", default=None, help="morphisms of a closed class R")
    sp = sub.add_parser("search-instance", parents=[common])
    sp.add_argument("--seed-bounds", type=_bounds, default=(6, 24), metavar="OBJECTS,MORPHISMS")
    sp.add_argument("--out")
    sp = sub.add_parser("gen", parents=[common])
    sp.add_argument("family", choices=("heyting", "groupoid", "walking"))
    sp.add_argument("spec", nargs="*")
    sp.add_argument("--close", choices=("full", "once", "none"), default="full")
    sp.add_argument("--name")
    sp.add_argument("--out")
    return p


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    set_default_jobs(args.jobs)
    try:
        if args.verb == "gen":
            rep = cmd_gen(args, out)
        elif args.verb == "search-instance":
            rep = cmd_search_instance(args, out)
        else:
            bundle = load_bundle(args.bundle)
            rep = VERBS[args.verb](bundle, args)
    except ParseError as exc:
        err.write(f"{args.bundle}: {exc}\n")
        return EXIT_INPUT
    except (InputError, PreconditionError, FileNotFoundError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    except CertifiedRefutation as exc:
        err.write(f"refuted: {exc}\n")
        return EXIT_REFUTED
    except SiteBudgetExceeded as exc:
        rep = Report().fail("gen.budget", "groupoid-site", str(exc))
    if args.verb != "gen":
        out.write(rep.render(machine=args.machine))
    elif not rep.ok:
        err.write(rep.render(machine=args.machine))
    return rep.exit_code()


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
