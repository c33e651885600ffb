"""Line-oriented text format for instance bundles.

::

    category <name>
    object <obj>
    mor <m> : <obj> -> <obj>
    id <obj> = <m>
    comp <g> . <f> = <h>                    # g o f = h, every composable pair
    display <m> [<m> ...]
    idstruct <m> : obj=<obj> r=<m> eps=<m> [iota=<m>]
    idaction <Y> : <d> -> <d2> via <m> => <k>
    pi <f> <g> = <m>            or          pi <f> <g> absent

``#`` starts a comment.  Names are any run of non-blank characters
without ``#``.
"""
from __future__ import annotations

import re
from pathlib import Path

from ..errors import ParseError, PreconditionError
from ..fincat import FinCat, pullback
from ..idtypes import FunctorialIdAssignment, IdAssignment, make_entry
from ..lifting import MorClass
from .bundle import InstanceBundle

_TOKEN = re.compile(r"\S+")
KEYWORDS = ("category", "object", "mor", "id", "comp", "display",
            "idstruct", "idaction", "pi")


class _Tok(str):
    line: int
    col: int


def _tokens(line: str, lineno: int) -> list:
    out = []
    for m in _TOKEN.finditer(line):
        t = _Tok(m.group())
        t.line, t.col = lineno, m.start() + 1
        out.append(t)
    return out


def _err(tok, msg):
    raise ParseError(msg, getattr(tok, "line", 0), getattr(tok, "col", 0))


def _expect(toks, pattern, where):
    """``pattern`` lists literal tokens or ``None`` for a name slot."""
    if len(toks) != len(pattern):
        _err(toks[0], f"malformed {where} line: expected {len(pattern)} fields, got {len(toks)}")
    for tok, lit in zip(toks, pattern):
        if lit is not None and tok != lit:
            _err(tok, f"expected {lit!r} in {where} line, found {tok!r}")
    return [t for t, lit in zip(toks, pattern) if lit is None]


def parse_fincat(text: str, strict: bool = False) -> InstanceBundle:
    lines = {k: [] for k in KEYWORDS}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = _tokens(raw.split("#", 1)[0], lineno)
        if not toks:
            continue
        if toks[0] not in lines:
            _err(toks[0], f"unknown declaration {toks[0]!r}")
        lines[toks[0]].append(toks)

    if len(lines["category"]) != 1:
        tok = lines["category"][1][0] if lines["category"] else _Tok("")
        _err(tok, "exactly one 'category' line is required")
    name = _expect(lines["category"][0], ["category", None], "category")[0]

    objects, obj_tok = [], {}
    for toks in lines["object"]:
        (o,) = _expect(toks, ["object", None], "object")
        if o in obj_tok:
            _err(o, f"duplicate object {o!r}")
        obj_tok[o] = o
        objects.append(str(o))

    def obj(tok):
        if tok not in obj_tok:
            _err(tok, f"unknown object {tok!r}")
        return str(tok)

    mors, mor_tok = [], {}
    for toks in lines["mor"]:
        m, a, b = _expect(toks, ["mor", None, ":", None, "->", None], "mor")
        if m in mor_tok:
            _err(m, f"duplicate morphism {m!r}")
        mor_tok[m] = m
        mors.append((str(m), obj(a), obj(b)))
    ends = {m: (a, b) for m, a, b in mors}

    def mor(tok):
        if tok not in mor_tok:
            _err(tok, f"unknown morphism {tok!r}")
        return str(tok)

    identity = {}
    for toks in lines["id"]:
        o, m = _expect(toks, ["id", None, "=", None], "id")
        if str(o) in identity:
            _err(o, f"duplicate identity for {o!r}")
        identity[obj(o)] = mor(m)
    for o in objects:
        if o not in identity:
            _err(obj_tok[o], f"missing identity for object {o!r}")

    comp = {}
    for toks in lines["comp"]:
        g, f, h = _expect(toks, ["comp", None, ".", None, "=", None], "comp")
        g, f, h = mor(g), mor(f), mor(h)
        if ends[f][1] != ends[g][0]:
            _err(toks[1], f"{g} . {f} is not composable")
        if (g, f) in comp and comp[(g, f)] != h:
            _err(toks[1], f"conflicting composites for {g} . {f}")
        comp[(g, f)] = h
    for f, (_, b) in ends.items():
        for g, (a, _) in ends.items():
            if a == b and (g, f) not in comp:
                _err(mor_tok[f], f"missing composite for composable pair {g} . {f}")

    cat = FinCat.build(str(name), objects, mors, identity, comp)
    bundle = InstanceBundle(cat)

    if lines["display"]:
        bundle.D = MorClass(cat.mor(mor(t)) for toks in lines["display"] for t in toks[1:])

    if lines["idstruct"]:
        ida = IdAssignment()
        for toks in lines["idstruct"]:
            if len(toks) < 6 or toks[2] != ":":
                _err(toks[0], "malformed idstruct line")
            f = cat.mor(mor(toks[1]))
            fields = {}
            for t in toks[3:]:
                key, eq, val = t.partition("=")
                if not eq or key not in ("obj", "r", "eps", "iota") or key in fields:
                    _err(t, f"bad idstruct field {t!r}")
                v = _Tok(val)
                v.line, v.col = t.line, t.col + len(key) + 1
                fields[key] = v
            if not {"obj", "r", "eps"} <= set(fields):
                _err(toks[0], "idstruct needs obj=, r= and eps=")
            if pullback(cat, f, f) is None:
                _err(toks[1], f"{toks[1]} has no fibre square")
            iota = cat.mor(mor(fields["iota"])) if "iota" in fields else None
            try:
                ida.entries[f] = make_entry(cat, f, cat.obj(obj(fields["obj"])),
                                            cat.mor(mor(fields["r"])), cat.mor(mor(fields["eps"])), iota)
            except PreconditionError as exc:
                _err(toks[0], str(exc))
        bundle.ida = ida

    if lines["idaction"]:
        if bundle.ida is None:
            _err(lines["idaction"][0][0], "idaction needs idstruct lines")
        action = {}
        for toks in lines["idaction"]:
            y, d, d2, m, k = _expect(toks, ["idaction", None, ":", None, "->", None, "via", None, "=>", None],
                                     "idaction")
            d_, d2_, m_, k_ = (cat.mor(mor(t)) for t in (d, d2, m, k))
            if ends[str(d)][1] != obj(y) or ends[str(d2)][1] != str(y):
                _err(y, f"{d} and {d2} must both land in {y}")
            action[(d_, d2_, m_)] = k_
        bundle.fida = FunctorialIdAssignment(bundle.ida, action)

    if lines["pi"]:
        pi = {}
        for toks in lines["pi"]:
            if len(toks) == 4 and toks[3] == "absent":
                f, g = (cat.mor(mor(t)) for t in toks[1:3])
                pi[(f, g)] = None
            else:
                f, g, h = _expect(toks, ["pi", None, None, "=", None], "pi")
                pi[(cat.mor(mor(f)), cat.mor(mor(g)))] = cat.mor(mor(h))
        bundle.pi_expected = pi

    if strict:
        rep = bundle.verify()
        if not rep.ok:
            raise PreconditionError(f"strict load: {rep.failures[0].human()}")
    return bundle


# --------------------------------------------------------------- emission

def canonical_form(b: InstanceBundle) -> tuple:
    """Name-level content of a bundle; index order plays no part."""
    cat = b.cat
    nm, on = cat.mor_names, cat.objects
    mors = tuple(sorted((nm[f], on[cat.src[f]], on[cat.dst[f]]) for f in range(cat.n_mor)))
    ident = tuple(sorted((on[x], nm[cat.ident[x]]) for x in range(cat.n_obj)))
    comp = tuple(sorted((nm[g], nm[f], nm[cat.comp[g, f]])
                        for g in range(cat.n_mor) for f in range(cat.n_mor) if cat.comp[g, f] >= 0))
    D = None if b.D is None else tuple(sorted(b.D.names(cat)))
    ida = None
    if b.ida is not None:
        ida = tuple(sorted((nm[f], on[e.idobj], nm[e.r], nm[e.eps], nm[e.iota])
                           for f, e in b.ida.entries.items()))
    act = None
    if b.fida is not None:
        act = tuple(sorted((on[cat.dst[d]], nm[d], nm[d2], nm[m], nm[k])
                           for (d, d2, m), k in b.fida.action.items()))
    pi = None
    if b.pi_expected is not None:
        pi = tuple(sorted(((nm[f], nm[g], None if h is None else nm[h])
                           for (f, g), h in b.pi_expected.items()), key=lambda t: t[:2]))
    return (cat.name, tuple(sorted(on)), mors, ident, comp, D, ida, act, pi)


def structurally_equal(a: InstanceBundle, b: InstanceBundle) -> bool:
    return canonical_form(a) == canonical_form(b)


def _check_name(s):
    if not s or "#" in s or any(c.isspace() for c in s):
        raise PreconditionError(f"name {s!r} cannot be written to an instance file")
    return s


def emit_fincat(b: InstanceBundle) -> str:
    name, objs, mors, ident, comp, D, ida, act, pi = canonical_form(b)
    for s in (name, *objs, *(m[0] for m in mors)):
        _check_name(s)
    out = [f"category {name}"]
    out += [f"object {o}" for o in objs]
    out += [f"mor {m} : {a} -> {c}" for m, a, c in mors]
    out += [f"id {o} = {m}" for o, m in ident]
    out += [f"comp {g} . {f} = {h}" for g, f, h in comp]
    if D is not None:
        out.append(" ".join(["display", *D]))
    if ida is not None:
        cat = b.cat
        for f, o, r, eps, iota in ida:
            line = f"idstruct {f} : obj={o} r={r} eps={eps}"
            e = b.ida[cat.mor(f)]
            default = make_entry(cat, cat.mor(f), e.idobj, e.r, e.eps).iota
            if e.iota != default:
                line += f" iota={iota}"
            out.append(line)
    if act is not None:
        out += [f"idaction {y} : {d} -> {d2} via {m} => {k}" for y, d, d2, m, k in act]
    if pi is not None:
        out += [f"pi {f} {g} absent" if h is None else f"pi {f} {g} = {h}" for f, g, h in pi]
    return "\n".join(out) + "\n"


def load_bundle(path, strict: bool = False) -> InstanceBundle:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"not UTF-8: {exc}") from None
    return parse_fincat(text, strict=strict)


def save_bundle(b: InstanceBundle, path) -> None:
    Path(path).write_text(emit_fincat(b), encoding="utf-8")
