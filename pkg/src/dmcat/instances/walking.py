"""The standard finitely presented shapes."""
from ..errors import PreconditionError
from ..fincat import FinCat

SHAPES = ("arrow", "idempotent", "retract", "iso", "cospan")


def _cat(name, objects, mors, comp_extra):
    mors = [(f"id_{o}", o, o) for o in objects] + list(mors)
    identity = {o: f"id_{o}" for o in objects}
    src = {m: s for m, s, _ in mors}
    dst = {m: d for m, _, d in mors}
    comp = {}
    for m, s, d in mors:
        comp[(f"id_{d}", m)] = m
        comp[(m, f"id_{s}")] = m
    comp.update(comp_extra)
    for (g, f), h in comp.items():
        assert dst[f] == src[g] and src[h] == src[f] and dst[h] == dst[g], (g, f, h)
    return FinCat.build(name, objects, mors, identity, comp)


def gen_walking(shape: str) -> FinCat:
    if shape == "arrow":
        return _cat("walking-arrow", ["0", "1"], [("a", "0", "1")], {})
    if shape == "idempotent":
        return _cat("walking-idempotent", ["*"], [("e", "*", "*")], {("e", "e"): "e"})
    if shape == "retract":
        return _cat("walking-retract", ["R", "C"],
                    [("i", "R", "C"), ("r", "C", "R"), ("e", "C", "C")],
                    {("r", "i"): "id_R", ("i", "r"): "e", ("e", "e"): "e",
                     ("e", "i"): "i", ("r", "e"): "r"})
    if shape == "iso":
        return _cat("walking-iso", ["0", "1"], [("u", "0", "1"), ("v", "1", "0")],
                    {("v", "u"): "id_0", ("u", "v"): "id_1"})
    if shape == "cospan":
        return _cat("walking-cospan", ["a", "b", "c"],
                    [("f", "a", "c"), ("g", "b", "c")], {})
    raise PreconditionError(f"unknown shape {shape!r}; expected one of {SHAPES}")
