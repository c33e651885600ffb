"""Poset categories of finite lattices, with their Heyting residuals."""
from __future__ import annotations

import itertools

from ..errors import PreconditionError
from ..fincat import FinCat


def poset_category(elements, leq, name="poset") -> FinCat:
    """One morphism ``x<=y`` per related pair; validates the order first."""
    els = list(elements)
    leq = set(leq)
    for x in els:
        if (x, x) not in leq:
            raise PreconditionError(f"order is not reflexive at {x}")
    for x, y in leq:
        if x != y and (y, x) in leq:
            raise PreconditionError(f"order is not antisymmetric at {x}, {y}")
    for (x, y), (y2, z) in itertools.product(leq, leq):
        if y == y2 and (x, z) not in leq:
            raise PreconditionError(f"order is not transitive at {x} <= {y} <= {z}")
    pairs = [(x, y) for x in els for y in els if (x, y) in leq]
    mors = [(f"{x}<={y}", x, y) for x, y in pairs]
    identity = {x: f"{x}<={x}" for x in els}
    comp = {}
    for (x, y), (y2, z) in itertools.product(pairs, pairs):
        if y == y2:
            comp[(f"{y}<={z}", f"{x}<={y}")] = f"{x}<={z}"
    return FinCat.build(name, els, mors, identity, comp)


def meet(elements, leq, x, y):
    """Greatest lower bound by brute force, or ``None``."""
    lower = [z for z in elements if (z, x) in leq and (z, y) in leq]
    top = [z for z in lower if all((w, z) in leq for w in lower)]
    return top[0] if top else None


def residual(elements, leq, x, w, y):
    """Largest ``z <= y`` with ``z /\\ x <= w``, or ``None`` when there is none."""
    cands = [z for z in elements if (z, y) in leq
             and (m := meet(elements, leq, z, x)) is not None and (m, w) in leq]
    top = [z for z in cands if all((c, z) in leq for c in cands)]
    return top[0] if top else None


def check_lattice(elements, leq):
    """Raise unless the order has a top and all binary meets."""
    els = list(elements)
    tops = [t for t in els if all((x, t) in leq for x in els)]
    if not tops:
        raise PreconditionError("order has no top element")
    for x, y in itertools.combinations(els, 2):
        if meet(els, leq, x, y) is None:
            raise PreconditionError(f"not a lattice: {x} and {y} have no meet")


def gen_heyting(elements, leq, name="heyting"):
    """Poset bundle with D = everything, trivial Id-types and the residual table.

    ``pi_expected[(x<=y, w<=x)]`` is ``z<=y`` for the largest ``z <= y`` with
    ``z /\\ x <= w``, or ``None`` where the lattice has no such residual.
    """
    from ..idtypes import trivial_id
    from ..lifting import MorClass
    from .bundle import InstanceBundle

    els = list(elements)
    check_lattice(els, leq)
    cat = poset_category(els, leq, name)
    D = MorClass.all(cat)
    fida = trivial_id(cat, D)
    pi = {}
    for x, y in leq:
        for w in els:
            if (w, x) not in leq:
                continue
            z = residual(els, leq, x, w, y)
            pi[(cat.mor(f"{x}<={y}"), cat.mor(f"{w}<={x}"))] = None if z is None else cat.mor(f"{z}<={y}")
    complete = all(v is not None for v in pi.values())
    meta = {"family": "heyting", "pi_complete": complete}
    return InstanceBundle(cat, D, fida.base, fida, pi, meta)
