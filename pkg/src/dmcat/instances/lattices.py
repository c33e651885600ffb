"""Finite orders given as ``(elements, leq)`` with ``leq`` a set of pairs."""
import itertools


def chain(n: int):
    els = [str(i) for i in range(n)]
    return els, {(a, b) for i, a in enumerate(els) for b in els[i:]}


def boolean(k: int):
    """Subsets of a k-element set; names are bitstrings like ``'01'``."""
    els = ["".join(bits) for bits in itertools.product("01", repeat=k)]
    leq = {(a, b) for a in els for b in els
           if all(x <= y for x, y in zip(a, b))}
    return els, leq


def b2():
    """The four element Boolean lattice with named atoms."""
    els = ["bot", "a", "b", "top"]
    leq = {(x, x) for x in els} | {("bot", x) for x in els} | {(x, "top") for x in els}
    return els, leq


def m3():
    els = ["bot", "a", "b", "c", "top"]
    leq = {(x, x) for x in els} | {("bot", x) for x in els} | {(x, "top") for x in els}
    return els, leq


def n5():
    els = ["bot", "a", "b", "c", "top"]
    leq = {(x, x) for x in els} | {("bot", x) for x in els} | {(x, "top") for x in els}
    leq |= {("a", "b")}
    return els, leq


def by_name(spec: str):
    """``chain:3``, ``boolean:2``, ``b2``, ``m3``, ``n5``."""
    kind, _, arg = spec.partition(":")
    if kind == "chain":
        return chain(int(arg or 2))
    if kind == "boolean":
        return boolean(int(arg or 2))
    table = {"b2": b2, "m3": m3, "n5": n5}
    if kind in table:
        return table[kind]()
    raise ValueError(f"unknown lattice {spec!r}")
