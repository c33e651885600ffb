"""Lifting problems and the class algebra built on them.

Everything is a finite sweep over commuting squares.  The full table of
which morphism lifts against which is computed once per category by the
kernel in :mod:`dmcat.kernels` and memoised.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from . import kernels
from .errors import PreconditionError
from .fincat import FinCat, isos


class MorClass:
    """An ordered set of morphism indices of one fixed category."""

    __slots__ = ("members", "_set")

    def __init__(self, members: Iterable[int] = ()):
        self.members = tuple(sorted({int(m) for m in members}))
        self._set = frozenset(self.members)

    @classmethod
    def from_mask(cls, mask) -> "MorClass":
        return cls(np.flatnonzero(mask))

    @classmethod
    def all(cls, cat: FinCat) -> "MorClass":
        return cls(range(cat.n_mor))

    def mask(self, n: int) -> np.ndarray:
        out = np.zeros(n, dtype=bool)
        out[list(self.members)] = True
        return out

    def names(self, cat: FinCat) -> list:
        return [cat.mor_names[m] for m in self.members]

    def __contains__(self, f) -> bool:
        return int(f) in self._set

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def __eq__(self, other):
        if isinstance(other, MorClass):
            return self._set == other._set
        return NotImplemented

    def __hash__(self):
        return hash(self._set)

    def __le__(self, other: "MorClass") -> bool:
        return self._set <= other._set

    def __lt__(self, other: "MorClass") -> bool:
        return self._set < other._set

    def __or__(self, other: "MorClass") -> "MorClass":
        return MorClass(self._set | other._set)

    def __sub__(self, other: "MorClass") -> "MorClass":
        return MorClass(self._set - other._set)

    def __repr__(self):
        return f"MorClass({list(self.members)})"


@dataclass(frozen=True)
class LiftSquare:
    """``right o top == bottom o left``."""

    left: int
    right: int
    top: int
    bottom: int

    def commutes(self, cat: FinCat) -> bool:
        c = cat.comp
        return c[self.right, self.top] >= 0 and c[self.right, self.top] == c[self.bottom, self.left]

    def describe(self, cat: FinCat) -> tuple:
        n = cat.mor_names
        return (f"left={n[self.left]}", f"right={n[self.right]}",
                f"top={n[self.top]}", f"bottom={n[self.bottom]}")


def solve_lift(cat: FinCat, sq: LiftSquare) -> Optional[int]:
    """Least-index diagonal filler, or ``None``."""
    if not sq.commutes(cat):
        raise PreconditionError("lifting square does not commute")
    c = cat.comp
    for h in cat.hom(cat.dst[sq.left], cat.src[sq.right]):
        if c[h, sq.left] == sq.top and c[sq.right, h] == sq.bottom:
            return int(h)
    return None


def all_lifts(cat: FinCat, sq: LiftSquare) -> list:
    c = cat.comp
    return [int(h) for h in cat.hom(cat.dst[sq.left], cat.src[sq.right])
            if c[h, sq.left] == sq.top and c[sq.right, h] == sq.bottom]


def squares(cat: FinCat, f: int, g: int):
    """Commuting squares with left leg ``f`` and right leg ``g``, by (top, bottom)."""
    c = cat.comp
    for t in cat.hom(cat.src[f], cat.src[g]):
        for b in cat.hom(cat.dst[f], cat.dst[g]):
            if c[g, t] == c[b, f]:
                yield LiftSquare(int(f), int(g), int(t), int(b))


def unliftable_square(cat: FinCat, f: int, g: int) -> Optional[LiftSquare]:
    for sq in squares(cat, f, g):
        if solve_lift(cat, sq) is None:
            return sq
    return None


def lift_matrix(cat: FinCat) -> np.ndarray:
    """``L[f, g]``: every square from ``f`` to ``g`` has a lift (memoised)."""
    if "lift" not in cat.memo:
        every = np.arange(cat.n_mor)
        table = kernels.lift_table(cat, every, every)
        table.setflags(write=False)
        cat.memo["lift"] = table
    return cat.memo["lift"]


def lifts_against(cat: FinCat, f: int, g: int) -> bool:
    if "lift" in cat.memo:
        return bool(cat.memo["lift"][f, g])
    return bool(kernels.lift_table(cat, [f], [g])[0, 0])


def llp(cat: FinCat, f: int, cls: Iterable[int]):
    """``(True, None)`` or ``(False, square)`` with the first unliftable square."""
    L = lift_matrix(cat)
    for g in sorted(int(x) for x in cls):
        if not L[f, g]:
            return False, unliftable_square(cat, f, g)
    return True, None


def rlp(cat: FinCat, g: int, cls: Iterable[int]):
    L = lift_matrix(cat)
    for f in sorted(int(x) for x in cls):
        if not L[f, g]:
            return False, unliftable_square(cat, f, g)
    return True, None


def left_complement(cat: FinCat, cls: Iterable[int]) -> MorClass:
    """Morphisms with the left lifting property against every member."""
    cls = MorClass(cls)
    if not len(cls):
        return MorClass.all(cat)
    L = lift_matrix(cat)
    return MorClass.from_mask(L[:, list(cls.members)].all(axis=1))


def right_complement(cat: FinCat, cls: Iterable[int]) -> MorClass:
    cls = MorClass(cls)
    if not len(cls):
        return MorClass.all(cat)
    L = lift_matrix(cat)
    return MorClass.from_mask(L[list(cls.members), :].all(axis=0))


def dbar(cat: FinCat, cls: Iterable[int]) -> MorClass:
    """Right complement of the left complement."""
    return right_complement(cat, left_complement(cat, cls))


def retract_matrix(cat: FinCat) -> np.ndarray:
    """``R[f, g]``: ``f`` is a retract of ``g`` in the arrow category."""
    if "retract" not in cat.memo:
        every = np.arange(cat.n_mor)
        table = kernels.retract_table(cat, every, every)
        table.setflags(write=False)
        cat.memo["retract"] = table
    return cat.memo["retract"]


def retract_closure(cat: FinCat, cls: Iterable[int]) -> MorClass:
    """Least class containing ``cls`` and closed under retracts.

    Iterates the one-step retract operator rather than using lifting, so it
    is an independent route to the same class when identity types exist.
    """
    R = retract_matrix(cat)
    mask = MorClass(cls).mask(cat.n_mor)
    while True:
        grown = mask | R[:, mask].any(axis=1) if mask.any() else mask
        if (grown == mask).all():
            return MorClass.from_mask(mask)
        mask = grown


# ------------------------------------------------------------------- wfs

@dataclass
class WfsReport:
    factorization_ok: dict = field(default_factory=dict)
    factorization_failures: list = field(default_factory=list)
    left_is_llp: bool = True
    left_counterexample: Optional[object] = None
    right_is_rlp: bool = True
    right_counterexample: Optional[object] = None

    @property
    def ok(self) -> bool:
        return not self.factorization_failures and self.left_is_llp and self.right_is_rlp


def verify_wfs(cat: FinCat, L: Iterable[int], R: Iterable[int], factor) -> WfsReport:
    """Check that ``(L, R)`` is a weak factorization system.

    ``factor`` maps every morphism ``f`` to ``(l, r)`` with ``r o l == f``;
    a morphism missing from ``factor`` counts as unfactorable.
    """
    L, R = MorClass(L), MorClass(R)
    rep = WfsReport()
    for f in range(cat.n_mor):
        pair = factor.get(f)
        if pair is None:
            rep.factorization_failures.append((f, "no factorization"))
            continue
        l, r = pair
        if cat.comp[r, l] != f:
            raise PreconditionError(f"factorization of {cat.mname(f)} does not compose to it")
        if l not in L:
            rep.factorization_failures.append((f, f"left factor {cat.mname(l)} not in L"))
        elif r not in R:
            rep.factorization_failures.append((f, f"right factor {cat.mname(r)} not in R"))
        else:
            rep.factorization_ok[f] = (l, r)
    lc = left_complement(cat, R)
    if lc != L:
        rep.left_is_llp = False
        rep.left_counterexample = _class_diff(cat, L, lc, R, left=True)
    rc = right_complement(cat, L)
    if rc != R:
        rep.right_is_rlp = False
        rep.right_counterexample = _class_diff(cat, R, rc, L, left=False)
    return rep


def _class_diff(cat, claimed, actual, other, left):
    extra = sorted(set(claimed) - set(actual))
    if extra:
        f = extra[0]
        ok, sq = llp(cat, f, other) if left else rlp(cat, f, other)
        return ("member fails lifting", f, sq)
    missing = sorted(set(actual) - set(claimed))
    return ("lifting morphism not a member", missing[0], None)


def iso_class(cat: FinCat) -> MorClass:
    return MorClass(isos(cat))
