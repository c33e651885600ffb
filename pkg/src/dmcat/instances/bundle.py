"""A category together with whatever display-map structure is known for it."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..fincat import FinCat, validate_category
from ..idtypes import FunctorialIdAssignment, IdAssignment, verify_functorial_id, verify_id
from ..lifting import MorClass
from ..report import Report


@dataclass
class InstanceBundle:
    """``pi_expected[(f, g)]`` is the expected Pi display map, or ``None``
    when no Pi exists for that pair."""

    cat: FinCat
    D: Optional[MorClass] = None
    ida: Optional[IdAssignment] = None
    fida: Optional[FunctorialIdAssignment] = None
    pi_expected: Optional[dict] = None
    meta: dict = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.cat.name

    def verify(self) -> Report:
        """Every attached structure against its verifier."""
        rep = validate_category(self.cat)
        if not rep.ok:
            return rep
        rep.ok_("validate", self.name)
        from ..dmc import check_dmc, check_sigma
        if self.D is not None:
            rep.extend(check_dmc(self.cat, self.D))
            rep.extend(check_sigma(self.cat, self.D))
        if self.D is not None and self.ida is not None and rep.ok:
            rep.extend(verify_id(self.cat, self.D, self.ida))
        if self.D is not None and self.fida is not None and rep.ok:
            rep.extend(verify_functorial_id(self.cat, self.D, self.fida))
        return rep
