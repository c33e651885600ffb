"""Check records and their text renderings."""
from dataclasses import dataclass, field

PASS = "PASS"
FAIL = "FAIL"
SKIP = "SKIP"

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_REFUTED = 3


@dataclass(frozen=True)
class Record:
    check: str
    target: str
    status: str
    detail: str = ""
    witnesses: tuple = ()
    refutation: bool = False

    def machine(self) -> str:
        fields = (self.check, self.target, self.status, self.detail,
                  " ".join(self.witnesses))
        return "\t".join(_clean(x) for x in fields)

    def human(self) -> str:
        line = f"{self.status:<4}  {self.check:<24} {self.target}"
        if self.detail:
            line += f"  -- {self.detail}"
        if self.witnesses:
            line += f"  [{', '.join(self.witnesses)}]"
        return line


def _clean(s) -> str:
    return str(s).replace("\t", " ").replace("\n", " ")


@dataclass
class Report:
    records: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def add(self, check, target, status, detail="", witnesses=(), refutation=False):
        self.records.append(Record(check, str(target), status, detail,
                                   tuple(str(w) for w in witnesses), refutation))
        return self

    def ok_(self, check, target, detail=""):
        return self.add(check, target, PASS, detail)

    def fail(self, check, target, detail="", witnesses=(), refutation=False):
        return self.add(check, target, FAIL, detail, witnesses, refutation)

    def extend(self, other: "Report") -> "Report":
        self.records.extend(other.records)
        return self

    @property
    def ok(self) -> bool:
        return not any(r.status == FAIL for r in self.records)

    @property
    def failures(self) -> list:
        return [r for r in self.records if r.status == FAIL]

    @property
    def refuted(self) -> bool:
        return any(r.refutation and r.status == FAIL for r in self.records)

    def exit_code(self) -> int:
        if self.refuted:
            return EXIT_REFUTED
        return EXIT_OK if self.ok else EXIT_FAIL

    def render(self, machine=False) -> str:
        fmt = Record.machine if machine else Record.human
        return "".join(fmt(r) + "\n" for r in self.records)

    def __bool__(self):
        return self.ok
