"""Check reports and their line-oriented serialization.

Proven statements use the pass/fail vocabulary and may hard-fail a suite;
conjecture probes use observed/violated-observation and never should. A
check whose hypothesis is not met on the given data reports skipped.
"""

from dataclasses import dataclass, field

PASS = "pass"
FAIL = "fail"
OBSERVED = "observed"
VIOLATED = "violated-observation"
SKIPPED = "skipped"

_HARD_FAIL = {FAIL}


@dataclass
class CheckReport:
    name: str
    d: int
    N: int
    k: int
    verdict: str
    # first counterexample, when one exists: (t, x, lhs, rhs)
    counterexample: tuple | None = None
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        """True unless a proven statement failed."""
        return self.verdict not in _HARD_FAIL

    def line(self) -> str:
        s = (
            f"CHECK {self.name} d={self.d} N={self.N} k={self.k} "
            f"VERDICT={self.verdict}"
        )
        if self.counterexample is not None:
            t, x, lhs, rhs = self.counterexample
            coords = ",".join(str(int(c)) for c in x)
            s += f" counterexample t={t} x=({coords}) lhs={lhs} rhs={rhs}"
        return s

    def __str__(self):
        return self.line()
