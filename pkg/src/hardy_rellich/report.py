"""Verification reports: residuals, witnesses and a derived verdict."""
from __future__ import annotations

from dataclasses import dataclass, field, replace


@dataclass(frozen=True)
class Witness:
    index: object
    lhs: object
    rhs: object

    def as_row(self):
        return (self.index, self.lhs, self.rhs)


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one check.  ``passed`` is derived, never stored.

    ``range`` is an index interval (lo, hi) or a free-form descriptor string.
    ``details`` carries check-specific extras (minimum gaps, seeds, flags).
    """

    name: str
    range: object
    max_residual: float
    tolerance: float
    precision_used: int
    witnesses: tuple = ()
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.witnesses and self.max_residual <= self.tolerance

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def merge(self, other: "VerificationReport") -> "VerificationReport":
        """Combine reports over disjoint blocks of the same check."""
        lo = _span(self.range, other.range)
        details = dict(self.details)
        for k, v in other.details.items():
            details.setdefault(k, v)
        return replace(
            self,
            range=lo,
            max_residual=max(self.max_residual, other.max_residual),
            precision_used=max(self.precision_used, other.precision_used),
            witnesses=tuple(self.witnesses) + tuple(other.witnesses),
            details=details,
        )

    def summary(self) -> str:
        return (f"{self.name} [{self.range}] {self.verdict} "
                f"max_residual={float(self.max_residual):.3e} tol={float(self.tolerance):.1e} "
                f"bits={self.precision_used} witnesses={len(self.witnesses)}")


def _span(a, b):
    if isinstance(a, tuple) and isinstance(b, tuple) and len(a) == len(b) == 2:
        return (min(a[0], b[0]), max(a[1], b[1]))
    if a == b:
        return a
    return f"{a}; {b}"


def merge_all(reports):
    reports = list(reports)
    if not reports:
        raise ValueError("nothing to merge")
    out = reports[0]
    for r in reports[1:]:
        out = out.merge(r)
    return out
