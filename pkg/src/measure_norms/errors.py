"""Exception hierarchy.

Every error carries a stable ``code`` (the class name) and a JSON-friendly
``detail`` mapping; the CLI maps the three families to exit codes 2, 3 and 4.
"""

from __future__ import annotations


class MeasureNormError(Exception):
    """Base class for all errors raised by this package."""

    def __init__(self, message: str, **detail):
        super().__init__(message)
        self.detail = detail

    @property
    def code(self) -> str:
        return type(self).__name__

    def to_json(self) -> dict:
        return {"code": self.code, "message": str(self), "detail": self.detail}


class InvalidInput(MeasureNormError, ValueError):
    """Malformed input: bad shapes, metric axiom failures, unknown names."""


class InvalidSpec(InvalidInput):
    """Ill-formed LP or flow problem description."""


class AxiomViolation(InvalidInput):
    """A distance matrix fails one or more metric axioms.

    ``violations`` lists every failure as ``(kind, indices)``; ``kind`` and
    ``indices`` mirror the first one.
    """

    def __init__(self, violations):
        self.violations = [(k, tuple(int(i) for i in idx)) for k, idx in violations]
        kind, indices = self.violations[0]
        self.kind = kind
        self.indices = indices
        shown = ", ".join(f"{k}{idx}" for k, idx in self.violations[:10])
        more = len(self.violations) - 10
        if more > 0:
            shown += f", ... ({more} more)"
        super().__init__(
            f"metric axioms violated: {shown}",
            violations=[{"kind": k, "indices": list(idx)} for k, idx in self.violations],
        )


class DuplicatePoint(InvalidInput):
    def __init__(self, i: int, j: int):
        self.i, self.j = int(i), int(j)
        super().__init__(f"points {i} and {j} coincide", i=self.i, j=self.j)


class IndexOutOfRange(InvalidInput, IndexError):
    def __init__(self, index: int, n: int):
        super().__init__(f"point index {index} out of range for {n} points", index=index, n=n)


class SpaceMismatch(InvalidInput):
    """Two operands live on different metric spaces."""


class UnknownDensity(InvalidInput):
    pass


class PreconditionFailure(MeasureNormError):
    """Input is well-formed but outside the operation's domain."""


class NotZeroCharge(PreconditionFailure):
    def __init__(self, charge: float):
        self.charge = float(charge)
        super().__init__(
            f"measure has charge {charge:.6g}; the KR norm needs zero charge",
            charge=self.charge,
        )


class SolverFailure(MeasureNormError):
    """The numerical engine could not produce a trustworthy answer."""


class NumericalFailure(SolverFailure):
    pass


class Infeasible(SolverFailure):
    pass


class PrimalDualGap(SolverFailure):
    def __init__(self, primal: float, dual: float):
        self.primal, self.dual = float(primal), float(dual)
        super().__init__(
            f"primal {primal!r} and dual {dual!r} disagree",
            primal=self.primal,
            dual=self.dual,
        )
