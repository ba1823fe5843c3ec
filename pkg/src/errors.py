"""
Exception hierarchy for network ingestion, exact analysis and simulation.

Every error belongs to one of four families. The CLI maps the families to
its exit codes; library code only raises.
"""
from typing import Any, Optional, Sequence


class InputError(ValueError):
    """Malformed or inconsistent input (CLI exit 2)."""
    exit_code = 2


class PremiseError(ValueError):
    """An analysis premise does not hold (CLI exit 3)."""
    exit_code = 3


class CoefficientError(ArithmeticError):
    """Arithmetic outside the extended nonnegative rationals."""
    exit_code = 2


class SimulationError(RuntimeError):
    exit_code = 4


# ============================================================================
# COEFFICIENTS
# ============================================================================
class DivByInfinity(CoefficientError):
    pass


class PoleAtPoint(CoefficientError):
    pass


class UndefinedAtPoint(CoefficientError):
    pass


class NegativeValue(CoefficientError):
    pass


class ParameterizedComparison(CoefficientError):
    pass


# ============================================================================
# EXPECTATIONS AND PROGRAMS
# ============================================================================
class UnknownVariable(InputError):
    def __init__(self, name: str):
        super().__init__(f"unknown variable: {name}")
        self.name = name


class ValueOutOfDomain(InputError):
    def __init__(self, name: str, value: Any, domain: Optional[Sequence] = None):
        msg = f"value {value} not in domain of {name}"
        if domain is not None:
            msg += f" ({', '.join(str(v) for v in domain)})"
        super().__init__(msg)
        self.name = name
        self.value = value


class MassNotOne(InputError):
    pass


class IncompleteState(InputError):
    pass


class UnknownCostModel(InputError):
    pass


class TableTooLarge(PremiseError):
    def __init__(self, cells: int, limit: int):
        super().__init__(
            f"expectation table needs {cells} cells, limit is {limit} "
            f"(raise BNL_MAX_TABLE_CELLS)"
        )
        self.cells = cells
        self.limit = limit


# ============================================================================
# LOOP RULES
# ============================================================================
class UnsupportedLoop(PremiseError):
    """A loop cannot be handled by the closed-form rules."""

    premise = "f-i.i.d."

    def __init__(self, message: str, premise: Optional[str] = None):
        if premise is not None:
            self.premise = premise
        super().__init__(f"{message} [premise: {self.premise}]")


class NotFIID(UnsupportedLoop):
    premise = "f-i.i.d."


class BodyMayDiverge(UnsupportedLoop):
    premise = "wp(body, 1) = 1"


class VaryingIterationTime(UnsupportedLoop):
    premise = "ert(body, 0) unaffected by body"


# ============================================================================
# NETWORKS
# ============================================================================
class BifSyntaxError(InputError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class MissingCptRow(InputError):
    def __init__(self, node: str, row: tuple):
        super().__init__(f"CPT of {node} has no row for parent values {row}")
        self.node = node
        self.row = row


class RowMassNotOne(InputError):
    def __init__(self, node: str, row: tuple, total: Any):
        super().__init__(f"CPT row {row} of {node} sums to {total}, not 1")
        self.node = node
        self.row = row
        self.total = total


class CycleDetected(InputError):
    def __init__(self, cycle: Sequence):
        super().__init__("network is not acyclic: " + " -> ".join(str(v) for v in cycle))
        self.cycle = list(cycle)


class UndeclaredParameter(InputError):
    pass


class ArityMismatch(InputError):
    pass


class IncompleteAssignment(InputError):
    pass


class InconsistentQuery(InputError):
    pass


# ============================================================================
# SIMULATION
# ============================================================================
class AllTrialsTruncated(SimulationError):
    def __init__(self, trials: int, max_steps: int):
        super().__init__(f"all {trials} trials hit the step limit of {max_steps}")
        self.trials = trials
        self.max_steps = max_steps
