"""Exception types shared across the simulator.

Everything derives from ``SimulatorError`` (itself a ``ValueError``) so
callers can catch broadly or by contract.
"""


class SimulatorError(ValueError):
    """Base class for contract violations raised by this package."""


class DimensionMismatchError(SimulatorError):
    """An occupation vector's length does not match the registry."""


class RegistryMismatchError(SimulatorError):
    """Two states that must share a mode registry do not."""


class UnregisteredModeError(SimulatorError):
    """A mode index or key is not present in the registry."""


class ModeCollisionError(SimulatorError):
    """Mode labels collide, in registry construction or beam routing."""


class DegenerateStateError(SimulatorError):
    """An operation that needs a non-zero state received (near) zero."""


class NonUnitaryError(SimulatorError):
    """A matrix that must be unitary is not, beyond tolerance."""


class PhotonLimitError(SimulatorError):
    """More photons on one element than the exact factorial tables cover."""


class UnhandledHeraldError(SimulatorError):
    """A detection outcome arrived with no feed-forward rule defined."""


class ScenarioError(SimulatorError):
    """A scenario file is malformed; carries line/column when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column
