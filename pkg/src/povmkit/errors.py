"""Exception types raised by povmkit."""


class PovmError(Exception):
    """Base class for all library errors."""


class ValidationError(PovmError, ValueError):
    """Input data does not satisfy a structural precondition."""


class NotCommutative(PovmError):
    """A family of effects that was expected to commute does not.

    Attributes
    ----------
    pair : tuple of int
        Indices of the worst offending pair.
    norm : float
        Spectral norm of their commutator.
    """

    def __init__(self, pair, norm, message=None):
        self.pair = tuple(pair)
        self.norm = float(norm)
        if message is None:
            message = f"effects {self.pair} do not commute (commutator norm {self.norm:.3e})"
        super().__init__(message)


class DegenerateBlocks(PovmError):
    """Two joint eigenblocks carry the same value vector."""


class NotAFunctionOfA(PovmError):
    """An effect is not constant on some eigenblock of the candidate sharp version.

    Attributes
    ----------
    block : int
        Index of the offending eigenprojector.
    outcome : int
        Index of the offending outcome.
    residual : float
        ``||F P - mu P||`` for that pair.
    """

    def __init__(self, block, outcome, residual):
        self.block = int(block)
        self.outcome = int(outcome)
        self.residual = float(residual)
        super().__init__(
            f"effect {self.outcome} is not constant on block {self.block} "
            f"(residual {self.residual:.3e})"
        )
