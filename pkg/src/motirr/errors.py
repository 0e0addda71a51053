"""Exception types shared across the package.

The CLI maps these onto its exit-code contract: parameter-domain problems
exit 3, I/O failures exit 2, broken internal contracts exit 4.
"""


class ParameterError(ValueError):
    """A physical or configuration parameter is outside its valid domain."""


class ContractViolationError(RuntimeError):
    """An internal contract that callers must uphold was violated."""


class ResolutionError(ParameterError):
    """A fringe histogram is too coarse or too narrow to resolve a fringe."""
