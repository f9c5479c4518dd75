"""Exception types raised by the package."""

from __future__ import annotations


class DomainError(ValueError):
    """A position or radius lies outside the region where it is defined."""


class PreconditionError(ValueError):
    """An argument violates a documented precondition (e.g. a non-unit direction)."""


class ProfileRangeError(RuntimeError):
    """A bounded profile was queried beyond its last node.

    The angular masks guarantee this never happens for a correct geometry, so
    seeing it usually means a mask bug.
    """


class PackingLimitError(RuntimeError):
    """The volume fraction reached the close-packing bound at some node."""

    def __init__(self, index: int, radius: float, value: float):
        self.index = index
        self.radius = radius
        self.value = value
        super().__init__(
            f"volume fraction {value:.6g} at node {index} (radius {radius:.6g}) "
            f"reached the close-packing bound"
        )
