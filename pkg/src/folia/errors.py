"""Exception hierarchy shared across the package.

Every deliberate failure raises a subclass of :class:`FoliaError`, so callers
can distinguish domain errors (poles, branch cuts, failed validation) from
programming mistakes.  Errors carry structured context where it is cheap to
do so: the evaluation point, the offending source span, the residual that
tripped a gate.
"""

from __future__ import annotations

from typing import Any


class FoliaError(Exception):
    """Base class for every error this package raises on purpose."""


class DivisionNearPole(FoliaError):
    """Jet division met a denominator below the degeneracy threshold.

    The threshold is scale aware: ``1e-12 * (1 + |numerator|)``.
    """

    def __init__(self, message: str, *, denominator: complex | None = None,
                 point: Any = None, span: Any = None) -> None:
        super().__init__(message)
        self.denominator = denominator
        self.point = point
        self.span = span


class LogBranchNearZero(FoliaError):
    """log was asked for a value too close to the branch point at 0."""

    def __init__(self, message: str, *, value: complex | None = None,
                 point: Any = None, span: Any = None) -> None:
        super().__init__(message)
        self.value = value
        self.point = point
        self.span = span


class StencilOutsideDomain(FoliaError):
    """A finite-difference stencil point could not be evaluated."""

    def __init__(self, message: str, *, point: Any = None) -> None:
        super().__init__(message)
        self.point = point


class ExprSyntaxError(FoliaError):
    """Parse failure, with the source span and the token kinds expected there."""

    def __init__(self, message: str, *, span: Any = None,
                 expected: frozenset[str] = frozenset()) -> None:
        super().__init__(message)
        self.span = span
        self.expected = expected


class NonIntegerExponent(ExprSyntaxError):
    """The exponent after ^ was not an integer literal."""


class ExponentOutOfRange(ExprSyntaxError):
    """Integer exponent outside the supported range |n| <= 16."""


class ValidationFailed(FoliaError):
    """A model, grid, or manifest-level invariant does not hold."""

    def __init__(self, message: str, *, invariant: str | None = None,
                 point: Any = None) -> None:
        super().__init__(message)
        self.invariant = invariant
        self.point = point


class TangencyViolated(FoliaError):
    """The sampled map does not send fiber tangents into leaf tangents."""

    def __init__(self, message: str, *, point: Any = None,
                 residual: float | None = None) -> None:
        super().__init__(message)
        self.point = point
        self.residual = residual


class NewtonDiverged(FoliaError):
    """Local inversion did not converge within the iteration cap."""

    def __init__(self, message: str, *, point: Any = None,
                 residual: float | None = None, iterations: int | None = None) -> None:
        super().__init__(message)
        self.point = point
        self.residual = residual
        self.iterations = iterations


class SingularJacobian(FoliaError):
    """The real-linear differential is numerically singular."""

    def __init__(self, message: str, *, point: Any = None) -> None:
        super().__init__(message)
        self.point = point


class PeriodNotAPeriod(FoliaError):
    """A claimed fiber period fails |F(x, y+gamma) - F(x, y)| < tol."""

    def __init__(self, message: str, *, point: Any = None,
                 mismatch: float | None = None) -> None:
        super().__init__(message)
        self.point = point
        self.mismatch = mismatch


class InsufficientSamples(FoliaError):
    """Not enough matched sample pairs to evaluate a growth relation."""


class VanishingSample(FoliaError):
    """A sample value is too close to zero for a logarithmic fit."""

    def __init__(self, message: str, *, sample: Any = None) -> None:
        super().__init__(message)
        self.sample = sample


class StencilHitsZeroSet(FoliaError):
    """A Laplacian stencil point landed inside a declared zero clearance."""

    def __init__(self, message: str, *, point: complex | None = None) -> None:
        super().__init__(message)
        self.point = point


class NotLeafwiseHolomorphic(FoliaError):
    """A field that must be holomorphic along the leaf fails the dbar gate."""

    def __init__(self, message: str, *, point: complex | None = None,
                 residual: float | None = None) -> None:
        super().__init__(message)
        self.point = point
        self.residual = residual


class ManifestError(FoliaError):
    """The run manifest is malformed or references unknown entities."""

    def __init__(self, message: str, *, location: str | None = None,
                 span: Any = None) -> None:
        super().__init__(message)
        self.location = location
        self.span = span


class CheckFailed(FoliaError):
    """One or more requested checks did not pass.

    Raised after the report has been written, so callers still have the
    full artifact; the names of the failing checks are attached.
    """

    def __init__(self, message: str, *, failures: tuple[str, ...] = ()) -> None:
        super().__init__(message)
        self.failures = failures
