"""Exception taxonomy shared by the library, the service, and the CLI.

Every error the engine raises on purpose derives from ShortfallError and
carries a stable machine code (the class name) plus the process exit code a
CLI front end should use: 2 for input/validation problems, 3 for numeric or
feasibility failures discovered while computing.
"""

from __future__ import annotations


class ShortfallError(Exception):
    """Base class for all engine errors."""

    exit_code = 2

    @property
    def code(self) -> str:
        return type(self).__name__


# -- construction / validation (exit code 2) --------------------------------


class EmptySample(ShortfallError):
    """A sample or atom list was empty."""


class BadWeights(ShortfallError):
    """Probability weights were negative, non-finite, or did not sum to 1."""


class OutOfRangeLevel(ShortfallError):
    """A probability level was outside [0, 1]."""


class UnboundedQuantile(ShortfallError):
    """Quantile requested at an endpoint where the distribution is unbounded."""


class InvalidProfile(ShortfallError):
    """A risk-profile description failed validation."""


class NotESClass(ShortfallError):
    """Profile lacks the concave-h structure of an ES-style adjustment."""


class NotVaRClass(ShortfallError):
    """Profile cannot be represented as a VaR-style benchmark."""


class BadAllocation(ShortfallError):
    """Allocation parts do not sum to the target position."""


class IncompatibleAtoms(ShortfallError):
    """Allocation partition does not refine the position's atoms."""


class ProfileNotNormalized(ShortfallError):
    """Operation requires g(0) = 0."""


class ProfileNotFlatBelowP(ShortfallError):
    """Operation requires the profile to vanish on [0, p]."""


class ParseError(ShortfallError):
    """Malformed input file."""

    def __init__(self, detail: str, line: int | None = None):
        if line is not None:
            detail = f"line {line}: {detail}"
        super().__init__(detail)
        self.line = line


class NonMonotoneDates(ShortfallError):
    """Report dates must be strictly increasing."""


class WindowTooLong(ShortfallError):
    """Rolling window (or smoothing span) exceeds the available rows."""


class BadInput(ShortfallError):
    """Catch-all for malformed request payloads."""


# -- numeric / feasibility (exit code 3) -------------------------------------


class ArgmaxAtOne(ShortfallError):
    """Supremum attained only at p = 1; no finite-density certificate exists."""

    exit_code = 3


class TargetUnreachable(ShortfallError):
    """No payoff meets the requested utility target."""

    exit_code = 3


class GridTooLarge(ShortfallError):
    """Brute-force search grid exceeds the evaluation budget."""

    exit_code = 3
