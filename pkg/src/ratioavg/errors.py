"""Exception types shared across the package.

Every error carries a short machine-readable ``code`` so the CLI can map
failures onto stable exit codes and JSON error reports.
"""


class RatioavgError(Exception):
    code = "error"


class DomainError(RatioavgError):
    """Input outside the admissible domain (|y| >= 1, bad lengths, ...)."""

    code = "domain-error"


class RangeViolation(RatioavgError):
    """Closed formula requested outside its proven validity range."""

    code = "range-violation"


class DegenerateConfiguration(RatioavgError):
    """Pole regularization failed to produce a finite value."""

    code = "degenerate-configuration"


class UnsupportedGroup(RatioavgError):
    """Quadrature oracle asked for a (family, N) it does not support."""

    code = "unsupported-group"


class InconsistentRecursion(RatioavgError):
    """Weight-coefficient recursion re-derived a coefficient differently."""

    code = "inconsistent-recursion"


class TailTooLarge(RatioavgError):
    """Truncated series tail estimate exceeds the requested tolerance."""

    code = "tail-too-large"
