"""Exception types shared across the package.

Structural problems (wrong shapes, impossible requests) raise; soft
failures that a caller may want to inspect (validity checks, membership
verdicts) are returned as report values instead.
"""


class CorrsetsError(Exception):
    """Base class for package-specific errors."""


class ShapeError(CorrsetsError, ValueError):
    """Tensor shape, dimension, or outcome-count mismatch."""


class WeightError(CorrsetsError, ValueError):
    """Convex weights fail nonnegativity or do not sum to one."""


class DimensionCapError(CorrsetsError, ValueError):
    """A construction would exceed the configured dimension cap."""

    def __init__(self, required: int, cap: int, detail: str = ""):
        self.required = required
        self.cap = cap
        msg = f"construction needs dimension {required}, cap is {cap}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class RationalApproximationError(CorrsetsError, ValueError):
    """No rational approximation exists under the denominator cap."""

    def __init__(self, target: float, max_den: int, needed_den: int):
        self.target = target
        self.max_den = max_den
        self.needed_den = needed_den
        super().__init__(
            f"no rational within tolerance of {target!r} with denominator "
            f"<= {max_den}; a denominator of {needed_den} would suffice"
        )


class SpectrumError(CorrsetsError, ValueError):
    """An eigenvalue is not rational within the snapping tolerance."""

    def __init__(self, offending: float, max_den: int):
        self.offending = offending
        self.max_den = max_den
        super().__init__(
            f"eigenvalue {offending!r} is not within tolerance of any "
            f"rational with denominator <= {max_den}"
        )


class CommutationError(CorrsetsError, ValueError):
    """Measure elements that must commute do not."""

    def __init__(self, worst: float, tol: float):
        self.worst = worst
        self.tol = tol
        super().__init__(
            f"elements do not pairwise commute: worst commutator entry "
            f"{worst:.3e} exceeds tolerance {tol:.3e}"
        )


class DiagonalizationError(CorrsetsError, RuntimeError):
    """An eigenvalue routine failed to converge or verify."""
