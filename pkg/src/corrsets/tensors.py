"""Correlation tensors p(i,j|x,y): validity, structure predicates, metrics,
and arithmetic.

The index order is (x, y, i, j) everywhere, including serialization:
``values[x, y]`` is the m-by-m conditional distribution for the input pair
(x, y), stored contiguously. All types are immutable and all operations
are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError, WeightError

#: tolerance for identities derived from exact arithmetic
EXACT_TOL = 1e-12
#: tolerance for quantities produced by floating eigen/LP routines
FLOAT_TOL = 1e-9
#: tolerance for the synchronous/symmetric structure predicates
PREDICATE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Correlation:
    """Joint conditional probability tensor for a two-party scenario.

    Construction checks structure only (shape and finiteness); whether the
    entries form genuine probability distributions is the job of
    :func:`validate_correlation`, so invalid tensors can be represented
    and reported on.
    """

    n_a: int
    n_b: int
    m: int
    values: np.ndarray

    def __post_init__(self):
        if self.n_a < 1 or self.n_b < 1 or self.m < 1:
            raise ShapeError("n_a, n_b and m must be positive")
        values = np.array(self.values, dtype=float)
        expected = (self.n_a, self.n_b, self.m, self.m)
        if values.shape != expected:
            raise ShapeError(f"values shape {values.shape} != {expected}")
        if not np.all(np.isfinite(values)):
            raise ShapeError("values must be finite")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.n_a, self.n_b, self.m)


@dataclass(frozen=True)
class ValidityReport:
    """Outcome of a validity check: ok flag, violated constraints, and the
    worst numerical residual encountered."""

    ok: bool
    violations: tuple[str, ...]
    worst_residual: float


@dataclass(frozen=True, eq=False)
class MarginalPair:
    """Single-party marginals with their signalling defect.

    ``alice[x, i]`` and ``bob[y, j]`` are computed against the first input
    of the opposite party; ``max_signalling_defect`` is the largest
    disagreement when recomputed against any other input, and
    ``well_defined`` says whether that defect stays within tolerance.
    """

    alice: np.ndarray
    bob: np.ndarray
    well_defined: bool
    max_signalling_defect: float


def _check_same_shape(p: Correlation, q: Correlation) -> None:
    if p.shape != q.shape:
        raise ShapeError(f"correlation shapes differ: {p.shape} vs {q.shape}")


def validate_correlation(
    p: Correlation, *, neg_tol: float = EXACT_TOL, norm_tol: float = FLOAT_TOL
) -> ValidityReport:
    """Check nonnegativity and per-(x, y) normalization.

    Entries may dip to ``-neg_tol`` (float noise); each conditional block
    must sum to 1 within ``norm_tol``.
    """
    violations = []
    worst = 0.0
    low = float(np.min(p.values))
    if low < -neg_tol:
        idx = np.unravel_index(int(np.argmin(p.values)), p.values.shape)
        violations.append(f"negative entry {low:.6e} at (x,y,i,j)={idx}")
        worst = max(worst, -low)
    sums = p.values.sum(axis=(2, 3))
    for x in range(p.n_a):
        for y in range(p.n_b):
            residual = abs(sums[x, y] - 1.0)
            if residual > norm_tol:
                violations.append(
                    f"block (x,y)=({x},{y}) sums to {sums[x, y]:.12g}, not 1"
                )
                worst = max(worst, residual)
    return ValidityReport(ok=not violations, violations=tuple(violations), worst_residual=worst)


def marginals(p: Correlation, tol: float = FLOAT_TOL) -> MarginalPair:
    """Marginal densities of both parties and the signalling defect."""
    rows = p.values.sum(axis=3)  # (x, y, i): Alice's marginal given Bob used y
    cols = p.values.sum(axis=2)  # (x, y, j): Bob's marginal given Alice used x
    alice = rows[:, 0, :].copy()
    bob = cols[0, :, :].copy()
    defect_a = float(np.max(np.abs(rows - rows[:, :1, :]))) if p.n_b > 1 else 0.0
    defect_b = float(np.max(np.abs(cols - cols[:1, :, :]))) if p.n_a > 1 else 0.0
    defect = max(defect_a, defect_b)
    return MarginalPair(
        alice=alice, bob=bob, well_defined=defect <= tol, max_signalling_defect=defect
    )


def averaged_marginals(p: Correlation) -> tuple[np.ndarray, np.ndarray]:
    """Marginals averaged over the opposite party's inputs.

    For an exactly nonsignalling tensor this equals :func:`marginals`;
    under float noise the average spreads the defect evenly, which is what
    the synchronous lift wants.
    """
    return p.values.sum(axis=3).mean(axis=1), p.values.sum(axis=2).mean(axis=0)


def is_synchronous(p: Correlation, tol: float = PREDICATE_TOL) -> bool:
    """True iff equal inputs never produce unequal outputs."""
    if p.n_a != p.n_b:
        raise ShapeError("synchronous is defined only for n_a == n_b")
    off = ~np.eye(p.m, dtype=bool)
    diag_blocks = p.values[np.arange(p.n_a), np.arange(p.n_a)]  # (x, i, j)
    return bool(np.all(diag_blocks[:, off] <= tol))


def is_symmetric(p: Correlation, tol: float = PREDICATE_TOL) -> bool:
    """True iff p(i,j|x,y) = p(j,i|y,x) for all indices."""
    if p.n_a != p.n_b:
        raise ShapeError("symmetric is defined only for n_a == n_b")
    swapped = p.values.transpose(1, 0, 3, 2)
    return bool(np.max(np.abs(p.values - swapped)) <= tol)


def convex_combine(ps, weights) -> Correlation:
    """Entrywise convex combination of equally-shaped correlations."""
    ps = list(ps)
    weights = [float(w) for w in weights]
    if not ps:
        raise ShapeError("need at least one correlation")
    if len(ps) != len(weights):
        raise WeightError(f"{len(ps)} correlations but {len(weights)} weights")
    for q in ps[1:]:
        _check_same_shape(ps[0], q)
    if any(w < 0 for w in weights):
        raise WeightError("weights must be nonnegative")
    if abs(sum(weights) - 1.0) > EXACT_TOL:
        raise WeightError(f"weights sum to {sum(weights)!r}, not 1")
    total = np.zeros_like(ps[0].values)
    for w, q in zip(weights, ps):
        total += w * q.values
    return Correlation(ps[0].n_a, ps[0].n_b, ps[0].m, total)


def sup_distance(p: Correlation, q: Correlation) -> float:
    """Max-abs entrywise distance between two correlations."""
    _check_same_shape(p, q)
    return float(np.max(np.abs(p.values - q.values)))


def uniform_correlation(n_a: int, n_b: int, m: int) -> Correlation:
    """The correlation with every conditional distribution uniform."""
    return Correlation(n_a, n_b, m, np.full((n_a, n_b, m, m), 1.0 / (m * m)))


def pr_box() -> Correlation:
    """The extremal nonsignalling 2x2x2 box: 1/2 on cells with i xor j = x.y."""
    values = np.zeros((2, 2, 2, 2))
    for x in range(2):
        for y in range(2):
            for i in range(2):
                for j in range(2):
                    if (i ^ j) == (x & y):
                        values[x, y, i, j] = 0.5
    return Correlation(2, 2, 2, values)


def clamp_small_negatives(values: np.ndarray, tol: float) -> np.ndarray:
    """Zero out entries in [-tol, 0); larger violations are the caller's
    problem and are left untouched for validation to report."""
    out = np.array(values, dtype=float)
    mask = (out < 0) & (out >= -tol)
    out[mask] = 0.0
    return out
