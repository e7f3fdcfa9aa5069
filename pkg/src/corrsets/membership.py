"""Local-polytope membership with independently checkable certificates.

The vertex set is the deterministic correlations (products of 0/1 response
functions). An inside verdict carries convex weights whose reconstruction
is re-checked against the input; an outside verdict carries a Bell
functional from the LP dual whose classical bound is recomputed by
exhaustive evaluation over every vertex, so neither verdict rests on the
solver alone. Numerical failure surfaces as an indeterminate status, never
as a wrong verdict.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DimensionCapError, ShapeError
from .operators import MaxEntRep, MeasureKind, OperatorMeasure
from .simplex import solve_lp
from .tensors import Correlation

VERTEX_CAP = 100_000
#: an outside certificate must beat its own vertex maximum by this margin
SEPARATION_MARGIN = 1e-9


@dataclass(frozen=True, eq=False)
class BellFunctional:
    """Linear functional on correlations: sum(coefficients * p) + offset."""

    coefficients: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        coefficients = np.array(self.coefficients, dtype=float)
        if coefficients.ndim != 4:
            raise ShapeError("coefficients must be indexed (x, y, i, j)")
        if not np.all(np.isfinite(coefficients)) or not np.isfinite(self.offset):
            raise ShapeError("functional entries must be finite")
        coefficients.flags.writeable = False
        object.__setattr__(self, "coefficients", coefficients)


@dataclass(frozen=True, eq=False)
class MembershipVerdict:
    """Result of a local-polytope test.

    ``status`` is "inside" (with sparse reconstructing ``weights`` as
    (vertex index, weight) pairs), "outside" (with a separating
    ``certificate`` whose ``classical_bound`` was re-maximized over the
    vertices and is exceeded by ``achieved_value``), or "indeterminate"
    when the numerics could not support either claim.
    """

    status: str
    weights: tuple[tuple[int, float], ...] | None = None
    certificate: BellFunctional | None = None
    classical_bound: float | None = None
    achieved_value: float | None = None

    @property
    def inside(self) -> bool:
        return self.status == "inside"


def enumerate_deterministic(
    n_a: int, n_b: int, m: int, *, max_vertices: int = VERTEX_CAP
) -> list[Correlation]:
    """All deterministic correlations, i.e. the local-set extreme points.

    Ordered with Alice's response function as the outer (slower) index;
    each one is a dimension-1 maximally entangled correlation.
    """
    count = m ** (n_a + n_b)
    if count > max_vertices:
        raise DimensionCapError(count, max_vertices, "deterministic vertex count")
    vertices = []
    for alice in itertools.product(range(m), repeat=n_a):
        for bob in itertools.product(range(m), repeat=n_b):
            values = np.zeros((n_a, n_b, m, m))
            for x in range(n_a):
                for y in range(n_b):
                    values[x, y, alice[x], bob[y]] = 1.0
            vertices.append(Correlation(n_a, n_b, m, values))
    return vertices


def bell_value(p: Correlation, functional: BellFunctional) -> float:
    """Evaluate a Bell functional on a correlation."""
    if functional.coefficients.shape != p.values.shape:
        raise ShapeError(
            f"functional shape {functional.coefficients.shape} does not "
            f"match correlation shape {p.values.shape}"
        )
    return float(np.sum(functional.coefficients * p.values) + functional.offset)


def is_local(
    p: Correlation,
    tol: float = 1e-8,
    *,
    max_vertices: int = VERTEX_CAP,
    max_iterations: int | None = None,
) -> MembershipVerdict:
    """Decide membership in the local polytope with a certificate.

    Solves the feasibility problem p = sum_v w_v vertex_v, w >= 0,
    sum w = 1 by two-phase simplex. Inside verdicts are accepted only if
    the returned weights actually reconstruct p within ``tol``; outside
    verdicts only if the dual functional separates p from every vertex by
    more than the fixed margin under exhaustive re-evaluation.
    """
    vertices = enumerate_deterministic(p.n_a, p.n_b, p.m, max_vertices=max_vertices)
    entries = p.n_a * p.n_b * p.m * p.m
    matrix = np.empty((entries + 1, len(vertices)))
    for v, vertex in enumerate(vertices):
        matrix[:entries, v] = vertex.values.reshape(-1)
    matrix[entries, :] = 1.0
    rhs = np.concatenate([p.values.reshape(-1), [1.0]])

    result = solve_lp(
        np.zeros(len(vertices)), matrix, rhs, max_iterations=max_iterations
    )

    if result.status == "optimal":
        weights = np.maximum(result.x, 0.0)
        reconstruction = matrix[:entries] @ weights
        if (
            float(np.max(np.abs(reconstruction - rhs[:entries]))) <= tol
            and abs(float(weights.sum()) - 1.0) <= 1e-8
        ):
            sparse = tuple(
                (int(v), float(w)) for v, w in enumerate(weights) if w > 1e-12
            )
            return MembershipVerdict(status="inside", weights=sparse)
        return MembershipVerdict(status="indeterminate")

    if result.status == "infeasible":
        functional = BellFunctional(
            coefficients=result.farkas[:entries].reshape(p.values.shape), offset=0.0
        )
        classical_bound = max(bell_value(v, functional) for v in vertices)
        achieved = bell_value(p, functional)
        if achieved > classical_bound + SEPARATION_MARGIN:
            return MembershipVerdict(
                status="outside",
                certificate=functional,
                classical_bound=float(classical_bound),
                achieved_value=float(achieved),
            )
        return MembershipVerdict(status="indeterminate")

    return MembershipVerdict(status="indeterminate")


def chsh_game_functional() -> BellFunctional:
    """The CHSH game with uniform inputs: 1/4 on cells where i xor j = x.y.

    Its maximum over deterministic strategies is 3/4 and its value on the
    optimal quantum correlation is (2 + sqrt(2))/4.
    """
    coefficients = np.zeros((2, 2, 2, 2))
    for x in range(2):
        for y in range(2):
            for i in range(2):
                for j in range(2):
                    if (i ^ j) == (x & y):
                        coefficients[x, y, i, j] = 0.25
    return BellFunctional(coefficients=coefficients, offset=0.0)


def _qubit_projector(theta: float) -> np.ndarray:
    """Rank-1 projection onto (cos theta, sin theta)."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c * c, c * s], [c * s, s * s]], dtype=complex)


def _angle_measure(theta: float) -> OperatorMeasure:
    p = _qubit_projector(theta)
    return OperatorMeasure(np.stack([p, np.eye(2) - p]), MeasureKind.PVM)


def chsh_optimal_rep() -> MaxEntRep:
    """The standard qubit strategy reaching the CHSH quantum optimum.

    Alice measures at angles 0 and pi/4, Bob at pi/8 and -pi/8; the
    projectors are real, so they are unchanged by the stored-transpose
    convention.
    """
    alice = (_angle_measure(0.0), _angle_measure(np.pi / 4))
    bob = (_angle_measure(np.pi / 8), _angle_measure(-np.pi / 8))
    return MaxEntRep(alice=alice, bob=bob)
