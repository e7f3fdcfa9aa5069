"""Corners of synchronous correlations and the explicit lifts back.

The corner of an n-input synchronous correlation keeps Alice's first n_A
inputs against the remaining n_B treated as Bob's: in the block-matrix
view [[A, B], [C, D]] it is the off-diagonal block B. Both lifts here are
constructive right inverses of the corner map: one at the representation
level (duplicating the PVMs on both parties), one at the tensor level for
arbitrary nonsignalling correlations.
"""

from __future__ import annotations

import numpy as np

from .errors import ShapeError
from .operators import MaxEntRep, MeasureKind
from .tensors import (
    Correlation,
    averaged_marginals,
    marginals,
    validate_correlation,
)


def corner(p: Correlation, n_alice: int, n_bob: int) -> Correlation:
    """Sub-correlation pairing inputs x < n_alice with y >= n_alice.

    The values are sliced out of the stored tensor, so a corner of a lift
    returns the original entries bit for bit.
    """
    if p.n_a != p.n_b:
        raise ShapeError("corners are defined for n_a == n_b")
    if n_alice < 1 or n_bob < 1 or n_alice + n_bob != p.n_a:
        raise ShapeError(
            f"need n_alice + n_bob == {p.n_a} with both positive, "
            f"got {n_alice} + {n_bob}"
        )
    values = p.values[:n_alice, n_alice:, :, :].copy()
    return Correlation(n_alice, n_bob, p.m, values)


def lift_max_ent(rep: MaxEntRep) -> MaxEntRep:
    """Synchronous representation whose corner evaluates to the input's.

    Both parties measure the concatenated list [alice..., bob...]; equal
    inputs then share one PVM, whose distinct elements multiply to zero,
    which is exactly why the lift is synchronous and why POVMs are
    rejected here.
    """
    if rep.kind is not MeasureKind.PVM:
        raise ShapeError("the synchronous lift requires a PVM representation")
    measures = rep.alice + rep.bob
    return MaxEntRep(alice=measures, bob=measures)


def lift_nonsignalling(p: Correlation, tol: float = 1e-9) -> Correlation:
    """Symmetric synchronous nonsignalling correlation with corner p.

    The four blocks are: Alice-Alice from her marginals (diagonal inputs
    perfectly correlated, distinct inputs independent), the original p and
    its transpose off-diagonal, and Bob-Bob likewise from his marginals.
    The marginals are computed once, averaged over the opposite party's
    inputs, since float inputs are never exactly nonsignalling.
    """
    report = validate_correlation(p)
    if not report.ok:
        raise ShapeError(
            "input is not a valid correlation: " + "; ".join(report.violations)
        )
    pair = marginals(p, tol)
    if not pair.well_defined:
        raise ShapeError(
            f"input is signalling: defect {pair.max_signalling_defect:.3e} "
            f"exceeds tolerance {tol:.3e}"
        )
    p_a, p_b = averaged_marginals(p)
    n_a, n_b, m = p.n_a, p.n_b, p.m
    n = n_a + n_b
    eye = np.eye(m)

    values = np.empty((n, n, m, m))
    # Alice-Alice block from her marginals
    values[:n_a, :n_a] = np.einsum("xi,yj->xyij", p_a, p_a)
    for x in range(n_a):
        values[x, x] = eye * p_a[x]
    # the original correlation and its transpose
    values[:n_a, n_a:] = p.values
    values[n_a:, :n_a] = p.values.transpose(1, 0, 3, 2).copy()
    # Bob-Bob block from his marginals
    values[n_a:, n_a:] = np.einsum("xi,yj->xyij", p_b, p_b)
    for y in range(n_b):
        values[n_a + y, n_a + y] = eye * p_b[y]
    return Correlation(n, n, m, values)
