"""Dense two-phase simplex for equality-form linear programs.

Solves min c.x subject to A x = b, x >= 0 with Bland's anticycling pivot
rule. Written for auditable certificates at desk scale rather than speed:
the tableau is dense, every pivot is deterministic, and an infeasible
phase 1 hands back the Farkas vector y (y.A <= 0 componentwise while
y.b > 0) so callers can verify separations independently of the solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-9


@dataclass(frozen=True)
class SimplexResult:
    """Solver outcome.

    ``status`` is one of "optimal", "infeasible", "unbounded",
    "iteration_limit". ``x`` and ``objective`` are set when optimal;
    ``farkas`` is set when infeasible and satisfies farkas.A <= 0
    (componentwise) with farkas.b > 0 in the original row convention.
    """

    status: str
    x: np.ndarray | None = None
    objective: float | None = None
    farkas: np.ndarray | None = None


def _pivot(tableau: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    tableau[row] /= tableau[row, col]
    for r in range(tableau.shape[0]):
        if r != row and tableau[r, col] != 0.0:
            tableau[r] -= tableau[r, col] * tableau[row]
    basis[row] = col


def _bland_iterate(
    tableau: np.ndarray,
    basis: np.ndarray,
    allowed_cols: int,
    tol: float,
    max_iterations: int,
) -> str:
    """Run simplex pivots until optimal/unbounded/iteration cap.

    The last tableau row holds reduced costs, the last column the rhs.
    Bland's rule: entering column is the smallest index with reduced cost
    below -tol; the leaving row breaks ratio ties by smallest basis index.
    """
    rows = tableau.shape[0] - 1
    for _ in range(max_iterations):
        reduced = tableau[-1, :allowed_cols]
        entering = -1
        for j in range(allowed_cols):
            if reduced[j] < -tol:
                entering = j
                break
        if entering < 0:
            return "optimal"
        best_ratio = None
        leaving = -1
        for i in range(rows):
            coef = tableau[i, entering]
            if coef > tol:
                ratio = tableau[i, -1] / coef
                if (
                    best_ratio is None
                    or ratio < best_ratio - tol
                    or (abs(ratio - best_ratio) <= tol and basis[i] < basis[leaving])
                ):
                    best_ratio = ratio
                    leaving = i
        if leaving < 0:
            return "unbounded"
        _pivot(tableau, basis, leaving, entering)
    return "iteration_limit"


def solve_lp(
    c,
    a,
    b,
    *,
    tol: float = PIVOT_TOL,
    max_iterations: int | None = None,
) -> SimplexResult:
    """Two-phase simplex for min c.x, A x = b, x >= 0."""
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float).reshape(-1)
    c = np.array(c, dtype=float).reshape(-1)
    rows, cols = a.shape
    if b.size != rows or c.size != cols:
        raise ValueError(f"inconsistent LP shapes: A {a.shape}, b {b.size}, c {c.size}")
    if max_iterations is None:
        max_iterations = 5000 + 50 * (rows + cols)

    signs = np.where(b < 0, -1.0, 1.0)
    a_flipped = a * signs[:, None]
    b_flipped = b * signs

    # phase 1: minimize the artificial sum
    tableau = np.zeros((rows + 1, cols + rows + 1))
    tableau[:rows, :cols] = a_flipped
    tableau[:rows, cols : cols + rows] = np.eye(rows)
    tableau[:rows, -1] = b_flipped
    tableau[-1, :cols] = -a_flipped.sum(axis=0)
    tableau[-1, -1] = -b_flipped.sum()
    basis = np.arange(cols, cols + rows)

    status = _bland_iterate(tableau, basis, cols + rows, tol, max_iterations)
    if status == "iteration_limit":
        return SimplexResult(status="iteration_limit")
    if status == "unbounded":  # phase 1 is bounded below; numerical trouble
        return SimplexResult(status="iteration_limit")

    scale = max(1.0, float(np.max(np.abs(b))))
    infeasibility = -tableau[-1, -1]
    if infeasibility > tol * scale:
        # Farkas certificate from the phase-1 duals: the reduced cost of
        # artificial column i is 1 - y_i
        y = 1.0 - tableau[-1, cols : cols + rows]
        y = y * signs
        return SimplexResult(status="infeasible", farkas=y)

    # drive surviving artificials out of the basis; rows that cannot be
    # pivoted are redundant and dropped
    keep = []
    for i in range(rows):
        if basis[i] >= cols:
            pivot_col = -1
            for j in range(cols):
                if abs(tableau[i, j]) > tol:
                    pivot_col = j
                    break
            if pivot_col >= 0:
                _pivot(tableau, basis, i, pivot_col)
                keep.append(i)
        else:
            keep.append(i)
    if len(keep) < rows:
        rows_kept = keep + [rows]
        tableau = tableau[rows_kept]
        basis = basis[keep]
        rows = len(keep)

    # phase 2 on the original objective, artificial columns removed
    tableau = np.delete(tableau, np.s_[cols:-1], axis=1)
    reduced = c.copy()
    rhs = 0.0
    for i in range(rows):
        if basis[i] < cols:
            coef = c[basis[i]]
            if coef != 0.0:
                reduced -= coef * tableau[i, :cols]
                rhs -= coef * tableau[i, -1]
    tableau[-1, :cols] = reduced
    tableau[-1, -1] = rhs

    status = _bland_iterate(tableau, basis, cols, tol, max_iterations)
    if status != "optimal":
        return SimplexResult(status=status)

    x = np.zeros(cols)
    for i in range(rows):
        if basis[i] < cols:
            x[basis[i]] = tableau[i, -1]
    return SimplexResult(status="optimal", x=x, objective=float(c @ x))
