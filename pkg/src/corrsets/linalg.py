"""Dense Hermitian linear algebra helpers.

The eigensolver is a cyclic Jacobi iteration: the matrices in this package
are small (d <= 64), and a deterministic, self-contained routine whose
rotations can be audited is worth more here than LAPACK speed.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DiagonalizationError, ShapeError

#: convergence threshold on the off-diagonal Frobenius norm, relative to
#: max(1, ||a||_F)
JACOBI_THRESHOLD = 1e-13
JACOBI_MAX_SWEEPS = 100


def off_diagonal_norm(a: np.ndarray) -> float:
    """Frobenius norm of the off-diagonal part of a square matrix."""
    mask = ~np.eye(a.shape[0], dtype=bool)
    return float(np.linalg.norm(a[mask]))


def jacobi_eigh(a, *, threshold: float = JACOBI_THRESHOLD, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(w, v)`` with eigenvalues ascending and a unitary ``v`` whose
    columns are the eigenvectors, so ``a ~= v @ diag(w) @ v.conj().T``.
    The sweep order is row-cyclic over index pairs (p, q), p < q, which
    makes the result deterministic; convergence is declared when the
    off-diagonal Frobenius norm drops below ``threshold * max(1, ||a||_F)``.
    """
    a = np.array(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {a.shape}")
    d = a.shape[0]
    a = (a + a.conj().T) / 2.0  # absorb Hermitian roundoff
    v = np.eye(d, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))
    stop = threshold * scale
    # rotations smaller than this cannot move the off-diagonal norm past it
    skip = stop / max(d, 1)

    for _ in range(max_sweeps):
        if off_diagonal_norm(a) <= stop:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                r = abs(apq)
                if r <= skip:
                    continue
                phase = apq / r
                tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # unitary J = I except J[p,p]=c, J[p,q]=s,
                # J[q,p]=-s*conj(phase), J[q,q]=c*conj(phase)
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * np.conj(phase) * col_q
                a[:, q] = s * col_p + c * np.conj(phase) * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * phase * row_q
                a[q, :] = s * row_p + c * phase * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * np.conj(phase) * vq
                v[:, q] = s * vp + c * np.conj(phase) * vq
    else:
        if off_diagonal_norm(a) > stop:
            raise DiagonalizationError(
                f"Jacobi iteration did not converge in {max_sweeps} sweeps "
                f"(off-diagonal norm {off_diagonal_norm(a):.3e})"
            )

    w = np.real(np.diagonal(a)).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed d x d unitary via QR of a complex Ginibre matrix.

    The phases of R's diagonal are pushed into Q so the distribution is
    genuinely Haar rather than an artifact of the QR gauge.
    """
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def philox_rng(seed: int) -> np.random.Generator:
    """Counter-based generator; all package randomness flows through this."""
    return np.random.Generator(np.random.Philox(seed))


def _max_off_diagonal(a: np.ndarray) -> float:
    mask = ~np.eye(a.shape[0], dtype=bool)
    if not mask.any():
        return 0.0
    return float(np.max(np.abs(a[mask])))


def _all_diagonal_in(mats, v, tol):
    vh = v.conj().T
    return all(_max_off_diagonal(vh @ m @ v) <= tol for m in mats)


def _refine_blocks(mats, threshold):
    """Recursive common-eigenbasis search: diagonalize the first matrix,
    then refine inside each degenerate eigenspace using the rest."""
    if not mats:
        raise DiagonalizationError("no matrices to refine")
    d = mats[0].shape[0]
    if d == 1:
        return np.eye(1, dtype=complex)
    w, v = jacobi_eigh(mats[0])
    u = v.copy()
    rest = mats[1:]
    if not rest:
        return u
    # cluster equal eigenvalues (ascending order from jacobi_eigh)
    start = 0
    for k in range(1, d + 1):
        if k == d or w[k] - w[start] > threshold:
            idx = list(range(start, k))
            if len(idx) > 1:
                cols = v[:, idx]
                sub = [cols.conj().T @ m @ cols for m in rest]
                u[:, idx] = cols @ _refine_blocks(sub, threshold)
            start = k
    return u


def simultaneous_diagonalize(mats, *, tol: float = 1e-8, seed: int = 0) -> np.ndarray:
    """Common eigenbasis of a family of commuting Hermitian matrices.

    Diagonalizes a seeded random real-weighted combination of the family
    and verifies that every member is diagonal in the resulting basis
    within ``tol``; retries with fresh weights up to five times (degenerate
    collisions), then falls back to recursive refinement of degenerate
    eigenspaces. Returns the unitary whose columns form the basis.
    """
    mats = [np.asarray(m, dtype=complex) for m in mats]
    if not mats:
        raise ShapeError("expected at least one matrix")
    d = mats[0].shape[0]
    for m in mats:
        if m.shape != (d, d):
            raise ShapeError("matrices must share one square shape")
    if len(mats) == 1:
        _, v = jacobi_eigh(mats[0])
        return v

    rng = philox_rng(seed)
    for _ in range(5):
        weights = rng.uniform(0.5, 1.5, size=len(mats))
        combo = sum(w * m for w, m in zip(weights, mats))
        _, v = jacobi_eigh(combo)
        if _all_diagonal_in(mats, v, tol):
            return v
    v = _refine_blocks(mats, threshold=tol)
    if _all_diagonal_in(mats, v, tol):
        return v
    raise DiagonalizationError(
        "simultaneous diagonalization failed; the family may not commute "
        "within tolerance"
    )
