"""POVM correlations on maximally entangled states and their dilation.

A POVM family whose elements pairwise commute and have rational spectra
can be traded for a PVM family at a larger dimension without changing the
correlation: diagonalize the family, clear the common denominator N of its
eigenvalues by tensoring everything else with I_N, and replace each
diagonal entry n/N by a rank-n projection block. Iterating over every
family on both parties turns an almost maximally entangled correlation
into a maximally entangled one exactly. Arbitrary commuting spectra are
handled by first rounding the eigenvalues to nearby rationals, which moves
the correlation by less than a prescribed eps.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .combine import DIM_CAP, guaranteed_denominator, simplex_numerators
from .errors import (
    CommutationError,
    DimensionCapError,
    RationalApproximationError,
    SpectrumError,
)
from .linalg import philox_rng, simultaneous_diagonalize
from .operators import (
    MaxEntRep,
    MeasureKind,
    OperatorMeasure,
    eval_max_ent,
)
from .tensors import Correlation

COMMUTATOR_TOL = 1e-10
SNAP_TOL = 1e-9


def eval_almost_max_ent(rep: MaxEntRep) -> Correlation:
    """Normalized trace evaluation for POVM representations.

    Same formula as the PVM evaluation; kept as its own entry point
    because the POVM case is a genuinely larger correlation set. Such a
    correlation also admits a projective state-vector representation whose
    state is a maximally entangled vector padded with zeros, but that
    equivalence is existential (a Stinespring-style enlargement) and is
    not materialized here; the operational conversions are this evaluation
    and :func:`dilate_commuting_rational`.
    """
    return eval_max_ent(rep)


def check_pairwise_commuting(
    measure: OperatorMeasure, tol: float = COMMUTATOR_TOL
) -> tuple[bool, float]:
    """Whether all element pairs commute, plus the worst commutator entry."""
    worst = 0.0
    elements = measure.elements
    for i in range(measure.m):
        for j in range(i + 1, measure.m):
            comm = elements[i] @ elements[j] - elements[j] @ elements[i]
            worst = max(worst, float(np.max(np.abs(comm))))
    return worst <= tol, worst


def _common_eigenbasis(measure: OperatorMeasure, tol: float, seed: int) -> np.ndarray:
    ok, worst = check_pairwise_commuting(measure, tol)
    if not ok:
        raise CommutationError(worst, tol)
    return simultaneous_diagonalize(list(measure.elements), seed=seed)


def _diagonal_values(measure: OperatorMeasure, basis: np.ndarray) -> np.ndarray:
    """Eigenvalues lambda[i, k] of element i at basis vector k."""
    bh = basis.conj().T
    return np.stack(
        [np.real(np.diagonal(bh @ e @ basis)) for e in measure.elements]
    )


def rational_spectrum(
    measure: OperatorMeasure,
    max_den: int,
    *,
    tol: float = SNAP_TOL,
    seed: int = 0,
) -> list[list[Fraction]]:
    """Simultaneous eigenvalues snapped to rationals.

    Returns, per element, the list of eigenvalues (one per common
    eigenvector) as exact fractions with denominator <= max_den. Raises
    :class:`SpectrumError` naming the first eigenvalue that is not within
    ``tol`` of such a rational, and :class:`CommutationError` if the
    elements do not commute.
    """
    basis = _common_eigenbasis(measure, COMMUTATOR_TOL, seed)
    lam = _diagonal_values(measure, basis)
    out = []
    for i in range(measure.m):
        row = []
        for k in range(measure.d):
            value = float(lam[i, k])
            snapped = Fraction(value).limit_denominator(max_den)
            if abs(float(snapped) - value) > tol:
                raise SpectrumError(value, max_den)
            row.append(snapped)
        out.append(row)
    return out


def _snap_family(lam: np.ndarray, max_den: int, tol: float) -> list[list[Fraction]]:
    """Snap a family's eigenvalue table (m, d) to exact rationals, checking
    that each eigenvector's outcome distribution sums to exactly 1."""
    m, d = lam.shape
    table = []
    for i in range(m):
        row = []
        for k in range(d):
            value = float(lam[i, k])
            snapped = Fraction(value).limit_denominator(max_den)
            if abs(float(snapped) - value) > tol:
                raise SpectrumError(value, max_den)
            row.append(snapped)
        table.append(row)
    for k in range(d):
        total = sum(table[i][k] for i in range(m))
        if total != 1:
            raise SpectrumError(float(sum(lam[i, k] for i in range(m))), max_den)
    return table


def _families(rep: MaxEntRep):
    """Measure families in processing order: Alice ascending, then Bob."""
    return [("alice", x) for x in range(rep.n_a)] + [("bob", y) for y in range(rep.n_b)]


def predicted_dilation_dim(rep: MaxEntRep, max_den: int = 64, *, seed: int = 0) -> int:
    """Dimension the dilation will produce: d times the product over
    families of the lcm of their eigenvalue denominators."""
    total = rep.d
    for party, index in _families(rep):
        measure = (rep.alice if party == "alice" else rep.bob)[index]
        spectrum = rational_spectrum(measure, max_den, seed=seed)
        dens = [fr.denominator for row in spectrum for fr in row]
        total *= math.lcm(*dens)
    return total


def dilate_commuting_rational(
    rep: MaxEntRep,
    *,
    max_den: int = 64,
    max_dim: int = DIM_CAP,
    tol: float = SNAP_TOL,
    seed: int = 0,
) -> MaxEntRep:
    """PVM representation with the same correlation as a commuting
    rational-spectrum POVM representation.

    Families are processed one at a time (Alice's inputs ascending, then
    Bob's). Each step diagonalizes the family, conjugates every remaining
    family into that basis, and replaces the diagonal entries n/N by
    canonical consecutive rank-n projection blocks on a fresh N-dimensional
    tensor factor; everything else is tensored with I_N, which leaves the
    correlation unchanged. The final dimension is d times the product of
    the per-family denominators.
    """
    d0 = rep.d
    m = rep.m
    families = _families(rep)
    # cores: every family's d0-level matrices, conjugated into each
    # processed family's eigenbasis as we go
    cores = []
    for party, index in families:
        measure = (rep.alice if party == "alice" else rep.bob)[index]
        cores.append([np.array(e) for e in measure.elements])

    rng = philox_rng(seed)
    basis_per_step = []
    ranks_per_step = []  # ranks[k][i] at step z
    dens = []
    for z in range(len(families)):
        family = OperatorMeasure(np.stack(cores[z]), MeasureKind.POVM)
        ok, worst = check_pairwise_commuting(family, COMMUTATOR_TOL)
        if not ok:
            raise CommutationError(worst, COMMUTATOR_TOL)
        basis = simultaneous_diagonalize(cores[z], seed=int(rng.integers(0, 2**63)))
        bh = basis.conj().T
        for w in range(z, len(families)):  # processed cores are dead
            cores[w] = [bh @ mat @ basis for mat in cores[w]]
        lam = np.stack([np.real(np.diagonal(mat)) for mat in cores[z]])
        table = _snap_family(lam, max_den, tol)
        den = math.lcm(*(fr.denominator for row in table for fr in row))
        ranks = [
            [int(table[i][k] * den) for i in range(m)] for k in range(d0)
        ]
        basis_per_step.append(basis)
        ranks_per_step.append(ranks)
        dens.append(den)

    total_dim = d0 * math.prod(dens)
    if total_dim > max_dim:
        raise DimensionCapError(
            total_dim,
            max_dim,
            f"dilation blows up dimension by {math.prod(dens)}x",
        )

    # trailing[z] = product of the eigenbasis rotations applied after step
    # z; it maps step-z coordinates on the core factor to final ones
    trailing = [np.eye(d0, dtype=complex) for _ in families]
    acc = np.eye(d0, dtype=complex)
    for z in range(len(families) - 1, -1, -1):
        trailing[z] = acc.copy()
        acc = basis_per_step[z] @ acc

    def assemble(z: int) -> OperatorMeasure:
        den = dens[z]
        before = math.prod(dens[:z], start=1)
        after = math.prod(dens[z + 1 :], start=1)
        rest = before * den * after
        # projections of the core factor onto each step-z eigenvector,
        # expressed in the final basis
        c = trailing[z]
        elements = []
        for i in range(m):
            diag_rows = np.zeros((d0, rest))
            for k in range(d0):
                block = np.zeros(den)
                offset = sum(ranks_per_step[z][k][:i])
                block[offset : offset + ranks_per_step[z][k][i]] = 1.0
                diag_rows[k] = np.kron(
                    np.ones(before), np.kron(block, np.ones(after))
                )
            vec = c.conj().T  # columns: step-z eigenvectors in final frame
            # element = sum_k proj_k (x) diag(diag_rows[k])
            core_part = np.einsum("ak,bk->kab", vec, vec.conj())
            flat = np.einsum("kab,ks->abs", core_part, diag_rows)
            full = np.zeros((d0, rest, d0, rest), dtype=complex)
            idx = np.arange(rest)
            full[:, idx, :, idx] = flat.transpose(2, 0, 1)
            elements.append(full.reshape(total_dim, total_dim))
        return OperatorMeasure(np.stack(elements), MeasureKind.PVM)

    assembled = [assemble(z) for z in range(len(families))]
    alice = tuple(assembled[: rep.n_a])
    bob = tuple(assembled[rep.n_a :])
    return MaxEntRep(alice=alice, bob=bob)


def round_to_rational_spectrum(
    rep: MaxEntRep,
    eps: float,
    max_den: int,
    *,
    seed: int = 0,
) -> MaxEntRep:
    """Round every family's eigenvalues to rationals, moving the
    correlation by less than eps.

    Each family is diagonalized in a common eigenbasis and every
    eigenvector's outcome distribution is snapped to exact rationals
    within eps/2 of the originals (unit sum restored exactly), so the two
    per-party passes together shift any correlation entry by less than
    eps. All of a family's eigenvalues share the smallest feasible
    denominator: dilation multiplies the dimension by that denominator, so
    one common q per family beats individually closer fractions. The
    output is a commuting POVM representation with rational spectra, ready
    for :func:`dilate_commuting_rational`.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    rng = philox_rng(seed)
    bound = Fraction(eps) / 2

    def snap_family_common_den(lam: np.ndarray) -> np.ndarray:
        m, d = lam.shape
        for den in range(1, max_den + 1):
            columns = []
            for k in range(d):
                nums = simplex_numerators(lam[:, k], den, bound)
                if nums is None:
                    break
                columns.append(nums)
            else:
                return np.array(columns, dtype=float).T / den  # (m, d)
        raise RationalApproximationError(
            float(lam.max()), max_den, guaranteed_denominator(m, bound)
        )

    def round_family(measure: OperatorMeasure) -> OperatorMeasure:
        basis = _common_eigenbasis(measure, COMMUTATOR_TOL, int(rng.integers(0, 2**63)))
        lam = _diagonal_values(measure, basis)
        new_lam = snap_family_common_den(lam)
        bh = basis.conj().T
        elements = np.stack(
            [(basis * new_lam[i]) @ bh for i in range(measure.m)]
        )
        elements = (elements + np.conj(np.transpose(elements, (0, 2, 1)))) / 2.0
        return OperatorMeasure(elements, MeasureKind.POVM)

    return MaxEntRep(
        alice=tuple(round_family(meas) for meas in rep.alice),
        bob=tuple(round_family(meas) for meas in rep.bob),
    )
