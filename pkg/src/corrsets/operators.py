"""Operator measures and representations on maximally entangled states.

An operator measure is an ordered list of Hermitian d x d matrices summing
to the identity: projection-valued (PVM) when each element is idempotent,
positive-operator-valued (POVM) when each is merely positive. A
:class:`MaxEntRep` holds one measure per input per party and is evaluated
by the normalized trace formula

    p(i,j|x,y) = Tr(alice[x][i] . bob[y][j]) / d.

Bob's stored matrices are the post-transpose operators, so the formula
carries no transpose; :func:`canonicalize` absorbs it when converting a
state-vector representation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ShapeError
from .linalg import haar_unitary, jacobi_eigh, philox_rng
from .tensors import Correlation, ValidityReport, clamp_small_negatives

HERMITIAN_TOL = 1e-12
MEASURE_TOL = 1e-9
#: entries of evaluated correlations may dip this far below zero before
#: being clamped
EVAL_CLAMP = 1e-10


class MeasureKind(str, enum.Enum):
    PVM = "pvm"
    POVM = "povm"


@dataclass(frozen=True, eq=False)
class OperatorMeasure:
    """m Hermitian d x d matrices declared as a PVM or POVM.

    ``elements`` is stored as a read-only complex array of shape (m, d, d).
    Construction checks structure only; see :func:`validate_measure`.
    """

    elements: np.ndarray
    kind: MeasureKind

    def __post_init__(self):
        elements = np.array(self.elements, dtype=complex)
        if elements.ndim != 3 or elements.shape[1] != elements.shape[2]:
            raise ShapeError(f"expected (m, d, d) elements, got {elements.shape}")
        if elements.shape[0] < 1:
            raise ShapeError("a measure needs at least one element")
        elements.flags.writeable = False
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "kind", MeasureKind(self.kind))

    @property
    def m(self) -> int:
        return self.elements.shape[0]

    @property
    def d(self) -> int:
        return self.elements.shape[1]


def is_hermitian(mat: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return bool(np.max(np.abs(mat - mat.conj().T)) <= tol)


def validate_measure(measure: OperatorMeasure) -> ValidityReport:
    """Check hermiticity, completeness, and the declared-kind property.

    PVM elements must satisfy ||E^2 - E||_max <= 1e-9; POVM elements must
    have eigenvalues >= -1e-9. The report lists every failed constraint
    with the worst residual seen.
    """
    violations = []
    worst = 0.0
    herm_ok = True
    for i in range(measure.m):
        e = measure.elements[i]
        residual = float(np.max(np.abs(e - e.conj().T)))
        if residual > HERMITIAN_TOL:
            violations.append(f"element {i} is not Hermitian (residual {residual:.3e})")
            worst = max(worst, residual)
            herm_ok = False
    total = measure.elements.sum(axis=0)
    residual = float(np.max(np.abs(total - np.eye(measure.d))))
    if residual > MEASURE_TOL:
        violations.append(f"elements sum to identity with residual {residual:.3e}")
        worst = max(worst, residual)
    if herm_ok:
        for i in range(measure.m):
            e = measure.elements[i]
            if measure.kind is MeasureKind.PVM:
                residual = float(np.max(np.abs(e @ e - e)))
                if residual > MEASURE_TOL:
                    violations.append(
                        f"element {i} is not idempotent (residual {residual:.3e})"
                    )
                    worst = max(worst, residual)
            else:
                eigenvalues, _ = jacobi_eigh(e)
                low = float(eigenvalues[0])
                if low < -MEASURE_TOL:
                    violations.append(
                        f"element {i} has negative eigenvalue {low:.3e}"
                    )
                    worst = max(worst, -low)
    return ValidityReport(ok=not violations, violations=tuple(violations), worst_residual=worst)


def _as_measure_tuple(measures, what: str) -> tuple[OperatorMeasure, ...]:
    measures = tuple(measures)
    if not measures:
        raise ShapeError(f"{what} needs at least one measure")
    d, m = measures[0].d, measures[0].m
    for meas in measures:
        if meas.d != d or meas.m != m:
            raise ShapeError(f"{what} measures must share (d, m)")
    return measures


@dataclass(frozen=True, eq=False)
class MaxEntRep:
    """Per-input operator measures for both parties at a common dimension,
    evaluated on the canonical maximally entangled state via the trace
    formula (Bob's matrices stored post-transpose)."""

    alice: tuple[OperatorMeasure, ...]
    bob: tuple[OperatorMeasure, ...]

    def __post_init__(self):
        alice = _as_measure_tuple(self.alice, "alice")
        bob = _as_measure_tuple(self.bob, "bob")
        if alice[0].d != bob[0].d or alice[0].m != bob[0].m:
            raise ShapeError("parties must share (d, m)")
        kinds = {meas.kind for meas in alice + bob}
        if len(kinds) != 1:
            raise ShapeError("measure kind must be uniform across the rep")
        object.__setattr__(self, "alice", alice)
        object.__setattr__(self, "bob", bob)

    @property
    def d(self) -> int:
        return self.alice[0].d

    @property
    def m(self) -> int:
        return self.alice[0].m

    @property
    def n_a(self) -> int:
        return len(self.alice)

    @property
    def n_b(self) -> int:
        return len(self.bob)

    @property
    def kind(self) -> MeasureKind:
        return self.alice[0].kind

    def alice_array(self) -> np.ndarray:
        """Stacked Alice elements, shape (n_a, m, d, d)."""
        return np.stack([meas.elements for meas in self.alice])

    def bob_array(self) -> np.ndarray:
        return np.stack([meas.elements for meas in self.bob])


@dataclass(frozen=True, eq=False)
class StateRep:
    """A representation (H_A, H_B, {E}, {F}, phi) with explicit state
    vector in the lexicographic product basis."""

    alice: tuple[OperatorMeasure, ...]
    bob: tuple[OperatorMeasure, ...]
    state: np.ndarray

    def __post_init__(self):
        alice = _as_measure_tuple(self.alice, "alice")
        bob = _as_measure_tuple(self.bob, "bob")
        if alice[0].m != bob[0].m:
            raise ShapeError("parties must share the outcome count m")
        state = np.array(self.state, dtype=complex).reshape(-1)
        if state.size != alice[0].d * bob[0].d:
            raise ShapeError(
                f"state length {state.size} != d_a*d_b = {alice[0].d * bob[0].d}"
            )
        norm = float(np.linalg.norm(state))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state is not a unit vector (norm {norm!r})")
        state.flags.writeable = False
        object.__setattr__(self, "alice", alice)
        object.__setattr__(self, "bob", bob)
        object.__setattr__(self, "state", state)

    @property
    def d_a(self) -> int:
        return self.alice[0].d

    @property
    def d_b(self) -> int:
        return self.bob[0].d

    @property
    def m(self) -> int:
        return self.alice[0].m


@dataclass(frozen=True, eq=False)
class SchmidtForm:
    """Schmidt data of a bipartite vector: positive coefficients sorted
    descending and the matching orthonormal basis vectors (as rows)."""

    coefficients: np.ndarray
    left_basis: np.ndarray
    right_basis: np.ndarray


def eval_max_ent(rep: MaxEntRep) -> Correlation:
    """Evaluate the normalized trace formula p(i,j|x,y) = Tr(A B)/d."""
    a = rep.alice_array()
    b = rep.bob_array()
    values = np.einsum("xiab,yjba->xyij", a, b, optimize=True)
    real = np.real(values) / rep.d
    return Correlation(rep.n_a, rep.n_b, rep.m, clamp_small_negatives(real, EVAL_CLAMP))


def eval_state_rep(rep: StateRep) -> Correlation:
    """Evaluate p(i,j|x,y) = <(E_{x,i} (x) F_{y,j}) phi, phi> directly."""
    phi = rep.state.reshape(rep.d_a, rep.d_b)
    a = np.stack([meas.elements for meas in rep.alice])
    b = np.stack([meas.elements for meas in rep.bob])
    values = np.einsum("ab,xiac,cd,yjbd->xyij", phi.conj(), a, phi, b, optimize=True)
    imag = float(np.max(np.abs(values.imag)))
    if imag > EVAL_CLAMP:
        raise ValueError(f"evaluation produced imaginary residue {imag:.3e}")
    real = clamp_small_negatives(values.real, EVAL_CLAMP)
    return Correlation(len(rep.alice), len(rep.bob), rep.m, real)


def schmidt_decompose(state, d_a: int, d_b: int) -> SchmidtForm:
    """Schmidt decomposition of a unit vector in the product basis.

    Coefficients below 1e-12 are dropped; the remaining ones are the
    singular values of the d_a x d_b reshaping, in the (descending) order
    the singular-value routine produces.
    """
    state = np.asarray(state, dtype=complex).reshape(-1)
    if state.size != d_a * d_b:
        raise ShapeError(f"state length {state.size} != {d_a}*{d_b}")
    norm = float(np.linalg.norm(state))
    if norm <= 1e-12:
        raise ValueError("cannot decompose the zero vector")
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"state is not a unit vector (norm {norm!r})")
    u, s, vh = np.linalg.svd(state.reshape(d_a, d_b))
    keep = s > 1e-12
    return SchmidtForm(
        coefficients=s[keep].copy(),
        left_basis=u.T[keep].copy(),
        right_basis=vh[keep].copy(),
    )


def reconstruct_schmidt(form: SchmidtForm) -> np.ndarray:
    """Inverse of :func:`schmidt_decompose` (flattened product basis)."""
    return np.einsum("k,ka,kb->ab", form.coefficients.astype(complex),
                     form.left_basis, form.right_basis).reshape(-1)


def is_maximally_entangled(state, d_a: int, d_b: int, tol: float = 1e-9) -> bool:
    """True iff d_a == d_b and every Schmidt coefficient equals 1/sqrt(d)."""
    if d_a != d_b:
        return False
    state = np.asarray(state, dtype=complex).reshape(-1)
    if state.size != d_a * d_b:
        raise ShapeError(f"state length {state.size} != {d_a}*{d_b}")
    s = np.linalg.svd(state.reshape(d_a, d_b), compute_uv=False)
    return bool(np.max(np.abs(s - 1.0 / np.sqrt(d_a))) <= tol)


def canonicalize(rep: StateRep, tol: float = 1e-9) -> MaxEntRep:
    """Rotate a maximally entangled state representation to canonical form.

    The state is brought to (1/sqrt(d)) sum_k e_k (x) e_k; Alice's operators
    are rotated accordingly and Bob's are rotated *and transposed*, so the
    returned rep evaluates with the bare trace formula. For a maximally
    entangled state phi, sqrt(d) * reshape(phi) is a unitary W whose rows
    are Bob's Schmidt basis against Alice's canonical one, so the left
    rotation is the identity and the right rotation is conj(W).
    """
    if rep.d_a != rep.d_b:
        raise ValueError("maximally entangled states need d_a == d_b")
    d = rep.d_a
    if not is_maximally_entangled(rep.state, d, d, tol):
        raise ValueError("state is not maximally entangled within tolerance")
    w = rep.state.reshape(d, d) * np.sqrt(d)
    v = w.conj()
    vh = v.conj().T
    kind = rep.alice[0].kind
    alice = tuple(OperatorMeasure(meas.elements.copy(), kind) for meas in rep.alice)
    bob = tuple(
        OperatorMeasure(
            np.stack([(v @ f @ vh).T for f in meas.elements]), meas.kind
        )
        for meas in rep.bob
    )
    return MaxEntRep(alice=alice, bob=bob)


def random_pvm(d: int, m: int, ranks, seed: int) -> OperatorMeasure:
    """Seeded random PVM with prescribed element ranks.

    Conjugates the canonical consecutive-slot diagonal projections by a
    Haar-random unitary drawn from a counter-based generator, so the same
    seed reproduces the same measure bit for bit.
    """
    ranks = [int(r) for r in ranks]
    if len(ranks) != m:
        raise ShapeError(f"expected {m} ranks, got {len(ranks)}")
    if any(r < 0 for r in ranks):
        raise ShapeError("ranks must be nonnegative")
    if sum(ranks) != d:
        raise ShapeError(f"ranks sum to {sum(ranks)}, must equal d = {d}")
    u = haar_unitary(d, philox_rng(seed))
    uh = u.conj().T
    elements = np.zeros((m, d, d), dtype=complex)
    offset = 0
    for i, r in enumerate(ranks):
        diag = np.zeros(d)
        diag[offset : offset + r] = 1.0
        offset += r
        elements[i] = (u * diag) @ uh
    return OperatorMeasure(elements, MeasureKind.PVM)


def random_povm(d: int, m: int, seed: int) -> OperatorMeasure:
    """Seeded random POVM via Gram normalization of Ginibre matrices."""
    rng = philox_rng(seed)
    raw = []
    for _ in range(m):
        x = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
        raw.append(x @ x.conj().T)
    total = sum(raw)
    w, v = jacobi_eigh(total)
    inv_sqrt = (v * (1.0 / np.sqrt(w))) @ v.conj().T
    elements = np.stack([inv_sqrt @ a @ inv_sqrt for a in raw])
    elements = (elements + np.conj(np.transpose(elements, (0, 2, 1)))) / 2.0
    return OperatorMeasure(elements, MeasureKind.POVM)


def _random_ranks(d: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform random composition of d into m nonnegative parts."""
    return np.bincount(rng.integers(0, m, size=d), minlength=m)


def random_max_ent_rep(
    d: int,
    m: int,
    n_a: int,
    n_b: int,
    seed: int,
    kind: MeasureKind = MeasureKind.PVM,
) -> MaxEntRep:
    """Seeded random representation: one random measure per input."""
    rng = philox_rng(seed)
    kind = MeasureKind(kind)

    def draw():
        child = int(rng.integers(0, 2**63))
        if kind is MeasureKind.PVM:
            return random_pvm(d, m, _random_ranks(d, m, rng), child)
        return random_povm(d, m, child)

    alice = tuple(draw() for _ in range(n_a))
    bob = tuple(draw() for _ in range(n_b))
    return MaxEntRep(alice=alice, bob=bob)
