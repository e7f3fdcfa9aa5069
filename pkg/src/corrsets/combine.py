"""Rational convex combinations by block direct sums.

A convex combination of trace-formula correlations with exactly rational
weights n_k/M is again a trace-formula correlation: repeat the k-th block
R_k * n_k times (R = product of block dimensions, R_k = R/d_k) inside a
block-diagonal measure at dimension R*M. This module plans those integer
block layouts, builds the combined representations, approximates real
weights by rationals with an exact unit sum, and provides the factorial
embeddings that realize the nested tower of fixed-dimension sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    DimensionCapError,
    RationalApproximationError,
    ShapeError,
    WeightError,
)
from .operators import MaxEntRep, MeasureKind, OperatorMeasure
from .tensors import Correlation, clamp_small_negatives

#: default cap on constructed operator dimensions
DIM_CAP = 4096


def as_weight(value) -> Fraction:
    """Coerce to an exact rational weight.

    Accepts Fractions, integers, ``"num/den"`` strings and (num, den)
    pairs. Floats are rejected on purpose: their exact binary expansion is
    almost never the rational the caller meant, and the block construction
    scales with the denominator. Use :func:`approximate_weights` first.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, tuple) and len(value) == 2:
        return Fraction(int(value[0]), int(value[1]))
    raise WeightError(
        f"expected an exact rational weight, got {value!r}; "
        "use approximate_weights to rationalize floats"
    )


def check_rational_weights(weights) -> list[Fraction]:
    weights = [as_weight(w) for w in weights]
    if not weights:
        raise WeightError("need at least one weight")
    if any(w < 0 for w in weights):
        raise WeightError("weights must be nonnegative")
    total = sum(weights)
    if total != 1:
        raise WeightError(f"weights must sum to exactly 1, got {total}")
    return weights


@dataclass(frozen=True)
class BlockPlan:
    """Integer layout of a rational block-direct-sum combination.

    ``common_den`` is M, ``numerators`` are the n_k with weight_k = n_k/M,
    ``dim_product`` is R = prod(d_k), ``dim_quotients`` are R_k = R/d_k,
    and block k appears R_k*n_k times, giving total dimension R*M.
    """

    common_den: int
    numerators: tuple[int, ...]
    block_dims: tuple[int, ...]
    dim_product: int
    dim_quotients: tuple[int, ...]
    total_dim: int

    def copies(self, k: int) -> int:
        """Number of repetitions of block k in the direct sum."""
        return self.dim_quotients[k] * self.numerators[k]


def plan_blocks(dims, weights, *, max_dim: int = DIM_CAP) -> BlockPlan:
    """Compute the integer block layout for the given dims and weights."""
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims):
        raise ShapeError("block dimensions must be positive")
    weights = check_rational_weights(weights)
    if len(weights) != len(dims):
        raise ShapeError(f"{len(dims)} dims but {len(weights)} weights")
    common_den = math.lcm(*(w.denominator for w in weights))
    numerators = tuple(int(w.numerator * (common_den // w.denominator)) for w in weights)
    dim_product = math.prod(dims)
    dim_quotients = tuple(dim_product // d for d in dims)
    total_dim = dim_product * common_den
    assert sum(q * d * n for q, d, n in zip(dim_quotients, dims, numerators)) == total_dim
    if total_dim > max_dim:
        raise DimensionCapError(total_dim, max_dim, "rational combination")
    return BlockPlan(
        common_den=common_den,
        numerators=numerators,
        block_dims=tuple(dims),
        dim_product=dim_product,
        dim_quotients=dim_quotients,
        total_dim=total_dim,
    )


def _direct_sum(blocks, total_dim: int) -> np.ndarray:
    out = np.zeros((total_dim, total_dim), dtype=complex)
    offset = 0
    for block in blocks:
        d = block.shape[0]
        out[offset : offset + d, offset : offset + d] = block
        offset += d
    if offset != total_dim:
        raise ShapeError(f"blocks fill {offset} of {total_dim} dimensions")
    return out


def rational_combination(reps, weights, *, max_dim: int = DIM_CAP) -> MaxEntRep:
    """Block-diagonal representation of sum_k (n_k/M) p_k.

    Evaluating the result reproduces the entrywise convex combination of
    the input evaluations to machine precision, and synchrony (alice ==
    bob) is preserved blockwise.
    """
    reps = list(reps)
    if not reps:
        raise ShapeError("need at least one representation")
    first = reps[0]
    for rep in reps:
        if (rep.n_a, rep.n_b, rep.m) != (first.n_a, first.n_b, first.m):
            raise ShapeError("representations must share (n_a, n_b, m)")
        if rep.kind is not MeasureKind.PVM:
            raise ShapeError("rational combination requires PVM representations")
    plan = plan_blocks([rep.d for rep in reps], weights, max_dim=max_dim)

    def combined(measures_at):
        out = []
        for i in range(first.m):
            blocks = []
            for k, rep in enumerate(reps):
                element = measures_at(rep).elements[i]
                blocks.extend([element] * plan.copies(k))
            out.append(_direct_sum(blocks, plan.total_dim))
        return OperatorMeasure(np.stack(out), MeasureKind.PVM)

    alice = tuple(combined(lambda rep, x=x: rep.alice[x]) for x in range(first.n_a))
    bob = tuple(combined(lambda rep, y=y: rep.bob[y]) for y in range(first.n_b))
    return MaxEntRep(alice=alice, bob=bob)


def simplex_numerators(values, den: int, bound: Fraction) -> list[int] | None:
    """Integer numerators n_k with sum(n_k) = den and |v_k - n_k/den| < bound,
    or None if the denominator cannot host this probability vector.

    The unit sum is restored by adjusting the entry with the largest value,
    which must stay inside its own window; all window checks are exact
    rational comparisons, so the outcome is deterministic.
    """
    values = [float(v) for v in values]
    nums = [max(int(round(v * den)), 0) for v in values]
    deficit = den - sum(nums)
    if deficit:
        largest = max(range(len(values)), key=lambda k: values[k])
        nums[largest] += deficit
        if nums[largest] < 0:
            return None
    for v, n in zip(values, nums):
        if abs(Fraction(v) - Fraction(n, den)) >= bound:
            return None
    return nums


def guaranteed_denominator(count: int, bound) -> int:
    """A denominator at which :func:`simplex_numerators` always succeeds:
    rounding errors are at most 1/(2q) per entry plus the accumulated
    repair, so q > (count + 1) / (2 * bound) suffices."""
    return math.floor((count + 1) / (2 * Fraction(bound))) + 1


def snap_to_rational_simplex(values, bound, max_den: int) -> list[Fraction]:
    """Rationals within ``bound`` of each value, summing exactly to 1.

    All entries share the smallest feasible denominator: later direct sums
    and dilations scale with (the lcm of) the denominators, so one common
    small q beats individually closer fractions with unrelated ones.
    """
    values = [float(v) for v in values]
    if abs(sum(values) - 1.0) > 1e-9:
        raise WeightError(f"values sum to {sum(values)!r}, not 1")
    bound = Fraction(bound)
    if bound <= 0:
        raise WeightError("bound must be positive")
    for den in range(1, max_den + 1):
        nums = simplex_numerators(values, den, bound)
        if nums is not None:
            return [Fraction(n, den) for n in nums]
    raise RationalApproximationError(
        float(max(values)), max_den, guaranteed_denominator(len(values), bound)
    )


def approximate_weights(targets, eps: float, max_den: int) -> list[Fraction]:
    """Rational weights within eps/N of the targets, summing exactly to 1.

    Feeding the result to :func:`rational_combination` keeps the combined
    correlation within eps of the target combination in sup distance.
    """
    targets = [float(t) for t in targets]
    if any(t < 0 for t in targets):
        raise WeightError("targets must be nonnegative")
    if abs(sum(targets) - 1.0) > 1e-12:
        raise WeightError(f"targets sum to {sum(targets)!r}, not 1")
    if eps <= 0:
        raise WeightError("eps must be positive")
    return snap_to_rational_simplex(targets, Fraction(eps) / len(targets), max_den)


def embed_factorial(rep: MaxEntRep, copies: int, *, max_dim: int = DIM_CAP) -> MaxEntRep:
    """Direct sum of ``copies`` copies of every operator.

    The evaluated correlation is unchanged (the trace scales with the copy
    count and the 1/d normalization cancels it); this is the embedding that
    realizes dimension-d correlations inside every multiple of d, and hence
    the factorial tower.
    """
    copies = int(copies)
    if copies < 1:
        raise ShapeError("copies must be >= 1")
    new_dim = rep.d * copies
    if new_dim > max_dim:
        raise DimensionCapError(new_dim, max_dim, "factorial embedding")
    eye = np.eye(copies)

    def expand(meas: OperatorMeasure) -> OperatorMeasure:
        return OperatorMeasure(
            np.stack([np.kron(eye, e) for e in meas.elements]), meas.kind
        )

    return MaxEntRep(
        alice=tuple(expand(meas) for meas in rep.alice),
        bob=tuple(expand(meas) for meas in rep.bob),
    )


def synchronous_from_blocks(block_pvms, trace_weights) -> Correlation:
    """Synchronous correlation from matrix blocks and trace weights.

    ``block_pvms[k]`` is the list of per-input PVMs of the k-th matrix
    block (dimension n_k); the same measures serve both parties. The
    output is p(i,j|x,y) = sum_k (t_k/n_k) Tr(E_k[x][i] E_k[y][j]), the
    correlation of the tracial state with block weights t_k, which is
    synchronous and symmetric. The weights may be irrational; they only
    need to be positive and sum to 1 within 1e-12.
    """
    block_pvms = [tuple(measures) for measures in block_pvms]
    trace_weights = [float(t) for t in trace_weights]
    if not block_pvms:
        raise ShapeError("need at least one block")
    if len(block_pvms) != len(trace_weights):
        raise WeightError(f"{len(block_pvms)} blocks but {len(trace_weights)} weights")
    if any(t <= 0 for t in trace_weights):
        raise WeightError("trace weights must be positive")
    if abs(sum(trace_weights) - 1.0) > 1e-12:
        raise WeightError(f"trace weights sum to {sum(trace_weights)!r}, not 1")
    n = len(block_pvms[0])
    m = block_pvms[0][0].m
    for measures in block_pvms:
        if len(measures) != n:
            raise ShapeError("blocks must share the input count")
        for meas in measures:
            if meas.m != m or meas.d != measures[0].d:
                raise ShapeError("measures within a block must share (d, m)")

    values = np.zeros((n, n, m, m))
    for measures, t in zip(block_pvms, trace_weights):
        stacked = np.stack([meas.elements for meas in measures])
        block = np.einsum("xiab,yjba->xyij", stacked, stacked, optimize=True).real
        values += (t / measures[0].d) * block
    return Correlation(n, n, m, clamp_small_negatives(values, 1e-10))
