"""JSON round trips for every public type.

Floats are emitted with 17 significant digits (`%.17g`), which round-trips
IEEE doubles exactly and makes output bytes reproducible; complex matrices
serialize as rows of [re, im] pairs; rational weights as "num/den"
strings. Correlations are flat row-major in (x, y, i, j) order. Small
negative correlation entries (within the clamp tolerance) are zeroed on
load, larger ones rejected.
"""

from __future__ import annotations

import json
from fractions import Fraction

import numpy as np

from .combine import BlockPlan
from .membership import BellFunctional, MembershipVerdict
from .operators import MaxEntRep, MeasureKind, OperatorMeasure, StateRep
from .tensors import (
    EXACT_TOL,
    Correlation,
    MarginalPair,
    ValidityReport,
)

__all__ = [
    "dumps",
    "loads",
    "correlation_to_obj",
    "correlation_from_obj",
    "matrix_to_obj",
    "matrix_from_obj",
    "measure_to_obj",
    "measure_from_obj",
    "rep_to_obj",
    "rep_from_obj",
    "state_rep_to_obj",
    "state_rep_from_obj",
    "plan_to_obj",
    "weights_to_obj",
    "weights_from_obj",
    "marginal_pair_to_obj",
    "validity_to_obj",
    "functional_to_obj",
    "functional_from_obj",
    "verdict_to_obj",
]


def format_float(x: float) -> str:
    if not np.isfinite(x):
        raise ValueError(f"cannot serialize non-finite float {x!r}")
    return format(float(x), ".17g")


def _emit(obj, out: list[str]) -> None:
    if isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif obj is None:
        out.append("null")
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(float(obj)))
    elif isinstance(obj, dict):
        out.append("{")
        for n, (key, value) in enumerate(obj.items()):
            if n:
                out.append(",")
            out.append(json.dumps(str(key)))
            out.append(":")
            _emit(value, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for n, value in enumerate(obj):
            if n:
                out.append(",")
            _emit(value, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    """Deterministic JSON text with 17-significant-digit floats."""
    out: list[str] = []
    _emit(obj, out)
    return "".join(out)


def loads(text: str):
    """Plain ``json.loads``; decode errors carry line/column positions."""
    return json.loads(text)


# -- correlations -----------------------------------------------------------


def correlation_to_obj(p: Correlation) -> dict:
    return {
        "n_a": p.n_a,
        "n_b": p.n_b,
        "m": p.m,
        "values": [float(v) for v in p.values.reshape(-1)],
    }


def correlation_from_obj(obj: dict, *, neg_tol: float = EXACT_TOL) -> Correlation:
    n_a, n_b, m = int(obj["n_a"]), int(obj["n_b"]), int(obj["m"])
    values = np.array([float(v) for v in obj["values"]], dtype=float)
    expected = n_a * n_b * m * m
    if values.size != expected:
        raise ValueError(f"expected {expected} values, got {values.size}")
    low = float(values.min(initial=0.0))
    if low < -neg_tol:
        raise ValueError(f"entry {low!r} is negative beyond the clamp tolerance")
    values[values < 0] = 0.0
    return Correlation(n_a, n_b, m, values.reshape(n_a, n_b, m, m))


# -- matrices and measures --------------------------------------------------


def matrix_to_obj(mat: np.ndarray) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(mat, complex)]


def matrix_from_obj(obj) -> np.ndarray:
    rows = []
    for row in obj:
        rows.append([complex(float(re), float(im)) for re, im in row])
    mat = np.array(rows, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    return mat


def measure_to_obj(measure: OperatorMeasure) -> dict:
    return {
        "d": measure.d,
        "m": measure.m,
        "kind": measure.kind.value,
        "elements": [matrix_to_obj(e) for e in measure.elements],
    }


def measure_from_obj(obj: dict, default_kind: str = "pvm") -> OperatorMeasure:
    kind = MeasureKind(obj.get("kind", default_kind))
    elements = np.stack([matrix_from_obj(e) for e in obj["elements"]])
    return OperatorMeasure(elements, kind)


def rep_to_obj(rep: MaxEntRep) -> dict:
    return {
        "d": rep.d,
        "m": rep.m,
        "kind": rep.kind.value,
        "alice": [[matrix_to_obj(e) for e in meas.elements] for meas in rep.alice],
        "bob": [[matrix_to_obj(e) for e in meas.elements] for meas in rep.bob],
    }


def rep_from_obj(obj: dict, default_kind: str = "pvm") -> MaxEntRep:
    kind = MeasureKind(obj.get("kind", default_kind))

    def measures(rows):
        return tuple(
            OperatorMeasure(np.stack([matrix_from_obj(e) for e in row]), kind)
            for row in rows
        )

    return MaxEntRep(alice=measures(obj["alice"]), bob=measures(obj["bob"]))


def state_rep_to_obj(rep: StateRep) -> dict:
    return {
        "d_a": rep.d_a,
        "d_b": rep.d_b,
        "kind": rep.alice[0].kind.value,
        "alice": [[matrix_to_obj(e) for e in meas.elements] for meas in rep.alice],
        "bob": [[matrix_to_obj(e) for e in meas.elements] for meas in rep.bob],
        "state": [[float(v.real), float(v.imag)] for v in rep.state],
    }


def state_rep_from_obj(obj: dict, default_kind: str = "pvm") -> StateRep:
    kind = MeasureKind(obj.get("kind", default_kind))

    def measures(rows):
        return tuple(
            OperatorMeasure(np.stack([matrix_from_obj(e) for e in row]), kind)
            for row in rows
        )

    state = np.array([complex(float(re), float(im)) for re, im in obj["state"]])
    return StateRep(alice=measures(obj["alice"]), bob=measures(obj["bob"]), state=state)


# -- plans, weights, reports ------------------------------------------------


def plan_to_obj(plan: BlockPlan) -> dict:
    return {
        "M": plan.common_den,
        "n": list(plan.numerators),
        "R": plan.dim_product,
        "R_k": list(plan.dim_quotients),
        "total_dim": plan.total_dim,
    }


def weights_to_obj(weights) -> list[str]:
    return [f"{Fraction(w).numerator}/{Fraction(w).denominator}" for w in weights]


def weights_from_obj(obj) -> list[Fraction]:
    return [Fraction(str(w)) for w in obj]


def marginal_pair_to_obj(pair: MarginalPair) -> dict:
    return {
        "alice": [[float(v) for v in row] for row in pair.alice],
        "bob": [[float(v) for v in row] for row in pair.bob],
        "well_defined": bool(pair.well_defined),
        "max_signalling_defect": float(pair.max_signalling_defect),
    }


def validity_to_obj(report: ValidityReport) -> dict:
    return {
        "ok": bool(report.ok),
        "violations": list(report.violations),
        "worst_residual": float(report.worst_residual),
    }


def functional_to_obj(functional: BellFunctional) -> dict:
    shape = functional.coefficients.shape
    return {
        "n_a": shape[0],
        "n_b": shape[1],
        "m": shape[2],
        "coefficients": [float(v) for v in functional.coefficients.reshape(-1)],
        "offset": float(functional.offset),
    }


def functional_from_obj(obj: dict) -> BellFunctional:
    n_a, n_b, m = int(obj["n_a"]), int(obj["n_b"]), int(obj["m"])
    coefficients = np.array([float(v) for v in obj["coefficients"]])
    expected = n_a * n_b * m * m
    if coefficients.size != expected:
        raise ValueError(f"expected {expected} coefficients, got {coefficients.size}")
    return BellFunctional(
        coefficients=coefficients.reshape(n_a, n_b, m, m),
        offset=float(obj.get("offset", 0.0)),
    )


def verdict_to_obj(verdict: MembershipVerdict) -> dict:
    obj = {"status": verdict.status, "inside": verdict.inside}
    if verdict.weights is not None:
        obj["weights"] = [[v, w] for v, w in verdict.weights]
    if verdict.certificate is not None:
        obj["certificate"] = functional_to_obj(verdict.certificate)
        obj["classical_bound"] = float(verdict.classical_bound)
        obj["achieved_value"] = float(verdict.achieved_value)
    return obj
