"""JSON artifact layouts shared by the command line and the service.

Numeric fields are serialized as strings: "p/q" for exact rationals,
repr() decimals for floating point, so repeated runs with identical
inputs emit identical bytes.  Builders are pure; file placement and
transport belong to the callers.
"""

from __future__ import annotations

import hashlib
from fractions import Fraction

from . import curvlab as cv
from . import intersect as ix
from . import solver
from .errors import NotAmple
from .exactpi import PiScalar

KEY_LEMMA_EPS = (Fraction(1, 10), Fraction(1, 20), Fraction(1, 40))


def piscalar_doc(ps: PiScalar) -> dict:
    return {
        "num": [ix.rat_str(c) for c in ps.num],
        "den": [ix.rat_str(c) for c in ps.den],
    }


def ample_class(data: ix.IntersectionData) -> ix.ClassVector:
    """The distinguished ample probe: the label "A" when present, else the
    sum of the ample-flagged generators."""
    if "A" in data.basis:
        return data.vector("A")
    if not data.ample:
        raise NotAmple("datum has no ample-flagged labels")
    total = None
    for lab in sorted(data.ample):
        v = data.vector(lab)
        total = v if total is None else total + v
    return total


def intersect_doc(data: ix.IntersectionData, spec: str, pairing=None) -> dict:
    doc = {
        "variety": str(spec),
        "n": data.n,
        "labels": list(data.basis),
        "c1_top": ix.rat_str(
            ix.intersection_number(data, ix.power(data.c1, data.n))
        ),
    }
    if data.n >= 2:
        doc["my_quantity"] = ix.rat_str(ix.my_quantity(data))
    if pairing is not None:
        classes = [data.vector(lab) for lab in pairing]
        doc["pairing"] = {
            "classes": list(pairing),
            "value": ix.rat_str(ix.intersection_number(data, classes)),
        }
    return doc


def toric_summary_doc(fan, data: ix.IntersectionData) -> dict:
    return {
        "rays": [list(v) for v in fan.rays],
        "m": fan.m,
        "c1_sq": ix.rat_str(ix.intersection_number(data, ix.power(data.c1, 2))),
        "c2": ix.rat_str(ix.c2_pairing(data, [])),
        "ample_labels": sorted(data.ample),
    }


def variety_report_doc(data: ix.IntersectionData, spec: str) -> dict:
    A = ample_class(data)
    rows = []
    for eps in KEY_LEMMA_EPS:
        ratio = ix.key_lemma_ratio(data, data.c1, A, eps)
        rows.append(
            {
                "eps": ix.rat_str(eps),
                "ratio": piscalar_doc(ratio),
                "value": repr(float(ratio)),
            }
        )
    return {
        "variety": str(spec),
        "n": data.n,
        "nu": ix.numerical_dimension(data, data.c1, A),
        "my_quantity": ix.rat_str(ix.my_quantity(data)),
        "calabi_limit": piscalar_doc(ix.calabi_limit(data, data.c1, A)),
        "key_lemma": rows,
    }


def chen_ogiue_doc(rep: cv.ChenOgiueReport) -> dict:
    return {
        "lhs": repr(float(rep.lhs)),
        "rhs": repr(float(rep.rhs)),
        "difference": repr(float(rep.difference)),
        "lower_bound": repr(float(rep.lower_bound)),
    }


def hym_doc(rep: cv.HymReport) -> dict:
    return {
        "mu": ix.rat_str(rep.mu),
        "residual": repr(float(rep.residual)),
        "a": repr(float(rep.a)),
        "points": len(rep.points),
    }


def tke_run_doc(
    config: solver.SolveConfig,
    eps_grid,
    results,
    theta_spec: str,
    profile_paths,
) -> dict:
    table = solver.approximate_ke_diagnostic(results)
    runs = []
    for (eps, l1, avg), res, path in zip(table.rows, results, profile_paths):
        runs.append(
            {
                "eps": repr(float(eps)),
                "residual": repr(float(res.residual)),
                "iterations": res.iterations,
                "converged": res.converged,
                "ricci_l1": repr(float(l1)),
                "scalar_avg": repr(float(avg)),
                "profile_csv": str(path),
            }
        )
    diagnostic = {
        "nu": table.nu,
        "bounded": table.bounded,
        "approaches_nu": table.approaches_nu,
    }
    if table.order is not None:
        diagnostic["order"] = repr(float(table.order))
    return {
        "command": "solve-tke",
        "config": {
            "n": config.n,
            "eps_grid": [repr(float(e)) for e in eps_grid],
            "tol": repr(float(config.newton_tol)),
            "max_iter": config.max_iter,
            "theta": str(theta_spec),
            "grid": {"T": repr(float(config.grid.T)), "nodes": config.grid.nodes},
        },
        "runs": runs,
        "diagnostic": diagnostic,
    }


def sha256_of(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def manifest_doc(command, inputs, versions, tolerances, outputs, wall_clock) -> dict:
    return {
        "command": [str(c) for c in command],
        "inputs": [
            {"path": str(p), "sha256": sha256_of(p)} for p in inputs
        ],
        "versions": {k: str(v) for k, v in versions.items()},
        "tolerances": {k: repr(float(v)) for k, v in tolerances.items()},
        "outputs": [str(p) for p in outputs],
        "wall_clock_seconds": repr(float(wall_clock)),
    }


def error_doc(exc: BaseException) -> dict:
    return {"error": type(exc).__name__, "message": str(exc)}
