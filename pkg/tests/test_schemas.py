"""Shipped JSON schemas: internal validity and conformance of real artifacts.

Every document the CLI or service can emit is built here through the
same code paths and validated against its schema, so a schema drift
fails loudly in CI rather than in a consumer.
"""

import json
from pathlib import Path

import jsonschema
import numpy as np
import pytest

import kahlerlab
from kahlerlab import artifacts, corpus
from kahlerlab import curvlab as cv
from kahlerlab import functionals as fn
from kahlerlab import intersect as ix
from kahlerlab import solver, toric
from kahlerlab.errors import NotNef
from kahlerlab.radial import Grid, KahlerProfile

SCHEMA_DIR = Path(kahlerlab.__file__).parent / "schemas"
SCHEMA_NAMES = (
    "chen_ogiue",
    "delta_report",
    "energy_report",
    "error",
    "fan",
    "frame",
    "hym",
    "intersect_report",
    "manifest",
    "model",
    "tke_run",
    "toric_summary",
    "variety",
    "variety_report",
)


def schema(name):
    with open(SCHEMA_DIR / ("%s.schema.json" % name)) as fh:
        return json.load(fh)


def check(name, doc):
    jsonschema.Draft7Validator(schema(name)).validate(doc)


@pytest.mark.parametrize("name", SCHEMA_NAMES)
def test_schema_is_valid_draft7(name):
    jsonschema.Draft7Validator.check_schema(schema(name))


def test_repo_level_schemas_dir_matches_package():
    repo = Path(__file__).parent.parent / "schemas"
    assert sorted(p.name for p in repo.glob("*.json")) == sorted(
        p.name for p in SCHEMA_DIR.glob("*.json")
    )
    for p in repo.glob("*.json"):
        assert p.read_bytes() == (SCHEMA_DIR / p.name).read_bytes()


def test_fan_documents_validate():
    for name in ("p2", "p1xp1", "bl1p2", "f0", "f1", "f2"):
        check("fan", corpus.load_document(name))


def test_variety_documents_validate():
    check("variety", corpus.load_document("dp9"))
    data = toric.build_intersection_data(corpus.load_fan("p2"))
    check("variety", ix.data_to_dict(data))


def test_variety_schema_rejects_malformed_rational():
    doc = corpus.load_document("dp9")
    doc["form"][0]["value"] = "1/0"
    with pytest.raises(jsonschema.ValidationError):
        check("variety", doc)


def test_model_documents_validate():
    check("model", {"model": "fs", "n": 2, "scale": "3"})
    check("model", {"model": "radial", "n": 1, "eps": 0.1, "profile": "run.csv"})
    check(
        "model",
        {
            "model": "product",
            "factors": [
                {"model": "fs", "n": 1, "scale": "1"},
                {"model": "fs", "n": 1, "scale": "2"},
            ],
        },
    )
    with pytest.raises(jsonschema.ValidationError):
        check("model", {"model": "spherical", "n": 2})


def test_energy_report_validates():
    grid = Grid()
    profile = KahlerProfile(1, 0.0, grid, np.zeros(grid.nodes + 1))
    doc = fn.report_to_dict(fn.energy_report(profile))
    check("energy_report", doc)
    # every value must be a parseable decimal, not a numpy repr
    for v in doc.values():
        float(v)


def test_delta_and_summary_validate():
    fan = corpus.load_fan("bl1p2")
    poly = toric.anticanonical_polytope(fan)
    check("delta_report", toric.delta_report_dict(poly, 2))
    data = toric.build_intersection_data(fan)
    check("toric_summary", artifacts.toric_summary_doc(fan, data))


def test_intersect_and_variety_reports_validate():
    data = corpus.load_intersection("dp9")
    check("intersect_report", artifacts.intersect_doc(data, "dp9"))
    check("intersect_report", artifacts.intersect_doc(data, "dp9", pairing=("A", "A")))
    check("variety_report", artifacts.variety_report_doc(data, "dp9"))


def test_tke_run_doc_validates():
    grid = Grid()
    eps_grid = (0.2, 0.1)
    results = solver.continuation_solve(1, eps_grid, grid=grid)
    config = solver.SolveConfig(
        n=1, eps=0.2, theta=solver.canonical_twist(grid, 0.2), grid=grid
    )
    doc = artifacts.tke_run_doc(
        config, eps_grid, results, "canonical", ["a.csv", "b.csv"]
    )
    check("tke_run", doc)


def test_frame_chen_ogiue_hym_docs_validate():
    model = cv.FubiniStudy(2, 3)
    check("frame", cv.frame_to_dict(cv.curvature_tensors(model, 0.4)))
    data = ix.projective_space(2)
    check("chen_ogiue", artifacts.chen_ogiue_doc(cv.chen_ogiue_check(model, data)))
    check("hym", artifacts.hym_doc(cv.hym_residual(model)))


def test_manifest_and_error_docs_validate(tmp_path):
    f = tmp_path / "in.json"
    f.write_text("{}")
    doc = artifacts.manifest_doc(
        command=["toric", "--fan", "p2"],
        inputs=[f],
        versions={"kahlerlab": kahlerlab.__version__},
        tolerances={"tol": 1e-8},
        outputs=[tmp_path / "out.json"],
        wall_clock=0.25,
    )
    check("manifest", doc)
    assert doc["inputs"][0]["sha256"] == artifacts.sha256_of(f)
    check("error", artifacts.error_doc(NotNef("offset 2 unrealized")))
