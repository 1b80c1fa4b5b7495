"""Bundled reference geometries.

Six fans (the plane, the quadric, the one-point blowup, and the three
minimal rational surfaces F0 through F2) and one non-toric intersection
datum ship beside this module.  Lookups accept either a bare corpus name
or a filesystem path, and the MYLAB_CORPUS environment variable redirects
name lookups to a replacement directory without reinstalling.
"""

from __future__ import annotations

import json
import os
from importlib import resources
from pathlib import Path

from .. import intersect as ix
from .. import toric
from ..errors import UnknownLabel

ENV_VAR = "MYLAB_CORPUS"


def corpus_dir() -> Path:
    override = os.environ.get(ENV_VAR)
    if override:
        return Path(override)
    return Path(str(resources.files(__name__)))


def names() -> tuple:
    return tuple(sorted(p.stem for p in corpus_dir().glob("*.json")))


def resolve(spec) -> Path:
    """Filesystem path for a corpus name or a path-like spec."""
    p = Path(spec)
    if p.suffix == ".json" or os.sep in str(spec):
        if not p.exists():
            raise UnknownLabel("no such file: %s" % p)
        return p
    q = corpus_dir() / (str(spec) + ".json")
    if not q.exists():
        raise UnknownLabel(
            "%r is not in the corpus (have: %s)" % (spec, ", ".join(names()))
        )
    return q


def load_document(spec) -> dict:
    with open(resolve(spec), "r", encoding="utf-8") as fh:
        return json.load(fh)


def load_fan(spec) -> toric.ToricSurfaceFan:
    doc = load_document(spec)
    if "rays" not in doc:
        raise UnknownLabel("%s does not describe a fan" % spec)
    return toric.fan_from_dict(doc)


def load_intersection(spec) -> ix.IntersectionData:
    """Intersection datum from either kind of corpus file.

    Fan documents go through the toric intersection builder; datum
    documents load as stored.
    """
    doc = load_document(spec)
    if "rays" in doc:
        return toric.build_intersection_data(toric.fan_from_dict(doc))
    return ix.data_from_dict(doc)
