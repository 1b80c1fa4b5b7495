"""Bundled geometries: name resolution, env override, cross-module loading."""

import json

import pytest

from kahlerlab import corpus
from kahlerlab import intersect as ix
from kahlerlab.errors import UnknownLabel

ALL_NAMES = ("bl1p2", "dp9", "f0", "f1", "f2", "p1xp1", "p2")
FAN_NAMES = ("bl1p2", "f0", "f1", "f2", "p1xp1", "p2")


def test_names_lists_every_bundled_entry():
    assert corpus.names() == ALL_NAMES


def test_resolve_name_points_into_package():
    p = corpus.resolve("p2")
    assert p.exists()
    assert p.name == "p2.json"


def test_resolve_passes_paths_through(tmp_path):
    f = tmp_path / "custom.json"
    f.write_text(json.dumps({"rays": [[1, 0], [0, 1], [-1, -1]]}))
    assert corpus.resolve(str(f)) == f


def test_resolve_missing_path_raises():
    with pytest.raises(UnknownLabel, match="no such file"):
        corpus.resolve("definitely-not-here.json")


def test_resolve_unknown_name_lists_inventory():
    with pytest.raises(UnknownLabel, match="p1xp1"):
        corpus.resolve("nope")


def test_env_var_redirects_lookups(tmp_path, monkeypatch):
    (tmp_path / "solo.json").write_text(
        json.dumps({"rays": [[1, 0], [0, 1], [-1, -1]]})
    )
    monkeypatch.setenv(corpus.ENV_VAR, str(tmp_path))
    assert corpus.names() == ("solo",)
    fan = corpus.load_fan("solo")
    assert len(fan.rays) == 3
    with pytest.raises(UnknownLabel):
        corpus.resolve("p2")


def test_load_fan_rejects_non_fan_documents():
    with pytest.raises(UnknownLabel, match="fan"):
        corpus.load_fan("dp9")


@pytest.mark.parametrize("name", FAN_NAMES)
def test_every_fan_loads_and_builds(name):
    data = corpus.load_intersection(name)
    assert data.n == 2
    c1 = -data.vector(data.canonical)
    expected = 9 if name == "p2" else 8
    assert ix.intersection_number(data, [c1, c1]) == expected


def test_dp9_datum_loads_as_stored():
    data = corpus.load_intersection("dp9")
    c1 = -data.vector(data.canonical)
    assert ix.intersection_number(data, [c1, c1]) == 0
    assert ix.my_quantity(data) == 72
