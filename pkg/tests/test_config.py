import copy
import json
from pathlib import Path

import pytest

from kernelconv.config import bundled_configs, load_config, parse_config
from kernelconv.errors import ValidationError
from kernelconv.sequences import FunctionalTail, PeriodicTail
from kernelconv.shapes import SlitDisc

ROOT = Path(__file__).resolve().parents[1]

MINIMAL = {
    "grid": {"origin": [-2, -2], "extent": [2, 2], "nx": 64, "ny": 64},
    "sequence": {
        "tail": {"kind": "constant", "shape": {"type": "disc", "center": [0, 0], "radius": 1}},
        "point_track": ["0", "0"],
        "declared_limit": [0, 0],
    },
}


def with_change(path, value):
    raw = copy.deepcopy(MINIMAL)
    node = raw
    for key in path[:-1]:
        node = node[key]
    if value is KeyError:
        del node[path[-1]]
    else:
        node[path[-1]] = value
    return raw


def test_bundled_pacman():
    cfg = load_config("pacman.json")
    assert isinstance(cfg.sequence.tail, FunctionalTail)
    assert isinstance(cfg.sequence.tail.template, SlitDisc)
    assert cfg.sequence.declared_limit == (0.0, 0.5)


def test_bundled_drunken():
    cfg = load_config("drunken.json")
    assert isinstance(cfg.sequence.tail, PeriodicTail) and cfg.sequence.tail.period == 2


@pytest.mark.parametrize("name", bundled_configs())
def test_every_bundled_config_validates(name):
    cfg = load_config(name)
    assert cfg.sequence is not None or cfg.field_seq is not None
    assert len(cfg.digest) == 64


def test_bundled_list():
    assert {"pacman.json", "drunken.json", "sj_profile.json", "graph.json"} <= set(bundled_configs())


@pytest.mark.parametrize("path,value,pointer", [
    (("grid",), KeyError, "/grid"),
    (("grid", "nx"), 2, "/grid/nx"),
    (("grid", "extent"), [-3, 2], "/grid"),
    (("sequence", "declared_limit"), [9, 9], "/sequence/declared_limit"),
    (("sequence", "point_track"), ["x", "0"], "/sequence"),
    (("sequence", "tail", "shape", "radius"), 0, "/sequence/tail/shape"),
    (("sequence", "tail", "shape", "radius"), "1 +* j", "/sequence/tail/shape"),
    (("sequence", "tail", "shape", "colour"), "red", "/sequence/tail/shape/colour"),
    (("sequence", "bogus"), 1, "/sequence/bogus"),
    (("params",), {"band": -1}, "/params/band"),
    (("field",), {"expr": "x + q", "limit": [0, 0]}, "/field"),
])
def test_validation_errors(path, value, pointer):
    with pytest.raises(ValidationError) as info:
        parse_config(with_change(path, value))
    assert info.value.path == pointer
    assert str(info.value).startswith(pointer + ":")


def test_unknown_top_level_key():
    raw = dict(MINIMAL, extra=1)
    with pytest.raises(ValidationError) as info:
        parse_config(raw)
    assert info.value.path == "/extra" and info.value.message == "unknown key"


def test_defaults_and_digest():
    cfg = parse_config(copy.deepcopy(MINIMAL))
    assert cfg.params == {"band": 2, "seed": 42, "trials": 50}
    reordered = json.loads(json.dumps(MINIMAL, sort_keys=True))
    assert parse_config(reordered).digest == cfg.digest
    assert parse_config(with_change(("grid", "nx"), 65)).digest != cfg.digest


def test_missing_file_and_bad_json(tmp_path):
    with pytest.raises(ValidationError):
        load_config(tmp_path / "nope.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    with pytest.raises(ValidationError) as info:
        load_config(bad)
    assert "line 1" in str(info.value)


def test_docs_schema_matches_package():
    docs = json.loads((ROOT / "docs" / "schema" / "config.schema.json").read_text())
    pkg = json.loads((ROOT / "src" / "kernelconv" / "data" / "config.schema.json").read_text())
    assert docs == pkg
