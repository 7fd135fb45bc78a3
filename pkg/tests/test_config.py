import json
import pathlib

import pytest

from semipositone.config import DEFAULTS, dump_config, lambda_list, load_config, parse_config
from semipositone.errors import ConfigurationError

CONFIGS = pathlib.Path(__file__).resolve().parent.parent / "configs"
GOOD = ["sublinear_m1", "step_weight", "bounded_m1", "singular_m1", "square_2d"]


@pytest.mark.parametrize("name", GOOD)
def test_shipped_configs_parse_and_round_trip(name):
    s, opts = parse_config(load_config(CONFIGS / f"{name}.json"))
    s2, opts2 = parse_config(json.loads(dump_config(s, opts)))
    assert s2 == s and opts2 == opts
    assert dump_config(s2, opts2) == dump_config(s, opts)


def test_bad_config_rejected():
    with pytest.raises(ConfigurationError, match="k must be >= 0"):
        parse_config(load_config(CONFIGS / "bad.json"))


def test_defaults_and_shorthands():
    s, opts = parse_config({"domain": [0, 1], "nonlinearity": {"family": "F3", "p": 0.5}, "k": 0.1, "lambda": 5})
    assert s.resolution == DEFAULTS["resolution_1d"]
    assert s.pipeline == "singular" and s.delta is None
    assert s.tol == DEFAULTS["tol"] and s.residual_tol == DEFAULTS["residual"]
    assert opts == {"lambda": {"value": 5.0}, "csv": "sweep.csv", "profile": "solution.txt"}
    s2, _ = parse_config({"domain": [[0, 1], [0, 2]], "nonlinearity": {"family": "F1", "p": 0.5}, "k": 1})
    assert s2.resolution == tuple(DEFAULTS["resolution_2d"])


@pytest.mark.parametrize(
    "patch",
    [
        {"colour": "red"},
        {"k": "many"},
        {"k": float("nan")},
        {"domain": [1, 0]},
        {"domain": [0, 1, 2]},
        {"nonlinearity": {"family": "F1", "p": 0.5, "x": 1}},
        {"nonlinearity": "F1"},
        {"pipeline": "bounded"},
        {"pipeline": 3},
        {"lambda": "lots"},
    ],
)
def test_invalid_entries(patch):
    cfg = {"domain": [0, 1], "nonlinearity": {"family": "F1", "p": 0.5}, "k": 1.0}
    cfg.update(patch)
    with pytest.raises(ConfigurationError):
        parse_config(cfg)


def test_missing_key():
    with pytest.raises(ConfigurationError, match="missing"):
        parse_config({"domain": [0, 1], "k": 1.0})


def test_lambda_list():
    assert lambda_list({"values": [3, 1]}) == [3.0, 1.0]
    vals = lambda_list({"range": [1, 100], "count": 3})
    assert vals == pytest.approx([1, 10, 100])
    assert len(lambda_list({"range": [1, 100]})) == DEFAULTS["sweep_count"]
    assert lambda_list({"value": 2}) == [2.0]
    with pytest.raises(ConfigurationError):
        lambda_list({})
    with pytest.raises(ConfigurationError):
        lambda_list({"values": [1, -1]})


def test_load_errors(tmp_path):
    with pytest.raises(ConfigurationError):
        load_config(tmp_path / "nope.json")
    (tmp_path / "x.json").write_text("{")
    with pytest.raises(ConfigurationError):
        load_config(tmp_path / "x.json")
