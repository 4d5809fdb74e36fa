import json

import pytest

from plp.config import plp_config, update_config
from plp.utils import load_config


@pytest.fixture(autouse=True)
def reset_config():
    yield
    update_config({})


def test_defaults_without_a_file(tmp_path):
    load_config(str(tmp_path / "absent.json"))
    assert plp_config.compiler.perm_mode == "compact"
    assert plp_config.interpreter.tolerance == 1e-9


def test_missing_required_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_config(str(tmp_path / "absent.json"), required=True)


def test_placeholders_come_from_the_environment(tmp_path, monkeypatch):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({
        "log_level": "${PLP_TEST_LEVEL}",
        "compiler": {"perm_mode": "${PLP_TEST_PERM}"},
        "bench": {"workers": "${PLP_TEST_WORKERS}", "seed": "${PLP_TEST_SEED}"},
    }))
    monkeypatch.setenv("PLP_TEST_LEVEL", "DEBUG")
    monkeypatch.setenv("PLP_TEST_PERM", "logdepth")
    monkeypatch.setenv("PLP_TEST_WORKERS", "3")
    monkeypatch.delenv("PLP_TEST_SEED", raising=False)
    load_config(str(path))
    assert plp_config.log_level == "DEBUG"
    assert plp_config.compiler.perm_mode == "logdepth"
    assert plp_config.bench.workers == 3
    assert plp_config.bench.seed is None


def test_unknown_keys_are_ignored():
    update_config({"interpreter": {"tolerance": 1e-6, "colour": "blue"}})
    assert plp_config.interpreter.tolerance == 1e-6


def test_invalid_json(tmp_path):
    path = tmp_path / "config.json"
    path.write_text("{")
    with pytest.raises(json.JSONDecodeError):
        load_config(str(path))


def test_repository_config_loads(monkeypatch):
    from .conftest import CORPUS
    for name in ("PLP_LOG_LEVEL", "PLP_WORKERS", "PLP_PERM_MODE", "PLP_BENCH_WORKERS", "PLP_SEED"):
        monkeypatch.delenv(name, raising=False)
    load_config(str(CORPUS.parent / "config.json"), required=True)
    assert plp_config.interpreter.dense_qubit_limit == 16
    assert plp_config.compiler.perm_mode == "compact"
