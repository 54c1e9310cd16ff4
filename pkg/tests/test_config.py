import argparse
import json

import pytest

from schattenlab.cli import build_config
from schattenlab.core.config import ConfigManager, get_config, parse_config_text, parse_value, set_config
from schattenlab.core.errors import ParameterError
from schattenlab.numerics.quadrature import GridSpec


class TestConfigManager:
    def test_defaults(self):
        config = ConfigManager()
        assert config.get("lattice.r") == 0.5
        assert config.get("truncation.mode") == "coefficient"
        assert config.get("no.such.key", "fallback") == "fallback"

    def test_unknown_key_rejected(self):
        with pytest.raises(ParameterError):
            ConfigManager().set("grid.unknown", 1)
        with pytest.raises(ParameterError):
            ConfigManager({"nosection.key": 1})

    def test_values_take_default_type(self):
        config = ConfigManager()
        config.update({"grid.refine": "2", "run.quiet": "true", "sweep.p": "1.5", "grid.r_max": 0.5})
        assert config.get("grid.refine") == 2
        assert config.get("run.quiet") is True
        assert config.get("sweep.p") == [1.5]
        assert isinstance(config.get("grid.r_max"), float)

    def test_bad_value_rejected(self):
        with pytest.raises(ParameterError):
            ConfigManager().set("grid.depth", "deep")

    def test_grid_spec(self):
        assert ConfigManager().grid_spec() == GridSpec()
        assert ConfigManager({"grid.refine": 1}).grid_spec() == GridSpec().refined()

    def test_hash_ignores_run_settings(self):
        base = ConfigManager()
        threaded = ConfigManager({"run.threads": 8, "run.log_level": "debug"})
        assert base.config_hash() == threaded.config_hash()
        assert base.config_hash() != ConfigManager({"truncation.N": 256}).config_hash()
        assert "run.threads" not in base.numeric_config()

    def test_export_import(self, tmp_path):
        path = tmp_path / "config.json"
        ConfigManager({"lattice.r": 0.75}).export_config(path)
        assert json.loads(path.read_text())["lattice"]["r"] == 0.75
        config = ConfigManager()
        config.import_config(path)
        assert config.get("lattice.r") == 0.75
        assert str(path) in config.sources

    def test_json_config_file(self, tmp_path):
        source = ConfigManager({"grid.r_max": 0.99, "truncation.N": 128})
        path = source.export_config(tmp_path / "run" / "config.json")
        config = ConfigManager()
        config.load_file(path)
        assert config.get("grid.r_max") == 0.99
        assert config.config_hash() == source.config_hash()

    @pytest.mark.parametrize("text", ["[1, 2]", "{\"grid\": "])
    def test_bad_json_config(self, tmp_path, text):
        path = tmp_path / "config.json"
        path.write_text(text)
        with pytest.raises(ParameterError, match="config"):
            ConfigManager().import_config(path)

    def test_env_overrides(self):
        config = ConfigManager()
        config.apply_env({"SCHATTENLAB_THREADS": "3", "SCHATTENLAB_LOG_LEVEL": "debug"})
        assert config.get("run.threads") == 3
        assert config.get("run.log_level") == "debug"
        assert "environment" in config.sources

    def test_global_instance(self):
        custom = ConfigManager({"lattice.r": 1.0})
        set_config(custom)
        try:
            assert get_config() is custom
        finally:
            set_config(ConfigManager())


class TestConfigText:
    @pytest.mark.parametrize(
        "text,expected",
        [("3", 3), ("0.25", 0.25), ("True", True), ("1.5, 2, 3", [1.5, 2.0, 3.0]), (" info ", "info")],
    )
    def test_parse_value(self, text, expected):
        assert parse_value(text) == expected

    def test_parse_config_text(self):
        text = "# grid\ngrid.r_max = 0.99\n\ntruncation.N = 128  # smaller\n"
        assert parse_config_text(text) == {"grid.r_max": 0.99, "truncation.N": 128}

    def test_parse_rejects_bare_key(self):
        with pytest.raises(ParameterError, match="<config>:1"):
            parse_config_text("refine = 2")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParameterError):
            ConfigManager().load_file(tmp_path / "missing.conf")


class TestLayering:
    def test_precedence(self, tmp_path):
        path = tmp_path / "run.conf"
        path.write_text("run.threads = 2\nlattice.r = 0.75\ngrid.refine = 1\n")
        args = argparse.Namespace(config=str(path), threads=4, refine=None)
        config = build_config(args, environ={"SCHATTENLAB_THREADS": "3"})
        assert config.get("run.threads") == 4
        assert config.get("lattice.r") == 0.75
        assert config.get("grid.refine") == 1

    def test_environment_over_file(self, tmp_path):
        path = tmp_path / "run.conf"
        path.write_text("run.threads = 2\n")
        config = build_config(argparse.Namespace(config=str(path)), environ={"SCHATTENLAB_THREADS": "3"})
        assert config.get("run.threads") == 3

    def test_threads_must_be_positive(self):
        with pytest.raises(ParameterError):
            build_config(argparse.Namespace(threads=0), environ={})
