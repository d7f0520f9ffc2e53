"""
Tests for core/config.py.
Covers precedence between defaults, the .hyperbitrc file, the environment
and command-line overrides, plus persisting and exporting settings.
"""

from pathlib import Path

import pytest

from core import config
from core.chaos import BackendKind
from core.config import (CONFIG_FILENAME, DEFAULT_SETTINGS, RunConfig,
                         export_settings, get_config_value, load_run_config,
                         read_settings, set_preference)
from core.errors import ConfigError
from core.fxp import OverflowPolicy


@pytest.mark.config
class TestLoadRunConfig:
    """Test building the effective configuration"""

    def test_defaults_when_no_file(self, temp_dir, clean_env):
        """Test that a fresh directory yields the documented defaults"""
        cfg = load_run_config()

        assert cfg.h == 0.01
        assert cfg.backend is BackendKind.FIXED
        assert cfg.overflow is OverflowPolicy.WRAP
        assert cfg.streams == ["B1", "B2", "B3", "B4", "B5"]
        assert cfg.widths == [4, 8, 12, 16, 20, 24]
        assert cfg.initial_condition().vector() == (0.0002, 0.0005, 0.00005, 0.001, 0.0)

    def test_file_overrides_defaults(self, temp_dir, clean_env):
        """Test that .hyperbitrc values replace defaults"""
        Path(CONFIG_FILENAME).write_text("h=0.005\nbackend=double\nstreams=B1,B5\n")

        cfg = load_run_config()

        assert cfg.h == 0.005
        assert cfg.backend is BackendKind.DOUBLE
        assert cfg.streams == ["B1", "B5"]

    def test_flags_override_file(self, temp_dir, clean_env):
        """Test that non-None overrides win and None overrides are ignored"""
        Path(CONFIG_FILENAME).write_text("bits=5000\nformat=ascii\n")

        cfg = load_run_config({"bits": 42, "format": None})

        assert cfg.bits == 42
        assert cfg.format == "ascii"

    def test_environment_sets_output_dir(self, temp_dir, clean_env, monkeypatch):
        """Test that HYPERBIT_OUTPUT_DIR beats the file but not the flag"""
        Path(CONFIG_FILENAME).write_text("output_dir=from_file\n")
        monkeypatch.setenv("HYPERBIT_OUTPUT_DIR", "from_env")

        assert load_run_config().output_dir == Path("from_env")
        assert load_run_config({"output_dir": "from_flag"}).output_dir == Path("from_flag")

    def test_unknown_key_rejected(self, temp_dir, clean_env):
        """Test that typos in the config file are reported, not ignored"""
        Path(CONFIG_FILENAME).write_text("stepsize=0.01\n")

        with pytest.raises(ConfigError) as excinfo:
            load_run_config()
        assert "stepsize" in excinfo.value.message

    @pytest.mark.parametrize(
        "overrides",
        [
            {"format": "hex"},
            {"streams": "B1,B9"},
            {"widths": "4,40"},
            {"alpha": 1.5},
            {"h": -0.01},
            {"backend": "quad"},
        ],
    )
    def test_invalid_values(self, temp_dir, clean_env, overrides):
        """Test that invalid settings raise ConfigError"""
        with pytest.raises(ConfigError):
            load_run_config(overrides)

    def test_explicit_missing_file(self, temp_dir, clean_env):
        """Test that an explicit missing config file raises ConfigError"""
        with pytest.raises(ConfigError):
            load_run_config(path=Path("missing.rc"))

    def test_cli_config_flag_missing_file(self, temp_dir, clean_env):
        """Test that --config pointing nowhere is an error"""
        import cli

        cli.app_state.config_path = Path("nowhere.rc")
        with pytest.raises(ConfigError):
            load_run_config()

    def test_cli_config_flag_used(self, temp_dir, clean_env):
        """Test that the global --config path is used for loading"""
        import cli

        Path("custom.rc").write_text("discard=7\n")
        cli.app_state.config_path = Path("custom.rc")

        assert load_run_config().discard == 7

    def test_solver_step_not_representable(self, temp_dir, clean_env):
        """Test that a step too small for the fixed-point constant table is a config error"""
        cfg = load_run_config({"h": 1e-10})

        with pytest.raises(ConfigError):
            cfg.solver()


@pytest.mark.config
class TestRunConfig:
    def test_to_settings_is_flat(self):
        """Test that settings export as flat key-value pairs"""
        flat = RunConfig().to_settings()

        assert set(flat) == set(DEFAULT_SETTINGS)
        assert flat["streams"] == "B1,B2,B3,B4,B5"
        assert flat["backend"] == "fixed"
        assert all(isinstance(v, str) for v in flat.values())

    def test_extra_fields_forbidden(self):
        """Test that unknown fields are rejected"""
        with pytest.raises(Exception):
            RunConfig(colour="blue")

    def test_frozen(self):
        """Test that a run configuration is immutable"""
        cfg = RunConfig()
        with pytest.raises(Exception):
            cfg.h = 0.02


@pytest.mark.config
class TestPreferences:
    """Test reading, setting and exporting settings"""

    def test_set_preference_persists(self, temp_dir, clean_env):
        """Test that a set preference is written to the config file"""
        target = set_preference("backend", "double")

        assert target == Path(CONFIG_FILENAME)
        assert "backend=double" in target.read_text()
        assert load_run_config().backend is BackendKind.DOUBLE

    def test_set_preference_keeps_other_keys(self, temp_dir, clean_env):
        """Test that setting one key keeps the others"""
        set_preference("bits", "1000")
        set_preference("discard", "50")

        values, _ = read_settings()
        assert values == {"bits": "1000", "discard": "50"}

    def test_set_preference_validates(self, temp_dir, clean_env):
        """Test that a preference is validated before it is written"""
        with pytest.raises(ConfigError):
            set_preference("format", "hex")
        assert not Path(CONFIG_FILENAME).exists()

    def test_set_unknown_key(self, temp_dir, clean_env):
        """Test that an unknown key cannot be set"""
        with pytest.raises(ConfigError):
            set_preference("colour", "blue")

    def test_get_config_value(self, temp_dir, clean_env):
        """Test that a value is read back from the config file"""
        Path(CONFIG_FILENAME).write_text("alpha=0.05\n")

        assert get_config_value("alpha") == "0.05"
        with pytest.raises(ConfigError):
            get_config_value("nope")

    def test_export_round_trip(self, temp_dir, clean_env):
        """Test that an exported file reproduces the configuration"""
        original = load_run_config({"bits": 1234, "backend": "double", "widths": "8,12"})

        exported = export_settings(original, Path("run.rc"))
        reloaded = load_run_config(path=exported)

        assert reloaded == original

    def test_config_path_resolution(self, temp_dir, clean_env):
        """Test that the default config path is .hyperbitrc in the working directory"""
        assert config.config_path() == Path(CONFIG_FILENAME)
        assert config.config_path(Path("x.rc")) == Path("x.rc")
