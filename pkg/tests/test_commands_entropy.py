"""
Tests for commands/entropy.py.
"""

import json
from pathlib import Path

import pytest
import typer
from typer.testing import CliRunner

from commands.entropy import entropy
from core import export
from core.errors import ExitCode


@pytest.mark.cli
class TestEntropyCommand:
    """Test the entropy sweep command"""

    def setup_method(self):
        self.runner = CliRunner()
        self.app = typer.Typer()
        self.app.command()(entropy)

    def test_one_row_per_width(self, temp_dir, clean_env):
        """Test that the sweep writes one row per requested width"""
        result = self.runner.invoke(
            self.app, ["--widths", "4,8,12,16,20,24", "--states", "500", "--discard", "10"]
        )

        assert result.exit_code == 0
        output = json.loads(result.stdout)
        assert [row["Nb"] for row in output["rows"]] == [4, 8, 12, 16, 20, 24]
        assert all(0.0 <= row["entropy_per_bit"] <= 1.0 for row in output["rows"])
        table = export.read_csv(Path("entropy.csv"))
        assert [row["Nb"] for row in table] == ["4", "8", "12", "16", "20", "24"]

    def test_channel_and_output_path(self, temp_dir, clean_env):
        """Test that the channel and output path options are honoured"""
        result = self.runner.invoke(
            self.app,
            ["--widths", "8", "--states", "200", "--discard", "10", "--channel", "v",
             "-o", "out/e.csv"],
        )

        assert result.exit_code == 0
        assert json.loads(result.stdout)["channel"] == "v"
        assert Path("out/e.csv").exists()

    def test_histogram(self, temp_dir, clean_env):
        """Test that --histogram writes all 4096 bins of the B1 word histogram"""
        result = self.runner.invoke(
            self.app, ["--widths", "12", "--states", "300", "--discard", "10", "--histogram"]
        )

        assert result.exit_code == 0
        histogram = json.loads(result.stdout)["histogram"]
        assert histogram["stream"] == "B1"
        assert histogram["words"] == 300
        rows = export.read_csv(Path("histogram.csv"))
        assert len(rows) == 4096
        assert sum(int(row["count"]) for row in rows) == 300

    def test_histogram_before_post_processing(self, temp_dir, clean_env):
        """Test that --histogram also writes the X word histogram and the X-Y pairs"""
        result = self.runner.invoke(
            self.app, ["--widths", "12", "--states", "300", "--discard", "10", "--histogram"]
        )

        assert result.exit_code == 0
        x_hist = json.loads(result.stdout)["histogram_x"]
        assert x_hist["stream"] == "X"
        assert x_hist["words"] == 300
        assert 0.0 <= x_hist["p_value"] <= 1.0
        assert Path(x_hist["xy_output"]).name == "xy.csv"
        counts = [int(row["count"]) for row in export.read_csv(Path("histogram_x.csv"))]
        pairs = export.read_csv(Path("xy.csv"))
        assert len(counts) == 4096
        assert len(pairs) == 300
        assert all(0 <= int(row["x"]) < 4096 and 0 <= int(row["y"]) < 4096 for row in pairs)
        for row in pairs:
            counts[int(row["x"])] -= 1
        assert not any(counts)

    def test_pretty_histograms(self, temp_dir, clean_env):
        """Test that the pretty view reports both histograms"""
        result = self.runner.invoke(
            self.app,
            ["--widths", "12", "--states", "200", "--discard", "10", "--histogram", "--pretty"],
        )

        assert result.exit_code == 0
        assert "X 12-bit histogram" in result.stdout
        assert "B1 12-bit histogram" in result.stdout

    def test_invalid_width(self, temp_dir, clean_env):
        """Test that a zero width is a configuration error"""
        result = self.runner.invoke(self.app, ["--widths", "0", "--states", "10"])

        assert result.exit_code == ExitCode.CONFIG_ERROR

    def test_pretty_table(self, temp_dir, clean_env):
        """Test that the pretty view prints the entropy table"""
        result = self.runner.invoke(
            self.app, ["--widths", "4,8", "--states", "200", "--discard", "10", "--pretty"]
        )

        assert result.exit_code == 0
        assert "Average entropy per bit" in result.stdout
