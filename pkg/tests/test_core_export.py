"""
Tests for core/export.py: bitstream encodings, CSV tables and atomic writes.
"""

import os
from pathlib import Path
from unittest.mock import patch

import numpy as np
import pytest

from core import export
from core.dynamics import (BifurcationSample, LyapunovSpectrum,
                           LyapunovSweepRow)
from core.bitgen import EntropyRow
from core.errors import ExportError, ValidationError
from core.randtest import TestSummary


class TestPackedBits:
    """Test the packed binary encoding"""

    def test_earliest_bit_is_lsb(self, temp_dir):
        """Test that bits 1,0,0,0,0,0,0,0 pack to 0x01"""
        path = export.write_packed_bits(Path("a.bin"), np.array([1, 0, 0, 0, 0, 0, 0, 0]))
        assert path.read_bytes() == b"\x01"

    def test_partial_byte_is_zero_padded(self, temp_dir):
        """Test that a partial last byte is padded with zeros"""
        path = export.write_packed_bits(Path("b.bin"), np.array([1, 1, 0, 1, 0, 0, 0, 0, 1]))
        assert path.read_bytes() == b"\x0b\x01"

    def test_read_back(self, temp_dir, reference_bits):
        """Test that written bits read back unchanged"""
        bits = reference_bits(1001)
        export.write_packed_bits(Path("c.bin"), bits)

        assert np.array_equal(export.read_packed_bits(Path("c.bin"), 1001), bits)
        assert export.read_packed_bits(Path("c.bin")).size == 1008

    def test_rejects_non_bits(self, temp_dir):
        """Test that values other than 0 and 1 are rejected"""
        with pytest.raises(ValidationError):
            export.write_packed_bits(Path("d.bin"), np.array([0, 2, 1]))


class TestAsciiBits:
    """Test the ASCII encoding"""

    def test_characters_and_trailing_newline(self, temp_dir):
        """Test that ASCII output is 0/1 characters ending in a newline"""
        path = export.write_ascii_bits(Path("a.txt"), np.array([1, 0, 1, 1]))
        assert path.read_text() == "1011\n"

    def test_line_length(self, temp_dir):
        """Test the ASCII line length"""
        n = export.ASCII_LINE_BITS + 5
        path = export.write_ascii_bits(Path("b.txt"), np.ones(n, dtype=np.uint8))
        lines = path.read_text().split("\n")

        assert len(lines[0]) == export.ASCII_LINE_BITS
        assert len(lines[1]) == 5
        assert lines[2] == ""

    def test_read_back(self, temp_dir, reference_bits):
        """Test that written bits read back unchanged"""
        bits = reference_bits(777)
        export.write_ascii_bits(Path("c.txt"), bits)
        assert np.array_equal(export.read_ascii_bits(Path("c.txt")), bits)

    def test_rejects_other_characters(self, temp_dir):
        """Test that characters other than 0 and 1 are rejected on read"""
        Path("bad.txt").write_text("0102\n")
        with pytest.raises(ValidationError):
            export.read_ascii_bits(Path("bad.txt"))


class TestDispatch:
    @pytest.mark.parametrize("fmt,suffix", [("ascii", ".txt"), ("packed", ".bin")])
    def test_suffix(self, fmt, suffix):
        """Test the file suffix of each format"""
        assert export.bits_suffix(fmt) == suffix

    def test_auto_detects_by_suffix(self, temp_dir):
        """Test that the format is detected from the suffix"""
        bits = np.array([1, 0, 1, 0, 1, 1, 1, 0, 0, 1], dtype=np.uint8)
        export.write_bits(Path("s.txt"), bits, "ascii")
        export.write_bits(Path("s.bin"), bits, "packed")

        assert np.array_equal(export.read_bits(Path("s.txt")), bits)
        assert np.array_equal(export.read_bits(Path("s.bin"))[:10], bits)

    def test_unknown_format(self, temp_dir):
        """Test that an unknown format is rejected"""
        with pytest.raises(ValidationError):
            export.write_bits(Path("s.hex"), np.zeros(8), "hex")
        with pytest.raises(ValidationError):
            export.read_bits(Path("s.hex"), "hex")


class TestAtomicWrite:
    """Test that failed writes leave no partial files behind"""

    def test_creates_parent_directories(self, temp_dir):
        """Test that missing parent directories are created"""
        path = export.write_text(Path("deep/nested/file.txt"), "ok")
        assert path.read_text() == "ok"

    def test_replace_failure_cleans_up(self, temp_dir):
        """Test that a failed rename removes the temporary file"""
        with patch("core.export.os.replace", side_effect=OSError("disk full")):
            with pytest.raises(ExportError):
                export.write_text(Path("target.txt"), "data")

        assert not Path("target.txt").exists()
        assert [name for name in os.listdir(".") if name.endswith(".tmp")] == []

    def test_existing_file_survives_failure(self, temp_dir):
        """Test that a failed write leaves the existing file intact"""
        Path("target.txt").write_text("old")
        with patch("core.export.os.replace", side_effect=OSError("disk full")):
            with pytest.raises(ExportError):
                export.write_text(Path("target.txt"), "new")

        assert Path("target.txt").read_text() == "old"

    def test_write_json_requires_dict(self, temp_dir):
        """Test that JSON export needs a dictionary"""
        with pytest.raises(ExportError):
            export.write_json(Path("x.json"), [1, 2])


class TestTables:
    """Test the CSV table layouts"""

    def test_trajectory_fixed_point_columns(self, temp_dir):
        """Test that fixed-point trajectories carry hex word columns"""
        states = [(1 << 26, -1, 0, 1, 1 << 27)]
        export.write_trajectory_csv(Path("t.csv"), states, fixed_point=True)
        (row,) = export.read_csv(Path("t.csv"))

        assert list(row) == ["step", "x", "y", "z", "u", "v",
                             "x_hex", "y_hex", "z_hex", "u_hex", "v_hex"]
        assert float(row["x"]) == 0.5
        assert row["y_hex"] == "FFFFFFFF"
        assert row["v_hex"] == "08000000"

    def test_trajectory_double_columns(self, temp_dir):
        """Test the double trajectory columns"""
        export.write_trajectory_csv(Path("t.csv"), [(0.1, 0.2, 0.3, 0.4, 0.5)], fixed_point=False)
        (row,) = export.read_csv(Path("t.csv"))
        assert list(row) == ["step", "x", "y", "z", "u", "v"]
        assert float(row["u"]) == 0.4

    def test_spectrum_rows(self, temp_dir):
        """Test the spectrum CSV rows"""
        spectrum = LyapunovSpectrum.from_exponents((0.09, 0.001, 0.0001, -0.5, -0.59))
        rows = [LyapunovSweepRow(0.1, spectrum), LyapunovSweepRow(0.95, None)]
        export.write_spectrum_csv(Path("s.csv"), rows)
        table = export.read_csv(Path("s.csv"))

        assert list(table[0]) == ["c", "L1", "L2", "L3", "L4", "L5", "DL"]
        assert float(table[0]["L1"]) == 0.09
        assert table[1]["DL"] == "diverged"
        assert table[1]["L1"] == ""

    def test_bifurcation_rows(self, temp_dir):
        """Test that bifurcation rows list one extremum per row"""
        samples = [
            BifurcationSample(0.1, (0.5, 0.7)),
            BifurcationSample(0.6, ()),
            BifurcationSample(0.95, (), diverged=True),
        ]
        export.write_bifurcation_csv(Path("b.csv"), samples)
        table = export.read_csv(Path("b.csv"))

        assert [row["c"] for row in table] == ["0.1", "0.1", "0.6", "0.95"]
        assert table[2]["extremum"] == ""

    def test_entropy_suite_histogram(self, temp_dir):
        """Test the entropy, suite and histogram CSV layouts"""
        export.write_entropy_csv(Path("e.csv"), [EntropyRow(4, 0.99), EntropyRow(8, 0.97)])
        export.write_suite_csv(
            Path("s.csv"),
            [TestSummary(stream="B1", test="runs", p_values=[0.5, 0.3], n_pass=2, n_sequences=2)],
        )
        export.write_histogram_csv(Path("h.csv"), np.array([3, 0, 5]))

        assert export.read_csv(Path("e.csv"))[1] == {"Nb": "8", "entropy_per_bit": "0.97"}
        suite = export.read_csv(Path("s.csv"))[0]
        assert list(suite) == [
            "test", "p_value", "proportion_pass", "n_sequences", "uniformity_p", "ks_p"
        ]
        assert float(suite["p_value"]) == pytest.approx(0.4)
        assert 0.0 <= float(suite["ks_p"]) <= 1.0
        assert export.read_csv(Path("h.csv"))[2] == {"value": "2", "count": "5"}

    def test_xy_pairs(self, temp_dir):
        """Test that word pairs are written as integer x,y rows under a header"""
        export.write_xy_csv(Path("xy.csv"), np.array([[0, 4095], [17, 3]], dtype=np.uint64))

        assert Path("xy.csv").read_text() == "x,y\n0,4095\n17,3\n"

    def test_poincare_rows(self, temp_dir):
        """Test that an empty section still writes its header"""
        export.write_poincare_csv(Path("p.csv"), np.zeros((0, 4)))
        assert Path("p.csv").read_text() == "y,z,u,v\n"
