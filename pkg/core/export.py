"""
File exporters for HyperBit artifacts.
Every file is written to a temporary sibling and moved into place with os.replace,
so readers never observe a partially written bitstream or table.
"""

import csv
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np

from .errors import ExportError, ValidationError
from .fxp import raw_to_hex

ASCII_LINE_BITS = 1 << 20


def _atomic_write(file_path: Path, write: Callable[[Any], None], binary: bool) -> Path:
    """Write through a temporary file in the target directory, then rename over the target"""
    file_path = Path(file_path)
    temp_path = None
    try:
        file_path.parent.mkdir(parents=True, exist_ok=True)
        temp_fd, temp_path = tempfile.mkstemp(
            suffix=".tmp", prefix=f".{file_path.name}.", dir=file_path.parent
        )
        mode = "wb" if binary else "w"
        kwargs = {} if binary else {"encoding": "utf-8", "newline": ""}
        with os.fdopen(temp_fd, mode, **kwargs) as handle:
            write(handle)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(temp_path, file_path)
        temp_path = None
    except OSError as e:
        raise ExportError(f"Could not write {file_path}: {e}")
    finally:
        if temp_path and os.path.exists(temp_path):
            try:
                os.unlink(temp_path)
            except OSError:
                pass
    return file_path


def write_text(file_path: Path, text: str) -> Path:
    return _atomic_write(file_path, lambda handle: handle.write(text), binary=False)


def write_bytes(file_path: Path, data: bytes) -> Path:
    return _atomic_write(file_path, lambda handle: handle.write(data), binary=True)


def _check_bits(bits: np.ndarray) -> np.ndarray:
    array = np.asarray(bits, dtype=np.uint8)
    if array.size and array.max() > 1:
        raise ValidationError("Bit arrays may only contain 0 and 1")
    return array


def write_packed_bits(file_path: Path, bits: np.ndarray) -> Path:
    """8 bits per byte, earliest bit in the least-significant position"""
    packed = np.packbits(_check_bits(bits), bitorder="little")
    return write_bytes(file_path, packed.tobytes())


def read_packed_bits(file_path: Path, n_bits: Optional[int] = None) -> np.ndarray:
    """Inverse of write_packed_bits; a padded final byte is kept unless n_bits is given"""
    try:
        data = np.fromfile(Path(file_path), dtype=np.uint8)
    except OSError as e:
        raise ExportError(f"Could not read {file_path}: {e}")
    bits = np.unpackbits(data, bitorder="little")
    return bits[:n_bits] if n_bits is not None else bits


def write_ascii_bits(file_path: Path, bits: np.ndarray) -> Path:
    """One '0'/'1' character per bit, a newline after every 2**20 bits and at the end"""
    text = (_check_bits(bits) + ord("0")).tobytes().decode("ascii")

    def write(handle):
        for start in range(0, len(text), ASCII_LINE_BITS):
            handle.write(text[start:start + ASCII_LINE_BITS])
            handle.write("\n")

    return _atomic_write(file_path, write, binary=False)


def read_ascii_bits(file_path: Path) -> np.ndarray:
    try:
        raw = Path(file_path).read_bytes()
    except OSError as e:
        raise ExportError(f"Could not read {file_path}: {e}")
    digits = np.frombuffer(raw.translate(None, b"\r\n \t"), dtype=np.uint8)
    if digits.size and not np.isin(digits, (ord("0"), ord("1"))).all():
        raise ValidationError(f"{file_path} contains characters other than 0/1")
    return (digits - ord("0")).astype(np.uint8)


def bits_suffix(fmt: str) -> str:
    return ".txt" if fmt == "ascii" else ".bin"


def write_bits(file_path: Path, bits: np.ndarray, fmt: str = "packed") -> Path:
    if fmt == "ascii":
        return write_ascii_bits(file_path, bits)
    if fmt == "packed":
        return write_packed_bits(file_path, bits)
    raise ValidationError(f"Unknown bitstream format '{fmt}'")


def read_bits(file_path: Path, fmt: str = "auto") -> np.ndarray:
    """Read a bitstream; 'auto' treats .txt/.ascii files as ASCII and anything else as packed"""
    if fmt == "auto":
        fmt = "ascii" if Path(file_path).suffix.lower() in (".txt", ".ascii") else "packed"
    if fmt == "ascii":
        return read_ascii_bits(file_path)
    if fmt == "packed":
        return read_packed_bits(file_path)
    raise ValidationError(f"Unknown bitstream format '{fmt}'")


def write_csv(file_path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    def write(handle):
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)

    return _atomic_write(file_path, write, binary=False)


def read_csv(file_path: Path) -> List[Dict[str, str]]:
    try:
        with open(file_path, "r", encoding="utf-8", newline="") as handle:
            return list(csv.DictReader(handle))
    except OSError as e:
        raise ExportError(f"Could not read {file_path}: {e}")


def write_json(file_path: Path, data: Dict[str, Any]) -> Path:
    if not isinstance(data, dict):
        raise ExportError("Data must be a dictionary")
    buffer = io.StringIO()
    json.dump(data, buffer, indent=2, default=str)
    return write_text(file_path, buffer.getvalue() + "\n")


# Table writers, one per artifact


def write_trajectory_csv(
    file_path: Path, states: Sequence[Sequence[Any]], fixed_point: bool, scale: int = 1 << 27
) -> Path:
    """step,x,y,z,u,v; fixed-point runs add x_hex..v_hex raw columns"""
    header = ["step", "x", "y", "z", "u", "v"]
    if fixed_point:
        header += [f"{name}_hex" for name in "xyzuv"]

    def rows():
        for step, state in enumerate(states):
            if fixed_point:
                reals = [repr(int(c) / scale) for c in state]
                yield [step, *reals, *(raw_to_hex(int(c)) for c in state)]
            else:
                yield [step, *(repr(float(c)) for c in state)]

    return write_csv(file_path, header, rows())


def write_spectrum_csv(file_path: Path, rows: Iterable[Any]) -> Path:
    """c,L1..L5,DL; a diverged point keeps its c and reads "diverged" under DL"""

    def table():
        for row in rows:
            if row.spectrum is None:
                yield [row.c, "", "", "", "", "", "diverged"]
            else:
                yield [row.c, *row.spectrum.exponents, row.spectrum.dimension]

    return write_csv(file_path, ["c", "L1", "L2", "L3", "L4", "L5", "DL"], table())


def write_bifurcation_csv(file_path: Path, samples: Iterable[Any]) -> Path:
    """c,extremum, one row per local maximum; a c without maxima (or diverged) gets one empty row"""

    def table():
        for sample in samples:
            if sample.diverged or not sample.extrema:
                yield [sample.c, ""]
            for value in sample.extrema:
                yield [sample.c, value]

    return write_csv(file_path, ["c", "extremum"], table())


def write_poincare_csv(file_path: Path, points: np.ndarray) -> Path:
    return write_csv(file_path, ["y", "z", "u", "v"], np.asarray(points).tolist())


def write_entropy_csv(file_path: Path, rows: Iterable[Any]) -> Path:
    return write_csv(
        file_path, ["Nb", "entropy_per_bit"], ([row.n_b, row.entropy_per_bit] for row in rows)
    )


def write_suite_csv(file_path: Path, summaries: Iterable[Any]) -> Path:
    """Mean p-value, pass proportion and both uniformity p-values per test"""
    return write_csv(
        file_path,
        ["test", "p_value", "proportion_pass", "n_sequences", "uniformity_p", "ks_p"],
        (
            [s.test, s.mean_p, s.proportion, s.n_sequences, s.uniformity_p, s.ks_p]
            for s in summaries
        ),
    )


def write_histogram_csv(file_path: Path, counts: np.ndarray) -> Path:
    return write_csv(file_path, ["value", "count"], enumerate(np.asarray(counts).tolist()))


def write_xy_csv(file_path: Path, pairs: np.ndarray) -> Path:
    """x,y rows of truncated word pairs for a scatter plot"""
    return write_csv(file_path, ["x", "y"], np.asarray(pairs, dtype=np.int64).tolist())
