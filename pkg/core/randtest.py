"""
Native subset of the NIST SP800-22 statistical tests.

Each test is a pure function of a 0/1 bit array returning a TestResult.
`run_suite` splits streams into sequences and reports, per test, the mean
p-value, the pass proportion and the uniformity of the p-values.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import (Callable, ClassVar, Dict, List, Mapping, Optional,
                    Sequence, Tuple, Union)

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import stats
from scipy.special import erfc, gammaincc

from .errors import InsufficientBitsError, PreconditionError

DEFAULT_ALPHA = 0.01

Bits = Union[np.ndarray, Sequence[int]]
ParamValue = Union[int, float, str]


class TestResult(BaseModel):
    """Outcome of one test on one sequence"""

    __test__: ClassVar[bool] = False
    model_config = ConfigDict(frozen=True)

    name: str
    p_value: float = Field(ge=0.0, le=1.0)
    passed: bool
    alpha: float = DEFAULT_ALPHA
    parameters: Dict[str, ParamValue] = Field(default_factory=dict)

    @classmethod
    def build(
        cls, name: str, p_value: float, alpha: float = DEFAULT_ALPHA, **parameters: ParamValue
    ) -> "TestResult":
        p = float(min(1.0, max(0.0, p_value))) if math.isfinite(p_value) else 0.0
        return cls(name=name, p_value=p, passed=p >= alpha, alpha=alpha, parameters=parameters)


def _as_bits(bits: Bits) -> np.ndarray:
    array = np.asarray(bits, dtype=np.uint8)
    if array.ndim != 1:
        raise PreconditionError("Bit sequence must be one-dimensional")
    return array


def _require_length(name: str, n: int, minimum: int, strict: bool) -> None:
    if strict and n < minimum:
        raise PreconditionError(f"{name} needs at least {minimum} bits, got {n}")
    if n == 0:
        raise PreconditionError(f"{name} needs a nonempty sequence")


def monobit(bits: Bits, alpha: float = DEFAULT_ALPHA, strict: bool = True) -> TestResult:
    """Frequency test: s_obs = |sum(2b - 1)| / sqrt(n), p = erfc(s_obs / sqrt 2)"""
    b = _as_bits(bits)
    n = b.size
    _require_length("monobit", n, 100, strict)
    s_n = 2 * int(b.sum()) - n
    s_obs = abs(s_n) / math.sqrt(n)
    return TestResult.build("monobit", erfc(s_obs / math.sqrt(2)), alpha, s_n=s_n)


def block_frequency(
    bits: Bits, block_size: int = 128, alpha: float = DEFAULT_ALPHA, strict: bool = True
) -> TestResult:
    """Chi-square over per-block proportions of ones"""
    b = _as_bits(bits)
    n = b.size
    _require_length("block_frequency", n, 100, strict)
    if block_size < 20 or block_size > n:
        raise PreconditionError(f"block_frequency block size must be in 20..{n}, got {block_size}")
    n_blocks = n // block_size
    pi = b[: n_blocks * block_size].reshape(n_blocks, block_size).mean(axis=1)
    chi_square = 4.0 * block_size * float(((pi - 0.5) ** 2).sum())
    p = gammaincc(n_blocks / 2.0, chi_square / 2.0)
    return TestResult.build(
        "block_frequency", p, alpha, block_size=block_size, chi_square=chi_square
    )


def runs(bits: Bits, alpha: float = DEFAULT_ALPHA, strict: bool = True) -> TestResult:
    """Total number of runs against its expectation given the ones fraction"""
    b = _as_bits(bits)
    n = b.size
    _require_length("runs", n, 100, strict)
    pi = float(b.mean())
    tau = 2.0 / math.sqrt(n)
    if abs(pi - 0.5) >= tau:
        # Frequency prerequisite failed; the runs statistic is not computed.
        return TestResult.build("runs", 0.0, alpha, prerequisite="failed")
    v_obs = 1 + int(np.count_nonzero(np.diff(b)))
    p = erfc(abs(v_obs - 2 * n * pi * (1 - pi)) / (2 * math.sqrt(2 * n) * pi * (1 - pi)))
    return TestResult.build("runs", p, alpha, v_obs=v_obs)


# (min n, block length M, lowest class, highest class, class probabilities)
_LONGEST_RUN_TABLE = (
    (128, 8, 1, 4, (0.2148, 0.3672, 0.2305, 0.1875)),
    (6272, 128, 4, 9, (0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124)),
    (750000, 10000, 10, 16, (0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727)),
)


def _longest_runs(blocks: np.ndarray) -> np.ndarray:
    n_blocks, width = blocks.shape
    padded = np.hstack([blocks, np.zeros((n_blocks, 1), dtype=blocks.dtype)]).ravel()
    zeros = np.flatnonzero(padded == 0)
    lengths = np.diff(np.concatenate(([-1], zeros))) - 1
    longest = np.zeros(n_blocks, dtype=np.int64)
    np.maximum.at(longest, zeros // (width + 1), lengths)
    return longest


def longest_run_of_ones(
    bits: Bits, alpha: float = DEFAULT_ALPHA, strict: bool = True
) -> TestResult:
    """Longest run of ones within M-bit blocks against its reference distribution"""
    b = _as_bits(bits)
    n = b.size
    if n < _LONGEST_RUN_TABLE[0][0]:
        raise PreconditionError(f"longest_run_of_ones needs at least 128 bits, got {n}")
    _, block_size, low, high, probabilities = [row for row in _LONGEST_RUN_TABLE if n >= row[0]][-1]
    n_blocks = n // block_size
    longest = _longest_runs(b[: n_blocks * block_size].reshape(n_blocks, block_size))
    counts = np.bincount(np.clip(longest, low, high) - low, minlength=high - low + 1)
    expected = n_blocks * np.asarray(probabilities)
    chi_square = float(((counts - expected) ** 2 / expected).sum())
    k = high - low
    p = gammaincc(k / 2.0, chi_square / 2.0)
    return TestResult.build(
        "longest_run_of_ones", p, alpha, block_size=block_size, chi_square=chi_square
    )


def cumulative_sums(
    bits: Bits, mode: str = "forward", alpha: float = DEFAULT_ALPHA, strict: bool = True
) -> TestResult:
    """Maximal excursion of the +/-1 random walk"""
    if mode not in ("forward", "backward"):
        raise PreconditionError(f"cumulative_sums mode must be forward or backward, got {mode}")
    b = _as_bits(bits)
    n = b.size
    _require_length("cumulative_sums", n, 100, strict)
    walk = 2 * b.astype(np.int64) - 1
    if mode == "backward":
        walk = walk[::-1]
    z = int(np.abs(np.cumsum(walk)).max())
    root_n = math.sqrt(n)

    k1 = np.arange(int((-n / z + 1) / 4), int((n / z - 1) / 4) + 1)
    k2 = np.arange(int((-n / z - 3) / 4), int((n / z - 1) / 4) + 1)
    norm = stats.norm.cdf
    sum1 = (norm((4 * k1 + 1) * z / root_n) - norm((4 * k1 - 1) * z / root_n)).sum()
    sum2 = (norm((4 * k2 + 3) * z / root_n) - norm((4 * k2 + 1) * z / root_n)).sum()
    p = 1.0 - float(sum1) + float(sum2)
    return TestResult.build(f"cumulative_sums_{mode}", p, alpha, mode=mode, z=z)


def _pattern_counts(b: np.ndarray, m: int) -> np.ndarray:
    """Counts of all overlapping m-bit patterns, wrapping around the end"""
    if m == 0:
        return np.array([b.size])
    n = b.size
    extended = np.concatenate([b, b[: m - 1]]).astype(np.int64)
    values = np.zeros(n, dtype=np.int64)
    for offset in range(m):
        values = (values << 1) | extended[offset:offset + n]
    return np.bincount(values, minlength=1 << m)


def _psi_square(b: np.ndarray, m: int) -> float:
    if m <= 0:
        return 0.0
    counts = _pattern_counts(b, m).astype(np.float64)
    return float((1 << m) / b.size * (counts ** 2).sum() - b.size)


def serial(
    bits: Bits, m: int = 16, alpha: float = DEFAULT_ALPHA, strict: bool = True
) -> TestResult:
    """Uniformity of overlapping m-bit patterns.

    The reported p-value is the first-difference statistic; the
    second-difference p-value is kept in parameters["p_value_2"].
    """
    b = _as_bits(bits)
    n = b.size
    _require_length("serial", n, 100, strict)
    if m < 2 or (strict and m >= max(3, int(math.log2(n)) - 2)):
        raise PreconditionError(f"serial block length m={m} is out of range for n={n}")
    psi_m, psi_m1, psi_m2 = (_psi_square(b, k) for k in (m, m - 1, m - 2))
    delta1 = psi_m - psi_m1
    delta2 = psi_m - 2 * psi_m1 + psi_m2
    p1 = gammaincc(2 ** (m - 2), delta1 / 2.0)
    p2 = gammaincc(2 ** (m - 3), delta2 / 2.0)
    p2 = float(min(1.0, max(0.0, p2)))
    return TestResult.build("serial", p1, alpha, m=m, p_value_2=p2)


def _phi(b: np.ndarray, m: int) -> float:
    counts = _pattern_counts(b, m)
    c = counts[counts > 0] / b.size
    return float((c * np.log(c)).sum())


def approximate_entropy(
    bits: Bits, m: int = 10, alpha: float = DEFAULT_ALPHA, strict: bool = True
) -> TestResult:
    """Frequency of overlapping m- and (m+1)-bit patterns"""
    b = _as_bits(bits)
    n = b.size
    _require_length("approximate_entropy", n, 100, strict)
    if m < 1 or (strict and m >= max(2, int(math.log2(n)) - 5)):
        raise PreconditionError(f"approximate_entropy block length m={m} is out of range for n={n}")
    apen = _phi(b, m) - _phi(b, m + 1)
    chi_square = 2.0 * n * (math.log(2) - apen)
    p = gammaincc(2 ** (m - 1), chi_square / 2.0)
    return TestResult.build("approximate_entropy", p, alpha, m=m, chi_square=chi_square)


def dft_spectral(bits: Bits, alpha: float = DEFAULT_ALPHA, strict: bool = True) -> TestResult:
    """Peaks of the discrete Fourier transform of the +/-1 sequence.

    Threshold T = sqrt(ln(1/0.05) n) keeps 95% of peaks below it; the
    variance of N1 uses the corrected n * 0.95 * 0.05 / 4.
    """
    b = _as_bits(bits)
    n = b.size
    _require_length("dft_spectral", n, 1000, strict)
    x = 2.0 * b.astype(np.float64) - 1.0
    magnitudes = np.abs(np.fft.fft(x)[: n // 2])
    threshold = math.sqrt(math.log(1 / 0.05) * n)
    n0 = 0.95 * n / 2.0
    n1 = int(np.count_nonzero(magnitudes < threshold))
    d = (n1 - n0) / math.sqrt(n * 0.95 * 0.05 / 4.0)
    return TestResult.build("dft_spectral", erfc(abs(d) / math.sqrt(2)), alpha, n1=n1)


TestFunction = Callable[..., TestResult]


def default_tests(
    block_size: int = 128, serial_m: int = 16, apen_m: int = 10
) -> List[Tuple[str, TestFunction]]:
    """The implemented subset with its standard parameters"""
    return [
        ("monobit", monobit),
        ("block_frequency", partial(block_frequency, block_size=block_size)),
        ("runs", runs),
        ("longest_run_of_ones", longest_run_of_ones),
        ("cumulative_sums_forward", partial(cumulative_sums, mode="forward")),
        ("cumulative_sums_backward", partial(cumulative_sums, mode="backward")),
        ("serial", partial(serial, m=serial_m)),
        ("approximate_entropy", partial(approximate_entropy, m=apen_m)),
        ("dft_spectral", dft_spectral),
    ]


def counter_mode_bits(n_bits: int, seed: int = 0) -> np.ndarray:
    """Reference bits from the Philox counter-based generator"""
    generator = np.random.Generator(np.random.Philox(seed))
    return generator.integers(0, 2, size=n_bits, dtype=np.uint8)


def uniformity_p_value(p_values: Sequence[float]) -> float:
    """Chi-square over 10 equal bins of [0, 1] (the p-value of the p-values)"""
    if len(p_values) == 0:
        return 0.0
    counts, _ = np.histogram(np.clip(p_values, 0.0, 1.0), bins=10, range=(0.0, 1.0))
    expected = len(p_values) / 10.0
    chi_square = float(((counts - expected) ** 2 / expected).sum())
    return float(gammaincc(9 / 2.0, chi_square / 2.0))


def ks_uniformity(p_values: Sequence[float]) -> float:
    """Kolmogorov-Smirnov p-value of the p-values against U(0, 1)"""
    return float(stats.kstest(np.asarray(p_values, dtype=float), "uniform").pvalue)


def proportion_interval(alpha: float, n_sequences: int) -> Tuple[float, float]:
    """(1 - alpha) +/- 3 sqrt(alpha (1 - alpha) / N)"""
    center = 1.0 - alpha
    spread = 3.0 * math.sqrt(alpha * (1.0 - alpha) / n_sequences)
    return center - spread, min(1.0, center + spread)


class TestSummary(BaseModel):
    """One test over all sequences of one stream"""

    __test__: ClassVar[bool] = False
    model_config = ConfigDict(frozen=True)

    stream: str
    test: str
    p_values: List[float]
    n_pass: int
    n_sequences: int
    alpha: float = DEFAULT_ALPHA

    @property
    def mean_p(self) -> float:
        return float(np.mean(self.p_values)) if self.p_values else 0.0

    @property
    def proportion(self) -> float:
        return self.n_pass / self.n_sequences if self.n_sequences else 0.0

    @property
    def uniformity_p(self) -> float:
        return uniformity_p_value(self.p_values)

    @property
    def ks_p(self) -> float:
        return ks_uniformity(self.p_values) if self.p_values else 0.0

    @property
    def proportion_range(self) -> Tuple[float, float]:
        return proportion_interval(self.alpha, self.n_sequences)


class SuiteReport(BaseModel):
    """Per-stream, per-test summaries of a suite run"""

    model_config = ConfigDict(frozen=True)

    alpha: float = DEFAULT_ALPHA
    n_sequences: int
    seq_len: int
    summaries: List[TestSummary]

    def for_stream(self, stream: str) -> List[TestSummary]:
        return [s for s in self.summaries if s.stream == stream]

    @property
    def streams(self) -> List[str]:
        return list(dict.fromkeys(s.stream for s in self.summaries))

    def min_pass(self) -> int:
        """Pass-count floor: the interval's lower end, rounded down (96 for N = 100)"""
        low, _ = proportion_interval(self.alpha, self.n_sequences)
        return math.floor(low * self.n_sequences)

    def failing(self, min_pass: Optional[int] = None) -> List[TestSummary]:
        floor = self.min_pass() if min_pass is None else min_pass
        return [s for s in self.summaries if s.n_pass < floor]

    def meets_floor(self, min_pass: Optional[int] = None) -> bool:
        """True when every test passed on at least min_pass sequences"""
        return not self.failing(min_pass)


def _run_sequence(
    sequence: np.ndarray, tests: List[Tuple[str, TestFunction]], alpha: float
) -> List[TestResult]:
    return [test(sequence, alpha=alpha) for _, test in tests]


def run_suite(
    streams: Union[Mapping[str, Bits], Sequence[Tuple[str, Bits]]],
    n_sequences: int,
    seq_len: int,
    alpha: float = DEFAULT_ALPHA,
    tests: Optional[List[Tuple[str, TestFunction]]] = None,
    workers: int = 1,
    progress: Optional[Callable[[int], None]] = None,
) -> SuiteReport:
    """Split each stream into n_sequences of seq_len bits and run every test"""
    if n_sequences < 1 or seq_len < 1:
        raise PreconditionError("n_sequences and seq_len must be positive")
    tests = tests or default_tests()
    items = list(streams.items()) if isinstance(streams, Mapping) else list(streams)
    required = n_sequences * seq_len

    arrays = []
    for label, bits in items:
        array = _as_bits(bits.bits if hasattr(bits, "bits") else bits)
        if array.size < required:
            raise InsufficientBitsError(required, int(array.size), f"bits in stream {label}")
        name = str(getattr(label, "value", label))
        arrays.append((name, array[:required].reshape(n_sequences, seq_len)))

    summaries: List[TestSummary] = []
    run = partial(_run_sequence, tests=tests, alpha=alpha)
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for label, sequences in arrays:
            if pool is not None:
                per_sequence = list(pool.map(run, sequences))
                if progress:
                    progress(len(per_sequence))
            else:
                per_sequence = []
                for sequence in sequences:
                    per_sequence.append(run(sequence))
                    if progress:
                        progress(1)
            for index, (name, _) in enumerate(tests):
                results = [row[index] for row in per_sequence]
                summaries.append(
                    TestSummary(
                        stream=label,
                        test=name,
                        p_values=[r.p_value for r in results],
                        n_pass=sum(r.passed for r in results),
                        n_sequences=n_sequences,
                        alpha=alpha,
                    )
                )
    finally:
        if pool is not None:
            pool.shutdown()

    return SuiteReport(alpha=alpha, n_sequences=n_sequences, seq_len=seq_len, summaries=summaries)
