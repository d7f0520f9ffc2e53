"""
Post-processing of fixed-point chaotic states into random bitstreams.

Pipeline per state: keep the 12 least-significant bits of every
component, serialize LSB-first, run the V channel through a
self-synchronizing scrambler (x^6 + x^5 + 1) and XOR its output into the
X, Y, Z and U channels. Also holds the entropy and histogram
instrumentation used to choose the truncation width.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import stats

from .chaos import (BackendKind, InitialCondition, SolverConfig, StateVec,
                    Stepper)
from .errors import LengthMismatchError, ValidationError
from .fxp import Fx32

WORD_BITS = 12
WORD_MASK = (1 << WORD_BITS) - 1
SCRAMBLER_LENGTH = 6
# Taps at register positions 5 and 6: x^6 + x^5 + 1
SCRAMBLER_TAPS = (1 << 4) | (1 << 5)
DEFAULT_DISCARD = 1000


class Channel(str, Enum):
    X = "x"
    Y = "y"
    Z = "z"
    U = "u"
    V = "v"


class StreamLabel(str, Enum):
    B1 = "B1"
    B2 = "B2"
    B3 = "B3"
    B4 = "B4"
    B5 = "B5"
    INTERMEDIATE = "intermediate"


OUTPUT_LABELS = (StreamLabel.B1, StreamLabel.B2, StreamLabel.B3, StreamLabel.B4, StreamLabel.B5)


@dataclass(frozen=True, slots=True)
class TruncatedWord:
    bits: int
    channel: Channel

    def __post_init__(self):
        if not 0 <= self.bits <= WORD_MASK:
            raise ValidationError(f"Truncated word {self.bits} does not fit in {WORD_BITS} bits")


@dataclass
class BitStream:
    """Ordered bits (uint8 0/1) with their channel label"""

    label: StreamLabel
    bits: np.ndarray

    def __post_init__(self):
        self.bits = np.ascontiguousarray(self.bits, dtype=np.uint8)

    @property
    def length(self) -> int:
        return int(self.bits.size)

    def __len__(self) -> int:
        return self.length

    def ones_fraction(self) -> float:
        return float(self.bits.mean()) if self.bits.size else 0.0


def _raw(component: Union[int, Fx32]) -> int:
    return component.raw if isinstance(component, Fx32) else int(component)


def truncate(s: StateVec) -> Tuple[TruncatedWord, ...]:
    """raw & 0xFFF of every component, in (x, y, z, u, v) order"""
    return tuple(
        TruncatedWord(_raw(component) & WORD_MASK, channel)
        for component, channel in zip(s, Channel)
    )


def truncate_raw(raws: np.ndarray, width: int = WORD_BITS) -> np.ndarray:
    """Vectorised truncation of raw words to their `width` LSBs"""
    if not 1 <= width <= 32:
        raise ValidationError(f"Truncation width must be in 1..32, got {width}")
    mask = (1 << width) - 1
    return (np.asarray(raws, dtype=np.int64) & mask).astype(np.uint64)


def serialize(word: Union[TruncatedWord, int]) -> List[int]:
    """12 bits, LSB first"""
    value = word.bits if isinstance(word, TruncatedWord) else int(word)
    return [(value >> i) & 1 for i in range(WORD_BITS)]


def deserialize(bits: Sequence[int]) -> int:
    if len(bits) != WORD_BITS:
        raise LengthMismatchError(f"Expected {WORD_BITS} bits, got {len(bits)}")
    return sum((int(b) & 1) << i for i, b in enumerate(bits))


def serialize_words(words: np.ndarray, width: int = WORD_BITS) -> np.ndarray:
    """Serialize an array of words LSB-first into one flat bit array"""
    words = np.asarray(words, dtype=np.uint64)
    shifts = np.arange(width, dtype=np.uint64)
    return ((words[:, None] >> shifts) & np.uint64(1)).astype(np.uint8).ravel()


def words_from_bits(bits: np.ndarray, width: int = WORD_BITS) -> np.ndarray:
    """Reassemble LSB-first words from a bit array; a partial tail is dropped"""
    bits = np.asarray(bits, dtype=np.uint64)
    usable = (bits.size // width) * width
    weights = np.uint64(1) << np.arange(width, dtype=np.uint64)
    return (bits[:usable].reshape(-1, width) * weights).sum(axis=1)


@dataclass
class ScramblerState:
    """Register bits r1..rm (r_k holds the output k steps back) and tap mask"""

    register: Tuple[int, ...] = (0,) * SCRAMBLER_LENGTH
    taps: int = SCRAMBLER_TAPS

    def __post_init__(self):
        if len(self.register) != SCRAMBLER_LENGTH:
            raise ValidationError(f"Scrambler register must hold {SCRAMBLER_LENGTH} bits")
        if self.taps == 0 or self.taps >> SCRAMBLER_LENGTH:
            raise ValidationError("Scrambler taps must be a nonzero mask over positions 1..6")

    @classmethod
    def from_seed(cls, seed_bits: Sequence[int]) -> "ScramblerState":
        """Preload from the first m bits of the seed stream, oldest first"""
        if len(seed_bits) < SCRAMBLER_LENGTH:
            raise LengthMismatchError(
                f"Need {SCRAMBLER_LENGTH} seed bits, got {len(seed_bits)}"
            )
        first = [int(b) & 1 for b in seed_bits[:SCRAMBLER_LENGTH]]
        # The newest preload bit sits in r1.
        return cls(register=tuple(reversed(first)))

    def as_int(self) -> int:
        return sum(bit << i for i, bit in enumerate(self.register))


class Scrambler:
    """Self-synchronizing scrambler o_t = in_t ^ o_{t-5} ^ o_{t-6}.

    Stateful and strictly sequential; use one instance per stream.
    """

    def __init__(self, state: Optional[ScramblerState] = None):
        state = state or ScramblerState()
        self._register = state.as_int()
        self._taps = state.taps
        self._mask = (1 << SCRAMBLER_LENGTH) - 1

    @property
    def state(self) -> ScramblerState:
        return ScramblerState(
            register=tuple((self._register >> i) & 1 for i in range(SCRAMBLER_LENGTH)),
            taps=self._taps,
        )

    def scramble(self, bits: Iterable[int]) -> np.ndarray:
        data = np.asarray(bits, dtype=np.uint8)
        out = np.empty(data.size, dtype=np.uint8)
        register, taps, mask = self._register, self._taps, self._mask
        for t, bit in enumerate(data.tolist()):
            o = (bit ^ (register & taps).bit_count()) & 1
            out[t] = o
            register = ((register << 1) | o) & mask
        self._register = register
        return out

    def descramble(self, bits: Iterable[int]) -> np.ndarray:
        """Inverse recurrence: in_t = o_t ^ o_{t-5} ^ o_{t-6}"""
        data = np.asarray(bits, dtype=np.uint8)
        out = np.empty(data.size, dtype=np.uint8)
        register, taps, mask = self._register, self._taps, self._mask
        for t, o in enumerate(data.tolist()):
            out[t] = (o ^ (register & taps).bit_count()) & 1
            register = ((register << 1) | o) & mask
        self._register = register
        return out


def scramble(seed_stream: Iterable[int], state: Optional[ScramblerState] = None) -> np.ndarray:
    """Scramble a bit sequence starting from the given register state"""
    return Scrambler(state).scramble(seed_stream)


def combine(channels: Sequence[np.ndarray], scrambled: np.ndarray) -> List[BitStream]:
    """B1..B4 = channel XOR scrambled, B5 = scrambled"""
    if len(channels) != 4:
        raise ValidationError(f"Expected 4 channel streams, got {len(channels)}")
    scrambled = np.asarray(scrambled, dtype=np.uint8)
    for index, channel in enumerate(channels):
        if len(channel) != scrambled.size:
            raise LengthMismatchError(
                f"Channel {index + 1} has {len(channel)} bits, scrambler output {scrambled.size}"
            )
    streams = [
        BitStream(label, np.bitwise_xor(np.asarray(channel, dtype=np.uint8), scrambled))
        for label, channel in zip(OUTPUT_LABELS[:4], channels)
    ]
    streams.append(BitStream(StreamLabel.B5, scrambled.copy()))
    return streams


class BitGenerator:
    """Deterministic chaotic bit generator.

    The first `discard` states are dropped as transient; the first six bits
    of the serialized V stream preload the scrambler and the first six bits
    of every other channel are dropped with them to keep positions aligned.
    """

    def __init__(
        self,
        ic: Optional[InitialCondition] = None,
        config: Optional[SolverConfig] = None,
        discard: int = DEFAULT_DISCARD,
    ):
        if discard < 0:
            raise ValidationError("discard must be nonnegative")
        self.ic = ic or InitialCondition.reference()
        self.config = config or SolverConfig()
        self.discard = discard

    def states_for(self, n_bits: int) -> int:
        return math.ceil((n_bits + SCRAMBLER_LENGTH) / WORD_BITS)

    def raw_states(self, n_states: int) -> np.ndarray:
        """Post-transient states as an (n_states, 5) array of raw words.

        For the double backend the components are converted to Q4.27 first.
        """
        stepper = Stepper(self.config)
        backend = stepper.backend
        out = np.empty((n_states, 5), dtype=np.int64)
        states = stepper.iterate(self.ic.to_state(backend), self.discard + n_states)
        for index, state in enumerate(states):
            if index < self.discard:
                continue
            row = index - self.discard
            if backend.kind is BackendKind.FIXED:
                out[row] = state
            else:
                out[row] = [int(round(c * (1 << 27))) for c in state]
        return out

    def truncated_words(self, n_states: int) -> np.ndarray:
        """(n_states, 5) array of 12-bit words"""
        return truncate_raw(self.raw_states(n_states)).astype(np.uint16)

    def _serialized(self, n_bits: int) -> List[np.ndarray]:
        words = self.truncated_words(self.states_for(n_bits))
        return [serialize_words(words[:, k]) for k in range(5)]

    def raw_streams(self, n_bits: int) -> List[BitStream]:
        """Serialized truncated channels before post-processing"""
        channels = self._serialized(n_bits)
        start = SCRAMBLER_LENGTH
        return [
            BitStream(label, bits[start:start + n_bits])
            for label, bits in zip(OUTPUT_LABELS, channels)
        ]

    def generate(self, n_bits: int) -> Dict[StreamLabel, BitStream]:
        """The five output streams B1..B5, n_bits each"""
        if n_bits < 1:
            raise ValidationError("n_bits must be at least 1")
        x, y, z, u, v = self._serialized(n_bits)
        start = SCRAMBLER_LENGTH
        scrambler = Scrambler(ScramblerState.from_seed(v[:start]))
        scrambled = scrambler.scramble(v[start:start + n_bits])
        aligned = [channel[start:start + n_bits] for channel in (x, y, z, u)]
        return {stream.label: stream for stream in combine(aligned, scrambled)}


def _word_values(words: Iterable[Union[TruncatedWord, int]]) -> np.ndarray:
    values = [w.bits if isinstance(w, TruncatedWord) else int(w) for w in words]
    return np.asarray(values, dtype=np.uint64)


def shannon_entropy(words: Iterable[Union[TruncatedWord, int]], n_b: int) -> float:
    """H = -sum p_i log2 p_i over the empirical symbol histogram, in bits"""
    if not 1 <= n_b <= 32:
        raise ValidationError(f"N_b must be in 1..32, got {n_b}")
    values = words if isinstance(words, np.ndarray) else _word_values(words)
    if values.size == 0:
        raise ValidationError("Entropy of an empty sequence is undefined")
    _, counts = np.unique(values, return_counts=True)
    p = counts / counts.sum()
    return float(max(0.0, -(p * np.log2(p)).sum()))


def avg_entropy_per_bit(words: Iterable[Union[TruncatedWord, int]], n_b: int) -> float:
    return shannon_entropy(words, n_b) / n_b


@dataclass(frozen=True)
class EntropyRow:
    n_b: int
    entropy_per_bit: float


def entropy_sweep(
    raws: Union[np.ndarray, Sequence[StateVec]],
    widths: Iterable[int],
    channel: Channel = Channel.X,
) -> List[EntropyRow]:
    """Average entropy per bit of one channel truncated to each width.

    Reliable histograms need roughly 32 * 2**max(width) samples; shorter
    inputs bias the estimate low.
    """
    if isinstance(raws, np.ndarray):
        table = raws
    else:
        table = np.asarray([[_raw(c) for c in s] for s in raws], dtype=np.int64)
    column = table[:, list(Channel).index(Channel(channel))]
    return [
        EntropyRow(width, avg_entropy_per_bit(truncate_raw(column, width), width))
        for width in sorted(set(widths))
    ]


def word_histogram(words: np.ndarray, n_b: int = WORD_BITS) -> np.ndarray:
    """Counts for every symbol 0..2**n_b - 1"""
    if not 1 <= n_b <= 24:
        raise ValidationError(f"Histogram width must be in 1..24, got {n_b}")
    return np.bincount(np.asarray(words, dtype=np.int64), minlength=1 << n_b)


def histogram_chi_square(words: np.ndarray, n_b: int = WORD_BITS) -> Tuple[float, float]:
    """Chi-square flatness statistic and p-value over the 2**n_b bins"""
    counts = word_histogram(words, n_b)
    result = stats.chisquare(counts)
    return float(result.statistic), float(result.pvalue)


def xy_distribution(words: np.ndarray) -> np.ndarray:
    """(X, Y) truncated-word pairs, shape (n, 2), for scatter export"""
    return np.asarray(words)[:, :2].copy()
