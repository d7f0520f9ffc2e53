"""
Floating-point analysis of the hyperjerk system.

Lyapunov spectrum (Benettin tangent-space integration with periodic QR
re-orthonormalisation), Kaplan-Yorke dimension, equilibrium stability on
the line E(c, 0, 0, 0, 0), bifurcation sampling and Poincare sections.
All result containers are frozen and safe to pass between processes.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from functools import partial
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .chaos import (BackendKind, FloatBackend, InitialCondition, SolverConfig,
                    StateVec, Stepper, eval_f)
from .errors import DivergenceError, ValidationError

DIVERGENCE_CUTOFF = 1e6
ZERO_ROOT_TOLERANCE = 1e-12
EXTREMUM_QUANTUM = 1e-3

_FLOAT = FloatBackend()

# Constant part of the Jacobian; rows 4 and 5 get the state-dependent entries.
_JACOBIAN_BASE = np.array(
    [
        [0.0, 1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, -1.0, -0.5, 0.0],
        [0.0, 0.0, 0.0, -1.0, -0.5],
    ]
)


def jacobian(s: Sequence[float]) -> np.ndarray:
    """Matrix of partial derivatives of F at s"""
    x, y, z, _, _ = (float(c) for c in s)
    j = _JACOBIAN_BASE.copy()
    j[3, 0] = y
    j[3, 1] = x - 1.0
    j[4, 0] = z
    j[4, 2] = x - 1.0
    return j


def _field(state: np.ndarray) -> np.ndarray:
    return np.array(eval_f(StateVec(*state.tolist()), _FLOAT))


def _tangent_step(state: np.ndarray, q: np.ndarray, h: float) -> Tuple[np.ndarray, np.ndarray]:
    """One RK4 step of the state together with its tangent frame"""
    h2 = 0.5 * h
    f1, g1 = _field(state), jacobian(state) @ q
    s2, q2 = state + h2 * f1, q + h2 * g1
    f2, g2 = _field(s2), jacobian(s2) @ q2
    s3, q3 = state + h2 * f2, q + h2 * g2
    f3, g3 = _field(s3), jacobian(s3) @ q3
    s4, q4 = state + h * f3, q + h * g3
    f4, g4 = _field(s4), jacobian(s4) @ q4
    state = state + (h / 6.0) * (f1 + 2.0 * f2 + 2.0 * f3 + f4)
    q = q + (h / 6.0) * (g1 + 2.0 * g2 + 2.0 * g3 + g4)
    return state, q


def lyapunov_dimension(exponents: Sequence[float]) -> float:
    """Kaplan-Yorke dimension D = j + sum(L_1..L_j) / |L_{j+1}|"""
    ordered = sorted((float(e) for e in exponents), reverse=True)
    if not ordered or ordered[0] <= 0:
        return 0.0

    partial_sum = 0.0
    j = 0
    for exponent in ordered:
        if partial_sum + exponent < 0:
            break
        partial_sum += exponent
        j += 1

    if j == len(ordered):
        return float(j)
    if ordered[j] == 0:
        raise ValidationError("Kaplan-Yorke dimension undefined: L_{j+1} is zero")
    return j + partial_sum / abs(ordered[j])


@dataclass(frozen=True)
class LyapunovSpectrum:
    """Exponents in nats per unit time, sorted descending"""

    exponents: Tuple[float, ...]
    dimension: float

    def __post_init__(self):
        if list(self.exponents) != sorted(self.exponents, reverse=True):
            raise ValidationError("Lyapunov exponents must be sorted descending")

    @classmethod
    def from_exponents(cls, exponents: Iterable[float]) -> "LyapunovSpectrum":
        ordered = tuple(sorted((float(e) for e in exponents), reverse=True))
        return cls(ordered, lyapunov_dimension(ordered))

    @property
    def total(self) -> float:
        return math.fsum(self.exponents)


def lyapunov_spectrum(
    ic: InitialCondition,
    t_total: float,
    h: float = 0.01,
    renorm_every: int = 10,
    transient: float = 0.0,
    divergence_cutoff: float = DIVERGENCE_CUTOFF,
) -> LyapunovSpectrum:
    """Benettin estimate of the full spectrum.

    Converged values need t_total of at least 1e4 time units.
    """
    if t_total <= 0 or h <= 0 or renorm_every < 1:
        raise ValidationError("t_total, h and renorm_every must be positive")

    state = np.array(ic.vector(), dtype=float)
    q = np.eye(5)
    sums = np.zeros(5)
    n_transient = int(round(transient / h))
    n_steps = int(round(t_total / h))
    accumulated_steps = 0

    for index in range(1, n_transient + n_steps + 1):
        state, q = _tangent_step(state, q, h)
        measuring = index > n_transient
        last = index == n_transient + n_steps
        if index % renorm_every and not last:
            continue

        norm = float(np.linalg.norm(state))
        if not math.isfinite(norm) or norm > divergence_cutoff:
            raise DivergenceError(index * h, norm)

        q, r = np.linalg.qr(q)
        diag = np.diag(r)
        q = q * np.sign(diag)
        if measuring:
            sums += np.log(np.abs(diag))
            accumulated_steps = index - n_transient

    if accumulated_steps == 0:
        raise ValidationError("Integration horizon shorter than one renormalisation")
    return LyapunovSpectrum.from_exponents(sums / (accumulated_steps * h))


@dataclass(frozen=True)
class LyapunovSweepRow:
    c: float
    spectrum: Optional[LyapunovSpectrum]

    @property
    def diverged(self) -> bool:
        return self.spectrum is None


def _sweep_point(c: float, t_total: float, h: float, transient: float) -> LyapunovSweepRow:
    try:
        spectrum = lyapunov_spectrum(
            InitialCondition.with_c(c), t_total, h, transient=transient
        )
    except DivergenceError:
        return LyapunovSweepRow(c, None)
    return LyapunovSweepRow(c, spectrum)


def lyapunov_sweep(
    c_values: Sequence[float],
    t_total: float,
    h: float = 0.01,
    transient: float = 0.0,
    workers: int = 1,
) -> List[LyapunovSweepRow]:
    """Spectrum as a function of c; diverging points are marked, not raised"""
    run = partial(_sweep_point, t_total=t_total, h=h, transient=transient)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, c_values))
    return [run(c) for c in c_values]


class Stability(str, Enum):
    STABLE = "stable"
    MARGINAL_ZERO = "marginal_zero"
    UNSTABLE = "unstable"


def routh_hurwitz_stable(coefficients: Sequence[float]) -> bool:
    """True when every root of the polynomial has negative real part.

    Coefficients are given leading first; all Hurwitz leading principal
    minors must be positive.
    """
    a = [float(c) for c in coefficients]
    if a[0] < 0:
        a = [-c for c in a]
    n = len(a) - 1
    if n < 1:
        return True
    hurwitz = np.zeros((n, n))
    for row in range(n):
        for col in range(n):
            k = 2 * col - row + 1
            if 0 <= k <= n:
                hurwitz[row, col] = a[k]
    return all(np.linalg.det(hurwitz[:k, :k]) > 0 for k in range(1, n + 1))


@dataclass(frozen=True)
class StabilityReport:
    c: float
    eigenvalues: Tuple[complex, ...]
    classification: Stability
    routh_hurwitz: bool
    polynomial: Tuple[float, ...] = field(default=())
    # Spectrum of jacobian((c, 0, 0, 0, 0)) itself, for cross-checking.
    jacobian_eigenvalues: Tuple[complex, ...] = field(default=())

    @property
    def max_nonzero_real(self) -> float:
        nonzero = [ev.real for ev in self.eigenvalues if abs(ev) > ZERO_ROOT_TOLERANCE]
        return max(nonzero) if nonzero else 0.0


def stability_at(c: float) -> StabilityReport:
    """Roots of lambda (lambda + 0.5)(lambda^2 + 1.5 lambda + (c - 0.5))"""
    quadratic = [1.0, 1.5, c - 0.5]
    roots = np.concatenate(([0.0 + 0j, -0.5 + 0j], np.roots(quadratic).astype(complex)))
    polynomial = np.polymul(np.polymul([1.0, 0.0], [1.0, 0.5]), quadratic)

    # The quadratic has a positive linear coefficient, so the sign of its
    # constant term alone decides the transverse roots, however close to 0.5.
    constant = c - 0.5
    if constant < 0:
        classification = Stability.UNSTABLE
    elif constant == 0:
        classification = Stability.MARGINAL_ZERO
    else:
        classification = Stability.STABLE

    ordered = tuple(sorted((complex(r) for r in roots), key=lambda r: (-r.real, r.imag)))
    return StabilityReport(
        c=c,
        eigenvalues=ordered,
        classification=classification,
        routh_hurwitz=routh_hurwitz_stable(quadratic),
        polynomial=tuple(float(p) for p in polynomial),
        jacobian_eigenvalues=tuple(
            complex(ev) for ev in np.linalg.eigvals(jacobian((c, 0.0, 0.0, 0.0, 0.0)))
        ),
    )


@dataclass(frozen=True)
class BifurcationSample:
    """Local maxima of one component after the transient, for one c"""

    c: float
    extrema: Tuple[float, ...]
    diverged: bool = False

    @property
    def distinct_extrema(self) -> int:
        if not self.extrema:
            return 0
        quantized = np.round(np.asarray(self.extrema) / EXTREMUM_QUANTUM)
        return int(np.unique(quantized).size)


_COMPONENTS = {"x": 0, "y": 1, "z": 2, "u": 3, "v": 4}


def _batch_extrema(
    cs: np.ndarray,
    transient: float,
    capture: float,
    h: float,
    component: str,
    divergence_cutoff: float,
) -> List[BifurcationSample]:
    reference = InitialCondition.reference().vector()
    state = StateVec(cs.astype(float), *(np.full(cs.shape, value) for value in reference[1:]))
    stepper = Stepper(SolverConfig(h=h, backend=BackendKind.DOUBLE))
    axis = _COMPONENTS[component]
    diverged = np.zeros(cs.shape, dtype=bool)
    extrema: List[List[float]] = [[] for _ in cs]

    n_transient = int(round(transient / h))
    n_capture = int(round(capture / h))
    prev2 = prev1 = None

    with np.errstate(over="ignore", invalid="ignore"):
        for index in range(n_transient + n_capture):
            state = stepper.step(state)
            if index % 100 == 0:
                magnitude = np.max(np.abs(np.vstack(state)), axis=0)
                escaped = ~np.isfinite(magnitude) | (magnitude > divergence_cutoff)
                if escaped.any():
                    diverged |= escaped
                    # Parked at the origin, an equilibrium, so it stays put.
                    state = StateVec(*(np.where(diverged, 0.0, c) for c in state))
            if index < n_transient:
                continue
            current = state[axis].copy()
            if prev2 is not None:
                peaks = (prev1 > prev2) & (prev1 >= current) & ~diverged
                for column in np.nonzero(peaks)[0]:
                    extrema[column].append(float(prev1[column]))
            prev2, prev1 = prev1, current

    return [
        BifurcationSample(float(c), () if d else tuple(e), bool(d))
        for c, e, d in zip(cs, extrema, diverged)
    ]


def bifurcation_sweep(
    c_min: float,
    c_max: float,
    n_points: int,
    transient: float = 500.0,
    capture: float = 500.0,
    h: float = 0.01,
    component: str = "x",
    workers: int = 1,
    divergence_cutoff: float = DIVERGENCE_CUTOFF,
) -> List[BifurcationSample]:
    """Local maxima of a state component over a grid of c values"""
    if not 0.0 <= c_min <= c_max <= 1.0:
        raise ValidationError(f"c range [{c_min}, {c_max}] must lie within [0, 1]")
    if n_points < 1:
        raise ValidationError("n_points must be at least 1")
    if transient < 100:
        raise ValidationError("transient must be at least 100 time units")
    if component not in _COMPONENTS:
        raise ValidationError(f"Unknown component '{component}'")

    cs = np.linspace(c_min, c_max, n_points)
    run = partial(
        _batch_extrema,
        transient=transient,
        capture=capture,
        h=h,
        component=component,
        divergence_cutoff=divergence_cutoff,
    )
    if workers > 1 and n_points > 1:
        chunks = np.array_split(cs, min(workers, n_points))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return [sample for part in pool.map(run, chunks) for sample in part]
    return run(cs)


def poincare_section(
    ic: InitialCondition,
    plane_x: float = 1.0,
    t_total: float = 1000.0,
    h: float = 0.01,
    transient: float = 0.0,
    divergence_cutoff: float = DIVERGENCE_CUTOFF,
) -> np.ndarray:
    """(y, z, u, v) at positive-going crossings of x = plane_x.

    Each crossing is located by linear interpolation between the two
    bracketing steps. Returns an array of shape (k, 4); k may be zero.
    """
    if t_total < 1000:
        raise ValidationError("t_total must be at least 1000 time units")

    stepper = Stepper(SolverConfig(h=h, backend=BackendKind.DOUBLE))
    previous = ic.to_state(stepper.backend)
    n_transient = int(round(transient / h))
    n_steps = int(round(t_total / h))
    points: List[Tuple[float, float, float, float]] = []

    for index, current in enumerate(stepper.iterate(previous, n_transient + n_steps), 1):
        if abs(current.x) > divergence_cutoff or not math.isfinite(current.x):
            raise DivergenceError(index * h, abs(current.x))
        if index > n_transient and previous.x < plane_x <= current.x:
            theta = (plane_x - previous.x) / (current.x - previous.x)
            points.append(
                tuple(p + theta * (q - p) for p, q in zip(previous[1:], current[1:]))
            )
        previous = current

    return np.array(points, dtype=float).reshape(-1, 4)
