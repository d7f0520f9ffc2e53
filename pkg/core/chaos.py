"""
5D hyperjerk vector field and the fourth-order Runge-Kutta stepper.

Every stage of a step is evaluated through one shared mapping
(`Stepper.eval_f`), the software form of folding a single F block four
times. Two scalar backends are supported: raw Q4.27 integers
(bit-exact, canonical for bit generation) and floats. The float backend
also accepts numpy arrays as scalars, which advances many initial
conditions at once.

Under WRAP the hyperjerk field on raw words takes a straight-line
integer path that gives the same words as the backend dispatch.
"""

import sys
from enum import Enum
from typing import (Callable, Generic, Iterator, List, NamedTuple, Optional,
                    Protocol, Tuple, TypeVar)

from pydantic import BaseModel, ConfigDict, Field, model_validator

from . import fxp
from .errors import NumericTrapError, ValidationError
from .fxp import OverflowPolicy

S = TypeVar("S")

# Generic NamedTuple subclasses need Python 3.11+
_GENERIC_S = (Generic[S],) if sys.version_info >= (3, 11) else ()


class StateVec(NamedTuple, *_GENERIC_S):
    """System state S = (x, y, z, u, v)"""

    x: S
    y: S
    z: S
    u: S
    v: S


class BackendKind(str, Enum):
    """Scalar arithmetic used by the stepper"""

    FIXED = "fixed"
    DOUBLE = "double"


class Backend(Protocol[S]):
    """Scalar arithmetic needed by the vector field and the stepper"""

    kind: BackendKind
    one: S

    def const(self, value: float) -> S: ...

    def add(self, a: S, b: S) -> S: ...

    def sub(self, a: S, b: S) -> S: ...

    def mul(self, a: S, b: S) -> S: ...

    def neg(self, a: S) -> S: ...

    def half(self, a: S) -> S: ...

    def to_float(self, a: S) -> float: ...


class FixedBackend:
    """Q4.27 arithmetic on raw 32-bit words"""

    kind = BackendKind.FIXED
    one = fxp.SCALE

    def __init__(self, policy: OverflowPolicy = OverflowPolicy.WRAP):
        self.policy = policy

    def const(self, value: float) -> int:
        return fxp.from_real_raw(value, self.policy)

    def add(self, a: int, b: int) -> int:
        return fxp.add_raw(a, b, self.policy)

    def sub(self, a: int, b: int) -> int:
        return fxp.sub_raw(a, b, self.policy)

    def mul(self, a: int, b: int) -> int:
        return fxp.mul_raw(a, b, self.policy)

    def neg(self, a: int) -> int:
        return fxp.neg_raw(a, self.policy)

    def half(self, a: int) -> int:
        return fxp.half_raw(a)

    def to_float(self, a: int) -> float:
        return a / fxp.SCALE


class FloatBackend:
    """Double-precision arithmetic; scalars may be floats or numpy arrays"""

    kind = BackendKind.DOUBLE
    one = 1.0

    def const(self, value: float) -> float:
        return float(value)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def half(self, a):
        return 0.5 * a

    def to_float(self, a) -> float:
        return float(a)


class SolverConfig(BaseModel):
    """Step size, scalar backend and overflow handling"""

    model_config = ConfigDict(frozen=True)

    h: float = Field(default=0.01, gt=0)
    backend: BackendKind = BackendKind.FIXED
    overflow: OverflowPolicy = OverflowPolicy.WRAP

    @model_validator(mode="after")
    def _representable_step(self) -> "SolverConfig":
        if self.backend is BackendKind.FIXED:
            if self.h >= 16 or fxp.from_real_raw(self.h / 6) == 0:
                raise ValueError(
                    f"step {self.h} is not representable in the Q4.27 constant table"
                )
        return self

    def make_backend(self) -> Backend:
        if self.backend is BackendKind.FIXED:
            return FixedBackend(self.overflow)
        return FloatBackend()


REFERENCE_STATE = (0.0002, 0.0005, 0.00005, 0.001, 0.0)


class InitialCondition(BaseModel):
    """Initial state; x0 is the swept parameter c"""

    model_config = ConfigDict(frozen=True)

    x0: float = REFERENCE_STATE[0]
    y0: float = REFERENCE_STATE[1]
    z0: float = REFERENCE_STATE[2]
    u0: float = REFERENCE_STATE[3]
    v0: float = REFERENCE_STATE[4]

    @classmethod
    def reference(cls) -> "InitialCondition":
        return cls()

    @classmethod
    def with_c(cls, c: float) -> "InitialCondition":
        """Reference state with x0 replaced by c"""
        return cls(x0=c)

    @classmethod
    def from_vector(cls, values: Tuple[float, ...]) -> "InitialCondition":
        if len(values) != 5:
            raise ValidationError(f"Initial condition needs 5 components, got {len(values)}")
        return cls(x0=values[0], y0=values[1], z0=values[2], u0=values[3], v0=values[4])

    @property
    def c(self) -> float:
        return self.x0

    def vector(self) -> Tuple[float, float, float, float, float]:
        return (self.x0, self.y0, self.z0, self.u0, self.v0)

    def to_state(self, backend: Backend) -> StateVec:
        return StateVec(*(backend.const(value) for value in self.vector()))


def eval_f(s: StateVec, backend: Backend) -> StateVec:
    """F(S) = (y, z, u, -z - 0.5u + (x-1)y, -u - 0.5v + (x-1)z)"""
    x, y, z, u, v = s
    xm1 = backend.sub(x, backend.one)
    fu = backend.add(backend.sub(backend.neg(z), backend.half(u)), backend.mul(xm1, y))
    fv = backend.add(backend.sub(backend.neg(u), backend.half(v)), backend.mul(xm1, z))
    return StateVec(y, z, u, fu, fv)


class VectorField(Protocol):
    """A right-hand side that can be bound to a scalar backend"""

    name: str

    def bind(self, backend: Backend) -> Callable[[Tuple], Tuple]: ...


class HyperjerkField:
    """The 5D hyperchaotic system with a line of equilibria"""

    name = "hyperjerk"

    def bind(self, backend: Backend) -> Callable[[StateVec], StateVec]:
        return lambda s: eval_f(s, backend)


class LorenzState(NamedTuple, *_GENERIC_S):
    x: S
    y: S
    z: S


class LorenzField:
    """Lorenz system, plug-in example for the float backend.

    Its attractor leaves the Q4.27 range, so it is not meant for the
    fixed-point backend.
    """

    name = "lorenz"

    def __init__(self, sigma: float = 10.0, rho: float = 28.0, beta: float = 8.0 / 3.0):
        self.sigma = sigma
        self.rho = rho
        self.beta = beta

    def bind(self, backend: Backend) -> Callable[[LorenzState], LorenzState]:
        sigma = backend.const(self.sigma)
        rho = backend.const(self.rho)
        beta = backend.const(self.beta)

        def rhs(s: LorenzState) -> LorenzState:
            x, y, z = s
            return LorenzState(
                backend.mul(sigma, backend.sub(y, x)),
                backend.sub(backend.mul(x, backend.sub(rho, z)), y),
                backend.sub(backend.mul(x, y), backend.mul(beta, z)),
            )

        return rhs


_HALF_WORD = 1 << (fxp.WORD_BITS - 1)
_MASK = fxp.WORD_MASK
_FRAC = fxp.FRAC_BITS


def _hyperjerk_rhs_wrap(x: int, y: int, z: int, u: int, v: int) -> Tuple[int, int]:
    # Reducing a sum once gives the same word as reducing after every term.
    xm1 = ((x - fxp.SCALE + _HALF_WORD) & _MASK) - _HALF_WORD
    fu = ((-z - (u >> 1) + ((xm1 * y) >> _FRAC) + _HALF_WORD) & _MASK) - _HALF_WORD
    fv = ((-u - (v >> 1) + ((xm1 * z) >> _FRAC) + _HALF_WORD) & _MASK) - _HALF_WORD
    return fu, fv


def _nudge(si: int, a: int, ki: int) -> int:
    return ((si + ((a * ki) >> _FRAC) + _HALF_WORD) & _MASK) - _HALF_WORD


def _hyperjerk_step_wrap(s: StateVec, h: int, h_half: int, h_sixth: int) -> StateVec:
    """One RK4 step of the hyperjerk field on raw words under WRAP"""
    x, y, z, u, v = s
    k1 = (y, z, u, *_hyperjerk_rhs_wrap(x, y, z, u, v))

    s2 = [_nudge(si, h_half, ki) for si, ki in zip(s, k1)]
    k2 = (s2[1], s2[2], s2[3], *_hyperjerk_rhs_wrap(*s2))

    s3 = [_nudge(si, h_half, ki) for si, ki in zip(s, k2)]
    k3 = (s3[1], s3[2], s3[3], *_hyperjerk_rhs_wrap(*s3))

    s4 = [_nudge(si, h, ki) for si, ki in zip(s, k3)]
    k4 = (s4[1], s4[2], s4[3], *_hyperjerk_rhs_wrap(*s4))

    return StateVec(
        *(
            _nudge(si, h_sixth, ((c1 + 2 * c2 + 2 * c3 + c4 + _HALF_WORD) & _MASK) - _HALF_WORD)
            for si, c1, c2, c3, c4 in zip(s, k1, k2, k3, k4)
        )
    )


class Stepper(Generic[S]):
    """RK4 integrator bound to one vector field and one backend.

    Holds only the constant table; the state is passed in and returned.
    """

    def __init__(self, config: SolverConfig, field: Optional[VectorField] = None):
        self.config = config
        self.backend: Backend = config.make_backend()
        self.field = field or HyperjerkField()
        self._f = self.field.bind(self.backend)
        b = self.backend
        self.h = b.const(config.h)
        self.h_half = b.const(config.h / 2)
        self.h_sixth = b.const(config.h / 6)
        self.straight_line = (
            isinstance(self.field, HyperjerkField)
            and isinstance(b, FixedBackend)
            and b.policy is OverflowPolicy.WRAP
        )

    def eval_f(self, s):
        """The single F block shared by all four stages"""
        return self._f(s)

    def _advance(self, s, a, k):
        b = self.backend
        return s._make(b.add(si, b.mul(a, ki)) for si, ki in zip(s, k))

    def step(self, s):
        """S_{n+1} = S_n + h/6 (k1 + 2k2 + 2k3 + k4)"""
        if self.straight_line:
            return _hyperjerk_step_wrap(s, self.h, self.h_half, self.h_sixth)
        b = self.backend
        k1 = self.eval_f(s)
        k2 = self.eval_f(self._advance(s, self.h_half, k1))
        k3 = self.eval_f(self._advance(s, self.h_half, k2))
        k4 = self.eval_f(self._advance(s, self.h, k3))
        total = s._make(
            b.add(b.add(c1, b.add(c2, c2)), b.add(b.add(c3, c3), c4))
            for c1, c2, c3, c4 in zip(k1, k2, k3, k4)
        )
        return self._advance(s, self.h_sixth, total)

    def iterate(self, s, n_steps: Optional[int] = None) -> Iterator:
        """Yield successive states; overflow traps carry the 1-based step index"""
        index = 0
        while n_steps is None or index < n_steps:
            index += 1
            try:
                s = self.step(s)
            except NumericTrapError as trap:
                raise trap.at_step(index) from trap
            yield s


def rk4_step(s: StateVec, config: SolverConfig) -> StateVec:
    return Stepper(config).step(s)


def trajectory(
    ic: InitialCondition, n_steps: int, config: SolverConfig
) -> List[StateVec]:
    """Return the n_steps states following the initial condition"""
    if n_steps < 1:
        raise ValidationError(f"n_steps must be at least 1, got {n_steps}")
    stepper = Stepper(config)
    return list(stepper.iterate(ic.to_state(stepper.backend), n_steps))


def state_to_floats(s: StateVec, backend: Backend) -> Tuple[float, ...]:
    return tuple(backend.to_float(c) for c in s)
