"""
Independent reference computations used by the tests.
Written straight-line, without the library's backends or stepper.
"""

import math


def hyperjerk_rhs(s):
    x, y, z, u, v = s
    return (
        y,
        z,
        u,
        -z - 0.5 * u + (x - 1.0) * y,
        -u - 0.5 * v + (x - 1.0) * z,
    )


def rk4_step(s, h):
    k1 = hyperjerk_rhs(s)
    k2 = hyperjerk_rhs([si + 0.5 * h * ki for si, ki in zip(s, k1)])
    k3 = hyperjerk_rhs([si + 0.5 * h * ki for si, ki in zip(s, k2)])
    k4 = hyperjerk_rhs([si + h * ki for si, ki in zip(s, k3)])
    return tuple(
        si + h / 6.0 * (a + 2.0 * b + 2.0 * c + d)
        for si, a, b, c, d in zip(s, k1, k2, k3, k4)
    )


def rk4_solve(s, h, t_total):
    for _ in range(int(round(t_total / h))):
        s = rk4_step(s, h)
    return s


def max_abs_diff(a, b):
    return max(abs(p - q) for p, q in zip(a, b))


def erfc_monobit(bits):
    n = len(bits)
    s_n = sum(2 * b - 1 for b in bits)
    return math.erfc(abs(s_n) / math.sqrt(n) / math.sqrt(2))


def scramble_reference(bits, register):
    """o_t = in_t ^ o_{t-5} ^ o_{t-6}; register lists o_{t-1}..o_{t-6}"""
    history = list(register)
    out = []
    for bit in bits:
        o = bit ^ history[4] ^ history[5]
        out.append(o)
        history = [o] + history[:-1]
    return out
