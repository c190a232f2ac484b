"""
Closed-form Jost functions and key quantities for the benchmark potentials.

All functions accept scalars or numpy arrays of complex k.
"""

import numpy as np

from .propagation import cos_sinc


def square_well_jost_function(k, v: float, b: float, cot_theta: float):
    """
    F(k) for V = v on (0, b):
    e^{ikb}[(k - i cot) cos(wb) - (i w^2 + k cot) sin(wb)/w], w^2 = k^2 - v.
    """
    k = np.asarray(k, dtype=complex)
    omega_sq = k * k - v
    c, s = cos_sinc(omega_sq, b)
    return np.exp(1j * k * b) * ((k - 1j * cot_theta) * c - (1j * omega_sq + k * cot_theta) * s)


def square_well_jost_solution(k, x, v: float, b: float):
    """f(k, x) inside the well, 0 <= x <= b."""
    k = np.asarray(k, dtype=complex)
    omega = np.sqrt(k * k - v + 0j)
    return (0.5 * (1 + k / omega) * np.exp(1j * (k - omega) * b + 1j * omega * x)
            + 0.5 * (1 - k / omega) * np.exp(1j * (k + omega) * b - 1j * omega * x))


def square_well_key_quantity(k, v: float, b: float, cot_theta: float):
    """
    D(k) for V = v on (0, b):
    (k^2 + cot^2) cos(wb) sin(kb)/k - (w^2 + cot^2) cos(kb) sin(wb)/w
    - v cot sin(wb)/w sin(kb)/k.
    """
    k = np.asarray(k, dtype=complex)
    omega_sq = k * k - v
    cw, sw = cos_sinc(omega_sq, b)
    ck, sk = cos_sinc(k * k, b)
    c2 = cot_theta * cot_theta
    return (k * k + c2) * cw * sk - (omega_sq + c2) * ck * sw - v * cot_theta * sw * sk


def two_step_key_quantity(k):
    """
    D(k) for b = 1, cot = 0, V = 1 on (0, 1/2) and -1 on (1/2, 1).

    Every term is even in both square roots, so branches do not matter.
    """
    k = np.asarray(k, dtype=complex)
    c1, s1 = cos_sinc(k * k - 1.0, 0.5)
    c2, s2 = cos_sinc(k * k + 1.0, 0.5)
    w1_sq = k * k - 1.0
    w2_sq = k * k + 1.0
    q1 = k * np.sin(k) * c1 * c2
    q2 = w2_sq * np.cos(k) * c1 * s2
    q3 = w1_sq * np.cos(k) * s1 * c2
    q4 = k * w1_sq * np.sin(k) * s1 * s2
    return q1 - q2 - q3 - q4


def two_step_asymptotic(k):
    """Large-k approximation (sin k / k) sin^2(k/2)."""
    k = np.asarray(k, dtype=complex)
    return np.sin(k) / k * np.sin(k / 2.0) ** 2


def delta_jost_at_origin(k, a: float, c: float):
    """f(k, 0) = 1 + (ic/2k)(1 - e^{2ika}) for a spike of strength c at a."""
    k = np.asarray(k, dtype=complex)
    return 1.0 + 1j * c / (2.0 * k) * (1.0 - np.exp(2j * k * a))


def delta_key_quantity(k, a: float, c: float, cot_theta: float):
    """D(k) = c[cos(ka) - cot sin(ka)/k]^2."""
    k = np.asarray(k, dtype=complex)
    ck, sk = cos_sinc(k * k, a)
    return c * (ck - cot_theta * sk) ** 2


def delta_taylor_coefficients(a: float, c: float, cot_theta: float):
    """(D_0, D_2, D_4) of the delta key quantity around k = 0."""
    ac = a * cot_theta
    d0 = c * (ac - 1.0) ** 2
    d2 = -(c * a * a / 3.0) * (ac - 1.0) * (ac - 3.0)
    d4 = (2.0 * c * a ** 4 / 45.0) * ((ac - 3.0) ** 2 - 1.5)
    return d0, d2, d4


def free_key_quantity(k):
    """D for V = 0 vanishes identically."""
    return np.zeros_like(np.asarray(k, dtype=complex))
