"""Composite single-qubit pulses and their static control-error scaling.

Every sequence enacts the net rotation R(theta, 0) from piecewise-constant
segments (theta_l, phi_l, Omega_l); the protected variants cancel the
leading Magnus orders of a quasi-static amplitude or detuning error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]])
_Z = np.diag([1.0, -1.0]).astype(complex)
_I = np.eye(2, dtype=complex)

SEQUENCE_NAMES = ("Primitive", "SK1", "BB1", "CORPSE", "WAMF",
                  "CinSK", "CinBB")

ERROR_AXES = ("amplitude", "detuning", "simultaneous")


@dataclass(frozen=True)
class PulseSequence:
    name: str
    theta: float
    segments: tuple  # (theta_l, phi_l, relative Rabi rate Omega_l) per segment


def rotation_unitary(theta: float, phi: float) -> np.ndarray:
    """R(theta, phi): rotation about the equatorial axis at angle phi."""
    half = theta / 2.0
    gen = math.cos(phi) * _X + math.sin(phi) * _Y
    return math.cos(half) * _I - 1j * math.sin(half) * gen


def _corpse_segments(theta: float):
    k = math.asin(math.sin(theta / 2.0) / 2.0)
    return [(2.0 * math.pi + theta / 2.0 - k, 0.0, 1.0),
            (2.0 * math.pi - 2.0 * k, math.pi, 1.0),
            (theta / 2.0 - k, 0.0, 1.0)]


def _sk1_tail(phi1: float):
    return [(2.0 * math.pi, -phi1, 1.0), (2.0 * math.pi, phi1, 1.0)]


def _bb1_tail(phi1: float):
    return [(math.pi, phi1, 1.0), (2.0 * math.pi, 3.0 * phi1, 1.0),
            (math.pi, phi1, 1.0)]


def build_sequence(name: str, theta: float) -> PulseSequence:
    """Segment list of the named composite pulse enacting R(theta, 0).

    phi1 = arccos(-theta/4pi) sets the correction phases of the
    amplitude-robust families; k = arcsin(sin(theta/2)/2) the CORPSE
    angles.  WAMF keeps four equal segment durations and modulates the
    Rabi rate as (1, 1/2, 1/2, 1), so its printed angle pattern
    (theta', theta'/2, theta'/2, theta') is normalized to sum to theta.
    """
    phi1 = math.acos(-theta / (4.0 * math.pi))
    if name == "Primitive":
        segs = [(theta, 0.0, 1.0)]
    elif name == "SK1":
        segs = [(theta, 0.0, 1.0)] + _sk1_tail(phi1)
    elif name == "BB1":
        segs = [(theta, 0.0, 1.0)] + _bb1_tail(phi1)
    elif name == "CORPSE":
        segs = _corpse_segments(theta)
    elif name == "WAMF":
        segs = [(theta / 3.0, 0.0, 1.0), (theta / 6.0, 0.0, 0.5),
                (theta / 6.0, 0.0, 0.5), (theta / 3.0, 0.0, 1.0)]
    elif name == "CinSK":
        segs = _corpse_segments(theta) + _sk1_tail(phi1)
    elif name == "CinBB":
        segs = _corpse_segments(theta) + _bb1_tail(phi1)
    else:
        raise ValueError(f"unknown pulse sequence {name!r}")
    return PulseSequence(name, theta, tuple(segs))


def apply_with_static_error(seq: PulseSequence, eps_amplitude: float,
                            eps_detuning: float) -> np.ndarray:
    """Unitary of the sequence under quasi-static control errors.

    Per segment the Rabi rate is scaled by (1 + eps_amplitude) and a
    detuning term eps_detuning * Z/2 (in units of the nominal Rabi rate)
    is added to the generator; segment durations stay nominal.
    """
    u = _I.copy()
    for theta_l, phi_l, omega_l in seq.segments:
        tau = theta_l / omega_l
        vx = theta_l * (1.0 + eps_amplitude) / 2.0 * math.cos(phi_l)
        vy = theta_l * (1.0 + eps_amplitude) / 2.0 * math.sin(phi_l)
        vz = eps_detuning * tau / 2.0
        a = math.sqrt(vx * vx + vy * vy + vz * vz)
        if a == 0.0:
            continue
        gen = (vx * _X + vy * _Y + vz * _Z) / a
        u = (math.cos(a) * _I - 1j * math.sin(a) * gen) @ u
    return u


def sequence_infidelity(seq: PulseSequence, eps_amplitude: float,
                        eps_detuning: float) -> float:
    """1 - |Tr(error propagator)|^2 / 4 against the ideal rotation."""
    ideal = rotation_unitary(seq.theta, 0.0)
    got = apply_with_static_error(seq, eps_amplitude, eps_detuning)
    return 1.0 - abs(np.trace(ideal.conj().T @ got)) ** 2 / 4.0


def magnus_order_estimate(seq: PulseSequence, error_axis: str,
                          eps=None, max_residual: float = 1.0) -> float:
    """Fitted power p of infidelity ~ eps^p under a quasi-static error.

    The default grid sits where even a sixth-order signal stays above
    double-precision rounding of the fidelity trace.
    """
    if error_axis not in ERROR_AXES:
        raise ValueError(f"unknown error axis {error_axis!r}")
    if eps is None:
        eps = np.logspace(-2.3, -1.3, 9)
    ea = error_axis in ("amplitude", "simultaneous")
    ed = error_axis in ("detuning", "simultaneous")
    ys = np.array([sequence_infidelity(seq, e if ea else 0.0,
                                       e if ed else 0.0) for e in eps])
    if (ys <= 0.0).any():
        raise ValueError("infidelity vanished below numerical precision")
    slope, intercept = np.polyfit(np.log(eps), np.log(ys), 1)
    resid = np.log(ys) - (slope * np.log(eps) + intercept)
    if float(np.max(np.abs(resid))) > max_residual:
        raise ValueError("power-law fit residual too large")
    return float(slope)


def fidelity_chi(chi: float) -> float:
    """Leading-order fidelity approximant (1 + exp(-chi)) / 2."""
    return (1.0 + math.exp(-chi)) / 2.0
