"""Closed-form security analysis: disturbance baselines, entropy, leak curve.

The worst case attributes every observed path disturbance to interception,
so a measured disturbance D implies an intercepted fraction of up to 2D.
Each learned payload additionally exposes the error-correction expansion of
the message, a factor 1 + h(e) at the Shannon limit, giving the leaked
traffic fraction g = 2D(1 + h(e)), capped at one.  Loss feeds both D and e,
which is why the leak grows with channel loss even without an attacker.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class AlreadySaturatedError(ValueError):
    """The leak curve is already at one for a lossless channel."""


@dataclass(frozen=True)
class SecurityPoint:
    """One point of the leak-vs-loss curve."""

    loss_db: float
    T: float
    D: float
    e: float
    h_e: float
    g: float


def binary_entropy(e: float) -> float:
    """Binary entropy in bits, with h(0) = h(1) = 0 by continuity."""
    if not 0.0 <= e <= 1.0:
        raise ValueError(f"probability must be in [0, 1], got {e}")
    if e == 0.0 or e == 1.0:
        return 0.0
    return -e * math.log2(e) - (1.0 - e) * math.log2(1.0 - e)


def baseline_disturbance(gamma: float, T: float) -> float:
    """Expected path-decoy disturbance with no attacker: gamma*T^2 + (1 - T^2)/2."""
    _check_unit("gamma", gamma)
    _check_unit("T", T)
    t2 = T * T
    return gamma * t2 + (1.0 - t2) / 2.0


def message_error(mu: float, T: float) -> float:
    """Expected message error with no attacker: mu*T + (1 - T)/2."""
    _check_unit("mu", mu)
    _check_unit("T", T)
    return mu * T + (1.0 - T) / 2.0


def leaked_fraction(D: float, e: float) -> float:
    """Worst-case leaked traffic fraction min{1, 2D(1 + h(e))}."""
    return min(1.0, leaked_fraction_uncapped(D, e))


def leaked_fraction_uncapped(D: float, e: float) -> float:
    """The leak expression 2D(1 + h(e)) without the cap at one."""
    _check_half("D", D)
    _check_half("e", e)
    return 2.0 * D * (1.0 + binary_entropy(e))


def inferred_eta(D3_hat: float) -> float:
    """Intercepted fraction implied by a path disturbance: min{1, 2*D3_hat}."""
    _check_half("D3_hat", D3_hat)
    return min(1.0, 2.0 * D3_hat)


def security_curve(
    gamma: float,
    mu: float,
    loss_min_db: float,
    loss_max_db: float,
    steps: int,
) -> list[SecurityPoint]:
    """Leak curve over an evenly spaced loss grid (capped g per point)."""
    if loss_min_db > loss_max_db:
        raise ValueError(f"loss_min_db {loss_min_db} exceeds loss_max_db {loss_max_db}")
    if steps < 2:
        raise ValueError(f"steps must be at least 2, got {steps}")
    points = []
    for loss_db in np.linspace(loss_min_db, loss_max_db, steps):
        loss_db = float(loss_db)
        T = 10.0 ** (-loss_db / 10.0)
        D = baseline_disturbance(gamma, T)
        e = message_error(mu, T)
        h_e = binary_entropy(e)
        g = min(1.0, 2.0 * D * (1.0 + h_e))
        points.append(SecurityPoint(loss_db, T, D, e, h_e, g))
    return points


# Interface kept close to the curve-drawing subcommand it backs.
figure2_curve = security_curve


def loss_threshold(gamma: float, mu: float, tol: float = 0.01) -> float:
    """Channel loss (dB) at which the uncapped leak expression reaches one.

    Found by bisection on the uncapped expression, so the root is
    well-defined even though the reported curve is capped.  Raises
    :class:`AlreadySaturatedError` when the leak is already >= 1 with no
    loss at all (that needs gamma >= ~0.5).
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")

    def uncapped(loss_db: float) -> float:
        T = 10.0 ** (-loss_db / 10.0)
        D = baseline_disturbance(gamma, T)
        e = message_error(mu, T)
        return 2.0 * D * (1.0 + binary_entropy(e))

    if uncapped(0.0) >= 1.0:
        raise AlreadySaturatedError(
            "already saturated: leak is >= 1 at zero loss for these parameters"
        )
    lo, hi = 0.0, 1.0
    while uncapped(hi) < 1.0:
        lo, hi = hi, hi * 2.0
        if hi > 1e6:  # un-saturable only if gamma=mu=0 exactly at T->0 limit, guard anyway
            raise ValueError("leak never reaches 1 within 1e6 dB")
    while hi - lo > tol:
        mid = (lo + hi) / 2.0
        if uncapped(mid) < 1.0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0


def _check_unit(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {value}")


def _check_half(name: str, value: float) -> None:
    if not 0.0 <= value <= 0.5:
        raise ValueError(f"{name} must be in [0, 0.5], got {value}")
