"""Scheduling overhead accounting and decoy-escape probabilities.

The pre-shared schedule costs bits: each decoy slot index takes
ceil(log2 K) bits, each message decoy one extra basis bit, each decoy one
qubit in flight and one reconciliation bit afterwards.  Summing the four
components makes the total overhead affine in log2 K with slope H2 + H3.

An interceptor who measures the propagation mode of m out of K slots trips
each path decoy she happens to hit with probability 1/2, so her escape
probability is a hypergeometric average of (1/2)^hits.  This module
computes that quantity exactly (in log space), via the closed-form upper
bound ((K - H3)/K + H3 / (2(1 - eta)K))^(eta K), via its large-K limits,
and by Monte Carlo; and it sizes the decoy counts needed to push the
escape probability below a target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_LOG_HALF = math.log(0.5)

_log_fact_table = np.zeros(1)


def _log_factorials(n: int) -> np.ndarray:
    """Cached table of log(k!) for k = 0..n."""
    global _log_fact_table
    if len(_log_fact_table) <= n:
        old = len(_log_fact_table)
        grown = np.empty(n + 1)
        grown[:old] = _log_fact_table
        grown[old:] = np.log(np.arange(old, n + 1))
        np.cumsum(grown[old:], out=grown[old:])
        grown[old:] += _log_fact_table[old - 1]
        _log_fact_table = grown
    return _log_fact_table


def h1_bits(H2: int, H3: int, K: int) -> int:
    """Pre-shared scheduling bits: H2 * (ceil(log2 K) + 1) + H3 * ceil(log2 K)."""
    if K < 2:
        raise ValueError(f"K must be at least 2, got {K}")
    _check_counts(H2, H3)
    width = (K - 1).bit_length()
    return H2 * (width + 1) + H3 * width


def h4_bits(H2: int, H3: int) -> int:
    """Post-run reconciliation bits: one measurement outcome per decoy slot."""
    _check_counts(H2, H3)
    return H2 + H3


def total_overhead(H2: int, H3: int, K: int) -> int:
    """All four overhead components: scheduling + decoy qubits + reconciliation."""
    return h1_bits(H2, H3, K) + H2 + H3 + h4_bits(H2, H3)


def exact_escape_prob(K: int, H3: int, m_intercepted: int) -> float:
    """Exact probability that m intercepted slots trip no path decoy.

    The overlap between the interceptor's m-subset and the H3 decoy slots
    is hypergeometric; each overlapping decoy independently escapes with
    probability 1/2.  Evaluated in log space so binomials of any size stay
    finite.
    """
    if not 0 <= m_intercepted <= K:
        raise ValueError(f"m_intercepted must be in [0, K], got {m_intercepted}")
    if not 0 <= H3 <= K:
        raise ValueError(f"H3 must be in [0, K], got {H3}")
    if H3 == 0 or m_intercepted == 0:
        return 1.0
    lf = _log_factorials(K)
    j_lo = max(0, m_intercepted - (K - H3))
    j_hi = min(H3, m_intercepted)
    j = np.arange(j_lo, j_hi + 1)
    log_terms = (
        lf[H3] - lf[j] - lf[H3 - j]
        + lf[K - H3] - lf[m_intercepted - j] - lf[K - H3 - m_intercepted + j]
        - (lf[K] - lf[m_intercepted] - lf[K - m_intercepted])
        + j * _LOG_HALF
    )
    shift = log_terms.max()
    return float(np.exp(shift) * np.exp(log_terms - shift).sum())


def bound_escape_prob(K: int, H3: int, eta: float) -> float:
    """Closed-form upper bound on the escape probability at interception rate eta.

    May exceed 1 for eta >= 1/2 (the bound goes vacuous there) and is
    reported as-is.
    """
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must be strictly inside (0, 1), got {eta}")
    if not 0 <= H3 <= K:
        raise ValueError(f"H3 must be in [0, K], got {H3}")
    base = (K - H3) / K + H3 / (2.0 * (1.0 - eta) * K)
    return base ** (eta * K)


@dataclass(frozen=True)
class EscapeLimit:
    """Large-K limits of the escape bound at a fixed interception rate."""

    limit: float  # exp(-eta*H3*(1 - 2 eta) / (2 (1 - eta)))
    relaxed: float  # exp(-eta*H3/2), the small-eta relaxation


def asymptotic_bound(H3: int, eta_max: float) -> EscapeLimit:
    """K -> infinity limit of the escape bound, plus its small-rate relaxation."""
    if not 0.0 < eta_max < 1.0:
        raise ValueError(f"eta_max must be strictly inside (0, 1), got {eta_max}")
    if H3 < 0:
        raise ValueError(f"H3 must be non-negative, got {H3}")
    exponent = eta_max * H3 * (1.0 - 2.0 * eta_max) / (2.0 * (1.0 - eta_max))
    return EscapeLimit(limit=math.exp(-exponent), relaxed=math.exp(-eta_max * H3 / 2.0))


def alpha_for(epsilon: float, eta_max: float) -> int:
    """Path-decoy count pushing the relaxed escape bound below epsilon."""
    _check_sizing(epsilon, eta_max)
    return math.ceil((2.0 / eta_max) * math.log(1.0 / epsilon))


def beta_for(epsilon: float, eta_max: float, *, bb84_detection: bool = False) -> int:
    """Message-decoy count, sized like the path decoys by default.

    With ``bb84_detection=True`` the per-hit detection probability 1/4 of
    an intercept-resend on a message decoy replaces the path decoys' 1/2,
    doubling the required count.
    """
    _check_sizing(epsilon, eta_max)
    factor = 4.0 if bb84_detection else 2.0
    return math.ceil((factor / eta_max) * math.log(1.0 / epsilon))


@dataclass(frozen=True)
class OverheadReport:
    """Decoy sizing for (epsilon, eta_max) and the resulting overhead at K.

    The affine form H = g1 * log2(K) + g0 admits two constant terms:
    ``g0_component_sum`` follows from summing the four accounted
    components with H2 = beta, H3 = alpha (giving 2*alpha + 3*beta), while
    ``g0_affine`` is the tighter constant alpha + 2*beta of the target
    affine form.  Both are reported; the slope g1 is the same either way.
    """

    K: int
    epsilon: float
    eta_max: float
    alpha: int
    beta: int
    beta_bb84: int
    g1: int
    g0_component_sum: int
    g0_affine: int
    h_total: int


def required_overhead(K: int, epsilon: float, eta_max: float) -> OverheadReport:
    """Size the decoy counts and report the total overhead and its decomposition."""
    alpha = alpha_for(epsilon, eta_max)
    beta = beta_for(epsilon, eta_max)
    return OverheadReport(
        K=K,
        epsilon=epsilon,
        eta_max=eta_max,
        alpha=alpha,
        beta=beta,
        beta_bb84=beta_for(epsilon, eta_max, bb84_detection=True),
        g1=alpha + beta,
        g0_component_sum=2 * alpha + 3 * beta,
        g0_affine=alpha + 2 * beta,
        h_total=total_overhead(H2=beta, H3=alpha, K=K),
    )


def montecarlo_escape(
    K: int, H3: int, m_intercepted: int, trials: int, seed: int
) -> tuple[float, float]:
    """Monte-Carlo estimate (mean, standard error) of the escape probability.

    One decoy subset is drawn per call, as a schedule would fix it; each
    trial then draws a fresh intercepted subset and scores (1/2)^overlap.
    """
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    if not 0 <= m_intercepted <= K:
        raise ValueError(f"m_intercepted must be in [0, K], got {m_intercepted}")
    if not 0 <= H3 <= K:
        raise ValueError(f"H3 must be in [0, K], got {H3}")
    if H3 == 0 or m_intercepted == 0:
        return 1.0, 0.0

    rng = np.random.default_rng(seed)
    is_decoy = np.zeros(K, dtype=bool)
    is_decoy[rng.choice(K, size=H3, replace=False)] = True

    values = np.empty(trials)
    chunk = max(1, min(trials, 1_000_000 // max(1, K)))
    done = 0
    while done < trials:
        n = min(chunk, trials - done)
        scores = rng.random((n, K))
        if m_intercepted < K:
            picks = np.argpartition(scores, m_intercepted, axis=1)[:, :m_intercepted]
            overlap = is_decoy[picks].sum(axis=1)
        else:
            overlap = np.full(n, H3)
        values[done : done + n] = 0.5 ** overlap
        done += n
    estimate = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return estimate, stderr


def _check_counts(H2: int, H3: int) -> None:
    if H2 < 0 or H3 < 0:
        raise ValueError("slot counts must be non-negative")


def _check_sizing(epsilon: float, eta_max: float) -> None:
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be strictly inside (0, 1), got {epsilon}")
    if not 0.0 < eta_max < 1.0:
        raise ValueError(f"eta_max must be strictly inside (0, 1), got {eta_max}")
