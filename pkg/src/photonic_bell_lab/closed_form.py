"""Closed-form detection probabilities for the single-photon (TWC) and the
squeezed-vacuum (GPY) weak-field homodyne setups, plus the on/off
probabilities entering the CH combination.

Outcomes are tuples ``(k, l, r, s)`` of photon counts at detectors
``(c1, d1, c2, d2)``. ``alpha`` is always the local-oscillator *amplitude*.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from scipy.stats import poisson


class Outcome(NamedTuple):
    k: int
    l: int
    r: int
    s: int

    @property
    def total(self) -> int:
        return self.k + self.l + self.r + self.s


def _check_outcome(n) -> Outcome:
    n = Outcome(*(int(v) for v in n))
    if min(n) < 0:
        raise ValueError(f"photon counts must be non-negative, got {tuple(n)}")
    return n


# -- single photon ---------------------------------------------------------


def a_prefactor(n, alpha: float) -> float:
    """e^{-2a^2} (a^2/2)^{k+l+r+s} / (2 a^2 k! l! r! s!)."""
    if alpha <= 0:
        raise ValueError("alpha must be > 0; the closed form is singular at alpha = 0")
    k, l, r, s = _check_outcome(n)
    x = alpha * alpha
    log_a = (
        -2 * x
        + (k + l + r + s) * math.log(x / 2)
        - math.log(2 * x)
        - math.lgamma(k + 1)
        - math.lgamma(l + 1)
        - math.lgamma(r + 1)
        - math.lgamma(s + 1)
    )
    return math.exp(log_a)


def p_twc(n, alpha: float, theta12: float) -> float:
    """Probability of outcome ``n`` for the split single photon."""
    k, l, r, s = _check_outcome(n)
    a, b = k - l, r - s
    return a_prefactor(n, alpha) * (a * a + b * b + 2 * a * b * math.sin(theta12))


def b_prefactor(n, alpha: float) -> float:
    k, l, r, s = _check_outcome(n)
    return a_prefactor(n, alpha) * ((k - l) ** 2 + (r - s) ** 2)


def visibility(n) -> float:
    """Fringe visibility 2(k-l)(r-s) / ((k-l)^2 + (r-s)^2)."""
    k, l, r, s = _check_outcome(n)
    if k == l or r == s:
        raise ValueError(f"visibility undefined for {tuple(n)}: needs k != l and r != s")
    a, b = k - l, r - s
    return 2 * a * b / (a * a + b * b)


def twc_tail(alpha: float, cutoff: int) -> float:
    """Probability that more than ``cutoff`` photons are detected in total.

    The total count is one signal photon plus two Poisson(alpha^2) streams.
    """
    if cutoff < 1:
        return 1.0
    return float(poisson.sf(cutoff - 1, 2 * alpha * alpha))


# -- squeezed vacuum -------------------------------------------------------


def gpy_vacuum_probability(alpha: float, gamma: float) -> float:
    """P(0,0,0,0) = e^{-2 a^2} (1 - gamma^2)."""
    if not 0 <= gamma < 1:
        raise ValueError(f"gamma must lie in [0, 1), got {gamma}")
    return math.exp(-2 * alpha * alpha) * (1 - gamma * gamma)


def gpy_tail(alpha: float, gamma: float, cutoff: int) -> float:
    """Mass on outcomes with more than ``cutoff`` photons in total."""
    g2 = gamma * gamma
    mu = 2 * alpha * alpha
    inside = 0.0
    for k in range(cutoff // 2 + 1):
        inside += (1 - g2) * g2**k * float(poisson.cdf(cutoff - 2 * k, mu))
    return max(0.0, 1.0 - inside)


@dataclass(frozen=True)
class Class1Row:
    """One row of the class-1 table.

    Probability is ``P0 * prefactor(alpha) * (alpha^4 + c_gamma gamma^2
    + c_cos alpha^2 gamma cos(theta1 + theta2))`` where ``prefactor`` is
    ``coef * alpha**alpha_power``.
    """

    representative: Outcome
    coef: float
    alpha_power: int
    c_gamma: float
    c_cos: float

    def prefactor(self, alpha: float) -> float:
        return self.coef * alpha**self.alpha_power

    @property
    def orbit(self) -> tuple[Outcome, ...]:
        return orbit(self.representative)


def swap_both(n) -> Outcome:
    k, l, r, s = n
    return Outcome(l, k, s, r)


def swap_parties(n) -> Outcome:
    k, l, r, s = n
    return Outcome(r, s, k, l)


def orbit(n) -> tuple[Outcome, ...]:
    """Orbit under simultaneous k<->l, r<->s swaps and party exchange."""
    n = Outcome(*n)
    seen = {n, swap_both(n), swap_parties(n), swap_parties(swap_both(n))}
    return tuple(sorted(seen))


CLASS1_ROWS: tuple[Class1Row, ...] = (
    Class1Row(Outcome(0, 1, 0, 1), 1 / 4, 0, 1, 2),
    Class1Row(Outcome(0, 1, 0, 2), 1 / 16, 2, 4, 4),
    Class1Row(Outcome(0, 1, 0, 3), 1 / 96, 4, 9, 6),
    Class1Row(Outcome(0, 1, 1, 0), 1 / 4, 0, 1, -2),
    Class1Row(Outcome(0, 1, 1, 2), 1 / 32, 4, 1, 2),
    Class1Row(Outcome(0, 1, 2, 0), 1 / 16, 2, 4, -4),
    Class1Row(Outcome(0, 1, 2, 1), 1 / 32, 4, 1, -2),
    Class1Row(Outcome(0, 1, 3, 0), 1 / 96, 4, 9, -6),
)

_CLASS1_INDEX = {m: row for row in CLASS1_ROWS for m in row.orbit}


def class1_row(n) -> Class1Row:
    """Row of the class-1 table containing outcome ``n``."""
    n = _check_outcome(n)
    try:
        return _CLASS1_INDEX[n]
    except KeyError:
        raise ValueError(f"{tuple(n)} is not a class-1 event") from None


def is_class1(n) -> bool:
    return Outcome(*n) in _CLASS1_INDEX


def p_gpy_class1(n, alpha: float, gamma: float, theta1: float, theta2: float) -> float:
    row = class1_row(n)
    x = alpha * alpha
    bracket = x * x + row.c_gamma * gamma**2 + row.c_cos * x * gamma * math.cos(theta1 + theta2)
    return gpy_vacuum_probability(alpha, gamma) * row.prefactor(alpha) * bracket


@dataclass(frozen=True)
class TwoTwoRow:
    """Row of the (2&2) table, divided by P0.

    value = (a8 alpha^8 + a4g2 alpha^4 gamma^2 + g4 gamma^4
             + c2 alpha^4 gamma^2 cos 2phi
             + c1 alpha^2 gamma (alpha^4 + 2 gamma^2) cos phi) / denom
    with phi = theta1 + theta2.
    """

    representative: Outcome
    denom: float
    a4g2: float
    c2: float
    c1: float

    @property
    def orbit(self) -> tuple[Outcome, ...]:
        return orbit(self.representative)

    def value(self, alpha: float, gamma: float, phi: float) -> float:
        x = alpha * alpha
        v = (
            x**4
            + self.a4g2 * x * x * gamma**2
            + 4 * gamma**4
            + self.c2 * x * x * gamma**2 * math.cos(2 * phi)
            + self.c1 * x * gamma * (x * x + 2 * gamma**2) * math.cos(phi)
        )
        return v / self.denom


TWO_TWO_ROWS: tuple[TwoTwoRow, ...] = (
    TwoTwoRow(Outcome(0, 2, 1, 1), 32, 0, -4, 0),
    TwoTwoRow(Outcome(0, 2, 0, 2), 64, 16, 4, 8),
    TwoTwoRow(Outcome(0, 2, 2, 0), 64, 16, 4, -8),
    TwoTwoRow(Outcome(1, 1, 1, 1), 16, 0, 4, 0),
)

_TWO_TWO_INDEX = {m: row for row in TWO_TWO_ROWS for m in row.orbit}


def is_2and2(n) -> bool:
    return Outcome(*n) in _TWO_TWO_INDEX


def p_gpy_2and2(n, alpha: float, gamma: float, theta1: float, theta2: float) -> float:
    n = _check_outcome(n)
    try:
        row = _TWO_TWO_INDEX[n]
    except KeyError:
        raise ValueError(f"{tuple(n)} is not a tabulated (2&2) event") from None
    return gpy_vacuum_probability(alpha, gamma) * row.value(alpha, gamma, theta1 + theta2)


# -- on/off settings --------------------------------------------------------


@dataclass(frozen=True)
class OnOffProbs:
    """Event probabilities for one 'off' (A, B) and one 'on' (A', B') setting per side."""

    p_ab: float
    p_ab_on: float  # P(A, B')
    p_a_on_b: float  # P(A', B)
    p_a_on_b_on: float  # P(A', B')
    p_a: float
    p_b: float

    def __post_init__(self):
        for name, v in self.as_dict().items():
            if not -1e-15 <= v <= 1 + 1e-15:
                raise ValueError(f"{name}={v} is not a probability")

    def as_dict(self) -> dict[str, float]:
        return {
            "P(A,B)": self.p_ab,
            "P(A,B')": self.p_ab_on,
            "P(A',B)": self.p_a_on_b,
            "P(A',B')": self.p_a_on_b_on,
            "P(A)": self.p_a,
            "P(B)": self.p_b,
        }


def onoff_probs_twc(alpha: float, T: float) -> OnOffProbs:
    """Single-photon source, oscillators with alpha1 = i alpha2."""
    if not 0 <= T <= 1:
        raise ValueError(f"T must lie in [0, 1], got {T}")
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    x = alpha * alpha
    cross = 0.5 * x * math.exp(-x) * (1 - T)
    return OnOffProbs(
        p_ab=0.0,
        p_ab_on=cross,
        p_a_on_b=cross,
        p_a_on_b_on=2 * x * math.exp(-2 * x) * T * (1 - T),
        p_a=0.5,
        p_b=0.5,
    )


def onoff_probs_gpy(alpha: float, gamma: float, T: float) -> OnOffProbs:
    """Squeezed vacuum source, real oscillator amplitudes."""
    if not 0 <= T <= 1:
        raise ValueError(f"T must lie in [0, 1], got {T}")
    if not 0 <= gamma < 1:
        raise ValueError(f"gamma must lie in [0, 1), got {gamma}")
    x = alpha * alpha
    g2 = gamma * gamma
    single = g2 * (1 - g2)
    cross = math.exp(-x) * g2 * (1 - g2) * T
    return OnOffProbs(
        p_ab=single,
        p_ab_on=cross,
        p_a_on_b=cross,
        p_a_on_b_on=math.exp(-2 * x) * (1 - g2) * (T * gamma - x * (1 - T)) ** 2,
        p_a=single,
        p_b=single,
    )
