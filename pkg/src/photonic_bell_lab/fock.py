"""Truncated Fock-space simulator for passive linear optics.

States are sparse maps from occupation tuples to complex amplitudes. The
truncation is on the *total* photon number, which every passive beamsplitter
conserves, so an outcome whose total is within the cutoff is computed exactly
from the retained terms.

This module is the brute-force reference: it knows nothing about the
closed-form probabilities and only performs operator algebra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

PRUNE_TOL = 1e-30  # |amplitude|^2 below this is dropped after each transformation

DETECTOR_MODES = ("c1", "d1", "c2", "d2")


def factorial(n: int) -> float:
    """n! as a float; exact integer arithmetic up to 20, log-gamma beyond."""
    if n <= 20:
        return float(math.factorial(n))
    return math.exp(math.lgamma(n + 1))


def sqrt_factorial(n: int) -> float:
    if n <= 20:
        return math.sqrt(math.factorial(n))
    return math.exp(0.5 * math.lgamma(n + 1))


def binomial(n: int, k: int) -> float:
    if n <= 60:
        return float(math.comb(n, k))
    return math.exp(math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1))


@dataclass(frozen=True)
class FockVector:
    """Sparse multi-mode Fock state.

    ``terms`` maps an occupation tuple (one entry per label in ``modes``) to
    its complex amplitude. ``cutoff`` is the largest total photon number kept.
    """

    modes: tuple[str, ...]
    terms: Mapping[tuple[int, ...], complex]
    cutoff: int

    def __post_init__(self):
        if len(set(self.modes)) != len(self.modes):
            raise ValueError(f"duplicate mode labels: {self.modes}")
        clean = {}
        for occ, amp in self.terms.items():
            occ = tuple(int(v) for v in occ)
            if len(occ) != len(self.modes):
                raise ValueError(f"occupation {occ} does not match modes {self.modes}")
            if min(occ, default=0) < 0:
                raise ValueError(f"negative occupation {occ}")
            if sum(occ) > self.cutoff:
                continue
            if abs(amp) ** 2 >= PRUNE_TOL:
                clean[occ] = complex(amp)
        object.__setattr__(self, "terms", MappingProxyType(clean))

    def amplitude(self, occupation: Iterable[int]) -> complex:
        return self.terms.get(tuple(occupation), 0j)

    def norm2(self) -> float:
        return float(sum(abs(a) ** 2 for a in self.terms.values()))

    def index(self, mode: str) -> int:
        try:
            return self.modes.index(mode)
        except ValueError:
            raise ValueError(f"unknown mode {mode!r}; state has {self.modes}") from None

    def __add__(self, other: FockVector) -> FockVector:
        if other.modes != self.modes:
            raise ValueError("cannot add states on different modes")
        out = dict(self.terms)
        for occ, amp in other.terms.items():
            out[occ] = out.get(occ, 0j) + amp
        return FockVector(self.modes, out, max(self.cutoff, other.cutoff))

    def scaled(self, c: complex) -> FockVector:
        return FockVector(self.modes, {k: c * v for k, v in self.terms.items()}, self.cutoff)

    def relabel(self, mapping: Mapping[str, str]) -> FockVector:
        modes = tuple(mapping.get(m, m) for m in self.modes)
        return FockVector(modes, self.terms, self.cutoff)

    def reorder(self, modes: Iterable[str]) -> FockVector:
        modes = tuple(modes)
        if sorted(modes) != sorted(self.modes):
            raise ValueError(f"{modes} is not a permutation of {self.modes}")
        perm = [self.index(m) for m in modes]
        terms = {tuple(occ[i] for i in perm): amp for occ, amp in self.terms.items()}
        return FockVector(modes, terms, self.cutoff)


def vacuum(modes: Iterable[str], cutoff: int = 0) -> FockVector:
    modes = tuple(modes)
    return FockVector(modes, {(0,) * len(modes): 1.0 + 0j}, cutoff)


def tensor(*states: FockVector, cutoff: int | None = None) -> FockVector:
    """Tensor product, keeping only terms with total photon number <= cutoff."""
    if cutoff is None:
        cutoff = min(s.cutoff for s in states)
    modes: tuple[str, ...] = ()
    terms: dict[tuple[int, ...], complex] = {(): 1.0 + 0j}
    for s in states:
        modes = modes + s.modes
        nxt = {}
        for (occ_a, amp_a), (occ_b, amp_b) in product(terms.items(), s.terms.items()):
            if sum(occ_a) + sum(occ_b) <= cutoff:
                nxt[occ_a + occ_b] = amp_a * amp_b
        terms = nxt
    return FockVector(modes, terms, cutoff)


def coherent_expansion(alpha: float, theta: float, cutoff: int, mode: str = "a") -> FockVector:
    """Single-mode coherent state |alpha e^{i theta}> truncated at ``cutoff``."""
    if cutoff < 0:
        raise ValueError("cutoff must be >= 0")
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    if alpha == 0:
        return vacuum((mode,), cutoff)
    z = alpha * np.exp(1j * theta)
    pref = math.exp(-alpha**2 / 2)
    terms = {(n,): pref * z**n / sqrt_factorial(n) for n in range(cutoff + 1)}
    return FockVector((mode,), terms, cutoff)


def single_photon_split(modes: tuple[str, str] = ("b1", "b2")) -> FockVector:
    """(|01> + i|10>)/sqrt(2): one photon shared by two spatial modes."""
    s = 1 / math.sqrt(2)
    return FockVector(tuple(modes), {(0, 1): s + 0j, (1, 0): 1j * s}, 1)


def two_mode_squeezed(
    gamma: float, cutoff: int, modes: tuple[str, str] = ("b1", "b2"), phase: float = 0.0
) -> FockVector:
    """sqrt(1-gamma^2) sum_k (gamma e^{i phase})^k |k,k> with 2k <= cutoff."""
    if not 0 <= gamma < 1:
        raise ValueError(f"gamma must lie in [0, 1), got {gamma}")
    if cutoff < 0:
        raise ValueError("cutoff must be >= 0")
    norm = math.sqrt(1 - gamma**2)
    z = gamma * np.exp(1j * phase)
    terms = {(k, k): norm * z**k for k in range(cutoff // 2 + 1)}
    return FockVector(tuple(modes), terms, cutoff)


@dataclass(frozen=True)
class BeamsplitterSpec:
    """Lossless beamsplitter acting on input modes ``a`` and ``b``.

    Creation operators map as a^+ -> sqrt(T) c^+ + i sqrt(R) d^+ and
    b^+ -> i sqrt(R) c^+ + sqrt(T) d^+. The output mode ``c`` replaces ``a``
    in the mode list and ``d`` replaces ``b``.
    """

    a: str
    b: str
    transmittivity: float = 0.5
    c: str | None = None
    d: str | None = None

    def __post_init__(self):
        if not 0 <= self.transmittivity <= 1:
            raise ValueError(f"transmittivity must lie in [0, 1], got {self.transmittivity}")
        if self.a == self.b:
            raise ValueError("beamsplitter needs two distinct modes")

    @property
    def reflectivity(self) -> float:
        return 1.0 - self.transmittivity


@lru_cache(maxsize=4096)
def _bs_block(na: int, nb: int, T: float) -> tuple[tuple[int, int, complex], ...]:
    """Output amplitudes (p, q, amp) of |na, nb> through the beamsplitter."""
    t = math.sqrt(T)
    r = math.sqrt(1 - T)
    out: dict[tuple[int, int], complex] = {}
    # a^+^na = sum_j C(na,j) (t c^+)^j (i r d^+)^(na-j)
    # b^+^nb = sum_m C(nb,m) (i r c^+)^m (t d^+)^(nb-m)
    norm = 1.0 / (sqrt_factorial(na) * sqrt_factorial(nb))
    for j in range(na + 1):
        cj = binomial(na, j) * t**j * r ** (na - j)
        for m in range(nb + 1):
            cm = binomial(nb, m) * r**m * t ** (nb - m)
            coeff = cj * cm
            if coeff == 0.0:
                continue
            p = j + m
            q = na + nb - p
            phase = 1j ** ((na - j + m) % 4)
            amp = coeff * phase * sqrt_factorial(p) * sqrt_factorial(q) * norm
            out[(p, q)] = out.get((p, q), 0j) + amp
    return tuple((p, q, a) for (p, q), a in out.items() if abs(a) ** 2 >= PRUNE_TOL)


def apply_beamsplitter(state: FockVector, bs: BeamsplitterSpec) -> FockVector:
    ia = state.index(bs.a)
    ib = state.index(bs.b)
    out: dict[tuple[int, ...], complex] = {}
    for occ, amp in state.terms.items():
        for p, q, c in _bs_block(occ[ia], occ[ib], bs.transmittivity):
            new = list(occ)
            new[ia] = p
            new[ib] = q
            key = tuple(new)
            out[key] = out.get(key, 0j) + amp * c
    modes = list(state.modes)
    modes[ia] = bs.c or bs.a
    modes[ib] = bs.d or bs.b
    return FockVector(tuple(modes), out, state.cutoff)


def outcome_probability(state: FockVector, n: Iterable[int]) -> float:
    return abs(state.amplitude(n)) ** 2


# -- the two experiments ---------------------------------------------------


@dataclass(frozen=True)
class SourceSpec:
    """Signal source plus the two local oscillators.

    ``variant`` is ``"single_photon"`` (split single photon) or ``"squeezed"``
    (two-mode squeezed vacuum with parameter ``gamma``). ``alpha`` is the
    local-oscillator amplitude shared by both parties; ``lo_on`` switches each
    party's oscillator.
    """

    variant: str
    alpha: float
    theta1: float = 0.0
    theta2: float = 0.0
    gamma: float = 0.0
    squeeze_phase: float = 0.0
    lo_on: tuple[bool, bool] = field(default=(True, True))

    def __post_init__(self):
        if self.variant not in ("single_photon", "squeezed"):
            raise ValueError(f"unknown source variant {self.variant!r}")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if not 0 <= self.gamma < 1:
            raise ValueError(f"gamma must lie in [0, 1), got {self.gamma}")


def detected_state(source: SourceSpec, T: float, cutoff: int) -> FockVector:
    """Full state on detector modes (c1, d1, c2, d2) after both beamsplitters."""
    a1 = source.alpha if source.lo_on[0] else 0.0
    a2 = source.alpha if source.lo_on[1] else 0.0
    if source.variant == "single_photon":
        signal = single_photon_split(("b1", "b2"))
    else:
        signal = two_mode_squeezed(source.gamma, cutoff, ("b1", "b2"), source.squeeze_phase)
    state = tensor(
        coherent_expansion(a1, source.theta1, cutoff, "a1"),
        signal,
        coherent_expansion(a2, source.theta2, cutoff, "a2"),
        cutoff=cutoff,
    )
    state = apply_beamsplitter(state, BeamsplitterSpec("a1", "b1", T, "c1", "d1"))
    state = apply_beamsplitter(state, BeamsplitterSpec("a2", "b2", T, "c2", "d2"))
    return state.reorder(DETECTOR_MODES)


def outcomes_upto(cutoff: int, n_modes: int = 4):
    """All occupation tuples with total <= cutoff, lexicographic order."""
    for occ in product(range(cutoff + 1), repeat=n_modes):
        if sum(occ) <= cutoff:
            yield occ


def probability_table(source: SourceSpec, T: float, cutoff: int) -> dict[tuple[int, int, int, int], float]:
    """Probability of every (k, l, r, s) with k+l+r+s <= cutoff."""
    if cutoff < 0:
        raise ValueError("cutoff must be >= 0")
    state = detected_state(source, T, cutoff)
    return {n: outcome_probability(state, n) for n in outcomes_upto(cutoff)}


def coherent_tail(alpha: float, cutoff: int) -> float:
    """Probability mass of a coherent state above ``cutoff`` photons."""
    from scipy.stats import poisson

    return float(poisson.sf(cutoff, alpha**2))


def squeezed_tail(gamma: float, cutoff: int) -> float:
    """Mass of the two-mode squeezed vacuum on pairs with 2k > cutoff."""
    return gamma ** (2 * (cutoff // 2 + 1))
