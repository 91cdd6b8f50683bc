"""Local hidden-variable models for the two weak-field homodyne setups.

The single-photon model is a convex mixture of

* trivial submodels that output a fixed outcome,
* Larsson-like submodels, indexed by outcomes with k > l and r > s, driven by
  a uniform angle ``lam`` in [0, 2 pi) and a fair coin ``x``,
* compensating trivial submodels for outcomes where one party sees nothing.

The squeezed-vacuum model is partial: it covers the class-1 events with
Larsson-like submodels, every setting-independent event with trivial ones,
and leaves the remaining events (notably two photons per side) uncovered.

Heaviside convention: H(0) = 1. Where both events of a deterministic response
would fire (a measure-zero set of ``lam``) the event with more photons at the
``c`` detector wins.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import closed_form as cf
from .fock import SourceSpec, outcomes_upto, probability_table
from .special import bessel_i0, lambert_w

TWO_PI = 2 * math.pi
GPY_PROVEN_ALPHA2 = 0.58
# class-1 rows are stated for the opposite sign of the pair amplitude
GPY_SQUEEZE_PHASE = math.pi


class ModelValidityError(ValueError):
    """Raised when a submodel weight would be negative."""

    def __init__(self, message, event=None, value=None, threshold=None):
        super().__init__(message)
        self.event = event
        self.value = value
        self.threshold = threshold


@dataclass(frozen=True)
class HiddenState:
    lam: float
    x: int = 0

    def __post_init__(self):
        if self.x not in (0, 1):
            raise ValueError("x must be 0 or 1")
        if not 0 <= self.lam < TWO_PI:
            raise ValueError(f"lam must lie in [0, 2 pi), got {self.lam}")


@dataclass(frozen=True)
class Submodel:
    """One component of the mixture.

    kind is ``"trivial"``, ``"larsson"`` (single photon) or ``"larsson_gpy"``.
    For ``larsson`` the index has k > l and r > s. For ``larsson_gpy``,
    ``r_side`` names the party with the (k, l) response and ``plus`` is the
    local event paired with the ``+`` Heaviside branch.
    """

    kind: str
    index: cf.Outcome
    weight: float
    visibility: float = 0.0
    r_side: str = "A"
    plus: tuple[int, int] = (0, 0)

    @property
    def minus(self) -> tuple[int, int]:
        return (self.plus[1], self.plus[0])


@dataclass
class SubmodelTable:
    setup: str
    alpha: float
    cutoff: int
    submodels: list[Submodel]
    gamma: float | None = None
    tail: float = 0.0
    quantum: dict = field(default_factory=dict, repr=False)
    uncovered: list[cf.Outcome] = field(default_factory=list)

    @property
    def total_weight(self) -> float:
        return math.fsum(s.weight for s in self.submodels)

    def weight_of(self, kind: str, index) -> float:
        index = cf.Outcome(*index)
        return math.fsum(s.weight for s in self.submodels if s.kind == kind and s.index == index)


# -- special values ---------------------------------------------------------


def alpha_threshold_twc() -> float:
    """Largest alpha^2 for which the Delta condition is proven via I0 >= 1."""
    z = (2 * math.e + math.e * math.pi) / (math.pi - 2)
    return lambert_w(z) - 1


def delta_twc(k: int, l: int, alpha: float) -> float:
    """Closed form of Delta_(k,l,0,0) with the infinite sum over Bob's events.

    By symmetry this is also Delta_(0,0,k,l).
    """
    if k == l:
        raise ValueError("Delta is defined for k != l only")
    x = alpha * alpha
    d2 = (k - l) ** 2
    bracket = -(math.pi - 2) * math.exp(x) * (x + d2) + (math.pi - 2) * bessel_i0(x) * d2 + 4 * d2
    pref = math.exp(-2 * x) * 2.0 ** (-k - l - 3) * x ** (k + l - 1) / (math.factorial(k) * math.factorial(l))
    return pref * bracket


def delta_twc_bound(alpha: float) -> float:
    """Worst-case bracket of Delta with I0 replaced by 1; >= 0 iff alpha^2 <= threshold."""
    x = alpha * alpha
    return (math.pi + 2) - (math.pi - 2) * math.exp(x) - (math.pi - 2) * x * math.exp(x)


def delta_gpy_0001(alpha: float, gamma: float) -> float:
    """Delta_(0,0,0,1) in units of P(0,0,0,0)."""
    x = alpha * alpha
    g2 = gamma * gamma
    poly = 2 * x**4 + 3 * x**3 + 6 * x * x * (g2 + 2) + 12 * x * g2 + 12 * g2
    return x / 2 - (math.pi - 2) / 48 * poly


# -- local responses --------------------------------------------------------


def _heaviside(v):
    return np.where(v >= 0, 1.0, 0.0)


def _r_branch(V, theta, lam, orient):
    """(P+, P-, P0) of the flat-plus-|sin| response."""
    s = orient * np.sin(theta - lam)
    flat = (1 - V) / math.pi
    p_plus = flat + V * np.abs(s) * _heaviside(s)
    p_minus = flat + V * np.abs(s) * _heaviside(-s)
    return p_plus, p_minus, 1 - p_plus - p_minus


def _q_branch(theta, lam):
    c = np.cos(theta - lam)
    p_plus = _heaviside(c)
    return p_plus, 1 - p_plus, np.zeros_like(p_plus)


def _twc_party(party: str, V, theta, lam, x):
    """Response triple of one party of a single-photon Larsson submodel.

    For x = 0 Alice answers with the |sin| branch and Bob deterministically;
    for x = 1 the roles swap and the |sin| branch is mirrored, which keeps
    the fringe sign of the x = 0 half.
    """
    uses_r = (party == "A") == (x == 0)
    if uses_r:
        return _r_branch(V, theta, lam, 1 if x == 0 else -1)
    return _q_branch(theta, lam)


def _local_dict(plus, triple):
    pp, pm, p0 = (float(v) for v in triple)
    minus = (plus[1], plus[0])
    return {plus: pp, minus: pm, (0, 0): p0}


def alice_response_twc(sub: Submodel, theta: float, h: HiddenState) -> dict:
    k, l, _, _ = sub.index
    return _local_dict((k, l), _twc_party("A", sub.visibility, theta, h.lam, h.x))


def bob_response_twc(sub: Submodel, theta: float, h: HiddenState) -> dict:
    _, _, r, s = sub.index
    return _local_dict((r, s), _twc_party("B", sub.visibility, theta, h.lam, h.x))


def gpy_response(sub: Submodel, party: str, theta: float, lam: float) -> dict:
    """Local response of a squeezed-vacuum class-1 submodel.

    The ``r_side`` party emits ``plus``/``minus``/(0,0) with the |cos| branch;
    the other party emits (1,0) or (0,1) by H(+-cos(theta + lam)).
    """
    triple = _gpy_party(sub, party, theta, lam)
    if party == sub.r_side:
        return _local_dict(sub.plus, triple)
    return _local_dict((1, 0), triple)


def _gpy_party(sub: Submodel, party: str, theta, lam):
    if party == sub.r_side:
        return _r_branch(sub.visibility, theta + math.pi / 2, lam, 1)
    c = np.cos(theta + lam)
    p = _heaviside(c)
    return p, 1 - p, np.zeros_like(p)


# -- quadrature -------------------------------------------------------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(32)


def _integrate_circle(f, base_angles) -> float:
    """Integral of f over [0, 2 pi); f is smooth between multiples of pi/2 from each base angle."""
    cuts = {0.0, TWO_PI}
    for a in base_angles:
        for m in range(4):
            cuts.add((a + m * math.pi / 2) % TWO_PI)
    cuts = sorted(cuts)
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if hi - lo < 1e-14:
            continue
        half = 0.5 * (hi - lo)
        lam = half * _GL_X + 0.5 * (hi + lo)
        total += half * float(np.dot(_GL_W, f(lam)))
    return total


def _pick(triple, local, plus):
    """Select the probability of ``local`` from a (P+, P-, P0) triple."""
    local = tuple(local)
    if local == tuple(plus):
        return triple[0]
    if local == (plus[1], plus[0]):
        return triple[1]
    if local == (0, 0):
        return triple[2]
    return None


def joint_probability_analytic(sub: Submodel, event, theta1: float, theta2: float) -> float:
    """Probability the submodel assigns to ``event``, by quadrature over lam."""
    event = cf.Outcome(*event)
    ea, eb = (event.k, event.l), (event.r, event.s)
    if sub.kind == "trivial":
        return 1.0 if event == sub.index else 0.0
    if sub.kind == "larsson":
        k, l, r, s = sub.index
        if _pick((1, 1, 1), ea, (k, l)) is None or _pick((1, 1, 1), eb, (r, s)) is None:
            raise ValueError(f"{tuple(event)} is outside the support of submodel {tuple(sub.index)}")
        V = sub.visibility

        def integrand(lam):
            out = 0.0
            for x in (0, 1):
                pa = _pick(_twc_party("A", V, theta1, lam, x), ea, (k, l))
                pb = _pick(_twc_party("B", V, theta2, lam, x), eb, (r, s))
                out = out + pa * pb
            return out

        return _integrate_circle(integrand, (theta1, theta2)) / (4 * math.pi)
    if sub.kind == "larsson_gpy":
        theta_r, theta_q = (theta1, theta2) if sub.r_side == "A" else (theta2, theta1)
        e_r, e_q = (ea, eb) if sub.r_side == "A" else (eb, ea)
        if _pick((1, 1, 1), e_r, sub.plus) is None or e_q not in ((1, 0), (0, 1)):
            raise ValueError(f"{tuple(event)} is outside the support of this submodel")
        other = "B" if sub.r_side == "A" else "A"

        def integrand(lam):
            pr = _pick(_gpy_party(sub, sub.r_side, theta_r, lam), e_r, sub.plus)
            pq = _pick(_gpy_party(sub, other, theta_q, lam), e_q, (1, 0))
            return pr * pq

        return _integrate_circle(integrand, (theta_r, -theta_q)) / TWO_PI
    raise ValueError(f"unknown submodel kind {sub.kind!r}")


def larsson_support(sub: Submodel) -> list[cf.Outcome]:
    if sub.kind == "larsson":
        k, l, r, s = sub.index
        alice = [(k, l), (l, k), (0, 0)]
        bob = [(r, s), (s, r), (0, 0)]
        return [cf.Outcome(*a, *b) for a in alice for b in bob if not (a == (0, 0) and b == (0, 0))]
    if sub.kind == "larsson_gpy":
        r_events = [sub.plus, sub.minus, (0, 0)]
        out = []
        for e in r_events:
            for q in ((1, 0), (0, 1)):
                out.append(cf.Outcome(*e, *q) if sub.r_side == "A" else cf.Outcome(*q, *e))
        return out
    return [sub.index]


def larsson_joint_closed_form(sub: Submodel, event, theta12: float) -> float:
    """Closed-form prediction of a single-photon Larsson submodel."""
    event = cf.Outcome(*event)
    if event not in larsson_support(sub):
        return 0.0
    if (event.k, event.l) == (0, 0) or (event.r, event.s) == (0, 0):
        return 0.25 - 1 / TWO_PI
    sign = np.sign((event.k - event.l) * (event.r - event.s))
    return (1 + sub.visibility * sign * math.sin(theta12)) / TWO_PI


# -- single-photon model ----------------------------------------------------


def _larsson_leak_sum(k: int, l: int, alpha: float, cutoff: int) -> float:
    """sum over c' > d' (within cutoff) of B(alpha, (k, l, c', d'))."""
    room = cutoff - k - l
    total = 0.0
    for c in range(1, room + 1):
        for d in range(0, min(c, room - c + 1)):
            total += cf.b_prefactor((k, l, c, d), alpha)
    return total


def build_submodel_table_twc(alpha: float, cutoff: int, enforce_proven_threshold: bool = True) -> SubmodelTable:
    """Full single-photon model restricted to outcomes with at most ``cutoff`` photons.

    Compensating weights use the same finite set of Larsson submodels as the
    table, so every outcome within the cutoff is reproduced exactly and the
    weights sum to one minus the detection tail beyond the cutoff.
    """
    x = alpha * alpha
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    threshold = alpha_threshold_twc()
    if enforce_proven_threshold and x >= threshold:
        raise ModelValidityError(
            f"alpha^2={x:.6g} exceeds the proven threshold {threshold:.6f}: the worst-case bound on "
            f"Delta_(1,0,0,0) is negative ({delta_twc_bound(alpha):.6g}); "
            f"exact Delta_(1,0,0,0) = {delta_twc(1, 0, alpha):.6g}",
            event=cf.Outcome(1, 0, 0, 0),
            value=delta_twc_bound(alpha),
            threshold=threshold,
        )
    subs: list[Submodel] = []
    theta_free = 0.0  # trivial weights only involve setting-independent outcomes
    for n in outcomes_upto(cutoff):
        n = cf.Outcome(*n)
        k, l, r, s = n
        if k > l and r > s:
            subs.append(Submodel("larsson", n, 2 * math.pi * cf.b_prefactor(n, alpha), cf.visibility(n)))
        elif k == l and r == s:
            continue
        elif (k == l == 0) or (r == s == 0):
            if r == s == 0:
                leak = _larsson_leak_sum(k, l, alpha, cutoff)
            else:
                leak = _larsson_leak_sum(r, s, alpha, cutoff)
            delta = cf.p_twc(n, alpha, theta_free) - (math.pi / 2 - 1) * leak
            if delta < 0:
                raise ModelValidityError(
                    f"negative compensating weight Delta_{tuple(n)} = {delta:.6g} at alpha^2={x:.6g}",
                    event=n,
                    value=delta,
                    threshold=threshold,
                )
            subs.append(Submodel("trivial", n, delta))
        elif k == l or r == s:
            subs.append(Submodel("trivial", n, cf.p_twc(n, alpha, theta_free)))
    return SubmodelTable("twc", alpha, cutoff, subs, tail=cf.twc_tail(alpha, cutoff))


# -- squeezed-vacuum model --------------------------------------------------

_GPY_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2))
_REFERENCE_SETTINGS = ((0.0, 0.0), (0.7, 0.4), (2.1, -0.3), (1.3, 1.9))
SINGLE_PHOTON_EVENTS = tuple(cf.Outcome(*n) for n in ((0, 0, 0, 1), (0, 0, 1, 0), (0, 1, 0, 0), (1, 0, 0, 0)))


def gpy_larsson_submodels(alpha: float, gamma: float) -> list[Submodel]:
    """The seven class-1 submodels; the (0,1)x(0,1) pair is answered by Alice."""
    x = alpha * alpha
    p0 = cf.gpy_vacuum_probability(alpha, gamma)
    subs = []
    for pair in _GPY_PAIRS:
        for side in ("A", "B"):
            if pair == (0, 1) and side == "B":
                continue
            probe = cf.Outcome(*pair, 1, 0) if side == "A" else cf.Outcome(1, 0, *pair)
            row = cf.class1_row(probe)
            plus = pair if row.c_cos > 0 else (pair[1], pair[0])
            level = x * x + row.c_gamma * gamma**2
            V = abs(row.c_cos) * x * gamma / level
            weight = TWO_PI * p0 * row.prefactor(alpha) * level
            index = cf.Outcome(*plus, 1, 0) if side == "A" else cf.Outcome(1, 0, *plus)
            subs.append(Submodel("larsson_gpy", index, weight, V, side, plus))
    return subs


def _gpy_leak(sub: Submodel) -> dict[cf.Outcome, float]:
    share = sub.weight * (math.pi - 2) / TWO_PI
    if sub.r_side == "A":
        return {cf.Outcome(0, 0, 1, 0): share, cf.Outcome(0, 0, 0, 1): share}
    return {cf.Outcome(1, 0, 0, 0): share, cf.Outcome(0, 1, 0, 0): share}


def build_submodel_table_gpy(
    alpha: float, gamma: float, cutoff: int, proven_region_only: bool = True
) -> SubmodelTable:
    """Partial squeezed-vacuum model over outcomes with at most ``cutoff`` photons.

    Setting independence of an outcome is decided from oracle tables at
    several reference settings.
    """
    x = alpha * alpha
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    if not 0 <= gamma < 1:
        raise ValueError(f"gamma must lie in [0, 1), got {gamma}")
    if cutoff < 4:
        raise ValueError("cutoff must be >= 4 to hold the class-1 events")
    if proven_region_only and not (gamma <= x and x < GPY_PROVEN_ALPHA2):
        raise ModelValidityError(
            f"(alpha^2={x:.6g}, gamma={gamma:.6g}) is outside the proven region gamma <= alpha^2 < "
            f"{GPY_PROVEN_ALPHA2}; disable the proven-region restriction to rely on the explicit Delta check",
            threshold=GPY_PROVEN_ALPHA2,
        )
    tables = [
        probability_table(SourceSpec("squeezed", alpha, t1, t2, gamma, GPY_SQUEEZE_PHASE), 0.5, cutoff)
        for t1, t2 in _REFERENCE_SETTINGS
    ]
    larsson = gpy_larsson_submodels(alpha, gamma)
    leak: dict[cf.Outcome, float] = {}
    for sub in larsson:
        for n, v in _gpy_leak(sub).items():
            leak[n] = leak.get(n, 0.0) + v
    subs = list(larsson)
    uncovered = []
    for n in outcomes_upto(cutoff):
        n = cf.Outcome(*n)
        values = [t[n] for t in tables]
        if cf.is_class1(n):
            continue
        spread = max(values) - min(values)
        if spread > 1e-14 + 1e-9 * max(values):
            uncovered.append(n)
            continue
        p = values[0]
        if n in SINGLE_PHOTON_EVENTS:
            delta = p - leak.get(n, 0.0)
            if delta < 0:
                raise ModelValidityError(
                    f"negative compensating weight Delta_{tuple(n)} = {delta:.6g} "
                    f"at alpha^2={x:.6g}, gamma={gamma:.6g}",
                    event=n,
                    value=delta,
                )
            subs.append(Submodel("trivial", n, delta))
        elif p > 0:
            subs.append(Submodel("trivial", n, p))
    table = SubmodelTable("gpy", alpha, cutoff, subs, gamma=gamma, uncovered=uncovered)
    table.tail = cf.gpy_tail(alpha, gamma, cutoff)
    return table


# -- model predictions and verification ------------------------------------


def model_distribution(table: SubmodelTable, theta1: float, theta2: float) -> dict[cf.Outcome, float]:
    """Outcome distribution of the mixture at the given settings."""
    out: dict[cf.Outcome, float] = {}
    cache: dict = {}
    for sub in table.submodels:
        if sub.kind == "trivial":
            out[sub.index] = out.get(sub.index, 0.0) + sub.weight
            continue
        for ev in larsson_support(sub):
            key = (sub.kind, sub.r_side, round(sub.visibility, 15), _event_pattern(sub, ev))
            if key not in cache:
                cache[key] = joint_probability_analytic(sub, ev, theta1, theta2)
            out[ev] = out.get(ev, 0.0) + sub.weight * cache[key]
    return out


def _event_pattern(sub: Submodel, ev: cf.Outcome):
    """Label an event by which local branch each party took; the joint depends only on this."""
    if sub.kind == "larsson":
        k, l, r, s = sub.index
        a = {(k, l): "+", (l, k): "-", (0, 0): "0"}[(ev.k, ev.l)]
        b = {(r, s): "+", (s, r): "-", (0, 0): "0"}[(ev.r, ev.s)]
        return a + b
    e_r = (ev.k, ev.l) if sub.r_side == "A" else (ev.r, ev.s)
    e_q = (ev.r, ev.s) if sub.r_side == "A" else (ev.k, ev.l)
    a = {sub.plus: "+", sub.minus: "-", (0, 0): "0"}[e_r]
    return a + ("+" if e_q == (1, 0) else "-")


@dataclass
class VerificationReport:
    setup: str
    theta1: float
    theta2: float
    max_deviation: float
    worst_event: cf.Outcome | None
    n_events: int
    uncovered: list[cf.Outcome]
    deviations: dict[cf.Outcome, float] = field(repr=False, default_factory=dict)


def quantum_distribution(table: SubmodelTable, theta1: float, theta2: float) -> dict[cf.Outcome, float]:
    if table.setup == "twc":
        return {
            cf.Outcome(*n): cf.p_twc(n, table.alpha, theta1 - theta2) for n in outcomes_upto(table.cutoff)
        }
    src = SourceSpec("squeezed", table.alpha, theta1, theta2, table.gamma, GPY_SQUEEZE_PHASE)
    return {cf.Outcome(*n): p for n, p in probability_table(src, 0.5, table.cutoff).items()}


def verify_model(table: SubmodelTable, theta1: float, theta2: float) -> VerificationReport:
    """Compare the mixture with the quantum probabilities outcome by outcome.

    Single-photon tables are checked against the closed form over every
    outcome within the cutoff; squeezed-vacuum tables against the oracle over
    the covered outcomes only.
    """
    lhv = model_distribution(table, theta1, theta2)
    qm = quantum_distribution(table, theta1, theta2)
    skip = set(table.uncovered)
    dev = {n: abs(lhv.get(n, 0.0) - p) for n, p in qm.items() if n not in skip}
    worst = max(dev, key=dev.get) if dev else None
    return VerificationReport(
        table.setup, theta1, theta2, dev[worst] if worst else 0.0, worst, len(dev), sorted(skip), dev
    )


# -- Monte Carlo -------------------------------------------------------------


@dataclass
class SampleResult:
    counts: dict[cf.Outcome, int]
    n: int
    seed: int
    streams: int

    @property
    def frequencies(self) -> dict[cf.Outcome, float]:
        return {k: v / self.n for k, v in self.counts.items()}


def _alice_local(k, l, V, larsson, theta1, lam, x, u):
    """Alice's counts; reads only her submodel data, lam, x, her setting and her own uniform."""
    pp, pm, _ = _r_branch(V, theta1, lam, 1)
    q_plus = np.cos(theta1 - lam) >= 0
    plus = np.where(x == 0, u < pp, q_plus)
    minus = np.where(x == 0, (u >= pp) & (u < pp + pm), ~q_plus)
    c = np.where(plus, k, np.where(minus, l, 0))
    d = np.where(plus, l, np.where(minus, k, 0))
    return np.where(larsson, c, k), np.where(larsson, d, l)


def _bob_local(r, s, V, larsson, theta2, lam, x, u):
    pp, pm, _ = _r_branch(V, theta2, lam, -1)
    q_plus = np.cos(theta2 - lam) >= 0
    plus = np.where(x == 1, u < pp, q_plus)
    minus = np.where(x == 1, (u >= pp) & (u < pp + pm), ~q_plus)
    c = np.where(plus, r, np.where(minus, s, 0))
    d = np.where(plus, s, np.where(minus, r, 0))
    return np.where(larsson, c, r), np.where(larsson, d, s)


def _worker_count(workers: int | None) -> int:
    if workers is not None:
        return max(1, workers)
    env = os.environ.get("PBL_THREADS")
    return max(1, int(env)) if env else 1


def sample_twc(
    alpha: float,
    theta1: float,
    theta2: float,
    seed: int,
    n: int,
    cutoff: int,
    streams: int = 8,
    batch: int = 1 << 20,
    workers: int | None = None,
) -> SampleResult:
    """Draw ``n`` runs of the single-photon model.

    Each run draws a submodel (weights renormalised over the cutoff), then
    (lam, x), then each party's outcome from its own uniform. The work is split
    into ``streams`` independent generators spawned from ``seed``; counts
    are merged by addition, so the result depends on (seed, n, streams) only.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    table = build_submodel_table_twc(alpha, cutoff)
    subs = table.submodels
    w = np.array([s.weight for s in subs])
    cum = np.cumsum(w / w.sum())
    cum[-1] = 1.0
    idx = np.array([s.index for s in subs], dtype=np.int64)
    V = np.array([s.visibility for s in subs])
    larsson = np.array([s.kind == "larsson" for s in subs])
    base = cutoff + 1

    def run(job):
        seq, m = job
        rng = np.random.Generator(np.random.PCG64(seq))
        counts = np.zeros(base**4, dtype=np.int64)
        done = 0
        while done < m:
            size = min(batch, m - done)
            pick = np.searchsorted(cum, rng.random(size), side="right")
            lam = rng.random(size) * TWO_PI
            x = rng.integers(0, 2, size)
            ua = rng.random(size)
            ub = rng.random(size)
            k, l, r, s = idx[pick].T
            c1, d1 = _alice_local(k, l, V[pick], larsson[pick], theta1, lam, x, ua)
            c2, d2 = _bob_local(r, s, V[pick], larsson[pick], theta2, lam, x, ub)
            code = ((c1 * base + d1) * base + c2) * base + d2
            counts += np.bincount(code, minlength=base**4)
            done += size
        return counts

    seqs = np.random.SeedSequence(seed).spawn(streams)
    sizes = [n // streams + (1 if i < n % streams else 0) for i in range(streams)]
    jobs = list(zip(seqs, sizes))
    n_workers = _worker_count(workers)
    if n_workers > 1:
        with ThreadPoolExecutor(n_workers) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(j) for j in jobs]
    total = np.sum(parts, axis=0)
    counts = {}
    for code in np.flatnonzero(total):
        code = int(code)
        d2 = code % base
        c2 = (code // base) % base
        d1 = (code // base**2) % base
        c1 = code // base**3
        counts[cf.Outcome(c1, d1, c2, d2)] = int(total[code])
    return SampleResult(counts, n, seed, streams)


def sample_z_scores(result: SampleResult, alpha: float, theta12: float, cutoff: int, min_expected: float = 100.0):
    """Binomial z-score of every outcome whose expected count is >= ``min_expected``."""
    out = {}
    for n in outcomes_upto(cutoff):
        p = cf.p_twc(n, alpha, theta12)
        expected = result.n * p
        if expected < min_expected:
            continue
        obs = result.counts.get(cf.Outcome(*n), 0)
        out[cf.Outcome(*n)] = (obs - expected) / math.sqrt(result.n * p * (1 - p))
    return out
