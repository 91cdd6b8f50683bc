"""Bell-type tests: intensity CHSH, on/off CH, and the four-outcome CGLMP
expression, with the grid-plus-simplex optimizers used to locate violations.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize

from .closed_form import OnOffProbs, onoff_probs_gpy, onoff_probs_twc
from .fock import FockVector, BeamsplitterSpec, SourceSpec, apply_beamsplitter, probability_table

CGLMP_LABELS = ((0, 0), (0, 2), (2, 0), (1, 1))


@dataclass
class BellResult:
    inequality: str
    params: dict
    value: float
    lower: float
    upper: float
    violated: bool = field(init=False)

    def __post_init__(self):
        self.violated = bool(self.value < self.lower or self.value > self.upper)


# -- intensity correlations -------------------------------------------------


def intensity_correlation(alpha: float, theta1: float, theta2: float, cutoff: int) -> float:
    """<(Nc1 - Nd1)(Nc2 - Nd2)> / <(Nc1 + Nd1)(Nc2 + Nd2)> from the oracle."""
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    table = probability_table(SourceSpec("single_photon", alpha, theta1, theta2), 0.5, cutoff)
    num = den = 0.0
    for (k, l, r, s), p in table.items():
        num += p * (k - l) * (r - s)
        den += p * (k + l) * (r + s)
    assert den > 0, "zero total intensity correlation"
    return num / den


def chsh_value(alpha: float, settings, cutoff: int) -> BellResult:
    """|E(a,b) + E(a,b') + E(a',b) - E(a',b')| for settings (a, a', b, b')."""
    t1, t1p, t2, t2p = settings
    E = lambda a, b: intensity_correlation(alpha, a, b, cutoff)
    s = E(t1, t2) + E(t1, t2p) + E(t1p, t2) - E(t1p, t2p)
    params = {"alpha2": alpha * alpha, "settings": [float(v) for v in settings], "cutoff": cutoff}
    return BellResult("chsh", params, abs(s), -2.0, 2.0)


@dataclass
class ChshOptimum:
    settings: tuple
    result: BellResult
    grid: np.ndarray = field(repr=False)  # columns theta12, E


def optimize_chsh(alpha: float, cutoff: int, steps: int = 180, refine: bool = True) -> ChshOptimum:
    """Best CHSH settings for the intensity correlation.

    The correlation depends on theta1 - theta2 only, so it is tabulated once on
    a grid of differences (step 2 pi / ``steps``) with theta2 = 0 and the
    three remaining angles are searched on that grid, then refined with a
    simplex search on the oracle itself.
    """
    grid = np.arange(steps) * (2 * math.pi / steps)
    e = np.array([intensity_correlation(alpha, d, 0.0, cutoff) for d in grid])
    best = (-np.inf, None)
    idx = np.arange(steps)
    for sign in (1, -1):
        for c in range(steps):
            # S = E(a) + E(a - c) + E(b) - E(b - c) with theta2 = 0, theta2' = c
            fa = sign * (e + e[(idx - c) % steps])
            fb = sign * (e - e[(idx - c) % steps])
            ia, ib = int(np.argmax(fa)), int(np.argmax(fb))
            val = fa[ia] + fb[ib]
            if val > best[0] + 1e-15:
                best = (val, (grid[ia], grid[ib], 0.0, grid[c]))
    settings = best[1]
    if refine:
        def neg(p):
            return -chsh_value(alpha, (p[0], p[1], 0.0, p[2]), cutoff).value

        x0 = np.array([settings[0], settings[1], settings[3]])
        simplex = np.vstack([x0] + [x0 + 0.02 * np.eye(3)[i] for i in range(3)])
        res = minimize(neg, x0, method="Nelder-Mead",
                       options={"initial_simplex": simplex, "xatol": 1e-6, "fatol": 1e-12, "maxfev": 400})
        if -res.fun >= best[0]:
            settings = (res.x[0], res.x[1], 0.0, res.x[2])
    settings = tuple(float(v) for v in settings)
    return ChshOptimum(settings, chsh_value(alpha, settings, cutoff), np.column_stack([grid, e]))


def chsh_violation_boundary(cutoff: int = 8, lo: float = 0.2, hi: float = 0.6, xtol: float = 1e-3,
                            steps: int = 180) -> float:
    """alpha^2 at which the optimized CHSH value crosses 2."""
    f = lambda a2: optimize_chsh(math.sqrt(a2), cutoff, steps).result.value - 2.0
    return brentq(f, lo, hi, xtol=xtol)


# -- CH with on/off settings --------------------------------------------------


def ch_value(p: OnOffProbs, params: dict | None = None) -> BellResult:
    value = p.p_ab + p.p_ab_on + p.p_a_on_b - p.p_a_on_b_on - p.p_a - p.p_b
    return BellResult("ch", dict(params or {}), value, -1.0, 0.0)


def ch_twc(alpha2: float, T: float) -> BellResult:
    return ch_value(onoff_probs_twc(math.sqrt(alpha2), T), {"alpha2": alpha2, "T": T})


def ch_gpy(alpha2: float, gamma: float, T: float) -> BellResult:
    return ch_value(onoff_probs_gpy(math.sqrt(alpha2), gamma, T), {"alpha2": alpha2, "gamma": gamma, "T": T})


def onoff_probs_oracle(setup: str, alpha: float, T: float, cutoff: int, gamma: float = 0.0) -> OnOffProbs:
    """On/off event probabilities counted directly from oracle tables.

    A' is exactly one photon at d1 and none at c1 with the oscillator on; A is
    exactly one photon at either detector with it off (likewise for Bob). The
    single-photon source uses alpha1 = i alpha2, the squeezed source real
    amplitudes.
    """
    if setup == "twc":
        make = lambda on: SourceSpec("single_photon", alpha, math.pi / 2, 0.0, lo_on=on)
    elif setup == "gpy":
        make = lambda on: SourceSpec("squeezed", alpha, 0.0, 0.0, gamma, lo_on=on)
    else:
        raise ValueError(f"unknown setup {setup!r}")
    on = lambda c, d: (c, d) == (0, 1)
    off = lambda c, d: c + d == 1

    def prob(settings, test_a, test_b):
        table = probability_table(make(settings), T, cutoff)
        return math.fsum(p for (k, l, r, s), p in table.items() if test_a(k, l) and test_b(r, s))

    anything = lambda c, d: True
    return OnOffProbs(
        p_ab=prob((False, False), off, off),
        p_ab_on=prob((False, True), off, on),
        p_a_on_b=prob((True, False), on, off),
        p_a_on_b_on=prob((True, True), on, on),
        p_a=prob((False, False), off, anything),
        p_b=prob((False, False), anything, off),
    )


def ch_window_twc(alpha2: float) -> tuple[float, float]:
    """Range of T with CH < -1 for the single-photon on/off test."""
    return 0.5 * math.exp(alpha2), 1.0


@dataclass
class ChOptimum:
    params: dict
    value: float
    probs: OnOffProbs
    grid_columns: list[str]
    grid: np.ndarray = field(repr=False)
    window: tuple | None = None


def _grid_then_simplex(f, axes, names, step):
    """Minimise f over the lexicographic product grid, then polish with Nelder-Mead."""
    points = np.array(list(itertools.product(*axes)))
    values = np.array([f(p) for p in points])
    i = int(np.argmin(values))  # first minimum in lexicographic order
    x0 = points[i]
    dim = len(names)
    simplex = np.vstack([x0] + [x0 + step * np.eye(dim)[j] for j in range(dim)])

    def guarded(p):
        if np.any(p <= 0) or np.any(p >= 1):
            return np.inf
        return f(p)

    res = minimize(guarded, x0, method="Nelder-Mead",
                   options={"initial_simplex": simplex, "xatol": 1e-6, "fatol": 1e-14, "maxiter": 20000})
    best = res.x if res.fun <= values[i] else x0
    return best, np.column_stack([points, values])


def optimize_ch_twc(step: float = 0.02) -> ChOptimum:
    axis = np.arange(step, 1.0 - 1e-12, step)
    best, grid = _grid_then_simplex(lambda p: ch_twc(p[0], p[1]).value, (axis, axis), ("alpha2", "T"), step)
    a2, T = (float(v) for v in best)
    res = ch_twc(a2, T)
    return ChOptimum({"alpha2": a2, "T": T}, res.value, onoff_probs_twc(math.sqrt(a2), T),
                     ["alpha2", "T", "CH"], grid, ch_window_twc(a2))


def optimize_ch_gpy(step: float = 0.02) -> ChOptimum:
    axis = np.arange(step, 1.0 - 1e-12, step)
    best, grid = _grid_then_simplex(lambda p: -ch_gpy(p[0], p[1], p[2]).value, (axis, axis, axis),
                                    ("alpha2", "gamma", "T"), step)
    grid[:, -1] *= -1
    a2, g, T = (float(v) for v in best)
    res = ch_gpy(a2, g, T)
    return ChOptimum({"alpha2": a2, "gamma": g, "T": T}, res.value, onoff_probs_gpy(math.sqrt(a2), g, T),
                     ["alpha2", "gamma", "T", "CH"], grid, (0.5, 1.0))


def two_term_probs(alpha: float, T: float) -> OnOffProbs:
    """On/off probabilities with each oscillator cut to its first two Fock terms, equal phases."""
    if not 0 <= T <= 1:
        raise ValueError(f"T must lie in [0, 1], got {T}")
    x = alpha * alpha
    R = 1 - T
    return OnOffProbs(
        p_ab=0.0,
        p_ab_on=R * x / (2 * (1 + x)),
        p_a_on_b=R * x / (2 * (1 + x)),
        p_a_on_b_on=0.5 * T * R * (2 * alpha) ** 2 / (1 + x) ** 2,
        p_a=0.5,
        p_b=0.5,
    )


def two_term_ch(alpha: float, T: float) -> BellResult:
    return ch_value(two_term_probs(alpha, T), {"alpha2": alpha * alpha, "T": T, "approximation": "two-term"})


def two_term_boundary(alpha: float) -> float:
    """T in (1/2, 1) where the two-term CH value comes back up to -1."""
    x = alpha * alpha
    if not 0 < x < 1:
        raise ValueError("need 0 < alpha^2 < 1")
    f = lambda T: two_term_ch(alpha, T).value + 1.0
    # CH + 1 > 0 just above 1/2 and < 0 between the root and T = 1
    return brentq(f, 0.5, 0.5 * (1 + (1 + x) / 2), xtol=1e-14, rtol=1e-15)


appendixF_ch = two_term_ch
appendixF_boundary = two_term_boundary


# -- CGLMP ------------------------------------------------------------------


def lambda_mix(alpha: float, gamma: float) -> float:
    """Weight of the two-plus-two photon part against the two-plus-zero part."""
    x = alpha * alpha
    if x == 0 and gamma == 0:
        raise ValueError("alpha and gamma cannot both vanish")
    p22 = 0.25 * (x**4 + 4 * gamma**4 + 4 * gamma**2 * x**2)
    p20 = x * x
    return p22 / (p22 + p20)


def lambda_crossing(target: float = 0.4) -> float:
    """gamma with lambda_mix = target along alpha^2 = gamma."""
    return brentq(lambda g: lambda_mix(math.sqrt(g), g) - target, 1e-6, 0.999999, xtol=1e-14)


def cglmp_mixing_bound(lam: float) -> float:
    """Largest CGLMP value of the lam-mixture of the two event classes."""
    if not 0 <= lam <= 1:
        raise ValueError("lambda must lie in [0, 1]")
    return 10 / 3 * lam + 2 / 3


@dataclass(frozen=True)
class CglmpAssignment:
    """Values 0..d-1 given to each local count pair, per party."""

    alice: dict
    bob: dict

    def __post_init__(self):
        for name, m in (("alice", self.alice), ("bob", self.bob)):
            if sorted(m.values()) != list(range(len(m))):
                raise ValueError(f"{name} assignment is not a bijection onto 0..{len(m) - 1}")


# 00 -> 0 and 11 -> 1 for Alice, 11 -> 0 and 00 -> 1 for Bob
DEFAULT_ASSIGNMENT = CglmpAssignment(
    alice={(0, 0): 0, (1, 1): 1, (2, 0): 2, (0, 2): 3},
    bob={(1, 1): 0, (0, 0): 1, (2, 0): 2, (0, 2): 3},
)


def _as_arrays(joint, assignment, d):
    out = {}
    for key, table in joint.items():
        if isinstance(table, np.ndarray):
            arr = np.asarray(table, dtype=float)
        else:
            arr = np.zeros((d, d))
            for (ea, eb), p in table.items():
                a = assignment.alice[tuple(ea)] if assignment else ea
                b = assignment.bob[tuple(eb)] if assignment else eb
                arr[a, b] += p
        if arr.shape != (d, d):
            raise ValueError(f"table for settings {key} has shape {arr.shape}, expected {(d, d)}")
        if abs(arr.sum() - 1) > 1e-9 or arr.min() < -1e-12:
            raise ValueError(f"table for settings {key} is not normalized (sum={arr.sum():.12g})")
        out[key] = arr
    if set(out) != {(0, 0), (0, 1), (1, 0), (1, 1)}:
        raise ValueError("need tables for setting pairs (0,0), (0,1), (1,0), (1,1)")
    return out


def _p_diff(arr, shift, d):
    """P(A = B + shift mod d) from a joint table p[a, b]."""
    return sum(arr[(b + shift) % d, b] for b in range(d))


def cglmp_expression(tables: dict, d: int = 4) -> float:
    """Standard d-outcome CGLMP combination; local bound 2, algebraic maximum 4."""
    A1B1, A1B2, A2B1, A2B2 = tables[(0, 0)], tables[(0, 1)], tables[(1, 0)], tables[(1, 1)]
    total = 0.0
    for k in range(d // 2):
        c = 1 - 2 * k / (d - 1)
        plus = (_p_diff(A1B1, k, d)            # A1 = B1 + k
                + _p_diff(A2B1, -(k + 1), d)   # B1 = A2 + k + 1
                + _p_diff(A2B2, k, d)          # A2 = B2 + k
                + _p_diff(A1B2, -k, d))        # B2 = A1 + k
        minus = (_p_diff(A1B1, -(k + 1), d)    # A1 = B1 - k - 1
                 + _p_diff(A2B1, k, d)         # B1 = A2 - k
                 + _p_diff(A2B2, -(k + 1), d)  # A2 = B2 - k - 1
                 + _p_diff(A1B2, k + 1, d))    # B2 = A1 - k - 1
        total += c * (plus - minus)
    return float(total)


def cglmp_value(joint: dict, assignment: CglmpAssignment | None = None, d: int = 4) -> BellResult:
    """CGLMP value for settings-indexed joint tables.

    ``joint`` maps each setting pair (i, j), i, j in {0, 1}, either to a d x d
    array p[a, b] or to a dict {(alice_label, bob_label): p} translated
    through ``assignment``.
    """
    tables = _as_arrays(joint, assignment, d)
    return BellResult("cglmp", {"d": d}, cglmp_expression(tables, d), -math.inf, 2.0)


def best_cglmp_assignment(joint: dict, labels=CGLMP_LABELS) -> tuple[CglmpAssignment, float]:
    """Exhaustive search over both parties' value assignments."""
    best = (None, -math.inf)
    for pa in itertools.permutations(range(len(labels))):
        for pb in itertools.permutations(range(len(labels))):
            asg = CglmpAssignment(dict(zip(labels, pa)), dict(zip(labels, pb)))
            v = cglmp_value(joint, asg).value
            if v > best[1] + 1e-15:
                best = (asg, v)
    return best


def zero_and_two_joint() -> dict:
    """Local count distribution of two oscillator photons on one side only.

    Built from the oracle: (a1^+2 + a2^+2)/2 |0>, normalized, sent through
    both balanced beamsplitters. The result does not depend on the settings.
    """
    s = 1 / math.sqrt(2)
    state = FockVector(("a1", "b1", "b2", "a2"), {(2, 0, 0, 0): s, (0, 0, 0, 2): s}, 2)
    state = apply_beamsplitter(state, BeamsplitterSpec("a1", "b1", 0.5, "c1", "d1"))
    state = apply_beamsplitter(state, BeamsplitterSpec("a2", "b2", 0.5, "c2", "d2"))
    state = state.reorder(("c1", "d1", "c2", "d2"))
    table = {((k, l), (r, t)): abs(a) ** 2 for (k, l, r, t), a in state.terms.items()}
    return {key: dict(table) for key in ((0, 0), (0, 1), (1, 0), (1, 1))}


def two_and_two_joint(alpha: float, gamma: float, settings, cutoff: int = 8) -> tuple[dict, float]:
    """Joint local counts conditioned on two photons per side, for settings (a, a', b, b').

    Returns the settings-indexed tables and the unconditioned weight of the
    two-plus-two events at the first setting pair.
    """
    from .lhv import GPY_SQUEEZE_PHASE

    t1s = (settings[0], settings[1])
    t2s = (settings[2], settings[3])
    out = {}
    weight = None
    for i, t1 in enumerate(t1s):
        for j, t2 in enumerate(t2s):
            tab = probability_table(SourceSpec("squeezed", alpha, t1, t2, gamma, GPY_SQUEEZE_PHASE), 0.5, cutoff)
            sub = {((k, l), (r, s)): p for (k, l, r, s), p in tab.items() if k + l == 2 and r + s == 2}
            z = sum(sub.values())
            if weight is None:
                weight = z
            out[(i, j)] = {key: p / z for key, p in sub.items()}
    return out, weight
