import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from photonic_bell_lab import fock
from photonic_bell_lab.closed_form import gpy_tail
from photonic_bell_lab.fock import (
    BeamsplitterSpec,
    FockVector,
    SourceSpec,
    apply_beamsplitter,
    coherent_expansion,
    outcome_probability,
    probability_table,
    single_photon_split,
    tensor,
    two_mode_squeezed,
)


def test_coherent_vacuum():
    v = coherent_expansion(0.0, 1.3, 5)
    assert dict(v.terms) == {(0,): 1}


def test_coherent_first_term():
    a, th = 0.7, 0.4
    v = coherent_expansion(a, th, 6)
    assert abs(v.amplitude((1,)) - math.exp(-a * a / 2) * a * cmath.exp(1j * th)) < 1e-15


def test_coherent_norm_tail():
    # direct Poisson tail, summed far past the cutoff
    x = 0.55**2
    tail = math.fsum(math.exp(-x) * x**n / math.factorial(n) for n in range(13, 60))
    v = coherent_expansion(0.55, 0.0, 12)
    assert v.norm2() >= 1 - 1e-9
    assert abs(1 - v.norm2() - tail) < 1e-15
    assert abs(fock.coherent_tail(0.55, 12) - tail) < 1e-15


def test_single_photon_split():
    s = single_photon_split()
    assert s.modes == ("b1", "b2")
    assert abs(s.amplitude((0, 1)) - 1 / math.sqrt(2)) < 1e-15
    assert abs(s.amplitude((1, 0)) - 1j / math.sqrt(2)) < 1e-15
    assert abs(s.norm2() - 1) < 1e-15


def test_two_mode_squeezed_rows():
    assert dict(two_mode_squeezed(0.0, 8).terms) == {(0, 0): 1}
    g = 0.3
    s = two_mode_squeezed(g, 8)
    assert abs(s.amplitude((1, 1)) - math.sqrt(1 - g * g) * g) < 1e-15
    assert s.amplitude((1, 0)) == 0


def test_two_mode_squeezed_tail():
    g = 0.175
    s = two_mode_squeezed(g, 16)
    tail = math.fsum((1 - g * g) * g ** (2 * k) for k in range(9, 200))
    assert abs(1 - s.norm2() - tail) < 1e-15
    assert abs(fock.squeezed_tail(g, 16) - tail) < 1e-15


def test_two_mode_squeezed_rejects_gamma_one():
    with pytest.raises(ValueError):
        two_mode_squeezed(1.0, 4)


def test_beamsplitter_single_photon_balanced():
    state = FockVector(("a", "b"), {(0, 1): 1}, 1)
    out = apply_beamsplitter(state, BeamsplitterSpec("a", "b", 0.5, "c", "d"))
    # b+ -> i sqrt(R) c+ + sqrt(T) d+
    assert abs(out.amplitude((1, 0)) - 1j / math.sqrt(2)) < 1e-15
    assert abs(out.amplitude((0, 1)) - 1 / math.sqrt(2)) < 1e-15


def test_beamsplitter_vacuum_invariant():
    for T in (0.0, 0.3, 1.0):
        out = apply_beamsplitter(fock.vacuum(("a", "b")), BeamsplitterSpec("a", "b", T))
        assert dict(out.terms) == {(0, 0): 1}


def test_hong_ou_mandel():
    state = FockVector(("a", "b"), {(1, 1): 1}, 2)
    out = apply_beamsplitter(state, BeamsplitterSpec("a", "b", 0.5, "c", "d"))
    assert abs(out.amplitude((1, 1))) < 1e-15
    assert abs(abs(out.amplitude((2, 0))) ** 2 - 0.5) < 1e-15


def test_beamsplitter_unknown_mode():
    with pytest.raises(ValueError):
        apply_beamsplitter(fock.vacuum(("a", "b")), BeamsplitterSpec("a", "z", 0.5))


def test_beamsplitter_bad_transmittivity():
    with pytest.raises(ValueError):
        BeamsplitterSpec("a", "b", 1.2)


def test_twc_zero_and_vacuum_like_events():
    a = 0.55
    st_ = fock.detected_state(SourceSpec("single_photon", a, math.pi / 2, 0.0), 0.5, 8)
    assert outcome_probability(st_, (1, 1, 0, 0)) < 1e-30
    assert abs(outcome_probability(st_, (0, 0, 0, 1)) - math.exp(-2 * a * a) / 4) < 1e-15


def test_table_single_photon_no_oscillator():
    t = probability_table(SourceSpec("single_photon", 0.0), 0.5, 1)
    expected = {(0, 0, 0, 1): 0.25, (0, 0, 1, 0): 0.25, (0, 1, 0, 0): 0.25, (1, 0, 0, 0): 0.25}
    assert set(n for n, p in t.items() if p > 0) == set(expected)
    for n, p in expected.items():
        assert abs(t[n] - p) < 1e-15


def test_table_all_vacuum():
    t = probability_table(SourceSpec("squeezed", 0.0, gamma=0.0), 0.5, 3)
    assert abs(t[(0, 0, 0, 0)] - 1) < 1e-15
    assert abs(sum(t.values()) - 1) < 1e-15


def test_table_ordering_and_normalization():
    src = SourceSpec("squeezed", 0.5, 0.3, 0.2, gamma=0.3)
    t = probability_table(src, 0.5, 8)
    keys = list(t)
    assert keys == sorted(keys)
    total = sum(t.values())
    assert total <= 1 + 1e-12
    # truncation acts on the total count, so the relevant tail is the joint one
    assert abs(total - (1 - gpy_tail(0.5, 0.3, 8))) < 1e-12


def test_factorials_large():
    assert fock.factorial(5) == 120
    assert abs(fock.factorial(30) / math.factorial(30) - 1) < 1e-12
    assert abs(fock.binomial(100, 50) / math.comb(100, 50) - 1) < 1e-12


def test_source_spec_validation():
    with pytest.raises(ValueError):
        SourceSpec("single_photon", -0.1)
    with pytest.raises(ValueError):
        SourceSpec("squeezed", 0.3, gamma=1.0)
    with pytest.raises(ValueError):
        SourceSpec("laser", 0.3)


# -- properties --------------------------------------------------------------

_occ = st.tuples(st.integers(0, 3), st.integers(0, 3))
_amp = st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False)
_sparse = st.dictionaries(_occ, _amp, min_size=1, max_size=6)


@settings(max_examples=60, deadline=None)
@given(_sparse, st.floats(0.0, 1.0))
def test_unitarity(terms, T):
    s = FockVector(("a", "b"), terms, 6)
    out = apply_beamsplitter(s, BeamsplitterSpec("a", "b", T))
    assert abs(out.norm2() - s.norm2()) < 1e-12


@settings(max_examples=40, deadline=None)
@given(_sparse, _sparse, st.floats(0.0, 1.0))
def test_linearity(t1, t2, T):
    bs = BeamsplitterSpec("a", "b", T)
    s1, s2 = FockVector(("a", "b"), t1, 6), FockVector(("a", "b"), t2, 6)
    lhs = apply_beamsplitter(s1 + s2, bs)
    rhs = apply_beamsplitter(s1, bs) + apply_beamsplitter(s2, bs)
    keys = set(lhs.terms) | set(rhs.terms)
    assert all(abs(lhs.amplitude(k) - rhs.amplitude(k)) < 1e-12 for k in keys)


def _marginals(table):
    alice, bob = {}, {}
    for (k, l, r, s), p in table.items():
        alice[(k, l)] = alice.get((k, l), 0.0) + p
        bob[(r, s)] = bob.get((r, s), 0.0) + p
    return alice, bob


@settings(max_examples=10, deadline=None)
@given(st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi), st.sampled_from(["single_photon", "squeezed"]))
def test_no_signalling(theta1, theta2, variant):
    base = SourceSpec(variant, 0.6, theta1, 0.0, gamma=0.3)
    moved = SourceSpec(variant, 0.6, theta1, theta2, gamma=0.3)
    a0, _ = _marginals(probability_table(base, 0.5, 8))
    a1, _ = _marginals(probability_table(moved, 0.5, 8))
    assert max(abs(a0[k] - a1[k]) for k in a0) < 1e-12
    _, b0 = _marginals(probability_table(SourceSpec(variant, 0.6, 0.0, theta2, gamma=0.3), 0.5, 8))
    _, b1 = _marginals(probability_table(SourceSpec(variant, 0.6, theta1, theta2, gamma=0.3), 0.5, 8))
    assert max(abs(b0[k] - b1[k]) for k in b0) < 1e-12


def test_tensor_and_reorder():
    s = tensor(coherent_expansion(0.3, 0, 3, "x"), single_photon_split(), cutoff=3)
    assert s.modes == ("x", "b1", "b2")
    r = s.reorder(("b2", "x", "b1"))
    assert abs(r.amplitude((1, 0, 0)) - s.amplitude((0, 0, 1))) < 1e-15
    assert np.isclose(r.norm2(), s.norm2())
