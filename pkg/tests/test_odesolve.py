"""Fundamental-solution integrator tests."""

import math

import numpy as np
import pytest

from qwire.domain import Interval
from qwire.odesolve import (
    OdeError,
    free_exponential_basis,
    fundamental_solutions,
)


def test_free_interval_closed_form():
    # On a free interval u'' = -2 lam u, so the canonical pair is
    # cos(k(x-a)) and sin(k(x-a))/k with k = sqrt(2 lam).
    lam = 1.3
    k = math.sqrt(2.0 * lam)
    iv = Interval(0.5, 4.0, "1", "0")
    fp = fundamental_solutions(iv, lam)
    z = fp.xs - iv.a
    assert np.max(np.abs(fp.values[0] - np.cos(k * z))) <= 1e-9
    assert np.max(np.abs(fp.values[1] - np.sin(k * z) / k)) <= 1e-9
    assert fp.psi_a == pytest.approx([1.0, 0.0])
    assert fp.dpsi_a == pytest.approx([0.0, 1.0])
    assert fp.psi_b[0] == pytest.approx(math.cos(k * (4.0 - 0.5)), rel=1e-10)
    assert fp.dpsi_b[1] == pytest.approx(math.cos(k * (4.0 - 0.5)), rel=1e-10)


def test_lambda_zero_gives_linear_pair():
    fp = fundamental_solutions(Interval(0.0, 2.0, "1", "0"), 0.0)
    assert np.max(np.abs(fp.values[0] - 1.0)) <= 1e-10
    assert np.max(np.abs(fp.values[1] - fp.xs)) <= 1e-10


def test_constant_fast_path_matches_integrator():
    # '1 + 0*x' is not recognized as constant, so it takes the adaptive
    # integrator path; the values must match the closed-form branch.
    lam = 0.8
    iv_fast = Interval(0.0, 3.0, "1", "2")
    iv_slow = Interval(0.0, 3.0, "1 + 0*x", "2 + 0*x")
    fast = fundamental_solutions(iv_fast, lam)
    slow = fundamental_solutions(iv_slow, lam, rel_tol=1e-12)
    assert np.max(np.abs(fast.values - slow.values)) <= 1e-8
    assert fast.dpsi_b == pytest.approx(slow.dpsi_b, rel=1e-8)


def test_wronskian_invariant_variable_coefficients():
    iv = Interval(0.0, 2.0, "1 + 0.3*sin(x)", "x^2/2 - 1")
    for lam in (-0.7, 0.0, 2.5):
        fp = fundamental_solutions(iv, lam)
        assert fp.wronskian_drift() <= 1e-6


def test_exponential_basis_change():
    # [psi_exp^1, psi_exp^2] = [psi_can^1, psi_can^2] T with
    # T = [[1, 1], [i k, -i k]], k = sqrt(2 lam).
    lam = 0.9
    k = math.sqrt(2.0 * lam)
    iv = Interval(0.0, 2.0 * math.pi, "1", "0")
    can = fundamental_solutions(iv, lam)
    ex = free_exponential_basis(iv, lam)
    T = np.array([[1.0, 1.0], [1j * k, -1j * k]])
    rebuilt = T.T @ can.values.astype(complex)
    scale = np.max(np.abs(ex.values))
    assert np.max(np.abs(rebuilt - ex.values)) <= 1e-8 * scale


def test_exponential_basis_requires_free_interval():
    with pytest.raises(ValueError):
        free_exponential_basis(Interval(0.0, 1.0, "2", "0"), 1.0)
    with pytest.raises(ValueError):
        free_exponential_basis(Interval(0.0, 1.0, "1", "1"), 1.0)
    with pytest.raises(ValueError):
        free_exponential_basis(Interval(0.0, 1.0, "1", "0"), -1.0)


def test_tolerance_convergence():
    iv = Interval(0.0, 3.0, "1 + 0.2*x", "sin(x)")
    lam = 1.1
    coarse = fundamental_solutions(iv, lam, rel_tol=1e-8)
    fine = fundamental_solutions(iv, lam, rel_tol=1e-9)
    for attr in ("psi_b", "dpsi_b"):
        c, f = getattr(coarse, attr), getattr(fine, attr)
        assert np.max(np.abs(c - f)) <= 10 * 1e-8 * max(1.0, np.max(np.abs(f)))


def _total_growth(fp):
    # Both deep-tunnelling basis solutions grow like cosh across the
    # interval; this sum recovers 2 * (k L - log 2) independently of the
    # internal per-solution rescaling.
    return (fp.scale_exponent + math.log(abs(fp.psi_b[0]))
            + math.log(abs(fp.psi_a[1])))


def test_deep_tunnelling_rescales_without_overflow():
    # lam far below V: growth rate k = sqrt(2 (V - lam)) with k L >> 700.
    iv = Interval(0.0, 10.0, "1", "5000")
    fp = fundamental_solutions(iv, -5000.0)
    assert fp.scale_exponent > 0.0
    assert np.all(np.isfinite(fp.values))
    assert np.max(np.abs(fp.values)) < 1e305
    k = math.sqrt(2.0 * 10000.0)
    assert _total_growth(fp) == pytest.approx(2 * (k * 10.0 - math.log(2.0)), rel=1e-12)


def test_deep_tunnelling_integrator_path():
    # The Wronskian invariant cancels catastrophically at growth e^{2kL},
    # so check the accumulated growth rate against the closed form instead.
    iv = Interval(0.0, 4.0, "1", "1000 + 0.001*x")
    fp = fundamental_solutions(iv, -1000.0)
    assert np.all(np.isfinite(fp.values))
    assert fp.scale_exponent > 0.0
    k = math.sqrt(2.0 * (1000.002 + 1000.0))
    want = 2 * (k * 4.0 - math.log(2.0))
    assert _total_growth(fp) == pytest.approx(want, rel=1e-4)


def test_metric_must_be_positive():
    with pytest.raises(OdeError):
        fundamental_solutions(Interval(0.0, 2.0, "x - 1 + 0*sin(x)", "0"), 1.0)


def test_samples_validation():
    with pytest.raises(ValueError):
        fundamental_solutions(Interval(0.0, 1.0), 1.0, samples=2)
