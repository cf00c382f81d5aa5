"""Fundamental solutions of the eigenvalue ODE on a single interval.

For H = -(1/(2*sqrt(eta))) d/dx (eta**-0.5 d/dx) + V the eigenvalue equation
H u = lam u is integrated as the first-order system

    u' = v
    v' = 2*eta*(V - lam)*u + eta'/(2*eta) * v

with the canonical value/slope basis at the left endpoint:
u1(a) = 1, u1'(a) = 0 and u2(a) = 0, u2'(a) = 1.  The modified Wronskian
p(x) (u1 u2' - u1' u2) with p = eta**-0.5 is an invariant of the flow and is
used as an integration sanity check.

Deep tunnelling (lam far below V) produces exponentially large solutions; the
integrator rescales both basis solutions by a common factor whenever their
magnitude passes 1e100 and records the accumulated logarithm in
``scale_exponent``.  A uniform positive rescaling multiplies the spectral
determinant by a positive constant and leaves its zero set unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import expr
from .domain import Interval

__all__ = ["FundamentalPair", "OdeError", "fundamental_solutions", "free_exponential_basis"]

_RESCALE_LIMIT = 1e100
# In a fully classically forbidden interval both left-launched solutions
# converge onto the growing mode and the basis collapses at the level
# exp(-action); beyond this action a solution is launched from each endpoint
# instead (the determinant's zero set is basis independent).
_TWO_SIDED_ACTION = 25.0


class OdeError(Exception):
    """Integration failure (coefficient blow-up, step-size underflow)."""


@dataclass(frozen=True)
class FundamentalPair:
    """Canonical basis solutions of H u = lam u on one interval.

    ``values`` has shape (2, m): dense samples of the two basis solutions on
    the uniform grid ``xs``.  Endpoint data are plain (unnormalised)
    derivatives; the metric trace factors are applied downstream.  All stored
    numbers carry a common factor exp(-scale_exponent) relative to the exact
    canonical solutions.
    """

    lam: float
    interval: Interval
    xs: np.ndarray
    values: np.ndarray
    psi_a: np.ndarray      # (2,) values at a
    dpsi_a: np.ndarray     # (2,) plain derivatives at a
    psi_b: np.ndarray
    dpsi_b: np.ndarray
    scale_exponent: float

    def wronskian_drift(self) -> float:
        """Relative change of the modified Wronskian between the endpoints."""
        iv = self.interval
        p_a = expr.evaluate(iv.metric, iv.a) ** -0.5
        p_b = expr.evaluate(iv.metric, iv.b) ** -0.5
        w_a = p_a * (self.psi_a[0] * self.dpsi_a[1] - self.dpsi_a[0] * self.psi_a[1])
        w_b = p_b * (self.psi_b[0] * self.dpsi_b[1] - self.dpsi_b[0] * self.psi_b[1])
        return abs(w_b - w_a) / max(abs(w_a), abs(w_b), 1e-300)


def _coefficients(interval: Interval):
    metric, potential = interval.metric, interval.potential
    h = 1e-6 * (interval.b - interval.a)

    if expr.is_constant(metric):
        eta0 = expr.evaluate(metric, 0.5 * (interval.a + interval.b))

        def eta(x, _v=eta0):
            return _v

        def eta_prime(x):
            return 0.0
    else:
        eta = expr.compile_fn(metric)
        eta_fn = eta

        def eta_prime(x):
            return (eta_fn(x + h) - eta_fn(x - h)) / (2.0 * h)

    if expr.is_constant(potential):
        v0 = expr.evaluate(potential, 0.5 * (interval.a + interval.b))

        def pot(x, _v=v0):
            return _v
    else:
        pot = expr.compile_fn(potential)

    return eta, eta_prime, pot


def fundamental_solutions(
    interval: Interval,
    lam: float,
    rel_tol: float = 1e-10,
    abs_tol: float | None = None,
    samples: int = 257,
) -> FundamentalPair:
    """Integrate the canonical solution pair and sample it densely.

    ``samples`` is the number of uniform grid points (including endpoints).
    """
    if samples < 3:
        raise ValueError("samples must be at least 3")
    if abs_tol is None:
        abs_tol = rel_tol * 1e-2
    if expr.is_constant(interval.metric) and expr.is_constant(interval.potential):
        return _constant_coefficient_pair(interval, lam, samples)
    eta, eta_prime, pot = _coefficients(interval)
    a, b = interval.a, interval.b

    def rhs(x, y):
        e = eta(x)
        if e <= 0.0 or not math.isfinite(e):
            raise OdeError(f"metric not positive at x={x:.6g}")
        c_u = 2.0 * e * (pot(x) - lam)
        c_v = eta_prime(x) / (2.0 * e)
        return (y[1], c_u * y[0] + c_v * y[1],
                y[3], c_u * y[2] + c_v * y[3])

    # chunk count scaled to the worst exponential growth rate so that no
    # single chunk can overflow double precision
    probe = np.linspace(a, b, 33)
    w_probe = [2.0 * eta(x) * (pot(x) - lam) for x in probe]
    kappa = math.sqrt(max(max(w_probe), 0.0))
    chunks = max(4, int(kappa * (b - a) / 100.0) + 1)

    xs = np.linspace(a, b, samples)

    if min(w_probe) > 0.0 and kappa * (b - a) > _TWO_SIDED_ACTION:
        def rhs2(x, y):
            e = eta(x)
            if e <= 0.0 or not math.isfinite(e):
                raise OdeError(f"metric not positive at x={x:.6g}")
            return (y[1], 2.0 * e * (pot(x) - lam) * y[0]
                    + eta_prime(x) / (2.0 * e) * y[1])

        v1, ya1, yb1, s1 = _march(rhs2, a, b, xs, chunks, rel_tol, abs_tol)
        v2, yb2, ya2, s2 = _march(rhs2, b, a, xs, chunks, rel_tol, abs_tol)
        return FundamentalPair(
            lam=lam, interval=interval, xs=xs, values=np.vstack([v1, v2]),
            psi_a=np.array([ya1[0], ya2[0]]), dpsi_a=np.array([ya1[1], ya2[1]]),
            psi_b=np.array([yb1[0], yb2[0]]), dpsi_b=np.array([yb1[1], yb2[1]]),
            scale_exponent=s1 + s2,
        )
    values = np.empty((2, samples))
    y = np.array([1.0, 0.0, 0.0, 1.0])
    scale_exponent = 0.0
    edges = np.linspace(a, b, chunks + 1)
    values[:, 0] = y[[0, 2]]
    psi_a = y[[0, 2]].copy()
    dpsi_a = y[[1, 3]].copy()
    consumed = 1  # sample points already written

    for k in range(chunks):
        lo, hi = edges[k], edges[k + 1]
        sol = solve_ivp(rhs, (lo, hi), y, method="RK45", rtol=rel_tol,
                        atol=abs_tol, dense_output=True)
        if not sol.success:
            raise OdeError(f"integration failed on [{lo:.6g}, {hi:.6g}]: {sol.message}")
        pad = 1e-12 * (b - a)
        hi_edge = b + pad if k == chunks - 1 else hi + pad
        take = np.flatnonzero(xs <= hi_edge)
        take = take[take >= consumed]
        if take.size:
            dense = sol.sol(xs[take])
            values[0, take] = dense[0]
            values[1, take] = dense[2]
            consumed = take[-1] + 1
        y = sol.y[:, -1].copy()
        peak = float(np.max(np.abs(y)))
        if peak > _RESCALE_LIMIT:
            shift = math.log(peak)
            factor = math.exp(-shift)
            y *= factor
            values[:, :consumed] *= factor
            psi_a *= factor
            dpsi_a *= factor
            scale_exponent += shift

    return FundamentalPair(
        lam=lam, interval=interval, xs=xs, values=values,
        psi_a=psi_a, dpsi_a=dpsi_a,
        psi_b=y[[0, 2]].copy(), dpsi_b=y[[1, 3]].copy(),
        scale_exponent=scale_exponent,
    )


def _march(rhs, x0: float, x1: float, xs: np.ndarray, chunks: int,
           rel_tol: float, abs_tol: float):
    """Integrate one (u, u') solution from x0 to x1 (either direction).

    The solution starts with value 1 and slope 0 at x0.  Samples of u are
    taken on the ascending grid ``xs``; the overflow guard rescales the
    launch data, the already-written samples and the running state together,
    returning the accumulated log-factor.
    """
    span = x1 - x0
    edges = [x0 + span * k / chunks for k in range(chunks + 1)]
    pad = 1e-12 * abs(span)
    vals = np.empty(len(xs))
    filled = np.zeros(len(xs), dtype=bool)
    y = np.array([1.0, 0.0])
    y_start = y.copy()
    scale = 0.0
    for k in range(chunks):
        sol = solve_ivp(rhs, (edges[k], edges[k + 1]), y, method="RK45",
                        rtol=rel_tol, atol=abs_tol, dense_output=True)
        if not sol.success:
            raise OdeError(
                f"integration failed on [{edges[k]:.6g}, {edges[k + 1]:.6g}]: {sol.message}"
            )
        lo, hi = sorted((edges[k], edges[k + 1]))
        sel = ~filled & (xs >= lo - pad) & (xs <= hi + pad)
        if np.any(sel):
            vals[sel] = sol.sol(xs[sel])[0]
            filled[sel] = True
        y = sol.y[:, -1].copy()
        peak = float(np.max(np.abs(y)))
        if peak > _RESCALE_LIMIT:
            shift = math.log(peak)
            factor = math.exp(-shift)
            y *= factor
            y_start *= factor
            vals[filled] *= factor
            scale += shift
    return vals, y_start, y, scale


def _constant_coefficient_pair(interval: Interval, lam: float, samples: int) -> FundamentalPair:
    """Closed-form canonical pair for constant eta and V.

    With w = 2*eta*(V - lam) the equation u'' = w u has the canonical basis
    cosh(sqrt(w) z) and sinh(sqrt(w) z)/sqrt(w) (trigonometric for w < 0,
    linear for w = 0) in z = x - a.  For large positive w the pair is scaled
    uniformly by exp(-scale_exponent) exactly like the integrator's overflow
    guard.
    """
    a, b = interval.a, interval.b
    eta0 = expr.evaluate(interval.metric, 0.5 * (a + b))
    if eta0 <= 0.0:
        raise OdeError("metric not positive")
    v0 = expr.evaluate(interval.potential, 0.5 * (a + b))
    w = 2.0 * eta0 * (v0 - lam)
    xs = np.linspace(a, b, samples)
    z = xs - a
    values = np.empty((2, samples))
    if abs(w) < 1e-30:
        scale = 0.0
        values[0] = 1.0
        values[1] = z
        d_end = np.array([0.0, 1.0])
    elif w < 0.0:
        k = math.sqrt(-w)
        scale = 0.0
        values[0] = np.cos(k * z)
        values[1] = np.sin(k * z) / k
        d_end = np.array([-k * math.sin(k * (b - a)), math.cos(k * (b - a))])
    elif math.sqrt(w) * (b - a) > _TWO_SIDED_ACTION:
        # fully forbidden at high action: cosh launched from each endpoint
        k = math.sqrt(w)
        L = b - a
        scale = max(0.0, k * L - 300.0)
        values[0] = 0.5 * (np.exp(k * z - scale) + np.exp(-k * z - scale))
        zr = b - xs
        values[1] = 0.5 * (np.exp(k * zr - scale) + np.exp(-k * zr - scale))
        coshL = 0.5 * (math.exp(k * L - scale) + math.exp(-k * L - scale))
        sinhL = 0.5 * (math.exp(k * L - scale) - math.exp(-k * L - scale))
        sf = math.exp(-scale)
        return FundamentalPair(
            lam=lam, interval=interval, xs=xs, values=values,
            psi_a=np.array([sf, coshL]), dpsi_a=np.array([0.0, -k * sinhL]),
            psi_b=np.array([coshL, sf]), dpsi_b=np.array([k * sinhL, 0.0]),
            scale_exponent=2.0 * scale,
        )
    else:
        k = math.sqrt(w)
        scale = max(0.0, k * (b - a) - 300.0)
        ep = np.exp(k * z - scale)
        em = np.exp(-k * z - scale)
        values[0] = 0.5 * (ep + em)
        values[1] = 0.5 * (ep - em) / k
        d_end = np.array([k * 0.5 * (ep[-1] - em[-1]), 0.5 * (ep[-1] + em[-1])])
    sf = math.exp(-scale)
    return FundamentalPair(
        lam=lam, interval=interval, xs=xs, values=values,
        psi_a=np.array([sf, 0.0]), dpsi_a=np.array([0.0, sf]),
        psi_b=values[:, -1].copy(), dpsi_b=d_end,
        scale_exponent=scale,
    )


def free_exponential_basis(interval: Interval, lam: float, samples: int = 257) -> FundamentalPair:
    """Closed-form plane-wave basis exp(+-i k x), k = sqrt(2 lam), for eta=1, V=0.

    Validation path only: requires a trivial metric, vanishing potential and
    lam > 0.  The pair is complex valued.
    """
    eta, _, pot = _coefficients(interval)
    for x in np.linspace(interval.a, interval.b, 17):
        if abs(eta(x) - 1.0) > 1e-14 or abs(pot(x)) > 1e-14:
            raise ValueError("free_exponential_basis requires eta == 1 and V == 0")
    if lam <= 0.0:
        raise ValueError("free_exponential_basis requires lam > 0")
    k = math.sqrt(2.0 * lam)
    xs = np.linspace(interval.a, interval.b, samples)
    up = np.exp(1j * k * xs)
    um = np.exp(-1j * k * xs)
    values = np.vstack([up, um])
    ea, eb = np.exp(1j * k * interval.a), np.exp(1j * k * interval.b)
    return FundamentalPair(
        lam=lam, interval=interval, xs=xs, values=values,
        psi_a=np.array([ea, np.conj(ea)]),
        dpsi_a=np.array([1j * k * ea, -1j * k * np.conj(ea)]),
        psi_b=np.array([eb, np.conj(eb)]),
        dpsi_b=np.array([1j * k * eb, -1j * k * np.conj(eb)]),
        scale_exponent=0.0,
    )
