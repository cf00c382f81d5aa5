"""Independent finite-difference oracle for cross-validating the spectral solver.

The operator H = -(1/(2*sqrt(eta))) d/dx (eta**-0.5 d/dx) + V is discretized
through its quadratic form

    Q(u) = (1/2) sum p_{i+1/2} |u_{i+1} - u_i|**2 / h
         + sum V_i sqrt(eta_i) |u_i|**2 h            (trapezoid)
         - (1/2) psi^H A psi                          (Robin boundary term)

with p = eta**-0.5 and the mass matrix diag(sqrt(eta_i) h) (halved at the
ends), so the discrete problem is exactly Hermitian and second-order accurate.
Dirichlet conditions are imposed by eliminating the boundary nodes; any other
boundary condition must admit the Robin form dpsi = A psi (no eigenvalue -1).
Eigenvalues are Richardson-extrapolated from resolutions N and 2N, with the
extrapolation step |lam_N - lam_2N| / 3 reported as the error estimate.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.linalg
import scipy.optimize

from . import expr
from .bc import CayleySingular, UnitaryBC, cayley_degeneracy, unitary_to_cayley
from .domain import QuantumDomain

__all__ = ["fd_spectrum", "robin_edge_groundstate"]


def _assemble(U: UnitaryBC, domain: QuantumDomain, N: int):
    """Hermitian stiffness H and diagonal mass m for one resolution N."""
    n = domain.n
    sizes = [N + 1] * n
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    dim = offsets[-1]
    H = np.zeros((dim, dim), dtype=complex)
    mass = np.zeros(dim)

    for k, iv in enumerate(domain.intervals):
        o = offsets[k]
        xs = np.linspace(iv.a, iv.b, N + 1)
        h = (iv.b - iv.a) / N
        eta = np.array([expr.evaluate(iv.metric, x) for x in xs])
        pot = np.array([expr.evaluate(iv.potential, x) for x in xs])
        mids = 0.5 * (xs[:-1] + xs[1:])
        p_mid = np.array([expr.evaluate(iv.metric, x) for x in mids]) ** -0.5

        w = np.full(N + 1, h)
        w[0] = w[-1] = 0.5 * h
        mass[o:o + N + 1] = np.sqrt(eta) * w
        diag = np.zeros(N + 1)
        diag[:-1] += 0.5 * p_mid / h
        diag[1:] += 0.5 * p_mid / h
        idx = np.arange(o, o + N + 1)
        H[idx, idx] += diag + pot * np.sqrt(eta) * w
        H[idx[:-1], idx[1:]] += -0.5 * p_mid / h
        H[idx[1:], idx[:-1]] += -0.5 * p_mid / h

    # boundary degrees of freedom in (left endpoints; right endpoints) order
    bdofs = [offsets[k] for k in range(n)] + [offsets[k] + N for k in range(n)]
    return H, mass, bdofs


def fd_spectrum(U: UnitaryBC, domain: QuantumDomain, N: int = 600, k: int = 8,
                extrapolate: bool = True):
    """The k lowest eigenvalues of H_U by finite differences.

    Returns ``(lams, estimates)``: Richardson-extrapolated eigenvalues from
    resolutions N and 2N plus per-eigenvalue error estimates.  With
    ``extrapolate=False`` the raw resolution-N eigenvalues are returned with
    ``estimates=None`` (useful for convergence-order studies).  Requires
    200 <= N <= 4000 and either a pure Dirichlet U or one with no
    eigenvalue -1.
    """
    if not 200 <= N <= 4000:
        raise ValueError("N must lie in [200, 4000]")
    if U.matrix.shape[0] != 2 * domain.n:
        raise ValueError("boundary condition size does not match the domain")

    deg = cayley_degeneracy(U, -1)
    dirichlet = np.linalg.norm(U.matrix + np.eye(2 * domain.n)) <= 1e-10
    if deg > 0 and not dirichlet:
        raise CayleySingular(
            "finite-difference oracle supports Dirichlet or Robin-reducible "
            "boundary conditions only"
        )
    A = None if dirichlet else unitary_to_cayley(U).matrix

    def solve(res: int) -> np.ndarray:
        H, mass, bdofs = _assemble(U, domain, res)
        if dirichlet:
            keep = np.setdiff1d(np.arange(H.shape[0]), bdofs)
            H = H[np.ix_(keep, keep)]
            mass = mass[keep]
        else:
            bd = np.asarray(bdofs)
            H[np.ix_(bd, bd)] -= 0.5 * A
        d = 1.0 / np.sqrt(mass)
        Hs = d[:, np.newaxis] * H * d[np.newaxis, :]
        vals = scipy.linalg.eigh(Hs, eigvals_only=True, subset_by_index=(0, k - 1))
        return vals

    if not extrapolate:
        return solve(N), None
    lam_1 = solve(N)
    lam_2 = solve(2 * N)
    lams = (4.0 * lam_2 - lam_1) / 3.0
    estimates = np.abs(lam_1 - lam_2) / 3.0
    return lams, estimates


def robin_edge_groundstate(L: float, kappa: float) -> float:
    """Ground level of the free interval of length L with dpsi = kappa * psi.

    The symmetric bound state cosh(c(x - mid)) satisfies
    c * tanh(c L / 2) = kappa; the level is -c**2 / 2.  Requires
    kappa * L > 2 so the transcendental root is bracketed by (kappa, 2 kappa).
    """
    if L <= 0.0 or kappa <= 0.0:
        raise ValueError("L and kappa must be positive")
    if kappa * L <= 2.0:
        raise ValueError("robin_edge_groundstate requires kappa * L > 2")

    def f(c: float) -> float:
        return c * math.tanh(0.5 * c * L) - kappa

    c = scipy.optimize.brentq(f, kappa, 2.0 * kappa, xtol=1e-12)
    return -0.5 * c * c
