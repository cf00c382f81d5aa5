"""Edge-state scan for rotated boundary-condition families U_t = exp(i t) U.

Starting from a boundary condition with eigenvalue -1 (e.g. Dirichlet), the
rotated family develops a negative ground-state level for small t > 0 whose
eigenfunction concentrates near the boundary and whose energy diverges like
-cot(t/2)**2 / 2 as t drops to 0.  ``edge_scan`` tracks the lowest eigenvalue
and the boundary-collar probability mass along a descending list of t values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bc import UnitaryBC, cayley_degeneracy
from .domain import QuantumDomain
from .spectral import Eigenpair, SolveOptions, find_eigenvalues, _quad_weights

__all__ = ["EdgeScan", "rotate_bc", "edge_scan"]


@dataclass(frozen=True)
class EdgeScan:
    base: UnitaryBC
    t_values: tuple[float, ...]
    lam_min: tuple[float, ...]
    ground_states: tuple[Eigenpair, ...]
    collar_mass: tuple[float, ...]
    all_negative: bool
    monotone_decreasing: bool


def rotate_bc(U: UnitaryBC, t: float) -> UnitaryBC:
    """Phase rotation exp(i t) U of a boundary condition."""
    return UnitaryBC(np.exp(1j * t) * U.matrix)


def _refine_ground(Ut: UnitaryBC, domain: QuantumDomain, ground: Eigenpair,
                   step: float, opts: SolveOptions) -> Eigenpair:
    """Zoom around a found ground level to resolve near-degenerate twins.

    Small-t edge problems carry symmetric/antisymmetric level pairs split by
    an exponentially small tunnelling gap; a coarse scan can land on the upper
    member.  Rescanning a shrinking window around the current candidate keeps
    the lowest root until the window is below the target resolution.
    """
    zoom = SolveOptions(grid=500, sigma_tol=opts.sigma_tol,
                        rel_tol=opts.rel_tol, samples=opts.samples)
    while step > 2.5e-8 * max(1.0, abs(ground.lam)):
        window = 2.5 * step
        spectrum = find_eigenvalues(
            Ut, domain, (ground.lam - window, ground.lam + window), zoom)
        if spectrum.eigs:
            ground = spectrum.eigs[0]
        step = 2.0 * window / zoom.grid
    return ground


def collar_fraction(domain: QuantumDomain, pair: Eigenpair, collar: float = 0.1) -> float:
    """Probability mass of the ground state within the boundary collar.

    The collar is the union of the outer ``collar`` fraction of each interval
    at both ends; mass is computed with the same Simpson quadrature used for
    normalization.
    """
    w = _quad_weights(domain, pair.xs)
    f = pair.samples[0]
    total = 0.0
    inside = 0.0
    for k, iv in enumerate(domain.intervals):
        width = collar * (iv.b - iv.a)
        mask = (pair.xs[k] <= iv.a + width) | (pair.xs[k] >= iv.b - width)
        dens = w[k] * np.abs(f[k]) ** 2
        total += float(np.sum(dens))
        inside += float(np.sum(dens[mask]))
    return inside / total


def edge_scan(U: UnitaryBC, domain: QuantumDomain, t_list,
              search_floor: float | None = None,
              opts: SolveOptions = SolveOptions(),
              lam_cap: float = 0.5) -> EdgeScan:
    """Track the lowest eigenvalue of exp(i t) U along descending t.

    Requires the base U to touch the Cayley subspace C- (eigenvalue -1) and
    all t in (0, pi/2).  For each t the eigenvalue search runs on
    (search_floor, lam_cap); the default floor -10 * cot(t_min / 2)**2 sits
    safely below the asymptotic ground level -cot(t/2)**2 / 2.
    """
    t_list = [float(t) for t in t_list]
    if cayley_degeneracy(U, -1) < 1:
        raise ValueError("base boundary condition has no eigenvalue -1")
    if any(not 0.0 < t <= math.pi / 2 for t in t_list):
        raise ValueError("t values must lie in (0, pi/2]")
    if sorted(t_list, reverse=True) != t_list:
        raise ValueError("t values must be given in descending order")

    lam_min, grounds, collar = [], [], []
    for t in t_list:
        # default floor -10 cot(t/2)^2, an order of magnitude below the
        # asymptotic ground level -cot(t/2)^2 / 2 of this t
        floor = search_floor if search_floor is not None \
            else -10.0 / math.tan(t / 2.0) ** 2
        spectrum = find_eigenvalues(rotate_bc(U, t), domain, (floor, lam_cap), opts)
        if not spectrum.eigs:
            raise RuntimeError(f"no eigenvalue found in ({floor}, {lam_cap}) at t={t}")
        ground = spectrum.eigs[0]
        if ground.lam <= floor + 0.01 * (lam_cap - floor):
            raise RuntimeError(f"ground level at t={t} sits at the search floor; lower it")
        ground = _refine_ground(rotate_bc(U, t), domain, ground,
                                (lam_cap - floor) / opts.grid, opts)
        lam_min.append(ground.lam)
        grounds.append(ground)
        collar.append(collar_fraction(domain, ground))

    return EdgeScan(
        base=U, t_values=tuple(t_list), lam_min=tuple(lam_min),
        ground_states=tuple(grounds), collar_mass=tuple(collar),
        all_negative=all(l < 0.0 for l in lam_min),
        monotone_decreasing=all(b < a for a, b in zip(lam_min, lam_min[1:])),
    )
