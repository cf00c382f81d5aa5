"""Winding indices of closed curves of unitary boundary conditions.

A closed loop theta -> U(theta) in U(2n) carries two integer invariants: the
winding number of its determinant around U(1), and the signed count of
eigenvalue crossings through -1 (each crossing changes the dimension of the
eigenspace at -1, the degeneracy that obstructs the Robin reduction).  The two
invariants coincide for every closed loop; both are computed here from a
continuous lifting of the eigenvalue angles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bc import UnitaryBC

__all__ = [
    "UnitaryCurve",
    "EigenangleFlow",
    "ResolutionError",
    "eigenangle_flow",
    "cayley_index",
    "det_winding",
]

_MAX_STEP = math.pi / 4


class ResolutionError(Exception):
    """Consecutive samples are too far apart for unambiguous eigenangle matching."""


@dataclass(frozen=True)
class UnitaryCurve:
    """Sampled closed path (theta_j, U_j) with theta from 0 to 2*pi and U_m = U_0."""

    thetas: np.ndarray
    matrices: tuple[np.ndarray, ...]

    def __init__(self, thetas, matrices):
        thetas = np.asarray(thetas, dtype=float)
        mats = tuple(np.asarray(m, dtype=complex) for m in matrices)
        if len(mats) != len(thetas):
            raise ValueError("one matrix per theta sample required")
        if len(mats) < 2:
            raise ValueError("a curve needs at least two samples")
        if abs(thetas[0]) > 1e-12 or abs(thetas[-1] - 2 * math.pi) > 1e-12:
            raise ValueError("theta must run from 0 to 2*pi")
        if np.any(np.diff(thetas) <= 0):
            raise ValueError("theta samples must be strictly increasing")
        if np.linalg.norm(mats[-1] - mats[0]) > 1e-10:
            raise ValueError("curve is not closed: U(2*pi) != U(0)")
        for m in mats:
            UnitaryBC(m)  # unitarity check
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "matrices", mats)

    @classmethod
    def from_function(cls, f, samples: int = 256) -> "UnitaryCurve":
        thetas = np.linspace(0.0, 2 * math.pi, samples + 1)
        return cls(thetas, [f(t) for t in thetas])

    @property
    def dim(self) -> int:
        return self.matrices[0].shape[0]


@dataclass(frozen=True)
class EigenangleFlow:
    """Continuously lifted eigenvalue angles; ``tracks`` has shape (samples, dim)."""

    thetas: np.ndarray
    tracks: np.ndarray

    @property
    def windings(self) -> np.ndarray:
        """Per-track winding numbers (track_k(2*pi) - track_k(0)) / (2*pi).

        Individually meaningful only when no crossing exchanged track
        identities; their sum always equals the determinant winding.
        """
        turns = (self.tracks[-1] - self.tracks[0]) / (2 * math.pi)
        return np.rint(turns).astype(int)


def eigenangle_flow(curve: UnitaryCurve) -> EigenangleFlow:
    """Lift the eigenvalue angles of the curve to continuous tracks.

    Consecutive samples are matched greedily by nearest angular distance on
    the circle; any matched step larger than pi/4 raises
    :class:`ResolutionError` (refine the sampling).
    """
    dim = curve.dim
    tracks = np.empty((len(curve.thetas), dim))
    prev = np.sort(np.angle(np.linalg.eigvals(curve.matrices[0])))
    tracks[0] = prev
    for j, mat in enumerate(curve.matrices[1:], start=1):
        angles = np.angle(np.linalg.eigvals(mat))
        lifted = _match_step(tracks[j - 1], angles)
        tracks[j] = lifted
    # Multiset closure: eigenvalue crossings may exchange track identities,
    # which leaves every index invariant, so only the unordered collection of
    # angles must return to its start modulo 2*pi.
    remaining = list(range(dim))
    for e in tracks[-1]:
        dists = [_circle_dist(e, tracks[0][r]) for r in remaining]
        pick = int(np.argmin(dists))
        if dists[pick] > 1e-6:
            raise ResolutionError("tracks fail to close up to multiples of 2*pi")
        remaining.pop(pick)
    return EigenangleFlow(thetas=curve.thetas, tracks=tracks)


def _match_step(prev: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Greedily assign new eigenangles to the previous lifted values."""
    dim = len(prev)
    remaining = list(range(dim))
    lifted = np.empty(dim)
    # visit previous tracks in order of their best available match quality
    order = sorted(range(dim), key=lambda i: _best_dist(prev[i], angles, remaining))
    for i in order:
        dists = [_circle_dist(prev[i], angles[r]) for r in remaining]
        pick = int(np.argmin(dists))
        step = dists[pick]
        if step > _MAX_STEP:
            raise ResolutionError(
                f"eigenangle step {step:.3f} exceeds pi/4; refine the curve sampling"
            )
        r = remaining.pop(pick)
        delta = _signed_circle_diff(angles[r], prev[i])
        lifted[i] = prev[i] + delta
    return lifted


def _circle_dist(a: float, b: float) -> float:
    d = abs(a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


def _signed_circle_diff(a: float, b: float) -> float:
    """Representative of a - b in (-pi, pi]."""
    d = (a - b) % (2 * math.pi)
    return d if d <= math.pi else d - 2 * math.pi


def _best_dist(p: float, angles: np.ndarray, remaining: list[int]) -> float:
    return min(_circle_dist(p, angles[r]) for r in remaining)


def cayley_index(curve: UnitaryCurve) -> int:
    """Signed count of eigenvalue crossings through -1 over one loop.

    Ascending (anticlockwise) crossings count +1, descending -1, using the
    lifted tracks so eigenvalue collisions away from -1 are harmless.  Raises
    on a sample sitting exactly at angle pi (perturb the theta grid).
    """
    flow = eigenangle_flow(curve)
    total = 0
    for k in range(flow.tracks.shape[1]):
        track = flow.tracks[:, k]
        if np.min(np.abs((track - math.pi) % (2 * math.pi))) < 1e-10:
            raise ResolutionError("an eigenvalue sits exactly at -1 on a sample")
        levels = np.floor((track - math.pi) / (2 * math.pi))
        total += int(levels[-1] - levels[0])
    return total


def det_winding(curve: UnitaryCurve) -> int:
    """Winding number of theta -> det U(theta), by accumulated argument.

    Per-step argument changes are taken in (-pi, pi]; a step of pi or more
    raises :class:`ResolutionError`.
    """
    dets = np.array([np.linalg.det(m) for m in curve.matrices])
    args = np.angle(dets)
    total = 0.0
    for j in range(len(dets) - 1):
        step = _signed_circle_diff(args[j + 1], args[j])
        if abs(step) >= math.pi - 1e-12:
            raise ResolutionError("determinant argument step >= pi; refine the sampling")
        total += step
    return int(round(total / (2 * math.pi)))
