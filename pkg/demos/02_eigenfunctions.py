"""Eigenfunctions of the Dirichlet interval: shape, orthonormality, and
admissibility of the boundary traces.

On [0, pi] with Dirichlet conditions the k-th eigenfunction is
sqrt(2/pi) * sin(k x) at lambda_k = k^2 / 2.
"""

import math

import numpy as np

from qwire import bc, spectral
from qwire.domain import Interval, QuantumDomain

dom = QuantumDomain([Interval(0.0, math.pi)])
U = bc.make_dirichlet(1)
spec = spectral.find_eigenvalues(U, dom, (0.1, 5.0))

print("lambda        multiplicity  residual")
for e in spec.eigs:
    print(f"{e.lam:<12.8f}  {e.multiplicity:<12d}  {e.residual:.2e}")

# Compare the ground state with sqrt(2/pi) sin(x) up to a phase.
ground = spec.eigs[0]
xs = ground.xs[0]
exact = math.sqrt(2.0 / math.pi) * np.sin(xs)
got = ground.samples[0][0]
phase = exact[len(xs) // 2] / got[len(xs) // 2]
err = np.max(np.abs(phase * got - exact))
print(f"\nground state vs sqrt(2/pi) sin(x): max deviation {err:.2e}")
assert err <= 1e-6

# Quadrature orthonormality of the first two modes (Simpson, weight sqrt(eta)).
h = xs[1] - xs[0]
w = np.full(xs.size, h / 3.0)
w[1:-1:2] *= 4.0
w[2:-1:2] *= 2.0
f1, f2 = spec.eigs[0].samples[0][0], spec.eigs[1].samples[0][0]
print(f"<psi1, psi1> = {np.sum(w * np.abs(f1) ** 2):.12f}")
print(f"<psi1, psi2> = {abs(np.sum(w * np.conj(f1) * f2)):.2e}")

# Boundary traces lie in the admissible subspace of U (here: psi = 0).
print(f"endpoint values: {np.max(np.abs(ground.psi)):.2e} (Dirichlet trace)")
assert np.max(np.abs(ground.psi)) <= 1e-8
print("eigenfunction checks passed")
