"""Cross-validation: the shooting/spectral-matrix solver against an
independent finite-difference discretization with Richardson error bars,
for a random U(2) boundary condition and a harmonic potential.
"""

import numpy as np

from qwire import bc, oracle, spectral
from qwire.domain import Interval, QuantumDomain

rng = np.random.default_rng(5)
U = bc.random_unitary(2, rng)
while bc.cayley_degeneracy(U, -1) > 0:
    U = bc.random_unitary(2, rng)

dom = QuantumDomain([Interval(0.0, 6.283185307179586, potential="x^2/2")])

fd, est = oracle.fd_spectrum(U, dom, N=1200, k=4)
spec = spectral.find_eigenvalues(U, dom, (fd[0] - 0.5, fd[-1] + 0.3),
                                 spectral.SolveOptions(max_eigs=4, rel_tol=1e-9))
flat = [lam for lam, _, _ in spec.flat()][:4]

print("spectral          fd (Richardson)    estimate    |diff|")
for lam_s, lam_f, e in zip(flat, fd, est):
    d = abs(lam_s - lam_f)
    print(f"{lam_s:< 16.10f}  {lam_f:< 16.10f}  {e:.2e}  {d:.2e}")
    assert d <= e, "solvers disagree beyond the Richardson estimate"
print("both solvers agree within the finite-difference error bars")
