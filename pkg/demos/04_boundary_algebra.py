"""Boundary-condition algebra: Cayley transforms, admissible subspaces,
and the degeneracy/singularity dictionary.

Every self-adjoint realization corresponds to a unitary U on the 2n
boundary data (psi - i dpsi) = U (psi + i dpsi).  When -1 is not an
eigenvalue of U this is a Robin condition dpsi = A psi with the
self-adjoint Cayley transform A = i (I - U)(I + U)^{-1}.
"""

import numpy as np

from qwire import bc

rng = np.random.default_rng(7)

# Round trip U -> A -> U for a random U(4) boundary condition.
U = bc.random_unitary(4, rng)
A = bc.unitary_to_cayley(U)
back = bc.cayley_to_unitary(A)
print(f"Cayley round-trip residual: {np.max(np.abs(back.matrix - U.matrix)):.2e}")
print(f"A self-adjoint: {np.max(np.abs(A.matrix - A.matrix.conj().T)):.2e}")

# Dirichlet (U = -I) has no Cayley transform.
try:
    bc.unitary_to_cayley(bc.make_dirichlet(2))
except bc.CayleySingular as err:
    print(f"Dirichlet is Cayley-singular, as expected: {err}")

# Degeneracy of eigenvalue -1 == dimension of the forced-Dirichlet part.
phases = np.exp(1j * np.array([np.pi, np.pi, 0.0, 1.2]))
Q = bc.random_unitary(4, rng).matrix
mixed = bc.UnitaryBC(Q @ np.diag(phases) @ Q.conj().T)
print(f"deg(-1) of the constructed U: {bc.cayley_degeneracy(mixed, -1)} (expect 2)")

# The admissible subspace is Lagrangian: dimension 2n, isotropic for the
# boundary form Im<psi, dpsi>.
basis = bc.admissible_subspace(U)
print(f"admissible subspace: dim {basis.shape[1]}, "
      f"isotropy residual {bc.isotropy_residual(U):.2e}")
assert basis.shape[1] == 4 and bc.isotropy_residual(U) <= 1e-12
print("boundary algebra checks passed")
