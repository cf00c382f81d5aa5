"""Index of a closed curve of unitaries, two ways: by tracking eigenangle
crossings through -1 (Cayley index) and by the winding number of the
determinant.  The two always agree for well-sampled loops.
"""

import numpy as np

from qwire import curves

rng = np.random.default_rng(11)
Q = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))[0]


def loop(theta):
    # Eigenphases wind 2, -1, 1, 0 times; total winding 2.
    phases = np.exp(1j * np.array([2 * theta + 0.3,
                                   -theta + 0.7,
                                   theta + 1.1,
                                   0.4]))
    return Q @ np.diag(phases) @ Q.conj().T


curve = curves.UnitaryCurve.from_function(loop, samples=320)
flow = curves.eigenangle_flow(curve)
print(f"per-track windings: {flow.windings.tolist()}")
print(f"cayley_index  = {curves.cayley_index(curve)}")
print(f"det_winding   = {curves.det_winding(curve)}")
assert curves.cayley_index(curve) == curves.det_winding(curve) == 2

# Undersampling is detected, not silently wrong.
coarse = curves.UnitaryCurve.from_function(loop, samples=6)
try:
    curves.cayley_index(coarse)
except curves.ResolutionError as err:
    print(f"coarse curve rejected: {err}")
print("curve index checks passed")
