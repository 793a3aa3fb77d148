"""
The complete structure
======================

At z1 = z2 = exp(i pi/3) the meridian and its partner are parabolic,
and X has integer entries (Y carries multiples of sqrt(3)).
"""
import numpy as np

from fig8rigidity import CBox, pso31_generators
from fig8rigidity.holonomy import J, lorentz_residual, psl2_generators
from fig8rigidity.shapes import OMEGA

w = CBox.from_complex(OMEGA, 1e-16)
pair = pso31_generators(w, w)

print("X:\n", pair.X.mid)
print("Y:\n", pair.Y.mid)
print("X encloses its integer rounding:", pair.X.contains(np.rint(pair.X.mid)))
print("Y / sqrt(3) on the sqrt(3) entries:", pair.Y.mid[1, 2:] / np.sqrt(3))
print("max width:", max(pair.X.width.max(), pair.Y.width.max()))

# X^T J X is a multiple of J
x = np.rint(pair.X.mid)
print("X^T J X / J:", np.diag(x.T @ J @ x) / np.diag(J))
print("Lorentz residual contains 0:", lorentz_residual(pair.X).contains_zero())

# the PSL(2,C) picture: both traces are +-2
a, b = psl2_generators(OMEGA, OMEGA)
print("traces:", np.trace(a), np.trace(b))

# unipotent: (X/8 - I)^3 vanishes
n = x / 8 - np.eye(4)
print("(X/8 - I)^3:\n", np.linalg.matrix_power(n, 3))
