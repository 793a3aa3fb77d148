"""
Certifying the (2,3) filling step by step
=========================================

Shapes, holonomy, the cocycle and the slope enclosure for one slope.
"""
import numpy as np

from fig8rigidity import DehnSlope, approximate_shapes, certify_shapes, run_pipeline
from fig8rigidity.holonomy import Holonomy
from fig8rigidity.fox import WORD_W, WORD_L

np.set_printoptions(precision=6, suppress=True, linewidth=110)

slope = DehnSlope(2, 3)

# floating-point shapes from the continuation oracle (not trusted)
z1, z2 = approximate_shapes(slope)
print("approximate shapes:", z1, z2)

# Krawczyk turns them into verified boxes
cert = certify_shapes(slope, (z1, z2), 1e-15)
print("verified:", cert.verified)
print("z1 box:", cert.z1)
print("z2 box:", cert.z2)

# 9x9 adjoint matrices, tight enclosures around the exact center
hol = Holonomy(cert.z1, cert.z2)
adx = hol.AdX
print("Ad(x) midpoint:\n", adx.mid)
print("largest Ad(x) width:", adx.width.max())

# the relator acts trivially and the longitude commutes with the meridian
print("Ad(w) contains I:", hol.ad(WORD_W).contains(np.eye(9)))
adl = hol.ad(WORD_L)
print("[Ad(l), Ad(x)] contains 0:", (adl @ adx - adx @ adl).contains_zero())

record, frame = run_pipeline(slope, cert)
print("a_u:", frame.a_u.mid)
print("m:  ", frame.m.mid)
print("z_u(l):", frame.zul.mid)
print("b1 =", record.b1, " b2 =", record.b2)
print("slope enclosure:", record.s_u, " width", record.s_u.width)
print("-q/p =", record.ratio)
