"""
The doubling map: a one-dimensional reversible part, and everything else decays.

Decompose a trigonometric polynomial, then watch the absolute entangled average
of the stable piece shrink. Last, the twisted-compactness probe for Volterra:
orbits V T^n e_1 vanish once 2^n passes the cutoff, so a handful of directions
captures the whole orbit.
"""

import numpy as np

from entangled import ChainSpec, FourierFunction, OperatorSpec, SystemDescriptor
from entangled import entangled_average_abs, jgl_decompose, norm, probe_twisted_compactness

doubling = SystemDescriptor("doubling")
f = FourierFunction.from_modes({0: 3, 2: 1, -5: 0.5}, 8)
f_r, f_s = jgl_decompose(doubling, f)
print(f"|f_r| = {norm(f_r, 2):.3f}   |f_s| = {norm(f_s, 2):.3f}")

e1 = FourierFunction.basis(1, 64)
chain = ChainSpec((1, 1), (doubling, doubling), (OperatorSpec.volterra(1),), e1)
for N in (64, 256, 1024):
    g = entangled_average_abs(chain, N, resolution=64, strategy="cached")
    print(f"  N={N:>4}  sup of the absolute average {np.max(np.abs(g.values)):.2e}")

for dim in (1, 2, 4, 8):
    rep = probe_twisted_compactness(OperatorSpec.volterra(1), doubling, e1, dim, n_max=32)
    print(f"  probe dim={dim}  residual {rep.max_residual_sup:.2e}")
