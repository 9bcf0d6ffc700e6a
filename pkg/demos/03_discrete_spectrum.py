"""
Rotations: only resonant eigen-tuples survive.

First the smallest example, T^2 = id on two points, where (1, -1) resonates
with itself. Then the golden rotation with a Volterra operator in the middle,
where the average approaches the resonance sum like 1/N.
"""

import numpy as np

from entangled import ChainSpec, FiniteFunction, FourierFunction, OperatorSpec, SystemDescriptor
from entangled import entangled_average, norm, predicted_limit_resonance
from entangled.systems import GOLDEN_THETA

q2 = SystemDescriptor("finite_cyclic", q=2)
chain = ChainSpec((1, 1), (q2, q2), (OperatorSpec.identity(),), FiniteFunction([1, -1]))
print("T^2 = id limit:", predicted_limit_resonance(chain).values.real)
for N in (1, 2, 3):
    print(f"  N={N} average", entangled_average(chain, N).values.real)

rot = SystemDescriptor("rotation", theta=GOLDEN_THETA)
f = FourierFunction.from_modes({0: 1, 1: 0.5, -2: 0.25j, 3: 0.1}, 16)
chain = ChainSpec((1, 1), (rot, rot), (OperatorSpec.volterra(1),), f)
limit = predicted_limit_resonance(chain)
print("golden rotation, alpha = (1, 1)")
for N in (2**6, 2**8, 2**10, 2**12):
    d = norm(entangled_average(chain, N, "cached") - limit, 2)
    print(f"  N={N:>5}  L2 distance {d:.2e}   N * distance {N * d:.3f}")
