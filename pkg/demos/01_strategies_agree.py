"""
One average, four ways.

A three-slot chain on Z_5 with two index classes. The naive sum, the
prefix-cached evaluator and the literal permutation-matrix enumeration should
agree to rounding; the factorized path only applies once alpha is injective.
"""

import numpy as np

from entangled import ChainSpec, FiniteFunction, OperatorSpec, SystemDescriptor
from entangled import brute_force_average, entangled_average, norm

rng = np.random.default_rng(1)
q = 5
cyc = SystemDescriptor("finite_cyclic", q=q)
ops = tuple(OperatorSpec.from_matrix(rng.uniform(-1, 1, (q, q))) for _ in range(2))
f = FiniteFunction(rng.uniform(-1, 1, q))

for alpha in [(1, 2, 1), (1, 2, 3)]:
    chain = ChainSpec(alpha, (cyc,) * 3, ops, f)
    N = 12
    ref = brute_force_average(chain, N)
    print(f"alpha={alpha}  N={N}  reference={np.round(ref.values.real, 4)}")
    strategies = ["naive", "cached"]
    if len(set(alpha)) == len(alpha):
        strategies.append("factorized")
    for s in strategies:
        diff = norm(entangled_average(chain, N, s) - ref, 2)
        print(f"  {s:<10} L2 difference {diff:.1e}")
