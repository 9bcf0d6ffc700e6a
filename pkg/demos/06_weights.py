"""
Weights: class N, almost periodic sequences, and the weighted dichotomy.
"""

import numpy as np

from entangled import FourierFunction, SystemDescriptor, almost_periodic_weight
from entangled import density_one_subsequence, is_class_N, norm, weighted_birkhoff_average
from entangled.systems import GOLDEN_THETA

n = np.arange(1, 4097)
squares = (np.round(np.sqrt(n)) ** 2 == n).astype(float)
res = is_class_N(squares, 4096, 0.05)
print("indicator of squares in class N:", bool(res), " curve tail", np.round(res.curve[-3:], 4))
print("density of the non-squares:", np.round(density_one_subsequence(squares, 0.5).density[-3:], 4))

rot = SystemDescriptor("rotation", theta=GOLDEN_THETA)
h = FourierFunction.basis(1, 2)
for label, gamma in (("resonant", np.exp(-2j * np.pi * GOLDEN_THETA)), ("plain", 1.0)):
    w = almost_periodic_weight([(gamma, 1)])
    out = weighted_birkhoff_average(rot, w, h, 4096)
    print(f"{label:>9} weight: |average of e_1| = {norm(out, 2):.4f}")
