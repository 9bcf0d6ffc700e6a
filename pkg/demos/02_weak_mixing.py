"""
Convergence to a constant on the Bernoulli shift.

Weakly mixing slots wash everything out except the means: the limit is
mean(f) times the product of <A_i 1, 1>. This walks the m = 3, k = 2 config
with linear and with n^2 + n exponents.
"""

import json
from pathlib import Path

from entangled import cli

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

for name in ("weak_mixing_m3_k2", "polynomial_m3_k2"):
    raw = json.loads((CONFIGS / f"{name}.json").read_text())
    exp = cli.build_experiment(raw)
    res = cli.run_experiment(exp, Path("out") / name, raw)
    print(name)
    for N, d in zip(res.schedule, res.distances_sup):
        print(f"  N={N:>5}  sup distance to the constant {d:.4f}")
