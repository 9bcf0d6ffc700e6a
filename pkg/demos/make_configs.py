"""
Write the experiment configs under configs/ that the acceptance suite and the
README walk through. Seeds are fixed, so rerunning reproduces the files byte for byte.

    python3 demos/make_configs.py [outdir]
"""

import json
import sys
from pathlib import Path

import numpy as np

from entangled import ChainSpec, CylinderFunction, FiniteFunction, FourierFunction, OperatorSpec, SystemDescriptor
from entangled.config import chain_to_dict, operator_to_dict, system_to_dict
from entangled.space import to_dict
from entangled.systems import GOLDEN_THETA

BERN = SystemDescriptor("bernoulli_shift")
ROT = SystemDescriptor("rotation", theta=GOLDEN_THETA)
DOUBLING = SystemDescriptor("doubling")
V1 = OperatorSpec.volterra(1)

# (alpha, tag): m = 2, 3 and k = 1, 2
BERNOULLI_ALPHAS = [((1, 1), "m2_k1"), ((1, 2), "m2_k2"), ((1, 1, 1), "m3_k1"), ((1, 2, 1), "m3_k2")]


def bernoulli_chain(alpha, polynomial=False):
    """Rank-one cylinder operators with tables in [0.5, 1.5]; f has mean 2."""
    k = max(alpha)
    rng = np.random.default_rng(100 + len(alpha) + k)
    ops = []
    for _ in range(len(alpha) - 1):
        u = CylinderFunction(0, 1, rng.uniform(0.5, 1.5, 4))
        v = CylinderFunction(0, 1, rng.uniform(0.5, 1.5, 4))
        ops.append(OperatorSpec.finite_rank([(u, v)]))
    table = rng.uniform(1, 3, 8)
    f = CylinderFunction(0, 2, table - table.mean() + 2)
    polys = [(0, 1, 1)] * k if polynomial else None   # q(n) = n + n^2
    return ChainSpec(alpha, (BERN,) * len(alpha), tuple(ops), f, exponent_polys=polys)


def rotation_f(K=32, seed=44):
    rng = np.random.default_rng(seed)
    j = np.arange(-K, K + 1)
    c = (rng.normal(size=j.size) + 1j * rng.normal(size=j.size)) / np.sqrt(2)
    return FourierFunction(c * np.exp(-0.1 * np.abs(j)))


def flow_chain():
    flow = lambda th: SystemDescriptor("torus_flow", theta=th)
    g = FourierFunction.from_modes({0: 1.0, 1: 1, -1: 0.5j, 2: 0.25, -3: 0.3}, 4)
    return ChainSpec((1, 2), (flow(GOLDEN_THETA), flow(2**0.5 - 1)), (V1,), g, continuous=True)


def experiments():
    out = {}
    for polynomial, prefix in ((False, "weak_mixing"), (True, "polynomial")):
        for alpha, tag in BERNOULLI_ALPHAS:
            out[f"{prefix}_{tag}"] = {
                "chain": chain_to_dict(bernoulli_chain(alpha, polynomial)),
                "schedule": {"start": 64, "ratio": 4, "count": 4},
                "predictor": "weak_mixing",
                "strategy": "lowrank",
                "samples": {"count": 64, "seed": 7},
                "checks": {"max_final_sup": 0.05, "nonincreasing_sup": True},
            }
    f = rotation_f()
    for alpha, strategy, tag in (((1, 1), "cached", "k1"), ((1, 2), "factorized", "k2")):
        out[f"discrete_spectrum_{tag}"] = {
            "chain": chain_to_dict(ChainSpec(alpha, (ROT, ROT), (V1,), f)),
            "schedule": {"start": 256, "ratio": 4, "count": 4},
            "predictor": "resonance",
            "strategy": strategy,
            "samples": {"count": 64, "seed": 3},
            "checks": {"max_final_l2": 1e-2, "nonincreasing_l2": 3},
        }
    out["stable_part"] = {
        "chain": chain_to_dict(ChainSpec((1, 1), (DOUBLING, DOUBLING), (V1,), FourierFunction.basis(1, 64))),
        "schedule": {"start": 64, "ratio": 4, "count": 4},
        "predictor": "zero",
        "strategy": "cached",
        "abs_mode": True,
        "resolution": 64,
        "checks": {"max_final_sup": 0.05, "decreasing_sup": True},
    }
    out["flow"] = {
        "chain": chain_to_dict(flow_chain()),
        "schedule": {"start": 16, "ratio": 4, "count": 4},
        "predictor": "projection_chain",
        "strategy": "factorized",
        "flow_step": 0.125,
        "samples": {"count": 64, "seed": 5},
        "checks": {"max_final_l2": 1e-2},
    }
    q2 = SystemDescriptor("finite_cyclic", q=2)
    out["t2_identity"] = {
        "chain": chain_to_dict(ChainSpec((1, 1), (q2, q2), (OperatorSpec.identity(),),
                                         FiniteFunction([1, -1]))),
        "schedule": [1, 2, 3, 4, 5],
        "predictor": "resonance",
        "samples": {"points": [0, 1]},
        "checks": {"max_final_sup": 1e-12},
    }
    return out


def probes():
    K = 256
    fs = [FourierFunction.basis(1, K), FourierFunction.from_modes({1: 1, 3: 1}, K)]
    return {
        f"probe_volterra_d{d}": {
            "operator": operator_to_dict(OperatorSpec.volterra(d)),
            "system": system_to_dict(DOUBLING),
            "functions": [to_dict(f) for f in fs],
            "dims": [1, 2, 4, 8, 16],
            "n_max": 64,
            "checks": {"max_residual": 0.1, "max_joint_bound": 4},
        }
        for d in (1, 2)
    }


def misc():
    return {
        "decompose_doubling": {
            "system": system_to_dict(DOUBLING),
            "f": {"rep": "fourier", "K": 4, "modes": {"0": [3, 0], "2": [1, 0]}},
        },
        "weights_resonant_pair": {
            "weight": {"terms": [{"angle": 0.25, "q": [1, 0]}, {"angle": -0.25, "q": [1, 0]}]},
            "N_max": 4096,
            "tol": 0.05,
            "expect_class_N": False,
        },
    }


def main(outdir="configs"):
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    for group in (experiments(), probes(), misc()):
        for name, data in group.items():
            (out / f"{name}.json").write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")
            print(out / f"{name}.json")


if __name__ == "__main__":
    main(*sys.argv[1:])
