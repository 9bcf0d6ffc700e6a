"""
Continuous time: torus flows averaged over [0, T]^k by the midpoint rule.

The step change column shows how much halving h moves the result; the last
column shows the injective chain settling near P_2 V P_1 f as T grows.
"""

from entangled import ChainSpec, FourierFunction, OperatorSpec, SystemDescriptor
from entangled import flow_entangled_average, norm, predicted_limit_projection_chain
from entangled.systems import GOLDEN_THETA

flow = lambda th: SystemDescriptor("torus_flow", theta=th)
g = FourierFunction.from_modes({0: 1.0, 1: 1, -1: 0.5j, 2: 0.25}, 4)
chain = ChainSpec((1, 2), (flow(GOLDEN_THETA), flow(2**0.5 - 1)), (OperatorSpec.volterra(1),), g,
                  continuous=True)
limit = predicted_limit_projection_chain(chain)
for T in (16.0, 256.0, 1024.0):
    a, b = (flow_entangled_average(chain, T, h) for h in (0.25, 0.125))
    print(f"T={T:>6}  step change {norm(a - b, 2):.2e}   distance to limit {norm(b - limit, 2):.2e}")
