"""Numerical laboratory for entangled multi-Cesaro ergodic averages."""

from .space import (
    BernoulliSamples,
    CylinderFunction,
    FiniteFunction,
    FourierFunction,
    FunctionRep,
    GridFunction,
    convert,
    distance,
    inner_product,
    mean,
    norm,
)
from .systems import SystemDescriptor, jgl_decompose, koopman_apply, reversible_rank, flow_apply
from .operators import OperatorSpec, apply_operator, probe_joint_bound, probe_twisted_compactness
from .engine import (
    AverageResult,
    ChainSpec,
    brute_force_average,
    entangled_average,
    entangled_average_abs,
    flow_entangled_average,
    run_schedule,
)
from .limits import (
    almost_periodic_weight,
    density_one_subsequence,
    is_class_N,
    mean_ergodic_projection,
    predicted_limit_projection_chain,
    predicted_limit_resonance,
    predicted_limit_weak_mixing,
    weighted_birkhoff_average,
)
from .oracle import Fixture, geometric_cesaro, regenerate_fixture

__version__ = "0.1.0"
