"""nillab: an exact-arithmetic laboratory for Heisenberg skew products,
prime-pair joinings, and Mobius correlation experiments."""

from .fixedpoint import FixedPointInexact, FixedReal, parse_real, sqrt_q64
from .heisenberg import (
    HEISENBERG,
    GroupElement,
    GroupLaw,
    JoiningPair,
    LatticeElement,
    LawMismatch,
    NilPoint,
    canonical_rep,
    identity,
    inv,
    is_prime,
    joining_membership,
    lattice_floor,
    mul,
    nil_point,
    project_pi,
)
from .dynamics import (
    BaseFunctionSpec,
    JoiningSystem,
    PiecewiseLinearTable,
    SkewSystem,
    TrigTerm,
    build_joining,
    cocycle_Hn_prime,
    cocycle_sum,
    eval_h_lift,
    iterate_T,
    rho,
    star_point,
    step_T,
    step_Tstar_trivialized,
)
from .engine import OrbitSegmentPlan, orbit_stream, orbit_stream_naive
from .observables import (
    BumpProfile,
    JoiningObservable,
    Observable,
    eval_joining_observable,
    eval_observable,
    fiber_average,
)
from .moebius import (
    CorrelationReport,
    MobiusTable,
    bilinear_sum,
    bilinear_sum_reduced,
    correlation_sum,
    davenport_baseline,
    sieve_mobius,
)
from .diagnostics import (
    CoboundaryReport,
    ProofConstants,
    WeylReport,
    boundary_increment_Fn,
    coboundary_search,
    lipschitz_estimate,
    proof_constants,
    weyl_sums,
    winding_in_x,
)

__version__ = "0.1.0"
