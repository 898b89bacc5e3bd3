"""Numerical geometry of vortex moduli on hyperelliptic Riemann surfaces.

Curves y^2 = F(x), divisor arithmetic with explicit principal divisors,
numerical period lattices, the Abel-Jacobi map with a linear-equivalence
oracle, the fixed locus of the hyperelliptic involution, the Bradlow-limit
fibre metric, and symmetric two-vortex scattering.
"""

__version__ = "0.1.0"

from .abeljacobi import (
    AbelJacobiMap,
    AJConfig,
    abel_jacobi,
    aj_equal,
    fibre_dim_lower_bound,
    linear_equivalence_oracle,
)
from .bradlowmetric import (
    GramMatrix,
    ModuliTangent,
    bradlow_check,
    fibre_metric,
    fubini_study,
    gauge_fixed_velocity,
    gram_direct,
    normalize_to_constraint,
    verify_fs,
)
from .curve import (
    ChartInfo,
    HyperellipticCurve,
    MobiusMap,
    SurfacePoint,
    Tolerances,
    curve_from_json,
    involution,
    local_chart,
    new_curve,
    normalize,
    sheet_continuation,
)
from .divisor import (
    Divisor,
    RationalExpr,
    canonical_divisor,
    divisor_of_rational,
    divisor_of_x,
    divisor_of_y,
    holomorphic_form_divisor,
    decide_label_equivalence,
    sigma_pushforward,
)
from .fixedlocus import (
    ComponentLabel,
    canonical_component_check,
    classify_fibres,
    component_dimension,
    enumerate_components,
    representative_divisor,
)
from .periods import (
    CycleBasis,
    DifferentialBasis,
    JacobianPoint,
    PeriodLattice,
    build_cycles,
    compute_periods,
    differential_basis,
    gram_from_periods,
    lattice_distance,
    reduce_mod_lattice,
    segment_integral,
)
from .scattering import (
    AngleReport,
    CollisionEvent,
    PairPath,
    Trajectory,
    centres,
    linear_preset,
    moebius_relation_check,
    scattering_angle,
    simulate,
)
