"""Rauzy-Veech induction, Rauzy diagrams, and certified pseudo-Anosov
dilatation bounds on hyperelliptic-component translation surfaces.

The package keeps every load-bearing quantity exact: permutation tables and
loop matrices are integer objects, root enclosures are Sturm-certified
rational intervals, and the floating-point layer (mpmath) only carries
eigenvector data whose residuals are checked against stated tolerances.
"""

__version__ = "0.1.0"

from .errors import (
    BaseMismatchError,
    BoundaryError,
    CertificationFailed,
    CommutationError,
    DiagramTooLarge,
    EndpointMismatchError,
    GaussBonnetError,
    IllConditionedError,
    IrreducibleError,
    LoopBudgetExceeded,
    NegativeEntryError,
    NoRootAboveOne,
    OpenPathError,
    RauzyVeechError,
    RotationMismatchError,
    SelfIntersectionError,
    TieError,
)
from .iet import (
    GeneralizedPermutation,
    Iet,
    LabeledPermutation,
    Letter,
    ReducedPermutation,
    Renumbering,
    family_genperm_odd,
    family_pi,
    family_tau,
    find_renumbering,
)
from .diagrams import (
    CoveringMap,
    RauzyDiagram,
    build_diagram,
    classify_vertex,
    covering,
    detect_symmetric_vertex,
    verify_added_permutations,
    verify_rauzy_recursion,
)
from .exact_linalg import (
    IntMatrix,
    IntPolynomial,
    PerronRoot,
    companion_matrix,
    eigenvector,
    isolate_largest_real_root,
    permutation_matrix,
    perron_root,
    poly_reciprocal_check,
    transvection,
)
from .paths import (
    Loop,
    LoopMatrixReport,
    RauzyPath,
    check_structural_lemmas,
    enumerate_closed_loops,
    enumerate_primitive_loops,
    lift_path,
    path_matrix,
    systole_search,
)
from .suspensions import (
    PolygonSurface,
    PseudoAnosovCertificate,
    RotationClosureCertificate,
    StratumSignature,
    SuspensionDatum,
    build_polygon,
    renormalized_step,
    reversed_companion,
    rotation_closure_pa,
    spin_parity,
    stratum_signature,
    suspension_rauzy_step,
    teich_flow,
    validate_suspension,
    veech_pa_from_loop,
)
from .families import (
    BoundReport,
    FamilySpec,
    family_path,
    matrix_family,
    run_family_suite,
    target_polynomial,
    verify_bounds,
    verify_polynomial_identity,
)

__all__ = [name for name in dir() if not name.startswith("_")]
