"""Circular planar electrical networks: forward problems, recoverability,
layer-stripping recovery, equivalent transforms, and the electrical
linear group toolkit."""

from .conductance import Linear, PwlOdd, eval_conductance, eval_inverse
from .network import BoundaryData, Edge, Network, trace_faces, validate_network
from .medial import (
    MedialGraph,
    build_medial,
    check_critical,
    check_semicritical,
    find_boundary_features,
    network_from_medial,
    remove_digon,
    uncross,
)
from .cells import (
    build_recovery_sets,
    closure,
    convex_closure,
    dist,
    dist_sep,
    is_convex,
    is_safe,
    propagate,
    rank,
)
from .forward import (
    BoundaryOracle,
    boundary_currents,
    make_oracle,
    response_matrix,
    solve_dirichlet,
    solve_neumann,
)
from .recovery import RecoveryResult, recover_apex, recover_network, wrap_uncrossed_oracle
from .transforms import (
    delta_wye,
    k4_to_planar,
    medial_equivalent,
    parallel_reduce,
    planar_to_k4,
    series_reduce,
    star_mesh_4,
    wye_delta,
)

__version__ = "0.1.0"
