"""Three-phase distribution load flow with convergence certificates.

The package solves unbalanced three-phase load flow by the Z-bus
fixed-point iteration over wye/delta ZIP loads, and certifies convergence
by computing the radii of scaled infinity-norm balls around the no-load
voltage on which the iteration map is a contraction.
"""

from .assembly import (
    DEFAULT_SLACK_VOLTAGE,
    SystemMatrices,
    YBlocks,
    assemble_bus_admittance,
    assemble_system,
    compute_fixed_point_data,
)
from .certificate import (
    CertificateQuantities,
    CertificateResult,
    ConditionCoefficients,
    ConditionValues,
    certify,
    certify_system,
    compute_coefficients,
    compute_quantities,
    condition_values,
    conditions_hold,
    solve_region,
)
from .errors import (
    CertificateUndefinedError,
    IllPosedNetworkError,
    SchemaError,
    SingularLoadVoltageError,
    SingularMatrixError,
    ZBusError,
)
from .feeder import Feeder, emit_feeder, parse_feeder, parse_feeder_text
from .linalg import inf_norm_matrix, inf_norm_vector, invert, lu_solve
from .loads import (
    DeltaZip,
    IndexedLoads,
    WyeZip,
    ZipEntry,
    check_loads,
    delta_injection,
    delta_injection_parts,
    index_loads,
    load_admittance_matrix,
    network_injection,
    network_injection_parts,
    wye_injection,
    wye_injection_parts,
)
from .network import (
    PHASES,
    BranchSpec,
    DeltaPairing,
    IndexMap,
    NetworkModel,
    NodeSpec,
    build_index_map,
    delta_pairing,
    line_to_line_selector,
    right_shift,
)
from .reference import (
    ThreeNodeParams,
    TwoNodeParams,
    random_small_network,
    three_node,
    two_node,
    two_node_analytic_roots,
)
from .solver import (
    LambdaChoice,
    SolveConfig,
    SolveTrace,
    empirical_rate,
    fixed_point_residual,
    membership_in_ball,
    scaled_step,
    solve,
    zbus_step,
)

__version__ = "0.1.0"
