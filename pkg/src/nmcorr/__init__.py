"""Correlation-based non-Markovianity measures for qubit channels."""
from ._backend import BACKEND
from .channels import (
    GadMap,
    GadParams,
    IdentityMap,
    KrausSet,
    SnapshotMap,
    apply_to_system,
    effective_time,
    gad_kraus,
    purify,
    validate_cptp,
)
from .correlations import (
    InfoBreakdown,
    concurrence,
    eof,
    info_breakdown_ae,
    measurement_oracle,
    mutual_information_sa,
)
from .errors import InconsistencyError, InvariantViolation, NmcorrError
from .nonmarkov import (
    MeasureResult,
    TimeGrid,
    Trajectory,
    check_factorization,
    n_e,
    n_i,
    positive_variation,
    trajectory,
)
from .qlinalg import (
    DensityMatrix,
    PureState,
    eig_hermitian,
    haar_random_pure_state,
    partial_trace,
    tensor,
    von_neumann_entropy,
)
from .states import bell_state, witness_state, spin_state

__version__ = "0.1.0"
