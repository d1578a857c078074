"""Entanglement witnesses built from GHZ projectors, with stabilizer, dense and ring backends."""
from .errors import (
    CapExceededError,
    DimensionError,
    ModelError,
    NoRootError,
    UnsupportedFrameError,
    WitnessError,
)
from .frames import ALIGNED, CliffordTag, LocalFrame
from .models import (
    ClusterShape,
    cluster_closed_form,
    cluster_limit_value,
    cluster_state,
    critical_beta,
    ghz_closed_form,
    ghz_critical_scaling,
    ghz_state,
)
from .optimize import OptimizerConfig, clifford_prescan, maximize_w_a, maximize_w_b
from .pauli import PauliString, XYString
from .states import (
    CorrelatorTable,
    DenseState,
    RingExcitationState,
    StabilizerThermalState,
    correlator,
    full_xy_table,
    singlet_fidelity,
)
from .witness import (
    StrataReport,
    WitnessCoefficients,
    lambda_from_table,
    separable_bound,
    strata,
    w_a_fixed_frame,
    w_b_fixed_frame,
)

__version__ = "0.1.0"


def __getattr__(name):
    # scikit-learn is slow to import; load the estimator only when asked for
    if name == "GHZWitness":
        from .estimator import GHZWitness

        return GHZWitness
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
