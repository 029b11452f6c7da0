"""Minimal idempotents of power-bounded matrices and the structure around them.

The closure of the power orbit {T^n} of a power-bounded matrix is a compact
semigroup with a unique minimal idempotent P.  This package computes P two
independent ways, splits the space into the reversible part im P and the
stable part ker P, verifies the properties of that splitting, and supplies
the positive-matrix, finite-semigroup and finite-sums companions.
"""
__version__ = "0.1.0"

from .engine import (  # noqa: E402
    ProjectionMatrix,
    RevInverse,
    SemigroupApprox,
    inverse_on_rev,
    minimal_idempotent_dynamical,
    minimal_idempotent_spectral,
    orbit_closure,
)
from .errors import *  # noqa: E402,F401,F403
from .ip import IPWitness, find_fs_sequence, finite_sums, return_time_set, verify_ip_recurrence  # noqa: E402
from .jdlg import Decomposition, decompose, verify_all  # noqa: E402
from .lattice import (  # noqa: E402
    CompositionOperator,
    ConeOrder,
    check_cyclicity,
    frobenius_oracle,
    peripheral_spectrum,
)
from .linalg import OperatorMatrix, eigen_decompose, invariant_split, is_power_bounded, spectrum  # noqa: E402
from .report import CheckReport  # noqa: E402
from .semigroup import FiniteSemigroup, generate  # noqa: E402
