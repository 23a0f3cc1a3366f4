"""Quantum Fisher information of entangled coherent states in a lossy
Mach-Zehnder interferometer, in closed form and from a Fock-space oracle."""

from .ecs import (
    EcsQfiBreakdown,
    EcsScenario,
    eigen_tilde,
    lossless_qfi,
    photon_moments,
    qfi_analytic,
    qfi_closed_form,
    variances_and_transition,
)
from .errors import *  # noqa: F401,F403
from .fock import (
    DenseOperator,
    FockSpace,
    FockVector,
    beam_splitter_coherent,
    build_rho12_direct,
    build_rho12_via_environment,
    coherent_ket,
    ecs_ket,
    number_operator,
    numeric_qfi_lossy,
    partial_trace,
)
from .limits import CrossingReport, PrecisionLimits, find_crossings, limits_for, sweep_qfi
from .qfi import (
    GeneratorStats,
    QfiResult,
    SpectralDecomposition,
    cramer_rao_bound,
    generator_stats,
    qfi_finite_difference,
    qfi_pure,
    qfi_unitary,
)
from .rank2 import (
    GeneralQubitDensity,
    NonorthogonalRank2,
    SpectralPair,
    eig_general_qubit,
    eig_nonorthogonal,
    eig_nonorthogonal_direct,
    orthogonalize,
)

__version__ = "0.1.0"
