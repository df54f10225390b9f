"""Entanglement entropy of the damped Dirac vacuum restricted to an interval.

Numerical-spectral library: momentum symbols, position-space kernels,
Nystrom discretization, Schatten-norm tooling, the entropy pipeline, and
damping-scale sweeps that verify the logarithmically enhanced area law
with slope (1/6)(kappa+1)/kappa.
"""

__version__ = "0.1.0"

from .asymptotics import (
    BoxSpec,
    DiagnosticsResult,
    MassIndependenceReport,
    SweepPoint,
    SweepResult,
    log_growth_diagnostic,
    mass_independence_check,
    matched_grid_entropy,
    offdiagonal_diagnostic,
    sweep,
)
from .dirac_symbols import (
    PhysicalParams,
    SymbolSplit,
    hamiltonian_symbol,
    limit_symbol,
    omega,
    regularized_symbol,
    rescaled_symbol,
    spectral_projection,
    split_symbol,
)
from .discretization import (
    DiscretizedOperator,
    Grid,
    GridRule,
    ScalarSymbol,
    assemble_offdiagonal_truncation,
    assemble_operator,
    build_grid,
    clear_spectrum_cache,
    constant_symbol,
    exp_abs_symbol,
    exp_omega_symbol,
    operator_eigenvalues,
)
from .entropy_pipeline import (
    ClampReport,
    EntropyResult,
    entanglement_entropy,
    entropy_from_eigenvalues,
    subtraction_trace,
    truncated_entropy_trace,
)
from .errors import (
    ConvergenceError,
    DiamondEntropyError,
    EstimationError,
    VacuousBoundError,
)
from .kernel_eval import (
    KernelValue,
    QuadratureSpec,
    default_quadrature_spec,
    kernel_massive_bessel,
    kernel_massless_closed,
    kernel_quadrature,
    kernel_value,
)
from .renyi_functions import (
    ConditionFParams,
    RenyiOrder,
    entropy_integral,
    eta,
    eta_derivatives,
    probe_condition_f,
    theoretical_slope,
)
from .schatten_toolkit import (
    SchattenReport,
    SingularSpectrum,
    check_szego_bound,
    schatten_norm,
    singular_values,
    verify_commutator_lemma,
    verify_inequalities,
)

__all__ = [name for name in dir() if not name.startswith("_")]
