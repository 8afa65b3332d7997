"""POD-RBF trajectory surrogates for parametric ODE optimal-control problems.

Workflow: sample a parameter box, integrate the model at each sample to
build a snapshot matrix, compress with a truncated POD basis, interpolate
the modal amplitudes with an RBF network, then optimize (optionally with
bound refinement) against the cheap surrogate instead of the ODE solver.
"""

__version__ = "0.1.0"

from .bench import (PopulationDynamicsParams, SciencePolicyParams,
                    make_problem, nominal_start, population_dynamics,
                    science_policy)
from .errors import (ConfigurationError, DimensionMismatch, DuplicateCenters,
                     ExtrapolationWarning, IllConditionedGram, InvalidProblem,
                     NonFiniteObjective, NonFiniteState, NumericalError,
                     NumericalFailure, PodRbfError, SingularGram,
                     StepSizeUnderflow)
from .integrator import TimeGrid, Trajectory, evaluate_functionals, integrate, \
    quadrature
from .optimizer import (NlpSpec, OptimizerOptions, OptResult,
                        criterion_original, criterion_surrogate, minimize,
                        solve_problem)
from .pod import PodBasis, cumulative_energy, pod_basis, select_rank
from .problem import (Box, ControlParam, IntegralFunctional, ProblemDef,
                      TerminalFunctional, control_eval, control_trajectory)
from .refine import RefineConfig, RefineIteration, RefineResult, refine_optimize
from .rbf import (CUBIC, LINEAR, RbfCoefficients, fit_coefficients,
                  gram_matrix, kernel_eval, normalize_kernel)
from .sampling import SampleSet, lhs_sample, random_sample, sample, slhs_sample
from .snapshot import SnapshotMatrix, build_snapshots, stack, unstack
from .surrogate import (DesignEvaluation, ErrorReport, Surrogate,
                        error_report, evaluate_design, train)

__all__ = [
    "__version__",
    # problems
    "Box", "ControlParam", "IntegralFunctional", "TerminalFunctional",
    "ProblemDef", "control_eval", "control_trajectory",
    "make_problem", "nominal_start", "science_policy", "population_dynamics",
    "SciencePolicyParams", "PopulationDynamicsParams",
    # sampling / snapshots
    "SampleSet", "sample", "random_sample", "lhs_sample", "slhs_sample",
    "SnapshotMatrix", "build_snapshots", "stack", "unstack",
    # integration
    "TimeGrid", "Trajectory", "integrate", "quadrature", "evaluate_functionals",
    # reduction / interpolation / surrogate
    "PodBasis", "pod_basis", "select_rank", "cumulative_energy",
    "LINEAR", "CUBIC", "normalize_kernel", "kernel_eval", "gram_matrix",
    "fit_coefficients", "RbfCoefficients",
    "Surrogate", "train", "ErrorReport", "error_report", "DesignEvaluation",
    "evaluate_design",
    # optimization / refinement
    "NlpSpec", "OptResult", "OptimizerOptions", "minimize", "solve_problem",
    "criterion_original", "criterion_surrogate",
    "RefineConfig", "RefineIteration", "RefineResult", "refine_optimize",
    # errors
    "PodRbfError", "ConfigurationError", "NumericalError",
    "InvalidProblem", "DimensionMismatch", "DuplicateCenters",
    "StepSizeUnderflow", "NonFiniteState", "NumericalFailure", "SingularGram",
    "NonFiniteObjective", "IllConditionedGram", "ExtrapolationWarning",
]
