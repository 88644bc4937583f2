"""Simulation toolkit for zeros of Gaussian random polynomial ensembles.

The package builds orthonormal polynomial bases for several classical and
lattice-polytope ensembles, computes expected zero densities from the
diagonal of the associated kernel, samples zero sets with certified
polynomial solvers, pairs the resulting zero currents with smooth test
functions, and runs Monte-Carlo experiments checking expectation formulas,
variance decay rates, and almost-sure equidistribution against closed-form
reference measures.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError,
    GramSingularError,
    NumericalError,
    SolverError,
    ZcsimError,
)
from .measures import QuadratureMeasure, build_measure, integrate  # noqa: E402
from .ensemble import (  # noqa: E402
    EnsembleSpec,
    GaussianSample,
    PolynomialBasis,
    build_ensemble,
    gram_matrix,
    gram_residual,
    orthonormalize,
    parse_spec,
    sample,
)
from .rootfind import (  # noqa: E402
    ZeroSet,
    roots_bivariate,
    roots_univariate,
    zeros_of_pair,
    zeros_of_sample,
)
from .szego import (  # noqa: E402
    ComplexGrid,
    ExpectedZeroDensity,
    SzegoKernelGrid,
    expected_density,
    kernel_on_grid,
    refine_grid,
    simultaneous_density,
    square_grid,
    square_grid_2d,
)
from .currents import (  # noqa: E402
    PairingResult,
    TestFunction,
    bump_dictionary,
    ddbar_norms,
    pair_pl,
    pair_points,
)
from .reference import (  # noqa: E402
    GREEN_FUNCTIONS,
    REFERENCES,
    GreenFunction,
    ReferenceMeasure,
    discrepancy,
    reference_pairing,
)
from .mc import (  # noqa: E402
    ExperimentConfig,
    ExperimentReport,
    density_cell_comparison,
    run_experiment,
    worker_count,
)

__all__ = [
    "__version__",
    "ZcsimError", "ConfigError", "NumericalError",
    "GramSingularError", "SolverError",
    "QuadratureMeasure", "build_measure", "integrate",
    "EnsembleSpec", "PolynomialBasis", "GaussianSample",
    "parse_spec", "build_ensemble", "orthonormalize",
    "gram_matrix", "gram_residual", "sample",
    "ZeroSet", "roots_univariate", "roots_bivariate",
    "zeros_of_sample", "zeros_of_pair",
    "ComplexGrid", "SzegoKernelGrid", "ExpectedZeroDensity",
    "square_grid", "square_grid_2d", "refine_grid",
    "kernel_on_grid", "expected_density", "simultaneous_density",
    "TestFunction", "PairingResult", "bump_dictionary",
    "pair_points", "pair_pl", "ddbar_norms",
    "ReferenceMeasure", "GreenFunction", "REFERENCES",
    "GREEN_FUNCTIONS", "reference_pairing", "discrepancy",
    "ExperimentConfig", "ExperimentReport", "run_experiment",
    "density_cell_comparison", "worker_count",
]
