"""graphpass: positive solutions of -Laplace(u) + h u = f(x,u) on weighted graphs.

Library + CLI for computing and certifying strictly positive solutions of
the semilinear equation and its perturbation -Laplace(u) + h u = f(x,u) + eps*g
on finite weighted graphs, via a numerical mountain-pass search and
constrained ball minimization, with a posteriori residual certificates.
"""

__version__ = "0.1.0"

from . import errors
from .certify import (
    SolutionCertificate,
    certify,
    embedding_inequalities_hold,
    weak_form_defects,
)
from .graph import (
    VertexFunction,
    WeightedGraph,
    as_vertex_function,
    build_graph,
    gamma,
    generate_graph,
    grad_norm,
    graph_from_dict,
    graph_to_dict,
    hop_distances,
    integrate,
    laplacian,
    load_graph,
    norm_h,
    save_graph,
)
from .model import (
    HypothesisCheck,
    HypothesisReport,
    PerturbationSource,
    Potential,
    PowerNonlinearity,
    ProblemSpec,
    check_hypotheses,
    nonlinearity_from_dict,
)
from .solvers import (
    PathState,
    SolveOutcome,
    SolverConfig,
    ball_minimize,
    mountain_pass_solve,
    newton_refine,
    solve_linear,
    solve_perturbed_pair,
)
from .spectral import EigenResult, lambda1, lambda1_dense_oracle
from .variational import (
    EnergyBreakdown,
    RayProbe,
    RimProbe,
    energy,
    energy_gradient,
    ray_scan,
    residual,
    rim_probe,
    small_s_constants,
)

__all__ = [
    "__version__",
    "errors",
    # graph
    "VertexFunction", "WeightedGraph", "as_vertex_function", "build_graph",
    "gamma", "generate_graph", "grad_norm", "graph_from_dict", "graph_to_dict",
    "hop_distances", "integrate", "laplacian", "load_graph", "norm_h",
    "save_graph",
    # model
    "HypothesisCheck", "HypothesisReport", "PerturbationSource", "Potential",
    "PowerNonlinearity", "ProblemSpec", "check_hypotheses",
    "nonlinearity_from_dict",
    # spectral
    "EigenResult", "lambda1", "lambda1_dense_oracle",
    # variational
    "EnergyBreakdown", "RayProbe", "RimProbe", "energy", "energy_gradient",
    "ray_scan", "residual", "rim_probe", "small_s_constants",
    # solvers
    "PathState", "SolveOutcome", "SolverConfig", "ball_minimize",
    "mountain_pass_solve", "newton_refine", "solve_linear",
    "solve_perturbed_pair",
    # certify
    "SolutionCertificate", "certify", "embedding_inequalities_hold",
    "weak_form_defects",
]
