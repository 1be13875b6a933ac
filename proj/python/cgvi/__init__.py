"""Coherent generalized variational inference.

Dual solvers over empirical payoff samples, closed-form variational
densities, coherent risk measures, the heteroscedastic misspecification
experiment, and empirical-prior programs (Wasserstein atom relocation,
moment-matching linear programs).
"""

import json as _json

try:
    from . import _core as _impl
except ImportError:  # development layout: extension built outside the package
    import _core as _impl

_EXPORTED = (
    "DensityWeights",
    "DivergenceSpec",
    "DualSolution",
    "EmpiricalPayoff",
    "GridDensity",
    "InfeasibleError",
    "MomentSolution",
    "PrimalSolution",
    "RiskResult",
    "SolverOptions",
    "WassersteinSolution",
    "__version__",
    "avar",
    "bayes_epsilon",
    "coherent_risk",
    "density_divergence",
    "density_from_dual",
    "disutility",
    "disutility_derivative",
    "empirical_cdf",
    "entropic_risk",
    "estimate_divergence_of_bayes",
    "hmcr2",
    "oce_risk",
    "perspective_conjugate",
    "phi",
    "posterior_on_grid",
    "primal_oracle",
    "primal_value",
    "renyi_radius",
    "run_experiment_json",
    "solve_generic",
    "solve_gvi",
    "solve_moment_matching",
    "solve_saa",
    "solve_wasserstein",
)

globals().update({name: getattr(_impl, name) for name in _EXPORTED})

__all__ = [
    "DensityWeights",
    "DivergenceSpec",
    "DualSolution",
    "EmpiricalPayoff",
    "GridDensity",
    "InfeasibleError",
    "MomentSolution",
    "PrimalSolution",
    "RiskResult",
    "SolverOptions",
    "WassersteinSolution",
    "__version__",
    "avar",
    "bayes_epsilon",
    "coherent_risk",
    "density_divergence",
    "density_from_dual",
    "disutility",
    "disutility_derivative",
    "empirical_cdf",
    "entropic_risk",
    "estimate_divergence_of_bayes",
    "hmcr2",
    "oce_risk",
    "perspective_conjugate",
    "phi",
    "posterior_on_grid",
    "primal_oracle",
    "primal_value",
    "renyi_radius",
    "run_experiment",
    "run_experiment_json",
    "solve_generic",
    "solve_gvi",
    "solve_moment_matching",
    "solve_saa",
    "solve_wasserstein",
]


def run_experiment(only=(), **config):
    """Run the misspecification experiment and return the report as a dict.

    Keyword arguments become configuration fields (e.g. ``n_data=100``,
    ``s_prior=10000``, ``data_seed=1``); unspecified fields keep their
    defaults. ``only`` restricts the methods run (e.g. ``("kl", "tv")``).
    """
    report = run_experiment_json(_json.dumps(config), list(only))
    return _json.loads(report)
