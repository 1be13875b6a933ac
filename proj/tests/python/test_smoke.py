"""End-to-end smoke tests for the Python bindings.

Numeric expectations reuse small closed-form fixtures; the heavy numeric
verification lives in the C++ unit and acceptance suites.
"""

import math

import pytest

import cgvi


def uniform(values):
    return cgvi.EmpiricalPayoff(values)


def test_divergence_toolkit():
    kl = cgvi.DivergenceSpec.kl()
    assert kl.name() == "kl"
    assert cgvi.phi(kl, 1.0) == pytest.approx(0.0, abs=1e-15)
    assert cgvi.disutility(kl, 0.0) == pytest.approx(0.0, abs=1e-15)
    # lambda * (e^{x/lambda} - 1) at lambda = 2, x = 2.
    assert cgvi.perspective_conjugate(kl, 2.0, 2.0) == pytest.approx(
        2.0 * (math.e - 1.0), rel=1e-12
    )
    ry = cgvi.DivergenceSpec.renyi(0.5)
    assert ry.alpha() == 0.5
    assert ry.beta() == -1.0
    # (1 - e^{-eps/2}) / (1/2) at alpha = 1/2, eps = 1.
    assert cgvi.renyi_radius(0.5, 1.0) == pytest.approx(
        2.0 * (1.0 - math.exp(-0.5)), rel=1e-12
    )


def test_risk_values():
    x = uniform([1.0, 2.0, 3.0, 4.0])
    assert cgvi.avar(0.5, x).value == pytest.approx(3.5, abs=1e-12)
    two = uniform([0.0, math.log(2.0)])
    assert cgvi.entropic_risk(1.0, two) == pytest.approx(math.log(1.5), rel=1e-12)
    # The higher-moment route and the coherent envelope agree for chi2.
    chi2 = cgvi.DivergenceSpec.chi_squared()
    for eps in (0.1, 0.7, 1.9):
        assert cgvi.coherent_risk(chi2, eps, x).value == pytest.approx(
            cgvi.hmcr2(eps, x).value, abs=1e-8
        )


def test_solve_and_density():
    x = uniform([0.3, -1.2, 2.5, 0.0, 1.1, -0.4])
    kl = cgvi.DivergenceSpec.kl()
    eps = cgvi.bayes_epsilon(x)
    sol = cgvi.solve_saa(kl, eps, x)
    assert sol.converged
    assert sol.lambda_ == pytest.approx(1.0, abs=1e-6)
    q = cgvi.density_from_dual(kl, sol, x)
    total = sum(q.mass(s, x) for s in range(len(x)))
    assert total == pytest.approx(1.0, abs=1e-10)
    assert cgvi.density_divergence(kl, x, q) <= eps + 1e-6
    # Dual value dominates any feasible primal value.
    assert cgvi.primal_value(x, q) <= sol.value + 1e-8


def test_tv_atoms():
    x = uniform([1.0, 2.0, 3.0, 4.0])
    tv = cgvi.DivergenceSpec.total_variation()
    sol = cgvi.solve_saa(tv, 1.0, x)
    assert sol.value == pytest.approx(3.75, abs=1e-12)
    q = cgvi.density_from_dual(tv, sol, x)
    assert q.atoms and q.atoms[0][0] == 3
    assert q.atoms[0][1] == pytest.approx(0.5, abs=1e-12)


def test_experiment_report():
    report = cgvi.run_experiment(
        n_data=40, s_prior=400, grid_size=2001, data_seed=7, prior_seed=8
    )
    methods = [row["method"] for row in report["rows"]]
    assert methods == ["bs", "kl", "cs", "ry", "tv"]
    assert report["provenance"]["data_seed"] == 7
    assert all(math.isfinite(row["eta"]) for row in report["rows"])
    only = cgvi.run_experiment(
        only=("kl",), n_data=40, s_prior=400, grid_size=2001, data_seed=7, prior_seed=8
    )
    assert [row["method"] for row in only["rows"]] == ["kl"]


def test_wasserstein_callable():
    sol = cgvi.solve_wasserstein(
        anchors=[[0.0]],
        epsilon=5.0,
        payoff=lambda t: -((t[0] - 2.0) ** 2),
        payoff_gradient=lambda t: [-2.0 * (t[0] - 2.0)],
    )
    assert sol.converged
    assert sol.atoms[0][0] == pytest.approx(2.0, abs=1e-8)
    assert sol.value == pytest.approx(0.0, abs=1e-12)
    assert sol.budget_used == pytest.approx(2.0, abs=1e-8)


def test_moment_matching_exact():
    sol = cgvi.solve_moment_matching(
        psi=[lambda t: t[0]],
        targets=[0.0],
        tolerances=[0.0],
        candidate_atoms=[[-1.0], [0.0], [1.0]],
        payoff=lambda t: t[0] ** 2,
    )
    assert sol.weights == [0.5, 0.0, 0.5]
    assert sol.value == 1.0


def test_moment_matching_infeasible():
    with pytest.raises(cgvi.InfeasibleError):
        cgvi.solve_moment_matching(
            psi=[lambda t: t[0]],
            targets=[5.0],
            tolerances=[0.1],
            candidate_atoms=[[-1.0], [0.0], [1.0]],
            payoff=lambda t: t[0] ** 2,
        )
