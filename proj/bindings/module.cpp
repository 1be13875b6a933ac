// Python bindings for the cgvi library. Exposes the divergence toolkit, the
// dual solvers and density recovery, the risk evaluators, the
// misspecification experiment (as JSON in/out, mirroring the CLI), and the
// empirical-prior solvers with Python callables as payoffs.
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstddef>
#include <span>
#include <vector>

#include "cgvi/density.hpp"
#include "cgvi/divergence.hpp"
#include "cgvi/empirical.hpp"
#include "cgvi/io.hpp"
#include "cgvi/payoff.hpp"
#include "cgvi/risk.hpp"
#include "cgvi/samples.hpp"
#include "cgvi/solver.hpp"

namespace py = pybind11;

namespace {

// pybind11 converts vectors, not spans, so payoff callables cross the
// boundary through a copy of the point.
std::function<double(std::span<const double>)> wrap_scalar_fn(py::object f) {
    return [f](std::span<const double> theta) {
        return f(std::vector<double>(theta.begin(), theta.end())).cast<double>();
    };
}

std::function<std::vector<double>(std::span<const double>)> wrap_gradient_fn(py::object f) {
    return [f](std::span<const double> theta) {
        return f(std::vector<double>(theta.begin(), theta.end()))
            .cast<std::vector<double>>();
    };
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Coherent generalized variational inference: dual solvers over "
              "empirical payoff samples, variational densities, coherent risk "
              "measures, and empirical-prior programs.";

    py::register_exception<cgvi::InfeasibleError>(m, "InfeasibleError");

    py::class_<cgvi::DivergenceSpec>(m, "DivergenceSpec",
                                     "A divergence together with its disutility conjugate.")
        .def_static("kl", &cgvi::DivergenceSpec::kl)
        .def_static("chi_squared", &cgvi::DivergenceSpec::chi_squared)
        .def_static("renyi", &cgvi::DivergenceSpec::renyi, py::arg("alpha"))
        .def_static("total_variation", &cgvi::DivergenceSpec::total_variation)
        .def_static(
            "custom",
            [](py::object v, py::object v_prime, double domain_sup) {
                cgvi::DisutilityTable t;
                t.v = [v](double x) { return v(x).cast<double>(); };
                t.v_prime = [v_prime](double x) { return v_prime(x).cast<double>(); };
                t.v_domain_sup = domain_sup;
                return cgvi::DivergenceSpec::custom(std::move(t));
            },
            py::arg("v"), py::arg("v_prime"), py::arg("domain_sup"),
            "Custom disutility: convex nondecreasing v with v(0) = 0, a "
            "nondecreasing derivative selection, and the domain supremum.")
        .def("name", &cgvi::DivergenceSpec::name)
        .def("alpha", &cgvi::DivergenceSpec::alpha)
        .def("beta", &cgvi::DivergenceSpec::beta)
        .def("__repr__", [](const cgvi::DivergenceSpec& s) {
            return "DivergenceSpec(" + s.name() + ")";
        });

    m.def("phi", &cgvi::phi, py::arg("spec"), py::arg("t"),
          "Divergence integrand; +inf outside the effective domain.");
    m.def("disutility", &cgvi::disutility, py::arg("spec"), py::arg("x"),
          "Convex conjugate of the integrand; +inf outside its domain.");
    m.def("disutility_derivative", &cgvi::disutility_derivative, py::arg("spec"),
          py::arg("x"));
    m.def("perspective_conjugate", &cgvi::perspective_conjugate, py::arg("spec"),
          py::arg("lambda_"), py::arg("x"),
          "lambda * v(x / lambda) with the lambda = 0 closure.");
    m.def("renyi_radius", &cgvi::renyi_radius, py::arg("alpha"), py::arg("eps"),
          "Map a Renyi-divergence radius to the equivalent alpha-divergence radius.");

    py::class_<cgvi::EmpiricalPayoff>(m, "EmpiricalPayoff",
                                      "Weighted payoff samples; empty weights mean uniform.")
        .def(py::init([](std::vector<double> values, std::vector<double> weights,
                         std::vector<std::vector<double>> thetas) {
                 cgvi::EmpiricalPayoff x{std::move(values), std::move(weights),
                                         std::move(thetas)};
                 x.validate();
                 return x;
             }),
             py::arg("values"), py::arg("weights") = std::vector<double>{},
             py::arg("thetas") = std::vector<std::vector<double>>{})
        .def_readonly("values", &cgvi::EmpiricalPayoff::values)
        .def_readonly("weights", &cgvi::EmpiricalPayoff::weights)
        .def_readonly("thetas", &cgvi::EmpiricalPayoff::thetas)
        .def("__len__", &cgvi::EmpiricalPayoff::size);

    py::class_<cgvi::SolverOptions>(m, "SolverOptions")
        .def(py::init<>())
        .def_readwrite("value_tol", &cgvi::SolverOptions::value_tol)
        .def_readwrite("grad_tol", &cgvi::SolverOptions::grad_tol)
        .def_readwrite("gap_tol", &cgvi::SolverOptions::gap_tol)
        .def_readwrite("max_iter", &cgvi::SolverOptions::max_iter)
        .def_readwrite("max_oracle_size", &cgvi::SolverOptions::max_oracle_size);

    py::class_<cgvi::DualSolution>(m, "DualSolution")
        .def_readonly("mu", &cgvi::DualSolution::mu)
        .def_readonly("lambda_", &cgvi::DualSolution::lambda)
        .def_readonly("value", &cgvi::DualSolution::value)
        .def_readonly("method", &cgvi::DualSolution::method)
        .def_readonly("iterations", &cgvi::DualSolution::iterations)
        .def_readonly("kkt_residual", &cgvi::DualSolution::kkt_residual)
        .def_readonly("degenerate", &cgvi::DualSolution::degenerate)
        .def_readonly("converged", &cgvi::DualSolution::converged)
        .def("__repr__", [](const cgvi::DualSolution& s) {
            return "DualSolution(value=" + cgvi::io::format_double(s.value) +
                   ", mu=" + cgvi::io::format_double(s.mu) +
                   ", lambda=" + cgvi::io::format_double(s.lambda) + ", method=" +
                   s.method + ")";
        });

    py::class_<cgvi::PrimalSolution>(m, "PrimalSolution")
        .def_readonly("p", &cgvi::PrimalSolution::p)
        .def_readonly("objective", &cgvi::PrimalSolution::objective)
        .def_readonly("divergence_value", &cgvi::PrimalSolution::divergence_value)
        .def_readonly("iterations", &cgvi::PrimalSolution::iterations)
        .def_readonly("converged", &cgvi::PrimalSolution::converged);

    m.def("solve_saa", &cgvi::solve_saa, py::arg("spec"), py::arg("eps"), py::arg("x"),
          py::arg("opts") = cgvi::SolverOptions{},
          "Minimize the two-variable dual of the budgeted sample-average problem.");
    m.def("solve_gvi", &cgvi::solve_gvi, py::arg("spec"), py::arg("sigma"), py::arg("x"),
          py::arg("opts") = cgvi::SolverOptions{},
          "Risk-regularized variant with a fixed multiplier (no budget).");
    m.def("solve_generic", &cgvi::solve_generic, py::arg("spec"), py::arg("eps"),
          py::arg("x"), py::arg("opts") = cgvi::SolverOptions{},
          "Derivative-free nested 1-D reference solver.");
    m.def("primal_oracle", &cgvi::primal_oracle, py::arg("spec"), py::arg("eps"),
          py::arg("x"), py::arg("opts") = cgvi::SolverOptions{},
          "Independent feasible-ascent primal bound for duality-gap checks.");

    py::class_<cgvi::DensityWeights>(m, "DensityWeights")
        .def_readonly("weights", &cgvi::DensityWeights::weights)
        .def_readonly("atoms", &cgvi::DensityWeights::atoms)
        .def_readonly("divergence", &cgvi::DensityWeights::divergence)
        .def("mass", &cgvi::DensityWeights::mass, py::arg("s"), py::arg("x"),
             "Total probability mass placed on sample s.");

    m.def("density_from_dual", &cgvi::density_from_dual, py::arg("spec"), py::arg("dual"),
          py::arg("x"), "Recover the optimal variational density from a dual solution.");
    m.def("primal_value", &cgvi::primal_value, py::arg("x"), py::arg("q"));
    m.def("density_divergence", &cgvi::density_divergence, py::arg("spec"), py::arg("x"),
          py::arg("q"));
    m.def("bayes_epsilon", &cgvi::bayes_epsilon, py::arg("x"),
          "KL divergence of the exponential tilt; the budget that recovers a "
          "unit multiplier.");
    m.def("estimate_divergence_of_bayes", &cgvi::estimate_divergence_of_bayes,
          py::arg("spec"), py::arg("x"));

    py::class_<cgvi::GridDensity>(m, "GridDensity")
        .def_readonly("unnormalized", &cgvi::GridDensity::unnormalized)
        .def_readonly("normalized", &cgvi::GridDensity::normalized)
        .def_readonly("mode_index", &cgvi::GridDensity::mode_index)
        .def_readonly("out_of_domain", &cgvi::GridDensity::out_of_domain);

    m.def(
        "posterior_on_grid",
        [](const cgvi::DivergenceSpec& spec, double mu, double lambda,
           const std::vector<double>& payoff, const std::vector<double>& log_prior,
           const std::vector<double>& grid) {
            return cgvi::posterior_on_grid(spec, mu, lambda, payoff, log_prior, grid);
        },
        py::arg("spec"), py::arg("mu"), py::arg("lambda_"), py::arg("payoff"),
        py::arg("log_prior"), py::arg("grid"),
        "Pointwise variational posterior on an ascending parameter grid.");
    m.def(
        "empirical_cdf",
        [](const cgvi::DensityWeights& q, const cgvi::EmpiricalPayoff& x,
           const std::vector<double>& grid) { return cgvi::empirical_cdf(q, x, grid); },
        py::arg("q"), py::arg("x"), py::arg("grid"));

    py::class_<cgvi::RiskResult>(m, "RiskResult")
        .def_readonly("value", &cgvi::RiskResult::value)
        .def_readonly("minimizer", &cgvi::RiskResult::minimizer)
        .def_readonly("iterations", &cgvi::RiskResult::iterations)
        .def_readonly("converged", &cgvi::RiskResult::converged)
        .def("__repr__", [](const cgvi::RiskResult& r) {
            return "RiskResult(value=" + cgvi::io::format_double(r.value) + ")";
        });

    m.def("oce_risk", &cgvi::oce_risk, py::arg("spec"), py::arg("sigma"), py::arg("x"),
          "Optimized certainty equivalent for the disutility at scale sigma.");
    m.def("coherent_risk", &cgvi::coherent_risk, py::arg("spec"), py::arg("eps"),
          py::arg("x"), "Coherent envelope with divergence budget eps.");
    m.def("avar", &cgvi::avar, py::arg("beta"), py::arg("x"),
          "Average value-at-risk of the upper tail at level beta.");
    m.def("hmcr2", &cgvi::hmcr2, py::arg("eps"), py::arg("x"),
          "Second-order higher-moment coherent risk.");
    m.def("entropic_risk", &cgvi::entropic_risk, py::arg("sigma"), py::arg("x"));

    m.def(
        "run_experiment_json",
        [](const std::string& config_json, const std::vector<std::string>& only) {
            const cgvi::MisspecConfig cfg = cgvi::io::misspec_config_from_json(config_json);
            return cgvi::io::to_json(cgvi::run_misspec_experiment(cfg, only));
        },
        py::arg("config_json") = std::string("{}"),
        py::arg("only") = std::vector<std::string>{},
        "Run the heteroscedastic misspecification experiment; both the "
        "configuration and the report travel as JSON documents with the same "
        "schema as the command-line tool.");

    py::class_<cgvi::WassersteinSolution>(m, "WassersteinSolution")
        .def_readonly("atoms", &cgvi::WassersteinSolution::atoms)
        .def_readonly("value", &cgvi::WassersteinSolution::value)
        .def_readonly("budget_used", &cgvi::WassersteinSolution::budget_used)
        .def_readonly("iterations", &cgvi::WassersteinSolution::iterations)
        .def_readonly("converged", &cgvi::WassersteinSolution::converged)
        .def_readonly("concavity_warning", &cgvi::WassersteinSolution::concavity_warning);

    m.def(
        "solve_wasserstein",
        [](std::vector<std::vector<double>> anchors, double epsilon, py::object payoff,
           py::object payoff_gradient, const cgvi::SolverOptions& opts) {
            cgvi::WassersteinProblem prob;
            prob.anchors = std::move(anchors);
            prob.epsilon = epsilon;
            prob.payoff = wrap_scalar_fn(payoff);
            prob.payoff_gradient = wrap_gradient_fn(payoff_gradient);
            return cgvi::solve_wasserstein(prob, opts);
        },
        py::arg("anchors"), py::arg("epsilon"), py::arg("payoff"),
        py::arg("payoff_gradient"), py::arg("opts") = cgvi::SolverOptions{},
        "Relocate one atom per anchor to maximize the average payoff within "
        "an average-transport budget. payoff and payoff_gradient take a "
        "point as a list of floats.");

    py::class_<cgvi::MomentSolution>(m, "MomentSolution")
        .def_readonly("weights", &cgvi::MomentSolution::weights)
        .def_readonly("value", &cgvi::MomentSolution::value)
        .def_readonly("iterations", &cgvi::MomentSolution::iterations)
        .def_readonly("converged", &cgvi::MomentSolution::converged);

    m.def(
        "solve_moment_matching",
        [](std::vector<py::object> psi, std::vector<double> targets,
           std::vector<double> tolerances, std::vector<std::vector<double>> atoms,
           py::object payoff, const cgvi::SolverOptions& opts) {
            cgvi::MomentProblem prob;
            prob.psi.reserve(psi.size());
            for (auto& f : psi) prob.psi.push_back(wrap_scalar_fn(f));
            prob.targets = std::move(targets);
            prob.tolerances = std::move(tolerances);
            prob.candidate_atoms = std::move(atoms);
            prob.payoff = wrap_scalar_fn(payoff);
            return cgvi::solve_moment_matching(prob, opts);
        },
        py::arg("psi"), py::arg("targets"), py::arg("tolerances"),
        py::arg("candidate_atoms"), py::arg("payoff"),
        py::arg("opts") = cgvi::SolverOptions{},
        "Maximize expected payoff over probability vectors on candidate atoms "
        "subject to interval moment constraints. Raises InfeasibleError when "
        "the moment box is empty.");

    m.attr("__version__") = "1.0.0";
}
