#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "cgvi/empirical.hpp"
#include "cgvi/numerics.hpp"

using namespace cgvi;

namespace {

WassersteinProblem quadratic_problem(std::vector<std::vector<double>> anchors,
                                     double epsilon, std::vector<double> center) {
    WassersteinProblem prob;
    prob.anchors = std::move(anchors);
    prob.epsilon = epsilon;
    prob.payoff = [center](std::span<const double> th) {
        double sq = 0.0;
        for (std::size_t k = 0; k < th.size(); ++k) {
            const double d = th[k] - center[k];
            sq += d * d;
        }
        return -sq;
    };
    prob.payoff_gradient = [center](std::span<const double> th) {
        std::vector<double> g(th.size());
        for (std::size_t k = 0; k < th.size(); ++k) g[k] = -2.0 * (th[k] - center[k]);
        return g;
    };
    return prob;
}

}  // namespace

TEST_CASE("anchor relocation validation") {
    WassersteinProblem empty;
    CHECK_THROWS_AS(empty.validate(), std::invalid_argument);

    auto ragged = quadratic_problem({{0.0}, {0.0, 1.0}}, 1.0, {0.0});
    CHECK_THROWS_AS(ragged.validate(), std::invalid_argument);

    auto negative = quadratic_problem({{0.0}}, -1.0, {0.0});
    CHECK_THROWS_AS(negative.validate(), std::invalid_argument);

    auto no_grad = quadratic_problem({{0.0}}, 1.0, {0.0});
    no_grad.payoff_gradient = nullptr;
    CHECK_THROWS_AS(no_grad.validate(), std::invalid_argument);
}

TEST_CASE("anchor relocation: interior optimum within a generous budget") {
    const auto sol = solve_wasserstein(quadratic_problem({{0.0}}, 5.0, {2.0}));
    CHECK(sol.converged);
    CHECK(!sol.concavity_warning);
    REQUIRE(sol.atoms.size() == 1);
    CHECK(std::abs(sol.atoms[0][0] - 2.0) <= 1e-8);
    CHECK(std::abs(sol.value) <= 1e-12);
    CHECK(std::abs(sol.budget_used - 2.0) <= 1e-8);
}

TEST_CASE("anchor relocation: binding budget moves along the gradient ray") {
    const auto sol = solve_wasserstein(quadratic_problem({{0.0}}, 1.0, {2.0}));
    CHECK(sol.converged);
    CHECK(std::abs(sol.atoms[0][0] - 1.0) <= 1e-7);
    CHECK(std::abs(sol.value - (-1.0)) <= 1e-7);
    CHECK(sol.budget_used <= 1.0 + 1e-9);

    // Two-dimensional version: move 2.5 of the distance-5 ray toward (3, 4).
    const auto sol2 = solve_wasserstein(quadratic_problem({{0.0, 0.0}}, 2.5, {3.0, 4.0}));
    CHECK(sol2.converged);
    CHECK(std::abs(sol2.atoms[0][0] - 1.5) <= 1e-6);
    CHECK(std::abs(sol2.atoms[0][1] - 2.0) <= 1e-6);
    CHECK(std::abs(sol2.value - (-6.25)) <= 1e-6);
    CHECK(std::abs(sol2.budget_used - 2.5) <= 1e-8);
}

TEST_CASE("anchor relocation: budget splits across symmetric anchors") {
    const auto sol = solve_wasserstein(quadratic_problem({{-2.0}, {2.0}}, 1.0, {0.0}));
    CHECK(sol.converged);
    CHECK(std::abs(sol.atoms[0][0] - (-1.0)) <= 1e-6);
    CHECK(std::abs(sol.atoms[1][0] - 1.0) <= 1e-6);
    CHECK(std::abs(sol.value - (-1.0)) <= 1e-6);
    CHECK(std::abs(sol.budget_used - 1.0) <= 1e-8);
}

TEST_CASE("anchor relocation: zero budget echoes the anchors") {
    const auto sol = solve_wasserstein(quadratic_problem({{-1.0}, {3.0}}, 0.0, {0.0}));
    CHECK(sol.converged);
    CHECK(sol.atoms[0][0] == -1.0);
    CHECK(sol.atoms[1][0] == 3.0);
    CHECK(std::abs(sol.value - (-5.0)) <= 1e-12);
    CHECK(sol.budget_used == 0.0);
}

TEST_CASE("anchor relocation: value is nondecreasing in the budget") {
    double prev = -kInf;
    for (double eps : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        const auto sol = solve_wasserstein(quadratic_problem({{0.0}}, eps, {2.0}));
        CHECK(sol.value >= prev - 1e-9);
        CHECK(sol.budget_used <= eps + 1e-9);
        prev = sol.value;
    }
}

namespace {

MomentProblem scalar_moment_problem(std::vector<std::vector<double>> atoms,
                                    std::vector<double> targets,
                                    std::vector<double> tolerances) {
    MomentProblem prob;
    prob.psi = {[](std::span<const double> th) { return th[0]; }};
    prob.targets = std::move(targets);
    prob.tolerances = std::move(tolerances);
    prob.candidate_atoms = std::move(atoms);
    prob.payoff = [](std::span<const double> th) { return th[0] * th[0]; };
    return prob;
}

}  // namespace

TEST_CASE("moment program validation") {
    auto bad = scalar_moment_problem({{-1.0}, {1.0}}, {0.0, 1.0}, {0.0});
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    auto none = scalar_moment_problem({}, {0.0}, {0.0});
    CHECK_THROWS_AS(none.validate(), std::invalid_argument);
    auto negtol = scalar_moment_problem({{-1.0}, {1.0}}, {0.0}, {-0.5});
    CHECK_THROWS_AS(negtol.validate(), std::invalid_argument);
}

TEST_CASE("moment program: symmetric equality fixture is exact") {
    const auto sol =
        solve_moment_matching(scalar_moment_problem({{-1.0}, {0.0}, {1.0}}, {0.0}, {0.0}));
    CHECK(sol.converged);
    REQUIRE(sol.weights.size() == 3);
    CHECK(sol.weights[0] == 0.5);
    CHECK(sol.weights[1] == 0.0);
    CHECK(sol.weights[2] == 0.5);
    CHECK(sol.value == 1.0);
}

TEST_CASE("moment program: interval constraints leave the extremes optimal") {
    const auto sol = solve_moment_matching(
        scalar_moment_problem({{-1.0}, {0.0}, {1.0}}, {0.0}, {0.25}));
    CHECK(sol.converged);
    CHECK(std::abs(sol.value - 1.0) <= 1e-9);
    double mean = 0.0, total = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
        mean += sol.weights[j] * (static_cast<double>(j) - 1.0);
        total += sol.weights[j];
    }
    CHECK(std::abs(total - 1.0) <= 1e-9);
    CHECK(std::abs(mean) <= 0.25 + 1e-9);
}

TEST_CASE("moment program: linear payoff pinned by an equality constraint") {
    MomentProblem prob;
    prob.psi = {[](std::span<const double> th) { return th[0]; }};
    prob.targets = {0.5};
    prob.tolerances = {0.0};
    prob.candidate_atoms = {{-1.0}, {1.0}};
    prob.payoff = [](std::span<const double> th) { return th[0]; };
    const auto sol = solve_moment_matching(prob);
    CHECK(sol.converged);
    CHECK(std::abs(sol.value - 0.5) <= 1e-10);
    CHECK(std::abs(sol.weights[0] - 0.25) <= 1e-9);
    CHECK(std::abs(sol.weights[1] - 0.75) <= 1e-9);
}

TEST_CASE("moment program: infeasible box raises with a named certificate") {
    try {
        solve_moment_matching(
            scalar_moment_problem({{-1.0}, {0.0}, {1.0}}, {5.0}, {0.1}));
        FAIL("expected InfeasibleError");
    } catch (const InfeasibleError& e) {
        CHECK(e.constraint_name() == "moment 0 lower");
        CHECK(std::abs(e.violation() - 3.9) <= 1e-4);
    }
}

TEST_CASE("moment program: no constraints reduces to the argmax atom") {
    MomentProblem prob;
    prob.targets = {};
    prob.tolerances = {};
    prob.candidate_atoms = {{-1.0}, {0.0}, {2.0}};
    prob.payoff = [](std::span<const double> th) { return th[0] * th[0]; };
    const auto sol = solve_moment_matching(prob);
    CHECK(sol.converged);
    CHECK(sol.weights == std::vector<double>{0.0, 0.0, 1.0});
    CHECK(sol.value == 4.0);
}

TEST_CASE("moment program: duplicate atoms do not change the value") {
    const auto base =
        solve_moment_matching(scalar_moment_problem({{-1.0}, {0.0}, {1.0}}, {0.0}, {0.0}));
    const auto dup = solve_moment_matching(
        scalar_moment_problem({{-1.0}, {-1.0}, {0.0}, {1.0}, {1.0}}, {0.0}, {0.0}));
    CHECK(std::abs(dup.value - base.value) <= 1e-9);
    double total = 0.0;
    for (double wj : dup.weights) {
        CHECK(wj >= 0.0);
        total += wj;
    }
    CHECK(std::abs(total - 1.0) <= 1e-9);
}

TEST_CASE("moment program: optimal support is no larger than the row count") {
    Rng rng(314);
    std::vector<std::vector<double>> atoms(40);
    for (auto& a : atoms) a = {rng.uniform(-2.0, 2.0)};
    MomentProblem prob;
    prob.psi = {[](std::span<const double> th) { return th[0]; },
                [](std::span<const double> th) { return th[0] * th[0]; }};
    prob.targets = {0.1, 1.0};
    prob.tolerances = {0.1, 0.2};
    prob.candidate_atoms = atoms;
    prob.payoff = [](std::span<const double> th) { return std::cos(3.0 * th[0]); };
    const auto sol = solve_moment_matching(prob);
    CHECK(sol.converged);
    std::size_t support = 0;
    for (double wj : sol.weights)
        if (wj > 0.0) ++support;
    // One normalization row plus two slack rows per moment.
    CHECK(support <= 5);
    // Constraints hold at the reported weights.
    double m1 = 0.0, m2 = 0.0, total = 0.0;
    for (std::size_t j = 0; j < atoms.size(); ++j) {
        m1 += sol.weights[j] * atoms[j][0];
        m2 += sol.weights[j] * atoms[j][0] * atoms[j][0];
        total += sol.weights[j];
    }
    CHECK(std::abs(total - 1.0) <= 1e-8);
    CHECK(std::abs(m1 - 0.1) <= 0.1 + 1e-8);
    CHECK(std::abs(m2 - 1.0) <= 0.2 + 1e-8);
}

TEST_CASE("moment program: non-finite feature values are rejected by name") {
    MomentProblem prob;
    prob.psi = {[](std::span<const double> th) { return 1.0 / th[0]; }};
    prob.targets = {0.0};
    prob.tolerances = {1.0};
    prob.candidate_atoms = {{0.0}, {1.0}};
    prob.payoff = [](std::span<const double> th) { return th[0]; };
    CHECK_THROWS_AS(solve_moment_matching(prob), std::invalid_argument);
}
