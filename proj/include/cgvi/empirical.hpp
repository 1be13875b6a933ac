// Empirical-prior problems: the Wasserstein-ball atom relocation program and
// the moment-matching linear program over a candidate atom grid.
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cgvi/solver.hpp"

namespace cgvi {

/// Relocate one atom per empirical-prior anchor to maximize the average
/// payoff, keeping the average Euclidean transport distance within epsilon:
///
///   max (1/M) sum_m f(theta_m)   s.t.   (1/M) sum_m |theta_m - anchor_m| <= eps.
struct WassersteinProblem {
    std::vector<std::vector<double>> anchors;
    double epsilon = 0.0;
    std::function<double(std::span<const double>)> payoff;
    std::function<std::vector<double>(std::span<const double>)> payoff_gradient;

    /// Throws std::invalid_argument on empty/ragged anchors, negative
    /// epsilon, or missing handles.
    void validate() const;
};

struct WassersteinSolution {
    std::vector<std::vector<double>> atoms;
    double value = 0.0;
    double budget_used = 0.0;  // average transport distance at the solution
    int iterations = 0;
    bool converged = true;
    /// Ascent made no progress despite full backtracking while the
    /// first-order residual stayed large; the payoff is likely not concave.
    /// The best iterate found is still returned.
    bool concavity_warning = false;
};

/// Projected gradient ascent on the stacked atom coordinates. The projection
/// onto the transport-budget ball is exact: per-anchor shrinkage toward the
/// anchor with the shared threshold found by bisection on the budget
/// multiplier. Assumes a concave payoff; see concavity_warning otherwise.
WassersteinSolution solve_wasserstein(const WassersteinProblem& prob,
                                      const SolverOptions& opts = {});

/// Pick a probability vector over fixed candidate atoms maximizing expected
/// payoff subject to interval moment constraints:
///
///   max sum_j alpha_j f(atom_j)
///   s.t. |sum_j alpha_j psi_k(atom_j) - target_k| <= tol_k for each k,
///        sum alpha = 1, alpha >= 0.
struct MomentProblem {
    std::vector<std::function<double(std::span<const double>)>> psi;
    std::vector<double> targets;
    std::vector<double> tolerances;
    std::vector<std::vector<double>> candidate_atoms;
    std::function<double(std::span<const double>)> payoff;

    void validate() const;
};

struct MomentSolution {
    std::vector<double> weights;
    double value = 0.0;
    int iterations = 0;
    bool converged = true;
};

/// Thrown when the moment box admits no probability vector; names the most
/// violated constraint and the residual violation.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(const std::string& what, std::string constraint_name, double violation)
        : std::runtime_error(what),
          constraint_name_(std::move(constraint_name)),
          violation_(violation) {}

    const std::string& constraint_name() const { return constraint_name_; }
    double violation() const { return violation_; }

private:
    std::string constraint_name_;
    double violation_;
};

/// Dense interior-point solve of the finite linear program (elastic phase one
/// for the infeasibility certificate, then a predictor-corrector phase two),
/// finished by an exact basis polish so clean vertices come out in exact
/// arithmetic. Throws InfeasibleError when the moment box is empty.
MomentSolution solve_moment_matching(const MomentProblem& prob,
                                     const SolverOptions& opts = {});

}  // namespace cgvi
