// Dual solvers for the sample-average coherent posterior problem
//
//   min_{mu, lambda >= 0}  mu + lambda-scaled budget + sum_s w_s (lambda phi)*(X_s - mu)
//
// with per-divergence specializations (closed forms or 1-D stationarity root
// finding), a generic nested 1-D fallback, the risk-regularized variant with
// a fixed multiplier, and an independent primal-side oracle used for
// duality-gap checks.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cgvi/divergence.hpp"
#include "cgvi/samples.hpp"

namespace cgvi {

struct SolverOptions {
    double value_tol = 1e-8;
    double grad_tol = 1e-8;
    double gap_tol = 1e-4;
    int max_iter = 200;
    std::size_t max_oracle_size = 512;
};

struct DualSolution {
    double mu = 0.0;
    /// Optimal multiplier; +inf when the budget constraint is slack in the
    /// limit (eps = 0), 0 when the solution degenerates to the sample max.
    double lambda = 0.0;
    double value = 0.0;
    std::string method;
    int iterations = 0;
    double kkt_residual = 0.0;
    /// Set for the eps = 0 short circuit, constant payoffs, and budgets large
    /// enough that the optimum is the sample maximum.
    bool degenerate = false;
    bool converged = true;
};

struct PrimalSolution {
    std::vector<double> p;        // density against the reference weights
    double objective = 0.0;       // sum_s w_s p_s X_s
    double divergence_value = 0.0;
    int iterations = 0;
    bool converged = true;
};

/// Dispatch by divergence kind; handles eps = 0 and constant payoffs before
/// delegating. eps < 0 throws std::invalid_argument.
DualSolution solve_saa(const DivergenceSpec& spec, double eps, const EmpiricalPayoff& x,
                       const SolverOptions& opts = {});

/// Exponential case: 1-D stationarity in lambda solved by Ridder's method on
///   eps + log E[exp(X/lambda)] - E_p[X]/lambda,
/// then mu = lambda log E[exp(X/lambda)].
DualSolution solve_kl(double eps, const EmpiricalPayoff& x, const SolverOptions& opts = {});

/// Quadratic case via the higher-moment form: Ridder's method on the
/// stationarity of a + sqrt(1+eps) ||(X-a)_+||_2, then
/// lambda = E[(X-a)_+]/2 and mu = a + 2 lambda.
DualSolution solve_chi2(double eps, const EmpiricalPayoff& x, const SolverOptions& opts = {});

/// Isoelastic case (0 < alpha < 1): the budget is first mapped through
/// renyi_radius, then the smooth 2-D dual is minimized by projected gradient
/// steps (curvature-scaled, backtracked) with the feasibility projection
/// keeping (X_s - mu)/lambda strictly inside the disutility domain.
DualSolution solve_renyi(double alpha, double eps, const EmpiricalPayoff& x,
                         const SolverOptions& opts = {});

/// Total variation: exact solution by order statistics. For eps >= 2 the
/// value is max(X) (degenerate); otherwise
///   value = (eps/2) max(X) + (1 - eps/2) AVaR_{eps/2}(X),
/// with mu = (max(X) + t)/2, lambda = (max(X) - t)/2, t the eps/2 quantile.
DualSolution solve_tv(double eps, const EmpiricalPayoff& x, const SolverOptions& opts = {});

/// Risk-regularized variant with fixed multiplier sigma > 0 (no budget):
/// returns the optimal shift in mu and sets lambda = sigma. Method tags start
/// with "gvi-".
DualSolution solve_gvi(const DivergenceSpec& spec, double sigma, const EmpiricalPayoff& x,
                       const SolverOptions& opts = {});

/// Derivative-free reference: nested 1-D searches (outer bracket in lambda,
/// inner bracketed minimization in mu). Slower but makes no smoothness
/// assumptions; used for cross-checks and custom disutilities.
DualSolution solve_generic(const DivergenceSpec& spec, double eps, const EmpiricalPayoff& x,
                           const SolverOptions& opts = {});

/// Independent primal route: constructs the optimal density directly from
/// the primal optimality system — argmax concentration when the budget
/// allows it, an exact mass-rebalancing for total variation, and nested
/// bisections on the ball and mass multipliers otherwise — then polishes the
/// iterate back inside the feasible set so the reported objective is a valid
/// primal value. Sample count must not exceed opts.max_oracle_size. For
/// renyi specs the ball radius is the mapped alpha-divergence radius,
/// matching solve_saa.
PrimalSolution primal_oracle(const DivergenceSpec& spec, double eps,
                             const EmpiricalPayoff& x, const SolverOptions& opts = {});

}  // namespace cgvi
