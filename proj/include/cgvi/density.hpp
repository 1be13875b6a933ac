// Variational densities recovered from dual solutions: closed-form densities
// against the reference weights, singular parts for the polyhedral case,
// grid evaluation for plotting and mode extraction, and divergence estimates
// for the unit-multiplier (Bayes-like) tilt.
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cgvi/divergence.hpp"
#include "cgvi/samples.hpp"
#include "cgvi/solver.hpp"

namespace cgvi {

/// Optimal variational density against the reference weights. The continuous
/// part is weights[s] (a density, so its reference mass is w_s * weights[s]);
/// atoms carry additional point masses (sample index, probability mass).
/// Total mass: sum_s w_s weights[s] + sum_atoms mass = 1.
struct DensityWeights {
    std::vector<double> weights;
    std::vector<std::pair<std::size_t, double>> atoms;
    std::string divergence;

    /// Total probability mass placed on sample s.
    double mass(std::size_t s, const EmpiricalPayoff& x) const;
};

/// Recover the optimal density from a dual solution.
///
/// Smooth kinds use the conjugate derivative weights[s] = v'((X_s-mu)/lambda),
/// renormalized exactly. Total variation splits into an indicator continuous
/// part above the threshold mu - lambda (with a fractional weight at the
/// threshold) plus atoms on the argmax set, in proportion to the reference
/// weights. Solutions from solve_gvi (method "gvi-...") use the same forms
/// except total variation, which keeps full weight at the threshold and sends
/// only the remaining mass to the argmax ("prefer continuous").
///
/// Degenerate cases: eps = 0 and constant payoffs give weights identically 1;
/// lambda = 0 (sample-maximum regime) gives the uniform density over the
/// argmax set.
DensityWeights density_from_dual(const DivergenceSpec& spec, const DualSolution& dual,
                                 const EmpiricalPayoff& x);

/// Expected payoff under the density: sum_s w_s weights[s] X_s + atom mass.
double primal_value(const EmpiricalPayoff& x, const DensityWeights& q);

/// Divergence of the density from the reference weights, sum_s w_s phi(q_s),
/// treating atom mass as added density mass / w_s at its sample.
double density_divergence(const DivergenceSpec& spec, const EmpiricalPayoff& x,
                          const DensityWeights& q);

/// Self-normalized Monte Carlo estimate of the KL divergence of the
/// exponential tilt u = exp(X - L), L = log sum_s w_s exp(X_s), from the
/// reference weights: sum_s w_s u_s (X_s - L), stabilized in logs. Feeding
/// the result as the budget to solve_kl on the same payoffs recovers a unit
/// multiplier (up to root-finding tolerance), which is how budgets are
/// calibrated against the unit-multiplier posterior.
double bayes_epsilon(const EmpiricalPayoff& x);

/// Pointwise variational posterior on a uniform parameter grid.
struct GridDensity {
    std::vector<double> unnormalized;  // v'((M_i - mu)/lambda) * prior_i, may underflow
    std::vector<double> normalized;    // trapezoid-normalized, computed in logs
    std::size_t mode_index = 0;        // first argmax of the log density
    bool out_of_domain = false;        // renyi only: grid points past the domain edge
};

/// Evaluate v'((payoff_i - mu)/lambda) * exp(log_prior_i) over an ascending
/// parameter grid and normalize by the trapezoid rule (computed in logs, so
/// log-likelihood payoffs of any magnitude are safe). Renyi points outside
/// the disutility domain get density 0 and set out_of_domain. Total
/// variation evaluates the continuous-part indicator (payoff above
/// mu - lambda). lambda must be positive and finite; for degenerate duals
/// (eps = 0) evaluate the prior itself instead.
GridDensity posterior_on_grid(const DivergenceSpec& spec, double mu, double lambda,
                              std::span<const double> payoff,
                              std::span<const double> log_prior,
                              std::span<const double> grid);

/// Weighted CDF of the scalar parameter under the density, evaluated at each
/// point of an ascending grid: cdf(g) = total mass of samples with
/// theta <= g, atoms included. Right-continuous with terminal value 1.
/// Requires scalar thetas attached to the samples.
std::vector<std::pair<double, double>> empirical_cdf(const DensityWeights& q,
                                                     const EmpiricalPayoff& x,
                                                     std::span<const double> grid);

}  // namespace cgvi
