// Weighted empirical payoff samples and the order statistics the solvers need.
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace cgvi {

/// Finite list of payoff values M(theta_s) with optional reference weights
/// and optional parameter points. Empty weights mean uniform 1/S. Weights
/// must be positive and sum to 1 within 1e-12.
struct EmpiricalPayoff {
    std::vector<double> values;
    std::vector<double> weights;                 // empty => uniform
    std::vector<std::vector<double>> thetas;     // optional, aligned to values

    std::size_t size() const { return values.size(); }
    double weight(std::size_t s) const {
        return weights.empty() ? 1.0 / static_cast<double>(values.size()) : weights[s];
    }
    /// Throws std::invalid_argument on empty/non-finite values, mismatched or
    /// non-normalized weights, or misaligned thetas.
    void validate() const;

    static EmpiricalPayoff uniform(std::vector<double> values);
};

double weighted_mean(const EmpiricalPayoff& x);
double max_value(const EmpiricalPayoff& x);
double min_value(const EmpiricalPayoff& x);

/// Left-continuous quantile: smallest order statistic whose cumulative weight
/// reaches beta. beta in [0, 1]; beta = 0 returns the minimum.
double weighted_quantile(const EmpiricalPayoff& x, double beta);

/// Indices attaining max(values) exactly.
std::vector<std::size_t> argmax_indices(const EmpiricalPayoff& x);

/// Total reference weight of the argmax set.
double max_mass(const EmpiricalPayoff& x);

/// sum_s w_s f(values_s) with deterministic pairwise order.
double weighted_sum(const EmpiricalPayoff& x, const std::function<double(double)>& f);

}  // namespace cgvi
