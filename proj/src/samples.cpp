#include "cgvi/samples.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "cgvi/numerics.hpp"

namespace cgvi {

void EmpiricalPayoff::validate() const {
    if (values.empty()) throw std::invalid_argument("payoff samples: empty value list");
    for (std::size_t s = 0; s < values.size(); ++s) {
        if (!std::isfinite(values[s]))
            throw std::invalid_argument("payoff samples: non-finite value at index " +
                                        std::to_string(s));
    }
    if (!weights.empty()) {
        if (weights.size() != values.size())
            throw std::invalid_argument("payoff samples: weight/value length mismatch");
        double total = 0.0;
        for (std::size_t s = 0; s < weights.size(); ++s) {
            if (!(weights[s] > 0.0) || !std::isfinite(weights[s]))
                throw std::invalid_argument("payoff samples: nonpositive weight at index " +
                                            std::to_string(s));
            total += weights[s];
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw std::invalid_argument("payoff samples: weights sum to " +
                                        std::to_string(total) + ", expected 1");
    }
    if (!thetas.empty() && thetas.size() != values.size())
        throw std::invalid_argument("payoff samples: theta/value length mismatch");
}

EmpiricalPayoff EmpiricalPayoff::uniform(std::vector<double> values) {
    EmpiricalPayoff x;
    x.values = std::move(values);
    return x;
}

double weighted_mean(const EmpiricalPayoff& x) {
    return pairwise_sum(x.size(), [&](std::size_t s) { return x.weight(s) * x.values[s]; });
}

double max_value(const EmpiricalPayoff& x) {
    return *std::max_element(x.values.begin(), x.values.end());
}

double min_value(const EmpiricalPayoff& x) {
    return *std::min_element(x.values.begin(), x.values.end());
}

double weighted_quantile(const EmpiricalPayoff& x, double beta) {
    if (beta < 0.0 || beta > 1.0)
        throw std::invalid_argument("weighted_quantile: beta outside [0, 1]");
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return x.values[a] < x.values[b]; });
    double cum = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        cum += x.weight(order[k]);
        // The 1e-15 guard absorbs accumulated rounding in the running sum.
        if (cum >= beta - 1e-15) return x.values[order[k]];
    }
    return x.values[order.back()];
}

std::vector<std::size_t> argmax_indices(const EmpiricalPayoff& x) {
    const double m = max_value(x);
    std::vector<std::size_t> idx;
    for (std::size_t s = 0; s < x.size(); ++s)
        if (x.values[s] == m) idx.push_back(s);
    return idx;
}

double max_mass(const EmpiricalPayoff& x) {
    const double m = max_value(x);
    double q = 0.0;
    for (std::size_t s = 0; s < x.size(); ++s)
        if (x.values[s] == m) q += x.weight(s);
    return q;
}

double weighted_sum(const EmpiricalPayoff& x, const std::function<double(double)>& f) {
    return pairwise_sum(x.size(),
                        [&](std::size_t s) { return x.weight(s) * f(x.values[s]); });
}

}  // namespace cgvi
