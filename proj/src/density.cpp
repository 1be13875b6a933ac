#include "cgvi/density.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cgvi/numerics.hpp"

namespace cgvi {

double DensityWeights::mass(std::size_t s, const EmpiricalPayoff& x) const {
    double m = x.weight(s) * weights[s];
    for (const auto& [idx, am] : atoms)
        if (idx == s) m += am;
    return m;
}

namespace {

DensityWeights reference_density(const DivergenceSpec& spec, std::size_t n) {
    DensityWeights q;
    q.weights.assign(n, 1.0);
    q.divergence = spec.name();
    return q;
}

DensityWeights argmax_uniform(const DivergenceSpec& spec, const EmpiricalPayoff& x) {
    DensityWeights q;
    q.weights.assign(x.size(), 0.0);
    const double mass = max_mass(x);
    for (std::size_t s : argmax_indices(x)) q.weights[s] = 1.0 / mass;
    q.divergence = spec.name();
    return q;
}

void add_argmax_atoms(DensityWeights* q, const EmpiricalPayoff& x, double total) {
    if (total <= 0.0) return;
    const double mass = max_mass(x);
    for (std::size_t s : argmax_indices(x))
        q->atoms.emplace_back(s, total * x.weight(s) / mass);
}

// Atom share eps/2 recovered from the solution: the dual stores
// value = t + lambda * eps + E[(X - t)_+] with t = mu - lambda, so
// eps/2 = (value - t - tail) / (2 lambda).
double tv_atom_share(const DualSolution& dual, const EmpiricalPayoff& x) {
    if (dual.lambda <= 0.0) return 0.0;
    const double t = dual.mu - dual.lambda;
    const double tail = weighted_sum(x, [&](double v) { return std::max(0.0, v - t); });
    return std::max(0.0, std::min(1.0, (dual.value - t - tail) / (2.0 * dual.lambda)));
}

DensityWeights tv_density(const DivergenceSpec& spec, const DualSolution& dual,
                          const EmpiricalPayoff& x, bool prefer_continuous) {
    const double t = dual.mu - dual.lambda;  // threshold: quantile or shifted optimum
    const std::size_t n = x.size();
    DensityWeights q;
    q.divergence = spec.name();
    q.weights.assign(n, 0.0);
    double above = 0.0, at = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        if (x.values[s] > t) above += x.weight(s);
        else if (x.values[s] == t) at += x.weight(s);
    }
    // Continuous part: full weight above the threshold, fractional weight at
    // it so that the continuous total hits its target. The risk-regularized
    // form keeps as much mass continuous as possible; the budgeted form caps
    // the continuous total at 1 - eps/2 (the quantile definition guarantees
    // mass{X < t} < eps/2 <= mass{X <= t}, so the share at t lies in [0, 1)).
    const double target = prefer_continuous ? std::min(1.0, above + at)
                                            : 1.0 - tv_atom_share(dual, x);
    double at_weight = 0.0;
    if (at > 0.0) at_weight = std::max(0.0, std::min(1.0, (target - above) / at));
    double total = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        if (x.values[s] > t) q.weights[s] = 1.0;
        else if (x.values[s] == t) q.weights[s] = at_weight;
        total += x.weight(s) * q.weights[s];
    }
    add_argmax_atoms(&q, x, std::max(0.0, 1.0 - total));
    return q;
}

}  // namespace

DensityWeights density_from_dual(const DivergenceSpec& spec, const DualSolution& dual,
                                 const EmpiricalPayoff& x) {
    x.validate();
    const std::size_t n = x.size();
    if (!std::isfinite(dual.lambda)) return reference_density(spec, n);
    if (dual.method == "constant-payoff") return reference_density(spec, n);
    if (dual.lambda == 0.0) return argmax_uniform(spec, x);

    const bool gvi = dual.method.rfind("gvi-", 0) == 0;
    if (spec.kind() == DivergenceKind::tv) return tv_density(spec, dual, x, gvi);

    DensityWeights q;
    q.divergence = spec.name();
    q.weights.resize(n);
    if (spec.kind() == DivergenceKind::kl) {
        // Exponential tilt computed in logs for stability.
        std::vector<double> scaled(n);
        for (std::size_t s = 0; s < n; ++s)
            scaled[s] = (x.values[s] - dual.mu) / dual.lambda;
        std::vector<double> w(n);
        for (std::size_t s = 0; s < n; ++s) w[s] = x.weight(s);
        q.weights = softmax_weights(scaled, w);
        return q;
    }
    for (std::size_t s = 0; s < n; ++s) {
        const double xs = (x.values[s] - dual.mu) / dual.lambda;
        double d;
        if (spec.kind() == DivergenceKind::renyi) {
            const double b = spec.beta();
            const double base = 1.0 + xs / b;
            if (base <= kRenyiDomainMargin)
                throw std::domain_error(
                    "density_from_dual: renyi domain violated at sample " +
                    std::to_string(s));
            d = std::pow(base, b - 1.0);
        } else {
            d = disutility_derivative(spec, xs);
        }
        q.weights[s] = d;
    }
    const double z = pairwise_sum(n, [&](std::size_t s) { return x.weight(s) * q.weights[s]; });
    if (!(z > 0.0)) throw std::runtime_error("density_from_dual: degenerate normalization");
    for (double& v : q.weights) v /= z;
    return q;
}

double primal_value(const EmpiricalPayoff& x, const DensityWeights& q) {
    double v = pairwise_sum(x.size(), [&](std::size_t s) {
        return x.weight(s) * q.weights[s] * x.values[s];
    });
    for (const auto& [idx, m] : q.atoms) v += m * x.values[idx];
    return v;
}

double density_divergence(const DivergenceSpec& spec, const EmpiricalPayoff& x,
                          const DensityWeights& q) {
    std::vector<double> dens(x.size());
    for (std::size_t s = 0; s < x.size(); ++s) dens[s] = q.weights[s];
    for (const auto& [idx, m] : q.atoms) dens[idx] += m / x.weight(idx);
    return pairwise_sum(x.size(),
                        [&](std::size_t s) { return x.weight(s) * phi(spec, dens[s]); });
}

double bayes_epsilon(const EmpiricalPayoff& x) {
    x.validate();
    const std::size_t n = x.size();
    std::vector<double> w(n);
    for (std::size_t s = 0; s < n; ++s) w[s] = x.weight(s);
    const double L = log_sum_exp(x.values, w);
    const auto u = softmax_weights(x.values, w);
    // sum w u log u with log u = X - L, written so u = 0 contributes 0.
    return pairwise_sum(n, [&](std::size_t s) {
        return u[s] > 0.0 ? w[s] * u[s] * (x.values[s] - L) : 0.0;
    });
}

GridDensity posterior_on_grid(const DivergenceSpec& spec, double mu, double lambda,
                              std::span<const double> payoff,
                              std::span<const double> log_prior,
                              std::span<const double> grid) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("posterior_on_grid requires finite lambda > 0");
    if (payoff.size() != log_prior.size() || payoff.size() != grid.size() || payoff.empty())
        throw std::invalid_argument("posterior_on_grid: grid size mismatch");
    const std::size_t n = payoff.size();
    GridDensity g;
    std::vector<double> logq(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double xs = (payoff[i] - mu) / lambda;
        double lv;
        switch (spec.kind()) {
            case DivergenceKind::kl: lv = xs; break;
            case DivergenceKind::chi2: {
                const double base = 0.5 * xs + 1.0;
                lv = base > 0.0 ? std::log(base) : -kInf;
                break;
            }
            case DivergenceKind::renyi: {
                const double b = spec.beta();
                const double base = 1.0 + xs / b;
                if (base <= kRenyiDomainMargin) {
                    lv = -kInf;
                    g.out_of_domain = true;
                } else {
                    lv = (b - 1.0) * std::log(base);
                }
                break;
            }
            case DivergenceKind::tv: lv = (xs > -1.0) ? 0.0 : -kInf; break;
            case DivergenceKind::custom: {
                const double d = disutility_derivative(spec, xs);
                lv = d > 0.0 ? std::log(d) : -kInf;
                break;
            }
            default: lv = -kInf; break;
        }
        logq[i] = lv + log_prior[i];
    }
    g.mode_index = static_cast<std::size_t>(
        std::max_element(logq.begin(), logq.end()) - logq.begin());
    // Trapezoid quadrature weights; the grid may be non-uniform.
    std::vector<double> trap(n, 0.0);
    if (n == 1) {
        trap[0] = 1.0;
    } else {
        trap.front() = 0.5 * (grid[1] - grid[0]);
        trap.back() = 0.5 * (grid[n - 1] - grid[n - 2]);
        for (std::size_t i = 1; i + 1 < n; ++i) trap[i] = 0.5 * (grid[i + 1] - grid[i - 1]);
    }
    const double log_z = log_sum_exp(logq, trap);
    g.unnormalized.resize(n);
    g.normalized.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        g.unnormalized[i] = std::exp(logq[i]);
        g.normalized[i] = std::isfinite(log_z) ? std::exp(logq[i] - log_z) : 0.0;
    }
    return g;
}

std::vector<std::pair<double, double>> empirical_cdf(const DensityWeights& q,
                                                     const EmpiricalPayoff& x,
                                                     std::span<const double> grid) {
    const std::size_t n = x.size();
    if (x.thetas.size() != n)
        throw std::invalid_argument("empirical_cdf requires thetas attached to the samples");
    std::vector<double> theta(n), m(n);
    for (std::size_t s = 0; s < n; ++s) {
        if (x.thetas[s].size() != 1)
            throw std::invalid_argument("empirical_cdf requires scalar thetas");
        theta[s] = x.thetas[s][0];
        m[s] = x.weight(s) * q.weights[s];
    }
    for (const auto& [idx, am] : q.atoms) m[idx] += am;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return theta[a] < theta[b]; });
    std::vector<std::pair<double, double>> cdf;
    cdf.reserve(grid.size());
    double cum = 0.0;
    std::size_t k = 0;
    for (double g : grid) {
        while (k < n && theta[order[k]] <= g) cum += m[order[k++]];
        cdf.emplace_back(g, cum);
    }
    return cdf;
}

}  // namespace cgvi
