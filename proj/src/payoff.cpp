#include "cgvi/payoff.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cgvi/numerics.hpp"

namespace cgvi {

void Dataset::validate() const {
    if (records.empty()) throw std::invalid_argument("Dataset: no records");
    for (std::size_t n = 0; n < records.size(); ++n)
        for (double v : records[n])
            if (!std::isfinite(v))
                throw std::invalid_argument("Dataset: non-finite entry in record " +
                                            std::to_string(n));
}

PayoffModel gaussian_loglik_model() {
    PayoffModel model;
    model.description = "gaussian log-likelihood, linear decision theta * x, unit noise";
    model.m = [](std::span<const double> theta, std::span<const double> y) {
        const double r = y[1] - theta[0] * y[0];
        return -0.5 * r * r;
    };
    return model;
}

PriorSampler PriorSampler::normal(double mean, double sd) {
    PriorSampler p;
    p.kind = Kind::normal;
    p.a = mean;
    p.b = sd;
    return p;
}

PriorSampler PriorSampler::uniform(double lo, double hi) {
    PriorSampler p;
    p.kind = Kind::uniform;
    p.a = lo;
    p.b = hi;
    return p;
}

PriorSampler PriorSampler::empirical(std::vector<std::vector<double>> atoms) {
    PriorSampler p;
    p.kind = Kind::empirical;
    p.atoms = std::move(atoms);
    return p;
}

void PriorSampler::validate() const {
    switch (kind) {
        case Kind::normal:
            if (!(b > 0.0)) throw std::invalid_argument("PriorSampler: sd must be positive");
            return;
        case Kind::uniform:
            if (!(a < b)) throw std::invalid_argument("PriorSampler: need lo < hi");
            return;
        case Kind::empirical:
            if (atoms.empty()) throw std::invalid_argument("PriorSampler: no atoms");
            return;
    }
    throw std::logic_error("PriorSampler: unknown kind");
}

double PriorSampler::log_pdf(double theta) const {
    switch (kind) {
        case Kind::normal: {
            const double z = (theta - a) / b;
            // log(1/(sd sqrt(2 pi))) - z^2/2
            return -0.5 * z * z - std::log(b) - 0.9189385332046727;
        }
        case Kind::uniform:
            return (theta >= a && theta <= b) ? -std::log(b - a) : -kInf;
        case Kind::empirical:
            throw std::invalid_argument("PriorSampler: empirical kind has no density");
    }
    throw std::logic_error("PriorSampler: unknown kind");
}

std::vector<std::vector<double>> sample_prior(const PriorSampler& prior, std::size_t s,
                                              std::uint64_t seed) {
    prior.validate();
    if (s == 0) throw std::invalid_argument("sample_prior: need at least one draw");
    Rng rng(seed);
    std::vector<std::vector<double>> draws;
    draws.reserve(s);
    for (std::size_t i = 0; i < s; ++i) {
        switch (prior.kind) {
            case PriorSampler::Kind::normal:
                draws.push_back({rng.normal(prior.a, prior.b)});
                break;
            case PriorSampler::Kind::uniform:
                draws.push_back({rng.uniform(prior.a, prior.b)});
                break;
            case PriorSampler::Kind::empirical:
                draws.push_back(prior.atoms[rng.index(prior.atoms.size())]);
                break;
        }
    }
    return draws;
}

EmpiricalPayoff evaluate_payoffs(const PayoffModel& model, const Dataset& data,
                                 const std::vector<std::vector<double>>& thetas) {
    data.validate();
    if (thetas.empty()) throw std::invalid_argument("evaluate_payoffs: no parameter samples");
    const std::size_t n = data.size();
    EmpiricalPayoff out;
    out.values.resize(thetas.size());
    out.thetas = thetas;
    std::vector<double> per_record(n);
    for (std::size_t s = 0; s < thetas.size(); ++s) {
        for (std::size_t r = 0; r < n; ++r) {
            per_record[r] = model.m(thetas[s], data.records[r]);
            if (!std::isfinite(per_record[r]))
                throw std::invalid_argument("evaluate_payoffs: non-finite payoff at sample " +
                                            std::to_string(s) + ", record " +
                                            std::to_string(r));
        }
        out.values[s] = pairwise_sum(per_record) / static_cast<double>(n);
    }
    return out;
}

std::vector<double> evaluate_payoff_grid(const PayoffModel& model, const Dataset& data,
                                         std::span<const double> grid) {
    data.validate();
    const std::size_t n = data.size();
    std::vector<double> out(grid.size());
    std::vector<double> per_record(n);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double theta[1] = {grid[i]};
        for (std::size_t r = 0; r < n; ++r) per_record[r] = model.m(theta, data.records[r]);
        out[i] = pairwise_sum(per_record) / static_cast<double>(n);
    }
    return out;
}

double estimate_divergence_of_bayes(const DivergenceSpec& spec, const EmpiricalPayoff& x) {
    x.validate();
    const std::size_t n = x.size();
    std::vector<double> w(n);
    for (std::size_t s = 0; s < n; ++s) w[s] = x.weight(s);
    if (spec.kind() == DivergenceKind::renyi) {
        // log(sum w u^alpha)/(alpha - 1) computed through two stabilized
        // log-sum-exp passes; equals the alpha-divergence pushed through the
        // radius map back to the renyi scale.
        const double a = spec.alpha();
        const double L = log_sum_exp(x.values, w);
        std::vector<double> scaled(n);
        for (std::size_t s = 0; s < n; ++s) scaled[s] = a * x.values[s];
        return (log_sum_exp(scaled, w) - a * L) / (a - 1.0);
    }
    const auto u = softmax_weights(x.values, w);
    switch (spec.kind()) {
        case DivergenceKind::kl: {
            const double L = log_sum_exp(x.values, w);
            return pairwise_sum(n, [&](std::size_t s) {
                return u[s] > 0.0 ? w[s] * u[s] * (x.values[s] - L) : 0.0;
            });
        }
        case DivergenceKind::chi2:
            return pairwise_sum(n, [&](std::size_t s) {
                const double d = u[s] - 1.0;
                return w[s] * d * d;
            });
        case DivergenceKind::tv:
            return pairwise_sum(n, [&](std::size_t s) { return w[s] * std::abs(u[s] - 1.0); });
        default:
            return pairwise_sum(n, [&](std::size_t s) { return w[s] * phi(spec, u[s]); });
    }
}

double tv_distance_on_grid(std::span<const double> payoff,
                           std::span<const double> log_prior,
                           std::span<const double> grid) {
    const std::size_t n = grid.size();
    if (payoff.size() != n || log_prior.size() != n || n < 2)
        throw std::invalid_argument("tv_distance_on_grid: grid size mismatch");
    std::vector<double> logq(n), trap(n);
    for (std::size_t i = 0; i < n; ++i) logq[i] = payoff[i] + log_prior[i];
    trap.front() = 0.5 * (grid[1] - grid[0]);
    trap.back() = 0.5 * (grid[n - 1] - grid[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i) trap[i] = 0.5 * (grid[i + 1] - grid[i - 1]);
    const double log_z = log_sum_exp(logq, trap);
    return pairwise_sum(n, [&](std::size_t i) {
        return trap[i] * std::abs(std::exp(logq[i] - log_z) - std::exp(log_prior[i]));
    });
}

void MisspecConfig::validate() const {
    if (n_data < 1) throw std::invalid_argument("MisspecConfig: n_data must be >= 1");
    if (s_prior < 1) throw std::invalid_argument("MisspecConfig: s_prior must be >= 1");
    if (grid_size < 2) throw std::invalid_argument("MisspecConfig: grid_size must be >= 2");
    if (!(grid_lo < grid_hi)) throw std::invalid_argument("MisspecConfig: need grid_lo < grid_hi");
    if (!(eps_multiplier > 0.0))
        throw std::invalid_argument("MisspecConfig: eps_multiplier must be positive");
    if (!(tv_epsilon > 0.0))
        throw std::invalid_argument("MisspecConfig: tv_epsilon must be positive");
    if (!(renyi_alpha > 0.0) || !(renyi_alpha < 1.0))
        throw std::invalid_argument("MisspecConfig: renyi_alpha must be in (0, 1)");
    prior.validate();
}

Dataset generate_misspec_data(const MisspecConfig& cfg) {
    cfg.validate();
    // Standard normal 5% / 95% quantiles; the noise scale is pinned to these
    // fixed thresholds, not to the realized sample.
    constexpr double kXi5 = -1.6448536270;
    constexpr double kXi95 = 1.6448536270;
    Rng rng(cfg.data_seed);
    Dataset data;
    data.records.reserve(cfg.n_data);
    for (std::size_t n = 0; n < cfg.n_data; ++n) {
        const double x = rng.normal();
        const double eta = rng.normal();
        double sigma;
        if (x < kXi5) sigma = 0.04;
        else if (x <= kXi95) sigma = 0.4;
        else sigma = 1.0;
        data.records.push_back({x, cfg.theta_star * x + sigma * eta});
    }
    return data;
}

}  // namespace cgvi
