#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cgvi/density.hpp"
#include "cgvi/numerics.hpp"
#include "cgvi/payoff.hpp"
#include "cgvi/solver.hpp"

namespace cgvi {

namespace {

bool wanted(const std::vector<std::string>& only, const std::string& method) {
    if (only.empty()) return true;
    return std::find(only.begin(), only.end(), method) != only.end();
}

std::size_t argmax_first(std::span<const double> v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

ExperimentReport run_misspec_experiment(const MisspecConfig& cfg,
                                        const std::vector<std::string>& only) {
    cfg.validate();
    for (const auto& m : only)
        if (m != "bs" && m != "kl" && m != "cs" && m != "ry" && m != "tv")
            throw std::invalid_argument("run_misspec_experiment: unknown method " + m);

    ExperimentReport report;
    report.config = cfg;

    const Dataset data = generate_misspec_data(cfg);
    const auto thetas = sample_prior(cfg.prior, cfg.s_prior, cfg.prior_seed);
    const PayoffModel model = gaussian_loglik_model();
    const EmpiricalPayoff payoffs = evaluate_payoffs(model, data, thetas);

    // Parameter grid, averaged payoff along it, and the log prior.
    report.grid.resize(cfg.grid_size);
    const double step = (cfg.grid_hi - cfg.grid_lo) / static_cast<double>(cfg.grid_size - 1);
    for (std::size_t i = 0; i < cfg.grid_size; ++i)
        report.grid[i] = cfg.grid_lo + step * static_cast<double>(i);
    const std::vector<double> grid_payoff = evaluate_payoff_grid(model, data, report.grid);
    std::vector<double> log_prior(cfg.grid_size);
    for (std::size_t i = 0; i < cfg.grid_size; ++i)
        log_prior[i] = cfg.prior.log_pdf(report.grid[i]);

    const std::size_t mle_index = argmax_first(grid_payoff);
    std::vector<double> w(payoffs.size());
    for (std::size_t s = 0; s < payoffs.size(); ++s) w[s] = payoffs.weight(s);

    const auto push_row = [&](const std::string& method, double eps, double lambda,
                              double mu, double value, double mode) {
        ExperimentRow row;
        row.method = method;
        row.epsilon = eps;
        row.mode = mode;
        row.eta = std::abs(mode - cfg.theta_star);
        row.lambda = lambda;
        row.mu = mu;
        row.value = value;
        report.rows.push_back(row);
    };

    if (wanted(only, "bs")) {
        // Exponential-tilt baseline: unit multiplier, mode of payoff + log prior.
        const double norm = log_sum_exp(payoffs.values, w);
        std::vector<double> log_post(cfg.grid_size);
        for (std::size_t i = 0; i < cfg.grid_size; ++i)
            log_post[i] = grid_payoff[i] + log_prior[i];
        const std::size_t mode_idx = argmax_first(log_post);
        push_row("bs", kNaN, 1.0, norm, norm, report.grid[mode_idx]);
        report.densities["bs"] =
            posterior_on_grid(DivergenceSpec::kl(), 0.0, 1.0, grid_payoff, log_prior,
                              report.grid)
                .normalized;
    }

    struct Method {
        const char* name;
        DivergenceSpec spec;
    };
    const Method smooth[] = {
        {"kl", DivergenceSpec::kl()},
        {"cs", DivergenceSpec::chi_squared()},
        {"ry", DivergenceSpec::renyi(cfg.renyi_alpha)},
    };
    for (const Method& m : smooth) {
        if (!wanted(only, m.name)) continue;
        const double eps = cfg.eps_multiplier * estimate_divergence_of_bayes(m.spec, payoffs);
        // Reported budgets are always the divergence radius the constraint
        // actually uses, so they are comparable across methods. For renyi
        // the solver transforms its order-alpha input to that radius
        // internally; report the transformed value.
        const double eps_row = m.spec.kind() == DivergenceKind::renyi
                                   ? renyi_radius(m.spec.alpha(), eps)
                                   : eps;
        const DualSolution sol = solve_saa(m.spec, eps, payoffs);
        double mode;
        if (sol.lambda > 0.0 && std::isfinite(sol.lambda)) {
            const GridDensity g = posterior_on_grid(m.spec, sol.mu, sol.lambda, grid_payoff,
                                                    log_prior, report.grid);
            mode = report.grid[g.mode_index];
            report.densities[m.name] = g.normalized;
        } else {
            // Degenerate budget: all mass at the payoff maximizer.
            mode = report.grid[mle_index];
        }
        push_row(m.name, eps_row, sol.lambda, sol.mu, sol.value, mode);
    }

    if (wanted(only, "tv")) {
        const DivergenceSpec spec = DivergenceSpec::total_variation();
        const double dist = tv_distance_on_grid(grid_payoff, log_prior, report.grid);
        double eps = cfg.eps_multiplier * dist;
        // At 2 the problem collapses onto point masses at the maximizers;
        // fall back to the configured budget instead.
        if (eps >= 2.0) eps = cfg.tv_epsilon;
        const DualSolution sol = solve_tv(eps, payoffs);
        // The posterior's largest mass concentration is its atom at the
        // payoff maximizer, so the mode estimate is the grid MLE.
        push_row("tv", eps, sol.lambda, sol.mu, sol.value, report.grid[mle_index]);
        const DensityWeights q = density_from_dual(spec, sol, payoffs);
        report.tv_cdf = empirical_cdf(q, payoffs, report.grid);
    }

    report.assumptions = {
        "covariates x_n are drawn iid standard normal; the noise-scale thresholds are the "
        "standard normal 5% and 95% quantiles, fixed at +-1.6448536270",
        "payoffs are averaged log-likelihoods over the dataset",
        "one prior draw set per run is reused for both budget calibration and the solves",
        "tv budget rule: twice the grid-estimated distance, replaced by the configured "
        "tv_epsilon when that product reaches the degenerate threshold 2",
        "posterior modes are estimated on the uniform parameter grid; the tv mode is the "
        "grid maximizer of the averaged payoff",
        "the renyi row reports the order-alpha divergence radius the dual constraint uses "
        "(the transform of eps_multiplier times the estimated renyi divergence), keeping "
        "all reported budgets on the same divergence-radius axis",
    };
    return report;
}

}  // namespace cgvi
