#include "cgvi/risk.hpp"

#include <cmath>
#include <stdexcept>

#include "cgvi/numerics.hpp"
#include "cgvi/solver.hpp"

namespace cgvi {

namespace {

// Objective t + sigma * sum_s w_s v((X_s - t)/sigma).
double oce_objective(const DivergenceSpec& spec, double sigma, const EmpiricalPayoff& x,
                     double t) {
    const double inner = pairwise_sum(x.size(), [&](std::size_t s) {
        return x.weight(s) * disutility(spec, (x.values[s] - t) / sigma);
    });
    return t + sigma * inner;
}

// First-order residual sum_s w_s v'((X_s - t)/sigma) - 1, nonincreasing in t.
double oce_slope(const DivergenceSpec& spec, double sigma, const EmpiricalPayoff& x,
                 double t) {
    const double s1 = pairwise_sum(x.size(), [&](std::size_t s) {
        return x.weight(s) * disutility_derivative(spec, (x.values[s] - t) / sigma);
    });
    return s1 - 1.0;
}

}  // namespace

RiskResult oce_risk(const DivergenceSpec& spec, double sigma, const EmpiricalPayoff& x) {
    if (!(sigma > 0.0)) throw std::invalid_argument("oce_risk: sigma must be positive");
    x.validate();

    if (spec.kind() == DivergenceKind::kl) {
        std::vector<double> scaled(x.size());
        std::vector<double> w(x.size());
        for (std::size_t s = 0; s < x.size(); ++s) {
            scaled[s] = x.values[s] / sigma;
            w[s] = x.weight(s);
        }
        const double t = sigma * log_sum_exp(scaled, w);
        return {t, t, 0, true};  // optimal value coincides with the shift
    }

    if (spec.kind() == DivergenceKind::tv) {
        // Substituting s = t - sigma turns the problem into
        //   min_s { s + E max(0, X - s) }  s.t.  s >= max(X) - 2 sigma,
        // whose objective is flat below min(X) and increasing above it.
        const double s_bar = std::max(min_value(x), max_value(x) - 2.0 * sigma);
        const double value = s_bar + weighted_sum(x, [&](double v) {
            return std::max(0.0, v - s_bar);
        });
        return {value, s_bar + sigma, 0, true};
    }

    // Generic path: the slope is nonincreasing in t, so bracket a sign change
    // and bisect. Bounded disutility domains restrict t from below.
    const double mx = max_value(x);
    const double scale = std::max(1.0, std::abs(mx)) + (mx - min_value(x));
    const double dom = disutility_domain_sup(spec);
    double t_lo;
    if (std::isfinite(dom)) {
        t_lo = mx - sigma * dom;
        // Step inside the open domain far enough that v' is finite.
        double step = 1e-12 * (std::abs(t_lo) + 1.0);
        int guard = 0;
        while (guard++ < 60 && !(oce_slope(spec, sigma, x, t_lo + step) > 0.0)) step *= 4.0;
        if (oce_slope(spec, sigma, x, t_lo + step) <= 0.0) {
            // Minimum sits at the domain boundary.
            const double value = oce_objective(spec, sigma, x, t_lo + step);
            return {value, t_lo + step, guard, true};
        }
        t_lo += step;
    } else {
        t_lo = min_value(x);
        double span = scale;
        int guard = 0;
        while (oce_slope(spec, sigma, x, t_lo) <= 0.0 && guard++ < 200) {
            t_lo -= span;
            span *= 2.0;
        }
        if (guard >= 200) return {oce_objective(spec, sigma, x, t_lo), t_lo, guard, false};
    }
    double t_hi = mx;
    double span = scale;
    int guard = 0;
    while (oce_slope(spec, sigma, x, t_hi) >= 0.0 && guard++ < 200) {
        t_hi += span;
        span *= 2.0;
    }
    if (guard >= 200) return {oce_objective(spec, sigma, x, t_hi), t_hi, guard, false};

    const auto root = bisect_root(
        [&](double t) { return oce_slope(spec, sigma, x, t); }, t_lo, t_hi,
        1e-10 * std::max(1.0, std::abs(t_hi) + std::abs(t_lo)), 200);
    const double value = oce_objective(spec, sigma, x, root.x);
    return {value, root.x, root.iterations, root.converged};
}

RiskResult coherent_risk(const DivergenceSpec& spec, double eps, const EmpiricalPayoff& x) {
    const DualSolution sol = solve_saa(spec, eps, x, SolverOptions{});
    return {sol.value, sol.mu, sol.iterations, sol.converged};
}

RiskResult avar(double beta, const EmpiricalPayoff& x) {
    if (beta < 0.0 || beta >= 1.0) throw std::invalid_argument("avar: beta outside [0, 1)");
    x.validate();
    const double q = weighted_quantile(x, beta);
    const double tail = weighted_sum(x, [&](double v) { return std::max(0.0, v - q); });
    return {q + tail / (1.0 - beta), q, 0, true};
}

RiskResult hmcr2(double eps, const EmpiricalPayoff& x) {
    if (eps < 0.0) throw std::invalid_argument("hmcr2: eps < 0");
    x.validate();
    const double mean = weighted_mean(x);
    if (eps == 0.0) return {mean, -kInf, 0, true};  // infimum as a -> -inf

    const double root_factor = std::sqrt(1.0 + eps);
    const double mx = max_value(x);
    const double mn = min_value(x);
    if (mx == mn) return {mx, mx, 0, true};

    const auto tail2 = [&](double a) {
        return weighted_sum(x, [&](double v) {
            const double d = std::max(0.0, v - a);
            return d * d;
        });
    };
    const auto tail1 = [&](double a) {
        return weighted_sum(x, [&](double v) { return std::max(0.0, v - a); });
    };
    // Derivative of a + sqrt(1+eps) ||(X-a)_+||_2; increasing and piecewise
    // smooth below max(X).
    const auto slope = [&](double a) {
        const double t2 = tail2(a);
        if (t2 <= 0.0) return 1.0;
        return 1.0 - root_factor * tail1(a) / std::sqrt(t2);
    };

    // On (second largest, max) the derivative is the constant
    // 1 - sqrt(1+eps) sqrt(q) with q the argmax mass; if that is <= 0 the
    // minimizer is the essential supremum itself.
    double second = -kInf;
    for (double v : x.values)
        if (v < mx) second = std::max(second, v);
    const double probe = 0.5 * (second + mx);
    if (slope(probe) <= 0.0) return {mx, mx, 0, true};

    double a_lo = mn - 1.0 - (mx - mn);
    double span = std::max(1.0, mx - mn);
    int guard = 0;
    while (slope(a_lo) >= 0.0 && guard++ < 200) {
        a_lo -= span;
        span *= 2.0;
    }
    const auto root = bisect_root(slope, a_lo, probe,
                                  1e-12 * std::max(1.0, std::abs(mx) + std::abs(mn)), 200);
    const double value = root.x + root_factor * std::sqrt(tail2(root.x));
    return {value, root.x, root.iterations, root.converged};
}

double entropic_risk(double sigma, const EmpiricalPayoff& x) {
    if (!(sigma > 0.0)) throw std::invalid_argument("entropic_risk: sigma must be positive");
    x.validate();
    std::vector<double> scaled(x.size());
    std::vector<double> w(x.size());
    for (std::size_t s = 0; s < x.size(); ++s) {
        scaled[s] = x.values[s] / sigma;
        w[s] = x.weight(s);
    }
    return sigma * log_sum_exp(scaled, w);
}

}  // namespace cgvi
