#include "cgvi/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cgvi/numerics.hpp"
#include "cgvi/risk.hpp"

namespace cgvi {

namespace {

double payoff_range(const EmpiricalPayoff& x) { return max_value(x) - min_value(x); }

DualSolution eps_zero_solution(const EmpiricalPayoff& x) {
    const double m = weighted_mean(x);
    DualSolution sol;
    sol.mu = m;
    sol.lambda = kInf;  // budget vanishes, the multiplier escapes upward
    sol.value = m;
    sol.method = "epsilon-zero";
    sol.degenerate = true;
    return sol;
}

DualSolution constant_solution(double c) {
    DualSolution sol;
    sol.mu = c;
    sol.lambda = 1.0;
    sol.value = c;
    sol.method = "constant-payoff";
    sol.degenerate = true;
    return sol;
}

DualSolution ess_sup_solution(const EmpiricalPayoff& x, const char* method) {
    DualSolution sol;
    sol.mu = max_value(x);
    sol.lambda = 0.0;
    sol.value = sol.mu;
    sol.method = method;
    sol.degenerate = true;
    return sol;
}

// Returns a filled-in solution for the trivial cases, or nullopt-like flag.
bool trivial_cases(double eps, const EmpiricalPayoff& x, DualSolution* out) {
    if (eps < 0.0) throw std::invalid_argument("divergence budget must be nonnegative");
    x.validate();
    if (eps == 0.0) {
        *out = eps_zero_solution(x);
        return true;
    }
    const double mx = max_value(x), mn = min_value(x);
    if (mx - mn <= 1e-14 * std::max(1.0, std::abs(mx))) {
        *out = constant_solution(mx);
        return true;
    }
    return false;
}

}  // namespace

DualSolution solve_kl(double eps, const EmpiricalPayoff& x, const SolverOptions& opts) {
    DualSolution sol;
    if (trivial_cases(eps, x, &sol)) return sol;

    std::vector<double> w(x.size());
    for (std::size_t s = 0; s < x.size(); ++s) w[s] = x.weight(s);
    std::vector<double> scaled(x.size());

    const auto lse = [&](double lambda) {
        for (std::size_t s = 0; s < x.size(); ++s) scaled[s] = x.values[s] / lambda;
        return log_sum_exp(scaled, w);
    };
    // Stationarity of lambda * (eps + log E[exp(X/lambda)]):
    //   eps + log E[exp(X/lambda)] - E_p[X]/lambda,  p the tilted density.
    const auto slope = [&](double lambda) {
        for (std::size_t s = 0; s < x.size(); ++s) scaled[s] = x.values[s] / lambda;
        const double l = log_sum_exp(scaled, w);
        const auto p = softmax_weights(scaled, w);
        const double tilted_mean = pairwise_sum(
            x.size(), [&](std::size_t s) { return w[s] * p[s] * x.values[s]; });
        return eps + l - tilted_mean / lambda;
    };

    const double range = payoff_range(x);
    double lambda_lo = 1e-6 * range;
    if (slope(lambda_lo) >= 0.0) {
        // The budget admits the argmax indicator: the optimum is the sample
        // maximum approached as lambda -> 0.
        return ess_sup_solution(x, "kl-esssup");
    }
    double lambda_hi = range;
    int expand = 0;
    while (slope(lambda_hi) <= 0.0) {
        lambda_hi *= 2.0;
        if (++expand > 60 || lambda_hi > 1e9 * range) {
            sol = eps_zero_solution(x);
            sol.method = "kl-unbounded-multiplier";
            sol.converged = false;
            return sol;
        }
    }
    const auto root =
        ridder_root(slope, lambda_lo, lambda_hi, 1e-13 * (lambda_hi + 1.0), opts.max_iter);
    const double lambda = root.x;
    const double mu = lambda * lse(lambda);
    sol.mu = mu;
    sol.lambda = lambda;
    sol.value = mu + lambda * eps;
    sol.method = "kl-ridder";
    sol.iterations = root.iterations + expand;
    sol.kkt_residual = std::abs(root.fx);
    sol.converged = root.converged && sol.kkt_residual <= std::max(opts.grad_tol, 1e-7);
    return sol;
}

DualSolution solve_chi2(double eps, const EmpiricalPayoff& x, const SolverOptions& opts) {
    DualSolution sol;
    if (trivial_cases(eps, x, &sol)) return sol;

    const double root_factor = std::sqrt(1.0 + eps);
    const double mx = max_value(x), mn = min_value(x);

    const auto tail1 = [&](double a) {
        return weighted_sum(x, [&](double v) { return std::max(0.0, v - a); });
    };
    const auto tail2 = [&](double a) {
        return weighted_sum(x, [&](double v) {
            const double d = std::max(0.0, v - a);
            return d * d;
        });
    };
    const auto slope = [&](double a) {
        const double t2 = tail2(a);
        if (t2 <= 0.0) return 1.0;
        return 1.0 - root_factor * tail1(a) / std::sqrt(t2);
    };

    // Between the second largest sample and the max the derivative is constant
    // 1 - sqrt(1+eps) sqrt(argmax mass); nonpositive means the threshold runs
    // into the maximum and the value degenerates there.
    double second = -kInf;
    for (double v : x.values)
        if (v < mx) second = std::max(second, v);
    const double probe = 0.5 * (second + mx);
    if (slope(probe) <= 0.0) return ess_sup_solution(x, "chi2-esssup");

    double a_lo = mn - 1.0 - (mx - mn);
    double span = std::max(1.0, mx - mn);
    int expand = 0;
    while (slope(a_lo) >= 0.0 && expand++ < 200) {
        a_lo -= span;
        span *= 2.0;
    }
    const auto root = ridder_root(slope, a_lo, probe,
                                  1e-13 * (std::abs(mx) + std::abs(a_lo) + 1.0),
                                  opts.max_iter);
    const double a = root.x;
    const double lambda = 0.5 * tail1(a);
    sol.mu = a + 2.0 * lambda;
    sol.lambda = lambda;
    sol.value = a + root_factor * std::sqrt(tail2(a));
    sol.method = "chi2-ridder";
    sol.iterations = root.iterations + expand;
    sol.kkt_residual = std::abs(root.fx);
    sol.converged = root.converged;
    return sol;
}

DualSolution solve_tv(double eps, const EmpiricalPayoff& x, const SolverOptions& opts) {
    (void)opts;
    DualSolution sol;
    if (trivial_cases(eps, x, &sol)) return sol;

    const double mx = max_value(x);
    if (eps >= 2.0) return ess_sup_solution(x, "tv-esssup");

    const double beta = 0.5 * eps;
    const double t = weighted_quantile(x, beta);
    const double tail = weighted_sum(x, [&](double v) { return std::max(0.0, v - t); });
    const double avar_tail = t + tail / (1.0 - beta);
    sol.mu = 0.5 * (mx + t);
    sol.lambda = 0.5 * (mx - t);
    sol.value = beta * mx + (1.0 - beta) * avar_tail;
    sol.method = "tv-quantile";
    return sol;
}

namespace {

struct RenyiEval {
    double f = kInf;
    double gmu = 0.0, glam = 0.0;
    double hmm = 0.0, hml = 0.0, hll = 0.0;
    bool feasible = false;
};

RenyiEval renyi_eval(double alpha, double radius, const EmpiricalPayoff& x, double mu,
                     double lambda) {
    RenyiEval e;
    const double b = alpha / (alpha - 1.0);
    if (!(lambda > 0.0)) return e;
    const std::size_t n = x.size();
    std::vector<double> fv(n), g1(n), g2(n), h1(n), h2(n), h3(n);
    for (std::size_t s = 0; s < n; ++s) {
        const double xs = (x.values[s] - mu) / lambda;
        const double base = 1.0 + xs / b;
        if (base <= kRenyiDomainMargin) return e;  // outside the open domain
        const double w = x.weight(s);
        const double v = std::pow(base, b) - 1.0;
        const double vp = std::pow(base, b - 1.0);
        const double vpp = ((b - 1.0) / b) * std::pow(base, b - 2.0);
        fv[s] = w * v;
        g1[s] = w * vp;
        g2[s] = w * (v - xs * vp);
        h1[s] = w * vpp;
        h2[s] = w * vpp * xs;
        h3[s] = w * vpp * xs * xs;
    }
    e.f = mu + lambda * radius + lambda * pairwise_sum(fv);
    e.gmu = 1.0 - pairwise_sum(g1);
    e.glam = radius + pairwise_sum(g2);
    e.hmm = pairwise_sum(h1) / lambda;
    e.hml = pairwise_sum(h2) / lambda;
    e.hll = pairwise_sum(h3) / lambda;
    e.feasible = true;
    return e;
}

}  // namespace

DualSolution solve_renyi(double alpha, double eps, const EmpiricalPayoff& x,
                         const SolverOptions& opts) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("solve_renyi requires 0 < alpha < 1");
    DualSolution sol;
    if (trivial_cases(eps, x, &sol)) return sol;

    const double radius = renyi_radius(alpha, eps);
    const double b = alpha / (alpha - 1.0);
    const double dom = -b;
    const double mx = max_value(x);
    const double range = payoff_range(x);
    const double lambda_floor = 1e-12 * std::max(1.0, range);

    // The multiplier vanishes exactly when the minimum-divergence density
    // concentrated on the argmax set fits inside the ball; certify that on
    // the primal side instead of trusting a cornered iterate.
    {
        double w_max = 0.0;
        for (std::size_t s = 0; s < x.size(); ++s)
            if (x.values[s] == mx) w_max += x.weight(s);
        const DivergenceSpec power = DivergenceSpec::renyi(alpha);
        const double div_vertex =
            w_max * phi(power, 1.0 / w_max) + (1.0 - w_max) * phi(power, 0.0);
        if (radius >= div_vertex) return ess_sup_solution(x, "renyi-esssup");
    }

    // Keep iterates strictly inside { mu > max(X) - lambda * dom }.
    const auto project = [&](double& mu, double& lambda) {
        lambda = std::max(lambda, lambda_floor);
        const double lo = mx - lambda * dom * (1.0 - 1e-9);
        mu = std::max(mu, lo);
    };

    double mu = mx, lambda = std::max(range, 1e-3);
    project(mu, lambda);
    RenyiEval cur = renyi_eval(alpha, radius, x, mu, lambda);
    int it = 0;
    double gnorm = kInf;
    const int cap = std::max(opts.max_iter, 50);
    for (; it < cap; ++it) {
        gnorm = std::max(std::abs(cur.gmu), std::abs(cur.glam));
        if (gnorm <= opts.grad_tol) break;
        // Curvature-scaled descent direction: Newton on the 2x2 Hessian with
        // a small ridge, falling back to plain gradient when near-singular.
        const double ridge = 1e-12 * (1.0 + cur.hmm + cur.hll);
        const double a11 = cur.hmm + ridge, a12 = cur.hml, a22 = cur.hll + ridge;
        const double det = a11 * a22 - a12 * a12;
        double dmu, dlam;
        if (det > 1e-30) {
            dmu = -(a22 * cur.gmu - a12 * cur.glam) / det;
            dlam = -(a11 * cur.glam - a12 * cur.gmu) / det;
        } else {
            dmu = -cur.gmu;
            dlam = -cur.glam;
        }
        double descent = cur.gmu * dmu + cur.glam * dlam;
        if (descent >= 0.0) {  // not a descent direction, use the gradient
            dmu = -cur.gmu;
            dlam = -cur.glam;
            descent = -(cur.gmu * cur.gmu + cur.glam * cur.glam);
        }
        double step = 1.0;
        bool moved = false;
        for (int bt = 0; bt < 60; ++bt) {
            double mu_n = mu + step * dmu, lam_n = lambda + step * dlam;
            project(mu_n, lam_n);
            const RenyiEval trial = renyi_eval(alpha, radius, x, mu_n, lam_n);
            if (trial.feasible && trial.f <= cur.f + 1e-4 * step * descent) {
                mu = mu_n;
                lambda = lam_n;
                cur = trial;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
    }

    sol.mu = mu;
    sol.lambda = lambda;
    sol.value = cur.f;
    sol.method = "renyi-pg";
    sol.iterations = it;
    sol.kkt_residual = gnorm;
    sol.converged = gnorm <= std::max(opts.grad_tol, 1e-7);
    if (!sol.converged) {
        // Nested 1-D fallback polish keeps the result usable far from the
        // smooth regime (budget close to degenerate, extreme alpha).
        DualSolution fallback = solve_generic(DivergenceSpec::renyi(alpha), eps, x, opts);
        if (fallback.value < sol.value) {
            fallback.method = "renyi-pg+nested";
            return fallback;
        }
    }
    return sol;
}

DualSolution solve_generic(const DivergenceSpec& spec, double eps, const EmpiricalPayoff& x,
                           const SolverOptions& opts) {
    DualSolution sol;
    if (trivial_cases(eps, x, &sol)) return sol;

    // For renyi the budget lives on the divergence scale and must be mapped
    // to the integrand's conjugate scale, exactly as in solve_renyi.
    const double radius =
        (spec.kind() == DivergenceKind::renyi) ? renyi_radius(spec.alpha(), eps) : eps;

    const double mx = max_value(x), mn = min_value(x);
    const double range = mx - mn;
    const double scale = std::max(1.0, std::abs(mx)) + range;
    const double dom = disutility_domain_sup(spec);

    struct Inner {
        double mu;
        double f;
    };
    const auto dual_at = [&](double lambda, double mu) {
        return mu + lambda * radius + weighted_sum(x, [&](double v) {
                   return perspective_conjugate(spec, lambda, v - mu);
               });
    };
    const auto inner = [&](double lambda) -> Inner {
        double lo;
        if (std::isfinite(dom)) {
            lo = mx - lambda * dom;
            lo += std::max(1e-12 * (std::abs(lo) + 1.0), 1e-9 * lambda * std::min(dom, 1.0));
        } else {
            lo = mn - scale;
            double span = scale;
            int guard = 0;
            while (guard++ < 200) {
                const double left = dual_at(lambda, lo - span);
                if (!(left < dual_at(lambda, lo))) break;
                lo -= span;
                span *= 2.0;
            }
        }
        double hi = mx + scale;
        double span = scale;
        int guard = 0;
        while (guard++ < 200) {
            const double right = dual_at(lambda, hi + span);
            if (!(right < dual_at(lambda, hi))) break;
            hi += span;
            span *= 2.0;
        }
        const auto m = brent_minimize([&](double mu) { return dual_at(lambda, mu); }, lo, hi,
                                      1e-11, 200);
        return {m.x, m.fx};
    };

    const double lambda_lo = 1e-6 * std::max(range, 1e-12);
    const double rel_step = 1e-4;
    // Outer bracket per the doubling rule: expand lambda until the one-sided
    // difference of the reduced objective turns nonnegative.
    double lambda_hi = std::max(range, 1e-6);
    int expand = 0;
    bool bracketed = false;
    while (expand++ < 60 && lambda_hi <= 1e9 * std::max(range, 1e-12)) {
        const double f0 = inner(lambda_hi).f;
        const double f1 = inner(lambda_hi * (1.0 + rel_step)).f;
        if (f1 >= f0) {
            bracketed = true;
            break;
        }
        lambda_hi *= 2.0;
    }
    if (!bracketed) {
        sol = eps_zero_solution(x);
        sol.method = "generic-unbounded-multiplier";
        sol.converged = false;
        return sol;
    }

    // Low end: if the reduced objective is already nondecreasing at
    // lambda_lo the minimum lies between the lambda -> 0 closure (whose
    // value is the sample maximum) and lambda_lo itself.
    {
        const double f0 = inner(lambda_lo).f;
        const double f1 = inner(lambda_lo * (1.0 + rel_step)).f;
        if (f1 >= f0) {
            const auto small = brent_minimize([&](double l) { return inner(l).f; },
                                              1e-6 * lambda_lo, lambda_lo, 1e-15,
                                              opts.max_iter);
            if (mx <= small.fx) return ess_sup_solution(x, "generic-esssup");
            const Inner bi = inner(small.x);
            sol.mu = bi.mu;
            sol.lambda = small.x;
            sol.value = small.fx;
            sol.method = "generic-nested";
            sol.iterations = small.iterations;
            sol.converged = small.converged;
            return sol;
        }
    }

    const auto outer = brent_minimize([&](double l) { return inner(l).f; }, lambda_lo,
                                      lambda_hi, 1e-10, opts.max_iter);
    const Inner best = inner(outer.x);
    const double value = best.f, lambda = outer.x, mu = best.mu;
    if (mx < value) return ess_sup_solution(x, "generic-esssup");
    sol.mu = mu;
    sol.lambda = lambda;
    sol.value = value;
    sol.method = "generic-nested";
    sol.iterations = outer.iterations + expand;
    const double h = 1e-6 * (lambda + 1.0);
    sol.kkt_residual = std::abs(inner(lambda + h).f - inner(std::max(lambda - h, lambda_lo)).f) /
                       (2.0 * h);
    sol.converged = outer.converged;
    return sol;
}

DualSolution solve_gvi(const DivergenceSpec& spec, double sigma, const EmpiricalPayoff& x,
                       const SolverOptions& opts) {
    (void)opts;
    const RiskResult r = oce_risk(spec, sigma, x);
    DualSolution sol;
    sol.mu = r.minimizer;
    sol.lambda = sigma;
    sol.value = r.value;
    sol.method = "gvi-" + spec.name();
    sol.iterations = r.iterations;
    sol.converged = r.converged;
    return sol;
}

DualSolution solve_saa(const DivergenceSpec& spec, double eps, const EmpiricalPayoff& x,
                       const SolverOptions& opts) {
    DualSolution sol;
    if (trivial_cases(eps, x, &sol)) return sol;
    switch (spec.kind()) {
        case DivergenceKind::kl: return solve_kl(eps, x, opts);
        case DivergenceKind::chi2: return solve_chi2(eps, x, opts);
        case DivergenceKind::renyi: return solve_renyi(spec.alpha(), eps, x, opts);
        case DivergenceKind::tv: return solve_tv(eps, x, opts);
        case DivergenceKind::custom: return solve_generic(spec, eps, x, opts);
    }
    throw std::logic_error("solve_saa: unknown divergence kind");
}

// ---------------------------------------------------------------------------
// Primal oracle
// ---------------------------------------------------------------------------

PrimalSolution primal_oracle(const DivergenceSpec& spec, double eps, const EmpiricalPayoff& x,
                             const SolverOptions& opts) {
    if (eps < 0.0) throw std::invalid_argument("divergence budget must be nonnegative");
    if (spec.kind() == DivergenceKind::custom)
        throw std::invalid_argument("primal_oracle does not support custom divergences");
    x.validate();
    const std::size_t n = x.size();
    if (n > opts.max_oracle_size)
        throw std::invalid_argument("primal_oracle: sample count exceeds max_oracle_size");

    const double radius =
        (spec.kind() == DivergenceKind::renyi) ? renyi_radius(spec.alpha(), eps) : eps;

    std::vector<double> w(n);
    for (std::size_t s = 0; s < n; ++s) w[s] = x.weight(s);

    const auto divergence_of = [&](const std::vector<double>& p) {
        return pairwise_sum(n, [&](std::size_t s) { return w[s] * phi(spec, p[s]); });
    };
    const auto objective_of = [&](const std::vector<double>& p) {
        return pairwise_sum(n, [&](std::size_t s) { return w[s] * p[s] * x.values[s]; });
    };

    PrimalSolution out;
    out.p.assign(n, 1.0);
    if (radius == 0.0) {
        out.objective = weighted_mean(x);
        out.divergence_value = 0.0;
        return out;
    }

    // Concentrating all mass uniformly on the argmax set is the cheapest
    // density (in any phi-divergence) that attains the sample maximum. If it
    // fits inside the ball the maximum is the exact optimum.
    const double mx = max_value(x);
    double w_max = 0.0;
    for (std::size_t s = 0; s < n; ++s)
        if (x.values[s] == mx) w_max += w[s];
    {
        std::vector<double> vertex(n, 0.0);
        for (std::size_t s = 0; s < n; ++s)
            if (x.values[s] == mx) vertex[s] = 1.0 / w_max;
        const double dv = divergence_of(vertex);
        if (dv <= radius) {
            out.objective = objective_of(vertex);
            out.p = std::move(vertex);
            out.divergence_value = dv;
            out.iterations = 0;
            return out;
        }
    }

    if (spec.kind() == DivergenceKind::tv) {
        // The constraint sum_s |m_s - w_s| <= radius on the masses
        // m_s = w_s p_s is an exact transportation budget: moving delta mass
        // onto the argmax set costs 2 delta, and the gain is largest when the
        // donors are the smallest payoffs, so fill greedily from the bottom.
        const double delta = 0.5 * radius;  // < 1 - w_max here
        std::vector<double> m(w);
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return x.values[a] < x.values[b]; });
        double remaining = delta;
        for (std::size_t k = 0; k < n && remaining > 0.0; ++k) {
            const std::size_t s = order[k];
            if (x.values[s] == mx) break;
            const double take = std::min(m[s], remaining);
            m[s] -= take;
            remaining -= take;
        }
        for (std::size_t s = 0; s < n; ++s)
            if (x.values[s] == mx) m[s] += delta * w[s] / w_max;
        std::vector<double> p(n);
        for (std::size_t s = 0; s < n; ++s) p[s] = m[s] / w[s];
        out.objective = objective_of(p);
        out.divergence_value = divergence_of(p);
        out.p = std::move(p);
        out.iterations = 1;
        out.converged = out.divergence_value <= radius * (1.0 + 1e-12) + 1e-15;
        return out;
    }

    // Smooth cases: the optimal density solves the Karush-Kuhn-Tucker system
    //   p_s = (phi')^{-1}((X_s - m) / nu),  sum w p = 1,  sum w phi(p) = radius
    // with multipliers nu > 0 (ball) and m (mass). The mass is strictly
    // decreasing in m and the attained divergence strictly decreasing in nu,
    // so two nested bisections recover the exact optimum.
    const double a = spec.alpha();  // NaN unless renyi
    const auto density_at = [&](double nu, double m, std::vector<double>& p) {
        for (std::size_t s = 0; s < n; ++s) {
            const double z = (x.values[s] - m) / nu;
            switch (spec.kind()) {
                case DivergenceKind::kl: p[s] = std::exp(z); break;
                case DivergenceKind::chi2: p[s] = std::max(0.0, 1.0 + 0.5 * z); break;
                default: {  // renyi
                    const double base = 1.0 + z * (a - 1.0) / a;
                    p[s] = std::pow(base, 1.0 / (a - 1.0));
                    break;
                }
            }
        }
    };
    std::vector<double> p(n);
    const auto mass_at = [&](double nu, double m) {
        density_at(nu, m, p);
        return pairwise_sum(n, [&](std::size_t s) { return w[s] * p[s]; });
    };
    const double mn = min_value(x);
    // For a given nu, locate the mass level m with sum w p = 1. At m = max(X)
    // every coordinate is at most one, so the root lies below; expand the
    // lower end until the mass exceeds one (toward the conjugate domain edge
    // for renyi, unboundedly otherwise).
    const auto solve_mass = [&](double nu) {
        double hi = mx;
        double lo;
        if (spec.kind() == DivergenceKind::renyi) {
            const double pole = mx - nu * a / (1.0 - a);
            double frac = 0.5;
            int guard = 0;
            lo = pole + frac * (hi - pole);
            while (mass_at(nu, lo) < 1.0 && guard++ < 600) {
                frac *= 0.5;
                lo = pole + frac * (hi - pole);
            }
        } else {
            lo = mn - 1.0 - (mx - mn);
            double span = std::max(1.0, mx - mn);
            int guard = 0;
            while (mass_at(nu, lo) < 1.0 && guard++ < 200) {
                lo -= span;
                span *= 2.0;
            }
        }
        for (int i = 0; i < 90; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (mass_at(nu, mid) >= 1.0) lo = mid; else hi = mid;
        }
        return 0.5 * (lo + hi);
    };
    const auto div_at = [&](double nu) {
        const double m = solve_mass(nu);
        density_at(nu, m, p);
        return divergence_of(p);
    };

    // The divergence runs from the (infeasible) vertex level as nu -> 0 down
    // to zero as nu -> infinity; bracket and bisect to the budget.
    double nu_hi = 1.0;
    int expand = 0;
    while (div_at(nu_hi) > radius && expand++ < 120) nu_hi *= 2.0;
    double nu_lo = 0.0;
    for (int i = 0; i < 90; ++i) {
        const double nu = 0.5 * (nu_lo + nu_hi);
        if (div_at(nu) > radius) nu_lo = nu; else nu_hi = nu;
    }
    const double nu = nu_hi;  // feasible endpoint
    density_at(nu, solve_mass(nu), p);

    // Exact feasibility polish: renormalize the mass, then pull radially
    // toward the reference density if the renormalization nudged the
    // divergence past the budget (it is convex and zero at p == 1).
    const double mass = pairwise_sum(n, [&](std::size_t s) { return w[s] * p[s]; });
    for (double& v : p) v /= mass;
    if (divergence_of(p) > radius) {
        double lo = 0.0, hi = 1.0;
        for (int i = 0; i < 80; ++i) {
            const double t = 0.5 * (lo + hi);
            std::vector<double> r(n);
            for (std::size_t s = 0; s < n; ++s) r[s] = 1.0 + t * (p[s] - 1.0);
            if (divergence_of(r) <= radius) lo = t; else hi = t;
        }
        for (double& v : p) v = 1.0 + lo * (v - 1.0);
    }

    out.objective = objective_of(p);
    out.divergence_value = divergence_of(p);
    out.p = std::move(p);
    out.iterations = 90 + expand;
    out.converged = out.divergence_value <= radius * (1.0 + 1e-8) + 1e-12;
    return out;
}

}  // namespace cgvi
