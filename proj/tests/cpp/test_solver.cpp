#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "cgvi/density.hpp"
#include "cgvi/numerics.hpp"
#include "cgvi/risk.hpp"
#include "cgvi/solver.hpp"
#include "test_support.hpp"

using namespace cgvi;

namespace {

const EmpiricalPayoff kFour = EmpiricalPayoff::uniform({1.0, 2.0, 3.0, 4.0});

// Dual objective evaluated directly from the definition; the budget for the
// isoelastic kind is mapped to the alpha-divergence radius first, matching
// the solver contract.
double dual_objective(const DivergenceSpec& spec, double eps, const EmpiricalPayoff& x,
                      double mu, double lambda) {
    const double radius =
        spec.kind() == DivergenceKind::renyi ? renyi_radius(spec.alpha(), eps) : eps;
    return mu + lambda * radius + weighted_sum(x, [&](double v) {
               return perspective_conjugate(spec, lambda, v - mu);
           });
}

EmpiricalPayoff random_instance(std::uint64_t seed, std::size_t n) {
    Rng rng(seed);
    std::vector<double> vals(n);
    for (double& v : vals) v = rng.normal(0.0, 2.0);
    return EmpiricalPayoff::uniform(std::move(vals));
}

}  // namespace

TEST_CASE("trivial regimes: zero budget, constant payoffs, negative budget") {
    for (const auto& spec :
         {DivergenceSpec::kl(), DivergenceSpec::chi_squared(), DivergenceSpec::renyi(0.5),
          DivergenceSpec::total_variation()}) {
        const auto zero = solve_saa(spec, 0.0, kFour);
        CHECK(zero.degenerate);
        CHECK(zero.method == "epsilon-zero");
        CHECK(zero.value == 2.5);
        CHECK(std::isinf(zero.lambda));

        const auto c = solve_saa(spec, 0.5, EmpiricalPayoff::uniform({2.0, 2.0, 2.0}));
        CHECK(c.degenerate);
        CHECK(c.method == "constant-payoff");
        CHECK(c.value == 2.0);

        CHECK_THROWS_AS(solve_saa(spec, -0.1, kFour), std::invalid_argument);
    }
}

TEST_CASE("exponential-case solver against a one-dimensional oracle") {
    // Minimizing over mu in closed form reduces the dual to
    // lambda * (eps + log E exp(X / lambda)); an independent golden-section
    // scan of that reduction certifies the root-finder.
    const auto kl = DivergenceSpec::kl();
    for (std::uint64_t seed : {11u, 12u}) {
        const auto x = random_instance(seed, 12);
        const double range = max_value(x) - min_value(x);
        std::vector<double> w(x.size());
        for (std::size_t s = 0; s < x.size(); ++s) w[s] = x.weight(s);
        for (double eps : {0.1, 0.5, 1.5}) {
            const auto reduced = [&](double lambda) {
                std::vector<double> scaled(x.size());
                for (std::size_t s = 0; s < x.size(); ++s)
                    scaled[s] = x.values[s] / lambda;
                return lambda * (eps + log_sum_exp(scaled, w));
            };
            const double oracle =
                testsup::golden_min_value(reduced, 1e-6 * range, 60.0 * range, 300);
            const auto sol = solve_kl(eps, x, {});
            CHECK(sol.converged);
            CHECK(sol.method == "kl-ridder");
            CHECK(std::abs(sol.value - oracle) <= 1e-7 * (1.0 + std::abs(oracle)));
            CHECK(std::abs(dual_objective(kl, eps, x, sol.mu, sol.lambda) - sol.value) <=
                  1e-9 * (1.0 + std::abs(sol.value)));
        }
    }
}

TEST_CASE("exponential-case budget calibrated to the unit multiplier") {
    const auto x = random_instance(33, 16);
    const double eps = bayes_epsilon(x);
    const auto sol = solve_kl(eps, x, {});
    CHECK(sol.converged);
    CHECK(std::abs(sol.lambda - 1.0) <= 1e-6);
}

TEST_CASE("exponential-case degenerate budget returns the maximum") {
    const auto sol = solve_kl(50.0, kFour, {});
    CHECK(sol.degenerate);
    CHECK(sol.method == "kl-esssup");
    CHECK(sol.value == 4.0);
    CHECK(sol.lambda == 0.0);
}

TEST_CASE("quadratic-case solver against the threshold oracle") {
    const auto chi2 = DivergenceSpec::chi_squared();
    for (std::uint64_t seed : {21u, 22u}) {
        const auto x = random_instance(seed, 12);
        for (double eps : {0.1, 0.5, 1.5}) {
            const auto objective = [&](double a) {
                const double t2 = weighted_sum(x, [&](double v) {
                    const double d = std::max(0.0, v - a);
                    return d * d;
                });
                return a + std::sqrt(1.0 + eps) * std::sqrt(t2);
            };
            const double lo = min_value(x) - 5.0 * (max_value(x) - min_value(x)) - 5.0;
            const double oracle =
                testsup::golden_min_value(objective, lo, max_value(x), 300);
            const auto sol = solve_chi2(eps, x, {});
            CHECK(sol.converged);
            CHECK(std::abs(sol.value - oracle) <= 1e-9 * (1.0 + std::abs(oracle)));
            CHECK(std::abs(dual_objective(chi2, eps, x, sol.mu, sol.lambda) - sol.value) <=
                  1e-8 * (1.0 + std::abs(sol.value)));
            CHECK(std::abs(sol.value - hmcr2(eps, x).value) <=
                  1e-10 * (1.0 + std::abs(sol.value)));
        }
    }
}

TEST_CASE("polyhedral-case closed form") {
    const auto one = solve_tv(1.0, kFour, {});
    CHECK(one.method == "tv-quantile");
    CHECK(one.value == 3.75);
    CHECK(one.mu == 3.0);
    CHECK(one.lambda == 1.0);
    CHECK(std::abs(dual_objective(DivergenceSpec::total_variation(), 1.0, kFour, one.mu,
                                  one.lambda) -
                   one.value) <= 1e-14);

    const auto half = solve_tv(0.5, kFour, {});
    CHECK(half.value == 3.25);
    CHECK(half.mu == 2.5);
    CHECK(half.lambda == 1.5);

    const auto deg = solve_tv(2.0, kFour, {});
    CHECK(deg.degenerate);
    CHECK(deg.method == "tv-esssup");
    CHECK(deg.value == 4.0);
    CHECK(solve_tv(2.7, kFour, {}).value == 4.0);
}

TEST_CASE("isoelastic-case solver against a nested two-dimensional oracle") {
    for (double alpha : {0.5, 0.8}) {
        const auto spec = DivergenceSpec::renyi(alpha);
        const auto x = EmpiricalPayoff::uniform({-1.0, 0.3, 1.2, 2.0});
        const double mx = max_value(x);
        const double range = mx - min_value(x);
        const double dom = -spec.beta();
        for (double eps : {0.2, 0.6}) {
            const double radius = renyi_radius(alpha, eps);
            const auto inner = [&](double lambda) {
                const double lo = mx - lambda * dom + 1e-10 * (1.0 + lambda * dom);
                const double hi = mx + 4.0 * (range + 1.0);
                return testsup::golden_min_value(
                    [&](double mu) {
                        return mu + lambda * radius + weighted_sum(x, [&](double v) {
                                   return perspective_conjugate(spec, lambda, v - mu);
                               });
                    },
                    lo, hi, 220);
            };
            const double oracle = testsup::golden_min_value(inner, 1e-4, 50.0, 220);
            const auto sol = solve_renyi(alpha, eps, x, {});
            CHECK(sol.converged);
            CHECK(std::abs(sol.value - oracle) <= 1e-6 * (1.0 + std::abs(oracle)));
            CHECK(std::abs(dual_objective(spec, eps, x, sol.mu, sol.lambda) - sol.value) <=
                  1e-8 * (1.0 + std::abs(sol.value)));
        }
    }
}

TEST_CASE("isoelastic-case saturated budget reaches the maximum") {
    // For alpha = 1/2 the mapped radius needed to reach the point mass is
    // 2 - 2 / sqrt(S); this budget exceeds it.
    const auto sol = solve_renyi(0.5, 2.4, kFour, {});
    CHECK(std::abs(sol.value - 4.0) <= 1e-6);
}

TEST_CASE("generic nested solver agrees with the specialized routes") {
    const auto x = random_instance(55, 10);
    for (double eps : {0.3, 0.9}) {
        const auto gk = solve_generic(DivergenceSpec::kl(), eps, x, {});
        const auto sk = solve_kl(eps, x, {});
        CHECK(gk.method == "generic-nested");
        CHECK(std::abs(gk.value - sk.value) <= 1e-6 * (1.0 + std::abs(sk.value)));

        const auto gc = solve_generic(DivergenceSpec::chi_squared(), eps, x, {});
        const auto sc = solve_chi2(eps, x, {});
        CHECK(std::abs(gc.value - sc.value) <= 1e-6 * (1.0 + std::abs(sc.value)));

        const auto gt = solve_generic(DivergenceSpec::total_variation(), eps, x, {});
        const auto st = solve_tv(eps, x, {});
        CHECK(std::abs(gt.value - st.value) <= 1e-6 * (1.0 + std::abs(st.value)));

        const auto gr = solve_generic(DivergenceSpec::renyi(0.5), eps, x, {});
        const auto sr = solve_renyi(0.5, eps, x, {});
        CHECK(std::abs(gr.value - sr.value) <= 1e-6 * (1.0 + std::abs(sr.value)));
    }
}

TEST_CASE("generic solver drives custom disutilities") {
    DisutilityTable tab;
    tab.v = [](double x) { return std::expm1(x); };
    tab.v_prime = [](double x) { return std::exp(x); };
    tab.v_domain_sup = kInf;
    const auto spec = DivergenceSpec::custom(tab);
    const auto x = random_instance(77, 8);
    const auto via_custom = solve_saa(spec, 0.4, x);
    const auto via_kl = solve_kl(0.4, x, {});
    CHECK(std::abs(via_custom.value - via_kl.value) <=
          1e-6 * (1.0 + std::abs(via_kl.value)));
}

TEST_CASE("risk-regularized variant with a fixed multiplier") {
    const auto g = solve_gvi(DivergenceSpec::kl(), 1.0, kFour);
    CHECK(g.method == "gvi-kl");
    CHECK(g.lambda == 1.0);
    CHECK(std::abs(g.value - entropic_risk(1.0, kFour)) <= 1e-12);

    const auto q = solve_gvi(DivergenceSpec::chi_squared(), 2.0, kFour);
    CHECK(q.method == "gvi-chi2");
    CHECK(q.lambda == 2.0);
    CHECK(std::abs(q.value - 2.65625) <= 1e-9);  // mean + variance / (4 sigma)
}

TEST_CASE("dispatch picks the specialized route per divergence") {
    const auto x = random_instance(99, 8);
    CHECK(solve_saa(DivergenceSpec::kl(), 0.3, x).method == "kl-ridder");
    CHECK(solve_saa(DivergenceSpec::chi_squared(), 0.3, x).method == "chi2-ridder");
    CHECK(solve_saa(DivergenceSpec::total_variation(), 0.3, x).method == "tv-quantile");
    const auto ry = solve_saa(DivergenceSpec::renyi(0.5), 0.3, x);
    CHECK(ry.method.rfind("renyi-", 0) == 0);
}

TEST_CASE("primal oracle stays feasible and nearly closes the gap") {
    const auto x = random_instance(131, 24);
    for (const auto& spec :
         {DivergenceSpec::kl(), DivergenceSpec::chi_squared(), DivergenceSpec::renyi(0.5),
          DivergenceSpec::total_variation()}) {
        const double eps = 0.5;
        const double radius =
            spec.kind() == DivergenceKind::renyi ? renyi_radius(spec.alpha(), eps) : eps;
        const auto dual = solve_saa(spec, eps, x);
        const auto primal = primal_oracle(spec, eps, x);
        CHECK(primal.converged);
        CHECK(primal.divergence_value <= radius * (1.0 + 1e-8) + 1e-12);
        const double scale = 1.0 + std::abs(dual.value);
        CHECK(primal.objective <= dual.value + 1e-8 * scale);   // weak duality
        CHECK(dual.value - primal.objective <= 1e-4 * scale);   // near-tightness
    }
}

TEST_CASE("primal oracle rejects oversized instances and custom kinds") {
    std::vector<double> big(600, 0.0);
    for (std::size_t i = 0; i < big.size(); ++i) big[i] = static_cast<double>(i % 7);
    CHECK_THROWS_AS(primal_oracle(DivergenceSpec::kl(), 0.5,
                                  EmpiricalPayoff::uniform(big)),
                    std::invalid_argument);

    DisutilityTable tab;
    tab.v = [](double x) { return std::expm1(x); };
    tab.v_prime = [](double x) { return std::exp(x); };
    tab.v_domain_sup = kInf;
    CHECK_THROWS_AS(primal_oracle(DivergenceSpec::custom(tab), 0.5, kFour),
                    std::invalid_argument);
}
