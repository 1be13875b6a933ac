#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cgvi/divergence.hpp"
#include "cgvi/numerics.hpp"
#include "test_support.hpp"

using namespace cgvi;

TEST_CASE("integrand values at closed-form points") {
    const auto kl = DivergenceSpec::kl();
    CHECK(phi(kl, 1.0) == 0.0);
    CHECK(phi(kl, 0.0) == 1.0);
    CHECK(std::abs(phi(kl, 2.0) - (2.0 * std::log(2.0) - 1.0)) <= 1e-15);

    const auto chi2 = DivergenceSpec::chi_squared();
    CHECK(phi(chi2, 0.0) == 1.0);
    CHECK(phi(chi2, 1.0) == 0.0);
    CHECK(phi(chi2, 3.0) == 4.0);

    const auto ry = DivergenceSpec::renyi(0.5);
    // At alpha = 1/2 the integrand reduces to (sqrt(t) - 1)^2.
    CHECK(std::abs(phi(ry, 4.0) - 1.0) <= 1e-14);
    CHECK(std::abs(phi(ry, 0.0) - 1.0) <= 1e-14);
    CHECK(std::abs(phi(ry, 1.0)) <= 1e-14);

    const auto tv = DivergenceSpec::total_variation();
    CHECK(phi(tv, 0.0) == 1.0);
    CHECK(phi(tv, 1.0) == 0.0);
    CHECK(phi(tv, 2.5) == 1.5);

    for (const auto& spec : {kl, chi2, ry, tv}) CHECK(phi(spec, -0.5) == kInf);
}

TEST_CASE("disutility values, domains, and basic shape") {
    const auto kl = DivergenceSpec::kl();
    CHECK(disutility(kl, 0.0) == 0.0);
    CHECK(std::abs(disutility(kl, 1.0) - (std::exp(1.0) - 1.0)) <= 1e-15);

    const auto chi2 = DivergenceSpec::chi_squared();
    CHECK(disutility(chi2, 0.0) == 0.0);
    CHECK(disutility(chi2, 2.0) == 3.0);
    CHECK(disutility(chi2, -2.0) == -1.0);
    CHECK(disutility(chi2, -5.0) == -1.0);

    const auto ry = DivergenceSpec::renyi(0.5);
    // At alpha = 1/2, beta = -1 and v(x) = x / (1 - x) on x < 1.
    CHECK(ry.beta() == -1.0);
    CHECK(std::abs(disutility(ry, 0.5) - 1.0) <= 1e-14);
    CHECK(disutility(ry, 0.0) == 0.0);
    CHECK(std::abs(disutility(ry, -1.0) - (-0.5)) <= 1e-15);
    CHECK(disutility(ry, 1.0) == kInf);
    CHECK(disutility(ry, 2.0) == kInf);

    const auto tv = DivergenceSpec::total_variation();
    CHECK(disutility(tv, 0.0) == 0.0);
    CHECK(std::abs(disutility(tv, -0.4) - (-0.4)) <= 1e-15);
    CHECK(disutility(tv, -3.0) == -1.0);
    CHECK(disutility(tv, 1.0) == 1.0);
    CHECK(disutility(tv, 1.5) == kInf);

    // v dominates the identity and is nondecreasing wherever finite.
    for (const auto& spec : {kl, chi2, ry, tv}) {
        double prev = -kInf;
        for (double x = -3.0; x <= 0.9; x += 0.1) {
            const double v = disutility(spec, x);
            if (!std::isfinite(v)) continue;
            CHECK(v >= x - 1e-12);
            CHECK(v >= prev - 1e-12);
            prev = v;
        }
    }
}

TEST_CASE("disutility is the convex conjugate of the integrand") {
    const auto conj = [](const DivergenceSpec& spec, double x, double t_hi) {
        return testsup::golden_max_value(
            [&](double t) { return x * t - phi(spec, t); }, 0.0, t_hi, 300);
    };
    const auto check_kind = [&](const DivergenceSpec& spec, std::vector<double> xs,
                                double t_hi) {
        for (double x : xs) {
            const double v = disutility(spec, x);
            const double g = conj(spec, x, t_hi);
            CHECK(std::abs(v - g) <= 1e-6 * (1.0 + std::abs(v)));
        }
    };
    check_kind(DivergenceSpec::kl(), {-1.5, -0.5, 0.0, 0.7, 1.8}, 1e3);
    check_kind(DivergenceSpec::chi_squared(), {-1.5, -0.5, 0.0, 0.7, 1.8}, 1e2);
    check_kind(DivergenceSpec::renyi(0.5), {-1.5, -0.5, 0.0, 0.5, 0.9}, 1e4);
    check_kind(DivergenceSpec::renyi(0.8), {-1.5, -0.5, 0.0, 0.5, 0.9}, 1e4);
    check_kind(DivergenceSpec::total_variation(), {-1.5, -0.5, 0.0, 0.5, 0.99}, 10.0);
}

TEST_CASE("disutility derivative matches central differences away from kinks") {
    const double h = 1e-6;
    const auto check_at = [&](const DivergenceSpec& spec, double x) {
        const double num = (disutility(spec, x + h) - disutility(spec, x - h)) / (2.0 * h);
        const double d = disutility_derivative(spec, x);
        CHECK(std::abs(d - num) <= 1e-6 * (1.0 + std::abs(d)));
    };
    for (double x : {-1.5, -0.5, 0.0, 0.7}) check_at(DivergenceSpec::kl(), x);
    for (double x : {-1.5, -0.5, 0.0, 0.7}) check_at(DivergenceSpec::chi_squared(), x);
    for (double x : {-1.5, -0.5, 0.0, 0.7}) check_at(DivergenceSpec::renyi(0.5), x);
    for (double x : {-0.5, 0.0, 0.7}) check_at(DivergenceSpec::total_variation(), x);

    const auto tv = DivergenceSpec::total_variation();
    CHECK(disutility_derivative(tv, -1.0) == 0.0);  // kink selection
    CHECK(disutility_derivative(tv, -2.0) == 0.0);
    CHECK(disutility_derivative(tv, 0.5) == 1.0);
    CHECK(disutility_derivative(tv, 1.0) == 1.0);
    CHECK_THROWS_AS(disutility_derivative(tv, 1.5), std::domain_error);
    CHECK_THROWS_AS(disutility_derivative(DivergenceSpec::renyi(0.5), 1.5),
                    std::domain_error);
}

TEST_CASE("perspective-of-conjugate values and closure") {
    const auto kl = DivergenceSpec::kl();
    CHECK(std::abs(perspective_conjugate(kl, 2.0, 2.0) - 2.0 * (std::exp(1.0) - 1.0)) <=
          1e-14);
    CHECK(perspective_conjugate(kl, 0.0, -1.0) == 0.0);
    CHECK(perspective_conjugate(kl, 0.0, 0.0) == 0.0);
    CHECK(perspective_conjugate(kl, 0.0, 0.5) == kInf);
    CHECK_THROWS_AS(perspective_conjugate(kl, -1.0, 0.0), std::invalid_argument);

    const auto ry = DivergenceSpec::renyi(0.5);
    CHECK(perspective_conjugate(ry, 0.0, -1.0) == 0.0);
    CHECK(perspective_conjugate(ry, 0.0, 1.0) == kInf);
    // Positive homogeneity in (lambda, x) jointly.
    const auto chi2 = DivergenceSpec::chi_squared();
    CHECK(std::abs(perspective_conjugate(chi2, 3.0, 1.2) -
                   3.0 * perspective_conjugate(chi2, 1.0, 0.4)) <= 1e-13);
}

TEST_CASE("renyi radius map") {
    CHECK(renyi_radius(0.5, 0.0) == 0.0);
    CHECK(std::abs(renyi_radius(0.5, 1.0) - 2.0 * (1.0 - std::exp(-0.5))) <= 1e-15);
    // Monotone in eps, capped at 1/(1-alpha).
    double prev = 0.0;
    for (double eps = 0.1; eps < 10.0; eps += 0.7) {
        const double r = renyi_radius(0.5, eps);
        CHECK(r > prev);
        CHECK(r < 2.0);
        prev = r;
    }
    CHECK_THROWS_AS(renyi_radius(1.2, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(renyi_radius(0.5, -0.5), std::invalid_argument);
}

TEST_CASE("spec names, parameters, and validation") {
    CHECK(DivergenceSpec::kl().name() == "kl");
    CHECK(DivergenceSpec::chi_squared().name() == "chi2");
    CHECK(DivergenceSpec::renyi(0.3).name() == "renyi");
    CHECK(DivergenceSpec::renyi(0.3).alpha() == 0.3);
    CHECK(DivergenceSpec::total_variation().name() == "tv");
    CHECK_THROWS_AS(DivergenceSpec::renyi(0.0), std::invalid_argument);
    CHECK_THROWS_AS(DivergenceSpec::renyi(1.0), std::invalid_argument);
    CHECK_THROWS_AS(DivergenceSpec::renyi(-0.2), std::invalid_argument);

    CHECK(disutility_domain_sup(DivergenceSpec::kl()) == kInf);
    CHECK(disutility_domain_sup(DivergenceSpec::chi_squared()) == kInf);
    CHECK(disutility_domain_sup(DivergenceSpec::renyi(0.5)) == 1.0);
    CHECK(disutility_domain_sup(DivergenceSpec::total_variation()) == 1.0);
}

TEST_CASE("custom disutility table mirrors the exponential pair") {
    DisutilityTable tab;
    tab.v = [](double x) { return std::expm1(x); };
    tab.v_prime = [](double x) { return std::exp(x); };
    tab.v_domain_sup = kInf;
    const auto spec = DivergenceSpec::custom(tab);
    CHECK(spec.name() == "custom");
    CHECK(disutility(spec, 0.7) == std::expm1(0.7));
    CHECK(disutility_derivative(spec, 0.7) == std::exp(0.7));
    // The numerically conjugated integrand recovers the closed form.
    const auto kl = DivergenceSpec::kl();
    for (double t : {0.2, 1.0, 2.5}) {
        CHECK(std::abs(phi(spec, t) - phi(kl, t)) <= 1e-7 * (1.0 + phi(kl, t)));
    }
    CHECK(phi(spec, -1.0) == kInf);

    DisutilityTable missing;
    missing.v = [](double x) { return x; };
    CHECK_THROWS_AS(DivergenceSpec::custom(missing), std::invalid_argument);
    CHECK_THROWS_AS(DivergenceSpec::kl().table(), std::logic_error);
}
