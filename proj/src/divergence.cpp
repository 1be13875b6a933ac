#include "cgvi/divergence.hpp"

#include <cmath>
#include <stdexcept>

#include "cgvi/numerics.hpp"

namespace cgvi {

DivergenceSpec DivergenceSpec::kl() { return DivergenceSpec{}; }

DivergenceSpec DivergenceSpec::chi_squared() {
    DivergenceSpec d;
    d.kind_ = DivergenceKind::chi2;
    return d;
}

DivergenceSpec DivergenceSpec::renyi(double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("renyi divergence requires 0 < alpha < 1");
    DivergenceSpec d;
    d.kind_ = DivergenceKind::renyi;
    d.alpha_ = alpha;
    return d;
}

DivergenceSpec DivergenceSpec::total_variation() {
    DivergenceSpec d;
    d.kind_ = DivergenceKind::tv;
    return d;
}

DivergenceSpec DivergenceSpec::custom(DisutilityTable table) {
    if (!table.v || !table.v_prime)
        throw std::invalid_argument("custom divergence requires v and v_prime");
    DivergenceSpec d;
    d.kind_ = DivergenceKind::custom;
    d.table_ = std::move(table);
    return d;
}

const DisutilityTable& DivergenceSpec::table() const {
    if (!table_) throw std::logic_error("disutility table only present on custom specs");
    return *table_;
}

std::string DivergenceSpec::name() const {
    switch (kind_) {
        case DivergenceKind::kl: return "kl";
        case DivergenceKind::chi2: return "chi2";
        case DivergenceKind::renyi: return "renyi";
        case DivergenceKind::tv: return "tv";
        case DivergenceKind::custom: return "custom";
    }
    return "?";
}

namespace {

// Conjugate of a custom disutility by stationarity: v'(x) = t solved by
// bisection over the domain, falling back to the boundary when the slope
// never reaches t.
double custom_phi(const DisutilityTable& tab, double t) {
    if (t < 0.0) return kInf;
    const double hi_cap = std::isfinite(tab.v_domain_sup) ? tab.v_domain_sup : 1e12;
    // Expand a bracket [lo, hi] with v'(lo) <= t <= v'(hi).
    double lo = -1.0, hi = std::min(1.0, hi_cap - 1e-9);
    int guard = 0;
    while (tab.v_prime(lo) > t && guard++ < 200) lo *= 2.0;
    guard = 0;
    while (hi < hi_cap - 1e-9 && tab.v_prime(hi) < t && guard++ < 200)
        hi = std::min(hi * 2.0, hi_cap - 1e-9);
    double x;
    if (tab.v_prime(hi) < t) {
        x = hi;  // slope saturates below t: supremum at the domain edge
    } else {
        x = bisect_root([&](double y) { return tab.v_prime(y) - t; }, lo, hi,
                        1e-13 * (std::abs(hi) + std::abs(lo) + 1.0), 300).x;
    }
    return t * x - tab.v(x);
}

}  // namespace

double phi(const DivergenceSpec& spec, double t) {
    if (t < 0.0) return kInf;
    switch (spec.kind()) {
        case DivergenceKind::kl:
            return (t == 0.0) ? 1.0 : t * std::log(t) - t + 1.0;
        case DivergenceKind::chi2:
            return (t - 1.0) * (t - 1.0);
        case DivergenceKind::renyi: {
            const double a = spec.alpha();
            return (std::pow(t, a) - a * t + (a - 1.0)) / (a - 1.0);
        }
        case DivergenceKind::tv:
            return std::abs(t - 1.0);
        case DivergenceKind::custom:
            return custom_phi(spec.table(), t);
    }
    return kNaN;
}

double disutility(const DivergenceSpec& spec, double x) {
    switch (spec.kind()) {
        case DivergenceKind::kl:
            return std::expm1(x);
        case DivergenceKind::chi2:
            return (x >= -2.0) ? 0.25 * x * x + x : -1.0;
        case DivergenceKind::renyi: {
            const double b = spec.beta();
            const double base = 1.0 + x / b;
            if (base <= kRenyiDomainMargin) return kInf;
            return std::pow(base, b) - 1.0;
        }
        case DivergenceKind::tv:
            if (x > 1.0) return kInf;
            return std::max(0.0, x + 1.0) - 1.0;
        case DivergenceKind::custom:
            return spec.table().v(x);
    }
    return kNaN;
}

double disutility_derivative(const DivergenceSpec& spec, double x) {
    switch (spec.kind()) {
        case DivergenceKind::kl:
            return std::exp(x);
        case DivergenceKind::chi2:
            return std::max(0.0, 0.5 * x + 1.0);
        case DivergenceKind::renyi: {
            const double b = spec.beta();
            const double base = 1.0 + x / b;
            if (base <= kRenyiDomainMargin)
                throw std::domain_error("renyi disutility derivative: x outside domain");
            return std::pow(base, b - 1.0);
        }
        case DivergenceKind::tv:
            if (x > 1.0) throw std::domain_error("tv disutility derivative: x > 1");
            if (x < -1.0) return 0.0;
            if (x == -1.0) return 0.0;  // kink: take the left selection
            return 1.0;
        case DivergenceKind::custom:
            return spec.table().v_prime(x);
    }
    return kNaN;
}

double perspective_conjugate(const DivergenceSpec& spec, double lambda, double x) {
    if (lambda < 0.0) throw std::invalid_argument("perspective_conjugate: lambda < 0");
    if (lambda == 0.0) {
        // Closure: support function of dom phi, which is [0, inf) for every
        // built-in kind (bounded disutility domains make phi finite on all
        // of [0, inf); unbounded ones still contain it).
        if (spec.kind() == DivergenceKind::custom && std::isinf(spec.table().v_domain_sup)) {
            // dom phi = [0, slope cap]; support function slope_cap * x for x > 0.
            const double slope_cap = spec.table().v_prime(1e12);
            return x <= 0.0 ? 0.0 : (std::isfinite(slope_cap) ? slope_cap * x : kInf);
        }
        return x <= 0.0 ? 0.0 : kInf;
    }
    return lambda * disutility(spec, x / lambda);
}

double disutility_domain_sup(const DivergenceSpec& spec) {
    switch (spec.kind()) {
        case DivergenceKind::kl:
        case DivergenceKind::chi2:
            return kInf;
        case DivergenceKind::renyi:
            return -spec.beta();
        case DivergenceKind::tv:
            return 1.0;
        case DivergenceKind::custom:
            return spec.table().v_domain_sup;
    }
    return kNaN;
}

double renyi_radius(double alpha, double eps) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("renyi_radius requires 0 < alpha < 1");
    if (eps < 0.0) throw std::invalid_argument("renyi_radius: eps < 0");
    return -std::expm1((alpha - 1.0) * eps) / (1.0 - alpha);
}

}  // namespace cgvi
