#include "cgvi/numerics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace cgvi {

namespace {

double pairwise_block(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_block(xs.subspan(0, h)) + pairwise_block(xs.subspan(h));
}

}  // namespace

double pairwise_sum(std::span<const double> xs) { return pairwise_block(xs); }

double pairwise_sum(std::size_t n, const std::function<double(std::size_t)>& f) {
    // Materialize then reduce; keeps the reduction order independent of f cost.
    std::vector<double> buf(n);
    for (std::size_t i = 0; i < n; ++i) buf[i] = f(i);
    return pairwise_block(buf);
}

double log_sum_exp(std::span<const double> values, std::span<const double> weights) {
    assert(values.size() == weights.size() && !values.empty());
    double m = -kInf;
    for (double v : values) m = std::max(m, v);
    if (!std::isfinite(m)) return m;  // all -inf
    std::vector<double> terms(values.size());
    for (std::size_t s = 0; s < values.size(); ++s)
        terms[s] = weights[s] * std::exp(values[s] - m);
    return m + std::log(pairwise_block(terms));
}

std::vector<double> softmax_weights(std::span<const double> values,
                                    std::span<const double> weights) {
    assert(values.size() == weights.size() && !values.empty());
    double m = -kInf;
    for (double v : values) m = std::max(m, v);
    std::vector<double> u(values.size());
    for (std::size_t s = 0; s < values.size(); ++s) u[s] = std::exp(values[s] - m);
    std::vector<double> terms(values.size());
    for (std::size_t s = 0; s < values.size(); ++s) terms[s] = weights[s] * u[s];
    const double z = pairwise_block(terms);
    for (double& x : u) x /= z;
    return u;
}

RootResult ridder_root(const std::function<double(double)>& f, double a, double b,
                       double xtol, int max_iter) {
    RootResult r;
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return {a, 0.0, 0, true};
    if (fb == 0.0) return {b, 0.0, 0, true};
    if (fa * fb > 0.0) throw std::invalid_argument("ridder_root: no sign change on bracket");
    for (int it = 1; it <= max_iter; ++it) {
        const double c = 0.5 * (a + b);
        const double fc = f(c);
        const double s = std::sqrt(fc * fc - fa * fb);
        if (s == 0.0) return {c, fc, it, true};
        const double dx = (c - a) * fc / s;
        const double x = (fa < fb) ? c - dx : c + dx;
        const double fx = f(x);
        r = {x, fx, it, false};
        if (fx == 0.0 || std::abs(b - a) <= xtol) {
            r.converged = true;
            return r;
        }
        // Keep the sign change in the tightest interval containing x.
        if (fc * fx < 0.0) {
            a = c; fa = fc; b = x; fb = fx;
        } else if (fa * fx < 0.0) {
            b = x; fb = fx;
        } else {
            a = x; fa = fx;
        }
        if (std::abs(b - a) <= xtol) {
            r = {0.5 * (a + b), f(0.5 * (a + b)), it, true};
            return r;
        }
    }
    r.converged = std::abs(b - a) <= xtol * 4;
    return r;
}

RootResult bisect_root(const std::function<double(double)>& f, double a, double b,
                       double xtol, int max_iter) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return {a, 0.0, 0, true};
    if (fb == 0.0) return {b, 0.0, 0, true};
    if (fa * fb > 0.0) throw std::invalid_argument("bisect_root: no sign change on bracket");
    int it = 0;
    while (std::abs(b - a) > xtol && it < max_iter) {
        const double c = 0.5 * (a + b);
        const double fc = f(c);
        ++it;
        if (fc == 0.0) return {c, 0.0, it, true};
        if (fa * fc < 0.0) {
            b = c; fb = fc;
        } else {
            a = c; fa = fc;
        }
    }
    const double c = 0.5 * (a + b);
    return {c, f(c), it, std::abs(b - a) <= xtol};
}

MinimizeResult brent_minimize(const std::function<double(double)>& f, double a,
                              double b, double xtol, int max_iter) {
    // Golden section with parabolic interpolation, tolerance on the bracket.
    static const double golden = 0.5 * (3.0 - std::sqrt(5.0));
    if (a > b) std::swap(a, b);
    double x = a + golden * (b - a), w = x, v = x;
    double fx = f(x), fw = fx, fv = fx;
    double d = 0.0, e = 0.0;
    int it = 0;
    for (; it < max_iter; ++it) {
        const double m = 0.5 * (a + b);
        const double tol1 = xtol * std::abs(x) + xtol * 0.1 + 1e-300;
        const double tol2 = 2.0 * tol1;
        if (std::abs(x - m) <= tol2 - 0.5 * (b - a)) break;
        bool use_golden = true;
        if (std::abs(e) > tol1) {
            // Parabola through x, v, w.
            double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::abs(q);
            const double e_old = e;
            e = d;
            if (std::abs(p) < std::abs(0.5 * q * e_old) && p > q * (a - x) &&
                p < q * (b - x)) {
                d = p / q;
                const double u = x + d;
                if (u - a < tol2 || b - u < tol2) d = (x < m) ? tol1 : -tol1;
                use_golden = false;
            }
        }
        if (use_golden) {
            e = (x < m) ? b - x : a - x;
            d = golden * e;
        }
        const double u = (std::abs(d) >= tol1) ? x + d : x + ((d > 0) ? tol1 : -tol1);
        const double fu = f(u);
        if (fu <= fx) {
            if (u < x) b = x; else a = x;
            v = w; fv = fw; w = x; fw = fx; x = u; fx = fu;
        } else {
            if (u < x) a = u; else b = u;
            if (fu <= fw || w == x) {
                v = w; fv = fw; w = u; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u; fv = fu;
            }
        }
    }
    return {x, fx, it, it < max_iter};
}

std::uint64_t Rng::next_u64() {
    // splitmix64: fully specified, identical output on every platform.
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double Rng::uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // Box-Muller on (0,1] uniforms; u > 0 guaranteed by the +1 offset trick.
    double u = 0.0;
    do { u = uniform01(); } while (u <= 0.0);
    const double v = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double two_pi = 6.283185307179586476925286766559;
    spare_ = r * std::sin(two_pi * v);
    have_spare_ = true;
    return r * std::cos(two_pi * v);
}

std::size_t Rng::index(std::size_t n) {
    assert(n > 0);
    return static_cast<std::size_t>(uniform01() * static_cast<double>(n)) % n;
}

}  // namespace cgvi
