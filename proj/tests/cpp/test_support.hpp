// Shared helpers for the unit suites: an independent golden-section
// minimizer (so solver cross-checks do not reuse the library's own line
// search) and small numeric comparators.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace testsup {

// Plain golden-section minimization; independent of the library internals.
inline double golden_min_x(const std::function<double(double)>& f, double lo, double hi,
                           int iters = 200) {
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters; ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

inline double golden_min_value(const std::function<double(double)>& f, double lo, double hi,
                               int iters = 200) {
    return f(golden_min_x(f, lo, hi, iters));
}

inline double golden_max_value(const std::function<double(double)>& f, double lo, double hi,
                               int iters = 200) {
    return -golden_min_value([&](double x) { return -f(x); }, lo, hi, iters);
}

inline bool close_abs(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * (1.0 + std::abs(a) + std::abs(b));
}

}  // namespace testsup
