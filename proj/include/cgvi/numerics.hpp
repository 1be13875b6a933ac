// Small numeric kernels shared across the library: deterministic summation,
// stabilized log-sum-exp, bracketed 1-D root finding and minimization, and a
// portable seeded RNG.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace cgvi {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Sum of a range with a fixed pairwise reduction order. Bit-stable for a
/// given input regardless of call site, and more accurate than a naive loop.
double pairwise_sum(std::span<const double> xs);

/// Pairwise-ordered sum of f(i) for i in [0, n).
double pairwise_sum(std::size_t n, const std::function<double(std::size_t)>& f);

/// log(sum_s w_s * exp(x_s)) with max-shift stabilization.
/// Weights must be positive; values may contain -inf.
double log_sum_exp(std::span<const double> values, std::span<const double> weights);

/// Tilted density u_s = exp(x_s) / sum_r w_r exp(x_r), normalized so that
/// sum_s w_s u_s = 1.
std::vector<double> softmax_weights(std::span<const double> values,
                                    std::span<const double> weights);

struct RootResult {
    double x = 0.0;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Ridder's method on [a, b]; requires f(a) and f(b) of opposite sign
/// (non-strict: a zero endpoint returns immediately).
RootResult ridder_root(const std::function<double(double)>& f, double a, double b,
                       double xtol, int max_iter = 200);

/// Plain bisection on [a, b] for monotone or merely sign-changing f.
RootResult bisect_root(const std::function<double(double)>& f, double a, double b,
                       double xtol, int max_iter = 200);

struct MinimizeResult {
    double x = 0.0;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Brent-style minimization (golden section with parabolic steps) on [a, b].
/// f may return +inf outside its effective domain; the bracket endpoints
/// should be finite-valued.
MinimizeResult brent_minimize(const std::function<double(double)>& f, double a,
                              double b, double xtol, int max_iter = 200);

/// Deterministic RNG with portable output: splitmix64 engine plus fixed
/// uniform/normal transforms (std::*_distribution is implementation defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

    std::uint64_t next_u64();
    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform01();
    double uniform(double lo, double hi);
    /// Standard normal via Box-Muller; draws are cached in pairs.
    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }
    /// Uniform index in [0, n).
    std::size_t index(std::size_t n);

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace cgvi
