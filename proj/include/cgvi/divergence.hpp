// Divergence integrands, their disutility conjugates, and the perspective
// closure used by the dual solvers.
//
// Each built-in divergence is a convex integrand phi on [0, inf) with
// phi(1) = 0, paired with its convex conjugate v = phi*, an increasing
// disutility with v(0) = 0 and v >= id. The pairs:
//
//   kl     phi(t) = t log t - t + 1          v(x) = e^x - 1
//   chi2   phi(t) = (t - 1)^2                v(x) = x + x^2/4 on x >= -2, else -1
//   renyi  phi(t) = (t^a - a t + a - 1)/(a-1) v(x) = (1 + x/b)^b - 1, b = a/(a-1)
//   tv     phi(t) = |t - 1|                  v(x) = max(0, x+1) - 1 on x <= 1, else +inf
//
// with 0 < a < 1 for renyi (so b < 0 and v has bounded domain).
#pragma once

#include <functional>
#include <optional>
#include <string>

namespace cgvi {

enum class DivergenceKind { kl, chi2, renyi, tv, custom };

/// User-supplied disutility for the custom kind. v must be convex,
/// nondecreasing, with v(0) = 0; v_prime a nondecreasing selection of its
/// subdifferential; v_domain_sup the supremum of the effective domain
/// (+inf when v is finite everywhere).
struct DisutilityTable {
    std::function<double(double)> v;
    std::function<double(double)> v_prime;
    double v_domain_sup = 0.0;
};

class DivergenceSpec {
public:
    static DivergenceSpec kl();
    static DivergenceSpec chi_squared();
    /// Requires 0 < alpha < 1.
    static DivergenceSpec renyi(double alpha);
    static DivergenceSpec total_variation();
    static DivergenceSpec custom(DisutilityTable table);

    DivergenceKind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    /// b = alpha / (alpha - 1) < 0; only meaningful for renyi.
    double beta() const { return alpha_ / (alpha_ - 1.0); }
    const DisutilityTable& table() const;
    /// Short identifier used in JSON and report rows ("kl", "chi2", ...).
    std::string name() const;

private:
    DivergenceKind kind_ = DivergenceKind::kl;
    double alpha_ = 0.5;
    std::optional<DisutilityTable> table_;
};

/// Divergence integrand phi(t). Returns +inf for t < 0 (all kinds) and for
/// points outside the effective domain. For custom specs the conjugate of
/// the stored disutility is evaluated numerically.
double phi(const DivergenceSpec& spec, double t);

/// Disutility v(x) = phi*(x). +inf outside the domain (tv: x > 1; renyi:
/// 1 + x/beta <= 1e-12).
double disutility(const DivergenceSpec& spec, double x);

/// Derivative (subgradient selection at kinks): tv returns 0 at the kink
/// x = -1 and 1 on (-1, 1]; throws std::domain_error outside the domain.
double disutility_derivative(const DivergenceSpec& spec, double x);

/// Perspective-of-conjugate (lambda phi)*(x): lambda * v(x / lambda) for
/// lambda > 0; for lambda = 0 the closure is the support function of
/// dom phi, i.e. 0 if x <= 0 and +inf otherwise. lambda < 0 throws.
double perspective_conjugate(const DivergenceSpec& spec, double lambda, double x);

/// Maps a Renyi-divergence radius eps to the equivalent alpha-divergence
/// radius used by the dual: (1 - exp((alpha - 1) eps)) / (1 - alpha).
double renyi_radius(double alpha, double eps);

/// Supremum of the effective domain of the disutility: +inf for kl and chi2,
/// |beta| for renyi, 1 for tv, the stored value for custom.
double disutility_domain_sup(const DivergenceSpec& spec);

/// Margin below which 1 + x/beta is treated as out of domain for renyi.
inline constexpr double kRenyiDomainMargin = 1e-12;

}  // namespace cgvi
