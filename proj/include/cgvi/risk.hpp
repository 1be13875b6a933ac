// Risk evaluators on empirical payoff samples: optimized-certainty-equivalent
// risk for a disutility, its coherent envelope, and the classical special
// cases (entropic, average value-at-risk, second-order higher-moment risk).
#pragma once

#include "cgvi/divergence.hpp"
#include "cgvi/samples.hpp"

namespace cgvi {

struct RiskResult {
    double value = 0.0;
    double minimizer = 0.0;  // optimal shift t (or threshold a for hmcr2)
    int iterations = 0;
    bool converged = true;
};

/// min over t of t + sigma * sum_s w_s v((X_s - t)/sigma), sigma > 0.
/// Closed form for kl (log-sum-exp); 1-D bracketed search otherwise.
RiskResult oce_risk(const DivergenceSpec& spec, double sigma, const EmpiricalPayoff& x);

/// Coherent risk with divergence budget eps: the tightest upper envelope
/// inf_{lambda>0} { lambda eps + R_lambda(X) }. Delegates to the dual solver
/// and reports its value. Lies in [weighted mean, max] and is nondecreasing
/// and concave in eps.
RiskResult coherent_risk(const DivergenceSpec& spec, double eps, const EmpiricalPayoff& x);

/// Average value-at-risk at level beta in (0, 1) for the upper tail:
/// q_beta + (1-beta)^{-1} sum_s w_s max(0, X_s - q_beta), with the
/// left-continuous weighted quantile q_beta. beta = 0 gives the mean.
RiskResult avar(double beta, const EmpiricalPayoff& x);

/// Second-order higher-moment coherent risk:
/// min_a { a + sqrt(1+eps) * (sum_s w_s max(0, X_s - a)^2)^{1/2} }.
/// Equals coherent_risk(chi2, eps, x); kept as an independent route for
/// cross-checking.
RiskResult hmcr2(double eps, const EmpiricalPayoff& x);

/// sigma * log sum_s w_s exp(X_s / sigma), stabilized. sigma > 0.
double entropic_risk(double sigma, const EmpiricalPayoff& x);

}  // namespace cgvi
