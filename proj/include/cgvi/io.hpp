#pragma once

#include <span>
#include <string>

#include "cgvi/density.hpp"
#include "cgvi/divergence.hpp"
#include "cgvi/empirical.hpp"
#include "cgvi/payoff.hpp"
#include "cgvi/samples.hpp"
#include "cgvi/solver.hpp"

// Text input/output: CSV tables and JSON documents for every public type the
// command-line tool reads or writes. Emission is deterministic (no
// timestamps, shortest round-trip float text), so identical inputs produce
// byte-identical files; every emitted JSON document re-parses into the value
// that produced it.

namespace cgvi::io {

// Version string recorded in report provenance blocks. Fixed, so reports are
// reproducible byte-for-byte.
inline constexpr const char* kToolVersion = "cgvi 1.0.0";

// Shortest decimal text that round-trips to the same double (std::to_chars).
std::string format_double(double v);

// --- files ---
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// --- CSV ---

// Payoff samples: header `theta,payoff` with an optional `weight` column.
// theta may be a quoted comma-joined vector; thetas are attached to the
// samples (scalar or vector).
EmpiricalPayoff read_payoff_csv(const std::string& path);

// Writes `theta,payoff` (plus `weight` when explicit weights are present).
// Samples without attached thetas use their index as the theta column.
void write_payoff_csv(const std::string& path, const EmpiricalPayoff& x);

// Data records: header `x,z`, one scalar covariate/response pair per line.
Dataset read_dataset_csv(const std::string& path);
void write_dataset_csv(const std::string& path, const Dataset& data);

// Two-column table, e.g. `theta,density` or `theta,cdf`.
void write_table_csv(const std::string& path, const std::string& col_a,
                     const std::string& col_b, std::span<const double> a,
                     std::span<const double> b);

// --- JSON ---

std::string to_json(const DivergenceSpec& spec);
DivergenceSpec divergence_from_json(const std::string& text);

std::string to_json(const SolverOptions& opts);
SolverOptions solver_options_from_json(const std::string& text);

std::string to_json(const DualSolution& sol);
DualSolution dual_solution_from_json(const std::string& text);

std::string to_json(const DensityWeights& q);
DensityWeights density_weights_from_json(const std::string& text);

std::string to_json(const MisspecConfig& cfg);
MisspecConfig misspec_config_from_json(const std::string& text);

std::string to_json(const ExperimentReport& report);
ExperimentReport experiment_report_from_json(const std::string& text);

std::string to_json(const WassersteinSolution& sol);
std::string to_json(const MomentSolution& sol);

// Problem documents select their payoff from a named registry:
//   {"name": "quadratic", "center": [...], "scale": s}   -> -s * |theta - c|^2
//   {"name": "linear", "a": [...]}                        -> a . theta
//   {"name": "gaussian-loglik", "data": [[x..., z], ...]} -> averaged Gaussian
//                                                            log-likelihood
WassersteinProblem wasserstein_problem_from_json(const std::string& text);

// Moment features are named as {"name": "monomial", "degree": d, "dim": j}
// (theta_j^d) or {"name": "identity", "dim": j}.
MomentProblem moment_problem_from_json(const std::string& text);

}  // namespace cgvi::io
