// Command-line tool: solve constrained/penalized posterior problems over
// payoff samples, evaluate risk measures, reproduce the misspecification
// experiment, and solve the empirical-prior programs.
//
// Exit codes: 0 success, 1 usage/argument errors, 2 numeric or convergence
// diagnostics, 3 infeasibility (with a certificate on stderr).

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cgvi/density.hpp"
#include "cgvi/divergence.hpp"
#include "cgvi/empirical.hpp"
#include "cgvi/io.hpp"
#include "cgvi/payoff.hpp"
#include "cgvi/risk.hpp"
#include "cgvi/samples.hpp"
#include "cgvi/solver.hpp"

namespace fs = std::filesystem;
using namespace cgvi;

namespace {

struct GlobalArgs {
    std::string out = ".";
    std::string format = "json";
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string config;
};

DivergenceSpec make_spec(const std::string& name, double alpha) {
    if (name == "kl") return DivergenceSpec::kl();
    if (name == "chi2") return DivergenceSpec::chi_squared();
    if (name == "renyi") return DivergenceSpec::renyi(alpha);
    if (name == "tv") return DivergenceSpec::total_variation();
    throw std::invalid_argument("unknown divergence '" + name +
                                "' (expected kl, chi2, renyi, or tv)");
}

SolverOptions load_solver_options(const GlobalArgs& g) {
    if (g.config.empty()) return SolverOptions{};
    return io::solver_options_from_json(io::read_text_file(g.config));
}

std::string ensure_out_dir(const std::string& dir) {
    fs::create_directories(dir);
    return dir;
}

std::string theta_field(const EmpiricalPayoff& x, std::size_t s) {
    if (s < x.thetas.size() && !x.thetas[s].empty()) {
        const auto& th = x.thetas[s];
        if (th.size() == 1) return io::format_double(th[0]);
        std::string quoted = "\"";
        for (std::size_t k = 0; k < th.size(); ++k) {
            if (k) quoted += ',';
            quoted += io::format_double(th[k]);
        }
        quoted += '"';
        return quoted;
    }
    return std::to_string(s);
}

// Probability mass per sample (reference weight times density factor, plus
// any point mass assigned to that sample).
std::vector<double> sample_masses(const EmpiricalPayoff& x, const DensityWeights& q) {
    std::vector<double> mass(x.size());
    for (std::size_t s = 0; s < x.size(); ++s) mass[s] = x.weight(s) * q.weights[s];
    for (const auto& [index, m] : q.atoms) mass[index] += m;
    return mass;
}

void write_weights_output(const GlobalArgs& g, const EmpiricalPayoff& x,
                          const DensityWeights& q) {
    const std::string dir = ensure_out_dir(g.out);
    if (g.format == "json") {
        io::write_text_file(dir + "/weights.json", io::to_json(q));
        return;
    }
    const std::vector<double> mass = sample_masses(x, q);
    std::string csv = "theta,density\n";
    for (std::size_t s = 0; s < x.size(); ++s) {
        csv += theta_field(x, s);
        csv += ',';
        csv += io::format_double(mass[s]);
        csv += '\n';
    }
    io::write_text_file(dir + "/weights.csv", csv);
}

int finish_dual_command(const GlobalArgs& g, const DivergenceSpec& spec,
                        const EmpiricalPayoff& x, const DualSolution& sol) {
    const DensityWeights q = density_from_dual(spec, sol, x);
    const std::string dir = ensure_out_dir(g.out);
    const std::string sol_json = io::to_json(sol);
    io::write_text_file(dir + "/solution.json", sol_json);
    write_weights_output(g, x, q);
    std::cout << sol_json;
    return sol.converged ? 0 : 2;
}

std::string format_cell(double v) {
    if (std::isnan(v)) return "-";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

void print_summary_table(const ExperimentReport& report) {
    std::printf("%-8s%-16s%s\n", "method", "epsilon", "eta");
    for (const auto& row : report.rows)
        std::printf("%-8s%-16s%s\n", row.method.c_str(), format_cell(row.epsilon).c_str(),
                    format_cell(row.eta).c_str());
}

void write_experiment_outputs(const std::string& dir, const ExperimentReport& report) {
    ensure_out_dir(dir);
    io::write_text_file(dir + "/report.json", io::to_json(report));
    for (const auto& [method, density] : report.densities)
        io::write_table_csv(dir + "/density_" + method + ".csv", "theta", "density",
                            report.grid, density);
    if (!report.tv_cdf.empty()) {
        std::vector<double> thetas, values;
        thetas.reserve(report.tv_cdf.size());
        values.reserve(report.tv_cdf.size());
        for (const auto& [theta, value] : report.tv_cdf) {
            thetas.push_back(theta);
            values.push_back(value);
        }
        io::write_table_csv(dir + "/tv_cdf.csv", "theta", "cdf", thetas, values);
    }
}

int run_experiment(const GlobalArgs& g, const std::string& seeds_arg,
                   const std::vector<std::string>& only) {
    MisspecConfig cfg;
    if (!g.config.empty()) cfg = io::misspec_config_from_json(io::read_text_file(g.config));
    if (g.seed_given) {
        cfg.data_seed = g.seed;
        cfg.prior_seed = g.seed + 10000;
    }
    if (seeds_arg.empty()) {
        const ExperimentReport report = run_misspec_experiment(cfg, only);
        write_experiment_outputs(g.out, report);
        print_summary_table(report);
        return 0;
    }
    std::uint64_t lo = 0, hi = 0;
    const auto dots = seeds_arg.find("..");
    try {
        if (dots == std::string::npos) {
            lo = hi = std::stoull(seeds_arg);
        } else {
            lo = std::stoull(seeds_arg.substr(0, dots));
            hi = std::stoull(seeds_arg.substr(dots + 2));
        }
    } catch (const std::exception&) {
        throw std::invalid_argument("--seeds expects N or A..B, got '" + seeds_arg + "'");
    }
    if (hi < lo) throw std::invalid_argument("--seeds range is empty: " + seeds_arg);
    for (std::uint64_t seed = lo; seed <= hi; ++seed) {
        MisspecConfig per = cfg;
        per.data_seed = seed;
        per.prior_seed = seed + 10000;
        const ExperimentReport report = run_misspec_experiment(per, only);
        write_experiment_outputs(g.out + "/seed_" + std::to_string(seed), report);
        std::printf("seed %" PRIu64 "\n", seed);
        print_summary_table(report);
    }
    return 0;
}

int run_risk(const GlobalArgs& g, const std::string& measure, const std::string& payoffs,
             const std::string& divergence, double alpha, double beta, double sigma,
             double epsilon) {
    const EmpiricalPayoff x = io::read_payoff_csv(payoffs);
    const SolverOptions opts = load_solver_options(g);
    (void)opts;
    double value = 0.0;
    bool has_minimizer = true;
    double minimizer = 0.0;
    if (measure == "avar") {
        const RiskResult r = avar(beta, x);
        value = r.value;
        minimizer = r.minimizer;
    } else if (measure == "entropic") {
        value = entropic_risk(sigma, x);
        has_minimizer = false;
    } else if (measure == "evar") {
        const RiskResult r = coherent_risk(DivergenceSpec::kl(), epsilon, x);
        value = r.value;
        minimizer = r.minimizer;
    } else if (measure == "hmcr") {
        const RiskResult r = hmcr2(epsilon, x);
        value = r.value;
        minimizer = r.minimizer;
    } else if (measure == "oce") {
        const RiskResult r = oce_risk(make_spec(divergence, alpha), sigma, x);
        value = r.value;
        minimizer = r.minimizer;
    } else if (measure == "coherent") {
        const RiskResult r = coherent_risk(make_spec(divergence, alpha), epsilon, x);
        value = r.value;
        minimizer = r.minimizer;
    } else {
        throw std::invalid_argument(
            "unknown measure '" + measure +
            "' (expected avar, entropic, evar, hmcr, oce, or coherent)");
    }
    std::cout << "{\n  \"measure\": \"" << measure << "\",\n  \"value\": "
              << io::format_double(value);
    if (has_minimizer) std::cout << ",\n  \"minimizer\": " << io::format_double(minimizer);
    std::cout << "\n}\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coherent variational posteriors over empirical payoff samples"};
    app.require_subcommand(1);
    app.fallthrough();
    GlobalArgs g;
    app.add_option("--out", g.out, "Output directory")->capture_default_str();
    app.add_option("--format", g.format, "Weights file format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    auto* seed_opt = app.add_option("--seed", g.seed, "Seed override");
    app.add_option("--config", g.config, "JSON config file (solver options, or "
                                         "experiment/problem configuration)");

    std::string divergence = "kl", payoffs, measure, seeds_arg, problem_file;
    std::vector<std::string> only;
    double alpha = 0.5, epsilon = 0.0, sigma = 1.0, beta = 0.5;

    auto add_divergence_opts = [&](CLI::App* cmd) {
        cmd->add_option("--divergence", divergence, "kl, chi2, renyi, or tv")
            ->capture_default_str();
        cmd->add_option("--alpha", alpha, "Order for renyi")->capture_default_str();
    };

    CLI::App* solve = app.add_subcommand("solve", "Constrained posterior (budget epsilon)");
    add_divergence_opts(solve);
    solve->add_option("--epsilon", epsilon, "Divergence budget")->required();
    solve->add_option("--payoffs", payoffs, "Payoff CSV (theta,payoff)")
        ->required()
        ->check(CLI::ExistingFile);

    CLI::App* gvi = app.add_subcommand("gvi", "Penalized posterior (weight sigma)");
    add_divergence_opts(gvi);
    gvi->add_option("--sigma", sigma, "Penalty weight > 0")->required();
    gvi->add_option("--payoffs", payoffs, "Payoff CSV (theta,payoff)")
        ->required()
        ->check(CLI::ExistingFile);

    CLI::App* risk = app.add_subcommand("risk", "Evaluate a risk measure");
    risk->add_option("--measure", measure, "avar, entropic, evar, hmcr, oce, or coherent")
        ->required();
    add_divergence_opts(risk);
    risk->add_option("--beta", beta, "Tail level for avar")->capture_default_str();
    risk->add_option("--sigma", sigma, "Scale for entropic/oce")->capture_default_str();
    risk->add_option("--epsilon", epsilon, "Budget for evar/hmcr/coherent")
        ->capture_default_str();
    risk->add_option("--payoffs", payoffs, "Payoff CSV (theta,payoff)")
        ->required()
        ->check(CLI::ExistingFile);

    CLI::App* experiment =
        app.add_subcommand("experiment", "Misspecified-regression comparison");
    experiment->add_option("--seeds", seeds_arg, "Seed or range A..B; per-seed outputs");
    experiment->add_option("--only", only, "Restrict methods (bs, kl, cs, ry, tv)")
        ->delimiter(',');

    CLI::App* empirical = app.add_subcommand("empirical", "Empirical-prior programs");
    empirical->require_subcommand(1);
    CLI::App* wasserstein =
        empirical->add_subcommand("wasserstein", "Transport-ball payoff maximization");
    wasserstein->add_option("--problem", problem_file, "Problem JSON")
        ->check(CLI::ExistingFile);
    CLI::App* moments = empirical->add_subcommand("moments", "Moment-matching atom program");
    moments->add_option("--problem", problem_file, "Problem JSON")->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }
    g.seed_given = seed_opt->count() > 0;

    try {
        if (solve->parsed()) {
            const EmpiricalPayoff x = io::read_payoff_csv(payoffs);
            const DivergenceSpec spec = make_spec(divergence, alpha);
            const DualSolution sol = solve_saa(spec, epsilon, x, load_solver_options(g));
            return finish_dual_command(g, spec, x, sol);
        }
        if (gvi->parsed()) {
            const EmpiricalPayoff x = io::read_payoff_csv(payoffs);
            const DivergenceSpec spec = make_spec(divergence, alpha);
            const DualSolution sol = solve_gvi(spec, sigma, x, load_solver_options(g));
            return finish_dual_command(g, spec, x, sol);
        }
        if (risk->parsed())
            return run_risk(g, measure, payoffs, divergence, alpha, beta, sigma, epsilon);
        if (experiment->parsed()) return run_experiment(g, seeds_arg, only);
        if (wasserstein->parsed()) {
            const std::string source = !problem_file.empty() ? problem_file : g.config;
            if (source.empty())
                throw std::invalid_argument("empirical wasserstein needs --problem FILE");
            const WassersteinProblem prob =
                io::wasserstein_problem_from_json(io::read_text_file(source));
            const WassersteinSolution sol = solve_wasserstein(prob);
            const std::string json = io::to_json(sol);
            io::write_text_file(ensure_out_dir(g.out) + "/wasserstein.json", json);
            std::cout << json;
            return sol.converged ? 0 : 2;
        }
        if (moments->parsed()) {
            const std::string source = !problem_file.empty() ? problem_file : g.config;
            if (source.empty())
                throw std::invalid_argument("empirical moments needs --problem FILE");
            const MomentProblem prob =
                io::moment_problem_from_json(io::read_text_file(source));
            const MomentSolution sol = solve_moment_matching(prob);
            const std::string json = io::to_json(sol);
            io::write_text_file(ensure_out_dir(g.out) + "/moments.json", json);
            std::cout << json;
            return sol.converged ? 0 : 2;
        }
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
