#include "cgvi/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <json.hpp>

#include "cgvi/numerics.hpp"

namespace cgvi::io {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::invalid_argument("cannot write file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

double parse_double(const std::string& text, const std::string& where) {
    const char* first = text.data();
    const char* last = first + text.size();
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    while (last > first && (last[-1] == ' ' || last[-1] == '\t' || last[-1] == '\r')) --last;
    double value = 0.0;
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last)
        throw std::invalid_argument("invalid number '" + text + "' in " + where);
    return value;
}

// Splits one CSV line honoring double quotes around a field.
std::vector<std::string> split_csv_line(const std::string& line, const std::string& where) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    if (quoted) throw std::invalid_argument("unterminated quote in " + where);
    fields.push_back(cur);
    return fields;
}

std::vector<std::string> read_lines(const std::string& path) {
    const std::string text = read_text_file(path);
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    return lines;
}

std::string trim(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    return s.substr(i);
}

}  // namespace

EmpiricalPayoff read_payoff_csv(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw std::invalid_argument("empty payoff CSV: " + path);
    const auto header = split_csv_line(lines[0], path);
    if (header.size() < 2 || trim(header[0]) != "theta" || trim(header[1]) != "payoff")
        throw std::invalid_argument("payoff CSV must start with header 'theta,payoff': " + path);
    const bool has_weight = header.size() >= 3 && trim(header[2]) == "weight";

    EmpiricalPayoff x;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (trim(lines[ln]).empty()) continue;
        const std::string where = path + ":" + std::to_string(ln + 1);
        const auto fields = split_csv_line(lines[ln], where);
        if (fields.size() < 2) throw std::invalid_argument("too few columns in " + where);
        // theta may itself be a comma-joined vector (it was quoted).
        std::vector<double> theta;
        std::stringstream ts(fields[0]);
        std::string part;
        while (std::getline(ts, part, ','))
            theta.push_back(parse_double(part, where));
        if (theta.empty()) throw std::invalid_argument("empty theta in " + where);
        x.thetas.push_back(std::move(theta));
        x.values.push_back(parse_double(fields[1], where));
        if (has_weight) {
            if (fields.size() < 3) throw std::invalid_argument("missing weight in " + where);
            x.weights.push_back(parse_double(fields[2], where));
        }
    }
    x.validate();
    return x;
}

void write_payoff_csv(const std::string& path, const EmpiricalPayoff& x) {
    std::string out = x.weights.empty() ? "theta,payoff\n" : "theta,payoff,weight\n";
    for (std::size_t s = 0; s < x.size(); ++s) {
        if (s < x.thetas.size() && !x.thetas[s].empty()) {
            const auto& th = x.thetas[s];
            if (th.size() == 1) {
                out += format_double(th[0]);
            } else {
                out += '"';
                for (std::size_t k = 0; k < th.size(); ++k) {
                    if (k) out += ',';
                    out += format_double(th[k]);
                }
                out += '"';
            }
        } else {
            out += std::to_string(s);
        }
        out += ',';
        out += format_double(x.values[s]);
        if (!x.weights.empty()) {
            out += ',';
            out += format_double(x.weights[s]);
        }
        out += '\n';
    }
    write_text_file(path, out);
}

Dataset read_dataset_csv(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw std::invalid_argument("empty dataset CSV: " + path);
    if (trim(lines[0]) != "x,z")
        throw std::invalid_argument("dataset CSV must start with header 'x,z': " + path);
    Dataset data;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (trim(lines[ln]).empty()) continue;
        const std::string where = path + ":" + std::to_string(ln + 1);
        const auto fields = split_csv_line(lines[ln], where);
        if (fields.size() != 2) throw std::invalid_argument("expected two columns in " + where);
        data.records.push_back({parse_double(fields[0], where), parse_double(fields[1], where)});
    }
    data.validate();
    return data;
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
    std::string out = "x,z\n";
    for (const auto& rec : data.records) {
        if (rec.size() != 2)
            throw std::invalid_argument("dataset CSV records must be (x, z) pairs");
        out += format_double(rec[0]);
        out += ',';
        out += format_double(rec[1]);
        out += '\n';
    }
    write_text_file(path, out);
}

void write_table_csv(const std::string& path, const std::string& col_a,
                     const std::string& col_b, std::span<const double> a,
                     std::span<const double> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("write_table_csv: column length mismatch");
    std::string out = col_a + "," + col_b + "\n";
    for (std::size_t i = 0; i < a.size(); ++i) {
        out += format_double(a[i]);
        out += ',';
        out += format_double(b[i]);
        out += '\n';
    }
    write_text_file(path, out);
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

ordered_json parse_json(const std::string& text, const char* what) {
    ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw std::invalid_argument(std::string("invalid JSON for ") + what);
    return j;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

double number_or_nan(const ordered_json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return kNaN;
    return j.at(key).get<double>();
}

ordered_json nan_to_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

ordered_json spec_to_json(const DivergenceSpec& spec) {
    ordered_json j;
    j["kind"] = spec.name();
    if (spec.kind() == DivergenceKind::renyi) j["alpha"] = spec.alpha();
    return j;
}

DivergenceSpec spec_from_json(const ordered_json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "kl") return DivergenceSpec::kl();
    if (kind == "chi2") return DivergenceSpec::chi_squared();
    if (kind == "tv") return DivergenceSpec::total_variation();
    if (kind == "renyi") {
        if (!j.contains("alpha"))
            throw std::invalid_argument("divergence 'renyi' requires \"alpha\"");
        return DivergenceSpec::renyi(j.at("alpha").get<double>());
    }
    throw std::invalid_argument("unknown divergence kind '" + kind +
                                "' (expected kl, chi2, renyi, or tv)");
}

ordered_json prior_to_json(const PriorSampler& prior) {
    ordered_json j;
    switch (prior.kind) {
        case PriorSampler::Kind::normal:
            j["kind"] = "normal";
            j["mean"] = prior.a;
            j["sd"] = prior.b;
            break;
        case PriorSampler::Kind::uniform:
            j["kind"] = "uniform";
            j["lo"] = prior.a;
            j["hi"] = prior.b;
            break;
        case PriorSampler::Kind::empirical:
            j["kind"] = "empirical";
            j["atoms"] = prior.atoms;
            break;
    }
    return j;
}

PriorSampler prior_from_json(const ordered_json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "normal")
        return PriorSampler::normal(j.at("mean").get<double>(), j.at("sd").get<double>());
    if (kind == "uniform")
        return PriorSampler::uniform(j.at("lo").get<double>(), j.at("hi").get<double>());
    if (kind == "empirical")
        return PriorSampler::empirical(j.at("atoms").get<std::vector<std::vector<double>>>());
    throw std::invalid_argument("unknown prior kind '" + kind + "'");
}

ordered_json misspec_to_json(const MisspecConfig& cfg) {
    ordered_json j;
    j["n_data"] = cfg.n_data;
    j["s_prior"] = cfg.s_prior;
    j["grid_lo"] = cfg.grid_lo;
    j["grid_hi"] = cfg.grid_hi;
    j["grid_size"] = cfg.grid_size;
    j["theta_star"] = cfg.theta_star;
    j["prior"] = prior_to_json(cfg.prior);
    j["eps_multiplier"] = cfg.eps_multiplier;
    j["tv_epsilon"] = cfg.tv_epsilon;
    j["renyi_alpha"] = cfg.renyi_alpha;
    j["data_seed"] = cfg.data_seed;
    j["prior_seed"] = cfg.prior_seed;
    return j;
}

MisspecConfig misspec_from_json(const ordered_json& j) {
    MisspecConfig cfg;  // absent fields keep their defaults
    if (j.contains("n_data")) cfg.n_data = j.at("n_data").get<std::size_t>();
    if (j.contains("s_prior")) cfg.s_prior = j.at("s_prior").get<std::size_t>();
    if (j.contains("grid_lo")) cfg.grid_lo = j.at("grid_lo").get<double>();
    if (j.contains("grid_hi")) cfg.grid_hi = j.at("grid_hi").get<double>();
    if (j.contains("grid_size")) cfg.grid_size = j.at("grid_size").get<std::size_t>();
    if (j.contains("theta_star")) cfg.theta_star = j.at("theta_star").get<double>();
    if (j.contains("prior")) cfg.prior = prior_from_json(j.at("prior"));
    if (j.contains("eps_multiplier")) cfg.eps_multiplier = j.at("eps_multiplier").get<double>();
    if (j.contains("tv_epsilon")) cfg.tv_epsilon = j.at("tv_epsilon").get<double>();
    if (j.contains("renyi_alpha")) cfg.renyi_alpha = j.at("renyi_alpha").get<double>();
    if (j.contains("data_seed")) cfg.data_seed = j.at("data_seed").get<std::uint64_t>();
    if (j.contains("prior_seed")) cfg.prior_seed = j.at("prior_seed").get<std::uint64_t>();
    cfg.validate();
    return cfg;
}

std::vector<double> payoff_point(const ordered_json& j, const char* key) {
    auto v = j.at(key).get<std::vector<double>>();
    if (v.empty()) throw std::invalid_argument(std::string(key) + " must be non-empty");
    return v;
}

// Named payoff registry shared by the Wasserstein and moment problems.
void attach_payoff(const ordered_json& j,
                   std::function<double(std::span<const double>)>* payoff,
                   std::function<std::vector<double>(std::span<const double>)>* gradient) {
    const std::string name = j.at("name").get<std::string>();
    if (name == "quadratic") {
        const std::vector<double> center = payoff_point(j, "center");
        const double scale = j.contains("scale") ? j.at("scale").get<double>() : 1.0;
        *payoff = [center, scale](std::span<const double> th) {
            double sq = 0.0;
            for (std::size_t k = 0; k < th.size(); ++k) {
                const double d = th[k] - center[k];
                sq += d * d;
            }
            return -scale * sq;
        };
        if (gradient)
            *gradient = [center, scale](std::span<const double> th) {
                std::vector<double> g(th.size());
                for (std::size_t k = 0; k < th.size(); ++k)
                    g[k] = -2.0 * scale * (th[k] - center[k]);
                return g;
            };
        return;
    }
    if (name == "linear") {
        const std::vector<double> a = payoff_point(j, "a");
        *payoff = [a](std::span<const double> th) {
            double acc = 0.0;
            for (std::size_t k = 0; k < th.size(); ++k) acc += a[k] * th[k];
            return acc;
        };
        if (gradient)
            *gradient = [a](std::span<const double>) { return a; };
        return;
    }
    if (name == "gaussian-loglik") {
        const auto data = j.at("data").get<std::vector<std::vector<double>>>();
        if (data.empty()) throw std::invalid_argument("gaussian-loglik: empty data");
        for (const auto& rec : data)
            if (rec.size() < 2)
                throw std::invalid_argument("gaussian-loglik: records need features and z");
        constexpr double kHalfLogTwoPi = 0.9189385332046727;
        *payoff = [data](std::span<const double> th) {
            double acc = 0.0;
            for (const auto& rec : data) {
                double pred = 0.0;
                for (std::size_t k = 0; k + 1 < rec.size(); ++k) pred += th[k] * rec[k];
                const double r = rec.back() - pred;
                acc += -0.5 * r * r - kHalfLogTwoPi;
            }
            return acc / static_cast<double>(data.size());
        };
        if (gradient)
            *gradient = [data](std::span<const double> th) {
                std::vector<double> g(th.size(), 0.0);
                for (const auto& rec : data) {
                    double pred = 0.0;
                    for (std::size_t k = 0; k + 1 < rec.size(); ++k) pred += th[k] * rec[k];
                    const double r = rec.back() - pred;
                    for (std::size_t k = 0; k + 1 < rec.size(); ++k) g[k] += r * rec[k];
                }
                for (double& v : g) v /= static_cast<double>(data.size());
                return g;
            };
        return;
    }
    throw std::invalid_argument("unknown payoff '" + name +
                                "' (expected quadratic, linear, or gaussian-loglik)");
}

std::function<double(std::span<const double>)> moment_feature_from_json(const ordered_json& j) {
    const std::string name = j.at("name").get<std::string>();
    const std::size_t dim = j.contains("dim") ? j.at("dim").get<std::size_t>() : 0;
    if (name == "identity")
        return [dim](std::span<const double> th) { return th[dim]; };
    if (name == "monomial") {
        const int degree = j.at("degree").get<int>();
        if (degree < 0) throw std::invalid_argument("monomial degree must be >= 0");
        return [dim, degree](std::span<const double> th) {
            return std::pow(th[dim], degree);
        };
    }
    throw std::invalid_argument("unknown moment feature '" + name +
                                "' (expected identity or monomial)");
}

}  // namespace

std::string to_json(const DivergenceSpec& spec) { return dump(spec_to_json(spec)); }

DivergenceSpec divergence_from_json(const std::string& text) {
    return spec_from_json(parse_json(text, "DivergenceSpec"));
}

std::string to_json(const SolverOptions& opts) {
    ordered_json j;
    j["value_tol"] = opts.value_tol;
    j["grad_tol"] = opts.grad_tol;
    j["gap_tol"] = opts.gap_tol;
    j["max_iter"] = opts.max_iter;
    j["max_oracle_size"] = opts.max_oracle_size;
    return dump(j);
}

SolverOptions solver_options_from_json(const std::string& text) {
    const ordered_json j = parse_json(text, "SolverOptions");
    SolverOptions opts;
    if (j.contains("value_tol")) opts.value_tol = j.at("value_tol").get<double>();
    if (j.contains("grad_tol")) opts.grad_tol = j.at("grad_tol").get<double>();
    if (j.contains("gap_tol")) opts.gap_tol = j.at("gap_tol").get<double>();
    if (j.contains("max_iter")) opts.max_iter = j.at("max_iter").get<int>();
    if (j.contains("max_oracle_size"))
        opts.max_oracle_size = j.at("max_oracle_size").get<std::size_t>();
    return opts;
}

std::string to_json(const DualSolution& sol) {
    ordered_json j;
    j["mu"] = nan_to_null(sol.mu);
    j["lambda"] = std::isinf(sol.lambda) ? ordered_json("inf") : ordered_json(sol.lambda);
    j["value"] = sol.value;
    j["method"] = sol.method;
    j["iterations"] = sol.iterations;
    j["kkt_residual"] = nan_to_null(sol.kkt_residual);
    j["degenerate"] = sol.degenerate;
    j["converged"] = sol.converged;
    return dump(j);
}

DualSolution dual_solution_from_json(const std::string& text) {
    const ordered_json j = parse_json(text, "DualSolution");
    DualSolution sol;
    sol.mu = number_or_nan(j, "mu");
    sol.lambda = j.at("lambda").is_string() ? kInf : j.at("lambda").get<double>();
    sol.value = j.at("value").get<double>();
    sol.method = j.at("method").get<std::string>();
    sol.iterations = j.at("iterations").get<int>();
    sol.kkt_residual = number_or_nan(j, "kkt_residual");
    sol.degenerate = j.at("degenerate").get<bool>();
    sol.converged = j.at("converged").get<bool>();
    return sol;
}

std::string to_json(const DensityWeights& q) {
    ordered_json j;
    j["weights"] = q.weights;
    ordered_json atoms = ordered_json::array();
    for (const auto& [index, mass] : q.atoms) atoms.push_back({index, mass});
    j["atoms"] = atoms;
    return dump(j);
}

DensityWeights density_weights_from_json(const std::string& text) {
    const ordered_json j = parse_json(text, "DensityWeights");
    DensityWeights q;
    q.weights = j.at("weights").get<std::vector<double>>();
    for (const auto& pair : j.at("atoms")) {
        if (!pair.is_array() || pair.size() != 2)
            throw std::invalid_argument("DensityWeights atoms must be [index, mass] pairs");
        q.atoms.emplace_back(pair[0].get<std::size_t>(), pair[1].get<double>());
    }
    return q;
}

std::string to_json(const MisspecConfig& cfg) { return dump(misspec_to_json(cfg)); }

MisspecConfig misspec_config_from_json(const std::string& text) {
    return misspec_from_json(parse_json(text, "MisspecConfig"));
}

std::string to_json(const ExperimentReport& report) {
    ordered_json j;
    j["config"] = misspec_to_json(report.config);
    ordered_json rows = ordered_json::array();
    for (const auto& row : report.rows) {
        ordered_json r;
        r["method"] = row.method;
        r["epsilon"] = nan_to_null(row.epsilon);
        r["eta"] = row.eta;
        r["lambda"] = std::isinf(row.lambda) ? ordered_json("inf") : ordered_json(row.lambda);
        r["mu"] = row.mu;
        rows.push_back(r);
    }
    j["rows"] = rows;
    j["assumptions"] = report.assumptions;
    ordered_json prov;
    prov["tool"] = kToolVersion;
    prov["data_seed"] = report.config.data_seed;
    prov["prior_seed"] = report.config.prior_seed;
    j["provenance"] = prov;
    return dump(j);
}

ExperimentReport experiment_report_from_json(const std::string& text) {
    const ordered_json j = parse_json(text, "ExperimentReport");
    ExperimentReport report;
    report.config = misspec_from_json(j.at("config"));
    for (const auto& r : j.at("rows")) {
        ExperimentRow row;
        row.method = r.at("method").get<std::string>();
        row.epsilon = number_or_nan(r, "epsilon");
        row.eta = r.at("eta").get<double>();
        row.lambda = r.at("lambda").is_string() ? kInf : r.at("lambda").get<double>();
        row.mu = r.at("mu").get<double>();
        report.rows.push_back(row);
    }
    report.assumptions = j.at("assumptions").get<std::vector<std::string>>();
    return report;
}

std::string to_json(const WassersteinSolution& sol) {
    ordered_json j;
    j["atoms"] = sol.atoms;
    j["value"] = sol.value;
    j["budget_used"] = sol.budget_used;
    j["iterations"] = sol.iterations;
    j["converged"] = sol.converged;
    j["concavity_warning"] = sol.concavity_warning;
    return dump(j);
}

std::string to_json(const MomentSolution& sol) {
    ordered_json j;
    j["weights"] = sol.weights;
    j["value"] = sol.value;
    j["iterations"] = sol.iterations;
    j["converged"] = sol.converged;
    return dump(j);
}

WassersteinProblem wasserstein_problem_from_json(const std::string& text) {
    const ordered_json j = parse_json(text, "WassersteinProblem");
    WassersteinProblem prob;
    prob.anchors = j.at("anchors").get<std::vector<std::vector<double>>>();
    prob.epsilon = j.at("epsilon").get<double>();
    attach_payoff(j.at("payoff"), &prob.payoff, &prob.payoff_gradient);
    prob.validate();
    return prob;
}

MomentProblem moment_problem_from_json(const std::string& text) {
    const ordered_json j = parse_json(text, "MomentProblem");
    MomentProblem prob;
    prob.candidate_atoms = j.at("atoms").get<std::vector<std::vector<double>>>();
    if (j.contains("psi"))
        for (const auto& feature : j.at("psi"))
            prob.psi.push_back(moment_feature_from_json(feature));
    if (j.contains("targets")) prob.targets = j.at("targets").get<std::vector<double>>();
    if (j.contains("tolerances"))
        prob.tolerances = j.at("tolerances").get<std::vector<double>>();
    attach_payoff(j.at("payoff"), &prob.payoff, nullptr);
    prob.validate();
    return prob;
}

}  // namespace cgvi::io
