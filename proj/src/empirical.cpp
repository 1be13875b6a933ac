#include "cgvi/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>

#include "cgvi/numerics.hpp"

namespace cgvi {

// ---------------------------------------------------------------------------
// Wasserstein ball: projected gradient ascent with exact ball projection
// ---------------------------------------------------------------------------

void WassersteinProblem::validate() const {
    if (anchors.empty()) throw std::invalid_argument("WassersteinProblem: no anchors");
    const std::size_t dim = anchors.front().size();
    if (dim == 0) throw std::invalid_argument("WassersteinProblem: empty anchor vector");
    for (const auto& a : anchors) {
        if (a.size() != dim)
            throw std::invalid_argument("WassersteinProblem: ragged anchor dimensions");
        for (double v : a)
            if (!std::isfinite(v))
                throw std::invalid_argument("WassersteinProblem: non-finite anchor");
    }
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
        throw std::invalid_argument("WassersteinProblem: epsilon must be nonnegative");
    if (!payoff || !payoff_gradient)
        throw std::invalid_argument("WassersteinProblem: payoff handles missing");
}

namespace {

double block_norm(std::span<const double> u) {
    double sq = 0.0;
    for (double v : u) sq += v * v;
    return std::sqrt(sq);
}

}  // namespace

WassersteinSolution solve_wasserstein(const WassersteinProblem& prob,
                                      const SolverOptions& opts) {
    prob.validate();
    const std::size_t M = prob.anchors.size();
    const std::size_t dim = prob.anchors.front().size();
    const double budget = static_cast<double>(M) * prob.epsilon;

    using Atoms = std::vector<std::vector<double>>;
    const auto average_payoff = [&](const Atoms& atoms) {
        return pairwise_sum(M, [&](std::size_t m) { return prob.payoff(atoms[m]); }) /
               static_cast<double>(M);
    };
    const auto budget_used = [&](const Atoms& atoms) {
        double total = 0.0;
        std::vector<double> u(dim);
        for (std::size_t m = 0; m < M; ++m) {
            for (std::size_t k = 0; k < dim; ++k) u[k] = atoms[m][k] - prob.anchors[m][k];
            total += block_norm(u);
        }
        return total / static_cast<double>(M);
    };

    // Exact projection onto { sum_m |theta_m - anchor_m| <= budget }: shrink
    // each displacement toward its anchor by a shared threshold nu found by
    // bisection on the piecewise-linear total distance.
    const auto project = [&](Atoms atoms) {
        std::vector<double> norms(M);
        double total = 0.0, nu_hi = 0.0;
        for (std::size_t m = 0; m < M; ++m) {
            double sq = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                const double d = atoms[m][k] - prob.anchors[m][k];
                sq += d * d;
            }
            norms[m] = std::sqrt(sq);
            total += norms[m];
            nu_hi = std::max(nu_hi, norms[m]);
        }
        if (total <= budget) return atoms;
        double nu_lo = 0.0;
        const auto dist_at = [&](double nu) {
            double d = 0.0;
            for (double nm : norms) d += std::max(0.0, nm - nu);
            return d;
        };
        for (int i = 0; i < 200; ++i) {
            const double nu = 0.5 * (nu_lo + nu_hi);
            if (dist_at(nu) > budget) nu_lo = nu; else nu_hi = nu;
            if (nu_hi - nu_lo <= 1e-15 * (1.0 + nu_hi)) break;
        }
        const double nu = nu_hi;  // feasible endpoint
        for (std::size_t m = 0; m < M; ++m) {
            const double scale = norms[m] > 0.0 ? std::max(0.0, norms[m] - nu) / norms[m] : 0.0;
            for (std::size_t k = 0; k < dim; ++k)
                atoms[m][k] = prob.anchors[m][k] +
                              scale * (atoms[m][k] - prob.anchors[m][k]);
        }
        return atoms;
    };

    WassersteinSolution sol;
    sol.atoms = prob.anchors;
    if (prob.epsilon == 0.0) {
        sol.value = average_payoff(sol.atoms);
        return sol;
    }

    Atoms theta = prob.anchors;
    double f = average_payoff(theta);
    Atoms best = theta;
    double best_f = f;
    double eta = 1.0;
    const int cap = std::max(500, 5 * opts.max_iter);
    int it = 0;
    double residual = kInf;
    for (; it < cap; ++it) {
        // Gradient of the average payoff, blockwise.
        Atoms grad(M);
        for (std::size_t m = 0; m < M; ++m) {
            grad[m] = prob.payoff_gradient(theta[m]);
            for (double& g : grad[m]) g /= static_cast<double>(M);
        }
        // First-order residual: the unit-step projected gradient mapping.
        {
            Atoms probe = theta;
            for (std::size_t m = 0; m < M; ++m)
                for (std::size_t k = 0; k < dim; ++k) probe[m][k] += grad[m][k];
            probe = project(std::move(probe));
            residual = 0.0;
            for (std::size_t m = 0; m < M; ++m)
                for (std::size_t k = 0; k < dim; ++k)
                    residual = std::max(residual, std::abs(probe[m][k] - theta[m][k]));
        }
        if (residual <= opts.grad_tol) break;

        bool moved = false;
        for (int bt = 0; bt < 60; ++bt) {
            Atoms cand = theta;
            for (std::size_t m = 0; m < M; ++m)
                for (std::size_t k = 0; k < dim; ++k) cand[m][k] += eta * grad[m][k];
            cand = project(std::move(cand));
            double step_sq = 0.0;
            for (std::size_t m = 0; m < M; ++m)
                for (std::size_t k = 0; k < dim; ++k) {
                    const double d = cand[m][k] - theta[m][k];
                    step_sq += d * d;
                }
            const double fc = average_payoff(cand);
            if (fc >= f + 1e-4 * step_sq / std::max(eta, 1e-300)) {
                theta = std::move(cand);
                f = fc;
                moved = true;
                eta *= 1.5;
                break;
            }
            eta *= 0.5;
        }
        if (f > best_f) {
            best_f = f;
            best = theta;
        }
        if (!moved) {
            // No ascent step exists at any scale; for a concave payoff with
            // this projection that can only happen at a stationary point.
            sol.concavity_warning = residual > 100.0 * opts.grad_tol;
            break;
        }
    }
    if (f > best_f) {
        best_f = f;
        best = theta;
    }
    sol.atoms = best;
    sol.value = best_f;
    sol.budget_used = budget_used(best);
    sol.iterations = it;
    sol.converged = residual <= std::max(opts.grad_tol, 1e-6) && !sol.concavity_warning;
    return sol;
}

// ---------------------------------------------------------------------------
// Moment matching: dense predictor-corrector interior point + basis polish
// ---------------------------------------------------------------------------

void MomentProblem::validate() const {
    if (candidate_atoms.empty())
        throw std::invalid_argument("MomentProblem: no candidate atoms");
    const std::size_t dim = candidate_atoms.front().size();
    for (const auto& a : candidate_atoms)
        if (a.size() != dim || a.empty())
            throw std::invalid_argument("MomentProblem: ragged candidate atoms");
    if (psi.size() != targets.size() || psi.size() != tolerances.size())
        throw std::invalid_argument("MomentProblem: moment lists misaligned");
    for (double t : tolerances)
        if (!(t >= 0.0)) throw std::invalid_argument("MomentProblem: negative tolerance");
    if (!payoff) throw std::invalid_argument("MomentProblem: payoff handle missing");
}

namespace {

// Standard-form LP: min c.x subject to A x = b, x >= 0. A is column-major.
struct DenseLP {
    std::size_t rows = 0, cols = 0;
    std::vector<double> A;  // rows * cols
    std::vector<double> b, c;

    double at(std::size_t r, std::size_t j) const { return A[j * rows + r]; }
};

struct IpmResult {
    std::vector<double> x;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
};

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Cholesky factorization in place; returns false if not positive definite.
bool cholesky(std::vector<double>& a, std::size_t m) {
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = a[i * m + j];
            for (std::size_t k = 0; k < j; ++k) sum -= a[i * m + k] * a[j * m + k];
            if (i == j) {
                if (!(sum > 0.0)) return false;
                a[i * m + i] = std::sqrt(sum);
            } else {
                a[i * m + j] = sum / a[j * m + j];
            }
        }
    }
    return true;
}

void chol_solve(const std::vector<double>& l, std::size_t m, std::vector<double>& rhs) {
    for (std::size_t i = 0; i < m; ++i) {
        double sum = rhs[i];
        for (std::size_t k = 0; k < i; ++k) sum -= l[i * m + k] * rhs[k];
        rhs[i] = sum / l[i * m + i];
    }
    for (std::size_t ii = m; ii-- > 0;) {
        double sum = rhs[ii];
        for (std::size_t k = ii + 1; k < m; ++k) sum -= l[k * m + ii] * rhs[k];
        rhs[ii] = sum / l[ii * m + ii];
    }
}

IpmResult solve_ipm(const DenseLP& lp, int max_iter = 120) {
    const std::size_t m = lp.rows, n = lp.cols;
    std::vector<double> x(n, 1.0), s(n, 1.0), y(m, 0.0);
    std::vector<double> rb(m), rc(n), dx(n), ds(n), dy(m), dxa(n), dsa(n);
    std::vector<double> mat(m * m), fac(m * m), rhs(m), d(n), rxs(n);

    const auto mul_a = [&](const std::vector<double>& v, std::vector<double>& out) {
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const double vj = v[j];
            if (vj == 0.0) continue;
            const double* col = &lp.A[j * m];
            for (std::size_t i = 0; i < m; ++i) out[i] += col[i] * vj;
        }
    };
    const auto mul_at = [&](const std::vector<double>& v, std::vector<double>& out) {
        for (std::size_t j = 0; j < n; ++j) {
            const double* col = &lp.A[j * m];
            double acc = 0.0;
            for (std::size_t i = 0; i < m; ++i) acc += col[i] * v[i];
            out[j] = acc;
        }
    };
    const auto solve_newton = [&](std::vector<double>& ox, std::vector<double>& oy,
                                  std::vector<double>& os) {
        // (A D A^T) dy = rb - A (rxs - x .* rc) / s, then back-substitute.
        std::vector<double> tmp(n);
        for (std::size_t j = 0; j < n; ++j) tmp[j] = (rxs[j] - x[j] * rc[j]) / s[j];
        mul_a(tmp, rhs);
        for (std::size_t i = 0; i < m; ++i) rhs[i] = rb[i] - rhs[i];
        chol_solve(fac, m, rhs);
        oy = rhs;
        mul_at(oy, os);
        for (std::size_t j = 0; j < n; ++j) os[j] = rc[j] - os[j];
        for (std::size_t j = 0; j < n; ++j) ox[j] = (rxs[j] - x[j] * os[j]) / s[j];
    };
    const auto max_step = [](const std::vector<double>& v, const std::vector<double>& dv) {
        double t = kInf;
        for (std::size_t j = 0; j < v.size(); ++j)
            if (dv[j] < 0.0) t = std::min(t, -v[j] / dv[j]);
        return t;
    };

    IpmResult res;
    const double bnorm = inf_norm(lp.b), cnorm = inf_norm(lp.c);
    for (int it = 0; it < max_iter; ++it) {
        mul_a(x, rb);
        for (std::size_t i = 0; i < m; ++i) rb[i] = lp.b[i] - rb[i];
        mul_at(y, rc);
        for (std::size_t j = 0; j < n; ++j) rc[j] = lp.c[j] - rc[j] - s[j];
        double mu = 0.0, obj = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            mu += x[j] * s[j];
            obj += lp.c[j] * x[j];
        }
        mu /= static_cast<double>(n);
        res.iterations = it;
        res.objective = obj;
        if (inf_norm(rb) <= 1e-9 * (1.0 + bnorm) && inf_norm(rc) <= 1e-9 * (1.0 + cnorm) &&
            mu <= 1e-11 * (1.0 + std::abs(obj))) {
            res.converged = true;
            break;
        }

        double trace = 0.0;
        for (std::size_t j = 0; j < n; ++j) d[j] = x[j] / s[j];
        std::fill(mat.begin(), mat.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const double* col = &lp.A[j * m];
            const double dj = d[j];
            for (std::size_t i = 0; i < m; ++i) {
                const double di = dj * col[i];
                if (di == 0.0) continue;
                for (std::size_t k = 0; k <= i; ++k) mat[i * m + k] += di * col[k];
            }
        }
        for (std::size_t i = 0; i < m; ++i) trace += mat[i * m + i];
        double ridge = 1e-13 * (trace / static_cast<double>(m) + 1.0);
        bool ok = false;
        for (int attempt = 0; attempt < 4 && !ok; ++attempt) {
            fac = mat;
            for (std::size_t i = 0; i < m; ++i) fac[i * m + i] += ridge;
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t k = i + 1; k < m; ++k) fac[i * m + k] = fac[k * m + i];
            ok = cholesky(fac, m);
            ridge *= 1e4;
        }
        if (!ok) break;

        // Affine-scaling predictor.
        for (std::size_t j = 0; j < n; ++j) rxs[j] = -x[j] * s[j];
        solve_newton(dxa, dy, dsa);
        const double tpa = std::min(1.0, max_step(x, dxa));
        const double tda = std::min(1.0, max_step(s, dsa));
        double mu_aff = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            mu_aff += (x[j] + tpa * dxa[j]) * (s[j] + tda * dsa[j]);
        mu_aff /= static_cast<double>(n);
        const double ratio = mu > 0.0 ? mu_aff / mu : 0.0;
        const double sigma = std::clamp(ratio * ratio * ratio, 1e-8, 1.0);

        // Centering-corrector step reusing the factorization.
        for (std::size_t j = 0; j < n; ++j)
            rxs[j] = -x[j] * s[j] - dxa[j] * dsa[j] + sigma * mu;
        solve_newton(dx, dy, ds);
        const double tp = std::min(1.0, 0.9995 * max_step(x, dx));
        const double td = std::min(1.0, 0.9995 * max_step(s, ds));
        for (std::size_t j = 0; j < n; ++j) {
            x[j] = std::max(x[j] + tp * dx[j], 1e-300);
            s[j] = std::max(s[j] + td * ds[j], 1e-300);
        }
        for (std::size_t i = 0; i < m; ++i) y[i] += td * dy[i];
    }
    res.x = std::move(x);
    return res;
}

struct MomentLpLayout {
    DenseLP lp;
    std::vector<std::string> row_names;
    std::size_t n_atoms = 0;
};

MomentLpLayout build_moment_lp(const MomentProblem& prob) {
    const std::size_t n = prob.candidate_atoms.size();
    const std::size_t nm = prob.psi.size();
    // Row 0 normalizes the weights; each moment contributes one equality row
    // (zero tolerance) or two slack-completed interval rows.
    MomentLpLayout lay;
    lay.n_atoms = n;
    lay.row_names.push_back("normalization");
    std::size_t slack_cols = 0;
    for (std::size_t k = 0; k < nm; ++k) {
        if (prob.tolerances[k] == 0.0) {
            lay.row_names.push_back("moment " + std::to_string(k) + " equality");
        } else {
            lay.row_names.push_back("moment " + std::to_string(k) + " upper");
            lay.row_names.push_back("moment " + std::to_string(k) + " lower");
            slack_cols += 2;
        }
    }
    DenseLP& lp = lay.lp;
    lp.rows = lay.row_names.size();
    lp.cols = n + slack_cols;
    lp.A.assign(lp.rows * lp.cols, 0.0);
    lp.b.assign(lp.rows, 0.0);
    lp.c.assign(lp.cols, 0.0);
    lp.b[0] = 1.0;

    std::vector<double> psi_vals(nm);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < nm; ++k) {
            psi_vals[k] = prob.psi[k](prob.candidate_atoms[j]);
            if (!std::isfinite(psi_vals[k]))
                throw std::invalid_argument("MomentProblem: non-finite moment value at atom " +
                                            std::to_string(j));
        }
        const double payoff = prob.payoff(prob.candidate_atoms[j]);
        if (!std::isfinite(payoff))
            throw std::invalid_argument("MomentProblem: non-finite payoff at atom " +
                                        std::to_string(j));
        lp.c[j] = -payoff;  // the IPM minimizes
        double* col = &lp.A[j * lp.rows];
        col[0] = 1.0;
        std::size_t row = 1;
        for (std::size_t k = 0; k < nm; ++k) {
            if (prob.tolerances[k] == 0.0) {
                col[row++] = psi_vals[k];
            } else {
                col[row++] = psi_vals[k];
                col[row++] = psi_vals[k];
            }
        }
    }
    std::size_t row = 1, slack = n;
    for (std::size_t k = 0; k < nm; ++k) {
        if (prob.tolerances[k] == 0.0) {
            lp.b[row++] = prob.targets[k];
        } else {
            // psi.alpha + u = target + tol ; psi.alpha - l = target - tol
            lp.A[slack * lp.rows + row] = 1.0;
            lp.b[row] = prob.targets[k] + prob.tolerances[k];
            ++row;
            ++slack;
            lp.A[slack * lp.rows + row] = -1.0;
            lp.b[row] = prob.targets[k] - prob.tolerances[k];
            ++row;
            ++slack;
        }
    }
    return lay;
}

// Elastic feasibility phase: min sum(v+ + v-) over the moment rows with
// A x + v+ - v- = b. The normalization row stays hard (the simplex is never
// empty), so the optimal elastic values localize the violation on the
// moment constraints themselves.
void certify_feasible(const MomentLpLayout& lay) {
    const DenseLP& base = lay.lp;
    const std::size_t elastic_rows = base.rows - 1;
    DenseLP lp;
    lp.rows = base.rows;
    lp.cols = base.cols + 2 * elastic_rows;
    lp.A.assign(lp.rows * lp.cols, 0.0);
    std::memcpy(lp.A.data(), base.A.data(), base.A.size() * sizeof(double));
    for (std::size_t i = 0; i < elastic_rows; ++i) {
        lp.A[(base.cols + 2 * i) * lp.rows + (i + 1)] = 1.0;
        lp.A[(base.cols + 2 * i + 1) * lp.rows + (i + 1)] = -1.0;
    }
    lp.b = base.b;
    lp.c.assign(lp.cols, 0.0);
    for (std::size_t j = base.cols; j < lp.cols; ++j) lp.c[j] = 1.0;

    const IpmResult res = solve_ipm(lp);
    const double scale = 1.0 + inf_norm(base.b);
    if (res.objective <= 1e-7 * scale) return;
    // Name the worst row by its elastic residual.
    std::size_t worst = 0;
    double worst_v = -1.0;
    for (std::size_t i = 0; i < elastic_rows; ++i) {
        const double v = res.x[base.cols + 2 * i] + res.x[base.cols + 2 * i + 1];
        if (v > worst_v) {
            worst_v = v;
            worst = i + 1;
        }
    }
    throw InfeasibleError("moment constraints are infeasible: " + lay.row_names[worst] +
                              " violated by " + std::to_string(worst_v),
                          lay.row_names[worst], worst_v);
}

// Drive an optimal-face iterate to a vertex: while the support has more
// columns than rows, move along a null vector of the support submatrix (in
// the non-increasing objective direction) until a component hits zero.
void purify_support(const DenseLP& lp, std::vector<double>& x) {
    const std::size_t m = lp.rows, n = lp.cols;
    for (std::size_t round = 0; round < n; ++round) {
        double xmax = 0.0;
        for (std::size_t j = 0; j < n; ++j) xmax = std::max(xmax, x[j]);
        std::vector<std::size_t> support;
        for (std::size_t j = 0; j < n; ++j)
            if (x[j] > 1e-9 * std::max(1.0, xmax)) support.push_back(j);
        const std::size_t k = support.size();
        if (k <= m) return;

        // Row echelon of A_B with partial pivoting; find a free column.
        std::vector<double> mat(m * k);
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t i = 0; i < m; ++i) mat[i * k + j] = lp.at(i, support[j]);
        std::vector<std::size_t> pivot_col;
        std::size_t row = 0;
        std::vector<bool> is_pivot(k, false);
        for (std::size_t col = 0; col < k && row < m; ++col) {
            std::size_t piv = row;
            double best = std::abs(mat[row * k + col]);
            for (std::size_t r = row + 1; r < m; ++r) {
                const double v = std::abs(mat[r * k + col]);
                if (v > best) {
                    best = v;
                    piv = r;
                }
            }
            if (best < 1e-12) continue;
            for (std::size_t c = 0; c < k; ++c) std::swap(mat[row * k + c], mat[piv * k + c]);
            for (std::size_t r = 0; r < m; ++r) {
                if (r == row) continue;
                const double f = mat[r * k + col] / mat[row * k + col];
                if (f == 0.0) continue;
                for (std::size_t c = col; c < k; ++c) mat[r * k + c] -= f * mat[row * k + c];
            }
            pivot_col.push_back(col);
            is_pivot[col] = true;
            ++row;
        }
        std::size_t free_col = k;
        for (std::size_t c = 0; c < k; ++c)
            if (!is_pivot[c]) {
                free_col = c;
                break;
            }
        if (free_col == k) return;  // full column rank after all
        std::vector<double> z(k, 0.0);
        z[free_col] = 1.0;
        for (std::size_t r = 0; r < pivot_col.size(); ++r) {
            const std::size_t c = pivot_col[r];
            z[c] = -mat[r * k + free_col] / mat[r * k + c];
        }
        double cz = 0.0;
        for (std::size_t j = 0; j < k; ++j) cz += lp.c[support[j]] * z[j];
        bool has_neg = false;
        for (double v : z) has_neg |= v < 0.0;
        if (cz > 0.0 || (cz == 0.0 && !has_neg))
            for (double& v : z) v = -v;
        double t = kInf;
        for (std::size_t j = 0; j < k; ++j)
            if (z[j] < 0.0) t = std::min(t, -x[support[j]] / z[j]);
        if (!std::isfinite(t)) return;  // unbounded ray; leave the iterate alone
        for (std::size_t j = 0; j < k; ++j)
            x[support[j]] = std::max(0.0, x[support[j]] + t * z[j]);
    }
}

// Snap the interior-point iterate to the exact vertex it approaches: solve
// the square/overdetermined system restricted to the support columns by
// Gaussian elimination and keep the result when it is feasible and at least
// as good.
bool polish_vertex(const DenseLP& lp, std::vector<double>& x, double* objective) {
    const std::size_t m = lp.rows, n = lp.cols;
    double xmax = 0.0;
    for (std::size_t j = 0; j < n; ++j) xmax = std::max(xmax, x[j]);
    std::vector<std::size_t> support;
    for (std::size_t j = 0; j < n; ++j)
        if (x[j] > 1e-7 * std::max(1.0, xmax)) support.push_back(j);
    const std::size_t k = support.size();
    if (k == 0 || k > m) return false;

    // Augmented [A_B | b] with partial pivoting.
    std::vector<double> aug(m * (k + 1));
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < m; ++i) aug[i * (k + 1) + j] = lp.at(i, support[j]);
    for (std::size_t i = 0; i < m; ++i) aug[i * (k + 1) + k] = lp.b[i];
    std::vector<std::size_t> rowperm(m);
    std::iota(rowperm.begin(), rowperm.end(), std::size_t{0});
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t piv = col;
        double best = std::abs(aug[rowperm[col] * (k + 1) + col]);
        for (std::size_t r = col + 1; r < m; ++r) {
            const double v = std::abs(aug[rowperm[r] * (k + 1) + col]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best < 1e-12) return false;  // rank-deficient support
        std::swap(rowperm[col], rowperm[piv]);
        const double* prow = &aug[rowperm[col] * (k + 1)];
        for (std::size_t r = col + 1; r < m; ++r) {
            double* row = &aug[rowperm[r] * (k + 1)];
            const double f = row[col] / prow[col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c <= k; ++c) row[c] -= f * prow[c];
        }
    }
    // Consistency of the leftover rows.
    const double bscale = 1.0 + inf_norm(lp.b);
    for (std::size_t r = k; r < m; ++r)
        if (std::abs(aug[rowperm[r] * (k + 1) + k]) > 1e-8 * bscale) return false;
    std::vector<double> xb(k);
    for (std::size_t col = k; col-- > 0;) {
        const double* row = &aug[rowperm[col] * (k + 1)];
        double sum = row[k];
        for (std::size_t c = col + 1; c < k; ++c) sum -= row[c] * xb[c];
        xb[col] = sum / row[col];
    }
    for (double v : xb)
        if (v < -1e-9) return false;

    std::vector<double> snapped(n, 0.0);
    double obj = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        const double v = std::max(0.0, xb[j]);
        snapped[support[j]] = v;
        obj += lp.c[support[j]] * v;
    }
    if (obj > *objective + 1e-7 * (1.0 + std::abs(*objective))) return false;  // worse (min)
    x = std::move(snapped);
    *objective = obj;
    return true;
}

}  // namespace

MomentSolution solve_moment_matching(const MomentProblem& prob, const SolverOptions& opts) {
    (void)opts;
    prob.validate();
    const std::size_t n = prob.candidate_atoms.size();

    MomentSolution sol;
    if (prob.psi.empty()) {
        // Simplex-only program: all mass on the first payoff maximizer.
        sol.weights.assign(n, 0.0);
        std::size_t best = 0;
        double best_v = -kInf;
        for (std::size_t j = 0; j < n; ++j) {
            const double v = prob.payoff(prob.candidate_atoms[j]);
            if (v > best_v) {
                best_v = v;
                best = j;
            }
        }
        sol.weights[best] = 1.0;
        sol.value = best_v;
        return sol;
    }

    MomentLpLayout lay = build_moment_lp(prob);
    certify_feasible(lay);
    IpmResult res = solve_ipm(lay.lp);
    double objective = res.objective;
    purify_support(lay.lp, res.x);
    polish_vertex(lay.lp, res.x, &objective);

    sol.weights.assign(res.x.begin(), res.x.begin() + static_cast<std::ptrdiff_t>(n));
    for (double& w : sol.weights)
        if (w < 1e-12) w = 0.0;
    sol.value = -pairwise_sum(n, [&](std::size_t j) { return lay.lp.c[j] * sol.weights[j]; });
    sol.iterations = res.iterations;
    sol.converged = res.converged;
    return sol;
}

}  // namespace cgvi
