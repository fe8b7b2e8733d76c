#include "scca/scca_opt.hpp"

#include <cmath>
#include <stdexcept>

namespace scca::opt {

namespace {

double soft_threshold(double t, double lambda) {
    double a = std::abs(t) - lambda;
    return a > 0 ? std::copysign(a, t) : 0.0;
}

void check_pd(const Eigen::MatrixXd& m, double min_eig, const char* name) {
    if (m.rows() != m.cols())
        throw std::invalid_argument(std::string("SccaProblem: ") + name + " not square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < min_eig)
        throw std::invalid_argument(std::string("SccaProblem: ") + name +
                                    " min eigenvalue below required floor");
}

void check_grid(const Eigen::VectorXd& g, const char* name) {
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        if (!(g(i) > 0))
            throw std::invalid_argument(std::string("SccaProblem: ") + name +
                                        " must be strictly positive");
        if (i > 0 && !(g(i) > g(i - 1)))
            throw std::invalid_argument(std::string("SccaProblem: ") + name +
                                        " must be strictly increasing");
    }
}

// Flip (w1, w2) jointly so the largest-magnitude entry of w1 is positive.
void fix_sign(Eigen::VectorXd& w1, Eigen::VectorXd& w2) {
    if (w1.size() == 0) return;
    Eigen::Index imax = 0;
    w1.cwiseAbs().maxCoeff(&imax);
    if (w1(imax) < 0) {
        w1 = -w1;
        w2 = -w2;
    }
}

}  // namespace

BicCriterion criterion_from_string(const std::string& s) {
    if (s == "bic1") return BicCriterion::bic1;
    if (s == "bic2") return BicCriterion::bic2;
    throw std::invalid_argument("unknown criterion: " + s);
}

std::string to_string(BicCriterion c) {
    return c == BicCriterion::bic1 ? "bic1" : "bic2";
}

SccaProblem::SccaProblem(Eigen::MatrixXd r1_in, Eigen::MatrixXd r2_in,
                         Eigen::MatrixXd r12_in, Eigen::VectorXd grid1,
                         Eigen::VectorXd grid2, double min_eig)
    : r1(std::move(r1_in)),
      r2(std::move(r2_in)),
      r12(std::move(r12_in)),
      lambda_grid_1(std::move(grid1)),
      lambda_grid_2(std::move(grid2)) {
    check_pd(r1, min_eig, "r1");
    check_pd(r2, min_eig, "r2");
    if (r12.rows() != r1.rows() || r12.cols() != r2.rows())
        throw std::invalid_argument("SccaProblem: r12 dimensions mismatch");
    check_grid(lambda_grid_1, "lambda_grid_1");
    check_grid(lambda_grid_2, "lambda_grid_2");
}

std::vector<int> support_of(const Eigen::VectorXd& w, double tol) {
    std::vector<int> s;
    for (Eigen::Index i = 0; i < w.size(); ++i)
        if (std::abs(w(i)) > tol) s.push_back(static_cast<int>(i));
    return s;
}

Eigen::VectorXd lasso_step(const Eigen::MatrixXd& gram, const Eigen::VectorXd& linear,
                           double lambda, int max_sweeps, double kkt_tol) {
    const Eigen::Index p = linear.size();
    if (gram.rows() != p || gram.cols() != p)
        throw std::invalid_argument("lasso_step: dimension mismatch");
    if (lambda < 0) throw std::invalid_argument("lasso_step: lambda must be >= 0");
    Eigen::VectorXd w = Eigen::VectorXd::Zero(p);
    if (p == 0 || lambda >= linear.cwiseAbs().maxCoeff()) return w;  // KKT zero certificate
    Eigen::VectorXd gw = Eigen::VectorXd::Zero(p);  // gram * w, kept incrementally
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        for (Eigen::Index i = 0; i < p; ++i) {
            double gii = gram(i, i);
            double resid = linear(i) - (gw(i) - gii * w(i));
            double w_new = soft_threshold(resid, lambda) / gii;
            double d = w_new - w(i);
            if (d != 0.0) {
                gw += d * gram.col(i);
                w(i) = w_new;
            }
        }
        // KKT residual check over all coordinates.
        double worst = 0.0;
        for (Eigen::Index i = 0; i < p; ++i) {
            double g = gw(i) - linear(i);
            double v = w(i) != 0.0 ? std::abs(g + lambda * (w(i) > 0 ? 1.0 : -1.0))
                                   : std::max(0.0, std::abs(g) - lambda);
            worst = std::max(worst, v);
        }
        if (worst <= kkt_tol) return w;
    }
    double worst = ((gram * w - linear).cwiseAbs().array() - lambda).maxCoeff();
    throw std::runtime_error("lasso_step: no convergence after " +
                             std::to_string(max_sweeps) +
                             " sweeps, residual " + std::to_string(worst));
}

Eigen::VectorXd rescale(const Eigen::VectorXd& w, const Eigen::MatrixXd& gram) {
    if (w.isZero(0.0)) return w;
    double q = w.dot(gram * w);
    return w / std::sqrt(q);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> ridge_init(const SccaProblem& problem) {
    const Eigen::Index p1 = problem.r1.rows(), p2 = problem.r2.rows();
    auto inv_sqrt = [](const Eigen::MatrixXd& m) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            m + 0.25 * Eigen::MatrixXd::Identity(m.rows(), m.cols()));
        return Eigen::MatrixXd(es.eigenvectors() *
                               es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                               es.eigenvectors().transpose());
    };
    Eigen::MatrixXd a = inv_sqrt(problem.r1);
    Eigen::MatrixXd b = inv_sqrt(problem.r2);
    Eigen::MatrixXd m = a * problem.r12 * b;
    Eigen::VectorXd w1, w2;
    if (m.isZero(1e-300)) {
        // Degenerate cross block: deterministic first-coordinate pair.
        w1 = Eigen::VectorXd::Unit(p1, 0);
        w2 = Eigen::VectorXd::Unit(p2, 0);
    } else {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        w1 = a * svd.matrixU().col(0);
        w2 = b * svd.matrixV().col(0);
    }
    w1 = rescale(w1, problem.r1);
    w2 = rescale(w2, problem.r2);
    fix_sign(w1, w2);
    return {w1, w2};
}

double bic_value(BicCriterion criterion, const Eigen::VectorXd& w_new,
                 const Eigen::VectorXd& w_other, const Eigen::MatrixXd& g_self,
                 const Eigen::MatrixXd& r12, const Eigen::MatrixXd& g_other, int n) {
    double f = w_new.dot(g_self * w_new) - 2.0 * w_new.dot(r12 * w_other) +
               w_other.dot(g_other * w_other);
    int df = static_cast<int>(support_of(w_new).size());
    double penalty = df * std::log(static_cast<double>(n)) / n;
    if (criterion == BicCriterion::bic1) return f + penalty;
    if (f <= 0.0 || df >= n)
        throw std::domain_error("bic_value: bic2 requires f > 0 and df < n");
    return std::log(static_cast<double>(n) / (n - df) * f) + penalty;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> lambda_grid(const Eigen::MatrixXd& r12,
                                                        const Eigen::VectorXd& w1_init,
                                                        const Eigen::VectorXd& w2_init,
                                                        int count, double eps) {
    if (count < 1) throw std::invalid_argument("lambda_grid: count must be >= 1");
    if (!(eps > 0 && eps < 1)) throw std::invalid_argument("lambda_grid: eps in (0,1)");
    double max1 = (r12 * w2_init).cwiseAbs().maxCoeff();
    double max2 = (r12.transpose() * w1_init).cwiseAbs().maxCoeff();
    if (max1 <= 0 || max2 <= 0)
        throw std::invalid_argument("lambda_grid: degenerate init pair");
    auto make = [&](double lmax) {
        Eigen::VectorXd g(count);
        if (count == 1) {
            g(0) = lmax;
            return g;
        }
        double llo = std::log(eps * lmax), lhi = std::log(lmax);
        for (int i = 0; i < count; ++i)
            g(i) = std::exp(llo + (lhi - llo) * i / (count - 1));
        g(0) = eps * lmax;  // exact endpoints
        g(count - 1) = lmax;
        return g;
    };
    return {make(max1), make(max2)};
}

namespace {

// One BIC-selected half-step. Returns the unrescaled minimizer and the
// selected lambda (smallest lambda wins ties).
std::pair<Eigen::VectorXd, double> select_half_step(
    const Eigen::MatrixXd& g_self, const Eigen::MatrixXd& r12,
    const Eigen::MatrixXd& g_other, const Eigen::VectorXd& w_other,
    const Eigen::VectorXd& grid, BicCriterion criterion, int n) {
    Eigen::VectorXd c = r12 * w_other;
    double best_bic = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_w;
    double best_lambda = grid(0);
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        Eigen::VectorXd w = lasso_step(g_self, c, grid(i));
        double bic;
        try {
            bic = bic_value(criterion, w, w_other, g_self, r12, g_other, n);
        } catch (const std::domain_error&) {
            continue;
        }
        if (bic < best_bic) {
            best_bic = bic;
            best_w = w;
            best_lambda = grid(i);
        }
    }
    if (best_w.size() == 0)
        throw std::runtime_error("fit_pair: no admissible lambda in grid");
    return {best_w, best_lambda};
}

CanonicalPair zero_pair(Eigen::Index p1, Eigen::Index p2, double l1, double l2,
                        int iters) {
    CanonicalPair out;
    out.w1 = Eigen::VectorXd::Zero(p1);
    out.w2 = Eigen::VectorXd::Zero(p2);
    out.objective = 0.0;
    out.lambda1 = l1;
    out.lambda2 = l2;
    out.iterations = iters;
    out.converged = true;
    return out;
}

CanonicalPair run_alternation(
    const SccaProblem& problem, int n, std::optional<BicCriterion> criterion,
    double fixed_l1, double fixed_l2,
    std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>> init, int max_outer,
    double tol) {
    const Eigen::Index p1 = problem.r1.rows(), p2 = problem.r2.rows();
    auto [w1, w2] = init ? *init : ridge_init(problem);
    if (w1.size() != p1 || w2.size() != p2)
        throw std::invalid_argument("fit_pair: init dimension mismatch");
    double l1 = fixed_l1, l2 = fixed_l2;
    CanonicalPair out;
    out.converged = false;
    int iters = 0;
    for (int t = 0; t < max_outer; ++t) {
        iters = t + 1;
        Eigen::VectorXd w1_tilde;
        if (criterion) {
            auto [w, l] = select_half_step(problem.r1, problem.r12, problem.r2, w2,
                                           problem.lambda_grid_1, *criterion, n);
            w1_tilde = w;
            l1 = l;
        } else {
            w1_tilde = lasso_step(problem.r1, problem.r12 * w2, l1);
        }
        if (w1_tilde.isZero(0.0)) return zero_pair(p1, p2, l1, l2, iters);
        Eigen::VectorXd w1_new = rescale(w1_tilde, problem.r1);

        Eigen::MatrixXd r21 = problem.r12.transpose();
        Eigen::VectorXd w2_tilde;
        if (criterion) {
            auto [w, l] = select_half_step(problem.r2, r21, problem.r1, w1_new,
                                           problem.lambda_grid_2, *criterion, n);
            w2_tilde = w;
            l2 = l;
        } else {
            w2_tilde = lasso_step(problem.r2, r21 * w1_new, l2);
        }
        if (w2_tilde.isZero(0.0)) return zero_pair(p1, p2, l1, l2, iters);
        Eigen::VectorXd w2_new = rescale(w2_tilde, problem.r2);

        double delta = std::max((w1_new - w1).cwiseAbs().maxCoeff(),
                                (w2_new - w2).cwiseAbs().maxCoeff());
        w1 = w1_new;
        w2 = w2_new;
        if (delta < tol) {
            out.converged = true;
            break;
        }
    }
    fix_sign(w1, w2);
    out.w1 = w1;
    out.w2 = w2;
    out.objective = w1.dot(problem.r12 * w2);
    out.lambda1 = l1;
    out.lambda2 = l2;
    out.support1 = support_of(w1);
    out.support2 = support_of(w2);
    out.iterations = iters;
    return out;
}

}  // namespace

CanonicalPair fit_pair(const SccaProblem& problem, BicCriterion criterion, int n,
                       std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>> init,
                       int max_outer, double tol) {
    if (n < 2) throw std::invalid_argument("fit_pair: n must be >= 2");
    if (problem.lambda_grid_1.size() == 0 || problem.lambda_grid_2.size() == 0)
        throw std::invalid_argument("fit_pair: empty lambda grid");
    return run_alternation(problem, n, criterion, 0.0, 0.0, std::move(init), max_outer,
                           tol);
}

CanonicalPair fit_pair_fixed(const SccaProblem& problem, double lambda1, double lambda2,
                             std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>>
                                 init,
                             int max_outer, double tol) {
    if (lambda1 < 0 || lambda2 < 0)
        throw std::invalid_argument("fit_pair_fixed: negative penalty");
    return run_alternation(problem, 2, std::nullopt, lambda1, lambda2, std::move(init),
                           max_outer, tol);
}

Eigen::MatrixXd deflate(const Eigen::MatrixXd& r12, const CanonicalPair& pair,
                        const Eigen::MatrixXd& r1, const Eigen::MatrixXd& r2) {
    if (pair.w1.isZero(0.0) || pair.w2.isZero(0.0))
        throw std::invalid_argument("deflate: zero canonical pair");
    double rho = pair.w1.dot(r12 * pair.w2);
    return r12 - rho * (r1 * pair.w1) * (pair.w2.transpose() * r2);
}

std::vector<CanonicalPair> fit_sequence(const Eigen::MatrixXd& r1,
                                        const Eigen::MatrixXd& r2,
                                        const Eigen::MatrixXd& r12,
                                        BicCriterion criterion, int n, int n_pairs,
                                        int grid_count, double grid_eps) {
    std::vector<CanonicalPair> pairs;
    Eigen::MatrixXd block = r12;
    for (int k = 0; k < n_pairs; ++k) {
        SccaProblem base(r1, r2, block);
        auto init = ridge_init(base);
        double lmax1 = (block * init.second).cwiseAbs().maxCoeff();
        double lmax2 = (block.transpose() * init.first).cwiseAbs().maxCoeff();
        if (lmax1 <= 0 || lmax2 <= 0) {
            // Cross block vanished; nothing left to extract.
            pairs.push_back(zero_pair(r1.rows(), r2.rows(), 0.0, 0.0, 0));
            break;
        }
        auto [g1, g2] = lambda_grid(block, init.first, init.second, grid_count, grid_eps);
        SccaProblem problem(r1, r2, block, g1, g2);
        CanonicalPair pair = fit_pair(problem, criterion, n, init);
        pairs.push_back(pair);
        if (pair.w1.isZero(0.0) || pair.w2.isZero(0.0)) break;
        if (k + 1 < n_pairs) block = deflate(block, pair, r1, r2);
    }
    return pairs;
}

}  // namespace scca::opt
