#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

namespace scca::opt {

enum class BicCriterion { bic1, bic2 };

BicCriterion criterion_from_string(const std::string& s);
std::string to_string(BicCriterion c);

// Loadings below this magnitude count as zero for supports and df.
inline constexpr double kSupportTol = 1e-6;

struct SccaProblem {
    Eigen::MatrixXd r1;   // p1 x p1 block, strictly PD
    Eigen::MatrixXd r2;   // p2 x p2 block, strictly PD
    Eigen::MatrixXd r12;  // p1 x p2 cross block
    Eigen::VectorXd lambda_grid_1;  // ascending, strictly positive
    Eigen::VectorXd lambda_grid_2;

    SccaProblem(Eigen::MatrixXd r1_in, Eigen::MatrixXd r2_in, Eigen::MatrixXd r12_in,
                Eigen::VectorXd grid1 = {}, Eigen::VectorXd grid2 = {},
                double min_eig = 0.005);
};

struct CanonicalPair {
    Eigen::VectorXd w1, w2;
    double objective = 0.0;  // w1' R12 w2
    double lambda1 = 0.0, lambda2 = 0.0;
    std::vector<int> support1, support2;
    int iterations = 0;
    bool converged = false;
};

std::vector<int> support_of(const Eigen::VectorXd& w, double tol = kSupportTol);

// Coordinate-descent minimizer of (1/2) w'Gw - w'c + lambda ||w||_1.
// Returns the exact zero vector when lambda >= ||c||_inf. KKT residual
// tolerance 1e-8 per coordinate; throws std::runtime_error when the
// sweep limit is hit.
Eigen::VectorXd lasso_step(const Eigen::MatrixXd& gram, const Eigen::VectorXd& linear,
                           double lambda, int max_sweeps = 10000,
                           double kkt_tol = 1e-8);

// Zero stays zero; otherwise w / (w'Gw)^{1/2}.
Eigen::VectorXd rescale(const Eigen::VectorXd& w, const Eigen::MatrixXd& gram);

// Leading canonical pair of the ridge-regularized problem (blocks + 0.25I),
// rescaled to the problem's metric, sign-fixed deterministically.
std::pair<Eigen::VectorXd, Eigen::VectorXd> ridge_init(const SccaProblem& problem);

// BIC for one half-step. w_new is the *unrescaled* LASSO solution;
// r12 maps the other side's vector into this side's space.
// Throws std::domain_error for bic2 with nonpositive f or df >= n.
double bic_value(BicCriterion criterion, const Eigen::VectorXd& w_new,
                 const Eigen::VectorXd& w_other, const Eigen::MatrixXd& g_self,
                 const Eigen::MatrixXd& r12, const Eigen::MatrixXd& g_other,
                 int n);

// Two log-spaced grids from eps*lambda_max to lambda_max, where
// lambda_max is the KKT zero threshold ||R12 w_other||_inf per side.
std::pair<Eigen::VectorXd, Eigen::VectorXd> lambda_grid(
    const Eigen::MatrixXd& r12, const Eigen::VectorXd& w1_init,
    const Eigen::VectorXd& w2_init, int count = 20, double eps = 0.01);

// Alternating LASSO + rescale with per-half-step BIC selection over the
// problem's grids. A zero half-step returns the all-zero pair.
CanonicalPair fit_pair(const SccaProblem& problem, BicCriterion criterion, int n,
                       std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>>
                           init = std::nullopt,
                       int max_outer = 100, double tol = 1e-6);

// Fixed-penalty variant (no BIC selection).
CanonicalPair fit_pair_fixed(const SccaProblem& problem, double lambda1,
                             double lambda2,
                             std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>>
                                 init = std::nullopt,
                             int max_outer = 100, double tol = 1e-6);

// Rank-1 deflation removing an extracted pair from the cross block.
Eigen::MatrixXd deflate(const Eigen::MatrixXd& r12, const CanonicalPair& pair,
                        const Eigen::MatrixXd& r1, const Eigen::MatrixXd& r2);

// Sequential extraction: fit, deflate, regenerate grids, repeat.
// Stops early if a pair comes back zero.
std::vector<CanonicalPair> fit_sequence(const Eigen::MatrixXd& r1,
                                        const Eigen::MatrixXd& r2,
                                        const Eigen::MatrixXd& r12,
                                        BicCriterion criterion, int n, int n_pairs,
                                        int grid_count = 20, double grid_eps = 0.01);

}  // namespace scca::opt
