#pragma once

#include <Eigen/Dense>
#include <vector>

#include "scca/types.hpp"

namespace scca::latent_corr {

enum class CorrelationMethod { kendall, pearson };

struct LatentCorrelation {
    Eigen::MatrixXd r_hat;    // raw pairwise estimates
    Eigen::MatrixXd r_psd;    // PSD projection of r_hat
    Eigen::MatrixXd r_tilde;  // (1-nu) r_psd + nu I
    double nu = 0.01;
};

// Entry (j,k) = bridge inversion of tau(j,k) for the pair's kind;
// diagonal fixed at 1. Thresholds indexed per column (NaN allowed for
// continuous columns, which never consume one).
Eigen::MatrixXd assemble_rhat(const Eigen::MatrixXd& tau,
                              const std::vector<VariableType>& types,
                              const std::vector<double>& thresholds);

// Nearest correlation matrix in the PSD cone: Higham alternating
// projections with unit-diagonal correction. Already-PSD input is a
// fixed point. Throws std::runtime_error on non-convergence.
Eigen::MatrixXd nearest_psd_correlation(const Eigen::MatrixXd& m,
                                        int max_iter = 100, double tol = 1e-7);

// Convex combination (1-nu) m + nu I.
Eigen::MatrixXd shrink(const Eigen::MatrixXd& r_psd, double nu = 0.01);

// Per-column threshold estimates; NaN for continuous columns.
std::vector<double> estimate_thresholds(const MixedDataMatrix& data);

// Full 5-step chain: tau matrix -> thresholds -> inversion -> PSD
// projection -> shrinkage. The pearson method replaces steps 1-3 with
// the Pearson sample correlation and shares the same projection and
// shrinkage pipeline.
LatentCorrelation estimate_latent_correlation(
    const MixedDataMatrix& data, double nu = 0.01,
    CorrelationMethod method = CorrelationMethod::kendall);

// Pearson sample correlation matrix (constant columns yield 0 entries).
Eigen::MatrixXd pearson_correlation(const Eigen::MatrixXd& values);

}  // namespace scca::latent_corr
