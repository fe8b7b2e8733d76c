#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "scca/types.hpp"

namespace scca::sim {

// splitmix64: counter-based, one stream per (master seed, replication),
// so replications are schedule-independent.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next_u64();
    double uniform01();             // in (0,1)
    double normal();                // standard normal, Box-Muller
    int bernoulli_half();           // 0 or 1 with equal probability
    std::vector<int> permutation(int n);

private:
    std::uint64_t state_;
};

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

struct SimScenario {
    int n = 100;
    int p1 = 25;
    int p2 = 25;
    double gamma = 0.7;                  // AR / equicorrelation parameter
    std::vector<int> block_sizes;        // for Sigma2; empty = default for p2
    std::vector<int> true_support;       // 0-based loading coordinates
    double rho = 0.9;                    // true canonical correlation
    int copula_id = 0;                   // 0, 1, 2
    VariableType type1 = VariableType::truncated;
    VariableType type2 = VariableType::truncated;
    // Dichotomization/truncation cutoffs on the observed scale. NaN means
    // the default rule: 1.5 for an exp-transformed side, 0 otherwise.
    double trunc_const1 = std::numeric_limits<double>::quiet_NaN();
    double trunc_const2 = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t seed = 0;

    void validate() const;  // throws std::invalid_argument with a field path
    std::vector<int> effective_block_sizes() const;
    std::vector<int> effective_support(int p) const;
    double effective_cutoff(int side) const;
    bool side_is_exp(int side) const;
};

struct GroundTruth {
    Eigen::MatrixXd sigma1, sigma2, sigma12;  // latent-scale, permuted order
    Eigen::VectorXd w1, w2;                   // true canonical vectors, permuted
    std::vector<int> perm1, perm2;            // permuted[i] = original index
};

struct Dataset {
    MixedDataMatrix x1, x2;
    GroundTruth truth;
};

Dataset generate_dataset(const SimScenario& scenario);

// Expected out-of-sample correlation against the latent-scale truth.
double rho_hat(const Eigen::VectorXd& w1, const Eigen::VectorXd& w2,
               const Eigen::MatrixXd& sigma1, const Eigen::MatrixXd& sigma2,
               const Eigen::MatrixXd& sigma12);

// 1 - |w_hat' Sigma w| / (w_hat' Sigma w_hat)^{1/2}; 1 for a zero w_hat.
double predictive_loss(const Eigen::VectorXd& w_hat, const Eigen::VectorXd& w_true,
                       const Eigen::MatrixXd& sigma);

struct SelectionRates {
    double tpr = 0.0;
    double tnr = 0.0;
    int size = 0;
};

SelectionRates selection_rates(const std::vector<int>& support_hat,
                               const std::vector<int>& support_true, int p);

enum class Method { kendall_bic1, kendall_bic2, pearson_bic1, pearson_bic2 };

Method method_from_string(const std::string& s);
std::string to_string(Method m);

struct FitMetrics {
    int replication = 0;
    Method method = Method::kendall_bic2;
    std::uint64_t seed = 0;
    double rho_hat = 0.0;
    double loss1 = 0.0, loss2 = 0.0;
    double tpr1 = 0.0, tpr2 = 0.0, tnr1 = 0.0, tnr2 = 0.0;
    int size1 = 0, size2 = 0;
    double lambda1 = 0.0, lambda2 = 0.0;
    bool converged = false;
};

struct SweepPoint {
    int replication = 0;
    Method method = Method::kendall_bic2;
    int lambda_index = 0;
    double lambda = 0.0;
    double tpr1 = 0.0, fpr1 = 0.0, tpr2 = 0.0, fpr2 = 0.0;
};

struct StudyResult {
    std::vector<FitMetrics> rows;        // ordered by (replication, method)
    std::vector<SweepPoint> sweep;       // empty unless sweep_count > 0
};

// Batch driver: per-replication metrics, reproducible under the master
// seed, replications run concurrently. sweep_count > 0 additionally
// records TPR/FPR along a shared lambda grid with lambda1 = lambda2.
StudyResult run_study(const SimScenario& scenario, const std::vector<Method>& methods,
                      int replications, std::uint64_t master_seed,
                      int sweep_count = 0);

// Median and IQR per method and metric, for the JSON summary.
struct SummaryStat {
    double median = 0.0, q25 = 0.0, q75 = 0.0;
};
std::map<std::string, std::map<std::string, SummaryStat>> summarize(
    const StudyResult& result);

}  // namespace scca::sim
