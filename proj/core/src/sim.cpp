#include "scca/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "scca/latent_corr.hpp"
#include "scca/scca_opt.hpp"
#include "scca/threads.hpp"

namespace scca::sim {

namespace {

std::uint64_t splitmix_step(std::uint64_t& s) {
    s += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t Rng::next_u64() { return splitmix_step(state_); }

double Rng::uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
    double u = uniform01();
    double v = uniform01();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * M_PI * v);
}

int Rng::bernoulli_half() { return static_cast<int>(next_u64() >> 63); }

std::vector<int> Rng::permutation(int n) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    for (int i = n - 1; i > 0; --i) {
        int j = static_cast<int>(next_u64() % static_cast<std::uint64_t>(i + 1));
        std::swap(p[i], p[j]);
    }
    return p;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
    std::uint64_t s = master_seed ^ (0xA0761D6478BD642FULL * (index + 1));
    splitmix_step(s);
    return splitmix_step(s);
}

void SimScenario::validate() const {
    if (n < 2) throw std::invalid_argument("scenario.n: must be >= 2");
    if (p1 < 1) throw std::invalid_argument("scenario.p1: must be >= 1");
    if (p2 < 1) throw std::invalid_argument("scenario.p2: must be >= 1");
    if (!(rho > 0.0 && rho < 1.0))
        throw std::invalid_argument("scenario.rho: must lie in (0,1)");
    if (!(gamma > -1.0 && gamma < 1.0))
        throw std::invalid_argument("scenario.gamma: must lie in (-1,1)");
    if (copula_id < 0 || copula_id > 2)
        throw std::invalid_argument("scenario.copula_id: must be in {0,1,2}");
    auto bs = effective_block_sizes();
    int sum = std::accumulate(bs.begin(), bs.end(), 0);
    if (sum != p2)
        throw std::invalid_argument("scenario.block_sizes: must sum to p2");
    for (int b : bs)
        if (b < 1) throw std::invalid_argument("scenario.block_sizes: entries must be >= 1");
    for (int side : {1, 2}) {
        int p = side == 1 ? p1 : p2;
        for (int j : effective_support(p))
            if (j < 0 || j >= p)
                throw std::invalid_argument("scenario.true_support: index out of range");
    }
}

std::vector<int> SimScenario::effective_block_sizes() const {
    if (!block_sizes.empty()) return block_sizes;
    if (p2 == 25) return {6, 6, 3, 7, 3};
    if (p2 == 100) return {14, 21, 12, 25, 28};
    return {p2};
}

std::vector<int> SimScenario::effective_support(int p) const {
    if (!true_support.empty()) return true_support;
    std::vector<int> s;
    for (int j : {0, 5, 10, 15, 20})
        if (j < p) s.push_back(j);
    return s;
}

bool SimScenario::side_is_exp(int side) const {
    if (copula_id == 0) return false;
    if (copula_id == 1) return side == 1;
    return side == 1;  // copula 2: exp on side 1, cubic on side 2
}

double SimScenario::effective_cutoff(int side) const {
    double c = side == 1 ? trunc_const1 : trunc_const2;
    if (!std::isnan(c)) return c;
    return side_is_exp(side) ? 1.5 : 0.0;
}

namespace {

Eigen::MatrixXd ar_covariance(int p, double gamma) {
    Eigen::MatrixXd s(p, p);
    for (int j = 0; j < p; ++j)
        for (int k = 0; k < p; ++k) s(j, k) = std::pow(gamma, std::abs(j - k));
    return s;
}

Eigen::MatrixXd block_covariance(const std::vector<int>& sizes, double gamma) {
    int p = std::accumulate(sizes.begin(), sizes.end(), 0);
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(p, p);
    int off = 0;
    for (int b : sizes) {
        s.block(off, off, b, b).setConstant(gamma);
        off += b;
    }
    s.diagonal().setOnes();
    return s;
}

Eigen::VectorXd true_vector(int p, const std::vector<int>& support,
                            const Eigen::MatrixXd& sigma) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(p);
    for (int j : support) w(j) = 1.0;
    double q = w.dot(sigma * w);
    return w / std::sqrt(q);
}

double copula_transform(double z, int copula_id, int side) {
    if (copula_id == 0) return z;
    if (copula_id == 1) return side == 1 ? std::exp(z) : z;
    return side == 1 ? std::exp(z) : z * z * z;
}

Eigen::MatrixXd permute_cols(const Eigen::MatrixXd& m, const std::vector<int>& perm) {
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (std::size_t j = 0; j < perm.size(); ++j) out.col(j) = m.col(perm[j]);
    return out;
}

Eigen::MatrixXd permute_sym(const Eigen::MatrixXd& m, const std::vector<int>& perm) {
    const int p = static_cast<int>(perm.size());
    Eigen::MatrixXd out(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) out(i, j) = m(perm[i], perm[j]);
    return out;
}

}  // namespace

Dataset generate_dataset(const SimScenario& sc) {
    sc.validate();
    const int p1 = sc.p1, p2 = sc.p2, p = p1 + p2;
    Eigen::MatrixXd sigma1 = ar_covariance(p1, sc.gamma);
    Eigen::MatrixXd sigma2 = block_covariance(sc.effective_block_sizes(), sc.gamma);
    Eigen::VectorXd w1 = true_vector(p1, sc.effective_support(p1), sigma1);
    Eigen::VectorXd w2 = true_vector(p2, sc.effective_support(p2), sigma2);
    Eigen::MatrixXd sigma12 = sc.rho * (sigma1 * w1) * (w2.transpose() * sigma2);

    Eigen::MatrixXd joint(p, p);
    joint.topLeftCorner(p1, p1) = sigma1;
    joint.bottomRightCorner(p2, p2) = sigma2;
    joint.topRightCorner(p1, p2) = sigma12;
    joint.bottomLeftCorner(p2, p1) = sigma12.transpose();
    Eigen::LLT<Eigen::MatrixXd> llt(joint);
    if (llt.info() != Eigen::Success) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(joint, Eigen::EigenvaluesOnly);
        throw std::runtime_error(
            "generate_dataset: joint covariance not positive definite, min eigenvalue " +
            std::to_string(es.eigenvalues().minCoeff()));
    }
    Eigen::MatrixXd chol = llt.matrixL();

    Rng rng(sc.seed);
    std::vector<int> perm1 = rng.permutation(p1);
    std::vector<int> perm2 = rng.permutation(p2);
    Eigen::VectorXd shift1(p1), shift2(p2);
    for (int j = 0; j < p1; ++j) shift1(j) = rng.bernoulli_half();
    for (int j = 0; j < p2; ++j) shift2(j) = rng.bernoulli_half();

    Eigen::MatrixXd z(sc.n, p);
    for (int i = 0; i < sc.n; ++i) {
        Eigen::VectorXd g(p);
        for (int j = 0; j < p; ++j) g(j) = rng.normal();
        z.row(i) = (chol * g).transpose();
    }

    auto observe = [&](int side, const Eigen::MatrixXd& zg, const Eigen::VectorXd& shift,
                       VariableType type) {
        const double cut = sc.effective_cutoff(side);
        Eigen::MatrixXd x(zg.rows(), zg.cols());
        for (Eigen::Index j = 0; j < zg.cols(); ++j)
            for (Eigen::Index i = 0; i < zg.rows(); ++i) {
                double u = copula_transform(zg(i, j) + shift(j), sc.copula_id, side);
                switch (type) {
                    case VariableType::continuous: x(i, j) = u; break;
                    case VariableType::binary: x(i, j) = u > cut ? 1.0 : 0.0; break;
                    case VariableType::truncated: x(i, j) = u > cut ? u : 0.0; break;
                }
            }
        return x;
    };

    Eigen::MatrixXd x1 = observe(1, z.leftCols(p1), shift1, sc.type1);
    Eigen::MatrixXd x2 = observe(2, z.rightCols(p2), shift2, sc.type2);

    Dataset out;
    out.x1 = MixedDataMatrix(permute_cols(x1, perm1),
                             std::vector<VariableType>(p1, sc.type1));
    out.x2 = MixedDataMatrix(permute_cols(x2, perm2),
                             std::vector<VariableType>(p2, sc.type2));
    out.truth.sigma1 = permute_sym(sigma1, perm1);
    out.truth.sigma2 = permute_sym(sigma2, perm2);
    Eigen::MatrixXd s12p(p1, p2);
    for (int i = 0; i < p1; ++i)
        for (int j = 0; j < p2; ++j) s12p(i, j) = sigma12(perm1[i], perm2[j]);
    out.truth.sigma12 = s12p;
    Eigen::VectorXd w1p(p1), w2p(p2);
    for (int i = 0; i < p1; ++i) w1p(i) = w1(perm1[i]);
    for (int j = 0; j < p2; ++j) w2p(j) = w2(perm2[j]);
    out.truth.w1 = w1p;
    out.truth.w2 = w2p;
    out.truth.perm1 = perm1;
    out.truth.perm2 = perm2;
    return out;
}

double rho_hat(const Eigen::VectorXd& w1, const Eigen::VectorXd& w2,
               const Eigen::MatrixXd& sigma1, const Eigen::MatrixXd& sigma2,
               const Eigen::MatrixXd& sigma12) {
    if (w1.isZero(0.0) || w2.isZero(0.0)) return 0.0;
    double num = std::abs(w1.dot(sigma12 * w2));
    double den = std::sqrt(w1.dot(sigma1 * w1)) * std::sqrt(w2.dot(sigma2 * w2));
    return num / den;
}

double predictive_loss(const Eigen::VectorXd& w_hat, const Eigen::VectorXd& w_true,
                       const Eigen::MatrixXd& sigma) {
    if (w_hat.isZero(0.0)) return 1.0;
    double num = std::abs(w_hat.dot(sigma * w_true));
    double den = std::sqrt(w_hat.dot(sigma * w_hat));
    return 1.0 - num / den;
}

SelectionRates selection_rates(const std::vector<int>& support_hat,
                               const std::vector<int>& support_true, int p) {
    if (support_true.empty())
        throw std::invalid_argument("selection_rates: empty true support");
    std::vector<bool> hat(p, false), truth(p, false);
    for (int j : support_hat) hat.at(j) = true;
    for (int j : support_true) truth.at(j) = true;
    int tp = 0, tn = 0, n_true = 0, n_false = 0;
    for (int j = 0; j < p; ++j) {
        if (truth[j]) {
            ++n_true;
            if (hat[j]) ++tp;
        } else {
            ++n_false;
            if (!hat[j]) ++tn;
        }
    }
    SelectionRates r;
    r.tpr = static_cast<double>(tp) / n_true;
    r.tnr = n_false > 0 ? static_cast<double>(tn) / n_false : 1.0;
    r.size = static_cast<int>(support_hat.size());
    return r;
}

Method method_from_string(const std::string& s) {
    if (s == "kendall_bic1") return Method::kendall_bic1;
    if (s == "kendall_bic2") return Method::kendall_bic2;
    if (s == "pearson_bic1") return Method::pearson_bic1;
    if (s == "pearson_bic2") return Method::pearson_bic2;
    throw std::invalid_argument("unknown method: " + s);
}

std::string to_string(Method m) {
    switch (m) {
        case Method::kendall_bic1: return "kendall_bic1";
        case Method::kendall_bic2: return "kendall_bic2";
        case Method::pearson_bic1: return "pearson_bic1";
        case Method::pearson_bic2: return "pearson_bic2";
    }
    return "?";
}

namespace {

bool uses_kendall(Method m) {
    return m == Method::kendall_bic1 || m == Method::kendall_bic2;
}

opt::BicCriterion criterion_of(Method m) {
    return (m == Method::kendall_bic1 || m == Method::pearson_bic1)
               ? opt::BicCriterion::bic1
               : opt::BicCriterion::bic2;
}

std::vector<int> true_support_indices(const Eigen::VectorXd& w) {
    std::vector<int> s;
    for (Eigen::Index j = 0; j < w.size(); ++j)
        if (w(j) != 0.0) s.push_back(static_cast<int>(j));
    return s;
}

}  // namespace

StudyResult run_study(const SimScenario& scenario, const std::vector<Method>& methods,
                      int replications, std::uint64_t master_seed, int sweep_count) {
    scenario.validate();
    if (replications < 1) throw std::invalid_argument("run_study: replications >= 1");
    if (methods.empty()) throw std::invalid_argument("run_study: no methods");
    StudyResult result;
    result.rows.resize(static_cast<std::size_t>(replications) * methods.size());
    std::vector<std::vector<SweepPoint>> sweeps(replications);

    parallel_for(static_cast<std::size_t>(replications), [&](std::size_t r) {
        SimScenario sc = scenario;
        sc.seed = derive_seed(master_seed, r);
        Dataset data = generate_dataset(sc);
        const auto& truth = data.truth;
        std::vector<int> true_s1 = true_support_indices(truth.w1);
        std::vector<int> true_s2 = true_support_indices(truth.w2);

        // Concatenated latent correlation, shared across BIC variants.
        Eigen::MatrixXd joined(sc.n, sc.p1 + sc.p2);
        joined.leftCols(sc.p1) = data.x1.values;
        joined.rightCols(sc.p2) = data.x2.values;
        std::vector<VariableType> types(data.x1.types);
        types.insert(types.end(), data.x2.types.begin(), data.x2.types.end());
        MixedDataMatrix all(joined, types);

        auto fit_with = [&](const latent_corr::LatentCorrelation& lc, Method m,
                            std::size_t row_index) {
            Eigen::MatrixXd r1 = lc.r_tilde.topLeftCorner(sc.p1, sc.p1);
            Eigen::MatrixXd r2 = lc.r_tilde.bottomRightCorner(sc.p2, sc.p2);
            Eigen::MatrixXd r12 = lc.r_tilde.topRightCorner(sc.p1, sc.p2);
            auto pairs = opt::fit_sequence(r1, r2, r12, criterion_of(m), sc.n, 1);
            const opt::CanonicalPair& pair = pairs.front();
            FitMetrics fm;
            fm.replication = static_cast<int>(r);
            fm.method = m;
            fm.seed = sc.seed;
            fm.rho_hat = rho_hat(pair.w1, pair.w2, truth.sigma1, truth.sigma2,
                                 truth.sigma12);
            fm.loss1 = predictive_loss(pair.w1, truth.w1, truth.sigma1);
            fm.loss2 = predictive_loss(pair.w2, truth.w2, truth.sigma2);
            auto r1s = selection_rates(pair.support1, true_s1, sc.p1);
            auto r2s = selection_rates(pair.support2, true_s2, sc.p2);
            fm.tpr1 = r1s.tpr;
            fm.tnr1 = r1s.tnr;
            fm.size1 = r1s.size;
            fm.tpr2 = r2s.tpr;
            fm.tnr2 = r2s.tnr;
            fm.size2 = r2s.size;
            fm.lambda1 = pair.lambda1;
            fm.lambda2 = pair.lambda2;
            fm.converged = pair.converged;
            result.rows[row_index] = fm;

            if (sweep_count > 0) {
                Eigen::MatrixXd r1m = r1, r2m = r2, r12m = r12;
                opt::SccaProblem base(r1m, r2m, r12m);
                auto init = opt::ridge_init(base);
                auto [g1, g2] =
                    opt::lambda_grid(r12m, init.first, init.second, sweep_count, 0.01);
                for (int li = 0; li < sweep_count; ++li) {
                    opt::CanonicalPair sp = opt::fit_pair_fixed(
                        opt::SccaProblem(r1m, r2m, r12m, g1, g2), g1(li), g2(li), init);
                    SweepPoint pt;
                    pt.replication = static_cast<int>(r);
                    pt.method = m;
                    pt.lambda_index = li;
                    pt.lambda = g1(li);
                    auto s1 = selection_rates(sp.support1, true_s1, sc.p1);
                    auto s2 = selection_rates(sp.support2, true_s2, sc.p2);
                    pt.tpr1 = s1.tpr;
                    pt.fpr1 = 1.0 - s1.tnr;
                    pt.tpr2 = s2.tpr;
                    pt.fpr2 = 1.0 - s2.tnr;
                    sweeps[r].push_back(pt);
                }
            }
        };

        bool need_kendall = false, need_pearson = false;
        for (Method m : methods) (uses_kendall(m) ? need_kendall : need_pearson) = true;
        latent_corr::LatentCorrelation lc_kendall, lc_pearson;
        if (need_kendall)
            lc_kendall = latent_corr::estimate_latent_correlation(
                all, 0.01, latent_corr::CorrelationMethod::kendall);
        if (need_pearson)
            lc_pearson = latent_corr::estimate_latent_correlation(
                all, 0.01, latent_corr::CorrelationMethod::pearson);
        for (std::size_t mi = 0; mi < methods.size(); ++mi) {
            Method m = methods[mi];
            fit_with(uses_kendall(m) ? lc_kendall : lc_pearson, m,
                     r * methods.size() + mi);
        }
    });

    for (auto& s : sweeps)
        result.sweep.insert(result.sweep.end(), s.begin(), s.end());
    return result;
}

namespace {

SummaryStat quartiles(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    auto at = [&](double q) {
        double pos = q * (static_cast<double>(v.size()) - 1);
        std::size_t lo = static_cast<std::size_t>(pos);
        std::size_t hi = std::min(lo + 1, v.size() - 1);
        double frac = pos - static_cast<double>(lo);
        return v[lo] * (1 - frac) + v[hi] * frac;
    };
    return {at(0.5), at(0.25), at(0.75)};
}

}  // namespace

std::map<std::string, std::map<std::string, SummaryStat>> summarize(
    const StudyResult& result) {
    std::map<std::string, std::map<std::string, std::vector<double>>> acc;
    for (const auto& row : result.rows) {
        auto& m = acc[to_string(row.method)];
        m["rho_hat"].push_back(row.rho_hat);
        m["loss1"].push_back(row.loss1);
        m["loss2"].push_back(row.loss2);
        m["tpr1"].push_back(row.tpr1);
        m["tpr2"].push_back(row.tpr2);
        m["tnr1"].push_back(row.tnr1);
        m["tnr2"].push_back(row.tnr2);
        m["size1"].push_back(row.size1);
        m["size2"].push_back(row.size2);
    }
    std::map<std::string, std::map<std::string, SummaryStat>> out;
    for (auto& [method, metrics] : acc)
        for (auto& [metric, values] : metrics) out[method][metric] = quartiles(values);
    return out;
}

}  // namespace scca::sim
