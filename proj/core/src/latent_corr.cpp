#include "scca/latent_corr.hpp"

#include <cmath>
#include <stdexcept>

#include "scca/bridge.hpp"
#include "scca/kendall.hpp"
#include "scca/threads.hpp"

namespace scca::latent_corr {

Eigen::MatrixXd assemble_rhat(const Eigen::MatrixXd& tau,
                              const std::vector<VariableType>& types,
                              const std::vector<double>& thresholds) {
    const Eigen::Index p = tau.rows();
    if (tau.cols() != p) throw std::invalid_argument("assemble_rhat: tau not square");
    if (static_cast<Eigen::Index>(types.size()) != p ||
        static_cast<Eigen::Index>(thresholds.size()) != p)
        throw std::invalid_argument("assemble_rhat: dimension mismatch");
    Eigen::MatrixXd r = Eigen::MatrixXd::Identity(p, p);
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    for (Eigen::Index j = 0; j < p; ++j)
        for (Eigen::Index k = j + 1; k < p; ++k) pairs.emplace_back(j, k);
    parallel_for(pairs.size(), [&](std::size_t i) {
        auto [j, k] = pairs[i];
        auto mapping = bridge::pair_kind(types[j], types[k]);
        Eigen::Index a = j, b = k;
        if (mapping.swapped) std::swap(a, b);
        std::optional<double> dj, dk;
        if (types[a] != VariableType::continuous) dj = thresholds[a];
        if (types[b] != VariableType::continuous) dk = thresholds[b];
        // CB consumes only the binary-side threshold; TC only the truncated side.
        if (mapping.kind == bridge::PairKind::CB) dj.reset();
        if (mapping.kind == bridge::PairKind::TC) dk.reset();
        double v = bridge::invert_bridge(tau(j, k), mapping.kind, dj, dk);
        r(j, k) = v;
        r(k, j) = v;
    });
    return r;
}

Eigen::MatrixXd nearest_psd_correlation(const Eigen::MatrixXd& m, int max_iter,
                                        double tol) {
    const Eigen::Index p = m.rows();
    if (m.cols() != p) throw std::invalid_argument("nearest_psd_correlation: not square");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("nearest_psd_correlation: not symmetric");
    if ((m.diagonal().array() - 1.0).abs().maxCoeff() > 1e-10)
        throw std::invalid_argument("nearest_psd_correlation: diagonal must be 1");
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
        if (es.eigenvalues().minCoeff() >= 0.0) return m;  // already PSD
    }
    Eigen::MatrixXd y = m;
    Eigen::MatrixXd ds = Eigen::MatrixXd::Zero(p, p);  // Dykstra correction
    Eigen::MatrixXd x = y;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::MatrixXd r = y - ds;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r);
        Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
        x = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
        x = 0.5 * (x + x.transpose().eval());
        ds = x - r;
        Eigen::MatrixXd y_next = x;
        y_next.diagonal().setOnes();
        double diff = (y_next - y).cwiseAbs().maxCoeff();
        y = y_next;
        if (diff < tol) {
            // Final polish: nonnegative spectrum with an exact unit diagonal.
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(y);
            Eigen::VectorXd ev2 = es2.eigenvalues().cwiseMax(0.0);
            Eigen::MatrixXd out =
                es2.eigenvectors() * ev2.asDiagonal() * es2.eigenvectors().transpose();
            Eigen::VectorXd s = out.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
            out = s.asDiagonal() * out * s.asDiagonal();
            out = 0.5 * (out + out.transpose().eval());
            out.diagonal().setOnes();
            return out;
        }
    }
    throw std::runtime_error("nearest_psd_correlation: no convergence after " +
                             std::to_string(max_iter) + " iterations");
}

Eigen::MatrixXd shrink(const Eigen::MatrixXd& r_psd, double nu) {
    if (!(nu >= 0.0 && nu < 1.0))
        throw std::invalid_argument("shrink: nu must lie in [0,1)");
    return (1.0 - nu) * r_psd +
           nu * Eigen::MatrixXd::Identity(r_psd.rows(), r_psd.cols());
}

std::vector<double> estimate_thresholds(const MixedDataMatrix& data) {
    const Eigen::Index p = data.cols();
    std::vector<double> d(p, std::numeric_limits<double>::quiet_NaN());
    for (Eigen::Index j = 0; j < p; ++j) {
        if (data.types[j] == VariableType::continuous) continue;
        d[j] = bridge::estimate_threshold(
            std::span<const double>(data.values.col(j).data(), data.rows()),
            data.types[j]);
    }
    return d;
}

Eigen::MatrixXd pearson_correlation(const Eigen::MatrixXd& values) {
    const Eigen::Index n = values.rows();
    const Eigen::Index p = values.cols();
    if (n < 2) throw std::invalid_argument("pearson_correlation: need n >= 2");
    Eigen::MatrixXd centered = values.rowwise() - values.colwise().mean();
    Eigen::MatrixXd cov = centered.transpose() * centered / double(n - 1);
    Eigen::VectorXd sd = cov.diagonal().cwiseSqrt();
    Eigen::MatrixXd r = Eigen::MatrixXd::Identity(p, p);
    for (Eigen::Index j = 0; j < p; ++j)
        for (Eigen::Index k = j + 1; k < p; ++k) {
            double denom = sd(j) * sd(k);
            double v = denom > 0 ? cov(j, k) / denom : 0.0;
            v = std::min(1.0, std::max(-1.0, v));
            r(j, k) = v;
            r(k, j) = v;
        }
    return r;
}

LatentCorrelation estimate_latent_correlation(const MixedDataMatrix& data, double nu,
                                              CorrelationMethod method) {
    LatentCorrelation out;
    out.nu = nu;
    if (method == CorrelationMethod::kendall) {
        Eigen::MatrixXd tau = kendall::tau_matrix(data);
        std::vector<double> thresholds = estimate_thresholds(data);
        out.r_hat = assemble_rhat(tau, data.types, thresholds);
    } else {
        out.r_hat = pearson_correlation(data.values);
    }
    out.r_psd = nearest_psd_correlation(out.r_hat);
    out.r_tilde = shrink(out.r_psd, nu);
    return out;
}

}  // namespace scca::latent_corr
