#pragma once

#include <Eigen/Dense>

namespace scca::mvn {

// Standard normal cdf, abs error below 1e-15.
double std_normal_cdf(double x);

// Standard normal density.
double std_normal_pdf(double x);

// Inverse of std_normal_cdf on (0,1). Throws std::domain_error outside.
double std_normal_quantile(double p);

// P(Z1 <= a, Z2 <= b) with correlation r, |r| <= 1 - 1e-12.
// Single-integral Gauss-Legendre reduction over the correlation parameter.
double bvn_cdf(double a, double b, double r);

// Correlation matrix for d in {2,3,4}: symmetric, unit diagonal,
// off-diagonals in [-1,1], PSD to 1e-10. Near-singular inputs are
// repaired by eigenvalue flooring at 1e-10.
class CorrelationMatrix {
public:
    explicit CorrelationMatrix(const Eigen::MatrixXd& m);

    const Eigen::MatrixXd& entries() const { return m_; }
    int dim() const { return static_cast<int>(m_.rows()); }

private:
    Eigen::MatrixXd m_;
};

// P(Z <= limits) for d in {3,4}. Limits may be +/-infinity (handled by
// dimension reduction). Outer Gauss-Legendre quadrature, order per axis
// >= 64, truncated at +/-8.
double mvn_cdf(const Eigen::VectorXd& limits, const CorrelationMatrix& corr);

}  // namespace scca::mvn
