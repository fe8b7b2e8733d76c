#include "scca/mvn.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace scca::mvn {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kTwoPi = 6.283185307179586;
constexpr double kTailCut = 8.0;  // integration truncation in sd units
constexpr int kOuterOrder = 64;   // Gauss-Legendre order per outer axis

struct GaussLegendre {
    std::vector<double> nodes;    // on (-1, 1)
    std::vector<double> weights;
};

// Nodes/weights via Newton iteration on the Legendre polynomial.
GaussLegendre gauss_legendre(int n) {
    GaussLegendre gl;
    gl.nodes.resize(n);
    gl.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) * x * p1 - j * p2) / (j + 1);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        gl.nodes[i] = -x;
        gl.nodes[n - 1 - i] = x;
        gl.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        gl.weights[n - 1 - i] = gl.weights[i];
    }
    return gl;
}

const GaussLegendre& outer_rule() {
    static const GaussLegendre gl = gauss_legendre(kOuterOrder);
    return gl;
}

// Genz's kernel rules for the bivariate single-integral reduction.
const double kX6[] = {0.9324695142031521, 0.6612093864662645, 0.2386191860831969};
const double kW6[] = {0.1713244923791704, 0.3607615730481386, 0.4679139345726910};
const double kX12[] = {0.9815606342467192, 0.9041172563704749, 0.7699026741943047,
                       0.5873179542866175, 0.3678314989981802, 0.1252334085114689};
const double kW12[] = {0.04717533638651183, 0.1069393259953184, 0.1600783285433462,
                       0.2031674267230659, 0.2334925365383548, 0.2491470458134028};
const double kX20[] = {0.9931285991850949, 0.9639719272779138, 0.9122344282513259,
                       0.8391169718222188, 0.7463319064601508, 0.6360536807265150,
                       0.5108670019508271, 0.3737060887154196, 0.2277858511416451,
                       0.07652652113349733};
const double kW20[] = {0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
                       0.08327674157670475, 0.1019301198172404, 0.1181945319615184,
                       0.1316886384491766, 0.1420961093183821, 0.1491729864726037,
                       0.1527533871307259};

// Upper-quadrant probability P(X > dh, Y > dk), correlation r.
// Drezner-Wesolowsky method as refined by Genz.
double bvnu(double dh, double dk, double r) {
    if (std::isinf(dh) || std::isinf(dk)) {
        if (dh == std::numeric_limits<double>::infinity() ||
            dk == std::numeric_limits<double>::infinity())
            return 0.0;
        if (dh == -std::numeric_limits<double>::infinity())
            return std_normal_cdf(-dk);
        return std_normal_cdf(-dh);
    }
    const double* xg;
    const double* wg;
    int lg;
    double ar = std::abs(r);
    if (ar < 0.3) {
        xg = kX6; wg = kW6; lg = 3;
    } else if (ar < 0.75) {
        xg = kX12; wg = kW12; lg = 6;
    } else {
        xg = kX20; wg = kW20; lg = 10;
    }
    double h = dh, k = dk, hk = h * k, bvn = 0.0;
    if (ar < 0.925) {
        if (ar > 0) {
            double hs = (h * h + k * k) / 2;
            double asr = std::asin(r);
            for (int i = 0; i < lg; ++i) {
                for (int is = -1; is <= 1; is += 2) {
                    double sn = std::sin(asr * (is * xg[i] + 1) / 2);
                    bvn += wg[i] * std::exp((sn * hk - hs) / (1 - sn * sn));
                }
            }
            bvn = bvn * asr / (2 * kTwoPi);
        }
        bvn += std_normal_cdf(-h) * std_normal_cdf(-k);
    } else {
        if (r < 0) {
            k = -k;
            hk = -hk;
        }
        if (ar < 1) {
            double as = (1 - r) * (1 + r);
            double a = std::sqrt(as);
            double bs = (h - k) * (h - k);
            double c = (4 - hk) / 8;
            double d = (12 - hk) / 16;
            double asr = -(bs / as + hk) / 2;
            if (asr > -100)
                bvn = a * std::exp(asr) *
                      (1 - c * (bs - as) * (1 - d * bs / 5) / 3 + c * d * as * as / 5);
            if (-hk < 100) {
                double b = std::sqrt(bs);
                bvn -= std::exp(-hk / 2) * std::sqrt(kTwoPi) * std_normal_cdf(-b / a) *
                       b * (1 - c * bs * (1 - d * bs / 5) / 3);
            }
            a /= 2;
            for (int i = 0; i < lg; ++i) {
                for (int is = -1; is <= 1; is += 2) {
                    double x = a * (is * xg[i] + 1);
                    double xs = x * x;
                    double rs = std::sqrt(1 - xs);
                    double asr1 = -(bs / xs + hk) / 2;
                    if (asr1 > -100)
                        bvn += a * wg[i] * std::exp(asr1) *
                               (std::exp(-hk * (1 - rs) / (2 * (1 + rs))) / rs -
                                (1 + c * xs * (1 + d * xs)));
                }
            }
            bvn = -bvn / kTwoPi;
        }
        if (r > 0) {
            bvn += std_normal_cdf(-std::max(h, k));
        } else {
            bvn = -bvn;
            if (k > h) bvn += std_normal_cdf(k) - std_normal_cdf(h);
        }
    }
    return std::min(1.0, std::max(0.0, bvn));
}

}  // namespace

double std_normal_cdf(double x) {
    return 0.5 * std::erfc(-x / kSqrt2);
}

double std_normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(kTwoPi);
}

double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("std_normal_quantile: p must lie in (0,1)");
    // Acklam's rational approximation, then one Halley step.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00, 2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    } else if (p <= 1 - plow) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
    } else {
        double q = std::sqrt(-2 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    double e = std_normal_cdf(x) - p;
    double u = e / std_normal_pdf(x);
    x -= u / (1 + x * u / 2);
    return x;
}

double bvn_cdf(double a, double b, double r) {
    if (std::abs(r) > 1 - 1e-12)
        throw std::domain_error("bvn_cdf: |r| must be <= 1 - 1e-12");
    return bvnu(-a, -b, r);
}

CorrelationMatrix::CorrelationMatrix(const Eigen::MatrixXd& m) : m_(m) {
    const int d = static_cast<int>(m.rows());
    if (d < 2 || d > 4 || m.cols() != d)
        throw std::invalid_argument("CorrelationMatrix: dimension must be 2, 3 or 4");
    for (int i = 0; i < d; ++i) {
        if (std::abs(m(i, i) - 1.0) > 1e-12)
            throw std::invalid_argument("CorrelationMatrix: diagonal must be 1");
        for (int j = 0; j < i; ++j) {
            if (std::abs(m(i, j) - m(j, i)) > 1e-12)
                throw std::invalid_argument("CorrelationMatrix: not symmetric");
            if (std::abs(m(i, j)) > 1.0 + 1e-12)
                throw std::invalid_argument("CorrelationMatrix: entry outside [-1,1]");
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m_);
    double mineig = es.eigenvalues().minCoeff();
    if (mineig < -1e-10)
        throw std::invalid_argument("CorrelationMatrix: not positive semidefinite");
    if (mineig < 1e-10) {
        // Floor eigenvalues and restore the unit diagonal.
        Eigen::VectorXd ev = es.eigenvalues().cwiseMax(1e-10);
        m_ = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
        Eigen::VectorXd s = m_.diagonal().cwiseSqrt().cwiseInverse();
        m_ = s.asDiagonal() * m_ * s.asDiagonal();
        m_ = 0.5 * (m_ + m_.transpose().eval());
        m_.diagonal().setOnes();
    }
}

namespace {

double tvn_cdf(const Eigen::Vector3d& a, const Eigen::Matrix3d& s) {
    // Condition on the first coordinate; 1-D outer quadrature.
    double r01 = s(0, 1), r02 = s(0, 2), r12 = s(1, 2);
    double s1 = std::sqrt(std::max(1e-24, 1.0 - r01 * r01));
    double s2 = std::sqrt(std::max(1e-24, 1.0 - r02 * r02));
    double rc = (r12 - r01 * r02) / (s1 * s2);
    rc = std::min(1.0 - 1e-12, std::max(-1.0 + 1e-12, rc));
    double hi = std::min(a(0), kTailCut);
    double lo = -kTailCut;
    if (hi <= lo) return 0.0;
    const auto& gl = outer_rule();
    double mid = (hi + lo) / 2, half = (hi - lo) / 2;
    double acc = 0.0;
    for (int i = 0; i < kOuterOrder; ++i) {
        double z = mid + half * gl.nodes[i];
        acc += gl.weights[i] * std_normal_pdf(z) *
               bvnu(-(a(1) - r01 * z) / s1, -(a(2) - r02 * z) / s2, rc);
    }
    return half * acc;
}

double qvn_cdf(const Eigen::Vector4d& a, const Eigen::Matrix4d& s) {
    // Condition on the first two coordinates; 2-D outer quadrature.
    Eigen::Matrix2d s00 = s.topLeftCorner<2, 2>();
    Eigen::Matrix2d s11 = s.bottomRightCorner<2, 2>();
    Eigen::Matrix2d s10 = s.bottomLeftCorner<2, 2>();
    Eigen::Matrix2d beta = s10 * s00.inverse();
    Eigen::Matrix2d cond = s11 - beta * s10.transpose();
    double c0 = std::sqrt(std::max(1e-24, cond(0, 0)));
    double c1 = std::sqrt(std::max(1e-24, cond(1, 1)));
    double rc = cond(0, 1) / (c0 * c1);
    rc = std::min(1.0 - 1e-12, std::max(-1.0 + 1e-12, rc));
    double r01 = s(0, 1);
    double sd1 = std::sqrt(std::max(1e-24, 1.0 - r01 * r01));
    double hi0 = std::min(a(0), kTailCut), hi1 = std::min(a(1), kTailCut);
    double lo = -kTailCut;
    if (hi0 <= lo || hi1 <= lo) return 0.0;
    const auto& gl = outer_rule();
    double mid0 = (hi0 + lo) / 2, half0 = (hi0 - lo) / 2;
    double mid1 = (hi1 + lo) / 2, half1 = (hi1 - lo) / 2;
    double acc = 0.0;
    for (int i = 0; i < kOuterOrder; ++i) {
        double z0 = mid0 + half0 * gl.nodes[i];
        double w0 = gl.weights[i] * std_normal_pdf(z0);
        for (int j = 0; j < kOuterOrder; ++j) {
            double z1 = mid1 + half1 * gl.nodes[j];
            // Conditional density of z1 given z0.
            double dens1 = std_normal_pdf((z1 - r01 * z0) / sd1) / sd1;
            double m2 = beta(0, 0) * z0 + beta(0, 1) * z1;
            double m3 = beta(1, 0) * z0 + beta(1, 1) * z1;
            acc += w0 * gl.weights[j] * dens1 *
                   bvnu(-(a(2) - m2) / c0, -(a(3) - m3) / c1, rc);
        }
    }
    return half0 * half1 * acc;
}

}  // namespace

double mvn_cdf(const Eigen::VectorXd& limits, const CorrelationMatrix& corr) {
    const int d = corr.dim();
    if (limits.size() != d)
        throw std::invalid_argument("mvn_cdf: limits length must match matrix dimension");
    for (int i = 0; i < d; ++i)
        if (limits(i) == -std::numeric_limits<double>::infinity()) return 0.0;
    // Drop coordinates with +infinity limits.
    std::vector<int> keep;
    for (int i = 0; i < d; ++i)
        if (limits(i) != std::numeric_limits<double>::infinity()) keep.push_back(i);
    const int k = static_cast<int>(keep.size());
    if (k == 0) return 1.0;
    if (k == 1) return std_normal_cdf(limits(keep[0]));
    if (k < d) {
        Eigen::VectorXd sub_lim(k);
        Eigen::MatrixXd sub(k, k);
        for (int i = 0; i < k; ++i) {
            sub_lim(i) = limits(keep[i]);
            for (int j = 0; j < k; ++j) sub(i, j) = corr.entries()(keep[i], keep[j]);
        }
        if (k == 2) {
            double r = std::min(1.0 - 1e-12, std::max(-1.0 + 1e-12, sub(0, 1)));
            return bvn_cdf(sub_lim(0), sub_lim(1), r);
        }
        return mvn_cdf(sub_lim, CorrelationMatrix(sub));
    }
    if (d == 2) {
        double r = std::min(1.0 - 1e-12, std::max(-1.0 + 1e-12, corr.entries()(0, 1)));
        return bvn_cdf(limits(0), limits(1), r);
    }
    if (d == 3) return tvn_cdf(limits.head<3>(), corr.entries().block<3, 3>(0, 0));
    return qvn_cdf(limits.head<4>(), corr.entries().block<4, 4>(0, 0));
}

}  // namespace scca::mvn
