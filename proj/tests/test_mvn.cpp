#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "scca/mvn.hpp"

using namespace scca::mvn;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Independent oracle: P(Z1<=a, Z2<=b) = int_{-inf}^{a} phi(x) Phi((b-rx)/s) dx
// by adaptive Simpson. Only uses the univariate cdf.
double bvn_oracle(double a, double b, double r) {
    double s = std::sqrt(1.0 - r * r);
    auto f = [&](double x) {
        return std_normal_pdf(x) * std_normal_cdf((b - r * x) / s);
    };
    std::function<double(double, double, double, double, double, double)> simpson =
        [&](double lo, double hi, double flo, double fhi, double fmid, double eps) {
            double mid = (lo + hi) / 2;
            double lmid = (lo + mid) / 2, rmid = (mid + hi) / 2;
            double fl = f(lmid), fr = f(rmid);
            double whole = (hi - lo) / 6 * (flo + 4 * fmid + fhi);
            double left = (mid - lo) / 6 * (flo + 4 * fl + fmid);
            double right = (hi - mid) / 6 * (fmid + 4 * fr + fhi);
            if (std::abs(left + right - whole) < 15 * eps) return left + right;
            return simpson(lo, mid, flo, fmid, fl, eps / 2) +
                   simpson(mid, hi, fmid, fhi, fr, eps / 2);
        };
    double lo = -9.0, hi = std::min(a, 9.0);
    if (hi <= lo) return 0.0;
    double mid = (lo + hi) / 2;
    return simpson(lo, hi, f(lo), f(hi), f(mid), 1e-13);
}

Eigen::MatrixXd equicorrelation(int d, double rho) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(d, d, rho);
    m.diagonal().setOnes();
    return m;
}

}  // namespace

TEST_CASE("std_normal_cdf basics") {
    CHECK(std_normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std_normal_cdf(kInf) == 1.0);
    CHECK(std_normal_cdf(-kInf) == 0.0);
    CHECK(std_normal_cdf(1.959964) == doctest::Approx(0.975).epsilon(1e-6));
    // erf oracle across a grid
    for (double x = -8; x <= 8; x += 0.25)
        CHECK(std_normal_cdf(x) ==
              doctest::Approx(0.5 * (1 + std::erf(x / std::sqrt(2.0)))).epsilon(1e-14));
}

TEST_CASE("std_normal_quantile") {
    CHECK(std_normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(std_normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-5));
    CHECK_THROWS_AS(std_normal_quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(std_normal_quantile(1.0), std::domain_error);
    CHECK_THROWS_AS(std_normal_quantile(-0.3), std::domain_error);
    // beyond |x| ~ 5 the round-trip is limited by double resolution of p near 1
    for (double x = -5; x <= 5; x += 0.1)
        CHECK(std_normal_quantile(std_normal_cdf(x)) == doctest::Approx(x).epsilon(1e-9));
    // |Phi(x) - p| <= 1e-12 contract
    for (double p : {1e-10, 1e-4, 0.02424, 0.3, 0.7, 0.99, 1 - 1e-9}) {
        double x = std_normal_quantile(p);
        CHECK(std::abs(std_normal_cdf(x) - p) <= 1e-12);
    }
}

TEST_CASE("bvn_cdf examples and oracle") {
    CHECK(bvn_cdf(0, 0, 0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(bvn_cdf(kInf, 0.7, 0.3) == doctest::Approx(std_normal_cdf(0.7)).epsilon(1e-12));
    CHECK(bvn_cdf(0, 0, 0.5) == doctest::Approx(1.0 / 3).epsilon(1e-8));
    // orthant identity
    for (double r : {-0.95, -0.6, -0.2, 0.1, 0.4, 0.8, 0.99})
        CHECK(bvn_cdf(0, 0, r) ==
              doctest::Approx(0.25 + std::asin(r) / (2 * M_PI)).epsilon(1e-10));
    // adaptive quadrature oracle on a grid
    for (double r : {-0.9, -0.5, 0.0, 0.3, 0.7, 0.95})
        for (double a : {-1.5, 0.0, 0.8})
            for (double b : {-0.5, 0.3, 2.0})
                CHECK(bvn_cdf(a, b, r) == doctest::Approx(bvn_oracle(a, b, r)).epsilon(1e-10));
    CHECK_THROWS_AS(bvn_cdf(0, 0, 1.0), std::domain_error);
}

TEST_CASE("bvn reflection identity") {
    for (double r : {-0.8, -0.3, 0.2, 0.6, 0.9})
        for (double a : {-1.0, 0.2, 1.3})
            for (double b : {-0.7, 0.0, 1.8}) {
                double lhs = bvn_cdf(a, b, r);
                double rhs = std_normal_cdf(a) - bvn_cdf(a, -b, -r);
                CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
            }
}

TEST_CASE("CorrelationMatrix validation") {
    CHECK_THROWS_AS(CorrelationMatrix(Eigen::MatrixXd::Zero(3, 3)), std::invalid_argument);
    Eigen::Matrix3d bad = equicorrelation(3, -0.9);  // indefinite
    CHECK_THROWS_AS((CorrelationMatrix(bad)), std::invalid_argument);
    Eigen::Matrix3d asym = equicorrelation(3, 0.3);
    asym(0, 1) = 0.4;
    CHECK_THROWS_AS((CorrelationMatrix(asym)), std::invalid_argument);
    // near-singular inputs are repaired, not rejected
    Eigen::Matrix2d sing = equicorrelation(2, 1.0);
    CorrelationMatrix fixed(sing);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fixed.entries());
    CHECK(es.eigenvalues().minCoeff() >= 0.0);
}

TEST_CASE("mvn_cdf orthants and limits") {
    Eigen::Vector3d inf3(kInf, kInf, kInf);
    CHECK(mvn_cdf(inf3, CorrelationMatrix(equicorrelation(3, 0.4))) == 1.0);
    CHECK(mvn_cdf(Eigen::Vector3d::Zero(), CorrelationMatrix(equicorrelation(3, 0.0))) ==
          doctest::Approx(0.125).epsilon(1e-12));
    CHECK(mvn_cdf(Eigen::Vector4d::Zero(), CorrelationMatrix(equicorrelation(4, 0.0))) ==
          doctest::Approx(0.0625).epsilon(1e-12));
    CHECK(mvn_cdf(Eigen::Vector3d(0, 1, -kInf),
                  CorrelationMatrix(equicorrelation(3, 0.3))) == 0.0);
    CHECK_THROWS_AS(mvn_cdf(Eigen::Vector2d(0, 0), CorrelationMatrix(equicorrelation(3, 0.2))),
                    std::invalid_argument);
}

TEST_CASE("mvn_cdf equicorrelated orthant vs Monte Carlo oracle") {
    // Antithetic MC, N = 1e7 pairs.
    const int n = 10000000;
    std::mt19937_64 rng(20240811);
    std::normal_distribution<double> N01;
    Eigen::Matrix3d s3 = equicorrelation(3, 0.5);
    Eigen::LLT<Eigen::Matrix3d> llt(s3);
    Eigen::Matrix3d l = llt.matrixL();
    std::int64_t hits = 0;
    for (int i = 0; i < n; ++i) {
        Eigen::Vector3d g(N01(rng), N01(rng), N01(rng));
        Eigen::Vector3d z = l * g;
        if (z(0) <= 0 && z(1) <= 0 && z(2) <= 0) ++hits;
        if (z(0) >= 0 && z(1) >= 0 && z(2) >= 0) ++hits;  // antithetic mirror
    }
    double est = static_cast<double>(hits) / (2.0 * n);
    double p = est;
    double se = std::sqrt(p * (1 - p) / (2.0 * n));
    double val = mvn_cdf(Eigen::Vector3d::Zero(), CorrelationMatrix(s3));
    CHECK(std::abs(val - est) <= 3 * se + 1e-6);
    // known closed form for the d=3 equicorrelated orthant
    CHECK(val == doctest::Approx(0.125 + 3 * std::asin(0.5) / (4 * M_PI)).epsilon(1e-8));
}

TEST_CASE("mvn_cdf marginalization") {
    Eigen::Matrix4d s4;
    s4 << 1, .3, -.2, .1,
          .3, 1, .4, -.1,
          -.2, .4, 1, .2,
          .1, -.1, .2, 1;
    CorrelationMatrix c4(s4);
    Eigen::Vector4d lim(0.4, -0.3, kInf, 0.9);
    Eigen::Matrix3d sub;
    sub << 1, .3, .1,
           .3, 1, -.1,
           .1, -.1, 1;
    double reduced = mvn_cdf(Eigen::Vector3d(0.4, -0.3, 0.9), CorrelationMatrix(sub));
    CHECK(mvn_cdf(lim, c4) == doctest::Approx(reduced).epsilon(2e-6));
    // d=3 -> d=2
    Eigen::Vector3d lim3(0.2, kInf, -0.5);
    double bv = bvn_cdf(0.2, -0.5, sub(0, 2));
    CHECK(mvn_cdf(lim3, CorrelationMatrix(sub)) == doctest::Approx(bv).epsilon(2e-6));
}

TEST_CASE("mvn_cdf monotone in each limit") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1.5, 1.5);
    Eigen::Matrix4d s4;
    s4 << 1, .3, -.2, .1,
          .3, 1, .4, -.1,
          -.2, .4, 1, .2,
          .1, -.1, .2, 1;
    CorrelationMatrix c4(s4);
    for (int t = 0; t < 10; ++t) {
        Eigen::Vector4d a(U(rng), U(rng), U(rng), U(rng));
        double base = mvn_cdf(a, c4);
        for (int j = 0; j < 4; ++j) {
            Eigen::Vector4d b = a;
            b(j) += 0.5;
            CHECK(mvn_cdf(b, c4) >= base - 1e-10);
        }
    }
}

TEST_CASE("dPhi/drho positive by central differences") {
    Eigen::Matrix3d s3 = equicorrelation(3, 0.3);
    Eigen::Vector3d a(0.3, -0.4, 0.6);
    const double h = 1e-4;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            Eigen::Matrix3d up = s3, dn = s3;
            up(i, j) = up(j, i) = s3(i, j) + h;
            dn(i, j) = dn(j, i) = s3(i, j) - h;
            double d = (mvn_cdf(a, CorrelationMatrix(up)) -
                        mvn_cdf(a, CorrelationMatrix(dn))) / (2 * h);
            CHECK(d > 0.0);
        }
    Eigen::Matrix4d s4 = equicorrelation(4, 0.2);
    Eigen::Vector4d b(0.1, -0.2, 0.5, 0.0);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            Eigen::Matrix4d up = s4, dn = s4;
            up(i, j) = up(j, i) = s4(i, j) + h;
            dn(i, j) = dn(j, i) = s4(i, j) - h;
            double d = (mvn_cdf(b, CorrelationMatrix(up)) -
                        mvn_cdf(b, CorrelationMatrix(dn))) / (2 * h);
            CHECK(d > 0.0);
        }
}
