#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "scca/kendall.hpp"

using namespace scca;
using namespace scca::kendall;

TEST_CASE("tau_pair hand oracles") {
    std::vector<double> x = {1, 2, 3}, y = {10, 20, 30};
    CHECK(tau_pair_naive(x, y) == 1.0);
    std::vector<double> yr = {3, 2, 1};
    CHECK(tau_pair_naive(x, yr) == -1.0);
    // one tied pair contributes 0: 2 concordant of 3 pairs
    std::vector<double> xt = {0, 0, 1}, yt = {0, 1, 2};
    CHECK(tau_pair_naive(xt, yt) == doctest::Approx(2.0 / 3).epsilon(1e-15));
    CHECK(tau_pair_fast(xt, yt) == doctest::Approx(2.0 / 3).epsilon(1e-15));
    std::vector<double> bad = {1, 2};
    CHECK_THROWS_AS(tau_pair_naive(x, bad), std::invalid_argument);
}

TEST_CASE("tau_pair symmetry and range") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> U(0, 4);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> x(30), y(30);
        for (int i = 0; i < 30; ++i) { x[i] = U(rng); y[i] = U(rng); }
        double a = tau_pair_naive(x, y), b = tau_pair_naive(y, x);
        CHECK(a == b);
        CHECK(a >= -1.0);
        CHECK(a <= 1.0);
    }
}

TEST_CASE("fast path agrees exactly with naive on 1000 tie-heavy instances") {
    std::mt19937_64 rng(42);
    for (int t = 0; t < 1000; ++t) {
        int n = 2 + static_cast<int>(rng() % 120);
        std::vector<double> x(n), y(n);
        int xlevels = 1 + static_cast<int>(rng() % 6);   // few levels => many ties
        int ylevels = 1 + static_cast<int>(rng() % 6);
        std::uniform_real_distribution<double> U(0, 1);
        for (int i = 0; i < n; ++i) {
            x[i] = static_cast<double>(rng() % xlevels);
            if (t % 3 == 0) x[i] = U(rng);  // mix in continuous columns too
            y[i] = static_cast<double>(rng() % ylevels);
        }
        CHECK(tau_pair_fast(x, y) == tau_pair_naive(x, y));
    }
}

TEST_CASE("monotone invariance, bit for bit") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(-2, 2);
    int n = 200;
    std::vector<double> x(n), y(n), xm(n);
    for (int i = 0; i < n; ++i) { x[i] = U(rng); y[i] = U(rng); }
    for (int i = 0; i < n; ++i) xm[i] = std::exp(x[i]);  // strictly increasing map
    CHECK(tau_pair(xm, y) == tau_pair(x, y));
    for (int i = 0; i < n; ++i) xm[i] = x[i] * x[i] * x[i];
    CHECK(tau_pair(xm, y) == tau_pair(x, y));
}

TEST_CASE("tau_matrix basics") {
    Eigen::MatrixXd m(5, 3);
    m << 1, 1, 7,
         2, 2, 7,
         3, 3, 7,
         4, 4, 7,
         5, 5, 7;
    Eigen::MatrixXd t = tau_matrix(m);
    CHECK(t.rows() == 3);
    CHECK(t(0, 0) == 1.0);
    CHECK(t(0, 1) == 1.0);          // duplicate columns
    CHECK(t(0, 2) == 0.0);          // constant column: all signs zero
    CHECK(t(1, 0) == t(0, 1));
}

TEST_CASE("tau_matrix matches naive reference entrywise") {
    std::mt19937_64 rng(17);
    Eigen::MatrixXd m(5, 3);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = static_cast<double>(rng() % 10);
    Eigen::MatrixXd t = tau_matrix(m);
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
            std::vector<double> cj(m.col(j).data(), m.col(j).data() + 5);
            std::vector<double> ck(m.col(k).data(), m.col(k).data() + 5);
            double want = j == k ? 1.0 : tau_pair_naive(cj, ck);
            CHECK(t(j, k) == want);
        }
}

TEST_CASE("tau_matrix deterministic across thread counts") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> U(0, 1);
    Eigen::MatrixXd m(150, 12);
    for (int i = 0; i < m.size(); ++i) m(i / 12, i % 12) = U(rng);
    setenv("SCCA_THREADS", "1", 1);
    Eigen::MatrixXd t1 = tau_matrix(m);
    setenv("SCCA_THREADS", "4", 1);
    Eigen::MatrixXd t4 = tau_matrix(m);
    unsetenv("SCCA_THREADS");
    CHECK((t1 - t4).cwiseAbs().maxCoeff() == 0.0);
}
