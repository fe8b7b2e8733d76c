#include "scca/kendall.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "scca/threads.hpp"

namespace scca::kendall {

namespace {

int sign(double d) { return (d > 0) - (d < 0); }

// Strict inversions (a[i] > a[j] for i < j) by merge sort.
std::int64_t count_inversions(std::vector<double>& a, std::vector<double>& buf) {
    const std::size_t n = a.size();
    std::int64_t inv = 0;
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo + width < n; lo += 2 * width) {
            std::size_t mid = lo + width;
            std::size_t hi = std::min(n, mid + width);
            std::size_t i = lo, j = mid, k = lo;
            while (i < mid && j < hi) {
                if (a[j] < a[i]) {
                    inv += static_cast<std::int64_t>(mid - i);
                    buf[k++] = a[j++];
                } else {
                    buf[k++] = a[i++];
                }
            }
            while (i < mid) buf[k++] = a[i++];
            while (j < hi) buf[k++] = a[j++];
            std::copy(buf.begin() + lo, buf.begin() + hi, a.begin() + lo);
        }
    }
    return inv;
}

std::int64_t pairs2(std::int64_t t) { return t * (t - 1) / 2; }

}  // namespace

double tau_pair_naive(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (y.size() != n) throw std::invalid_argument("kendall: length mismatch");
    if (n < 2) throw std::invalid_argument("kendall: need n >= 2");
    std::int64_t s = 0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            s += sign(x[i] - x[j]) * sign(y[i] - y[j]);
    return static_cast<double>(s) / static_cast<double>(pairs2(static_cast<std::int64_t>(n)));
}

double tau_pair_fast(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (y.size() != n) throw std::invalid_argument("kendall: length mismatch");
    if (n < 2) throw std::invalid_argument("kendall: need n >= 2");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });
    // Tie counts: n1 over x-groups, n3 over (x,y)-groups, n2 over y-groups.
    std::int64_t n1 = 0, n3 = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && x[idx[j]] == x[idx[i]]) ++j;
        n1 += pairs2(static_cast<std::int64_t>(j - i));
        std::size_t k = i;
        while (k < j) {
            std::size_t l = k;
            while (l < j && y[idx[l]] == y[idx[k]]) ++l;
            n3 += pairs2(static_cast<std::int64_t>(l - k));
            k = l;
        }
        i = j;
    }
    std::vector<double> ys(n), buf(n);
    for (std::size_t t = 0; t < n; ++t) ys[t] = y[idx[t]];
    // Equal-x runs are sorted by y, so inversions only count pairs with
    // strictly different x and strictly discordant y.
    std::int64_t dis = count_inversions(ys, buf);
    std::sort(ys.begin(), ys.end());
    std::int64_t n2 = 0;
    i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && ys[j] == ys[i]) ++j;
        n2 += pairs2(static_cast<std::int64_t>(j - i));
        i = j;
    }
    std::int64_t n0 = pairs2(static_cast<std::int64_t>(n));
    std::int64_t numer = n0 - n1 - n2 + n3 - 2 * dis;
    return static_cast<double>(numer) / static_cast<double>(n0);
}

double tau_pair(std::span<const double> x, std::span<const double> y) {
    return x.size() >= 64 ? tau_pair_fast(x, y) : tau_pair_naive(x, y);
}

Eigen::MatrixXd tau_matrix(const Eigen::MatrixXd& values) {
    const Eigen::Index p = values.cols();
    const Eigen::Index n = values.rows();
    if (n < 2) throw std::invalid_argument("kendall: need n >= 2");
    Eigen::MatrixXd tau = Eigen::MatrixXd::Identity(p, p);
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    pairs.reserve(static_cast<std::size_t>(p) * (p - 1) / 2);
    for (Eigen::Index j = 0; j < p; ++j)
        for (Eigen::Index k = j + 1; k < p; ++k) pairs.emplace_back(j, k);
    parallel_for(pairs.size(), [&](std::size_t i) {
        auto [j, k] = pairs[i];
        double t = tau_pair(std::span<const double>(values.col(j).data(), n),
                            std::span<const double>(values.col(k).data(), n));
        tau(j, k) = t;
        tau(k, j) = t;
    });
    return tau;
}

Eigen::MatrixXd tau_matrix(const MixedDataMatrix& data) {
    return tau_matrix(data.values);
}

}  // namespace scca::kendall
