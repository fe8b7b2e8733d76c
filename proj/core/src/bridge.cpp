#include "scca/bridge.hpp"

#include <cmath>
#include <stdexcept>

#include "scca/mvn.hpp"

namespace scca::bridge {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865476;

double phi3(double a, double b, double c, const Eigen::Matrix3d& s) {
    Eigen::Vector3d lim(a, b, c);
    return mvn::mvn_cdf(lim, mvn::CorrelationMatrix(s));
}

double phi4(double a, double b, double c, double d, const Eigen::Matrix4d& s) {
    Eigen::Vector4d lim(a, b, c, d);
    return mvn::mvn_cdf(lim, mvn::CorrelationMatrix(s));
}

}  // namespace

KindMapping pair_kind(VariableType tj, VariableType tk) {
    using VT = VariableType;
    if (tj == VT::continuous && tk == VT::continuous) return {PairKind::CC, false};
    if (tj == VT::binary && tk == VT::binary) return {PairKind::BB, false};
    if (tj == VT::continuous && tk == VT::binary) return {PairKind::CB, false};
    if (tj == VT::binary && tk == VT::continuous) return {PairKind::CB, true};
    if (tj == VT::truncated && tk == VT::continuous) return {PairKind::TC, false};
    if (tj == VT::continuous && tk == VT::truncated) return {PairKind::TC, true};
    if (tj == VT::truncated && tk == VT::binary) return {PairKind::TB, false};
    if (tj == VT::binary && tk == VT::truncated) return {PairKind::TB, true};
    return {PairKind::TT, false};
}

double estimate_threshold(std::span<const double> column, VariableType type) {
    if (type == VariableType::continuous)
        throw std::invalid_argument("estimate_threshold: continuous column has no threshold");
    const double n = static_cast<double>(column.size());
    if (n < 1) throw std::invalid_argument("estimate_threshold: empty column");
    double zeros = 0;
    for (double x : column) zeros += (x == 0.0);
    double prop = zeros / n;
    prop = std::min(1.0 - 0.5 / n, std::max(0.5 / n, prop));
    return mvn::std_normal_quantile(prop);
}

double bridge_cc(double r) { return 2.0 * std::asin(r) / M_PI; }

double bridge_bb(double r, double dj, double dk) {
    return 2.0 * (mvn::bvn_cdf(dj, dk, r) -
                  mvn::std_normal_cdf(dj) * mvn::std_normal_cdf(dk));
}

double bridge_cb(double r, double dk) {
    return 4.0 * mvn::bvn_cdf(dk, 0.0, r * kInvSqrt2) - 2.0 * mvn::std_normal_cdf(dk);
}

double bridge_tc(double r, double dj) {
    Eigen::Matrix3d s3;
    s3 << 1.0, kInvSqrt2, r * kInvSqrt2,
          kInvSqrt2, 1.0, r,
          r * kInvSqrt2, r, 1.0;
    return -2.0 * mvn::bvn_cdf(-dj, 0.0, kInvSqrt2) + 4.0 * phi3(-dj, 0.0, 0.0, s3);
}

double bridge_tb(double r, double dj, double dk) {
    Eigen::Matrix3d s3a, s3b;
    s3a << 1.0, -r, kInvSqrt2,
           -r, 1.0, -r * kInvSqrt2,
           kInvSqrt2, -r * kInvSqrt2, 1.0;
    s3b << 1.0, 0.0, -kInvSqrt2,
           0.0, 1.0, -r * kInvSqrt2,
           -kInvSqrt2, -r * kInvSqrt2, 1.0;
    return 2.0 * (1.0 - mvn::std_normal_cdf(dj)) * mvn::std_normal_cdf(dk) -
           2.0 * phi3(-dj, dk, 0.0, s3a) - 2.0 * phi3(-dj, dk, 0.0, s3b);
}

double bridge_tt(double r, double dj, double dk) {
    Eigen::Matrix4d s4a, s4b;
    s4a << 1.0, 0.0, kInvSqrt2, -r * kInvSqrt2,
           0.0, 1.0, -r * kInvSqrt2, kInvSqrt2,
           kInvSqrt2, -r * kInvSqrt2, 1.0, -r,
           -r * kInvSqrt2, kInvSqrt2, -r, 1.0;
    s4b << 1.0, r, kInvSqrt2, r * kInvSqrt2,
           r, 1.0, r * kInvSqrt2, kInvSqrt2,
           kInvSqrt2, r * kInvSqrt2, 1.0, r,
           r * kInvSqrt2, kInvSqrt2, r, 1.0;
    return -2.0 * phi4(-dj, -dk, 0.0, 0.0, s4a) + 2.0 * phi4(-dj, -dk, 0.0, 0.0, s4b);
}

double bridge_value(PairKind kind, double r, std::optional<double> dj,
                    std::optional<double> dk) {
    auto need = [](const std::optional<double>& d, const char* which) {
        if (!d) throw std::invalid_argument(std::string("bridge_value: missing threshold ") + which);
        return *d;
    };
    switch (kind) {
        case PairKind::CC: return bridge_cc(r);
        case PairKind::BB: return bridge_bb(r, need(dj, "dj"), need(dk, "dk"));
        case PairKind::CB: return bridge_cb(r, need(dk, "dk"));
        case PairKind::TC: return bridge_tc(r, need(dj, "dj"));
        case PairKind::TB: return bridge_tb(r, need(dj, "dj"), need(dk, "dk"));
        case PairKind::TT: return bridge_tt(r, need(dj, "dj"), need(dk, "dk"));
    }
    throw std::logic_error("bridge_value: unreachable");
}

double invert_bridge(double tau_hat, PairKind kind, std::optional<double> dj,
                     std::optional<double> dk) {
    const double rmax = kMaxAbsCorrelation;
    if (kind == PairKind::CC) {
        double r = std::sin(M_PI * tau_hat / 2.0);
        return std::min(rmax, std::max(-rmax, r));
    }
    auto f = [&](double r) { return bridge_value(kind, r, dj, dk); };
    double flo = f(-rmax), fhi = f(rmax);
    double tau = std::min(fhi, std::max(flo, tau_hat));
    if (tau <= flo) return -rmax;
    if (tau >= fhi) return rmax;
    // Safeguarded regula falsi (Illinois) on the strictly increasing bridge,
    // seeded with the CC closed form as an interior guess.
    double lo = -rmax, hi = rmax;
    double glo = flo - tau, ghi = fhi - tau;
    double guess = std::sin(M_PI * tau / 2.0);
    if (guess > lo + 1e-6 && guess < hi - 1e-6) {
        double g = f(guess) - tau;
        if (g == 0.0) return guess;
        if (g < 0) {
            lo = guess; glo = g;
        } else {
            hi = guess; ghi = g;
        }
    }
    // Converge on the bracket width rather than the residual alone: where the
    // bridge is nearly flat, a small residual still allows a large error in r.
    int side = 0;
    for (int it = 0; it < 200; ++it) {
        double r = lo + (hi - lo) * (-glo) / (ghi - glo);
        if (!(r > lo && r < hi)) r = (lo + hi) / 2;
        double g = f(r) - tau;
        if (g == 0.0) return r;
        if (g < 0) {
            lo = r;
            glo = g;
            if (side == -1) ghi *= 0.5;  // stale upper end: Illinois weighting
            side = -1;
        } else {
            hi = r;
            ghi = g;
            if (side == 1) glo *= 0.5;
            side = 1;
        }
        if (hi - lo < 1e-10) break;
    }
    return (lo + hi) / 2;
}

}  // namespace scca::bridge
