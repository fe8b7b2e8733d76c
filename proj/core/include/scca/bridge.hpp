#pragma once

#include <optional>
#include <span>

#include "scca/types.hpp"

namespace scca::bridge {

// Variable-type pair, order-normalized. First letter names the row-type
// of the bridge's first argument (T = truncated, C = continuous,
// B = binary).
enum class PairKind { CC, BB, CB, TC, TB, TT };

// Kind plus whether (j,k) had to be swapped to reach the normalized order.
struct KindMapping {
    PairKind kind;
    bool swapped;
};

KindMapping pair_kind(VariableType tj, VariableType tk);

// Latent-scale cutpoint estimate: quantile of the zero proportion, which
// is clamped to [1/(2n), 1-1/(2n)] so the result stays finite.
// Throws std::invalid_argument for continuous columns.
double estimate_threshold(std::span<const double> column, VariableType type);

// Bridge functions mapping latent correlation to population Kendall's tau.
double bridge_cc(double r);
double bridge_bb(double r, double dj, double dk);
double bridge_cb(double r, double dk);
double bridge_tc(double r, double dj);
double bridge_tb(double r, double dj, double dk);
double bridge_tt(double r, double dj, double dk);

// Evaluate the bridge for a kind; thresholds as required by the kind
// (dj for the first variable, dk for the second, in normalized order).
double bridge_value(PairKind kind, double r, std::optional<double> dj,
                    std::optional<double> dk);

inline constexpr double kMaxAbsCorrelation = 0.99;

// Monotone inversion of the bridge on [-0.99, 0.99]. Out-of-range tau is
// clamped to the attainable boundary; CC uses the closed form
// sin(pi tau / 2). Residual tolerance 1e-8 on the tau scale.
double invert_bridge(double tau_hat, PairKind kind,
                     std::optional<double> dj = std::nullopt,
                     std::optional<double> dk = std::nullopt);

}  // namespace scca::bridge
