#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rach/types.hpp"

namespace rach {

enum class WBranch { Principal, Lower };

namespace detail {

inline constexpr double kBranchPoint = -1.0 / std::numbers::e;
inline constexpr double kBranchClamp = 1e-15;
inline constexpr int kMaxHalleyIterations = 50;

// Series in p = +-sqrt(2(e x + 1)) about the branch point. p > 0 selects W0, p < 0 selects W-1.
inline double branch_point_series(double x, double sign) {
  const double p = sign * std::sqrt(std::max(0.0, 2.0 * (std::numbers::e * x + 1.0)));
  return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0))));
}

inline double initial_guess(double x, WBranch branch) {
  if (branch == WBranch::Principal) {
    if (x < -0.25) return branch_point_series(x, 1.0);
    if (x < 3.0) {
      // Winitzki's approximation, good to a few percent on this range.
      const double l = std::log1p(x);
      return l * (1.0 - std::log1p(l) / (2.0 + l));
    }
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    return l1 - l2 + l2 / l1;
  }
  if (x < -0.25) return branch_point_series(x, -1.0);
  const double l1 = std::log(-x);
  const double l2 = std::log(-l1);
  return l1 - l2 + l2 / l1;
}

}  // namespace detail

/// Real Lambert W: the w with w * exp(w) == x on the requested branch.
///
/// Principal (W0) is defined on [-1/e, inf) and returns w >= -1; Lower (W-1) is
/// defined on [-1/e, 0) and returns w <= -1. Arguments at most 1e-15 below -1/e
/// are treated as the branch point. Anything further below throws NoRealSolution;
/// other domain violations (NaN, Lower with x >= 0) throw DomainError.
///
/// Halley iteration from a branch-specific starting point, stopped once
/// |w e^w - x| <= 1e-12 * max(1, |x|) and the step has settled.
inline double lambert_w(double x, WBranch branch) {
  using detail::kBranchPoint;
  if (std::isnan(x)) throw DomainError("lambert_w: argument is NaN");
  if (x < kBranchPoint) {
    if (kBranchPoint - x > detail::kBranchClamp)
      throw NoRealSolution("lambert_w: argument " + std::to_string(x) + " is below -1/e");
    return -1.0;
  }
  if (x == kBranchPoint) return -1.0;
  if (branch == WBranch::Lower && x >= 0.0)
    throw DomainError("lambert_w: lower branch requires -1/e <= x < 0");
  if (branch == WBranch::Principal) {
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return x;
  }

  const double tolerance = 1e-12 * std::max(1.0, std::abs(x));
  double w = detail::initial_guess(x, branch);
  for (int i = 0; i < detail::kMaxHalleyIterations; ++i) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    const double next = w - step;
    // Stay on the requested side of the branch point.
    w = branch == WBranch::Principal ? std::max(next, -1.0) : std::min(next, -1.0);
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(w)) && std::abs(w * std::exp(w) - x) <= tolerance)
      break;
  }
  return w;
}

}  // namespace rach
