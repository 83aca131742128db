#pragma once

#include <cmath>

#include "rach/types.hpp"

namespace rach {

/// Expected successful devices per frame under slotted-ALOHA contention over
/// n_s * n_preambles opportunities: N_d * exp(-N_d / (n_s * n_preambles)).
inline Throughput throughput(Load load, int n_s, int n_preambles) {
  if (n_s < 1) throw DomainError("throughput: n_s must be >= 1");
  if (n_preambles < 1) throw DomainError("throughput: n_preambles must be >= 1");
  const double n = load.devices();
  const double c = static_cast<double>(n_s) * n_preambles;
  return Throughput(n * std::exp(-n / c));
}

inline Utility utility(Throughput eta, double alpha, int n_s) {
  return Utility{eta.value() - alpha * n_s};
}

inline Utility utility_of_load(Load load, int n_s, const RachConfig& config) {
  return utility(throughput(load, n_s, config.n_preambles), config.alpha, n_s);
}

/// Continuous extension of utility_of_load to real-valued n_s.
inline double utility_of_load_real(Load load, double n_s, const RachConfig& config) {
  if (!(n_s > 0.0)) throw DomainError("utility: n_s must be > 0");
  const double n = load.devices();
  return n * std::exp(-n / (n_s * config.n_preambles)) - config.alpha * n_s;
}

/// Stationarity residual in the published sign convention:
///   alpha - (N_d^2 / (N_p n_s^2)) exp(-N_d / (n_s N_p)).
/// This is -dU/dn_s; it vanishes exactly where utility is stationary in n_s.
inline double utility_gradient(Load load, double n_s, const RachConfig& config) {
  if (!(n_s > 0.0)) throw DomainError("utility_gradient: n_s must be > 0");
  const double n = load.devices();
  const double np = config.n_preambles;
  return config.alpha - (n * n / (np * n_s * n_s)) * std::exp(-n / (n_s * np));
}

/// dU/dn_s, the true derivative of utility_of_load_real.
inline double utility_derivative(Load load, double n_s, const RachConfig& config) {
  return -utility_gradient(load, n_s, config);
}

}  // namespace rach
