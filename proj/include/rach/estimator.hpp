#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <numbers>
#include <numeric>

#include "rach/lambert_w.hpp"
#include "rach/types.hpp"

namespace rach {

/// What the eNodeB sees after one frame: the status of every (subframe, preamble) pair.
struct RachObservation {
  int successes = 0;   // pairs chosen by exactly one device
  int collisions = 0;  // pairs chosen by two or more devices
  int idle = 0;        // pairs nobody chose
  int n_s_used = 0;
  int n_preambles = 0;

  int opportunities() const { return n_s_used * n_preambles; }
  bool consistent() const {
    return successes >= 0 && collisions >= 0 && idle >= 0 && n_s_used >= 1 && n_preambles >= 1 &&
           successes + collisions + idle == opportunities();
  }
};

enum class LoadBranch { Light, Heavy };

/// Light when at least opportunities/e pairs went unused, the expected idle
/// count at the load where the two inverse branches meet.
inline LoadBranch classify_load_branch(const RachObservation& obs) {
  if (!obs.consistent()) throw DomainError("classify_load_branch: inconsistent observation");
  return obs.idle >= obs.opportunities() / std::numbers::e ? LoadBranch::Light : LoadBranch::Heavy;
}

/// Raised when a success count cannot be explained by the throughput model.
class InconsistentObservation : public DomainError {
 public:
  using DomainError::DomainError;
};

struct EstimatorOptions {
  // Success ratios up to (1 + clamp_tolerance)/e are read as the peak.
  double clamp_tolerance = 0.25;
  // Heavy-branch answer for a frame with no successes, in units of opportunities.
  double load_cap_factor = 4.0;
};

/// Invert the throughput model: the device count that would produce `eta_obs`
/// expected successes over n_s * n_preambles opportunities.
inline Load estimate_load(Throughput eta_obs, int n_s, int n_preambles, LoadBranch branch,
                          const EstimatorOptions& options = {}) {
  if (n_s < 1 || n_preambles < 1) throw DomainError("estimate_load: n_s and n_preambles must be >= 1");
  const double m = static_cast<double>(n_s) * n_preambles;
  if (eta_obs.value() == 0.0) return Load(branch == LoadBranch::Light ? 0.0 : options.load_cap_factor * m);

  double u = eta_obs.value() / m;
  constexpr double peak = 1.0 / std::numbers::e;
  if (u > peak) {
    if (u > peak * (1.0 + options.clamp_tolerance))
      throw InconsistentObservation("estimate_load: success ratio exceeds the model peak");
    return Load(m);
  }
  // Within rounding of the peak the two branches meet; snap rather than amplify the noise.
  if (peak - u <= 4.0 * std::numeric_limits<double>::epsilon() * peak) return Load(m);
  const double w = lambert_w(-u, branch == LoadBranch::Light ? WBranch::Principal : WBranch::Lower);
  return Load(-m * w);
}

/// Moving window of recent load estimates.
class EstimatorState {
 public:
  explicit EstimatorState(std::size_t window = 1) : window_(window) {
    if (window_ < 1) throw ConfigError("controller.window", "must be >= 1");
  }

  std::size_t window() const { return window_; }
  const std::deque<double>& history() const { return history_; }

  void push(double estimate) {
    history_.push_back(estimate);
    while (history_.size() > window_) history_.pop_front();
  }

  double mean() const {
    if (history_.empty()) return 0.0;
    return std::accumulate(history_.begin(), history_.end(), 0.0) / static_cast<double>(history_.size());
  }

 private:
  std::size_t window_;
  std::deque<double> history_;
};

inline Load smooth_estimate(EstimatorState& state, Load new_estimate) {
  state.push(new_estimate.devices());
  return Load(state.mean());
}

}  // namespace rach
