#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "rach/estimator.hpp"
#include "rach/optimizer.hpp"
#include "rach/types.hpp"

namespace rach {

enum class ControllerKind { FixedDefault, FixedMax, Adaptive, Acb };

/// CLI spelling: fixed, max, adaptive, acb.
inline std::string_view to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::FixedDefault: return "fixed";
    case ControllerKind::FixedMax: return "max";
    case ControllerKind::Adaptive: return "adaptive";
    case ControllerKind::Acb: return "acb";
  }
  return "?";
}

inline std::optional<ControllerKind> parse_controller_kind(std::string_view s) {
  if (s == "fixed") return ControllerKind::FixedDefault;
  if (s == "max") return ControllerKind::FixedMax;
  if (s == "adaptive") return ControllerKind::Adaptive;
  if (s == "acb") return ControllerKind::Acb;
  return std::nullopt;
}

struct ControllerSpec {
  ControllerKind kind = ControllerKind::Adaptive;
  int window = 1;  // estimator averaging window, frames
  double table_max_load = kDefaultTableMaxLoad;
  double acb_p = 0.5;
  int acb_window = 4;
  EstimatorOptions estimator;

  void validate() const {
    if (window < 1) throw ConfigError("controller.window", "must be >= 1");
    if (!(table_max_load > 0.0)) throw ConfigError("controller.table_max_load", "must be > 0");
    if (!(acb_p > 0.0 && acb_p <= 1.0)) throw ConfigError("controller.acb_p", "must be in (0, 1]");
    if (acb_window < 1) throw ConfigError("controller.acb_window", "must be >= 1");
  }

  bool operator==(const ControllerSpec& o) const {
    return kind == o.kind && window == o.window && table_max_load == o.table_max_load && acb_p == o.acb_p &&
           acb_window == o.acb_window && estimator.clamp_tolerance == o.estimator.clamp_tolerance &&
           estimator.load_cap_factor == o.estimator.load_cap_factor;
  }
};

/// Result of feeding one frame's observation to a controller.
struct ControllerUpdate {
  std::optional<double> est_load;  // set by the adaptive controller only
  bool fallback = false;           // observation could not be inverted; next frame uses n_s_max
};

/// Chooses the RACH subframe count for the coming frame from past observations only.
class SubframeController {
 public:
  SubframeController(ControllerSpec spec, RachConfig config)
      : spec_(spec), config_(config), state_(static_cast<std::size_t>(spec.window)) {
    spec_.validate();
    config_.validate();
    next_ = spec_.kind == ControllerKind::FixedMax ? config_.n_s_max : config_.n_s_min;
  }

  const ControllerSpec& spec() const { return spec_; }
  ControllerKind kind() const { return spec_.kind; }
  bool gates_access() const { return spec_.kind == ControllerKind::Acb; }

  int next_subframes() const { return next_; }

  ControllerUpdate observe(const RachObservation& obs) {
    if (spec_.kind != ControllerKind::Adaptive) return {};
    try {
      const LoadBranch branch = classify_load_branch(obs);
      const Load raw = estimate_load(Throughput(obs.successes), obs.n_s_used, obs.n_preambles, branch,
                                     spec_.estimator);
      const Load smoothed = smooth_estimate(state_, raw);
      next_ = decide_subframes(smoothed, config_, spec_.table_max_load).n_s;
      return {smoothed.devices(), false};
    } catch (const InconsistentObservation&) {
      next_ = config_.n_s_max;
      return {std::nullopt, true};
    }
  }

 private:
  ControllerSpec spec_;
  RachConfig config_;
  EstimatorState state_;
  int next_ = 0;
};

}  // namespace rach
