#pragma once

#include <algorithm>
#include <cmath>
#include <iterator>
#include <optional>
#include <vector>

#include "rach/lambert_w.hpp"
#include "rach/model.hpp"
#include "rach/types.hpp"

namespace rach {

struct SubframeDecision {
  int n_s = 0;
  Utility achieved_utility;
  bool clamped = false;  // the answer was forced by the range limits
};

/// Load beyond which the controller stops optimizing and allocates n_s_max.
inline constexpr double kDefaultTableMaxLoad = 700.0;

/// Exhaustive argmax of utility over {n_s_min, ..., n_s_max}; ties go to the smaller n_s.
inline SubframeDecision optimal_subframes_integer(Load load, const RachConfig& config) {
  SubframeDecision best{config.n_s_min, utility_of_load(load, config.n_s_min, config), false};
  for (int n_s = config.n_s_min + 1; n_s <= config.n_s_max; ++n_s) {
    const Utility u = utility_of_load(load, n_s, config);
    if (u.value > best.achieved_utility.value) best = {n_s, u, false};
  }
  return best;
}

/// Real-valued interior maximizer of utility in n_s.
///
/// With x = N_d / (n_s N_p), stationarity reads x^2 e^{-x} = alpha / N_p. Its two
/// roots are x = -2 W(-sqrt(alpha / N_p) / 2) on either branch. Utility falls,
/// rises, then falls again as n_s grows, so the local maximum is the smaller
/// root (x < 2, principal branch) and the other root is a local minimum.
///
/// Returns nullopt when alpha > 4 N_p / e^2: no stationary point exists and
/// utility is strictly decreasing in n_s.
inline std::optional<double> optimal_subframes_closed_form(Load load, const RachConfig& config) {
  if (!(load.devices() > 0.0)) throw DomainError("closed form requires load > 0");
  if (!(config.alpha > 0.0)) throw DomainError("closed form requires alpha > 0");
  const double arg = -std::sqrt(config.alpha / config.n_preambles) / 2.0;
  double w = 0.0;
  try {
    w = lambert_w(arg, WBranch::Principal);
  } catch (const NoRealSolution&) {
    return std::nullopt;
  }
  return -load.devices() / (2.0 * config.n_preambles * w);
}

/// The local minimum of utility in n_s (lower-branch root); nullopt as above.
inline std::optional<double> utility_minimum_closed_form(Load load, const RachConfig& config) {
  if (!(load.devices() > 0.0)) throw DomainError("closed form requires load > 0");
  if (!(config.alpha > 0.0)) throw DomainError("closed form requires alpha > 0");
  const double arg = -std::sqrt(config.alpha / config.n_preambles) / 2.0;
  try {
    return -load.devices() / (2.0 * config.n_preambles * lambert_w(arg, WBranch::Lower));
  } catch (const NoRealSolution&) {
    return std::nullopt;
  }
}

/// Integer decision reconstructed from the closed form: the best of the
/// neighbours of the real optimum and both range ends. Falls back to the
/// range ends when there is no interior optimum.
inline SubframeDecision closed_form_decision(Load load, const RachConfig& config) {
  std::vector<int> candidates{config.n_s_min, config.n_s_max};
  if (load.devices() > 0.0 && config.alpha > 0.0) {
    if (const auto r = optimal_subframes_closed_form(load, config)) {
      const auto clamp = [&](double v) {
        return static_cast<int>(std::clamp(v, double(config.n_s_min), double(config.n_s_max)));
      };
      candidates.push_back(clamp(std::floor(*r)));
      candidates.push_back(clamp(std::ceil(*r)));
    }
  }
  std::sort(candidates.begin(), candidates.end());
  SubframeDecision best{candidates.front(), utility_of_load(load, candidates.front(), config), false};
  for (int n_s : candidates) {
    const Utility u = utility_of_load(load, n_s, config);
    if (u.value > best.achieved_utility.value) best = {n_s, u, false};
  }
  return best;
}

/// Controller entry point: argmax inside the provisioned range, n_s_max beyond it.
inline SubframeDecision decide_subframes(Load load, const RachConfig& config,
                                         double table_max_load = kDefaultTableMaxLoad) {
  if (load.devices() > table_max_load)
    return {config.n_s_max, utility_of_load(load, config.n_s_max, config), true};
  return optimal_subframes_integer(load, config);
}

/// Offline load -> subframe table. Entry i covers loads in
/// [entries[i].load_threshold, entries[i+1].load_threshold).
///
/// Thresholds are located to near machine precision by bisection between grid
/// points, so lookups reproduce optimal_subframes_integer for any load in
/// (0, max_load]. The first entry starts at 0 and holds the decision for
/// vanishingly small positive loads.
class LookupTable {
 public:
  struct Entry {
    double load_threshold;
    int n_s;
    bool operator==(const Entry&) const = default;
  };

  LookupTable(double alpha, int n_preambles, double max_load, std::vector<Entry> entries)
      : alpha_(alpha), n_preambles_(n_preambles), max_load_(max_load), entries_(std::move(entries)) {}

  double alpha() const { return alpha_; }
  int n_preambles() const { return n_preambles_; }
  double max_load() const { return max_load_; }
  const std::vector<Entry>& entries() const { return entries_; }

  /// Subframes for `load`. Loads past max_load get the last entry.
  int lookup(Load load) const {
    auto it = std::upper_bound(entries_.begin(), entries_.end(), load.devices(),
                               [](double l, const Entry& e) { return l < e.load_threshold; });
    if (it == entries_.begin()) return entries_.front().n_s;
    return std::prev(it)->n_s;
  }

 private:
  double alpha_;
  int n_preambles_;
  double max_load_;
  std::vector<Entry> entries_;
};

inline LookupTable subframe_lookup_table(const RachConfig& config, double load_grid_step = 1.0,
                                         double max_load = kDefaultTableMaxLoad) {
  if (!(load_grid_step > 0.0)) throw ConfigError("step", "must be > 0");
  if (!(max_load > 0.0)) throw ConfigError("max_load", "must be > 0");
  const auto decide = [&](double l) { return optimal_subframes_integer(Load(l), config).n_s; };

  const auto steps = static_cast<long>(std::ceil(max_load / load_grid_step));
  double prev_load = std::min(load_grid_step, max_load);
  int prev = decide(prev_load);
  std::vector<LookupTable::Entry> entries{{0.0, prev}};
  for (long k = 2; k <= steps; ++k) {
    const double l = std::min(static_cast<double>(k) * load_grid_step, max_load);
    const int current = decide(l);
    if (current != prev) {
      double lo = prev_load, hi = l;
      for (int i = 0; i < 200; ++i) {
        const double mid = lo + (hi - lo) / 2.0;
        if (mid <= lo || mid >= hi) break;
        (decide(mid) == current ? hi : lo) = mid;
      }
      entries.push_back({hi, current});
      prev = current;
    }
    prev_load = l;
  }
  return LookupTable(config.alpha, config.n_preambles, max_load, std::move(entries));
}

}  // namespace rach
