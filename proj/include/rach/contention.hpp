#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "rach/types.hpp"

namespace rach {

enum class DeviceStatus { Contending, BackedOff, Barred, Succeeded, Dropped };

struct DeviceState {
  std::uint64_t id = 0;
  DeviceStatus status = DeviceStatus::Contending;
  std::int64_t backoff_until = 0;  // first frame the device may transmit again
  int attempts = 0;                // collisions suffered so far

  bool operator==(const DeviceState&) const = default;
};

struct ContentionResult {
  int successes = 0;
  int collisions = 0;  // pairs with two or more selectors
  int idle = 0;
  int collided_devices = 0;
};

/// One frame of preamble selection. Every contender draws one of
/// n_s * n_preambles (subframe, preamble) pairs uniformly. Sole selectors are
/// marked Succeeded; everybody else on a shared pair is left Contending.
template <class Rng>
ContentionResult contend(std::span<DeviceState> contenders, int n_s, int n_preambles, Rng& rng) {
  if (n_s < 1 || n_preambles < 1) throw DomainError("contend: n_s and n_preambles must be >= 1");
  const int pairs = n_s * n_preambles;
  std::uniform_int_distribution<int> pick(0, pairs - 1);

  std::vector<int> choice(contenders.size());
  std::vector<int> occupancy(static_cast<std::size_t>(pairs), 0);
  for (auto& c : choice) {
    c = pick(rng);
    ++occupancy[static_cast<std::size_t>(c)];
  }

  ContentionResult r;
  for (int n : occupancy) {
    if (n == 0) ++r.idle;
    else if (n == 1) ++r.successes;
    else ++r.collisions;
  }
  for (std::size_t i = 0; i < contenders.size(); ++i) {
    if (occupancy[static_cast<std::size_t>(choice[i])] == 1) contenders[i].status = DeviceStatus::Succeeded;
    else ++r.collided_devices;
  }
  return r;
}

/// Schedule a retry for each collided device, or drop it once it has used up
/// its retries. Delays are uniform on {1, ..., backoff_window} frames.
template <class Rng>
void resolve_backoff(std::span<DeviceState> collided, std::int64_t frame, int backoff_window, int retry_limit,
                     Rng& rng) {
  if (backoff_window < 1) throw ConfigError("sim.backoff_window", "must be >= 1");
  std::uniform_int_distribution<int> delay(1, backoff_window);
  for (DeviceState& d : collided) {
    if (d.attempts >= retry_limit) {
      d.status = DeviceStatus::Dropped;
      continue;
    }
    d.attempts += 1;
    d.status = DeviceStatus::BackedOff;
    d.backoff_until = frame + delay(rng);
  }
}

/// Access class barring. Each device passes with probability `p_barring`;
/// the rest are Barred until a uniform {1, ..., barring_window} frames later.
template <class Rng>
std::pair<std::vector<DeviceState>, std::vector<DeviceState>> acb_gate(std::vector<DeviceState> contenders,
                                                                       double p_barring, int barring_window,
                                                                       std::int64_t frame, Rng& rng) {
  if (!(p_barring > 0.0 && p_barring <= 1.0)) throw ConfigError("controller.acb_p", "must be in (0, 1]");
  if (barring_window < 1) throw ConfigError("controller.acb_window", "must be >= 1");
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> delay(1, barring_window);

  std::vector<DeviceState> admitted, barred;
  admitted.reserve(contenders.size());
  for (DeviceState& d : contenders) {
    if (coin(rng) < p_barring) {
      admitted.push_back(d);
    } else {
      d.status = DeviceStatus::Barred;
      d.backoff_until = frame + delay(rng);
      barred.push_back(d);
    }
  }
  return {std::move(admitted), std::move(barred)};
}

}  // namespace rach
