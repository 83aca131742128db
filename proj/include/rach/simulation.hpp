#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include "rach/contention.hpp"
#include "rach/controller.hpp"
#include "rach/load_profile.hpp"
#include "rach/model.hpp"
#include "rach/types.hpp"

namespace rach {

struct Scenario {
  RachConfig channel;
  LoadProfile profile;
  ControllerSpec controller;
  int frames = 0;  // 0 means "the whole profile"
  int backoff_window = 4;
  int retry_limit = 10;

  int frame_count() const { return frames > 0 ? frames : profile.end_frame(); }

  void validate() const {
    channel.validate();
    controller.validate();
    if (profile.segments().empty()) throw ConfigError("load.segments", "required");
    if (frames < 0) throw ConfigError("sim.frames", "must be >= 0");
    if (profile.first_frame() != 0) throw ConfigError("load.segments", "must start at frame 0");
    if (frame_count() > profile.end_frame()) throw ConfigError("sim.frames", "exceeds the load profile");
    if (backoff_window < 1) throw ConfigError("sim.backoff_window", "must be >= 1");
    if (retry_limit < 0) throw ConfigError("sim.retry_limit", "must be >= 0");
  }

  bool operator==(const Scenario&) const = default;
};

struct FrameOutcome {
  int frame = 0;
  int n_s_used = 0;
  int n_preambles = 0;
  std::int64_t arrivals = 0;
  std::int64_t true_load = 0;  // devices due to transmit (new + retrying), before any barring
  std::int64_t contenders = 0; // devices that actually transmitted
  int successes = 0;
  int collisions = 0;
  int collided_devices = 0;
  int idle = 0;
  std::int64_t barred = 0;
  std::int64_t dropped = 0;
  std::optional<double> est_load;
  bool estimator_fallback = false;
  double throughput = 0.0;
  double utility = 0.0;

  RachObservation observation() const { return {successes, collisions, idle, n_s_used, n_preambles}; }

  bool satisfies_invariants(double alpha) const {
    return successes + collisions + idle == n_s_used * n_preambles && collided_devices >= 2 * collisions &&
           contenders == successes + collided_devices && throughput == successes &&
           utility == successes - alpha * n_s_used;
  }

  bool operator==(const FrameOutcome&) const = default;
};

struct TimeSeries {
  std::vector<FrameOutcome> rows;
  int replication_id = 0;
  std::uint64_t seed = 0;

  bool operator==(const TimeSeries&) const = default;
};

/// Independent random streams. Arrivals get their own stream so that every
/// controller run on the same seed sees the same arrival sequence.
struct RandomStreams {
  explicit RandomStreams(std::uint64_t seed)
      : arrivals(make(seed, 0)), contention(make(seed, 1)), backoff(make(seed, 2)), barring(make(seed, 3)) {}

  std::mt19937_64 arrivals, contention, backoff, barring;

 private:
  static std::mt19937_64 make(std::uint64_t seed, std::uint32_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream,
                      0x5eedu};
    return std::mt19937_64(seq);
  }
};

/// Frame loop: choose n_s, admit arrivals and due retriers, gate (ACB only),
/// contend, back off the losers, then show the outcome to the controller.
inline TimeSeries run_scenario(const Scenario& scenario, std::uint64_t seed, int replication_id = 0) {
  scenario.validate();
  const RachConfig& ch = scenario.channel;
  SubframeController controller(scenario.controller, ch);
  RandomStreams rng(seed);

  TimeSeries out;
  out.seed = seed;
  out.replication_id = replication_id;
  const int frames = scenario.frame_count();
  out.rows.reserve(static_cast<std::size_t>(frames));

  std::vector<DeviceState> waiting;
  std::uint64_t next_id = 0;
  for (int frame = 0; frame < frames; ++frame) {
    FrameOutcome row;
    row.frame = frame;
    row.n_s_used = controller.next_subframes();
    row.n_preambles = ch.n_preambles;
    row.arrivals = generate_arrivals(scenario.profile, frame, rng.arrivals);

    std::vector<DeviceState> due;
    std::vector<DeviceState> still_waiting;
    for (DeviceState& d : waiting) {
      if (d.backoff_until <= frame) {
        d.status = DeviceStatus::Contending;
        due.push_back(d);
      } else {
        still_waiting.push_back(d);
      }
    }
    for (std::int64_t i = 0; i < row.arrivals; ++i) due.push_back({next_id++, DeviceStatus::Contending, frame, 0});
    row.true_load = static_cast<std::int64_t>(due.size());

    std::vector<DeviceState> barred;
    if (controller.gates_access()) {
      auto gated = acb_gate(std::move(due), scenario.controller.acb_p, scenario.controller.acb_window, frame,
                            rng.barring);
      due = std::move(gated.first);
      barred = std::move(gated.second);
    }
    row.barred = static_cast<std::int64_t>(barred.size());
    row.contenders = static_cast<std::int64_t>(due.size());

    const ContentionResult c = contend(std::span<DeviceState>(due), row.n_s_used, ch.n_preambles, rng.contention);
    row.successes = c.successes;
    row.collisions = c.collisions;
    row.idle = c.idle;
    row.collided_devices = c.collided_devices;

    auto losers = std::stable_partition(due.begin(), due.end(),
                                        [](const DeviceState& d) { return d.status == DeviceStatus::Succeeded; });
    resolve_backoff(std::span<DeviceState>(losers, due.end()), frame, scenario.backoff_window,
                    scenario.retry_limit, rng.backoff);

    waiting = std::move(still_waiting);
    for (auto it = losers; it != due.end(); ++it) {
      if (it->status == DeviceStatus::Dropped) ++row.dropped;
      else waiting.push_back(*it);
    }
    waiting.insert(waiting.end(), barred.begin(), barred.end());

    row.throughput = row.successes;
    row.utility = row.successes - ch.alpha * row.n_s_used;

    const ControllerUpdate update = controller.observe(row.observation());
    row.est_load = update.est_load;
    row.estimator_fallback = update.fallback;
    out.rows.push_back(row);
  }
  return out;
}

/// Mean and 95% normal-approximation confidence interval.
struct Summary {
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n = 0;
};

inline Summary summarize(const std::vector<double>& xs) {
  Summary s;
  s.n = xs.size();
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(s.n);
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  const double half = s.n > 1 ? 1.96 * std::sqrt(ss / static_cast<double>(s.n - 1) / static_cast<double>(s.n)) : 0.0;
  s.ci_low = s.mean - half;
  s.ci_high = s.mean + half;
  return s;
}

/// Per-frame statistics across replications.
struct FrameSummary {
  int frame = 0;
  Summary n_s, arrivals, true_load, contenders, successes, collisions, collided_devices, idle;
  Summary est_load;  // over replications that produced an estimate; n == 0 if none did
  Summary throughput_sim, throughput_num, utility_sim, utility_num;
};

/// Analytic throughput at the realised contender count.
inline double analytic_throughput(const FrameOutcome& r) {
  return throughput(Load(static_cast<double>(r.contenders)), r.n_s_used, r.n_preambles).value();
}

inline double analytic_utility(const FrameOutcome& r, double alpha) {
  return analytic_throughput(r) - alpha * r.n_s_used;
}

/// Aggregates in replication order, so the result does not depend on which
/// thread finished first.
inline std::vector<FrameSummary> aggregate(const std::vector<TimeSeries>& runs, double alpha) {
  std::vector<FrameSummary> out;
  if (runs.empty()) return out;
  const std::size_t frames = runs.front().rows.size();
  for (std::size_t f = 0; f < frames; ++f) {
    FrameSummary s;
    s.frame = runs.front().rows[f].frame;
    const auto col = [&](auto&& get) {
      std::vector<double> xs;
      xs.reserve(runs.size());
      for (const TimeSeries& ts : runs) xs.push_back(static_cast<double>(get(ts.rows[f])));
      return summarize(xs);
    };
    s.n_s = col([](const FrameOutcome& r) { return r.n_s_used; });
    s.arrivals = col([](const FrameOutcome& r) { return r.arrivals; });
    s.true_load = col([](const FrameOutcome& r) { return r.true_load; });
    s.contenders = col([](const FrameOutcome& r) { return r.contenders; });
    s.successes = col([](const FrameOutcome& r) { return r.successes; });
    s.collisions = col([](const FrameOutcome& r) { return r.collisions; });
    s.collided_devices = col([](const FrameOutcome& r) { return r.collided_devices; });
    s.idle = col([](const FrameOutcome& r) { return r.idle; });
    s.throughput_sim = col([](const FrameOutcome& r) { return r.throughput; });
    s.throughput_num = col([](const FrameOutcome& r) { return analytic_throughput(r); });
    s.utility_sim = col([](const FrameOutcome& r) { return r.utility; });
    s.utility_num = col([&](const FrameOutcome& r) { return analytic_utility(r, alpha); });
    std::vector<double> est;
    for (const TimeSeries& ts : runs)
      if (ts.rows[f].est_load) est.push_back(*ts.rows[f].est_load);
    s.est_load = summarize(est);
    out.push_back(s);
  }
  return out;
}

struct ReplicationSet {
  std::vector<TimeSeries> runs;
  std::vector<FrameSummary> per_frame;
};

/// Runs seeds base_seed .. base_seed + n_reps - 1, in parallel when `threads` > 1.
inline ReplicationSet run_replications(const Scenario& scenario, int n_reps, std::uint64_t base_seed,
                                       unsigned threads = std::thread::hardware_concurrency()) {
  if (n_reps < 1) throw ConfigError("reps", "must be >= 1");
  scenario.validate();
  ReplicationSet out;
  out.runs.resize(static_cast<std::size_t>(n_reps));
  threads = std::clamp(threads, 1u, static_cast<unsigned>(n_reps));

  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(threads);
  const auto worker = [&](unsigned t) {
    try {
      for (int i = next++; i < n_reps; i = next++)
        out.runs[static_cast<std::size_t>(i)] = run_scenario(scenario, base_seed + static_cast<std::uint64_t>(i), i);
    } catch (...) {
      errors[t] = std::current_exception();
      next = n_reps;
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  out.per_frame = aggregate(out.runs, scenario.channel.alpha);
  return out;
}

}  // namespace rach
