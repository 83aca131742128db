#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "rach/simulation.hpp"

namespace {

using rach::ControllerKind;
using rach::DeviceState;
using rach::DeviceStatus;
using rach::LoadProfile;
using rach::Scenario;

Scenario default_scenario(ControllerKind kind = ControllerKind::Adaptive) {
  Scenario s;
  s.profile = LoadProfile::triangular(600, 10);
  s.controller.kind = kind;
  return s;
}

std::vector<DeviceState> devices(int n) {
  std::vector<DeviceState> d(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) d[static_cast<std::size_t>(i)].id = static_cast<std::uint64_t>(i);
  return d;
}

TEST(LoadProfile, InterpolatesLinearly) {
  const auto p = LoadProfile::triangular(300, 5);
  EXPECT_EQ(p.rate_at(0), 0.0);
  EXPECT_EQ(p.rate_at(5), 300.0);
  EXPECT_DOUBLE_EQ(p.rate_at(2), 120.0);
  EXPECT_DOUBLE_EQ(p.rate_at(7), 180.0);
  EXPECT_EQ(p.end_frame(), 10);
  EXPECT_THROW(p.rate_at(10), rach::DomainError);
  EXPECT_THROW(p.rate_at(-1), rach::DomainError);
}

TEST(LoadProfile, RejectsMalformedSegments) {
  EXPECT_THROW(LoadProfile(std::vector<LoadProfile::Segment>{}), rach::ConfigError);
  EXPECT_THROW(LoadProfile({{0, 0, 1, 1}}), rach::ConfigError);
  EXPECT_THROW(LoadProfile({{0, 5, -1, 1}}), rach::ConfigError);
  EXPECT_THROW(LoadProfile({{0, 5, 1, 1}, {6, 8, 1, 1}}), rach::ConfigError);
}

TEST(GenerateArrivals, ZeroRateGivesNoArrivals) {
  std::mt19937_64 rng(1);
  const auto p = LoadProfile::constant(0.0, 3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(rach::generate_arrivals(p, i % 3, rng), 0);
}

TEST(GenerateArrivals, PoissonMeanMatchesRate) {
  std::mt19937_64 rng(2);
  const auto p = LoadProfile::constant(300.0, 1);
  double sum = 0;
  for (int i = 0; i < 10000; ++i) sum += static_cast<double>(rach::generate_arrivals(p, 0, rng));
  EXPECT_NEAR(sum / 10000, 300.0, 0.03 * 300);
  EXPECT_THROW(rach::generate_arrivals(p, 1, rng), rach::DomainError);
}

TEST(Contend, SingleDeviceAlwaysSucceeds) {
  std::mt19937_64 rng(3);
  for (int n_s = 1; n_s <= 8; ++n_s) {
    auto d = devices(1);
    const auto r = rach::contend(std::span<DeviceState>(d), n_s, 64, rng);
    EXPECT_EQ(r.successes, 1);
    EXPECT_EQ(r.collisions, 0);
    EXPECT_EQ(r.idle, n_s * 64 - 1);
    EXPECT_EQ(d[0].status, DeviceStatus::Succeeded);
  }
}

TEST(Contend, NoDevicesLeavesEveryPairIdle) {
  std::mt19937_64 rng(4);
  std::vector<DeviceState> none;
  const auto r = rach::contend(std::span<DeviceState>(none), 3, 64, rng);
  EXPECT_EQ(r.successes, 0);
  EXPECT_EQ(r.idle, 192);
}

TEST(Contend, ConservesDevicesAndPairs) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> count(0, 1500), ns(1, 10);
  for (int i = 0; i < 300; ++i) {
    auto d = devices(count(rng));
    const int n_s = ns(rng);
    const auto r = rach::contend(std::span<DeviceState>(d), n_s, 64, rng);
    EXPECT_EQ(r.successes + r.collisions + r.idle, n_s * 64);
    EXPECT_EQ(r.successes + r.collided_devices, static_cast<int>(d.size()));
    EXPECT_GE(r.collided_devices, 2 * r.collisions);
    int won = 0;
    for (const auto& x : d) won += x.status == DeviceStatus::Succeeded;
    EXPECT_EQ(won, r.successes);
  }
}

TEST(Contend, MeanSuccessesMatchExactOccupancyProbability) {
  // Exact expectation of singleton bins for n balls in m bins: n (1 - 1/m)^(n-1).
  std::mt19937_64 rng(6);
  for (int n : {32, 128, 256}) {
    double sum = 0;
    const int reps = 2000;
    for (int i = 0; i < reps; ++i) {
      auto d = devices(n);
      sum += rach::contend(std::span<DeviceState>(d), 2, 64, rng).successes;
    }
    const double exact = n * std::pow(1.0 - 1.0 / 128, n - 1);
    EXPECT_NEAR(sum / reps, exact, 0.02 * exact) << n;
  }
}

TEST(ResolveBackoff, DropsAtTheRetryLimit) {
  std::mt19937_64 rng(7);
  auto d = devices(2);
  d[0].attempts = 10;
  d[1].attempts = 9;
  rach::resolve_backoff(std::span<DeviceState>(d), 5, 4, 10, rng);
  EXPECT_EQ(d[0].status, DeviceStatus::Dropped);
  EXPECT_EQ(d[1].status, DeviceStatus::BackedOff);
  EXPECT_EQ(d[1].attempts, 10);
  EXPECT_GT(d[1].backoff_until, 5);
}

TEST(ResolveBackoff, UnitWindowRetriesNextFrame) {
  std::mt19937_64 rng(8);
  auto d = devices(50);
  rach::resolve_backoff(std::span<DeviceState>(d), 12, 1, 10, rng);
  for (const auto& x : d) EXPECT_EQ(x.backoff_until, 13);
}

TEST(ResolveBackoff, DelaysAreUniform) {
  std::mt19937_64 rng(9);
  std::array<int, 4> hist{};
  auto d = devices(10000);
  rach::resolve_backoff(std::span<DeviceState>(d), 0, 4, 10, rng);
  for (const auto& x : d) {
    ASSERT_GE(x.backoff_until, 1);
    ASSERT_LE(x.backoff_until, 4);
    ++hist[static_cast<std::size_t>(x.backoff_until - 1)];
  }
  double chi2 = 0;
  for (int h : hist) chi2 += (h - 2500.0) * (h - 2500.0) / 2500.0;
  EXPECT_LT(chi2, 7.815);  // chi-square, 3 dof, 95%
}

TEST(AcbGate, AdmitsEverybodyAtProbabilityOne) {
  std::mt19937_64 rng(10);
  auto [in, out] = rach::acb_gate(devices(500), 1.0, 4, 0, rng);
  EXPECT_EQ(in.size(), 500u);
  EXPECT_TRUE(out.empty());
}

TEST(AcbGate, AdmitsTheConfiguredFraction) {
  std::mt19937_64 rng(11);
  auto [in, out] = rach::acb_gate(devices(10000), 0.5, 4, 7, rng);
  EXPECT_NEAR(static_cast<double>(in.size()) / 10000, 0.5, 0.02);
  EXPECT_EQ(in.size() + out.size(), 10000u);
  for (const auto& d : out) {
    EXPECT_EQ(d.status, DeviceStatus::Barred);
    EXPECT_GE(d.backoff_until, 8);
    EXPECT_LE(d.backoff_until, 11);
  }
}

TEST(AcbGate, RejectsBadProbability) {
  std::mt19937_64 rng(12);
  EXPECT_THROW(rach::acb_gate(devices(1), 0.0, 4, 0, rng), rach::ConfigError);
  EXPECT_THROW(rach::acb_gate(devices(1), 1.5, 4, 0, rng), rach::ConfigError);
}

TEST(RunScenario, ZeroLoadCostsOnlyTheSubframes) {
  for (auto kind : {ControllerKind::FixedDefault, ControllerKind::FixedMax, ControllerKind::Adaptive,
                    ControllerKind::Acb}) {
    Scenario s;
    s.profile = LoadProfile::constant(0.0, 12);
    s.controller.kind = kind;
    const auto ts = rach::run_scenario(s, 3);
    ASSERT_EQ(ts.rows.size(), 12u);
    for (const auto& r : ts.rows) {
      EXPECT_EQ(r.successes, 0);
      EXPECT_EQ(r.utility, -s.channel.alpha * r.n_s_used);
      EXPECT_EQ(r.n_s_used, kind == ControllerKind::FixedMax ? 8 : 2);
    }
  }
}

TEST(RunScenario, RowsSatisfyOutcomeInvariants) {
  for (auto kind : {ControllerKind::FixedDefault, ControllerKind::FixedMax, ControllerKind::Adaptive,
                    ControllerKind::Acb}) {
    const auto ts = rach::run_scenario(default_scenario(kind), 21);
    for (const auto& r : ts.rows) {
      EXPECT_TRUE(r.satisfies_invariants(25.0)) << r.frame;
      EXPECT_LE(r.contenders, r.true_load);
      EXPECT_EQ(r.est_load.has_value(), kind == ControllerKind::Adaptive && !r.estimator_fallback);
    }
  }
}

TEST(RunScenario, IsDeterministicPerSeed) {
  const auto a = rach::run_scenario(default_scenario(), 77);
  const auto b = rach::run_scenario(default_scenario(), 77);
  const auto c = rach::run_scenario(default_scenario(), 78);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(RunScenario, ArrivalsAreCommonAcrossControllers) {
  const auto a = rach::run_scenario(default_scenario(ControllerKind::Adaptive), 5);
  const auto f = rach::run_scenario(default_scenario(ControllerKind::FixedDefault), 5);
  const auto b = rach::run_scenario(default_scenario(ControllerKind::Acb), 5);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].arrivals, f.rows[i].arrivals);
    EXPECT_EQ(a.rows[i].arrivals, b.rows[i].arrivals);
  }
}

TEST(RunScenario, AdaptiveDecisionUsesOnlyEarlierFrames) {
  // Truncating the run withholds every later outcome; the shared prefix must not change.
  Scenario full = default_scenario();
  Scenario cut = full;
  const auto whole = rach::run_scenario(full, 9);
  for (int frames = 1; frames < full.frame_count(); ++frames) {
    cut.frames = frames;
    const auto part = rach::run_scenario(cut, 9);
    for (int f = 0; f < frames; ++f) ASSERT_EQ(part.rows[static_cast<std::size_t>(f)], whole.rows[static_cast<std::size_t>(f)]);
  }
  EXPECT_EQ(whole.rows.front().n_s_used, 2);
}

TEST(RunScenario, AdaptiveNextFrameFollowsTheEstimate) {
  const Scenario s = default_scenario();
  const auto ts = rach::run_scenario(s, 13);
  for (std::size_t i = 1; i < ts.rows.size(); ++i) {
    const auto& prev = ts.rows[i - 1];
    if (!prev.est_load) continue;
    EXPECT_EQ(ts.rows[i].n_s_used, rach::decide_subframes(rach::Load(*prev.est_load), s.channel).n_s);
  }
}

TEST(RunScenario, ResolvedDevicesNeverReturn) {
  Scenario s = default_scenario(ControllerKind::FixedDefault);
  s.retry_limit = 1;
  const auto ts = rach::run_scenario(s, 4);
  // Retriers due in a frame can only come from devices that arrived earlier and are still unresolved.
  std::int64_t arrived = 0, resolved = 0;
  for (const auto& r : ts.rows) {
    EXPECT_LE(r.true_load - r.arrivals, arrived - resolved) << r.frame;
    arrived += r.arrivals;
    resolved += r.successes + r.dropped;
  }
  EXPECT_LE(resolved, arrived);
}

TEST(RunReplications, SingleReplicationAggregatesToItself) {
  const auto set = rach::run_replications(default_scenario(), 1, 42, 1);
  const auto single = rach::run_scenario(default_scenario(), 42);
  ASSERT_EQ(set.runs.size(), 1u);
  EXPECT_EQ(set.runs[0], single);
  for (std::size_t f = 0; f < single.rows.size(); ++f) {
    EXPECT_EQ(set.per_frame[f].utility_sim.mean, single.rows[f].utility);
    EXPECT_EQ(set.per_frame[f].contenders.mean, static_cast<double>(single.rows[f].contenders));
  }
}

TEST(RunReplications, AdaptiveTracksTheModeratePeak) {
  Scenario s;
  s.profile = LoadProfile::triangular(300, 5);
  const auto set = rach::run_replications(s, 100, 1, 1);
  double est = 0.0;
  for (const auto& ts : set.runs) {
    ASSERT_TRUE(ts.rows[5].est_load.has_value());
    est += *ts.rows[5].est_load;
  }
  est /= static_cast<double>(set.runs.size());
  const double truth = set.per_frame[5].contenders.mean;
  EXPECT_NEAR(est, truth, 0.05 * truth);
}

TEST(RunReplications, AdaptiveBeatsFixedOnTheModeratePeak) {
  double total[2] = {0.0, 0.0};
  int i = 0;
  for (auto kind : {ControllerKind::Adaptive, ControllerKind::FixedDefault}) {
    Scenario s;
    s.profile = LoadProfile::triangular(300, 5);
    s.controller.kind = kind;
    for (const auto& f : rach::run_replications(s, 100, 1, 1).per_frame) total[i] += f.utility_sim.mean;
    ++i;
  }
  EXPECT_GT(total[0], total[1]);
}

TEST(RunReplications, ThreadCountDoesNotChangeTheResult) {
  const auto a = rach::run_replications(default_scenario(), 12, 100, 1);
  const auto b = rach::run_replications(default_scenario(), 12, 100, 4);
  EXPECT_EQ(a.runs, b.runs);
  for (std::size_t f = 0; f < a.per_frame.size(); ++f)
    EXPECT_EQ(a.per_frame[f].utility_sim.mean, b.per_frame[f].utility_sim.mean);
}

TEST(Summarize, NormalIntervalArithmetic) {
  const auto s = rach::summarize({1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  const double half = 1.96 * std::sqrt(5.0 / 3.0 / 4.0);
  EXPECT_DOUBLE_EQ(s.ci_low, 2.5 - half);
  EXPECT_DOUBLE_EQ(s.ci_high, 2.5 + half);
  EXPECT_EQ(rach::summarize({}).n, 0u);
}

}  // namespace
