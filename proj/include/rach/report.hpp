#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rach/csv.hpp"
#include "rach/optimizer.hpp"
#include "rach/simulation.hpp"

namespace rach {

inline constexpr std::string_view kRunCsvHeader =
    "rep,frame,controller,n_s,arrivals,contenders,successes,collided_devices,idle,est_load,true_load,"
    "throughput_sim,throughput_num,utility_sim,utility_num";

/// Per-replication rows followed by one `rep=mean` row per frame. The *_num
/// columns evaluate the analytic model at the realised contender count.
/// Throws std::logic_error if any row breaks the frame accounting identities.
inline void write_run_csv(std::ostream& out, const ReplicationSet& set, std::string_view controller, double alpha) {
  out << kRunCsvHeader << '\n';
  csv::RowWriter w(out);
  for (const TimeSeries& ts : set.runs) {
    for (const FrameOutcome& r : ts.rows) {
      if (!r.satisfies_invariants(alpha))
        throw std::logic_error("frame " + std::to_string(r.frame) + " of replication " +
                               std::to_string(ts.replication_id) + " violates the outcome invariants");
      w << ts.replication_id << r.frame << controller << r.n_s_used << r.arrivals << r.contenders << r.successes
        << r.collided_devices << r.idle;
      if (r.est_load) w << *r.est_load;
      else w.empty();
      w << r.true_load << r.throughput << analytic_throughput(r) << r.utility << analytic_utility(r, alpha);
      w.end();
    }
  }
  for (const FrameSummary& s : set.per_frame) {
    w << "mean" << s.frame << controller << s.n_s.mean << s.arrivals.mean << s.contenders.mean << s.successes.mean
      << s.collided_devices.mean << s.idle.mean;
    if (s.est_load.n > 0) w << s.est_load.mean;
    else w.empty();
    w << s.true_load.mean << s.throughput_sim.mean << s.throughput_num.mean << s.utility_sim.mean
      << s.utility_num.mean;
    w.end();
  }
}

/// Lookup table as (load_threshold, n_s) rows.
inline void write_table_csv(std::ostream& out, const LookupTable& table) {
  out << "load_threshold,n_s\n";
  csv::RowWriter w(out);
  for (const auto& e : table.entries()) {
    w << e.load_threshold << e.n_s;
    w.end();
  }
}

/// Dense (load, n_s) sweep on the grid 0, step, 2 step, ..., max_load.
inline void write_sweep_csv(std::ostream& out, const RachConfig& config, double step, double max_load) {
  out << "load,n_s,utility\n";
  csv::RowWriter w(out);
  const auto n = static_cast<long>(std::floor(max_load / step + 1e-9));
  for (long k = 0; k <= n; ++k) {
    const double load = static_cast<double>(k) * step;
    const SubframeDecision d = optimal_subframes_integer(Load(load), config);
    w << load << d.n_s << d.achieved_utility.value;
    w.end();
  }
}

struct ControllerResult {
  std::string name;
  ReplicationSet set;
};

struct ComparisonReport {
  struct Entry {
    std::string name;
    double aggregate_utility = 0.0;  // sum over frames, mean over replications
    std::vector<double> frame_utility;  // per-frame mean
  };
  struct Pair {
    std::string a, b;
    double improvement_pct = 0.0;  // 100 (U_a - U_b) / |U_b|
    double win_fraction = 0.0;     // frames where a's mean utility >= b's
  };
  std::vector<Entry> controllers;
  std::vector<Pair> pairs;
};

inline double improvement_pct(double ua, double ub) {
  if (ub == 0.0) return ua == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
  return 100.0 * (ua - ub) / std::abs(ub);
}

inline ComparisonReport build_report(const std::vector<ControllerResult>& results) {
  ComparisonReport rep;
  for (const ControllerResult& r : results) {
    ComparisonReport::Entry e;
    e.name = r.name;
    double total = 0.0;
    for (const TimeSeries& ts : r.set.runs)
      for (const FrameOutcome& row : ts.rows) total += row.utility;
    e.aggregate_utility = total / static_cast<double>(r.set.runs.size());
    for (const FrameSummary& s : r.set.per_frame) e.frame_utility.push_back(s.utility_sim.mean);
    rep.controllers.push_back(std::move(e));
  }
  for (const auto& a : rep.controllers) {
    for (const auto& b : rep.controllers) {
      if (&a == &b) continue;
      ComparisonReport::Pair p{a.name, b.name, improvement_pct(a.aggregate_utility, b.aggregate_utility), 0.0};
      const std::size_t n = std::min(a.frame_utility.size(), b.frame_utility.size());
      std::size_t wins = 0;
      for (std::size_t f = 0; f < n; ++f) wins += a.frame_utility[f] >= b.frame_utility[f];
      p.win_fraction = n ? static_cast<double>(wins) / static_cast<double>(n) : 0.0;
      rep.pairs.push_back(p);
    }
  }
  return rep;
}

inline std::string format_report(const ComparisonReport& rep) {
  std::ostringstream o;
  o << "controller,aggregate_utility\n";
  for (const auto& e : rep.controllers) o << e.name << ',' << csv::number(e.aggregate_utility) << '\n';
  o << "\ncontroller,baseline,improvement_pct,win_fraction\n";
  for (const auto& p : rep.pairs)
    o << p.a << ',' << p.b << ',' << csv::number(p.improvement_pct) << ',' << csv::number(p.win_fraction) << '\n';
  return o.str();
}

/// Merged per-frame means, one block of rows per controller.
inline void write_compare_csv(std::ostream& out, const std::vector<ControllerResult>& results) {
  out << "controller,frame,n_s,arrivals,contenders,successes,est_load,true_load,throughput_sim,throughput_num,"
         "utility_sim,utility_num,utility_ci_low,utility_ci_high\n";
  csv::RowWriter w(out);
  for (const ControllerResult& r : results) {
    for (const FrameSummary& s : r.set.per_frame) {
      w << r.name << s.frame << s.n_s.mean << s.arrivals.mean << s.contenders.mean << s.successes.mean;
      if (s.est_load.n > 0) w << s.est_load.mean;
      else w.empty();
      w << s.true_load.mean << s.throughput_sim.mean << s.throughput_num.mean << s.utility_sim.mean
        << s.utility_num.mean << s.utility_sim.ci_low << s.utility_sim.ci_high;
      w.end();
    }
  }
}

}  // namespace rach
