// rachsim: subframe optimizer, lookup-table generator and RACH contention simulator.
//
//   rachsim optimize --load 70 --alpha 2
//   rachsim table    --alpha 25 --max-load 700 --out table.csv
//   rachsim run      --scenario s.ini --controller adaptive --reps 100 --out run.csv
//   rachsim compare  --scenario s.ini --controllers adaptive,fixed,acb --out cmp.csv

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rach/rach.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

rach::ControllerKind controller_from(const std::string& name) {
  const auto kind = rach::parse_controller_kind(name);
  if (!kind) throw UsageError("unknown controller '" + name + "' (expected fixed, max, adaptive or acb)");
  return *kind;
}

// Writes to `path`, or stdout when it is empty.
template <class F>
void with_output(const std::string& path, F&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write(out);
  out.flush();
  if (!out) throw std::runtime_error("error writing '" + path + "'");
}

struct ChannelArgs {
  double alpha = 25.0;
  int preambles = 64;
  int ns_min = 2;
  int ns_max = 8;

  void add_to(CLI::App* app) {
    app->add_option("--alpha", alpha, "Price of one RACH subframe, in devices")->capture_default_str();
    app->add_option("--preambles", preambles, "Preambles per RACH subframe")->capture_default_str();
    app->add_option("--ns-min", ns_min, "Minimum RACH subframes per frame")->capture_default_str();
    app->add_option("--ns-max", ns_max, "Maximum RACH subframes per frame")->capture_default_str();
  }

  rach::RachConfig config() const {
    rach::RachConfig c{preambles, ns_min, ns_max, alpha};
    c.validate();
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive RACH subframe allocation: optimizer, lookup tables and contention simulator"};
  app.require_subcommand(1);

  // optimize
  auto* optimize = app.add_subcommand("optimize", "Utility-maximizing subframe count for a known load");
  ChannelArgs opt_channel;
  double opt_load = 0.0;
  optimize->add_option("--load", opt_load, "Contending devices per frame")->required();
  opt_channel.add_to(optimize);

  // table
  auto* table = app.add_subcommand("table", "Offline load -> subframe lookup table");
  ChannelArgs tab_channel;
  double tab_max_load = rach::kDefaultTableMaxLoad;
  double tab_step = 1.0;
  std::string tab_out, tab_sweep;
  tab_channel.add_to(table);
  table->add_option("--max-load", tab_max_load, "Largest load covered by the table")->capture_default_str();
  table->add_option("--step", tab_step, "Load grid step")->capture_default_str();
  table->add_option("--out", tab_out, "Table CSV (stdout if omitted)");
  table->add_option("--sweep-out", tab_sweep, "Dense sweep CSV (default: <out>.sweep.csv)");

  // run
  auto* run = app.add_subcommand("run", "Simulate one controller and write per-frame CSV");
  std::string run_scenario_path, run_controller, run_out;
  std::uint64_t run_seed = 1;
  int run_reps = 100;
  run->add_option("--scenario", run_scenario_path, "Scenario file")->required();
  run->add_option("--controller", run_controller, "fixed | max | adaptive | acb (default: scenario's kind)");
  run->add_option("--seed", run_seed, "Base seed")->capture_default_str();
  run->add_option("--reps", run_reps, "Replications")->capture_default_str();
  run->add_option("--out", run_out, "Output CSV (stdout if omitted)");

  // compare
  auto* compare = app.add_subcommand("compare", "Run several controllers on common random numbers");
  std::string cmp_scenario_path, cmp_out;
  std::vector<std::string> cmp_controllers;
  std::uint64_t cmp_seed = 1;
  int cmp_reps = 100;
  compare->add_option("--scenario", cmp_scenario_path, "Scenario file")->required();
  compare->add_option("--controllers", cmp_controllers, "Comma-separated controller list")
      ->delimiter(',')
      ->required();
  compare->add_option("--seed", cmp_seed, "Base seed")->capture_default_str();
  compare->add_option("--reps", cmp_reps, "Replications")->capture_default_str();
  compare->add_option("--out", cmp_out, "Merged per-frame CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*optimize) {
      const rach::RachConfig config = opt_channel.config();
      if (!(opt_load >= 0.0)) throw UsageError("--load must be >= 0");
      const auto d = rach::optimal_subframes_integer(rach::Load(opt_load), config);
      std::cout << "n_s=" << d.n_s << " utility=" << rach::csv::number(d.achieved_utility.value) << '\n';
    } else if (*table) {
      const rach::RachConfig config = tab_channel.config();
      const auto lut = rach::subframe_lookup_table(config, tab_step, tab_max_load);
      with_output(tab_out, [&](std::ostream& o) { rach::write_table_csv(o, lut); });
      std::string sweep = tab_sweep;
      if (sweep.empty() && !tab_out.empty()) sweep = tab_out + ".sweep.csv";
      if (!sweep.empty())
        with_output(sweep, [&](std::ostream& o) { rach::write_sweep_csv(o, config, tab_step, tab_max_load); });
    } else if (*run) {
      rach::Scenario sc = rach::parse_scenario_file(run_scenario_path);
      if (!run_controller.empty()) sc.controller.kind = controller_from(run_controller);
      if (run_reps < 1) throw UsageError("--reps must be >= 1");
      const auto set = rach::run_replications(sc, run_reps, run_seed);
      with_output(run_out, [&](std::ostream& o) {
        rach::write_run_csv(o, set, rach::to_string(sc.controller.kind), sc.channel.alpha);
      });
    } else if (*compare) {
      const rach::Scenario base = rach::parse_scenario_file(cmp_scenario_path);
      if (cmp_controllers.size() < 2) throw UsageError("compare needs at least two controllers");
      if (cmp_reps < 1) throw UsageError("--reps must be >= 1");
      std::vector<rach::ControllerResult> results;
      for (const std::string& name : cmp_controllers) {
        rach::Scenario sc = base;
        sc.controller.kind = controller_from(name);
        results.push_back({name, rach::run_replications(sc, cmp_reps, cmp_seed)});
      }
      std::cout << rach::format_report(rach::build_report(results));
      if (!cmp_out.empty()) with_output(cmp_out, [&](std::ostream& o) { rach::write_compare_csv(o, results); });
    }
  } catch (const rach::ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const rach::ConfigError& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
