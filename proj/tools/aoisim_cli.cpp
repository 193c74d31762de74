#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "aoisim/aoisim.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitVerification = 2;

int report_failure(aoisim_status status) {
  std::cerr << "error: " << aoisim_status_name(status) << ": " << aoisim_last_error() << '\n';
  return kExitConfig;
}

struct SimulateArgs {
  std::optional<std::string> config;
  std::vector<std::string> policies;
  std::string arrival = "exponential";
  double arrival_scv = 1.0;
  std::string service = "exponential";
  double service_mean = 1.0;
  double scv = 1.0;
  std::vector<double> rho{0.7};
  std::vector<double> scv_sweep;
  std::vector<std::string> metrics{"aoi", "paoi"};
  std::size_t updates = 100000;
  std::size_t runs = 50;
  std::uint64_t seed = 1;
  std::optional<std::size_t> workers;
  std::string out;
  bool verbose = false;
};

std::string config_from_flags(const SimulateArgs& a) {
  nlohmann::json doc;
  doc["policies"] = a.policies;
  doc["arrival"] = {{"family", a.arrival}, {"scv", a.arrival_scv}};
  doc["service"] = {{"family", a.service}, {"mean", a.service_mean}, {"scv", a.scv}};
  if (a.scv_sweep.empty()) {
    doc["sweep"] = {{"axis", "rho"}, {"values", a.rho}};
  } else {
    if (a.rho.size() != 1) throw std::invalid_argument("an scv sweep takes exactly one --rho");
    doc["sweep"] = {{"axis", "scv"}, {"values", a.scv_sweep}, {"rho", a.rho.front()}};
  }
  doc["runs"] = a.runs;
  doc["updates"] = a.updates;
  doc["seed"] = a.seed;
  doc["metrics"] = a.metrics;
  return doc.dump();
}

int run_simulate(const SimulateArgs& args) {
  aoisim_experiment* exp = nullptr;
  aoisim_status st;
  if (args.config) {
    st = aoisim_experiment_from_file(args.config->c_str(), &exp);
  } else {
    if (args.policies.empty()) {
      std::cerr << "error: --policy is required without --config\n";
      return kExitConfig;
    }
    std::string json;
    try {
      json = config_from_flags(args);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitConfig;
    }
    st = aoisim_experiment_from_json(json.c_str(), &exp);
  }
  if (st != AOISIM_OK) return report_failure(st);

  if (args.workers) aoisim_experiment_set_workers(exp, *args.workers);
  st = aoisim_experiment_run(exp);
  std::string out = args.out.empty() ? aoisim_experiment_output(exp) : args.out;
  if (st == AOISIM_OK) {
    if (out.empty() || out == "-") {
      const char* csv = nullptr;
      st = aoisim_experiment_csv(exp, args.verbose ? 1 : 0, &csv);
      if (st == AOISIM_OK) std::cout << csv;
    } else {
      st = aoisim_experiment_write_csv(exp, out.c_str(), args.verbose ? 1 : 0);
      if (st == AOISIM_OK) {
        std::cerr << "wrote " << aoisim_experiment_row_count(exp) << " rows to " << out << '\n';
      }
    }
  }
  aoisim_experiment_destroy(exp);
  return st == AOISIM_OK ? kExitOk : report_failure(st);
}

int run_reproduce(const std::string& figure, const std::string& out, bool fast) {
  std::size_t files = 0;
  const aoisim_status st = aoisim_reproduce(figure.c_str(), out.c_str(), fast ? 1 : 0, &files);
  if (st != AOISIM_OK) return report_failure(st);
  std::cerr << "wrote " << files << " file(s) to " << out << '\n';
  return kExitOk;
}

void print_id(int64_t id) {
  if (id < 0) {
    std::cout << "none";
  } else {
    std::cout << id;
  }
}

int run_verify(int proposition, const aoisim_verify_options& opts) {
  aoisim_verify_report* report = nullptr;
  const aoisim_status st = aoisim_verify(proposition, &opts, &report);
  if (st != AOISIM_OK) return report_failure(st);

  const std::size_t checks = aoisim_verify_check_count(report);
  for (std::size_t i = 0; i < checks; ++i) {
    aoisim_check c;
    aoisim_verify_check(report, i, &c);
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.label << " (" << c.traces_checked
              << (c.point_count ? " runs" : " traces") << ")\n";
    if (c.has_divergence) {
      std::cout << "  first divergence: seed=" << c.divergence_seed << " time=" << c.divergence_time
                << " idA=";
      print_id(c.id_a);
      std::cout << " idB=";
      print_id(c.id_b);
      std::cout << '\n';
    }
    for (std::size_t k = 0; k < c.point_count; ++k) {
      aoisim_dominance_point p;
      aoisim_verify_point(report, i, k, &p);
      std::printf("  rho=%.2f base=%.4f+-%.4f informative=%.4f+-%.4f %s\n", p.rho, p.mean_base,
                  p.ci_base, p.mean_informative, p.ci_informative, p.verdict);
    }
  }
  const bool passed = aoisim_verify_passed(report) != 0;
  aoisim_verify_destroy(report);
  return passed ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Age-of-information scheduling simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(aoisim_version()));

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run a sweep and write result rows as CSV");
  simulate->add_option("--config", sim.config, "JSON experiment config")->check(CLI::ExistingFile);
  simulate->add_option("--policy", sim.policies, "Policy name, repeatable (e.g. srpt, lcfs_pi)")
      ->delimiter(',');
  simulate->add_option("--arrival", sim.arrival, "Interarrival family")->capture_default_str();
  simulate->add_option("--arrival-scv", sim.arrival_scv, "Interarrival scv")->capture_default_str();
  simulate->add_option("--service", sim.service, "Update size family")->capture_default_str();
  simulate->add_option("--service-mean", sim.service_mean, "Mean update size")->capture_default_str();
  simulate->add_option("--scv", sim.scv, "Update size scv")->capture_default_str();
  simulate->add_option("--scv-sweep", sim.scv_sweep, "Sweep the size scv at a single --rho")
      ->delimiter(',');
  simulate->add_option("--rho", sim.rho, "Load value(s)")->delimiter(',')->capture_default_str();
  simulate->add_option("--metric", sim.metrics, "aoi, paoi or delay")->delimiter(',');
  simulate->add_option("--updates", sim.updates, "Updates per run")->capture_default_str();
  simulate->add_option("--runs", sim.runs, "Replications")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Seed of the first replication")->capture_default_str();
  simulate->add_option("--workers", sim.workers, "Worker threads (0 = all cores)");
  simulate->add_option("--out", sim.out, "Output CSV path, stdout if omitted");
  simulate->add_flag("--verbose", sim.verbose, "Add the trace_hash column");
  for (const char* name : {"--policy", "--arrival", "--arrival-scv", "--service", "--service-mean",
                           "--scv", "--scv-sweep", "--rho", "--metric", "--updates", "--runs",
                           "--seed"}) {
    simulate->get_option(name)->excludes("--config");
  }

  std::string figure;
  std::string out_dir;
  bool fast = false;
  bool list = false;
  auto* reproduce = app.add_subcommand("reproduce", "Write the CSV files of a figure preset");
  reproduce->add_option("--figure", figure, "Panel (3a) or figure (3) id");
  reproduce->add_option("--out", out_dir, "Output directory")->default_val(".");
  reproduce->add_flag("--fast", fast, "10 replications instead of 50");
  reproduce->add_flag("--list", list, "Print the valid figure ids");

  int proposition = 0;
  aoisim_verify_options vopts;
  aoisim_verify_options_init(&vopts);
  auto* verify = app.add_subcommand("verify", "Check a structural claim on random traces");
  verify->add_option("--proposition", proposition, "1, 2 or 3")
      ->required()
      ->check(CLI::IsMember({1, 2, 3}));
  verify->add_option("--traces", vopts.traces, "Traces per setting (runs per point for 1)");
  verify->add_option("--updates", vopts.updates, "Updates per trace");
  verify->add_option("--rho", vopts.rho, "Single load instead of the default grid")
      ->check(CLI::Range(0.0, 1.0));
  verify->add_option("--seed", vopts.seed, "Seed of the first trace")->capture_default_str();
  verify->add_option("--workers", vopts.workers, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (simulate->parsed()) return run_simulate(sim);
  if (reproduce->parsed()) {
    if (list) {
      for (std::size_t i = 0; i < aoisim_figure_count(); ++i) std::cout << aoisim_figure_id(i) << '\n';
      return kExitOk;
    }
    if (figure.empty()) {
      std::cerr << "error: --figure is required\n";
      return kExitConfig;
    }
    return run_reproduce(figure, out_dir, fast);
  }
  return run_verify(proposition, vopts);
}
