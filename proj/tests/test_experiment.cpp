#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "core/engine.hpp"
#include "core/equivalence.hpp"
#include "core/error.hpp"
#include "core/experiment.hpp"

using namespace aoisim;

namespace {

const char* kSmall = R"({
  "policies": ["fcfs", "lcfs_p", "ps"],
  "arrival": {"family": "exponential"},
  "service": {"family": "exponential", "mean": 1.0},
  "sweep": {"axis": "rho", "values": [0.7, 0.3]},
  "runs": 4,
  "updates": 2000,
  "seed": 9,
  "metrics": ["aoi", "paoi"]
})";

ErrorCode code_of(const std::string& json) {
  try {
    parse_config(json);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{0};
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config(kSmall);
  CHECK(c.policies.size() == 3);
  CHECK(c.runs == 4);
  CHECK(c.seed == 9);
  CHECK(c.sweep.values.size() == 2);
  CHECK(c.metrics.size() == 2);

  CHECK(code_of(R"({"policies": ["fcfs"], "sweep": {"values": [0.5]}, "colour": 1})") == ErrorCode::kConfig);
  CHECK(code_of(R"({"policies": ["fcfs"], "sweep": {"values": [1.2]}})") == ErrorCode::kConfig);
  CHECK(code_of(R"({"policies": ["fcfs"], "sweep": {"values": []}})") == ErrorCode::kConfig);
  CHECK(code_of(R"({"policies": ["fcfs"], "sweep": {"axis": "scv", "values": [2], "rho": 1}})") == ErrorCode::kConfig);
  CHECK(code_of(R"({"policies": ["fcfs"], "sweep": {"values": [0.5]}, "runs": 0})") == ErrorCode::kConfig);
  CHECK(code_of(R"({"policies": [], "sweep": {"values": [0.5]}})") == ErrorCode::kConfig);
  CHECK(code_of(R"({"policies": ["fcfs"], "arrival": {"family": "exp", "mean": 2}, "sweep": {"values": [0.5]}})") ==
        ErrorCode::kConfig);
  CHECK(code_of("{not json") == ErrorCode::kConfig);
  CHECK(code_of(R"({"policies": ["fifo"], "sweep": {"values": [0.5]}})") != ErrorCode{0});
  CHECK(code_of(R"({"policies": ["fcfs"], "sweep": {"values": [0.5]}})") == ErrorCode{0});

  try {
    load_config("/nonexistent/config.json");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIo);
  }
}

TEST_CASE("rows are ordered by policy, sweep value and metric") {
  const ExperimentConfig c = parse_config(kSmall);
  const auto rows = run_experiment(c);
  REQUIRE(rows.size() == 3 * 2 * 2);
  CHECK(rows[0].policy.name() == "fcfs");
  CHECK(rows[0].rho == 0.3);
  CHECK(rows[0].metric == Metric::kAoi);
  CHECK(rows[1].metric == Metric::kPaoi);
  CHECK(rows[2].rho == 0.7);
  CHECK(rows[4].policy.name() == "lcfs_p");
  CHECK(rows[11].policy.name() == "ps");
  for (const ResultRow& r : rows) {
    CHECK(r.summary.runs == 4);
    CHECK(r.updates == 2000);
    CHECK(r.seed == 9);
    CHECK(r.flags.empty());
  }
}

TEST_CASE("row means are replication averages over common traces") {
  const ExperimentConfig c = parse_config(kSmall);
  const auto rows = run_experiment(c);
  // Recompute fcfs and ps at rho 0.7 straight from the engine.
  for (std::size_t k : {0u, 2u}) {
    double aoi = 0.0;
    for (std::uint64_t r = 0; r < 4; ++r) {
      const DistributionSpec arrival = arrival_for_load(c.arrival, 1.0, 0.7);
      const Trace t = generate_trace(arrival, c.service, 2000, 9 + r);
      aoi += simulate(t, c.policies[k]).avg_aoi;
    }
    const ResultRow& row = rows[k * 4 + 2];
    CHECK(row.rho == 0.7);
    CHECK(row.metric == Metric::kAoi);
    CHECK(row.summary.mean == doctest::Approx(aoi / 4.0).epsilon(1e-12));
  }
}

TEST_CASE("traces are shared across policies and differ across points") {
  ExperimentConfig c = parse_config(kSmall);
  const auto rows = run_experiment(c);
  std::set<std::uint64_t> per_point[2];
  for (const ResultRow& r : rows) per_point[r.rho == 0.7 ? 1 : 0].insert(r.trace_hash);
  CHECK(per_point[0].size() == 1);
  CHECK(per_point[1].size() == 1);
  CHECK(*per_point[0].begin() != *per_point[1].begin());
}

TEST_CASE("csv output is deterministic and worker independent") {
  ExperimentConfig c = parse_config(kSmall);
  c.workers = 1;
  const std::string one = to_csv(run_experiment(c), true);
  c.workers = 3;
  const std::string three = to_csv(run_experiment(c), true);
  CHECK(one == three);
  CHECK(one == to_csv(run_experiment(c), true));

  const auto lines = lines_of(one);
  REQUIRE(lines.size() == 13);
  CHECK(lines[0] ==
        "policy,rho,arrival_family,arrival_scv,service_family,service_scv,metric,mean,ci_halfwidth,runs,updates,"
        "seed,flags,trace_hash");
  CHECK(lines[1].rfind("fcfs,0.3,exponential,1,exponential,1,aoi,", 0) == 0);
  const auto plain = lines_of(to_csv(run_experiment(c)));
  CHECK(plain[0].find("trace_hash") == std::string::npos);
}

TEST_CASE("single replication is flagged") {
  ExperimentConfig c = parse_config(kSmall);
  c.runs = 1;
  c.flags = "custom";
  for (const ResultRow& r : run_experiment(c)) {
    CHECK(r.summary.single_run);
    CHECK(r.summary.ci_halfwidth == 0.0);
    CHECK(r.flags == "custom;single-run");
  }
}

TEST_CASE("scv sweep holds the load fixed") {
  const ExperimentConfig c = parse_config(R"({
    "policies": ["srpt"],
    "service": {"family": "weibull"},
    "sweep": {"axis": "scv", "values": [4, 1], "rho": 0.6},
    "runs": 2, "updates": 500, "metrics": ["aoi"]
  })");
  const auto rows = run_experiment(c);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].service_scv == 1.0);
  CHECK(rows[1].service_scv == 4.0);
  for (const ResultRow& r : rows) {
    CHECK(r.rho == 0.6);
    CHECK(r.service_family == Family::kWeibull);
  }
}

TEST_CASE("informative gain") {
  const ExperimentConfig c = parse_config(R"({
    "policies": ["lcfs", "lcfs_i", "srpt"],
    "sweep": {"values": [0.9]},
    "runs": 3, "updates": 3000, "metrics": ["aoi"]
  })");
  const auto rows = run_experiment(c);
  const auto gains = informative_gain(rows);
  REQUIRE(gains.size() == 1);
  CHECK(gains[0].base.name() == "lcfs");
  CHECK(gains[0].informative.name() == "lcfs_i");
  const double expected = (rows[0].summary.mean - rows[1].summary.mean) / rows[0].summary.mean;
  CHECK(gains[0].gain == doctest::Approx(expected).epsilon(1e-15));
  CHECK(gains[0].gain > 0.0);

  std::ostringstream out;
  write_gain_csv(out, gains);
  const auto lines = lines_of(out.str());
  REQUIRE(lines.size() == 2);
  CHECK(lines[1].rfind("lcfs,lcfs_i,0.9,exponential,1,exponential,1,aoi,", 0) == 0);
}

TEST_CASE("figure presets") {
  const auto presets = figure_presets();
  CHECK(presets.size() == 8 * 3 + 8 * 6);
  std::set<std::string> ids;
  for (const auto& p : presets) {
    ids.insert(p.id);
    CHECK(p.config.runs == 50);
    CHECK(p.config.updates == 100000);
    CHECK(p.config.seed == 1);
    CHECK_NOTHROW(p.config.validate());
  }
  CHECK(ids.size() == presets.size());
  CHECK(ids.count("3a") == 1);
  CHECK(ids.count("A17f") == 1);
  for (const auto& p : figure_presets(true)) CHECK(p.config.runs == 10);

  const auto find = [&](const std::string& id) {
    for (const auto& p : presets)
      if (p.id == id) return p;
    FAIL("missing preset " << id);
    return presets.front();
  };
  CHECK(find("3a").config.policies.size() == 8);
  CHECK(find("4b").config.metrics.front() == Metric::kPaoi);
  CHECK(find("9a").emits_gain);
  CHECK(find("9a").config.policies.size() == 14);
  CHECK(find("11c").config.sweep.axis == SweepAxis::kScv);
  CHECK(find("A12e").config.flags == "scv-unspecified");
  CHECK(find("A12a").config.arrival.family == Family::kWeibull);
}

TEST_CASE("reproduce rejects unknown figures") {
  const auto dir = fresh_dir("aoisim_reproduce_unknown");
  try {
    reproduce("99", dir, true);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnknownFigure);
    CHECK(std::string(e.what()).find("3a") != std::string::npos);
  }
  CHECK(std::filesystem::is_empty(dir));
}
