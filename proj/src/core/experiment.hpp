#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "core/metrics.hpp"
#include "core/policy.hpp"
#include "core/trace.hpp"

namespace aoisim {

enum class SweepAxis { kRho, kScv };

/// Exactly one axis varies. For kScv the service scv takes each value while
/// the load stays at `rho`.
struct Sweep {
  SweepAxis axis = SweepAxis::kRho;
  std::vector<double> values;
  double rho = 0.7;
};

struct ExperimentConfig {
  std::vector<PolicyId> policies;
  DistributionSpec arrival{Family::kExponential, 1.0, 1.0};  // mean derived per point
  DistributionSpec service{Family::kExponential, 1.0, 1.0};
  Sweep sweep;
  std::size_t runs = 50;
  std::size_t updates = 100000;
  std::uint64_t seed = 1;
  std::string output;
  std::vector<Metric> metrics{Metric::kAoi, Metric::kPaoi};
  std::string flags;  // copied into every row, e.g. scv-unspecified
  std::size_t workers = 0;

  void validate() const;
};

ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

struct ResultRow {
  PolicyId policy;
  double rho = 0.0;
  Family arrival_family = Family::kExponential;
  double arrival_scv = 1.0;
  Family service_family = Family::kExponential;
  double service_scv = 1.0;
  Metric metric = Metric::kAoi;
  Summary summary;
  std::size_t updates = 0;
  std::uint64_t seed = 0;
  std::string flags;
  // Combined hash of the replication traces at this sweep point; equal
  // across policies when common random numbers hold.
  std::uint64_t trace_hash = 0;
};

/// Rows ordered by (policy as configured, sweep value, metric as configured).
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

/// Writes the header and rows. `verbose` appends a trace_hash column.
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows, bool verbose = false);
std::string to_csv(const std::vector<ResultRow>& rows, bool verbose = false);

struct GainRow {
  PolicyId base;
  PolicyId informative;
  ResultRow base_row;  // sweep coordinates and base mean
  double informative_mean = 0.0;
  double gain = 0.0;  // (base - informative) / base
};

/// Pairs every policy with its informative variant when both are present.
std::vector<GainRow> informative_gain(const std::vector<ResultRow>& rows);

void write_gain_csv(std::ostream& out, const std::vector<GainRow>& rows);

struct FigurePreset {
  std::string id;
  std::string description;
  ExperimentConfig config;
  bool emits_gain = false;
};

/// Every reproducible panel. `fast` uses 10 replications instead of 50.
std::vector<FigurePreset> figure_presets(bool fast = false);

std::vector<std::string> figure_ids();

/// Accepts a panel id ("3a") or a figure id ("3") that expands to all of its
/// panels. Writes fig<panel>.csv (and fig<panel>_gain.csv) into `dir` and
/// returns the written paths. Unknown ids throw kUnknownFigure.
std::vector<std::filesystem::path> reproduce(std::string_view figure_id,
                                             const std::filesystem::path& dir, bool fast = false);

}  // namespace aoisim
