#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/engine.hpp"
#include "core/policy.hpp"
#include "core/trace.hpp"

namespace aoisim {

/// Arrival mean such that the load is rho for the given service mean.
DistributionSpec arrival_for_load(DistributionSpec arrival, double service_mean, double rho);

/// A family of coupled traces: trace i uses seed seed_base + i.
struct TraceBatch {
  std::size_t traces = 100;
  std::size_t updates = 1000;
  std::uint64_t seed_base = 1;
  DistributionSpec arrival{Family::kExponential, 1.0, 1.0};  // mean is set from rho
  DistributionSpec service{Family::kExponential, 1.0, 1.0};
  double rho = 0.7;
  std::size_t workers = 0;  // 0 = hardware concurrency
};

struct Divergence {
  std::uint64_t seed = 0;
  std::size_t event_index = 0;
  double time = 0.0;
  std::optional<UpdateId> id_a;
  std::optional<UpdateId> id_b;
};

struct EquivalenceReport {
  std::size_t traces_checked = 0;
  bool equivalent = true;
  std::optional<Divergence> first_divergence;
  // Set when every trace also produced bit-identical avg_aoi and avg_paoi.
  bool metrics_identical = true;
};

/// Compares the (time, id, action) projections of both decision logs onto
/// start/resume/deliver events, trace by trace.
EquivalenceReport verify_sample_path_equivalence(const PolicyId& a, const PolicyId& b,
                                                 const TraceBatch& batch);

/// Compares informative delivery logs, i.e. the age trajectories.
EquivalenceReport verify_trajectory_identity(const PolicyId& a, const PolicyId& b,
                                             const TraceBatch& batch);

/// Single-trace variants used by the batch runners.
std::optional<Divergence> compare_decisions(const Trace& trace, const PolicyId& a,
                                           const PolicyId& b);
std::optional<Divergence> compare_deliveries(const Trace& trace, const PolicyId& a,
                                            const PolicyId& b);

enum class Verdict { kDominates, kInconclusive, kViolated };

std::string verdict_name(Verdict verdict);

struct DominancePoint {
  double rho = 0.0;
  std::size_t runs = 0;
  double mean_base = 0.0;
  double ci_base = 0.0;
  double mean_informative = 0.0;
  double ci_informative = 0.0;
  Verdict verdict = Verdict::kInconclusive;
};

struct DominanceReport {
  std::vector<DominancePoint> points;
  bool any_violated() const;
};

struct DominanceSetup {
  std::vector<double> rhos{0.5, 0.7, 0.9};
  DistributionSpec arrival{Family::kExponential, 1.0, 1.0};
  DistributionSpec service{Family::kExponential, 1.0, 1.0};
  std::size_t runs = 50;
  std::size_t updates = 10000;
  std::uint64_t seed = 1;
  std::size_t workers = 0;
};

/// Mean-AoI consequence of the informative-dominance claim for G/M/1: the
/// informative policy is expected to sit at or below its base. Service must
/// be exponential.
DominanceReport check_dominance(const PolicyId& base, const PolicyId& informative,
                                const DominanceSetup& setup);

Verdict classify(double mean_base, double ci_base, double mean_informative, double ci_informative);

/// Overrides for the canned proposition checks. Unset fields keep the
/// defaults: 1000 traces of 10^3 updates at rho {0.3, 0.7, 0.9} for the
/// equivalence claims, 50 runs of 10^4 updates at rho {0.5, 0.7, 0.9} for
/// the dominance claim (where `traces` sets the run count).
struct PropositionOptions {
  std::optional<std::size_t> traces;
  std::optional<std::size_t> updates;
  std::optional<double> rho;
  std::uint64_t seed = 1;
  std::size_t workers = 0;
};

struct PropositionCheck {
  std::string label;
  std::optional<EquivalenceReport> equivalence;
  std::optional<DominanceReport> dominance;

  bool passed() const;
};

/// 1: (lcfs, lcfs_i) dominance under exponential and Weibull(scv 10) arrivals.
/// 2: (ade_pi, srpt_i) and 3: (ade_i, sjf_i) decision equivalence under
/// exponential and Weibull(scv 10) service. Other numbers throw kInvalidArgument.
std::vector<PropositionCheck> verify_proposition(int proposition, const PropositionOptions& opts);

}  // namespace aoisim
