#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/random_stream.hpp"

namespace aoisim {

using UpdateId = std::size_t;

enum class PolicyBase { kFcfs, kLcfs, kRandom, kSjf, kPs, kLcfsP, kSjfP, kSrpt, kAde, kAds, kAdm };

/// A scheduling policy: a base rule plus the AoI-preemptive and informative
/// modifiers. `ade_pi` is {kAde, preemptive_aoi, informative}.
struct PolicyId {
  PolicyBase base = PolicyBase::kFcfs;
  bool preemptive_aoi = false;
  bool informative = false;

  // Rejects ps+informative and preemptive_aoi on non-AoI bases.
  void validate() const;

  bool is_aoi_based() const noexcept {
    return base == PolicyBase::kAde || base == PolicyBase::kAds || base == PolicyBase::kAdm;
  }
  bool is_preemptive() const noexcept {
    return preemptive_aoi || base == PolicyBase::kLcfsP || base == PolicyBase::kSjfP ||
           base == PolicyBase::kSrpt;
  }
  bool is_deterministic() const noexcept { return base != PolicyBase::kRandom; }

  // Canonical lowercase name: fcfs, lcfs_pi, ade_p, srpt_i, ...
  std::string name() const;

  friend bool operator==(const PolicyId&, const PolicyId&) = default;
};

PolicyId parse_policy(std::string_view name);

struct JobView {
  UpdateId id = 0;
  double gen_time = 0.0;
  double size = 0.0;
  double remaining = 0.0;
};

/// Read-only snapshot offered to the decision functions. `freshest_delivered`
/// is U(now), the generation time of the freshest delivered update.
struct QueueView {
  double now = 0.0;
  std::span<const JobView> waiting;
  std::optional<JobView> in_service;
  double freshest_delivered = 0.0;
  RandomStream* rng = nullptr;  // consumed by RANDOM only
};

inline bool is_informative(const JobView& job, double freshest_delivered) noexcept {
  return job.gen_time > freshest_delivered;
}

std::vector<JobView> informative_set(const QueueView& view);

/// Choice made when the server frees up. For informative policies only
/// informative waiting updates are eligible (the engine discards the rest).
std::optional<UpdateId> select_next(const PolicyId& policy, const QueueView& view);

/// Whether `arrival` should displace the update in service. Requires
/// view.in_service. PS is handled by its own engine and always yields false.
bool should_preempt(const PolicyId& policy, const QueueView& view, const JobView& arrival);

/// Selection key minimised by select_next; ties fall to gen_time then id.
/// `fallback` is the key used by AoI-based policies over obsolete updates.
double selection_key(const PolicyId& policy, const JobView& job, bool fallback = false);

}  // namespace aoisim
