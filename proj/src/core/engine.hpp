#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "core/metrics.hpp"
#include "core/policy.hpp"
#include "core/trace.hpp"

namespace aoisim {

enum class UpdateStatus { kPending, kWaiting, kInService, kDelivered, kDiscarded };

struct UpdateRecord {
  UpdateId id = 0;
  double gen_time = 0.0;
  double size = 0.0;
  double remaining = 0.0;
  double served = 0.0;  // accrued service, equals size once delivered
  std::optional<double> delivered_at;
  std::optional<double> service_start;  // first start
  UpdateStatus status = UpdateStatus::kPending;
};

enum class Action { kStart, kPreempt, kResume, kDeliver, kDiscard };

struct DecisionEntry {
  double time = 0.0;
  UpdateId id = 0;
  Action action = Action::kStart;

  friend bool operator==(const DecisionEntry&, const DecisionEntry&) = default;
};

using DecisionLog = std::vector<DecisionEntry>;

enum class SelectionMode {
  kIndexed,  // ordered ready-queue index
  kScan,     // pure select_next over a full QueueView on every decision
};

struct EngineOptions {
  // Seed of the RANDOM decision stream; defaults to the trace seed.
  std::optional<std::uint64_t> decision_seed;
  SelectionMode selection = SelectionMode::kIndexed;
  bool record_decisions = true;
  bool keep_updates = true;
};

struct RunResult {
  double avg_aoi = 0.0;
  double avg_paoi = 0.0;
  double avg_delay = 0.0;  // over delivered updates only
  double horizon = 0.0;    // time of the last informative delivery
  std::size_t delivered = 0;
  std::size_t discarded = 0;
  DeliveryLog delivery_log;
  DecisionLog decision_log;
  std::vector<UpdateRecord> updates;
};

/// Replays `trace` under a non-PS policy with preempt-resume service.
RunResult run(const Trace& trace, const PolicyId& policy, const EngineOptions& opts = {});

/// Processor sharing: k updates in the system each receive 1/k of the server.
RunResult run_ps(const Trace& trace, const EngineOptions& opts = {});

/// Dispatches to run_ps for PS and to run otherwise.
RunResult simulate(const Trace& trace, const PolicyId& policy, const EngineOptions& opts = {});

}  // namespace aoisim
