#pragma once

#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include "core/policy.hpp"

namespace aoisim {

// Ordered index over the waiting updates that answers select_next in
// O(log n). Every selection key is constant while an update waits, so the
// order only changes on insert/erase and when U advances (updates turn
// obsolete). RANDOM is not indexable and must use the scan path.
class ReadyIndex {
 public:
  ReadyIndex(const PolicyId& policy, std::size_t capacity);

  void insert(const JobView& job, double freshest_delivered);
  void erase(UpdateId id);

  // Moves updates with gen_time <= U out of the informative pool. Returns
  // them ordered by (gen_time, id); for informative policies they are no
  // longer indexed and the caller must discard them.
  std::vector<UpdateId> advance_freshness(double freshest_delivered);

  std::optional<UpdateId> select() const;

  bool empty() const noexcept { return fresh_.empty() && stale_.empty(); }

 private:
  using Key = std::tuple<double, double, UpdateId>;
  enum class Pool : unsigned char { kNone, kFresh, kStale };

  Key fresh_key(const JobView& job) const;
  static Key stale_key(const JobView& job) { return {job.size, job.gen_time, job.id}; }

  PolicyId policy_;
  bool tracks_freshness_;
  std::vector<JobView> jobs_;
  std::vector<Pool> pool_;
  std::set<Key> fresh_;  // policy key; for non-tracking policies holds every waiting update
  std::set<Key> stale_;  // obsolete updates for AoI-based fallback, ordered by size
  std::set<std::pair<double, UpdateId>> fresh_by_gen_;
};

}  // namespace aoisim
