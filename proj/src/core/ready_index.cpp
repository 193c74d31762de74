#include "core/ready_index.hpp"

#include "core/error.hpp"

namespace aoisim {

ReadyIndex::ReadyIndex(const PolicyId& policy, std::size_t capacity)
    : policy_(policy),
      tracks_freshness_(policy.informative || policy.is_aoi_based()),
      jobs_(capacity),
      pool_(capacity, Pool::kNone) {
  if (policy.base == PolicyBase::kRandom || policy.base == PolicyBase::kPs) {
    throw Error(ErrorCode::kUnsupportedPolicy, policy.name() + " cannot be indexed");
  }
}

ReadyIndex::Key ReadyIndex::fresh_key(const JobView& job) const {
  return {selection_key(policy_, job), job.gen_time, job.id};
}

void ReadyIndex::insert(const JobView& job, double freshest_delivered) {
  jobs_.at(job.id) = job;
  if (!tracks_freshness_ || is_informative(job, freshest_delivered)) {
    fresh_.insert(fresh_key(job));
    if (tracks_freshness_) fresh_by_gen_.emplace(job.gen_time, job.id);
    pool_[job.id] = Pool::kFresh;
  } else if (!policy_.informative) {
    stale_.insert(stale_key(job));
    pool_[job.id] = Pool::kStale;
  } else {
    throw Error(ErrorCode::kInternal, "obsolete update offered to an informative index");
  }
}

void ReadyIndex::erase(UpdateId id) {
  const JobView& job = jobs_.at(id);
  switch (pool_[id]) {
    case Pool::kFresh:
      fresh_.erase(fresh_key(job));
      if (tracks_freshness_) fresh_by_gen_.erase({job.gen_time, job.id});
      break;
    case Pool::kStale:
      stale_.erase(stale_key(job));
      break;
    case Pool::kNone:
      throw Error(ErrorCode::kInternal, "erasing an update that is not indexed");
  }
  pool_[id] = Pool::kNone;
}

std::vector<UpdateId> ReadyIndex::advance_freshness(double freshest_delivered) {
  std::vector<UpdateId> expired;
  if (!tracks_freshness_) return expired;
  while (!fresh_by_gen_.empty() && fresh_by_gen_.begin()->first <= freshest_delivered) {
    const UpdateId id = fresh_by_gen_.begin()->second;
    fresh_by_gen_.erase(fresh_by_gen_.begin());
    const JobView& job = jobs_[id];
    fresh_.erase(fresh_key(job));
    if (policy_.informative) {
      pool_[id] = Pool::kNone;
    } else {
      stale_.insert(stale_key(job));
      pool_[id] = Pool::kStale;
    }
    expired.push_back(id);
  }
  return expired;
}

std::optional<UpdateId> ReadyIndex::select() const {
  if (!fresh_.empty()) return std::get<2>(*fresh_.begin());
  if (!stale_.empty()) return std::get<2>(*stale_.begin());
  return std::nullopt;
}

}  // namespace aoisim
