#include "core/policy.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <tuple>

#include "core/error.hpp"

namespace aoisim {

namespace {

struct BaseName {
  PolicyBase base;
  std::string_view name;
};

constexpr BaseName kBaseNames[] = {
    {PolicyBase::kFcfs, "fcfs"},   {PolicyBase::kLcfs, "lcfs"},   {PolicyBase::kRandom, "random"},
    {PolicyBase::kSjf, "sjf"},     {PolicyBase::kPs, "ps"},       {PolicyBase::kLcfsP, "lcfs_p"},
    {PolicyBase::kSjfP, "sjf_p"},  {PolicyBase::kSrpt, "srpt"},   {PolicyBase::kAde, "ade"},
    {PolicyBase::kAds, "ads"},     {PolicyBase::kAdm, "adm"},
};

std::string_view base_name(PolicyBase base) {
  for (const auto& entry : kBaseNames) {
    if (entry.base == base) return entry.name;
  }
  return "?";
}

bool ends_with_p(PolicyBase base) {
  return base == PolicyBase::kLcfsP || base == PolicyBase::kSjfP;
}

// Lexicographic (key, gen_time, id): smallest key, then earliest arrival, then id.
bool precedes(const PolicyId& policy, const JobView& a, const JobView& b, bool fallback) {
  return std::tuple(selection_key(policy, a, fallback), a.gen_time, a.id) <
         std::tuple(selection_key(policy, b, fallback), b.gen_time, b.id);
}

std::optional<UpdateId> argmin(const PolicyId& policy, std::span<const JobView> jobs,
                               bool fallback) {
  if (jobs.empty()) return std::nullopt;
  const JobView* best = &jobs.front();
  for (const JobView& job : jobs.subspan(1)) {
    if (precedes(policy, job, *best, fallback)) best = &job;
  }
  return best->id;
}

}  // namespace

void PolicyId::validate() const {
  if (base == PolicyBase::kPs && informative) {
    throw Error(ErrorCode::kConfig, "processor sharing has no informative variant");
  }
  if (preemptive_aoi && !is_aoi_based()) {
    throw Error(ErrorCode::kConfig, "the _p modifier applies only to ade, ads and adm");
  }
}

std::string PolicyId::name() const {
  std::string out(base_name(base));
  if (preemptive_aoi && informative) return out + "_pi";
  if (preemptive_aoi) return out + "_p";
  if (informative) return ends_with_p(base) ? out + "i" : out + "_i";
  return out;
}

PolicyId parse_policy(std::string_view raw) {
  std::string name;
  for (char c : raw) name.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));

  // Longest base name that prefixes the input.
  const BaseName* match = nullptr;
  for (const auto& entry : kBaseNames) {
    if (name.starts_with(entry.name) && (!match || entry.name.size() > match->name.size())) {
      match = &entry;
    }
  }
  if (!match) throw Error(ErrorCode::kConfig, "unknown policy '" + std::string(raw) + "'");

  PolicyId id;
  id.base = match->base;
  const std::string_view suffix = std::string_view(name).substr(match->name.size());
  if (suffix.empty()) {
  } else if (suffix == "_i" || (ends_with_p(id.base) && suffix == "i")) {
    id.informative = true;
  } else if (suffix == "_p") {
    id.preemptive_aoi = true;
  } else if (suffix == "_pi" || suffix == "_p_i") {
    id.preemptive_aoi = true;
    id.informative = true;
  } else {
    throw Error(ErrorCode::kConfig, "unknown policy '" + std::string(raw) + "'");
  }
  id.validate();
  return id;
}

double selection_key(const PolicyId& policy, const JobView& job, bool fallback) {
  if (fallback) return job.size;
  switch (policy.base) {
    case PolicyBase::kFcfs: return job.gen_time;
    case PolicyBase::kLcfs:
    case PolicyBase::kLcfsP: return -job.gen_time;
    case PolicyBase::kSjf:
    case PolicyBase::kSjfP: return job.size;
    case PolicyBase::kSrpt:
    case PolicyBase::kAde: return job.remaining;
    // Post-delivery age (now + r) - t; `now` is common to every candidate.
    case PolicyBase::kAds: return job.remaining - job.gen_time;
    // Drop magnitude t - U is maximised by the freshest candidate.
    case PolicyBase::kAdm: return -job.gen_time;
    case PolicyBase::kRandom:
    case PolicyBase::kPs: return 0.0;
  }
  return 0.0;
}

std::vector<JobView> informative_set(const QueueView& view) {
  std::vector<JobView> out;
  for (const JobView& job : view.waiting) {
    if (is_informative(job, view.freshest_delivered)) out.push_back(job);
  }
  return out;
}

std::optional<UpdateId> select_next(const PolicyId& policy, const QueueView& view) {
  if (policy.base == PolicyBase::kPs) {
    throw Error(ErrorCode::kUnsupportedPolicy, "processor sharing has no selection rule");
  }
  if (view.waiting.empty()) return std::nullopt;

  if (policy.informative || policy.is_aoi_based()) {
    const std::vector<JobView> fresh = informative_set(view);
    if (policy.base == PolicyBase::kRandom) {
      if (fresh.empty()) return std::nullopt;
      const auto k = static_cast<std::size_t>(view.rng->uniform() * static_cast<double>(fresh.size()));
      return fresh[std::min(k, fresh.size() - 1)].id;
    }
    if (!fresh.empty()) return argmin(policy, fresh, false);
    if (policy.informative) return std::nullopt;
    // Every waiting update is obsolete: AoI-based policies serve the smallest.
    return argmin(policy, view.waiting, true);
  }

  if (policy.base == PolicyBase::kRandom) {
    const auto k = static_cast<std::size_t>(view.rng->uniform() * static_cast<double>(view.waiting.size()));
    return view.waiting[std::min(k, view.waiting.size() - 1)].id;
  }
  return argmin(policy, view.waiting, false);
}

bool should_preempt(const PolicyId& policy, const QueueView& view, const JobView& arrival) {
  if (!view.in_service) return false;
  const JobView& current = *view.in_service;

  if (policy.preemptive_aoi) {
    switch (policy.base) {
      case PolicyBase::kAde: return arrival.size < current.remaining;
      case PolicyBase::kAds:
        return arrival.size - arrival.gen_time < current.remaining - current.gen_time;
      case PolicyBase::kAdm: return true;
      default: return false;
    }
  }
  switch (policy.base) {
    case PolicyBase::kLcfsP: return true;
    case PolicyBase::kSrpt: return arrival.size < current.remaining;
    case PolicyBase::kSjfP:
      if (!(arrival.size < current.size)) return false;
      return std::all_of(view.waiting.begin(), view.waiting.end(),
                         [&](const JobView& w) { return arrival.size < w.size; });
    default: return false;
  }
}

}  // namespace aoisim
