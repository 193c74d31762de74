#include "core/engine.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "core/error.hpp"
#include "core/ready_index.hpp"

namespace aoisim {

namespace {

constexpr std::size_t kNotWaiting = std::numeric_limits<std::size_t>::max();

// State shared by both service disciplines: update records, U(t), and logs.
class Bookkeeper {
 public:
  Bookkeeper(const Trace& trace, const EngineOptions& opts) : opts_(opts) {
    records_.resize(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
      UpdateRecord& r = records_[i];
      r.id = i;
      r.gen_time = trace.arrivals()[i];
      r.size = trace.sizes()[i];
      r.remaining = r.size;
    }
  }

  UpdateRecord& record(UpdateId id) { return records_[id]; }
  double freshest() const noexcept { return freshest_; }

  JobView view_of(UpdateId id) const {
    const UpdateRecord& r = records_[id];
    return {r.id, r.gen_time, r.size, r.remaining};
  }

  void log(double time, UpdateId id, Action action) {
    if (opts_.record_decisions) result_.decision_log.push_back({time, id, action});
  }

  // Returns true when the delivery was informative (U advanced).
  bool deliver(UpdateId id, double now) {
    UpdateRecord& r = records_[id];
    r.served += r.remaining;
    r.remaining = 0.0;
    r.delivered_at = now;
    r.status = UpdateStatus::kDelivered;
    log(now, id, Action::kDeliver);
    ++result_.delivered;
    delay_sum_ += now - r.gen_time;
    if (r.gen_time > freshest_) {
      freshest_ = r.gen_time;
      result_.delivery_log.append(now, r.gen_time);
      return true;
    }
    return false;
  }

  void discard(UpdateId id, double now) {
    records_[id].status = UpdateStatus::kDiscarded;
    log(now, id, Action::kDiscard);
    ++result_.discarded;
  }

  RunResult finish() {
    // The age is integrated up to the last drop; later obsolete deliveries
    // do not change the trajectory.
    result_.horizon = result_.delivery_log.back().delivered_at;
    result_.avg_aoi = average_aoi(result_.delivery_log, result_.horizon);
    result_.avg_paoi = average_paoi(result_.delivery_log);
    result_.avg_delay = delay_sum_ / static_cast<double>(result_.delivered);
    if (opts_.keep_updates) result_.updates = std::move(records_);
    return std::move(result_);
  }

 private:
  const EngineOptions& opts_;
  std::vector<UpdateRecord> records_;
  RunResult result_;
  double freshest_ = 0.0;
  double delay_sum_ = 0.0;
};

class PreemptResumeServer {
 public:
  PreemptResumeServer(const Trace& trace, const PolicyId& policy, const EngineOptions& opts)
      : trace_(trace),
        policy_(policy),
        book_(trace, opts),
        rng_(opts.decision_seed.value_or(trace.seed()), StreamRole::kDecisions),
        position_(trace.size(), kNotWaiting) {
    if (opts.selection == SelectionMode::kIndexed && policy.base != PolicyBase::kRandom) {
      index_.emplace(policy, trace.size());
    }
  }

  RunResult run() {
    const auto arrivals = trace_.arrivals();
    std::size_t next = 0;
    for (;;) {
      const bool more_arrivals = next < arrivals.size();
      // Departure wins a tie with an arrival.
      if (in_service_ && (!more_arrivals || departure_ <= arrivals[next])) {
        on_departure();
      } else if (more_arrivals) {
        on_arrival(next++);
      } else {
        break;
      }
    }
    if (!waiting_.empty()) throw Error(ErrorCode::kInternal, "updates left waiting at the end");
    return book_.finish();
  }

 private:
  void add_waiting(UpdateId id) {
    UpdateRecord& r = book_.record(id);
    r.status = UpdateStatus::kWaiting;
    position_[id] = waiting_.size();
    waiting_.push_back(book_.view_of(id));
    if (index_) index_->insert(waiting_.back(), book_.freshest());
  }

  void remove_waiting(UpdateId id, bool from_index = true) {
    const std::size_t pos = position_[id];
    if (pos != waiting_.size() - 1) {
      waiting_[pos] = waiting_.back();
      position_[waiting_[pos].id] = pos;
    }
    waiting_.pop_back();
    position_[id] = kNotWaiting;
    if (index_ && from_index) index_->erase(id);
  }

  void start_service(UpdateId id) {
    UpdateRecord& r = book_.record(id);
    r.status = UpdateStatus::kInService;
    book_.log(now_, id, r.service_start ? Action::kResume : Action::kStart);
    if (!r.service_start) r.service_start = now_;
    in_service_ = id;
    segment_start_ = now_;
    departure_ = now_ + r.remaining;
  }

  void dispatch() {
    if (in_service_ || waiting_.empty()) return;
    std::optional<UpdateId> pick;
    if (index_) {
      pick = index_->select();
    } else {
      QueueView view{now_, waiting_, std::nullopt, book_.freshest(), &rng_};
      pick = select_next(policy_, view);
    }
    if (!pick) return;
    remove_waiting(*pick);
    start_service(*pick);
  }

  // Informative policies drop every waiting update that can no longer lower
  // the age. AoI-based policies only need their index to re-pool them.
  void on_freshness_advanced() {
    if (index_) {
      const std::vector<UpdateId> expired = index_->advance_freshness(book_.freshest());
      if (!policy_.informative) return;
      for (UpdateId id : expired) {
        remove_waiting(id, false);
        book_.discard(id, now_);
      }
      return;
    }
    if (!policy_.informative) return;
    std::vector<JobView> expired;
    for (const JobView& job : waiting_) {
      if (!is_informative(job, book_.freshest())) expired.push_back(job);
    }
    std::sort(expired.begin(), expired.end(), [](const JobView& a, const JobView& b) {
      return std::pair(a.gen_time, a.id) < std::pair(b.gen_time, b.id);
    });
    for (const JobView& job : expired) {
      remove_waiting(job.id);
      book_.discard(job.id, now_);
    }
  }

  void on_departure() {
    now_ = departure_;
    const UpdateId id = *in_service_;
    in_service_.reset();
    if (book_.deliver(id, now_)) on_freshness_advanced();
    dispatch();
  }

  void on_arrival(UpdateId id) {
    now_ = trace_.arrivals()[id];
    if (!in_service_) {
      add_waiting(id);
      dispatch();
      return;
    }
    UpdateRecord& current = book_.record(*in_service_);
    const double elapsed = now_ - segment_start_;
    JobView current_view = book_.view_of(current.id);
    current_view.remaining = current.remaining - elapsed;

    QueueView view{now_, waiting_, current_view, book_.freshest(), &rng_};
    const JobView arriving = book_.view_of(id);
    if (!should_preempt(policy_, view, arriving)) {
      add_waiting(id);
      return;
    }
    // Preempt-resume: the interrupted update keeps the work it has received.
    current.served += elapsed;
    current.remaining = std::max(current_view.remaining, std::numeric_limits<double>::min());
    book_.log(now_, current.id, Action::kPreempt);
    in_service_.reset();
    add_waiting(current.id);
    start_service(id);
  }

  const Trace& trace_;
  PolicyId policy_;
  Bookkeeper book_;
  RandomStream rng_;
  std::optional<ReadyIndex> index_;
  std::vector<JobView> waiting_;
  std::vector<std::size_t> position_;
  std::optional<UpdateId> in_service_;
  double now_ = 0.0;
  double segment_start_ = 0.0;
  double departure_ = 0.0;
};

}  // namespace

RunResult run(const Trace& trace, const PolicyId& policy, const EngineOptions& opts) {
  if (trace.empty()) throw Error(ErrorCode::kEmptyTrace, "cannot simulate an empty trace");
  policy.validate();
  if (policy.base == PolicyBase::kPs) {
    throw Error(ErrorCode::kUnsupportedPolicy, "processor sharing must use run_ps");
  }
  return PreemptResumeServer(trace, policy, opts).run();
}

RunResult run_ps(const Trace& trace, const EngineOptions& opts) {
  if (trace.empty()) throw Error(ErrorCode::kEmptyTrace, "cannot simulate an empty trace");
  Bookkeeper book(trace, opts);
  const auto arrivals = trace.arrivals();

  // Virtual time advances at rate 1/k; an update finishes when virtual time
  // reaches its arrival virtual time plus its size.
  using Tag = std::pair<double, UpdateId>;
  std::set<Tag> active;
  double virtual_now = 0.0;
  double now = 0.0;
  std::size_t next = 0;

  for (;;) {
    const bool more_arrivals = next < arrivals.size();
    const double k = static_cast<double>(active.size());
    if (!active.empty()) {
      const auto [tag, id] = *active.begin();
      const double departure = now + (tag - virtual_now) * k;
      if (!more_arrivals || departure <= arrivals[next]) {
        now = departure;
        virtual_now = tag;
        active.erase(active.begin());
        book.deliver(id, now);
        continue;
      }
    }
    if (!more_arrivals) break;
    const UpdateId id = next++;
    if (!active.empty()) virtual_now += (arrivals[id] - now) / k;
    now = arrivals[id];
    UpdateRecord& r = book.record(id);
    r.status = UpdateStatus::kInService;
    r.service_start = now;
    active.emplace(virtual_now + r.size, id);
    book.log(now, id, Action::kStart);
  }
  return book.finish();
}

RunResult simulate(const Trace& trace, const PolicyId& policy, const EngineOptions& opts) {
  if (policy.base == PolicyBase::kPs) {
    policy.validate();
    return run_ps(trace, opts);
  }
  return run(trace, policy, opts);
}

}  // namespace aoisim
