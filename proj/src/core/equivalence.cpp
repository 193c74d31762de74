#include "core/equivalence.hpp"

#include <algorithm>

#include "core/error.hpp"
#include "core/metrics.hpp"
#include "core/parallel.hpp"

namespace aoisim {

namespace {

void require_deterministic(const PolicyId& a, const PolicyId& b) {
  for (const PolicyId* p : {&a, &b}) {
    p->validate();
    if (!p->is_deterministic()) {
      throw Error(ErrorCode::kUnsupportedPolicy,
                  p->name() + " is randomized and has no sample-path equivalence");
    }
  }
}

DecisionLog service_projection(const DecisionLog& log) {
  DecisionLog out;
  out.reserve(log.size());
  for (const DecisionEntry& e : log) {
    if (e.action == Action::kStart || e.action == Action::kResume || e.action == Action::kDeliver) {
      out.push_back(e);
    }
  }
  return out;
}

RunResult replay(const Trace& trace, const PolicyId& policy) {
  EngineOptions opts;
  opts.keep_updates = false;
  return simulate(trace, policy, opts);
}

std::optional<UpdateId> id_of_generation(const Trace& trace, double gen_time) {
  const auto arrivals = trace.arrivals();
  const auto it = std::lower_bound(arrivals.begin(), arrivals.end(), gen_time);
  if (it == arrivals.end() || *it != gen_time) return std::nullopt;
  return static_cast<UpdateId>(it - arrivals.begin());
}

template <class Compare>
EquivalenceReport run_batch(const PolicyId& a, const PolicyId& b, const TraceBatch& batch,
                            Compare compare) {
  require_deterministic(a, b);
  if (batch.traces == 0) throw Error(ErrorCode::kConfig, "trace batch is empty");
  const DistributionSpec arrival = arrival_for_load(batch.arrival, batch.service.mean, batch.rho);

  struct Outcome {
    std::optional<Divergence> divergence;
    bool metrics_identical = true;
  };
  std::vector<Outcome> outcomes(batch.traces);
  parallel_for(
      batch.traces,
      [&](std::size_t i) {
        const Trace trace = generate_trace(arrival, batch.service, batch.updates, batch.seed_base + i);
        Outcome& out = outcomes[i];
        const RunResult ra = replay(trace, a);
        const RunResult rb = replay(trace, b);
        out.divergence = compare(trace, ra, rb);
        out.metrics_identical = ra.avg_aoi == rb.avg_aoi && ra.avg_paoi == rb.avg_paoi;
      },
      batch.workers);

  EquivalenceReport report;
  report.traces_checked = batch.traces;
  for (const Outcome& out : outcomes) {
    report.metrics_identical = report.metrics_identical && out.metrics_identical;
    if (out.divergence && !report.first_divergence) report.first_divergence = out.divergence;
  }
  report.equivalent = !report.first_divergence.has_value();
  return report;
}

std::optional<Divergence> diff_decisions(const Trace& trace, const RunResult& ra,
                                         const RunResult& rb) {
  const DecisionLog pa = service_projection(ra.decision_log);
  const DecisionLog pb = service_projection(rb.decision_log);
  const std::size_t common = std::min(pa.size(), pb.size());
  for (std::size_t k = 0; k <= common; ++k) {
    if (k == common && pa.size() == pb.size()) return std::nullopt;
    if (k < common && pa[k] == pb[k]) continue;
    Divergence d;
    d.seed = trace.seed();
    d.event_index = k;
    if (k < pa.size()) d.id_a = pa[k].id;
    if (k < pb.size()) d.id_b = pb[k].id;
    d.time = k < pa.size() && k < pb.size() ? std::min(pa[k].time, pb[k].time)
                                            : (k < pa.size() ? pa[k].time : pb[k].time);
    return d;
  }
  return std::nullopt;
}

std::optional<Divergence> diff_deliveries(const Trace& trace, const RunResult& ra,
                                          const RunResult& rb) {
  const auto ea = ra.delivery_log.entries();
  const auto eb = rb.delivery_log.entries();
  const std::size_t common = std::min(ea.size(), eb.size());
  for (std::size_t k = 0; k <= common; ++k) {
    if (k == common && ea.size() == eb.size()) return std::nullopt;
    if (k < common && ea[k] == eb[k]) continue;
    Divergence d;
    d.seed = trace.seed();
    d.event_index = k;
    if (k < ea.size()) d.id_a = id_of_generation(trace, ea[k].gen_time);
    if (k < eb.size()) d.id_b = id_of_generation(trace, eb[k].gen_time);
    d.time = k < ea.size() && k < eb.size() ? std::min(ea[k].delivered_at, eb[k].delivered_at)
                                            : (k < ea.size() ? ea[k].delivered_at : eb[k].delivered_at);
    return d;
  }
  return std::nullopt;
}

}  // namespace

DistributionSpec arrival_for_load(DistributionSpec arrival, double service_mean, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw Error(ErrorCode::kConfig, "load rho must lie in (0, 1), got " + std::to_string(rho));
  }
  arrival.mean = service_mean / rho;
  return arrival;
}

std::optional<Divergence> compare_decisions(const Trace& trace, const PolicyId& a,
                                           const PolicyId& b) {
  require_deterministic(a, b);
  return diff_decisions(trace, replay(trace, a), replay(trace, b));
}

std::optional<Divergence> compare_deliveries(const Trace& trace, const PolicyId& a,
                                            const PolicyId& b) {
  require_deterministic(a, b);
  return diff_deliveries(trace, replay(trace, a), replay(trace, b));
}

EquivalenceReport verify_sample_path_equivalence(const PolicyId& a, const PolicyId& b,
                                                 const TraceBatch& batch) {
  return run_batch(a, b, batch, diff_decisions);
}

EquivalenceReport verify_trajectory_identity(const PolicyId& a, const PolicyId& b,
                                             const TraceBatch& batch) {
  return run_batch(a, b, batch, diff_deliveries);
}

std::string verdict_name(Verdict verdict) {
  switch (verdict) {
    case Verdict::kDominates: return "dominates";
    case Verdict::kInconclusive: return "inconclusive";
    case Verdict::kViolated: return "violated";
  }
  return "?";
}

bool DominanceReport::any_violated() const {
  return std::any_of(points.begin(), points.end(),
                     [](const DominancePoint& p) { return p.verdict == Verdict::kViolated; });
}

Verdict classify(double mean_base, double ci_base, double mean_informative, double ci_informative) {
  if (mean_informative + ci_informative <= mean_base - ci_base) return Verdict::kDominates;
  if (mean_informative - ci_informative > mean_base + ci_base) return Verdict::kViolated;
  return Verdict::kInconclusive;
}

DominanceReport check_dominance(const PolicyId& base, const PolicyId& informative,
                                const DominanceSetup& setup) {
  base.validate();
  informative.validate();
  if (setup.service.family != Family::kExponential) {
    throw Error(ErrorCode::kScope, "the dominance claim is stated for exponential service only");
  }
  if (setup.runs == 0 || setup.rhos.empty()) {
    throw Error(ErrorCode::kConfig, "dominance check needs at least one run and one load");
  }

  const std::size_t tasks = setup.rhos.size() * setup.runs;
  std::vector<double> base_aoi(tasks);
  std::vector<double> informative_aoi(tasks);
  parallel_for(
      tasks,
      [&](std::size_t t) {
        const std::size_t point = t / setup.runs;
        const std::size_t run = t % setup.runs;
        const DistributionSpec arrival =
            arrival_for_load(setup.arrival, setup.service.mean, setup.rhos[point]);
        // Common random numbers: both policies replay the same trace.
        const Trace trace = generate_trace(arrival, setup.service, setup.updates, setup.seed + run);
        EngineOptions opts;
        opts.record_decisions = false;
        opts.keep_updates = false;
        base_aoi[t] = simulate(trace, base, opts).avg_aoi;
        informative_aoi[t] = simulate(trace, informative, opts).avg_aoi;
      },
      setup.workers);

  DominanceReport report;
  for (std::size_t point = 0; point < setup.rhos.size(); ++point) {
    const auto slice = [&](const std::vector<double>& v) {
      return std::span<const double>(v).subspan(point * setup.runs, setup.runs);
    };
    const Summary sb = aggregate(slice(base_aoi));
    const Summary si = aggregate(slice(informative_aoi));
    DominancePoint p;
    p.rho = setup.rhos[point];
    p.runs = setup.runs;
    p.mean_base = sb.mean;
    p.ci_base = sb.ci_halfwidth;
    p.mean_informative = si.mean;
    p.ci_informative = si.ci_halfwidth;
    p.verdict = classify(sb.mean, sb.ci_halfwidth, si.mean, si.ci_halfwidth);
    report.points.push_back(p);
  }
  return report;
}

bool PropositionCheck::passed() const {
  if (equivalence && !equivalence->equivalent) return false;
  if (dominance && dominance->any_violated()) return false;
  return true;
}

std::vector<PropositionCheck> verify_proposition(int proposition, const PropositionOptions& opts) {
  const DistributionSpec exponential{Family::kExponential, 1.0, 1.0};
  const DistributionSpec weibull{Family::kWeibull, 1.0, 10.0};
  struct Setting {
    const char* label;
    DistributionSpec spec;
  };
  const Setting settings[] = {{"exponential", exponential}, {"weibull scv 10", weibull}};
  std::vector<PropositionCheck> checks;

  if (proposition == 1) {
    const PolicyId base = parse_policy("lcfs");
    const PolicyId informative = parse_policy("lcfs_i");
    for (const Setting& s : settings) {
      DominanceSetup setup;
      if (opts.rho) setup.rhos = {*opts.rho};
      setup.arrival = s.spec;
      setup.runs = opts.traces.value_or(50);
      setup.updates = opts.updates.value_or(10000);
      setup.seed = opts.seed;
      setup.workers = opts.workers;
      PropositionCheck check;
      check.label = "lcfs vs lcfs_i, " + std::string(s.label) + " arrivals, exponential service";
      check.dominance = check_dominance(base, informative, setup);
      checks.push_back(std::move(check));
    }
    return checks;
  }

  PolicyId a;
  PolicyId b;
  if (proposition == 2) {
    a = parse_policy("ade_pi");
    b = parse_policy("srpt_i");
  } else if (proposition == 3) {
    a = parse_policy("ade_i");
    b = parse_policy("sjf_i");
  } else {
    throw Error(ErrorCode::kInvalidArgument,
                "proposition must be 1, 2 or 3, got " + std::to_string(proposition));
  }
  const std::vector<double> rhos = opts.rho ? std::vector<double>{*opts.rho}
                                           : std::vector<double>{0.3, 0.7, 0.9};
  for (const Setting& s : settings) {
    for (double rho : rhos) {
      TraceBatch batch;
      batch.traces = opts.traces.value_or(1000);
      batch.updates = opts.updates.value_or(1000);
      batch.seed_base = opts.seed;
      batch.service = s.spec;
      batch.rho = rho;
      batch.workers = opts.workers;
      PropositionCheck check;
      std::string rho_text = std::to_string(rho);
      rho_text.erase(rho_text.find_last_not_of('0') + 1);
      check.label = a.name() + " vs " + b.name() + ", " + s.label + " service, rho " + rho_text;
      check.equivalence = verify_sample_path_equivalence(a, b, batch);
      checks.push_back(std::move(check));
    }
  }
  return checks;
}

}  // namespace aoisim
