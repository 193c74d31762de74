#include "aoisim/aoisim.h"

#include <fstream>
#include <new>
#include <string>
#include <vector>

#include "core/engine.hpp"
#include "core/equivalence.hpp"
#include "core/error.hpp"
#include "core/experiment.hpp"

struct aoisim_trace {
  aoisim::Trace trace;
};

struct aoisim_result {
  aoisim::RunResult result;
};

struct aoisim_experiment {
  aoisim::ExperimentConfig config;
  std::vector<aoisim::ResultRow> rows;
  // Backing storage for the strings handed out by aoisim_experiment_row.
  std::vector<std::string> policy_names;
  std::string csv;
};

struct aoisim_verify_report {
  std::vector<aoisim::PropositionCheck> checks;
};

namespace {

thread_local std::string last_error;

aoisim_status fail(aoisim_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs body and converts any exception into a status code.
template <class Body>
aoisim_status guarded(Body&& body) {
  try {
    body();
    return AOISIM_OK;
  } catch (const aoisim::Error& e) {
    return fail(static_cast<aoisim_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(AOISIM_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(AOISIM_INTERNAL, e.what());
  }
}

aoisim_status null_argument(const char* name) {
  return fail(AOISIM_INVALID_ARGUMENT, std::string(name) + " must not be null");
}

}  // namespace

extern "C" {

const char* aoisim_version(void) { return "1.0.0"; }

const char* aoisim_last_error(void) { return last_error.c_str(); }

const char* aoisim_status_name(aoisim_status status) {
  switch (status) {
    case AOISIM_OK: return "ok";
    case AOISIM_INVALID_ARGUMENT: return "invalid argument";
    case AOISIM_PARAMETERIZATION: return "parameterization error";
    case AOISIM_EMPTY_TRACE: return "empty trace";
    case AOISIM_UNSUPPORTED_POLICY: return "unsupported policy";
    case AOISIM_CONFIG: return "config error";
    case AOISIM_SCOPE: return "scope error";
    case AOISIM_IO: return "i/o error";
    case AOISIM_UNKNOWN_FIGURE: return "unknown figure";
    case AOISIM_INTERNAL: return "internal error";
  }
  return "unknown status";
}

aoisim_status aoisim_trace_generate(const char* arrival_family, double arrival_mean,
                                    double arrival_scv, const char* size_family, double size_mean,
                                    double size_scv, size_t n, uint64_t seed, aoisim_trace** out) {
  if (!arrival_family) return null_argument("arrival_family");
  if (!size_family) return null_argument("size_family");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    const aoisim::DistributionSpec arrival{aoisim::parse_family(arrival_family), arrival_mean,
                                           arrival_scv};
    const aoisim::DistributionSpec size{aoisim::parse_family(size_family), size_mean, size_scv};
    *out = new aoisim_trace{aoisim::generate_trace(arrival, size, n, seed)};
  });
}

aoisim_status aoisim_trace_from_arrays(const double* arrivals, const double* sizes, size_t n,
                                       uint64_t seed, aoisim_trace** out) {
  if (!out) return null_argument("out");
  *out = nullptr;
  if (n > 0 && (!arrivals || !sizes)) return null_argument("arrivals and sizes");
  return guarded([&] {
    std::vector<double> a(arrivals, arrivals + n);
    std::vector<double> s(sizes, sizes + n);
    *out = new aoisim_trace{aoisim::Trace::from_samples(std::move(a), std::move(s), seed)};
  });
}

size_t aoisim_trace_size(const aoisim_trace* trace) { return trace ? trace->trace.size() : 0; }

aoisim_status aoisim_trace_get(const aoisim_trace* trace, size_t index, double* arrival,
                               double* size) {
  if (!trace) return null_argument("trace");
  if (index >= trace->trace.size()) return fail(AOISIM_INVALID_ARGUMENT, "trace index out of range");
  if (arrival) *arrival = trace->trace.arrivals()[index];
  if (size) *size = trace->trace.sizes()[index];
  return AOISIM_OK;
}

uint64_t aoisim_trace_hash(const aoisim_trace* trace) { return trace ? trace->trace.hash() : 0; }

void aoisim_trace_destroy(aoisim_trace* trace) { delete trace; }

aoisim_status aoisim_run(const aoisim_trace* trace, const char* policy,
                         const uint64_t* decision_seed, aoisim_result** out) {
  if (!trace) return null_argument("trace");
  if (!policy) return null_argument("policy");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    aoisim::EngineOptions opts;
    if (decision_seed) opts.decision_seed = *decision_seed;
    opts.keep_updates = false;
    *out = new aoisim_result{aoisim::simulate(trace->trace, aoisim::parse_policy(policy), opts)};
  });
}

aoisim_status aoisim_result_summary(const aoisim_result* result, aoisim_summary* out) {
  if (!result) return null_argument("result");
  if (!out) return null_argument("out");
  const aoisim::RunResult& r = result->result;
  *out = {r.avg_aoi, r.avg_paoi, r.avg_delay, r.horizon, r.delivered, r.discarded};
  return AOISIM_OK;
}

size_t aoisim_result_delivery_count(const aoisim_result* result) {
  return result ? result->result.delivery_log.size() : 0;
}

aoisim_status aoisim_result_delivery(const aoisim_result* result, size_t index,
                                     double* delivered_at, double* gen_time) {
  if (!result) return null_argument("result");
  const aoisim::DeliveryLog& log = result->result.delivery_log;
  if (index >= log.size()) return fail(AOISIM_INVALID_ARGUMENT, "delivery index out of range");
  if (delivered_at) *delivered_at = log[index].delivered_at;
  if (gen_time) *gen_time = log[index].gen_time;
  return AOISIM_OK;
}

size_t aoisim_result_decision_count(const aoisim_result* result) {
  return result ? result->result.decision_log.size() : 0;
}

aoisim_status aoisim_result_decision(const aoisim_result* result, size_t index, double* time,
                                     size_t* update_id, aoisim_action* action) {
  if (!result) return null_argument("result");
  const aoisim::DecisionLog& log = result->result.decision_log;
  if (index >= log.size()) return fail(AOISIM_INVALID_ARGUMENT, "decision index out of range");
  if (time) *time = log[index].time;
  if (update_id) *update_id = log[index].id;
  if (action) *action = static_cast<aoisim_action>(log[index].action);
  return AOISIM_OK;
}

void aoisim_result_destroy(aoisim_result* result) { delete result; }

aoisim_status aoisim_experiment_from_json(const char* json, aoisim_experiment** out) {
  if (!json) return null_argument("json");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] { *out = new aoisim_experiment{aoisim::parse_config(json), {}, {}, {}}; });
}

aoisim_status aoisim_experiment_from_file(const char* path, aoisim_experiment** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] { *out = new aoisim_experiment{aoisim::load_config(path), {}, {}, {}}; });
}

aoisim_status aoisim_experiment_set_workers(aoisim_experiment* experiment, size_t workers) {
  if (!experiment) return null_argument("experiment");
  experiment->config.workers = workers;
  return AOISIM_OK;
}

const char* aoisim_experiment_output(const aoisim_experiment* experiment) {
  return experiment ? experiment->config.output.c_str() : "";
}

aoisim_status aoisim_experiment_run(aoisim_experiment* experiment) {
  if (!experiment) return null_argument("experiment");
  return guarded([&] {
    experiment->rows = aoisim::run_experiment(experiment->config);
    experiment->policy_names.clear();
    for (const aoisim::ResultRow& row : experiment->rows) {
      experiment->policy_names.push_back(row.policy.name());
    }
  });
}

size_t aoisim_experiment_row_count(const aoisim_experiment* experiment) {
  return experiment ? experiment->rows.size() : 0;
}

aoisim_status aoisim_experiment_row(const aoisim_experiment* experiment, size_t index,
                                    aoisim_row* out) {
  if (!experiment) return null_argument("experiment");
  if (!out) return null_argument("out");
  if (index >= experiment->rows.size()) return fail(AOISIM_INVALID_ARGUMENT, "row index out of range");
  const aoisim::ResultRow& r = experiment->rows[index];
  // family_name and metric_name view static storage.
  out->policy = experiment->policy_names[index].c_str();
  out->rho = r.rho;
  out->arrival_family = aoisim::family_name(r.arrival_family).data();
  out->arrival_scv = r.arrival_scv;
  out->service_family = aoisim::family_name(r.service_family).data();
  out->service_scv = r.service_scv;
  out->metric = aoisim::metric_name(r.metric).data();
  out->mean = r.summary.mean;
  out->ci_halfwidth = r.summary.ci_halfwidth;
  out->runs = r.summary.runs;
  out->updates = r.updates;
  out->seed = r.seed;
  out->flags = r.flags.c_str();
  out->trace_hash = r.trace_hash;
  return AOISIM_OK;
}

aoisim_status aoisim_experiment_csv(aoisim_experiment* experiment, int verbose, const char** out) {
  if (!experiment) return null_argument("experiment");
  if (!out) return null_argument("out");
  return guarded([&] {
    experiment->csv = aoisim::to_csv(experiment->rows, verbose != 0);
    *out = experiment->csv.c_str();
  });
}

aoisim_status aoisim_experiment_write_csv(const aoisim_experiment* experiment, const char* path,
                                          int verbose) {
  if (!experiment) return null_argument("experiment");
  if (!path) return null_argument("path");
  return guarded([&] {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw aoisim::Error(aoisim::ErrorCode::kIo, std::string("cannot write ") + path);
    aoisim::write_csv(file, experiment->rows, verbose != 0);
    if (!file) throw aoisim::Error(aoisim::ErrorCode::kIo, std::string("write failed for ") + path);
  });
}

void aoisim_experiment_destroy(aoisim_experiment* experiment) { delete experiment; }

namespace {

const std::vector<std::string>& figure_id_table() {
  static const std::vector<std::string> ids = aoisim::figure_ids();
  return ids;
}

}  // namespace

size_t aoisim_figure_count(void) { return figure_id_table().size(); }

const char* aoisim_figure_id(size_t index) {
  const auto& ids = figure_id_table();
  return index < ids.size() ? ids[index].c_str() : nullptr;
}

aoisim_status aoisim_reproduce(const char* figure, const char* out_dir, int fast,
                               size_t* files_written) {
  if (!figure) return null_argument("figure");
  if (!out_dir) return null_argument("out_dir");
  return guarded([&] {
    const auto written = aoisim::reproduce(figure, out_dir, fast != 0);
    if (files_written) *files_written = written.size();
  });
}

void aoisim_verify_options_init(aoisim_verify_options* opts) {
  if (opts) *opts = {0, 0, 0.0, 1, 0};
}

aoisim_status aoisim_verify(int proposition, const aoisim_verify_options* opts,
                            aoisim_verify_report** out) {
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    aoisim::PropositionOptions po;
    if (opts) {
      if (opts->traces) po.traces = opts->traces;
      if (opts->updates) po.updates = opts->updates;
      if (opts->rho != 0.0) po.rho = opts->rho;
      po.seed = opts->seed;
      po.workers = opts->workers;
    }
    *out = new aoisim_verify_report{aoisim::verify_proposition(proposition, po)};
  });
}

int aoisim_verify_passed(const aoisim_verify_report* report) {
  if (!report) return 0;
  for (const auto& check : report->checks) {
    if (!check.passed()) return 0;
  }
  return 1;
}

size_t aoisim_verify_check_count(const aoisim_verify_report* report) {
  return report ? report->checks.size() : 0;
}

aoisim_status aoisim_verify_check(const aoisim_verify_report* report, size_t index,
                                  aoisim_check* out) {
  if (!report) return null_argument("report");
  if (!out) return null_argument("out");
  if (index >= report->checks.size()) return fail(AOISIM_INVALID_ARGUMENT, "check index out of range");
  const aoisim::PropositionCheck& c = report->checks[index];
  *out = {};
  out->label = c.label.c_str();
  out->passed = c.passed() ? 1 : 0;
  out->id_a = -1;
  out->id_b = -1;
  if (c.equivalence) {
    out->traces_checked = c.equivalence->traces_checked;
    if (const auto& d = c.equivalence->first_divergence) {
      out->has_divergence = 1;
      out->divergence_seed = d->seed;
      out->divergence_time = d->time;
      if (d->id_a) out->id_a = static_cast<int64_t>(*d->id_a);
      if (d->id_b) out->id_b = static_cast<int64_t>(*d->id_b);
    }
  }
  if (c.dominance) {
    out->point_count = c.dominance->points.size();
    for (const auto& p : c.dominance->points) out->traces_checked += p.runs;
  }
  return AOISIM_OK;
}

aoisim_status aoisim_verify_point(const aoisim_verify_report* report, size_t check, size_t index,
                                  aoisim_dominance_point* out) {
  if (!report) return null_argument("report");
  if (!out) return null_argument("out");
  if (check >= report->checks.size()) return fail(AOISIM_INVALID_ARGUMENT, "check index out of range");
  const auto& dominance = report->checks[check].dominance;
  if (!dominance || index >= dominance->points.size()) {
    return fail(AOISIM_INVALID_ARGUMENT, "dominance point index out of range");
  }
  const aoisim::DominancePoint& p = dominance->points[index];
  static const char* const verdicts[] = {"dominates", "inconclusive", "violated"};
  *out = {p.rho, p.runs, p.mean_base, p.ci_base, p.mean_informative, p.ci_informative,
          verdicts[static_cast<int>(p.verdict)]};
  return AOISIM_OK;
}

void aoisim_verify_destroy(aoisim_verify_report* report) { delete report; }

}  // extern "C"
