#include "core/experiment.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "core/engine.hpp"
#include "core/equivalence.hpp"
#include "core/error.hpp"
#include "core/parallel.hpp"

namespace aoisim {

namespace {

using nlohmann::json;

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

std::string join_flags(const std::string& a, const std::string& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  return a + ";" + b;
}

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::kConfig, what); }

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> known,
                         const std::string& where) {
  for (const auto& item : obj.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      config_error("unknown key '" + item.key() + "' in " + where);
    }
  }
}

DistributionSpec parse_distribution(const json& obj, const std::string& where, bool with_mean) {
  if (!obj.is_object()) config_error(where + " must be an object");
  if (with_mean) {
    reject_unknown_keys(obj, {"family", "mean", "scv"}, where);
  } else {
    reject_unknown_keys(obj, {"family", "scv"}, where);
  }
  DistributionSpec spec;
  spec.family = parse_family(obj.at("family").get<std::string>());
  spec.scv = spec.family == Family::kDeterministic ? 0.0 : 1.0;
  if (obj.contains("scv")) spec.scv = obj["scv"].get<double>();
  if (with_mean && obj.contains("mean")) spec.mean = obj["mean"].get<double>();
  return spec;
}

struct SweepPoint {
  double rho = 0.0;
  DistributionSpec arrival;
  DistributionSpec service;
};

std::vector<SweepPoint> sweep_points(const ExperimentConfig& config) {
  std::vector<double> values = config.sweep.values;
  std::sort(values.begin(), values.end());
  std::vector<SweepPoint> points;
  points.reserve(values.size());
  for (double v : values) {
    SweepPoint p;
    p.service = config.service;
    p.rho = config.sweep.rho;
    if (config.sweep.axis == SweepAxis::kRho) {
      p.rho = v;
    } else {
      p.service.scv = v;
    }
    p.arrival = arrival_for_load(config.arrival, p.service.mean, p.rho);
    p.arrival.validate();
    p.service.validate();
    points.push_back(p);
  }
  return points;
}

double metric_value(const RunResult& r, Metric metric) {
  switch (metric) {
    case Metric::kAoi: return r.avg_aoi;
    case Metric::kPaoi: return r.avg_paoi;
    case Metric::kDelay: return r.avg_delay;
  }
  return 0.0;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (policies.empty()) config_error("at least one policy is required");
  for (const PolicyId& p : policies) p.validate();
  if (sweep.values.empty()) config_error("sweep has no values");
  if (runs == 0) config_error("runs must be at least 1");
  if (updates == 0) config_error("updates must be at least 1");
  if (metrics.empty()) config_error("at least one metric is required");
  if (!(service.mean > 0.0)) config_error("service mean must be positive");
  if (sweep.axis == SweepAxis::kRho) {
    for (double rho : sweep.values) {
      if (!(rho > 0.0 && rho < 1.0)) config_error("sweep rho " + format_double(rho) + " is outside (0, 1)");
    }
  } else if (!(sweep.rho > 0.0 && sweep.rho < 1.0)) {
    config_error("sweep rho " + format_double(sweep.rho) + " is outside (0, 1)");
  }
  sweep_points(*this);
}

ExperimentConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    config_error(std::string("malformed config: ") + e.what());
  }
  if (!doc.is_object()) config_error("config must be a JSON object");
  reject_unknown_keys(doc,
                      {"policies", "arrival", "service", "sweep", "runs", "updates", "seed",
                       "output", "metrics", "flags", "workers"},
                      "config");
  ExperimentConfig config;
  try {
    for (const auto& name : doc.at("policies")) config.policies.push_back(parse_policy(name.get<std::string>()));
    if (doc.contains("arrival")) config.arrival = parse_distribution(doc["arrival"], "arrival", false);
    if (doc.contains("service")) config.service = parse_distribution(doc["service"], "service", true);

    const json& sweep = doc.at("sweep");
    if (!sweep.is_object()) config_error("sweep must be an object");
    reject_unknown_keys(sweep, {"axis", "values", "rho"}, "sweep");
    const std::string axis = sweep.value("axis", std::string("rho"));
    if (axis == "rho") {
      config.sweep.axis = SweepAxis::kRho;
    } else if (axis == "scv") {
      config.sweep.axis = SweepAxis::kScv;
    } else {
      config_error("sweep axis must be 'rho' or 'scv', got '" + axis + "'");
    }
    config.sweep.values = sweep.at("values").get<std::vector<double>>();
    if (sweep.contains("rho")) config.sweep.rho = sweep["rho"].get<double>();

    if (doc.contains("runs")) config.runs = doc["runs"].get<std::size_t>();
    if (doc.contains("updates")) config.updates = doc["updates"].get<std::size_t>();
    if (doc.contains("seed")) config.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("output")) config.output = doc["output"].get<std::string>();
    if (doc.contains("flags")) config.flags = doc["flags"].get<std::string>();
    if (doc.contains("workers")) config.workers = doc["workers"].get<std::size_t>();
    if (doc.contains("metrics")) {
      config.metrics.clear();
      for (const auto& m : doc["metrics"]) config.metrics.push_back(parse_metric(m.get<std::string>()));
    }
  } catch (const json::exception& e) {
    config_error(std::string("invalid config: ") + e.what());
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::vector<SweepPoint> points = sweep_points(config);
  const std::size_t runs = config.runs;
  const std::size_t policies = config.policies.size();

  // One slot per (point, run, policy); the trace for (point, run) is shared
  // by every policy.
  std::vector<RunResult> results(points.size() * runs * policies);
  std::vector<std::uint64_t> hashes(points.size() * runs);
  parallel_for(
      points.size() * runs,
      [&](std::size_t task) {
        const SweepPoint& p = points[task / runs];
        const std::uint64_t seed = config.seed + task % runs;
        const Trace trace = generate_trace(p.arrival, p.service, config.updates, seed);
        hashes[task] = trace.hash();
        EngineOptions opts;
        opts.record_decisions = false;
        opts.keep_updates = false;
        for (std::size_t k = 0; k < policies; ++k) {
          RunResult r = simulate(trace, config.policies[k], opts);
          r.delivery_log = DeliveryLog();
          results[task * policies + k] = std::move(r);
        }
      },
      config.workers);

  std::vector<std::uint64_t> point_hash(points.size(), 14695981039346656037ULL);
  for (std::size_t task = 0; task < hashes.size(); ++task) {
    std::uint64_t& h = point_hash[task / runs];
    h = (h ^ hashes[task]) * 1099511628211ULL;
  }

  std::vector<ResultRow> rows;
  rows.reserve(policies * points.size() * config.metrics.size());
  std::vector<double> samples(runs);
  for (std::size_t k = 0; k < policies; ++k) {
    for (std::size_t pi = 0; pi < points.size(); ++pi) {
      for (Metric metric : config.metrics) {
        for (std::size_t r = 0; r < runs; ++r) {
          samples[r] = metric_value(results[(pi * runs + r) * policies + k], metric);
        }
        ResultRow row;
        row.policy = config.policies[k];
        row.rho = points[pi].rho;
        row.arrival_family = points[pi].arrival.family;
        row.arrival_scv = points[pi].arrival.scv;
        row.service_family = points[pi].service.family;
        row.service_scv = points[pi].service.scv;
        row.metric = metric;
        row.summary = aggregate(samples);
        row.updates = config.updates;
        row.seed = config.seed;
        row.flags = join_flags(config.flags, row.summary.single_run ? "single-run" : "");
        row.trace_hash = point_hash[pi];
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows, bool verbose) {
  out << "policy,rho,arrival_family,arrival_scv,service_family,service_scv,metric,mean,"
         "ci_halfwidth,runs,updates,seed,flags";
  if (verbose) out << ",trace_hash";
  out << '\n';
  for (const ResultRow& r : rows) {
    out << r.policy.name() << ',' << format_double(r.rho) << ',' << family_name(r.arrival_family)
        << ',' << format_double(r.arrival_scv) << ',' << family_name(r.service_family) << ','
        << format_double(r.service_scv) << ',' << metric_name(r.metric) << ','
        << format_double(r.summary.mean) << ',' << format_double(r.summary.ci_halfwidth) << ','
        << r.summary.runs << ',' << r.updates << ',' << r.seed << ',' << r.flags;
    if (verbose) out << ',' << r.trace_hash;
    out << '\n';
  }
}

std::string to_csv(const std::vector<ResultRow>& rows, bool verbose) {
  std::ostringstream out;
  write_csv(out, rows, verbose);
  return out.str();
}

std::vector<GainRow> informative_gain(const std::vector<ResultRow>& rows) {
  std::vector<GainRow> gains;
  for (const ResultRow& base : rows) {
    if (base.policy.informative) continue;
    PolicyId partner = base.policy;
    partner.informative = true;
    const auto it = std::find_if(rows.begin(), rows.end(), [&](const ResultRow& r) {
      return r.policy == partner && r.rho == base.rho && r.service_scv == base.service_scv &&
             r.metric == base.metric;
    });
    if (it == rows.end()) continue;
    GainRow g;
    g.base = base.policy;
    g.informative = partner;
    g.base_row = base;
    g.informative_mean = it->summary.mean;
    g.gain = (base.summary.mean - it->summary.mean) / base.summary.mean;
    gains.push_back(std::move(g));
  }
  return gains;
}

void write_gain_csv(std::ostream& out, const std::vector<GainRow>& rows) {
  out << "policy,informative_policy,rho,arrival_family,arrival_scv,service_family,service_scv,"
         "metric,base_mean,informative_mean,gain\n";
  for (const GainRow& g : rows) {
    const ResultRow& r = g.base_row;
    out << g.base.name() << ',' << g.informative.name() << ',' << format_double(r.rho) << ','
        << family_name(r.arrival_family) << ',' << format_double(r.arrival_scv) << ','
        << family_name(r.service_family) << ',' << format_double(r.service_scv) << ','
        << metric_name(r.metric) << ',' << format_double(r.summary.mean) << ','
        << format_double(g.informative_mean) << ',' << format_double(g.gain) << '\n';
  }
}

namespace {

std::vector<PolicyId> policies_of(std::initializer_list<std::string_view> names) {
  std::vector<PolicyId> out;
  for (std::string_view n : names) out.push_back(parse_policy(n));
  return out;
}

struct PolicyGroup {
  std::vector<PolicyId> policies;
  bool gain = false;
  std::string_view label;
};

PolicyGroup common_group() {
  return {policies_of({"fcfs", "random", "lcfs", "sjf", "ps", "lcfs_p", "srpt", "sjf_p"}), false,
          "common policies"};
}

PolicyGroup informative_group() {
  return {policies_of({"fcfs", "fcfs_i", "random", "random_i", "lcfs", "lcfs_i", "sjf", "sjf_i",
                       "lcfs_p", "lcfs_pi", "srpt", "srpt_i", "sjf_p", "sjf_pi"}),
          true, "informative vs non-informative"};
}

PolicyGroup aoi_based_group() {
  return {policies_of({"lcfs", "sjf", "ade", "ads", "adm"}), false, "AoI-based vs others"};
}

PolicyGroup combined_group() {
  return {policies_of({"lcfs_p", "srpt", "sjf_p", "srpt_i", "sjf_pi", "ade_pi", "ads_pi", "adm_pi"}),
          false, "preemptive informative AoI-based vs others"};
}

std::vector<double> rho_grid() { return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}; }

std::vector<double> scv_grid() { return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}; }

struct PanelSetup {
  char panel;
  DistributionSpec arrival;
  DistributionSpec service;
  bool scv_sweep;
  bool unspecified_scv;
  std::string_view label;
};

const DistributionSpec kExp{Family::kExponential, 1.0, 1.0};

std::vector<PanelSetup> main_panels() {
  return {
      {'a', kExp, kExp, false, false, "M/M/1"},
      {'b', kExp, {Family::kWeibull, 1.0, 10.0}, false, false, "exponential arrivals, Weibull(scv 10) sizes"},
      {'c', kExp, {Family::kWeibull, 1.0, 1.0}, true, false, "exponential arrivals, Weibull sizes, scv sweep at rho 0.7"},
  };
}

std::vector<PanelSetup> extra_panels() {
  const DistributionSpec wei{Family::kWeibull, 1.0, 10.0};
  return {
      {'a', wei, kExp, false, false, "Weibull(scv 10) arrivals, exponential sizes"},
      {'b', wei, wei, false, false, "Weibull(scv 10) arrivals and sizes"},
      {'c', wei, {Family::kWeibull, 1.0, 1.0}, true, false, "Weibull(scv 10) arrivals, Weibull sizes, scv sweep at rho 0.7"},
      {'d', {Family::kGamma, 1.0, 10.0}, {Family::kGamma, 1.0, 10.0}, false, true, "gamma arrivals and sizes"},
      {'e', {Family::kLognormal, 1.0, 10.0}, {Family::kLognormal, 1.0, 10.0}, false, true, "lognormal arrivals and sizes"},
      {'f', {Family::kPareto, 1.0, 10.0}, {Family::kPareto, 1.0, 10.0}, false, true, "Pareto arrivals and sizes"},
  };
}

FigurePreset make_preset(const std::string& figure, const PanelSetup& panel, const PolicyGroup& group,
                         Metric metric, bool fast) {
  FigurePreset preset;
  preset.id = figure + panel.panel;
  preset.description = std::string(metric_name(metric)) + ", " + std::string(group.label) + ", " +
                       std::string(panel.label);
  preset.emits_gain = group.gain;
  ExperimentConfig& c = preset.config;
  c.policies = group.policies;
  c.arrival = panel.arrival;
  c.service = panel.service;
  c.sweep.axis = panel.scv_sweep ? SweepAxis::kScv : SweepAxis::kRho;
  c.sweep.values = panel.scv_sweep ? scv_grid() : rho_grid();
  c.sweep.rho = 0.7;
  c.runs = fast ? 10 : 50;
  c.updates = 100000;
  c.seed = 1;
  c.metrics = {metric};
  if (panel.unspecified_scv) c.flags = "scv-unspecified";
  return preset;
}

}  // namespace

std::vector<FigurePreset> figure_presets(bool fast) {
  struct Figure {
    std::string id;
    PolicyGroup group;
    Metric metric;
    bool extra;
  };
  const std::vector<Figure> figures = {
      {"3", common_group(), Metric::kAoi, false},      {"4", common_group(), Metric::kPaoi, false},
      {"9", informative_group(), Metric::kAoi, false}, {"10", informative_group(), Metric::kPaoi, false},
      {"11", aoi_based_group(), Metric::kAoi, false},  {"12", aoi_based_group(), Metric::kPaoi, false},
      {"13", combined_group(), Metric::kAoi, false},   {"14", combined_group(), Metric::kPaoi, false},
      {"A10", common_group(), Metric::kAoi, true},     {"A11", common_group(), Metric::kPaoi, true},
      {"A12", aoi_based_group(), Metric::kAoi, true},  {"A13", aoi_based_group(), Metric::kPaoi, true},
      {"A14", informative_group(), Metric::kAoi, true}, {"A15", informative_group(), Metric::kPaoi, true},
      {"A16", combined_group(), Metric::kAoi, true},   {"A17", combined_group(), Metric::kPaoi, true},
  };
  std::vector<FigurePreset> presets;
  for (const Figure& f : figures) {
    for (const PanelSetup& panel : f.extra ? extra_panels() : main_panels()) {
      presets.push_back(make_preset(f.id, panel, f.group, f.metric, fast));
    }
  }
  return presets;
}

std::vector<std::string> figure_ids() {
  std::vector<std::string> ids;
  for (const FigurePreset& p : figure_presets()) ids.push_back(p.id);
  return ids;
}

std::vector<std::filesystem::path> reproduce(std::string_view figure_id,
                                             const std::filesystem::path& dir, bool fast) {
  std::string wanted(figure_id);
  std::transform(wanted.begin(), wanted.end(), wanted.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  std::vector<FigurePreset> selected;
  for (FigurePreset& p : figure_presets(fast)) {
    std::string id = p.id;
    std::transform(id.begin(), id.end(), id.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (id == wanted || id.substr(0, id.size() - 1) == wanted) selected.push_back(std::move(p));
  }
  if (selected.empty()) {
    std::string list;
    for (const std::string& id : figure_ids()) list += (list.empty() ? "" : ", ") + id;
    throw Error(ErrorCode::kUnknownFigure,
                "unknown figure '" + std::string(figure_id) + "'; valid ids: " + list);
  }

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  for (const FigurePreset& p : selected) {
    const std::vector<ResultRow> rows = run_experiment(p.config);
    const auto path = dir / ("fig" + p.id + ".csv");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
    write_csv(out, rows);
    written.push_back(path);
    if (p.emits_gain) {
      const auto gain_path = dir / ("fig" + p.id + "_gain.csv");
      std::ofstream gout(gain_path, std::ios::binary);
      if (!gout) throw Error(ErrorCode::kIo, "cannot write " + gain_path.string());
      write_gain_csv(gout, informative_gain(rows));
      written.push_back(gain_path);
    }
  }
  return written;
}

}  // namespace aoisim
