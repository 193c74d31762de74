#include "core/metrics.hpp"

#include <cmath>
#include <string>

#include "core/error.hpp"

namespace aoisim {

void DeliveryLog::append(double delivered_at, double gen_time) {
  const Delivery& last = entries_.back();
  if (!(gen_time > last.gen_time) || delivered_at < last.delivered_at) {
    throw Error(ErrorCode::kInternal, "delivery log entries must advance");
  }
  if (delivered_at == last.delivered_at && entries_.size() > 1) {
    entries_.back().gen_time = gen_time;
    return;
  }
  entries_.push_back({delivered_at, gen_time});
}

namespace {

void require_deliveries(const DeliveryLog& log) {
  if (log.size() < 2) throw Error(ErrorCode::kInvalidArgument, "delivery log has no real delivery");
}

double segment_area(double age_at_start, double width) {
  return age_at_start * width + 0.5 * width * width;
}

}  // namespace

double average_aoi(const DeliveryLog& log, double horizon) {
  require_deliveries(log);
  const auto entries = log.entries();
  if (horizon < entries.back().delivered_at) {
    throw Error(ErrorCode::kInvalidArgument, "horizon precedes the last delivery");
  }
  double area = 0.0;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const double end = k + 1 < entries.size() ? entries[k + 1].delivered_at : horizon;
    area += segment_area(entries[k].delivered_at - entries[k].gen_time, end - entries[k].delivered_at);
  }
  return area / horizon;
}

double average_paoi(const DeliveryLog& log) {
  require_deliveries(log);
  return window_average_paoi(log, 0, log.size() - 1);
}

double window_average_aoi(const DeliveryLog& log, std::size_t first, std::size_t last) {
  const auto entries = log.entries();
  if (!(first < last) || last >= entries.size()) {
    throw Error(ErrorCode::kInvalidArgument, "invalid delivery window");
  }
  double area = 0.0;
  for (std::size_t k = first; k < last; ++k) {
    area += segment_area(entries[k].delivered_at - entries[k].gen_time,
                         entries[k + 1].delivered_at - entries[k].delivered_at);
  }
  return area / (entries[last].delivered_at - entries[first].delivered_at);
}

double window_average_paoi(const DeliveryLog& log, std::size_t first, std::size_t last) {
  const auto entries = log.entries();
  if (!(first < last) || last >= entries.size()) {
    throw Error(ErrorCode::kInvalidArgument, "invalid delivery window");
  }
  double total = 0.0;
  for (std::size_t k = first + 1; k <= last; ++k) {
    total += entries[k].delivered_at - entries[k - 1].gen_time;
  }
  return total / static_cast<double>(last - first);
}

std::string_view metric_name(Metric metric) {
  switch (metric) {
    case Metric::kAoi: return "aoi";
    case Metric::kPaoi: return "paoi";
    case Metric::kDelay: return "delay";
  }
  return "?";
}

Metric parse_metric(std::string_view name) {
  if (name == "aoi") return Metric::kAoi;
  if (name == "paoi") return Metric::kPaoi;
  if (name == "delay") return Metric::kDelay;
  throw Error(ErrorCode::kConfig, "unknown metric '" + std::string(name) + "'");
}

Summary aggregate(std::span<const double> samples) {
  if (samples.empty()) throw Error(ErrorCode::kInvalidArgument, "no samples to aggregate");
  Summary out;
  out.runs = samples.size();
  double sum = 0.0;
  for (double x : samples) sum += x;
  out.mean = sum / static_cast<double>(out.runs);
  if (out.runs == 1) {
    out.single_run = true;
    return out;
  }
  double ss = 0.0;
  for (double x : samples) ss += (x - out.mean) * (x - out.mean);
  const double sd = std::sqrt(ss / static_cast<double>(out.runs - 1));
  out.ci_halfwidth = kNormalQuantile95 * sd / std::sqrt(static_cast<double>(out.runs));
  return out;
}

}  // namespace aoisim
