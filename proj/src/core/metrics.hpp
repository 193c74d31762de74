#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace aoisim {

struct Delivery {
  double delivered_at = 0.0;  // d_k
  double gen_time = 0.0;      // g_k

  friend bool operator==(const Delivery&, const Delivery&) = default;
};

/// Informative deliveries in time order, prefixed by the virtual (0, 0)
/// entry that fixes the age at time zero to zero. Both columns are strictly
/// increasing.
class DeliveryLog {
 public:
  DeliveryLog() : entries_{{0.0, 0.0}} {}

  // Requires gen_time > back().gen_time and delivered_at >= back().delivered_at.
  // Several informative deliveries at one instant collapse into a single
  // entry carrying the freshest generation time.
  void append(double delivered_at, double gen_time);

  std::span<const Delivery> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const Delivery& operator[](std::size_t k) const { return entries_[k]; }
  const Delivery& back() const { return entries_.back(); }

  friend bool operator==(const DeliveryLog&, const DeliveryLog&) = default;

 private:
  std::vector<Delivery> entries_;
};

/// Time-average of the sawtooth over [0, horizon]. Segment k starts at age
/// a_k = d_k - g_k and lasts w_k, contributing a_k w_k + w_k^2 / 2. The last
/// segment runs to `horizon`, which must be >= the last delivery.
double average_aoi(const DeliveryLog& log, double horizon);

/// Mean peak age: A_k = d_k - g_{k-1} over every real delivery.
double average_paoi(const DeliveryLog& log);

/// Averages restricted to the deliveries first..last (log indices), i.e. the
/// interval [d_first, d_last] and the peaks of deliveries first+1..last.
double window_average_aoi(const DeliveryLog& log, std::size_t first, std::size_t last);
double window_average_paoi(const DeliveryLog& log, std::size_t first, std::size_t last);

enum class Metric { kAoi, kPaoi, kDelay };

std::string_view metric_name(Metric metric);
Metric parse_metric(std::string_view name);

struct Summary {
  double mean = 0.0;
  double ci_halfwidth = 0.0;  // 1.96 s / sqrt(runs)
  std::size_t runs = 0;
  bool single_run = false;  // halfwidth forced to zero
};

struct SummaryRow {
  Metric metric = Metric::kAoi;
  Summary summary;
};

inline constexpr double kNormalQuantile95 = 1.96;

Summary aggregate(std::span<const double> samples);

}  // namespace aoisim
