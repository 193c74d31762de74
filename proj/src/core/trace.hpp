#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/random_stream.hpp"

namespace aoisim {

enum class Family { kExponential, kWeibull, kGamma, kLognormal, kPareto, kDeterministic };

std::string_view family_name(Family family);
Family parse_family(std::string_view name);

/// A distribution requested by its first moment and squared coefficient of
/// variation (Var / mean^2).
struct DistributionSpec {
  Family family = Family::kExponential;
  double mean = 1.0;
  double scv = 1.0;

  void validate() const;
};

/// Native parameters of a family after moment matching. Only the fields that
/// belong to `family` are meaningful:
///   exponential: rate
///   weibull:     shape (alpha), scale (beta)
///   gamma:       shape, scale
///   lognormal:   location (mu of log), shape (sigma of log)
///   pareto:      shape (alpha), scale (x_m)
///   deterministic: scale (the constant)
struct ParamSet {
  Family family = Family::kExponential;
  double rate = 0.0;
  double shape = 0.0;
  double scale = 0.0;
  double location = 0.0;
};

ParamSet solve_params(const DistributionSpec& spec);

double analytic_mean(const ParamSet& params);
double analytic_scv(const ParamSet& params);

/// Inverse-CDF transform for the families that have one (exponential,
/// weibull, pareto, deterministic). Throws for gamma and lognormal.
double sample_from_uniform(const ParamSet& params, double u);

double sample(const ParamSet& params, RandomStream& rng);

/// One sample path: arrival (= generation) times and update sizes.
class Trace {
 public:
  Trace() = default;

  // Validates: nonempty, equal lengths, arrivals strictly increasing and > 0,
  // sizes > 0.
  static Trace from_samples(std::vector<double> arrivals, std::vector<double> sizes,
                            std::uint64_t seed = 0);

  std::size_t size() const noexcept { return arrivals_.size(); }
  bool empty() const noexcept { return arrivals_.empty(); }
  std::span<const double> arrivals() const noexcept { return arrivals_; }
  std::span<const double> sizes() const noexcept { return sizes_; }
  std::uint64_t seed() const noexcept { return seed_; }

  // FNV-1a over the raw bytes of arrivals then sizes.
  std::uint64_t hash() const noexcept;

  friend bool operator==(const Trace&, const Trace&) = default;

 private:
  std::vector<double> arrivals_;
  std::vector<double> sizes_;
  std::uint64_t seed_ = 0;
};

Trace generate_trace(const DistributionSpec& arrival, const DistributionSpec& size,
                     std::size_t n, std::uint64_t seed);

}  // namespace aoisim
