#include "core/trace.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "core/error.hpp"

namespace aoisim {

namespace {

constexpr double kWeibullShapeLo = 0.05;
constexpr double kWeibullShapeHi = 50.0;
constexpr double kWeibullRatioTol = 1e-12;
constexpr double kExponentialScvTol = 1e-12;

// Gamma(1 + 2/a) / Gamma(1 + 1/a)^2, strictly decreasing in a.
double weibull_moment_ratio(double shape) {
  return std::exp(std::lgamma(1.0 + 2.0 / shape) - 2.0 * std::lgamma(1.0 + 1.0 / shape));
}

double solve_weibull_shape(double scv) {
  const double target = 1.0 + scv;
  double lo = kWeibullShapeLo;
  double hi = kWeibullShapeHi;
  if (weibull_moment_ratio(lo) < target || weibull_moment_ratio(hi) > target) {
    throw Error(ErrorCode::kParameterization,
                "weibull: scv " + std::to_string(scv) + " outside the solvable shape range");
  }
  // Bisect until the bracket stops shrinking, then keep the better endpoint.
  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double r = weibull_moment_ratio(mid);
    if (r == target) return mid;
    if (r > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double rlo = std::abs(weibull_moment_ratio(lo) - target);
  const double rhi = std::abs(weibull_moment_ratio(hi) - target);
  const double best = rlo <= rhi ? lo : hi;
  if (std::min(rlo, rhi) > kWeibullRatioTol * target) {
    throw Error(ErrorCode::kParameterization, "weibull: shape bisection did not converge");
  }
  return best;
}

double draw_positive(const ParamSet& params, RandomStream& rng) {
  // Gamma with a small shape can underflow to zero; sizes must stay positive.
  for (;;) {
    const double x = sample(params, rng);
    if (x > 0.0) return x;
  }
}

}  // namespace

std::string_view family_name(Family family) {
  switch (family) {
    case Family::kExponential: return "exponential";
    case Family::kWeibull: return "weibull";
    case Family::kGamma: return "gamma";
    case Family::kLognormal: return "lognormal";
    case Family::kPareto: return "pareto";
    case Family::kDeterministic: return "deterministic";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "exponential" || name == "exp") return Family::kExponential;
  if (name == "weibull") return Family::kWeibull;
  if (name == "gamma") return Family::kGamma;
  if (name == "lognormal") return Family::kLognormal;
  if (name == "pareto") return Family::kPareto;
  if (name == "deterministic") return Family::kDeterministic;
  throw Error(ErrorCode::kConfig, "unknown distribution family '" + std::string(name) + "'");
}

void DistributionSpec::validate() const {
  const std::string fam(family_name(family));
  if (!(mean > 0.0) || !std::isfinite(mean)) {
    throw Error(ErrorCode::kParameterization, fam + ": mean must be positive and finite");
  }
  if (!(scv >= 0.0) || !std::isfinite(scv)) {
    throw Error(ErrorCode::kParameterization, fam + ": scv must be nonnegative and finite");
  }
  if (family == Family::kDeterministic) {
    if (scv != 0.0) throw Error(ErrorCode::kParameterization, "deterministic: scv must be 0");
    return;
  }
  if (scv == 0.0) throw Error(ErrorCode::kParameterization, fam + ": scv must be positive");
  if (family == Family::kExponential && std::abs(scv - 1.0) > kExponentialScvTol) {
    throw Error(ErrorCode::kParameterization,
                "exponential: scv is fixed at 1, got " + std::to_string(scv));
  }
}

ParamSet solve_params(const DistributionSpec& spec) {
  spec.validate();
  ParamSet p;
  p.family = spec.family;
  switch (spec.family) {
    case Family::kExponential:
      p.rate = 1.0 / spec.mean;
      break;
    case Family::kWeibull:
      p.shape = solve_weibull_shape(spec.scv);
      p.scale = spec.mean / std::tgamma(1.0 + 1.0 / p.shape);
      break;
    case Family::kGamma:
      p.shape = 1.0 / spec.scv;
      p.scale = spec.mean * spec.scv;
      break;
    case Family::kLognormal: {
      const double var_log = std::log1p(spec.scv);
      p.shape = std::sqrt(var_log);
      p.location = std::log(spec.mean) - 0.5 * var_log;
      break;
    }
    case Family::kPareto:
      // alpha^2 - 2 alpha - 1/scv = 0, positive root; always > 2.
      p.shape = 1.0 + std::sqrt(1.0 + 1.0 / spec.scv);
      p.scale = spec.mean * (p.shape - 1.0) / p.shape;
      break;
    case Family::kDeterministic:
      p.scale = spec.mean;
      break;
  }
  return p;
}

double analytic_mean(const ParamSet& p) {
  switch (p.family) {
    case Family::kExponential: return 1.0 / p.rate;
    case Family::kWeibull: return p.scale * std::tgamma(1.0 + 1.0 / p.shape);
    case Family::kGamma: return p.shape * p.scale;
    case Family::kLognormal: return std::exp(p.location + 0.5 * p.shape * p.shape);
    case Family::kPareto: return p.shape * p.scale / (p.shape - 1.0);
    case Family::kDeterministic: return p.scale;
  }
  return 0.0;
}

double analytic_scv(const ParamSet& p) {
  switch (p.family) {
    case Family::kExponential: return 1.0;
    case Family::kWeibull: {
      const double g1 = std::tgamma(1.0 + 1.0 / p.shape);
      return std::tgamma(1.0 + 2.0 / p.shape) / (g1 * g1) - 1.0;
    }
    case Family::kGamma: return 1.0 / p.shape;
    case Family::kLognormal: return std::expm1(p.shape * p.shape);
    case Family::kPareto: return 1.0 / (p.shape * (p.shape - 2.0));
    case Family::kDeterministic: return 0.0;
  }
  return 0.0;
}

double sample_from_uniform(const ParamSet& p, double u) {
  // -log(1 - u) without cancellation near u = 0
  const double e = -std::log1p(-u);
  switch (p.family) {
    case Family::kExponential: return e / p.rate;
    case Family::kWeibull: return p.scale * std::pow(e, 1.0 / p.shape);
    case Family::kPareto: return p.scale * std::exp(e / p.shape);
    case Family::kDeterministic: return p.scale;
    case Family::kGamma:
    case Family::kLognormal: break;
  }
  throw Error(ErrorCode::kInvalidArgument,
              std::string(family_name(p.family)) + " has no closed-form inverse CDF");
}

double sample(const ParamSet& p, RandomStream& rng) {
  switch (p.family) {
    case Family::kGamma:
      return std::gamma_distribution<double>(p.shape, p.scale)(rng.engine());
    case Family::kLognormal:
      return std::lognormal_distribution<double>(p.location, p.shape)(rng.engine());
    case Family::kDeterministic:
      return p.scale;
    default:
      return sample_from_uniform(p, rng.uniform());
  }
}

Trace Trace::from_samples(std::vector<double> arrivals, std::vector<double> sizes,
                          std::uint64_t seed) {
  if (arrivals.empty()) throw Error(ErrorCode::kEmptyTrace, "trace has no updates");
  if (arrivals.size() != sizes.size()) {
    throw Error(ErrorCode::kInvalidArgument, "trace arrivals and sizes differ in length");
  }
  for (std::size_t i = 0; i < arrivals.size(); ++i) {
    if (!(arrivals[i] > 0.0) || !std::isfinite(arrivals[i])) {
      throw Error(ErrorCode::kInvalidArgument, "trace arrival times must be positive");
    }
    if (i > 0 && !(arrivals[i] > arrivals[i - 1])) {
      throw Error(ErrorCode::kInvalidArgument, "trace arrival times must strictly increase");
    }
    if (!(sizes[i] > 0.0) || !std::isfinite(sizes[i])) {
      throw Error(ErrorCode::kInvalidArgument, "trace sizes must be positive");
    }
  }
  Trace t;
  t.arrivals_ = std::move(arrivals);
  t.sizes_ = std::move(sizes);
  t.seed_ = seed;
  return t;
}

std::uint64_t Trace::hash() const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::span<const double> values) {
    for (double v : values) {
      unsigned char bytes[sizeof(double)];
      std::memcpy(bytes, &v, sizeof(double));
      for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
      }
    }
  };
  mix(arrivals_);
  mix(sizes_);
  return h;
}

Trace generate_trace(const DistributionSpec& arrival, const DistributionSpec& size,
                     std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::kEmptyTrace, "trace length must be at least 1");
  const ParamSet arrival_params = solve_params(arrival);
  const ParamSet size_params = solve_params(size);

  RandomStream arrival_rng(seed, StreamRole::kArrivals);
  RandomStream size_rng(seed, StreamRole::kSizes);

  std::vector<double> arrivals(n);
  std::vector<double> sizes(n);
  double clock = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double next = clock + draw_positive(arrival_params, arrival_rng);
    // A vanishing interarrival can be absorbed by rounding; keep arrivals strict.
    if (!(next > clock)) next = std::nextafter(clock, std::numeric_limits<double>::infinity());
    arrivals[i] = clock = next;
  }
  for (std::size_t i = 0; i < n; ++i) sizes[i] = draw_positive(size_params, size_rng);
  return Trace::from_samples(std::move(arrivals), std::move(sizes), seed);
}

}  // namespace aoisim
