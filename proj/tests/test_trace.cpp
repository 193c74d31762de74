#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "core/error.hpp"
#include "core/trace.hpp"

using namespace aoisim;

namespace {

struct Moments {
  double mean;
  double scv;
};

// Textbook moments of each family's native parameters.
Moments reference_moments(const ParamSet& p) {
  switch (p.family) {
    case Family::kExponential: return {1.0 / p.rate, 1.0};
    case Family::kWeibull: {
      const double m1 = p.scale * std::tgamma(1.0 + 1.0 / p.shape);
      const double m2 = p.scale * p.scale * std::tgamma(1.0 + 2.0 / p.shape);
      return {m1, (m2 - m1 * m1) / (m1 * m1)};
    }
    case Family::kGamma: {
      const double m = p.shape * p.scale;
      const double var = p.shape * p.scale * p.scale;
      return {m, var / (m * m)};
    }
    case Family::kLognormal: {
      const double s2 = p.shape * p.shape;
      const double m = std::exp(p.location + s2 / 2.0);
      const double var = (std::exp(s2) - 1.0) * std::exp(2.0 * p.location + s2);
      return {m, var / (m * m)};
    }
    case Family::kPareto: {
      const double a = p.shape;
      const double m = a * p.scale / (a - 1.0);
      const double var = p.scale * p.scale * a / ((a - 1.0) * (a - 1.0) * (a - 2.0));
      return {m, var / (m * m)};
    }
    case Family::kDeterministic: return {p.scale, 0.0};
  }
  return {0.0, 0.0};
}

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

struct SampleStats {
  double mean;
  double var;
};

SampleStats stats(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, ss / (n - 1.0)};
}

}  // namespace

TEST_CASE("moment matching reproduces mean and scv for every family") {
  const std::vector<double> means = {0.1, 1.0, 2.5, 100.0};
  const std::vector<double> scvs = {0.05, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0};
  for (Family family : {Family::kWeibull, Family::kGamma, Family::kLognormal, Family::kPareto}) {
    for (double mean : means) {
      for (double scv : scvs) {
        CAPTURE(family_name(family));
        CAPTURE(mean);
        CAPTURE(scv);
        const ParamSet p = solve_params({family, mean, scv});
        const Moments m = reference_moments(p);
        CHECK(rel_err(m.mean, mean) <= 1e-9);
        CHECK(rel_err(m.scv, scv) <= 1e-9);
        CHECK(rel_err(analytic_mean(p), mean) <= 1e-9);
        CHECK(rel_err(analytic_scv(p), scv) <= 1e-9);
      }
    }
  }
  for (double mean : means) {
    const Moments e = reference_moments(solve_params({Family::kExponential, mean, 1.0}));
    CHECK(rel_err(e.mean, mean) <= 1e-12);
    const Moments d = reference_moments(solve_params({Family::kDeterministic, mean, 0.0}));
    CHECK(d.mean == mean);
  }
}

TEST_CASE("closed-form parameters") {
  const ParamSet e = solve_params({Family::kExponential, 1.0, 1.0});
  CHECK(e.rate == 1.0);

  const ParamSet g = solve_params({Family::kGamma, 1.0, 10.0});
  CHECK(g.shape == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(g.scale == doctest::Approx(10.0).epsilon(1e-15));

  const ParamSet p = solve_params({Family::kPareto, 1.0, 10.0});
  CHECK(p.shape == doctest::Approx(1.0 + std::sqrt(1.1)).epsilon(1e-15));
  CHECK(p.shape == doctest::Approx(2.04881).epsilon(1e-5));
  CHECK(p.scale == doctest::Approx(0.51191).epsilon(1e-4));
}

TEST_CASE("weibull shape solves the gamma-ratio equation") {
  for (double scv : {0.1, 1.0, 10.0}) {
    const ParamSet w = solve_params({Family::kWeibull, 1.0, scv});
    const double g1 = std::tgamma(1.0 + 1.0 / w.shape);
    CHECK(rel_err(std::tgamma(1.0 + 2.0 / w.shape) / (g1 * g1), 1.0 + scv) <= 1e-9);
    CHECK(rel_err(w.scale, 1.0 / g1) <= 1e-12);
  }
  // scv 1 is the exponential case.
  CHECK(solve_params({Family::kWeibull, 1.0, 1.0}).shape == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(solve_params({Family::kWeibull, 1.0, 10.0}).shape < 1.0);
}

TEST_CASE("weibull monte carlo moments") {
  // scv 10 has a heavy fourth moment, so the variance is checked at scv 2
  // and only the mean at scv 10.
  RandomStream rng(20240611);
  {
    const ParamSet w = solve_params({Family::kWeibull, 1.0, 2.0});
    std::vector<double> xs(2000000);
    for (double& x : xs) x = sample(w, rng);
    const SampleStats s = stats(xs);
    CHECK(std::abs(s.mean - 1.0) <= 4.0 * std::sqrt(s.var / xs.size()));
    CHECK(s.var == doctest::Approx(2.0).epsilon(0.03));
  }
  {
    const ParamSet w = solve_params({Family::kWeibull, 1.0, 10.0});
    std::vector<double> xs(2000000);
    for (double& x : xs) x = sample(w, rng);
    const SampleStats s = stats(xs);
    CHECK(std::abs(s.mean - 1.0) <= 4.0 * std::sqrt(s.var / xs.size()));
  }
}

TEST_CASE("pareto sample mean within three standard errors") {
  const ParamSet p = solve_params({Family::kPareto, 1.0, 10.0});
  RandomStream rng(7);
  std::vector<double> xs(1000000);
  for (double& x : xs) x = sample(p, rng);
  const SampleStats s = stats(xs);
  CHECK(std::abs(s.mean - 1.0) <= 3.0 * std::sqrt(s.var / xs.size()));
  for (double x : xs) REQUIRE(x >= p.scale);
}

TEST_CASE("gamma and lognormal use standard library draws") {
  for (Family f : {Family::kGamma, Family::kLognormal}) {
    const ParamSet p = solve_params({f, 1.0, 0.5});
    RandomStream rng(11);
    std::vector<double> xs(500000);
    for (double& x : xs) x = sample(p, rng);
    const SampleStats s = stats(xs);
    CHECK(std::abs(s.mean - 1.0) <= 4.0 * std::sqrt(s.var / xs.size()));
    CHECK(s.var == doctest::Approx(0.5).epsilon(0.03));
    CHECK_THROWS_AS(sample_from_uniform(p, 0.5), Error);
  }
}

TEST_CASE("inverse cdf transforms") {
  const ParamSet e = solve_params({Family::kExponential, 1.0, 1.0});
  CHECK(sample_from_uniform(e, 0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-15));

  ParamSet w;
  w.family = Family::kWeibull;
  w.shape = 1.0;
  w.scale = 1.0;
  RandomStream a(99);
  RandomStream b(99);
  for (int i = 0; i < 1000; ++i) REQUIRE(sample(w, a) == sample(e, b));

  const ParamSet d = solve_params({Family::kDeterministic, 3.0, 0.0});
  CHECK(sample_from_uniform(d, 0.123) == 3.0);
}

TEST_CASE("uniforms lie strictly inside the unit interval") {
  RandomStream rng(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("sub-stream seeds differ by role") {
  CHECK(derive_seed(5, StreamRole::kArrivals) != derive_seed(5, StreamRole::kSizes));
  CHECK(derive_seed(5, StreamRole::kSizes) != derive_seed(5, StreamRole::kDecisions));
  CHECK(derive_seed(5, StreamRole::kArrivals) != derive_seed(6, StreamRole::kArrivals));
  CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
}

TEST_CASE("parameterization errors") {
  CHECK_THROWS_AS(solve_params({Family::kExponential, 1.0, 2.0}), Error);
  CHECK_THROWS_AS(solve_params({Family::kDeterministic, 1.0, 1.0}), Error);
  CHECK_THROWS_AS(solve_params({Family::kGamma, 0.0, 1.0}), Error);
  CHECK_THROWS_AS(solve_params({Family::kWeibull, 1.0, -1.0}), Error);
  try {
    solve_params({Family::kExponential, 1.0, 10.0});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParameterization);
  }
  CHECK_THROWS_AS(parse_family("cauchy"), Error);
  CHECK(parse_family("exp") == Family::kExponential);
}

TEST_CASE("trace generation is deterministic") {
  const DistributionSpec arr{Family::kExponential, 2.0, 1.0};
  const DistributionSpec size{Family::kWeibull, 1.0, 10.0};
  const Trace a = generate_trace(arr, size, 5000, 42);
  const Trace b = generate_trace(arr, size, 5000, 42);
  CHECK(a == b);
  CHECK(a.hash() == b.hash());
  CHECK(a.seed() == 42);
  const Trace c = generate_trace(arr, size, 5000, 43);
  CHECK(a.hash() != c.hash());
}

TEST_CASE("changing the size family leaves arrivals untouched") {
  const DistributionSpec arr{Family::kWeibull, 2.0, 10.0};
  const Trace a = generate_trace(arr, {Family::kExponential, 1.0, 1.0}, 3000, 8);
  const Trace b = generate_trace(arr, {Family::kPareto, 1.0, 10.0}, 3000, 8);
  CHECK(std::equal(a.arrivals().begin(), a.arrivals().end(), b.arrivals().begin()));
  CHECK_FALSE(std::equal(a.sizes().begin(), a.sizes().end(), b.sizes().begin()));
}

TEST_CASE("interarrival mean passes a CLT check") {
  const std::size_t n = 100000;
  const Trace t = generate_trace({Family::kExponential, 2.0, 1.0}, {Family::kExponential, 1.0, 1.0}, n, 3);
  std::vector<double> gaps(n);
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    gaps[i] = t.arrivals()[i] - prev;
    prev = t.arrivals()[i];
  }
  const SampleStats s = stats(gaps);
  CHECK(std::abs(s.mean - 2.0) <= 3.0 * std::sqrt(s.var / n));
}

TEST_CASE("deterministic trace") {
  const Trace t = generate_trace({Family::kDeterministic, 2.0, 0.0}, {Family::kDeterministic, 1.0, 0.0}, 3, 0);
  CHECK(std::vector<double>(t.arrivals().begin(), t.arrivals().end()) == std::vector<double>{2, 4, 6});
  CHECK(std::vector<double>(t.sizes().begin(), t.sizes().end()) == std::vector<double>{1, 1, 1});
}

TEST_CASE("arrivals strictly increase and sizes are positive for heavy tails") {
  for (Family f : {Family::kWeibull, Family::kGamma, Family::kLognormal, Family::kPareto}) {
    const Trace t = generate_trace({f, 1.0, 10.0}, {f, 1.0, 10.0}, 20000, 17);
    for (std::size_t i = 0; i < t.size(); ++i) {
      REQUIRE(t.sizes()[i] > 0.0);
      if (i > 0) REQUIRE(t.arrivals()[i] > t.arrivals()[i - 1]);
    }
    CHECK(t.arrivals()[0] > 0.0);
  }
}

TEST_CASE("trace validation") {
  try {
    generate_trace({}, {}, 0, 1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptyTrace);
  }
  CHECK_THROWS_AS(Trace::from_samples({}, {}), Error);
  CHECK_THROWS_AS(Trace::from_samples({1, 2}, {1}), Error);
  CHECK_THROWS_AS(Trace::from_samples({0, 1}, {1, 1}), Error);
  CHECK_THROWS_AS(Trace::from_samples({1, 1}, {1, 1}), Error);
  CHECK_THROWS_AS(Trace::from_samples({1, 2}, {1, 0}), Error);
  CHECK_NOTHROW(Trace::from_samples({0.5, 2}, {1, 1}));
}
