#pragma once

#include <cstdint>
#include <random>

namespace aoisim {

// Sub-stream identifiers. A trace seed fans out into one independent stream per
// role so that, e.g., swapping the size family leaves arrival times untouched.
enum class StreamRole : std::uint64_t {
  kArrivals = 1,
  kSizes = 2,
  kDecisions = 3,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Stream-splitting rule: child = splitmix64(seed + role * golden_gamma).
constexpr std::uint64_t derive_seed(std::uint64_t seed, StreamRole role) noexcept {
  return splitmix64(seed + static_cast<std::uint64_t>(role) * 0x9E3779B97F4A7C15ULL);
}

class RandomStream {
 public:
  using engine_type = std::mt19937_64;

  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
  RandomStream(std::uint64_t seed, StreamRole role) : engine_(derive_seed(seed, role)) {}

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  engine_type& engine() noexcept { return engine_; }

  friend bool operator==(const RandomStream&, const RandomStream&) = default;

 private:
  engine_type engine_;
};

}  // namespace aoisim
