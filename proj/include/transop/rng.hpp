#pragma once

#include <cstdint>
#include <random>

namespace transop {

/// Named, seedable, splittable generator. Every independent unit of work
/// (a burst, a k-means restart) draws from stream(seed, index), so results do
/// not depend on how work is scheduled across threads.
class Rng {
 public:
  using engine_type = std::mt19937_64;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  static Rng stream(std::uint64_t seed, std::uint64_t index) { return Rng(seed, index); }

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  engine_type& engine() { return engine_; }

 private:
  engine_type engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Stream tags so different consumers of the same user seed never overlap.
namespace stream_tag {
inline constexpr std::uint64_t trajectory = 0x7472616a00000000ULL;
inline constexpr std::uint64_t burst = 0x6275727300000000ULL;
inline constexpr std::uint64_t kmeans = 0x6b6d656100000000ULL;
inline constexpr std::uint64_t property = 0x70726f7000000000ULL;
}  // namespace stream_tag

}  // namespace transop
