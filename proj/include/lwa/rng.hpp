#ifndef LWA_RNG_HPP
#define LWA_RNG_HPP

#include <cstddef>
#include <cstdint>
#include <random>

namespace lwa {

/**
 * Seeded random source with platform-independent output.
 *
 * The engine is std::mt19937_64, whose output sequence is fixed by the C++
 * standard. The standard distributions are not, so the derived draws are
 * implemented here:
 *  - index(n): Lemire's nearly-divisionless bounded integer method,
 *  - uniform(): top 53 bits scaled to [0, 1),
 *  - normal(): Marsaglia polar method (caches the second variate).
 */
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n);
  /// Uniform real in [0, 1).
  double uniform();
  /// Standard normal variate.
  double normal();

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace lwa

#endif  // LWA_RNG_HPP
