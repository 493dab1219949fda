#ifndef CRIBSE_RNG_HPP
#define CRIBSE_RNG_HPP

#include <cstdint>
#include <random>

#include "cribse/types.hpp"

namespace cribse {

/// Seeded random stream with engine-defined (not library-defined) variate
/// recipes, so identical seeds give identical draws on every platform.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// Parallel trials use one stream each: stream for trial i is derive(i),
  /// i.e. the base seed XOR the trial index.
  RandomStream derive(std::uint64_t salt) const { return RandomStream(seed_ ^ salt); }

  /// Uniform on [0,1) with 53 random bits.
  double uniform();

  /// Uniform on (0,1]; safe as a log() argument.
  double uniform_pos();

  /// Standard normal via Box-Muller.
  double normal();

  /// Circular complex normal, E|z|^2 = 1.
  Complex circular_normal();

  /// Gamma(shape, scale 1) by Marsaglia-Tsang squeeze, boosted to shape >= 1
  /// with the u^(1/shape) reduction; valid for every shape > 0.
  double gamma(double shape);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace cribse

#endif
