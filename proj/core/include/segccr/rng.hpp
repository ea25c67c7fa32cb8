#pragma once

#include <cstdint>
#include <random>

namespace segccr {

/// Reproducible random stream keyed by (seed, stream_index). Each bootstrap or
/// Monte Carlo replicate owns its own stream, so draws never depend on the
/// order in which replicates are scheduled.
class SeededRng {
 public:
  using result_type = std::uint64_t;

  SeededRng(std::uint64_t seed, std::uint64_t stream_index);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_index() const { return stream_; }

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  double exponential();
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);

  /// Child stream for nested replication (e.g. data set r, multiplier draw j).
  SeededRng substream(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace segccr
