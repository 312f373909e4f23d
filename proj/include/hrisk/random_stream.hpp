#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>

namespace hrisk {

/// Counter-based random stream addressed by (master_seed, stream_path).
///
/// The n-th draw of a stream is a pure function of its key and n, so any
/// substream can be reproduced on any thread without replaying its
/// siblings. child(i) derives an independent substream; derive_stream()
/// folds a whole path at once. Satisfies UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t master_seed, std::span<const std::uint64_t> path);
  RandomStream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> path)
      : RandomStream(master_seed, std::span<const std::uint64_t>(path.begin(), path.size())) {}

  [[nodiscard]] RandomStream child(std::uint64_t index) const;

  result_type next();
  result_type operator()() { return next(); }
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  /// Uniform on [0, 1) with 53 random bits. One draw.
  double uniform();
  /// Uniform on [lo, hi). One draw.
  double uniform(double lo, double hi);
  /// Uniform integer on {lo, ..., hi}. One draw.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Standard normal via Box-Muller. Always two draws.
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  [[nodiscard]] std::uint64_t draws_consumed() const { return counter_; }

 private:
  RandomStream(std::uint64_t k0, std::uint64_t k1) : k0_(k0), k1_(k1) {}

  std::uint64_t k0_;
  std::uint64_t k1_;
  std::uint64_t counter_ = 0;
};

RandomStream derive_stream(std::uint64_t master_seed, std::span<const std::uint64_t> path);

}  // namespace hrisk
