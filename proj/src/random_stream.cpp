#include "hrisk/random_stream.hpp"

#include <cmath>
#include <numbers>

namespace hrisk {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// Stafford variant 13 of the splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

}  // namespace

RandomStream::RandomStream(std::uint64_t master_seed, std::span<const std::uint64_t> path)
    : k0_(mix64(master_seed + kGolden)), k1_(mix64(master_seed ^ 0x6A09E667F3BCC909ULL)) {
  for (std::uint64_t index : path) {
    *this = child(index);
  }
}

RandomStream RandomStream::child(std::uint64_t index) const {
  const std::uint64_t h = mix64(index * kGolden + 0x3C6EF372FE94F82BULL);
  return RandomStream(mix64(k0_ ^ h), mix64(k1_ + mix64(h ^ k0_)));
}

RandomStream::result_type RandomStream::next() {
  const std::uint64_t c = counter_++;
  return mix64(mix64(c * kGolden ^ k0_) + k1_);
}

double RandomStream::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

std::int64_t RandomStream::uniform_int(std::int64_t lo, std::int64_t hi) {
  const auto range = static_cast<unsigned __int128>(static_cast<std::uint64_t>(hi - lo) + 1);
  const auto scaled = (static_cast<unsigned __int128>(next()) * range) >> 64;
  return lo + static_cast<std::int64_t>(scaled);
}

double RandomStream::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

RandomStream derive_stream(std::uint64_t master_seed, std::span<const std::uint64_t> path) {
  return RandomStream(master_seed, path);
}

}  // namespace hrisk
