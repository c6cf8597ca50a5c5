#ifndef TDSTAB_RNG_HPP
#define TDSTAB_RNG_HPP

#include <cmath>
#include <cstdint>

namespace tdstab {

/// SplitMix64 generator (Steele, Lea & Flood). Counter-based: the state walks
/// a Weyl sequence and every output is a finalizer hash of the counter, so
/// streams derived from distinct (seed, replica) pairs are independent for
/// practical purposes. All arithmetic is exact 64-bit, hence results are
/// bit-identical across platforms and compilers.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(mix(seed + kGamma)) {}

  /// Independent stream for one replica of a seeded experiment.
  static SplitMix64 for_replica(std::uint64_t seed, std::uint64_t replica) {
    return SplitMix64(mix(seed) ^ mix(replica + 0x6a09e667f3bcc909ull));
  }

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix(state_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on {0, 1, ..., n-1} via rejection-free 128-bit scaling.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Log-uniform on [lo, hi), lo > 0.
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ull;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace tdstab

#endif  // TDSTAB_RNG_HPP
