#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace scc {

/// Seeded random source for one chain or one simulated replicate.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Variates are produced by Boost.Random distributions, which are
/// implemented in headers and therefore identical on every platform using the
/// same Boost release. Standard-library distributions are avoided because
/// their algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  /// Gamma with the given shape and unit scale.
  double gamma(double shape);
  /// Inverse-gamma with shape/rate parameterization: 1 / Gamma(shape, rate).
  double inverse_gamma(double shape, double rate);

  /// Draws an index with probability proportional to exp(log_weights[k]).
  /// Entries equal to -inf are never selected; at least one entry must be
  /// finite.
  std::size_t categorical(std::span<const double> log_weights);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Child seed for an independent stream (a replicate, a grid point).
/// derive_seed(s, k) = splitmix64(splitmix64(s) + (k + 1) * 0x9E3779B97F4A7C15).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace scc
