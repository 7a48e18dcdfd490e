#include "scc/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "scc/types.hpp"

namespace scc {

double Rng::uniform() {
  boost::random::uniform_01<double> dist;
  double u = dist(engine_);
  while (u <= 0.0) u = dist(engine_);
  return u;
}

double Rng::normal() {
  boost::random::normal_distribution<double> dist(0.0, 1.0);
  return dist(engine_);
}

double Rng::gamma(double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("gamma shape must be positive");
  boost::random::gamma_distribution<double> dist(shape, 1.0);
  return dist(engine_);
}

double Rng::inverse_gamma(double shape, double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("inverse-gamma rate must be positive");
  return rate / gamma(shape);
}

std::size_t Rng::categorical(std::span<const double> log_weights) {
  if (log_weights.empty()) throw std::invalid_argument("categorical draw needs at least one weight");
  double max_w = -std::numeric_limits<double>::infinity();
  for (double w : log_weights) {
    if (std::isnan(w)) throw NumericalError("categorical draw: NaN log weight");
    max_w = std::max(max_w, w);
  }
  if (!std::isfinite(max_w)) throw NumericalError("categorical draw: no finite log weight");

  double total = 0.0;
  for (double w : log_weights) total += std::exp(w - max_w);

  double target = uniform() * total;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < log_weights.size(); ++k) {
    const double p = std::exp(log_weights[k] - max_w);
    if (p <= 0.0) continue;
    last_positive = k;
    if (target < p) return k;
    target -= p;
  }
  // Rounding left a sliver of mass past the final bucket.
  return last_positive;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) + (stream + 1) * 0x9E3779B97F4A7C15ULL);
}

}  // namespace scc
