#include "blp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace blp {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

RandomStream::RandomStream(std::uint64_t seed) : engine_(mix64(seed)) {}

double RandomStream::uniform() {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::exponential(double rate) {
  if (rate < 0.0 || std::isnan(rate)) throw std::invalid_argument("exponential: negative rate");
  if (rate == 0.0) return std::numeric_limits<double>::infinity();
  return -std::log(uniform()) / rate;
}

double RandomStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * m;
  has_spare_ = true;
  return u * m;
}

std::size_t RandomStream::discrete(std::span<const double> cumulative_weights) {
  if (cumulative_weights.empty()) throw std::invalid_argument("discrete: no outcomes");
  const double total = cumulative_weights.back();
  const double u = uniform() * total;
  auto it = std::upper_bound(cumulative_weights.begin(), cumulative_weights.end(), u);
  if (it == cumulative_weights.end()) --it;
  return static_cast<std::size_t>(it - cumulative_weights.begin());
}

}  // namespace blp
