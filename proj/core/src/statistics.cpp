#include "blp/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace blp {

SampleSummary summarize(std::span<const double> values) {
  SampleSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.count);
  if (s.count < 2) return s;
  // Deviations are taken around the first value, so a constant sample has
  // exactly zero variance whatever the rounding of the mean.
  const double shift = values[0];
  double shifted_sum = 0.0;
  for (double v : values) shifted_sum += v - shift;
  const double shifted_mean = shifted_sum / static_cast<double>(s.count);
  double ss = 0.0;
  for (double v : values) ss += (v - shift - shifted_mean) * (v - shift - shifted_mean);
  s.variance = ss / static_cast<double>(s.count - 1);
  s.std_error = std::sqrt(s.variance / static_cast<double>(s.count));
  return s;
}

double kolmogorov_tail(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = sign * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample needs non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_tail((ne + 0.12 + 0.11 / ne) * d)};
}

}  // namespace blp
