#include "blp/point_measure.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <limits>

namespace blp {

Theta::Theta(double value) : value_(value) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument("theta must be a finite non-negative real");
  }
}

RankedPointMeasure::RankedPointMeasure(std::vector<double> atoms) {
  std::erase_if(atoms, [](double x) { return x == -std::numeric_limits<double>::infinity(); });
  for (double x : atoms) {
    if (std::isnan(x) || std::isinf(x)) {
      throw std::invalid_argument("point measure atoms must be finite or -inf");
    }
  }
  std::stable_sort(atoms.begin(), atoms.end(), std::greater<>());
  atoms_ = std::move(atoms);
}

std::size_t RankedPointMeasure::tail_count(double x) const noexcept {
  // atoms_ is non-increasing: count the prefix with atoms > x.
  auto it = std::partition_point(atoms_.begin(), atoms_.end(), [x](double a) { return a > x; });
  return static_cast<std::size_t>(it - atoms_.begin());
}

bool RankedPointMeasure::included_in(const RankedPointMeasure& other) const noexcept {
  std::size_t j = 0;
  for (double x : atoms_) {
    while (j < other.atoms_.size() && other.atoms_[j] > x) ++j;
    if (j == other.atoms_.size() || other.atoms_[j] != x) return false;
    ++j;
  }
  return true;
}

RankedPointMeasure translate(const RankedPointMeasure& mu, double y) {
  if (std::isnan(y) || y == std::numeric_limits<double>::infinity()) {
    throw std::invalid_argument("translate: shift must be real or -inf");
  }
  if (y == -std::numeric_limits<double>::infinity()) return {};
  std::vector<double> shifted(mu.atoms_.begin(), mu.atoms_.end());
  for (double& x : shifted) x += y;
  // Shifting preserves order; re-ranking is not needed.
  return RankedPointMeasure(RankedPointMeasure::Ranked{}, std::move(shifted));
}

RankedPointMeasure truncate(const RankedPointMeasure& mu, double level) {
  if (!(level > 0.0)) throw std::invalid_argument("truncate: level must be positive");
  std::vector<double> kept;
  kept.reserve(mu.atoms_.size());
  for (double x : mu.atoms_) {
    if (x < -level) break;
    kept.push_back(x);
  }
  return RankedPointMeasure(RankedPointMeasure::Ranked{}, std::move(kept));
}

RankedPointMeasure superpose(std::span<const RankedPointMeasure> measures) {
  std::vector<double> all;
  std::size_t total = 0;
  for (const auto& m : measures) total += m.size();
  all.reserve(total);
  for (const auto& m : measures) all.insert(all.end(), m.atoms().begin(), m.atoms().end());
  return RankedPointMeasure(std::move(all));
}

RankedPointMeasure superpose(const RankedPointMeasure& a, const RankedPointMeasure& b) {
  const RankedPointMeasure pair[] = {a, b};
  return superpose(std::span<const RankedPointMeasure>(pair));
}

std::complex<double> exponential_integral(const RankedPointMeasure& mu, std::complex<double> z) {
  std::complex<double> sum = 0.0;
  for (double x : mu.atoms()) sum += std::exp(z * x);
  return sum;
}

std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_csv_line(const RankedPointMeasure& mu) {
  std::string line;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (i) line += ',';
    line += format_real(mu[i]);
  }
  return line;
}

RankedPointMeasure from_csv_line(std::string_view line) {
  std::vector<double> atoms;
  if (line.empty()) return {};
  std::size_t start = 0;
  while (start <= line.size()) {
    std::size_t end = line.find(',', start);
    if (end == std::string_view::npos) end = line.size();
    std::string field(line.substr(start, end - start));
    char* parsed_end = nullptr;
    const double value = std::strtod(field.c_str(), &parsed_end);
    if (field.empty() || parsed_end != field.c_str() + field.size()) {
      throw std::invalid_argument("from_csv_line: malformed atom '" + field + "'");
    }
    atoms.push_back(value);
    start = end + 1;
  }
  return RankedPointMeasure(std::move(atoms));
}

}  // namespace blp
