#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace blp {

/// Raised when an exponentially weighted sum leaves the double range.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Non-negative exponent of the weight function x -> exp(theta * x).
class Theta {
 public:
  constexpr Theta() = default;
  explicit Theta(double value);

  [[nodiscard]] double value() const noexcept { return value_; }
  friend bool operator==(const Theta&, const Theta&) = default;

 private:
  double value_ = 0.0;
};

/// A finite point measure on [-inf, inf) stored as its ranked
/// (non-increasing) atom sequence. Atoms at -inf are the cemetery and are
/// never stored; the empty sequence is the zero measure.
class RankedPointMeasure {
 public:
  RankedPointMeasure() = default;

  /// Ranks the given atoms. Atoms equal to -inf are dropped; NaN or +inf
  /// atoms are rejected. Equal atoms keep their insertion order.
  explicit RankedPointMeasure(std::vector<double> atoms);
  RankedPointMeasure(std::initializer_list<double> atoms)
      : RankedPointMeasure(std::vector<double>(atoms)) {}

  static RankedPointMeasure dirac(double x) { return RankedPointMeasure({x}); }

  [[nodiscard]] std::span<const double> atoms() const noexcept { return atoms_; }
  [[nodiscard]] std::size_t size() const noexcept { return atoms_.size(); }
  [[nodiscard]] bool empty() const noexcept { return atoms_.empty(); }
  [[nodiscard]] double operator[](std::size_t i) const { return atoms_[i]; }
  [[nodiscard]] double largest() const { return atoms_.at(0); }

  /// Number of atoms strictly above x.
  [[nodiscard]] std::size_t tail_count(double x) const noexcept;

  /// True when every atom of this measure appears in `other` with at least
  /// the same multiplicity (exact comparison).
  [[nodiscard]] bool included_in(const RankedPointMeasure& other) const noexcept;

  friend bool operator==(const RankedPointMeasure&, const RankedPointMeasure&) = default;

 private:
  struct Ranked {};
  RankedPointMeasure(Ranked, std::vector<double> atoms) : atoms_(std::move(atoms)) {}
  friend RankedPointMeasure translate(const RankedPointMeasure&, double);
  friend RankedPointMeasure truncate(const RankedPointMeasure&, double);

  std::vector<double> atoms_;
};

/// Shifts every atom by y. y = -inf sends the whole measure to the cemetery.
RankedPointMeasure translate(const RankedPointMeasure& mu, double y);

/// Restriction to [-level, inf); atoms exactly at -level are kept.
RankedPointMeasure truncate(const RankedPointMeasure& mu, double level);

/// Multiset union, re-ranked.
RankedPointMeasure superpose(std::span<const RankedPointMeasure> measures);
RankedPointMeasure superpose(const RankedPointMeasure& a, const RankedPointMeasure& b);

/// <mu, e_z> = sum_i exp(z * x_i) for complex z.
std::complex<double> exponential_integral(const RankedPointMeasure& mu, std::complex<double> z);

/// <mu, e_theta f> = sum_i exp(theta * x_i) f(x_i). Throws OverflowError when
/// the result is not finite.
template <class F>
double weighted_integral(const RankedPointMeasure& mu, Theta theta, F&& f) {
  double sum = 0.0;
  for (double x : mu.atoms()) sum += std::exp(theta.value() * x) * f(x);
  if (!std::isfinite(sum)) throw OverflowError("weighted_integral: non-finite result");
  return sum;
}

/// One measure per line: atoms as decimal reals separated by commas, an empty
/// line for the zero measure. Values round-trip exactly.
std::string to_csv_line(const RankedPointMeasure& mu);
RankedPointMeasure from_csv_line(std::string_view line);

/// Shortest "%.17g" rendering of a double, shared by every text writer.
std::string format_real(double x);

}  // namespace blp
