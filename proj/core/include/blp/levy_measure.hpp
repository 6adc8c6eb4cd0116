#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "blp/levy_kernel.hpp"
#include "blp/point_measure.hpp"
#include "blp/rng.hpp"

namespace blp {

/// A single atom of the branching Levy measure: `weight` times the Dirac mass
/// at the point measure `measure`.
struct LambdaComponent {
  double weight = 0.0;
  RankedPointMeasure measure;
};

/// Countable family of components indexed by k = 1, 2, ...: the k-th
/// component has weight base_weight * ratio^k and measure k * atom_template.
/// Because the integrands become exact geometric sequences in k, every series
/// over a cascade has a closed-form tail.
struct GeometricCascade {
  double base_weight = 1.0;
  double ratio = 0.5;
  RankedPointMeasure atom_template;

  [[nodiscard]] double weight(std::size_t k) const;
  [[nodiscard]] RankedPointMeasure measure(std::size_t k) const;
};

/// Discrete branching Levy measure: finitely many explicit components plus
/// geometric cascades. `declared_levels`, when non-empty, restricts the
/// truncation levels accepted by `truncate_lambda` and `decompose`.
struct LambdaSpec {
  std::vector<LambdaComponent> components;
  std::vector<GeometricCascade> cascades;
  std::vector<double> declared_levels;

  /// Rejects non-positive or non-finite weights and any component equal to
  /// the single atom {0}.
  void validate() const;
  [[nodiscard]] bool finite() const noexcept { return cascades.empty(); }
  [[nodiscard]] bool empty() const noexcept { return components.empty() && cascades.empty(); }
};

struct CharacteristicTriple {
  double sigma2 = 0.0;
  double a = 0.0;
  LambdaSpec lambda;
  Theta theta;

  void validate() const;
};

struct OffspringOutcome {
  double rate = 0.0;
  RankedPointMeasure displacements;
};

/// Offspring law rho stored as unnormalized rates; probabilities are
/// rate / total_rate(). An empty law stands for the point mass at the empty
/// measure.
class OffspringLaw {
 public:
  OffspringLaw() = default;
  explicit OffspringLaw(std::vector<OffspringOutcome> outcomes);

  [[nodiscard]] const std::vector<OffspringOutcome>& outcomes() const noexcept { return outcomes_; }
  [[nodiscard]] double total_rate() const noexcept { return total_; }
  [[nodiscard]] double probability(std::size_t i) const { return outcomes_.at(i).rate / total_; }
  [[nodiscard]] double mean_count() const;
  [[nodiscard]] bool empty() const noexcept { return outcomes_.empty(); }

  /// Draws one outcome; an empty law returns the empty measure.
  const RankedPointMeasure& sample(RandomStream& rng) const;

 private:
  std::vector<OffspringOutcome> outcomes_;
  std::vector<double> cumulative_;
  double total_ = 0.0;
};

/// Finite-birth parameters: particles move by `motion`, reproduce at rate
/// `beta`, and are replaced by their offspring displaced according to `rho`.
struct FiniteBirthParams {
  MotionSpec motion;
  double beta = 0.0;
  OffspringLaw rho;

  /// Checks the motion, beta >= 0, that rho has no single-atom outcome, and
  /// that beta = 0 goes with an empty law or one concentrated on the empty
  /// measure.
  void validate() const;
};

struct SeriesOptions {
  double rel_tol = 1e-10;
  std::size_t max_terms = 1'000'000;
};

enum class SeriesStatus { Converged, Divergent, Unknown };
enum class Verdict { Pass, Fail, Unknown };

const char* to_string(SeriesStatus s) noexcept;
const char* to_string(Verdict v) noexcept;

struct SeriesResult {
  std::complex<double> value = 0.0;
  SeriesStatus status = SeriesStatus::Converged;
  double tail_bound = 0.0;
  std::size_t explicit_terms = 0;
};

/// Raised when a series is required to converge but is divergent or cannot
/// be certified within the term budget.
class SeriesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lambda^(n): every component truncated at level n, components that become
/// the single atom {0} dropped. Cascade terms beyond the last one keeping a
/// negative atom are merged into a single component. Throws on undeclared
/// levels, cascades with positive template atoms, and divergent merged tails.
LambdaSpec truncate_lambda(const LambdaSpec& lambda, double n, const SeriesOptions& opts = {});

/// Finite-birth parameters of the truncated process at level n.
FiniteBirthParams decompose(const CharacteristicTriple& triple, double n,
                            const SeriesOptions& opts = {});

/// Inverse of `decompose` for point-mass motion jumps.
CharacteristicTriple reassemble(const FiniteBirthParams& params, Theta theta);

/// Cumulant series; `status` reports convergence.
SeriesResult kappa_series(const CharacteristicTriple& triple, std::complex<double> z,
                          const SeriesOptions& opts = {});

/// Cumulant kappa(z). Throws SeriesError unless the series is certified.
std::complex<double> kappa(const CharacteristicTriple& triple, std::complex<double> z,
                           const SeriesOptions& opts = {});

/// Cumulant of the process truncated at level n.
std::complex<double> kappa_truncated(const CharacteristicTriple& triple, double n,
                                     std::complex<double> z, const SeriesOptions& opts = {});

/// kappa(theta) - kappa^(n)(theta).
double kappa_gap(const CharacteristicTriple& triple, double n, const SeriesOptions& opts = {});

/// Cumulant of finite-birth parameters:
///   levy_exponent(motion, z) + beta * sum p_o (<mu_o, e_z> - 1) - kill_rate.
std::complex<double> cumulant(const FiniteBirthParams& params, std::complex<double> z);

struct IntegralCheck {
  Verdict verdict = Verdict::Pass;
  double value = 0.0;
  double tail_bound = 0.0;
};

struct AdmissibilityReport {
  IntegralCheck small_jumps;   ///< int (1 ^ x1^2) dLambda, with Lambda({0}) = 0
  IntegralCheck large_first;   ///< int 1_{x1 > 1} e^{theta x1} dLambda
  IntegralCheck offspring;     ///< int sum_{k>=2} e^{theta x_k} dLambda

  [[nodiscard]] Verdict overall() const noexcept;
};

AdmissibilityReport check_admissible(const CharacteristicTriple& triple,
                                     const SeriesOptions& opts = {});

/// Bound |f(x)| <= constant + slope * |x|, needed to certify tails over
/// cascades.
struct Envelope {
  double constant = 0.0;
  double slope = 0.0;
};

/// int f dlambda where lambda(dx) = int sum_i e^{theta x_i} delta_{x_i}(dx) Lambda
/// on the reals without 0. Finite measures need no envelope; cascades without one
/// report Unknown.
SeriesResult projected_levy_measure_integral(const CharacteristicTriple& triple,
                                             const std::function<double(double)>& f,
                                             std::optional<Envelope> envelope = std::nullopt,
                                             const SeriesOptions& opts = {});

struct SupportReport {
  Verdict no_upward_part = Verdict::Pass;     ///< sigma2 = 0 and Lambda(x1 > 0) = 0
  Verdict finite_variation = Verdict::Pass;   ///< int (1 ^ |x1|) dLambda < inf
  Verdict nonpositive_drift = Verdict::Pass;  ///< drift_value <= 0
  double positive_mass = 0.0;
  double variation_value = 0.0;
  /// a - int x1 1_{|x1|<1} dLambda: the drift followed between events.
  double drift_value = 0.0;

  [[nodiscard]] Verdict overall() const noexcept;
};

/// Sufficient condition for the population to stay in (-inf, 0].
SupportReport check_support_negative(const CharacteristicTriple& triple,
                                     const SeriesOptions& opts = {});

}  // namespace blp
