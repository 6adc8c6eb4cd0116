#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "blp/levy_measure.hpp"
#include "blp/simulator.hpp"
#include "blp/statistics.hpp"

namespace blp {

struct VerifyOptions {
  std::size_t replicas = 100'000;
  std::uint64_t seed = 1;
  double k = 3.0;  ///< pass threshold in standard errors
  unsigned threads = 0;
  std::size_t max_particles = 1'000'000;
};

/// Monte Carlo estimate against a target. Real and imaginary parts carry
/// separate standard errors and z-scores; real-valued checks leave the
/// imaginary fields at 0. For two-sided Monte Carlo checks the target is the
/// right-hand estimate and the standard error combines both sides.
struct EstimatorReport {
  std::string check;
  std::string parameters;
  std::complex<double> estimate;
  std::complex<double> target;
  double se_re = 0.0;
  double se_im = 0.0;
  double z_re = 0.0;
  double z_im = 0.0;
  std::size_t n_replicas = 0;
  double k = 3.0;
  bool complex_valued = false;
  bool pass = false;
};

/// (estimate - target) / se. A zero standard error gives z = 0 when the
/// difference is within rounding of the target and +-inf otherwise.
double z_score(double estimate, double target, double se);

/// Fills z-scores and the pass flag from the other fields.
void finalize(EstimatorReport& report);

std::string report_csv_header();
std::string to_csv_row(const EstimatorReport& report);

/// Spine motion for the exponential tilt at theta: Gaussian part sigma2,
/// drift followed between jumps equal to the motion's plus sigma2 * theta,
/// and Levy measure e^{theta x} nu(dx) + beta sum_o p_o sum_i e^{theta x_i}
/// delta_{x_i} with atoms at 0 dropped. Its exponent is
/// cumulant(theta + z) - cumulant(theta). Uniform motion jumps can only be
/// tilted at theta = 0.
MotionSpec spine_motion(const FiniteBirthParams& params, Theta theta);

/// exp(t * cumulant(z)).
std::complex<double> cumulant_target(const FiniteBirthParams& params, double t, std::complex<double> z);

/// Closed-form right side of the many-to-one formula for f = e_w:
/// e^{t kappa(theta)} E e^{(w - theta) xi_t}, evaluated through the spine.
std::complex<double> many_to_one_exponential_target(const FiniteBirthParams& params, double t,
                                                    Theta theta, std::complex<double> w);

using PointFunction = std::function<double(double)>;
using PathFunctional = std::function<double(std::span<const double>)>;

/// E <Z_t, e_z> against exp(t kappa(z)).
EstimatorReport check_cumulant(const FiniteBirthParams& params, double t, std::complex<double> z,
                               const VerifyOptions& opts);

/// E <Z_t, f> against E e^{-theta xi_t + t kappa(theta)} f(xi_t).
EstimatorReport check_many_to_one(const FiniteBirthParams& params, double t, Theta theta,
                                  const PointFunction& f, const VerifyOptions& opts);

/// Sum of F over the ancestral paths of the particles alive at t, sampled on
/// `grid` (increasing, within (0, t]), against the spine path on the same grid.
EstimatorReport check_pathwise_many_to_one(const FiniteBirthParams& params, double t, Theta theta,
                                           const std::vector<double>& grid, const PathFunctional& F,
                                           const VerifyOptions& opts);

/// E e^{-t kappa(theta + ir)} <Z_t, e_{theta + ir}> against 1.
EstimatorReport check_martingale_normalization(const FiniteBirthParams& params, double t, double r,
                                               Theta theta, const VerifyOptions& opts);

/// Mean population of the forest simulated at `top_level` and censored at n,
/// against e^{t kappa(theta)} E[e^{-theta xi_t}; t < T] for the spine with
/// jumps <= -n turned into killing.
EstimatorReport check_censored_mass(const CharacteristicTriple& triple, double top_level, double n,
                                    double t, const VerifyOptions& opts);

/// e^{-kappa(theta)} E <Z_1, e_theta f> against E f(xi_1).
EstimatorReport weighted_intensity(const FiniteBirthParams& params, Theta theta, const PointFunction& f,
                                   const VerifyOptions& opts);

/// e^{-kappa(theta)} E <Z_1, e_{theta + ir}> against exp(kappa(theta + ir) - kappa(theta)).
EstimatorReport weighted_intensity_fourier(const FiniteBirthParams& params, Theta theta, double r,
                                           const VerifyOptions& opts);

/// Empirical E e^{i r xi_t} of the spine against exp(t (kappa(theta + ir) - kappa(theta))).
EstimatorReport check_spine_characteristic(const FiniteBirthParams& params, Theta theta, double t,
                                           double r, const VerifyOptions& opts);

struct LevelSweep {
  std::vector<double> levels;
  std::vector<EstimatorReport> reports;  ///< E <Z^(n)_t, e_theta> against exp(t kappa^(n)(theta))
  bool replicas_monotone = true;         ///< every coupled replica non-decreasing in n
  bool means_monotone = true;
};

LevelSweep cumulant_over_levels(const CharacteristicTriple& triple, std::vector<double> levels, double t,
                                const VerifyOptions& opts);

struct BranchingPropertyResult {
  KsResult ks;
  double alpha = 0.01;
  std::size_t n = 0;
  bool pass = false;
};

/// Two-sample KS test of <Z_{s+t}, e_theta> simulated directly against
/// sum_k e^{theta x_k} <Z^k_t, e_theta> built from a Z_s draw.
BranchingPropertyResult check_branching_property(const FiniteBirthParams& params, Theta theta, double s,
                                                 double t, std::size_t n, std::uint64_t seed,
                                                 double alpha = 0.01, unsigned threads = 0,
                                                 std::size_t max_particles = 1'000'000);

}  // namespace blp
