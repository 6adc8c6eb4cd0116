#pragma once

#include <complex>
#include <limits>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "blp/rng.hpp"

namespace blp {

/// Jump of fixed size.
struct PointMassJump {
  double position = 0.0;
};

/// Jump size uniform on (low, high).
struct UniformJump {
  double low = 0.0;
  double high = 1.0;
};

/// Jump size sign * E with E ~ Exp(rate) conditioned on E < cap.
struct ExponentialJump {
  double sign = 1.0;
  double rate = 1.0;
  double cap = std::numeric_limits<double>::infinity();
};

using JumpLaw = std::variant<PointMassJump, UniformJump, ExponentialJump>;

/// A finite-rate slice of the Levy measure: `rate` jumps per unit time, sizes
/// drawn from `law`.
struct JumpComponent {
  double rate = 0.0;
  JumpLaw law;
};

/// Killed Levy motion of a single particle with finite jump activity.
///
/// `drift` is the Levy-Khintchine drift a' of the exponent
///   Phi(r) = -sigma2/2 r^2 + i a' r + int (e^{irx} - 1 - i r x 1_{|x|<1}) nu(dx),
/// so the drift actually followed between jumps is `effective_drift()`, which
/// removes the compensator of the small jumps. `kill_rate` is applied on top
/// and is not part of Phi.
struct MotionSpec {
  double sigma2 = 0.0;
  double drift = 0.0;
  std::vector<JumpComponent> jumps;
  double kill_rate = 0.0;

  void validate() const;
  [[nodiscard]] double total_jump_rate() const;
  [[nodiscard]] double effective_drift() const;
  [[nodiscard]] bool gaussian() const noexcept { return sigma2 > 0.0; }
};

struct JumpEvent {
  double offset = 0.0;  ///< time since the start of the sampled interval
  double size = 0.0;
};

/// Sampled trajectory of a killed Levy motion started at 0. `times`/`values`
/// hold the post-event position at every jump and requested observation
/// offset; nothing is recorded at or after `killed_at`.
struct PathSample {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<JumpEvent> jumps;
  std::optional<double> killed_at;
  double killed_value = 0.0;  ///< position just before the kill

  [[nodiscard]] double final_value() const { return values.empty() ? 0.0 : values.back(); }
};

struct Increment {
  double increment = 0.0;
  std::vector<JumpEvent> jumps;
  std::optional<double> killed;
};

// Per-law primitives.
std::complex<double> jump_mgf(const JumpLaw& law, std::complex<double> z);  ///< E exp(zX)
double jump_compensation(const JumpLaw& law);                                ///< E X 1_{|X|<1}
double jump_mass_at_or_below(const JumpLaw& law, double level);              ///< P(X <= level)
JumpLaw jump_restrict_above(const JumpLaw& law, double level);               ///< law of X | X > level
double jump_sample(const JumpLaw& law, RandomStream& rng);

/// Levy-Khintchine exponent continued to complex z:
///   sigma2/2 z^2 + a' z + int (e^{zx} - 1 - z x 1_{|x|<1}) nu(dx).
/// Killing is excluded.
std::complex<double> levy_exponent(const MotionSpec& spec, std::complex<double> z);

/// Characteristic exponent Phi(r) = levy_exponent(spec, i r).
std::complex<double> phi(const MotionSpec& spec, double r);

/// Samples the motion on [0, duration]. Observation offsets must lie in
/// (0, duration]; the value at `duration` is always recorded unless killed.
PathSample sample_path(const MotionSpec& spec, double duration,
                       std::span<const double> observation_offsets, RandomStream& rng);

/// Increment over (0, dt] together with the individual jump events and the
/// kill offset, if any. The increment stops at the kill time.
Increment sample_increment(const MotionSpec& spec, double dt, RandomStream& rng);

/// Removes jumps of size <= -level and adds their rate to the kill rate.
MotionSpec censor_spec(const MotionSpec& spec, double level);

}  // namespace blp
