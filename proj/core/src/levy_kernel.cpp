#include "blp/levy_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace blp {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double exp_normalizer(const ExponentialJump& e) {
  return std::isinf(e.cap) ? 1.0 : -std::expm1(-e.rate * e.cap);
}

// (e^{w} - 1) / w for complex w, accurate near 0.
std::complex<double> expm1_over(std::complex<double> w) {
  if (std::abs(w) < 1e-5) return 1.0 + w / 2.0 + w * w / 6.0;
  return (std::exp(w) - 1.0) / w;
}

}  // namespace

std::complex<double> jump_mgf(const JumpLaw& law, std::complex<double> z) {
  if (z == 0.0) return 1.0;
  return std::visit(
      Overloaded{
          [&](const PointMassJump& p) { return std::exp(z * p.position); },
          [&](const UniformJump& u) {
            const double w = u.high - u.low;
            return std::exp(z * u.low) * expm1_over(z * w);
          },
          [&](const ExponentialJump& e) -> std::complex<double> {
            // E e^{z s E}, E ~ Exp(rate) | E < cap.
            const std::complex<double> a = e.rate - z * e.sign;
            if (std::isinf(e.cap)) {
              if (!(a.real() > 0.0)) {
                throw std::domain_error("jump_mgf: exponential moment does not exist");
              }
              return e.rate / a;
            }
            // rate/N * int_0^cap e^{-a x} dx = rate/N * cap * (e^{-a cap} - 1)/(-a cap)
            return e.rate / exp_normalizer(e) * e.cap * expm1_over(-a * e.cap);
          },
      },
      law);
}

double jump_compensation(const JumpLaw& law) {
  return std::visit(
      Overloaded{
          [](const PointMassJump& p) { return std::abs(p.position) < 1.0 ? p.position : 0.0; },
          [](const UniformJump& u) {
            const double lo = std::max(u.low, -1.0);
            const double hi = std::min(u.high, 1.0);
            if (!(lo < hi)) return 0.0;
            return (hi * hi - lo * lo) / (2.0 * (u.high - u.low));
          },
          [](const ExponentialJump& e) {
            const double m = std::min(1.0, e.cap);
            const double lm = e.rate * m;
            // int_0^m x rate e^{-rate x} dx
            const double partial = (-std::expm1(-lm) - lm * std::exp(-lm)) / e.rate;
            return e.sign * partial / exp_normalizer(e);
          },
      },
      law);
}

double jump_mass_at_or_below(const JumpLaw& law, double level) {
  return std::visit(
      Overloaded{
          [&](const PointMassJump& p) { return p.position <= level ? 1.0 : 0.0; },
          [&](const UniformJump& u) {
            return std::clamp((level - u.low) / (u.high - u.low), 0.0, 1.0);
          },
          [&](const ExponentialJump& e) {
            const double n = exp_normalizer(e);
            if (e.sign > 0) {
              if (level <= 0.0) return 0.0;
              return -std::expm1(-e.rate * std::min(level, e.cap)) / n;
            }
            if (level >= 0.0) return 1.0;
            const double u = -level;
            if (u >= e.cap) return 0.0;
            const double upper = std::isinf(e.cap) ? 0.0 : std::exp(-e.rate * e.cap);
            return (std::exp(-e.rate * u) - upper) / n;
          },
      },
      law);
}

JumpLaw jump_restrict_above(const JumpLaw& law, double level) {
  return std::visit(
      Overloaded{
          [&](const PointMassJump& p) -> JumpLaw {
            if (!(p.position > level)) throw std::domain_error("restriction leaves no mass");
            return p;
          },
          [&](const UniformJump& u) -> JumpLaw {
            if (!(u.high > level)) throw std::domain_error("restriction leaves no mass");
            return UniformJump{std::max(u.low, level), u.high};
          },
          [&](const ExponentialJump& e) -> JumpLaw {
            if (e.sign > 0) {
              if (level >= 0.0) throw std::domain_error("restriction of a positive exponential above 0");
              return e;
            }
            if (level >= 0.0) throw std::domain_error("restriction leaves no mass");
            return ExponentialJump{e.sign, e.rate, std::min(e.cap, -level)};
          },
      },
      law);
}

double jump_sample(const JumpLaw& law, RandomStream& rng) {
  return std::visit(
      Overloaded{
          [](const PointMassJump& p) { return p.position; },
          [&](const UniformJump& u) { return u.low + (u.high - u.low) * rng.uniform(); },
          [&](const ExponentialJump& e) {
            const double n = exp_normalizer(e);
            return e.sign * (-std::log1p(-rng.uniform() * n) / e.rate);
          },
      },
      law);
}

void MotionSpec::validate() const {
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw std::invalid_argument("sigma2 must be >= 0");
  if (!std::isfinite(drift)) throw std::invalid_argument("drift must be finite");
  if (!(kill_rate >= 0.0) || !std::isfinite(kill_rate)) {
    throw std::invalid_argument("kill_rate must be >= 0");
  }
  for (const auto& j : jumps) {
    if (!(j.rate > 0.0) || !std::isfinite(j.rate)) throw std::invalid_argument("jump rate must be > 0");
    std::visit(Overloaded{
                   [](const PointMassJump& p) {
                     if (p.position == 0.0 || !std::isfinite(p.position)) {
                       throw std::invalid_argument("point-mass jump must be finite and non-zero");
                     }
                   },
                   [](const UniformJump& u) {
                     if (!(u.low < u.high) || !std::isfinite(u.low) || !std::isfinite(u.high)) {
                       throw std::invalid_argument("uniform jump needs low < high");
                     }
                   },
                   [](const ExponentialJump& e) {
                     if (!(e.rate > 0.0) || (e.sign != 1.0 && e.sign != -1.0) || !(e.cap > 0.0)) {
                       throw std::invalid_argument("exponential jump needs rate > 0, sign +-1, cap > 0");
                     }
                   },
               },
               j.law);
  }
}

double MotionSpec::total_jump_rate() const {
  double total = 0.0;
  for (const auto& j : jumps) total += j.rate;
  return total;
}

double MotionSpec::effective_drift() const {
  double compensator = 0.0;
  for (const auto& j : jumps) compensator += j.rate * jump_compensation(j.law);
  return drift - compensator;
}

std::complex<double> levy_exponent(const MotionSpec& spec, std::complex<double> z) {
  std::complex<double> value = 0.5 * spec.sigma2 * z * z + spec.drift * z;
  for (const auto& j : spec.jumps) {
    value += j.rate * (jump_mgf(j.law, z) - 1.0 - z * jump_compensation(j.law));
  }
  return value;
}

std::complex<double> phi(const MotionSpec& spec, double r) {
  return levy_exponent(spec, std::complex<double>(0.0, r));
}

PathSample sample_path(const MotionSpec& spec, double duration,
                       std::span<const double> observation_offsets, RandomStream& rng) {
  if (!(duration > 0.0)) throw std::invalid_argument("sample_path: duration must be positive");
  PathSample path;
  const double eff = spec.effective_drift();
  const double sd = std::sqrt(spec.sigma2);
  const double jump_rate = spec.total_jump_rate();

  std::vector<double> cumulative;
  cumulative.reserve(spec.jumps.size());
  double acc = 0.0;
  for (const auto& j : spec.jumps) cumulative.push_back(acc += j.rate);

  // Drift enters as eff * t so drift-only paths are exact products.
  double t = 0.0;
  double brownian = 0.0;
  double jumps_sum = 0.0;
  auto advance = [&](double to) {
    if (sd > 0.0 && to > t) brownian += sd * std::sqrt(to - t) * rng.normal();
    t = to;
  };
  auto position = [&] { return eff * t + brownian + jumps_sum; };

  const double kill_time = rng.exponential(spec.kill_rate);
  double next_jump = rng.exponential(jump_rate);

  std::vector<double> checkpoints;
  checkpoints.reserve(observation_offsets.size() + 1);
  for (double o : observation_offsets) {
    if (!(o > 0.0) || o > duration) {
      throw std::invalid_argument("sample_path: observation offsets must lie in (0, duration]");
    }
    if (!checkpoints.empty() && !(o > checkpoints.back())) {
      throw std::invalid_argument("sample_path: observation offsets must be increasing");
    }
    checkpoints.push_back(o);
  }
  if (checkpoints.empty() || checkpoints.back() < duration) checkpoints.push_back(duration);

  for (double c : checkpoints) {
    while (next_jump <= c && next_jump < kill_time) {
      advance(next_jump);
      const std::size_t which = rng.discrete(cumulative);
      const double size = jump_sample(spec.jumps[which].law, rng);
      jumps_sum += size;
      path.times.push_back(t);
      path.values.push_back(position());
      path.jumps.push_back({t, size});
      next_jump = t + rng.exponential(jump_rate);
    }
    if (kill_time <= c) {
      advance(kill_time);
      path.killed_at = kill_time;
      path.killed_value = position();
      return path;
    }
    advance(c);
    path.times.push_back(c);
    path.values.push_back(position());
  }
  return path;
}

Increment sample_increment(const MotionSpec& spec, double dt, RandomStream& rng) {
  PathSample path = sample_path(spec, dt, {}, rng);
  Increment inc;
  inc.jumps = std::move(path.jumps);
  inc.killed = path.killed_at;
  inc.increment = path.killed_at ? path.killed_value : path.final_value();
  return inc;
}

MotionSpec censor_spec(const MotionSpec& spec, double level) {
  if (!(level > 0.0)) throw std::invalid_argument("censor_spec: level must be positive");
  MotionSpec out = spec;
  out.jumps.clear();
  for (const auto& j : spec.jumps) {
    const double removed = jump_mass_at_or_below(j.law, -level);
    if (removed > 0.0) out.kill_rate += j.rate * removed;
    if (removed < 1.0) out.jumps.push_back({j.rate * (1.0 - removed), jump_restrict_above(j.law, -level)});
  }
  return out;
}

}  // namespace blp
