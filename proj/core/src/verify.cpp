#include "blp/verify.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <variant>

namespace blp {
namespace {

using cplx = std::complex<double>;

struct Pair {
  double re = 0.0;
  double im = 0.0;
};

SimulationConfig sim_config(double horizon, std::vector<double> observations, const VerifyOptions& opts) {
  SimulationConfig c;
  c.horizon = horizon;
  c.observation_times = std::move(observations);
  c.max_particles = opts.max_particles;
  return c;
}

std::uint64_t side_seed(std::uint64_t seed, std::uint64_t side) { return substream_seed(seed, side); }

std::string describe_complex(cplx z) { return format_real(z.real()) + "+" + format_real(z.imag()) + "i"; }

EstimatorReport one_sample(std::string check, std::string parameters, const std::vector<double>& re,
                           const std::vector<double>* im, cplx target, const VerifyOptions& opts) {
  EstimatorReport r;
  r.check = std::move(check);
  r.parameters = std::move(parameters);
  const SampleSummary sr = summarize(re);
  r.estimate = sr.mean;
  r.se_re = sr.std_error;
  if (im) {
    const SampleSummary si = summarize(*im);
    r.estimate.imag(si.mean);
    r.se_im = si.std_error;
    r.complex_valued = true;
  }
  r.target = target;
  r.n_replicas = re.size();
  r.k = opts.k;
  finalize(r);
  return r;
}

EstimatorReport two_sample(std::string check, std::string parameters, const std::vector<double>& lhs,
                           const std::vector<double>& rhs, const VerifyOptions& opts) {
  EstimatorReport r;
  r.check = std::move(check);
  r.parameters = std::move(parameters);
  const SampleSummary a = summarize(lhs);
  const SampleSummary b = summarize(rhs);
  r.estimate = a.mean;
  r.target = b.mean;
  r.se_re = std::hypot(a.std_error, b.std_error);
  r.n_replicas = lhs.size();
  r.k = opts.k;
  finalize(r);
  return r;
}

std::vector<double> real_parts(const std::vector<Pair>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].re;
  return out;
}

std::vector<double> imag_parts(const std::vector<Pair>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].im;
  return out;
}

// Values of a sampled path at the requested offsets (all recorded by
// sample_path since they were passed as observation offsets).
std::vector<double> values_at(const PathSample& path, std::span<const double> offsets) {
  std::vector<double> out;
  out.reserve(offsets.size());
  std::size_t i = 0;
  for (double o : offsets) {
    while (i < path.times.size() && path.times[i] < o) ++i;
    // A jump at exactly `o` is recorded before the observation; take the last entry at `o`.
    while (i + 1 < path.times.size() && path.times[i + 1] == o) ++i;
    if (i >= path.times.size() || path.times[i] != o) throw std::logic_error("spine path misses a grid point");
    out.push_back(path.values[i]);
  }
  return out;
}

double spine_weight(double theta, double xi, double t, double kappa_theta) {
  return std::exp(-theta * xi + t * kappa_theta);
}

}  // namespace

double z_score(double estimate, double target, double se) {
  const double diff = estimate - target;
  if (se > 0.0) return diff / se;
  if (std::abs(diff) <= 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(target))) {
    return 0.0;
  }
  return diff > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

void finalize(EstimatorReport& r) {
  r.z_re = z_score(r.estimate.real(), r.target.real(), r.se_re);
  r.z_im = r.complex_valued ? z_score(r.estimate.imag(), r.target.imag(), r.se_im) : 0.0;
  const bool finite = std::isfinite(r.estimate.real()) && std::isfinite(r.estimate.imag()) &&
                      std::isfinite(r.se_re) && std::isfinite(r.se_im);
  r.pass = finite && std::abs(r.z_re) <= r.k && std::abs(r.z_im) <= r.k;
}

std::string report_csv_header() {
  return "check,parameters,estimate_re,estimate_im,se_re,se_im,target_re,target_im,z_re,z_im,n,k,pass";
}

std::string to_csv_row(const EstimatorReport& r) {
  std::ostringstream out;
  out << r.check << ',' << '"' << r.parameters << '"' << ',' << format_real(r.estimate.real()) << ','
      << format_real(r.estimate.imag()) << ',' << format_real(r.se_re) << ',' << format_real(r.se_im) << ','
      << format_real(r.target.real()) << ',' << format_real(r.target.imag()) << ',' << format_real(r.z_re)
      << ',' << format_real(r.z_im) << ',' << r.n_replicas << ',' << format_real(r.k) << ','
      << (r.pass ? "pass" : "fail");
  return out.str();
}

MotionSpec spine_motion(const FiniteBirthParams& params, Theta theta) {
  params.validate();
  const double th = theta.value();
  const MotionSpec& m = params.motion;
  MotionSpec s;
  s.sigma2 = m.sigma2;
  const double between_jumps = m.effective_drift() + m.sigma2 * th;

  std::map<double, double> points;
  for (const auto& j : m.jumps) {
    if (const auto* p = std::get_if<PointMassJump>(&j.law)) {
      points[p->position] += j.rate * std::exp(th * p->position);
    } else if (th == 0.0) {
      s.jumps.push_back(j);
    } else if (const auto* e = std::get_if<ExponentialJump>(&j.law)) {
      const double tilted = e->rate - e->sign * th;
      if (!(tilted > 0.0)) throw std::domain_error("spine_motion: exponential jump cannot be tilted");
      s.jumps.push_back({j.rate * jump_mgf(j.law, th).real(), ExponentialJump{e->sign, tilted, e->cap}});
    } else {
      throw std::domain_error("spine_motion: uniform jumps can only be tilted at theta = 0");
    }
  }
  if (params.beta > 0.0 && !params.rho.empty()) {
    const double total = params.rho.total_rate();
    const double scale = total == params.beta ? 1.0 : params.beta / total;
    for (const auto& o : params.rho.outcomes()) {
      for (double x : o.displacements.atoms()) {
        if (x != 0.0) points[x] += o.rate * scale * std::exp(th * x);
      }
    }
  }
  for (const auto& [x, w] : points) s.jumps.push_back({w, PointMassJump{x}});

  double compensator = 0.0;
  for (const auto& j : s.jumps) compensator += j.rate * jump_compensation(j.law);
  s.drift = between_jumps + compensator;
  return s;
}

cplx cumulant_target(const FiniteBirthParams& params, double t, cplx z) {
  return std::exp(t * cumulant(params, z));
}

cplx many_to_one_exponential_target(const FiniteBirthParams& params, double t, Theta theta, cplx w) {
  const MotionSpec spine = spine_motion(params, theta);
  const double th = theta.value();
  return std::exp(t * cumulant(params, th) + t * levy_exponent(spine, w - th));
}

EstimatorReport check_cumulant(const FiniteBirthParams& params, double t, cplx z, const VerifyOptions& opts) {
  const SimulationConfig cfg = sim_config(t, {t}, opts);
  const auto vals = run_replicas(
      opts.replicas, opts.seed,
      [&](RandomStream& rng, std::size_t) {
        const cplx v = exponential_integral(simulate_finite(params, cfg, rng).snapshot(t).measure, z);
        return Pair{v.real(), v.imag()};
      },
      opts.threads);
  const auto re = real_parts(vals);
  const auto im = imag_parts(vals);
  const bool complex_z = z.imag() != 0.0;
  return one_sample("cumulant", "t=" + format_real(t) + ";z=" + describe_complex(z), re,
                    complex_z ? &im : nullptr, cumulant_target(params, t, z), opts);
}

EstimatorReport check_many_to_one(const FiniteBirthParams& params, double t, Theta theta,
                                  const PointFunction& f, const VerifyOptions& opts) {
  const SimulationConfig cfg = sim_config(t, {t}, opts);
  const auto lhs = run_replicas(
      opts.replicas, side_seed(opts.seed, 0),
      [&](RandomStream& rng, std::size_t) {
        const Snapshot snap = simulate_finite(params, cfg, rng).snapshot(t);
        double sum = 0.0;
        for (double x : snap.measure.atoms()) sum += f(x);
        return sum;
      },
      opts.threads);
  const MotionSpec spine = spine_motion(params, theta);
  const double kap = cumulant(params, theta.value()).real();
  const auto rhs = run_replicas(
      opts.replicas, side_seed(opts.seed, 1),
      [&](RandomStream& rng, std::size_t) {
        const double xi = sample_path(spine, t, {}, rng).final_value();
        return spine_weight(theta.value(), xi, t, kap) * f(xi);
      },
      opts.threads);
  return two_sample("many_to_one", "t=" + format_real(t) + ";theta=" + format_real(theta.value()), lhs, rhs,
                    opts);
}

EstimatorReport check_pathwise_many_to_one(const FiniteBirthParams& params, double t, Theta theta,
                                           const std::vector<double>& grid, const PathFunctional& F,
                                           const VerifyOptions& opts) {
  if (grid.empty()) throw std::invalid_argument("pathwise check needs a non-empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || grid[i] > t || (i && !(grid[i] > grid[i - 1]))) {
      throw std::invalid_argument("grid must be increasing within (0, t]");
    }
  }
  std::vector<double> obs = grid;
  if (obs.back() < t) obs.push_back(t);
  const SimulationConfig cfg = sim_config(t, obs, opts);
  const auto lhs = run_replicas(
      opts.replicas, side_seed(opts.seed, 0),
      [&](RandomStream& rng, std::size_t) {
        const GenealogyForest forest = simulate_finite(params, cfg, rng);
        const Snapshot snap = forest.snapshot(t);
        std::vector<double> values(grid.size());
        double sum = 0.0;
        for (std::size_t rec : snap.records) {
          const AncestralPath path = forest.trajectory_of(rec, t);
          for (std::size_t g = 0; g < grid.size(); ++g) values[g] = path.value_at(grid[g]);
          sum += F(values);
        }
        return sum;
      },
      opts.threads);
  const MotionSpec spine = spine_motion(params, theta);
  const double kap = cumulant(params, theta.value()).real();
  const auto rhs = run_replicas(
      opts.replicas, side_seed(opts.seed, 1),
      [&](RandomStream& rng, std::size_t) {
        const PathSample path = sample_path(spine, t, grid, rng);
        const std::vector<double> values = values_at(path, grid);
        return spine_weight(theta.value(), path.final_value(), t, kap) * F(values);
      },
      opts.threads);
  return two_sample("pathwise_many_to_one", "t=" + format_real(t) + ";theta=" + format_real(theta.value()),
                    lhs, rhs, opts);
}

EstimatorReport check_martingale_normalization(const FiniteBirthParams& params, double t, double r,
                                               Theta theta, const VerifyOptions& opts) {
  const cplx z(theta.value(), r);
  const cplx norm = std::exp(-t * cumulant(params, z));
  const SimulationConfig cfg = sim_config(t, {t}, opts);
  const auto vals = run_replicas(
      opts.replicas, opts.seed,
      [&](RandomStream& rng, std::size_t) {
        const cplx m = norm * exponential_integral(simulate_finite(params, cfg, rng).snapshot(t).measure, z);
        return Pair{m.real(), m.imag()};
      },
      opts.threads);
  const auto re = real_parts(vals);
  const auto im = imag_parts(vals);
  return one_sample("martingale",
                    "t=" + format_real(t) + ";r=" + format_real(r) + ";theta=" + format_real(theta.value()), re,
                    &im, 1.0, opts);
}

EstimatorReport check_censored_mass(const CharacteristicTriple& triple, double top_level, double n, double t,
                                    const VerifyOptions& opts) {
  const FiniteBirthParams params = decompose(triple, top_level);
  const SimulationConfig cfg = sim_config(t, {t}, opts);
  const auto lhs = run_replicas(
      opts.replicas, side_seed(opts.seed, 0),
      [&](RandomStream& rng, std::size_t) {
        const GenealogyForest forest = simulate_finite(params, cfg, rng);
        return static_cast<double>(censor(forest, n).snapshot(t).measure.size());
      },
      opts.threads);
  const Theta theta = triple.theta;
  const MotionSpec spine = censor_spec(spine_motion(params, theta), n);
  const double kap = cumulant(params, theta.value()).real();
  const auto rhs = run_replicas(
      opts.replicas, side_seed(opts.seed, 1),
      [&](RandomStream& rng, std::size_t) {
        const PathSample path = sample_path(spine, t, {}, rng);
        if (path.killed_at) return 0.0;
        return spine_weight(theta.value(), path.final_value(), t, kap);
      },
      opts.threads);
  return two_sample("censored_mass",
                    "top=" + format_real(top_level) + ";n=" + format_real(n) + ";t=" + format_real(t), lhs, rhs,
                    opts);
}

EstimatorReport weighted_intensity(const FiniteBirthParams& params, Theta theta, const PointFunction& f,
                                   const VerifyOptions& opts) {
  const double th = theta.value();
  const double norm = std::exp(-cumulant(params, th).real());
  const SimulationConfig cfg = sim_config(1.0, {1.0}, opts);
  const auto lhs = run_replicas(
      opts.replicas, side_seed(opts.seed, 0),
      [&](RandomStream& rng, std::size_t) {
        const auto snap = simulate_finite(params, cfg, rng).snapshot(1.0);
        return norm * weighted_integral(snap.measure, theta, f);
      },
      opts.threads);
  const MotionSpec spine = spine_motion(params, theta);
  const auto rhs = run_replicas(
      opts.replicas, side_seed(opts.seed, 1),
      [&](RandomStream& rng, std::size_t) { return f(sample_path(spine, 1.0, {}, rng).final_value()); },
      opts.threads);
  return two_sample("weighted_intensity", "theta=" + format_real(th), lhs, rhs, opts);
}

EstimatorReport weighted_intensity_fourier(const FiniteBirthParams& params, Theta theta, double r,
                                           const VerifyOptions& opts) {
  const double th = theta.value();
  const cplx kap = cumulant(params, th);
  const cplx z(th, r);
  const SimulationConfig cfg = sim_config(1.0, {1.0}, opts);
  const auto vals = run_replicas(
      opts.replicas, opts.seed,
      [&](RandomStream& rng, std::size_t) {
        const auto snap = simulate_finite(params, cfg, rng).snapshot(1.0);
        const cplx v = std::exp(-kap) * exponential_integral(snap.measure, z);
        return Pair{v.real(), v.imag()};
      },
      opts.threads);
  const auto re = real_parts(vals);
  const auto im = imag_parts(vals);
  return one_sample("weighted_intensity_fourier", "theta=" + format_real(th) + ";r=" + format_real(r), re, &im,
                    std::exp(cumulant(params, z) - kap), opts);
}

EstimatorReport check_spine_characteristic(const FiniteBirthParams& params, Theta theta, double t, double r,
                                           const VerifyOptions& opts) {
  const double th = theta.value();
  const MotionSpec spine = spine_motion(params, theta);
  const auto vals = run_replicas(
      opts.replicas, opts.seed,
      [&](RandomStream& rng, std::size_t) {
        const double xi = sample_path(spine, t, {}, rng).final_value();
        return Pair{std::cos(r * xi), std::sin(r * xi)};
      },
      opts.threads);
  const auto re = real_parts(vals);
  const auto im = imag_parts(vals);
  const cplx target = std::exp(t * (cumulant(params, cplx(th, r)) - cumulant(params, th)));
  return one_sample("spine_characteristic",
                    "theta=" + format_real(th) + ";t=" + format_real(t) + ";r=" + format_real(r), re, &im, target,
                    opts);
}

LevelSweep cumulant_over_levels(const CharacteristicTriple& triple, std::vector<double> levels, double t,
                                const VerifyOptions& opts) {
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  const Theta theta = triple.theta;
  const SimulationConfig cfg = sim_config(t, {t}, opts);
  const auto rows = run_replicas(
      opts.replicas, opts.seed,
      [&](RandomStream& rng, std::size_t) {
        const auto forests = simulate_nested(triple, levels, cfg, rng);
        std::vector<double> v;
        v.reserve(levels.size());
        for (double n : levels) {
          v.push_back(weighted_integral(forests.at(n).snapshot(t).measure, theta, [](double) { return 1.0; }));
        }
        return v;
      },
      opts.threads);
  LevelSweep sweep;
  sweep.levels = levels;
  for (const auto& row : rows) {
    for (std::size_t i = 1; i < row.size(); ++i) {
      if (row[i] < row[i - 1]) sweep.replicas_monotone = false;
    }
  }
  for (std::size_t i = 0; i < levels.size(); ++i) {
    std::vector<double> col(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) col[r] = rows[r][i];
    const cplx target = cumulant_target(decompose(triple, levels[i]), t, theta.value());
    sweep.reports.push_back(one_sample("cumulant_level", "n=" + format_real(levels[i]) + ";t=" + format_real(t),
                                       col, nullptr, target, opts));
    if (i && sweep.reports[i].estimate.real() < sweep.reports[i - 1].estimate.real()) {
      sweep.means_monotone = false;
    }
  }
  return sweep;
}

BranchingPropertyResult check_branching_property(const FiniteBirthParams& params, Theta theta, double s,
                                                 double t, std::size_t n, std::uint64_t seed, double alpha,
                                                 unsigned threads, std::size_t max_particles) {
  VerifyOptions opts;
  opts.max_particles = max_particles;
  auto mass = [&](const RankedPointMeasure& m) {
    return weighted_integral(m, theta, [](double) { return 1.0; });
  };
  const SimulationConfig direct_cfg = sim_config(s + t, {s + t}, opts);
  const SimulationConfig first_cfg = sim_config(s, {s}, opts);
  const SimulationConfig second_cfg = sim_config(t, {t}, opts);
  const auto direct = run_replicas(
      n, side_seed(seed, 0),
      [&](RandomStream& rng, std::size_t) { return mass(simulate_finite(params, direct_cfg, rng).snapshot(s + t).measure); },
      threads);
  const auto composed = run_replicas(
      n, side_seed(seed, 1),
      [&](RandomStream& rng, std::size_t) {
        const RankedPointMeasure first = simulate_finite(params, first_cfg, rng).snapshot(s).measure;
        double sum = 0.0;
        for (double x : first.atoms()) {
          sum += std::exp(theta.value() * x) * mass(simulate_finite(params, second_cfg, rng).snapshot(t).measure);
        }
        return sum;
      },
      threads);
  BranchingPropertyResult out;
  out.ks = ks_two_sample(direct, composed);
  out.alpha = alpha;
  out.n = n;
  out.pass = out.ks.p_value >= alpha;
  return out;
}

}  // namespace blp
