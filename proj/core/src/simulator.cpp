#include "blp/simulator.hpp"

#include <cmath>
#include <queue>
#include <string>

namespace blp {
namespace {

struct Pending {
  double birth = 0.0;
  UlamLabel label;
  double position = 0.0;
  double displacement = 0.0;
  std::size_t source = 0;  // record index in the input forest, used by pruning
};

struct Later {
  bool operator()(const Pending& a, const Pending& b) const {
    if (a.birth != b.birth) return a.birth > b.birth;
    return a.label > b.label;
  }
};

using Schedule = std::priority_queue<Pending, std::vector<Pending>, Later>;

GenealogyForest prune_impl(const GenealogyForest& in, double n, bool inclusive) {
  if (!(n > 0.0)) throw std::invalid_argument("pruning level must be positive");
  auto cut = [&](double x) { return inclusive ? x <= -n : x < -n; };
  GenealogyForest out(in.horizon(), in.drift(), in.gaussian());
  const auto root = in.find(UlamLabel{});
  if (!root) return out;

  Schedule schedule;
  const ParticleRecord& r0 = in.record(*root);
  schedule.push({r0.birth, {}, r0.birth_position, 0.0, *root});
  while (!schedule.empty()) {
    const Pending item = schedule.top();
    schedule.pop();
    ParticleRecord rec;
    rec.label = item.label;
    rec.birth = item.birth;
    rec.birth_position = item.position;
    rec.displacement = item.displacement;
    std::vector<Pending> kids;

    std::size_t cur = item.source;
    bool done = false;
    while (!done) {
      const ParticleRecord& src = in.record(cur);
      std::optional<std::size_t> next;
      for (const auto& ev : src.events) {
        if (ev.kind == EventKind::MotionJump && cut(ev.jump)) {
          rec.events.push_back({ev.time, ev.position - ev.jump, EventKind::Killed, 0.0});
          rec.death = ev.time;
          done = true;
          break;
        }
        if (ev.kind == EventKind::MotionJump || ev.kind == EventKind::Observation) {
          rec.events.push_back(ev);
          continue;
        }
        if (ev.kind == EventKind::Killed) {
          rec.events.push_back(ev);
          rec.death = src.death;
          done = true;
          break;
        }
        // Birth: keep only children born at or above the threshold.
        std::vector<std::size_t> survivors;
        for (std::size_t c : src.children) {
          if (!cut(in.record(c).displacement)) survivors.push_back(c);
        }
        if (survivors.size() == 1 && src.children.size() != 1) {
          const ParticleRecord& child = in.record(survivors[0]);
          if (child.displacement != 0.0) {
            rec.events.push_back({ev.time, child.birth_position, EventKind::MotionJump, child.displacement});
          }
          next = survivors[0];
        } else if (survivors.empty() && !src.children.empty()) {
          rec.events.push_back({ev.time, ev.position, EventKind::Killed, 0.0});
          rec.death = src.death;
          done = true;
        } else {
          rec.events.push_back(ev);
          rec.death = src.death;
          for (std::size_t j = 0; j < survivors.size(); ++j) {
            const ParticleRecord& child = in.record(survivors[j]);
            kids.push_back({child.birth, rec.label.child(static_cast<std::uint32_t>(j + 1)),
                            child.birth_position, child.displacement, survivors[j]});
          }
          done = true;
        }
        break;
      }
      if (next) {
        cur = *next;
      } else if (!done) {
        rec.death = src.death;
        done = true;
      }
    }
    out.add(std::move(rec));
    for (auto& k : kids) schedule.push(std::move(k));
  }
  return out;
}

}  // namespace

void SimulationConfig::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("horizon must be positive");
  for (std::size_t i = 0; i < observation_times.size(); ++i) {
    const double t = observation_times[i];
    if (!(t >= 0.0) || t > horizon) throw std::invalid_argument("observation times must lie in [0, horizon]");
    if (i && !(t > observation_times[i - 1])) throw std::invalid_argument("observation times must increase");
  }
  if (max_particles == 0) throw std::invalid_argument("max_particles must be positive");
}

GenealogyForest simulate_finite(const FiniteBirthParams& params, const SimulationConfig& config,
                                RandomStream& rng) {
  params.validate();
  config.validate();
  const MotionSpec& motion = params.motion;
  GenealogyForest forest(config.horizon, motion.effective_drift(), motion.gaussian());

  Schedule schedule;
  schedule.push({0.0, {}, 0.0, 0.0, 0});
  std::size_t born = 1;
  std::vector<double> offsets;
  std::vector<double> obs_times;

  while (!schedule.empty()) {
    const Pending p = schedule.top();
    schedule.pop();

    const double life = rng.exponential(params.beta);
    const double remaining = config.horizon - p.birth;
    const bool branches = life < remaining;
    const double duration = branches ? life : remaining;

    offsets.clear();
    obs_times.clear();
    for (double o : config.observation_times) {
      if (!(o > p.birth)) continue;
      const double off = o - p.birth;
      if (branches ? off < duration : off <= duration) {
        offsets.push_back(off);
        obs_times.push_back(o);
      }
    }
    const PathSample path = sample_path(motion, duration, offsets, rng);

    ParticleRecord rec;
    rec.label = p.label;
    rec.birth = p.birth;
    rec.birth_position = p.position;
    rec.displacement = p.displacement;
    double end_value = 0.0;
    std::size_t ji = 0;
    std::size_t oi = 0;
    for (std::size_t i = 0; i < path.times.size(); ++i) {
      const double off = path.times[i];
      const double pos = p.position + path.values[i];
      if (ji < path.jumps.size() && path.jumps[ji].offset == off) {
        rec.events.push_back({p.birth + off, pos, EventKind::MotionJump, path.jumps[ji].size});
        ++ji;
      } else if (oi < offsets.size() && offsets[oi] == off) {
        rec.events.push_back({obs_times[oi], pos, EventKind::Observation, 0.0});
        ++oi;
      } else {
        end_value = path.values[i];
      }
    }

    std::vector<Pending> kids;
    if (path.killed_at) {
      rec.death = p.birth + *path.killed_at;
      rec.events.push_back({rec.death, p.position + path.killed_value, EventKind::Killed, 0.0});
    } else if (branches) {
      rec.death = p.birth + life;
      const double pre = p.position + end_value;
      rec.events.push_back({rec.death, pre, EventKind::Birth, 0.0});
      const RankedPointMeasure& offspring = params.rho.sample(rng);
      born += offspring.size();
      if (born > config.max_particles) {
        throw BudgetExceeded("particle budget of " + std::to_string(config.max_particles) + " exceeded");
      }
      for (std::size_t j = 0; j < offspring.size(); ++j) {
        kids.push_back({rec.death, p.label.child(static_cast<std::uint32_t>(j + 1)), pre + offspring[j],
                        offspring[j], 0});
      }
    }
    forest.add(std::move(rec));
    for (auto& k : kids) schedule.push(std::move(k));
  }
  return forest;
}

GenealogyForest prune(const GenealogyForest& forest, double n) { return prune_impl(forest, n, false); }

GenealogyForest censor(const GenealogyForest& forest, double n) { return prune_impl(forest, n, true); }

std::map<double, GenealogyForest> simulate_nested(const CharacteristicTriple& triple,
                                                  std::vector<double> levels,
                                                  const SimulationConfig& config, RandomStream& rng,
                                                  const SeriesOptions& opts) {
  if (levels.empty()) throw std::invalid_argument("simulate_nested needs at least one level");
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  const auto& declared = triple.lambda.declared_levels;
  for (double n : levels) {
    if (!(n >= 1.0)) throw std::invalid_argument("nested levels must be >= 1");
    if (!declared.empty() && std::find(declared.begin(), declared.end(), n) == declared.end()) {
      throw std::invalid_argument("level " + format_real(n) + " is not declared");
    }
  }
  const FiniteBirthParams top = decompose(triple, levels.back(), opts);
  GenealogyForest full = simulate_finite(top, config, rng);
  std::map<double, GenealogyForest> out;
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) out.emplace(levels[i], prune(full, levels[i]));
  out.emplace(levels.back(), std::move(full));
  return out;
}

RankedPointMeasure branching_convolution(const RankedPointMeasure& start,
                                         const std::function<RankedPointMeasure(RandomStream&)>& one_step,
                                         RandomStream& rng) {
  std::vector<RankedPointMeasure> parts;
  parts.reserve(start.size());
  for (double x : start.atoms()) parts.push_back(translate(one_step(rng), x));
  return superpose(parts);
}

std::vector<RankedPointMeasure> skeleton(const GenealogyForest& forest, double step) {
  const double h = forest.horizon();
  if (!(step > 0.0)) throw std::invalid_argument("skeleton step must be positive");
  const double ratio = h / step;
  const auto k = static_cast<std::size_t>(std::llround(ratio));
  if (k == 0 || std::abs(static_cast<double>(k) * step - h) > 1e-12 * h) {
    throw std::invalid_argument("skeleton step must divide the horizon");
  }
  std::vector<RankedPointMeasure> out;
  out.reserve(k + 1);
  for (std::size_t i = 0; i < k; ++i) out.push_back(forest.snapshot(static_cast<double>(i) * step).measure);
  out.push_back(forest.snapshot(h).measure);
  return out;
}

}  // namespace blp
