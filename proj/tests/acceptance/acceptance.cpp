// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "blp/levy_measure.hpp"
#include "blp/simulator.hpp"
#include "blp/verify.hpp"
#include "cli.hpp"
#include "oracles.hpp"

using namespace blp;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::cout << (pass ? "PASS " : "FAIL ") << id << ". " << name << ": " << detail << std::endl;
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string z_text(const EstimatorReport& r) {
  std::string s = "z=" + format_real(r.z_re);
  if (r.complex_valued) s += "," + format_real(r.z_im);
  return s;
}

std::string describe(const std::vector<EstimatorReport>& rs) {
  std::string s;
  for (const auto& r : rs) {
    if (!s.empty()) s += " ";
    s += (r.pass ? "" : "!") + r.check + "[" + z_text(r) + "]";
  }
  return s;
}

std::vector<double> dyadic(double horizon, int denominator) {
  std::vector<double> out;
  for (int k = 0; k <= denominator; ++k) out.push_back(horizon * k / denominator);
  return out;
}

FiniteBirthParams yule() {
  FiniteBirthParams p;
  p.beta = 1.0;
  p.rho = OffspringLaw({{1.0, RankedPointMeasure{0.0, 0.0}}});
  return p;
}

FiniteBirthParams bbm() {
  FiniteBirthParams p = yule();
  p.motion.sigma2 = 1.0;
  return p;
}

FiniteBirthParams mixed() {
  FiniteBirthParams p;
  p.motion.sigma2 = 0.5;
  p.motion.drift = 0.1;
  p.motion.kill_rate = 0.1;
  p.motion.jumps = {{0.8, PointMassJump{-0.5}}, {0.5, ExponentialJump{-1.0, 2.0}}};
  p.beta = 1.0;
  p.rho = OffspringLaw({{0.6, RankedPointMeasure{0.0, -1.0}}, {0.4, RankedPointMeasure{0.5, -0.5, -2.0}}});
  return p;
}

VerifyOptions options(std::size_t replicas, std::uint64_t seed, unsigned threads = 0) {
  VerifyOptions o;
  o.replicas = replicas;
  o.seed = seed;
  o.threads = threads;
  return o;
}

void cumulant_yule() {
  const auto start = std::chrono::steady_clock::now();
  const auto r = check_cumulant(yule(), 1.0, 0.0, options(100'000, 101, 1));
  const double elapsed = seconds_since(start);
  report(1, "cumulant identity, Yule", r.pass && elapsed <= 60.0,
         "mean=" + format_real(r.estimate.real()) + " target=" + format_real(r.target.real()) + " " + z_text(r) +
             " time=" + format_real(std::round(elapsed * 100) / 100) + "s");
}

void cumulant_bbm() {
  const auto start = std::chrono::steady_clock::now();
  const auto r = check_cumulant(bbm(), 1.0, {1.0, 1.0}, options(100'000, 102));
  const double elapsed = seconds_since(start);
  report(2, "cumulant identity, binary BBM at z=1+i", r.pass && elapsed <= 120.0,
         z_text(r) + " time=" + format_real(std::round(elapsed * 100) / 100) + "s");
}

void many_to_one() {
  const FiniteBirthParams p = mixed();
  const Theta theta(0.5);
  const auto opts = options(100'000, 103);
  std::vector<EstimatorReport> rs;
  rs.push_back(check_many_to_one(p, 1.0, theta, [](double) { return 1.0; }, opts));
  rs.push_back(check_many_to_one(p, 1.0, theta, [](double x) { return x > -0.5 ? 1.0 : 0.0; }, opts));
  rs.push_back(check_many_to_one(p, 1.0, theta, [](double x) { return std::exp(-x * x); }, opts));
  const std::vector<double> grid{0.25, 0.5, 0.75, 1.0};
  rs.push_back(check_pathwise_many_to_one(
      p, 1.0, theta, grid,
      [](std::span<const double> q) { return *std::min_element(q.begin(), q.end()) > -1.0 ? 1.0 : 0.0; }, opts));
  rs.push_back(check_pathwise_many_to_one(
      p, 1.0, theta, grid, [](std::span<const double> q) { return *std::max_element(q.begin(), q.end()); }, opts));
  rs.push_back(check_pathwise_many_to_one(
      p, 1.0, theta, grid, [](std::span<const double> q) { return q[1] > q[3] ? 1.0 : 0.0; }, opts));
  bool all = true;
  for (const auto& r : rs) all = all && r.pass;
  report(3, "many-to-one, plain and pathwise", all, describe(rs));
}

CharacteristicTriple three_level() {
  CharacteristicTriple t;
  t.a = 0.1;
  t.theta = Theta(0.5);
  t.lambda.components = {{1.0, RankedPointMeasure{0.0, -0.5}},
                         {0.5, RankedPointMeasure{-3.0}},
                         {0.4, RankedPointMeasure{0.0, -7.0}},
                         {0.3, RankedPointMeasure{-0.5, -3.0, -7.0}}};
  t.lambda.declared_levels = {1.0, 5.0, 10.0};
  return t;
}

void nested_inclusion() {
  const std::vector<double> levels{1.0, 5.0, 10.0};
  SimulationConfig cfg;
  cfg.horizon = 2.0;
  cfg.observation_times = dyadic(2.0, 8);
  cfg.observation_times.erase(cfg.observation_times.begin());
  const auto violations = run_replicas(1000, 104, [&](RandomStream& rng, std::size_t) {
    const auto out = simulate_nested(three_level(), levels, cfg, rng);
    double bad = 0;
    for (double t : cfg.observation_times) {
      for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
        if (!out.at(levels[i]).snapshot(t).measure.included_in(out.at(levels[i + 1]).snapshot(t).measure)) ++bad;
      }
    }
    return bad;
  });
  double total = 0;
  for (double v : violations) total += v;
  report(4, "nested coupling inclusion", total == 0.0,
         format_real(total) + " violations over 1000 replicas and " +
             std::to_string(cfg.observation_times.size()) + " times");
}

void censored_mass() {
  CharacteristicTriple t = three_level();
  t.lambda.declared_levels.clear();
  t.lambda.components.push_back({0.3, RankedPointMeasure{-1.5}});
  t.lambda.components.push_back({0.2, RankedPointMeasure{-2.0, -2.5}});
  std::vector<EstimatorReport> rs;
  for (double n : {1.0, 2.0, 4.0}) rs.push_back(check_censored_mass(t, 8.0, n, 1.0, options(100'000, 105)));
  bool all = true;
  for (const auto& r : rs) all = all && r.pass;
  report(5, "censored-mass identity at n=1,2,4", all, describe(rs));
}

FiniteBirthParams genealogy_model() {
  FiniteBirthParams p;
  p.motion.drift = 0.2;
  p.motion.jumps = {{0.8, PointMassJump{-0.5}}, {0.4, UniformJump{-1.0, 1.0}}};
  p.motion.kill_rate = 0.2;
  p.beta = 1.5;
  p.rho = OffspringLaw({{1.0, RankedPointMeasure{0.0, -0.25}},
                        {0.5, RankedPointMeasure{0.5, 0.0, -1.0}},
                        {0.2, RankedPointMeasure{}}});
  return p;
}

void coagulation() {
  SimulationConfig cfg;
  cfg.horizon = 1.0;
  cfg.observation_times = dyadic(1.0, 8);
  const auto& grid = cfg.observation_times;
  std::size_t violations = 0, triples = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    RandomStream rng = RandomStream::substream(106, i);
    const auto f = simulate_finite(genealogy_model(), cfg, rng);
    for (std::size_t a = 0; a < grid.size(); ++a) {
      for (std::size_t b = a; b < grid.size(); ++b) {
        const auto prs = f.partition(grid[a], grid[b]);
        if (prs.blocks != oracle::descent_blocks(f, grid[a], grid[b])) ++violations;
        for (std::size_t c = b; c < grid.size(); ++c) {
          ++triples;
          const auto pru = f.partition(grid[a], grid[c]);
          const auto psu = f.partition(grid[b], grid[c]);
          for (std::size_t j = 0; j < prs.blocks.size(); ++j) {
            std::vector<std::size_t> merged;
            for (std::size_t k : prs.blocks[j]) merged.insert(merged.end(), psu.blocks[k].begin(), psu.blocks[k].end());
            std::sort(merged.begin(), merged.end());
            if (merged != pru.blocks[j]) ++violations;
          }
        }
      }
    }
  }
  report(6, "genealogy coagulation over dyadic triples", violations == 0,
         std::to_string(violations) + " violations over " + std::to_string(triples) + " (forest, r, s, t) cases");
}

void round_trip() {
  std::mt19937_64 gen(107);
  std::uniform_int_distribution<int> weight(1, 16), atom(-24, 8), count(0, 5), drift(-8, 8);
  int mismatches = 0;
  for (int rep = 0; rep < 50; ++rep) {
    CharacteristicTriple t;
    t.sigma2 = weight(gen) / 8.0;
    t.a = drift(gen) / 4.0;
    t.theta = Theta(0.5);
    double deepest = 0;
    const int m = 1 + static_cast<int>(gen() % 6);
    for (int i = 0; i < m; ++i) {
      std::vector<double> xs(static_cast<std::size_t>(count(gen)));
      for (double& x : xs) x = atom(gen) / 8.0;
      RankedPointMeasure mu(xs);
      if (mu.size() == 1 && mu[0] == 0.0) mu = RankedPointMeasure{0.0, -0.125};
      for (double x : mu.atoms()) deepest = std::max(deepest, -x);
      t.lambda.components.push_back({weight(gen) / 8.0, mu});
    }
    const auto back = reassemble(decompose(t, std::floor(deepest) + 1), t.theta);
    if (back.sigma2 != t.sigma2 || back.a != t.a || !(back.theta == t.theta) ||
        oracle::canonical(back.lambda) != oracle::canonical(t.lambda)) {
      ++mismatches;
    }
  }
  report(7, "decompose/reassemble round trip", mismatches == 0,
         std::to_string(mismatches) + " mismatches over 50 random specs");
}

CharacteristicTriple support_case(double sigma2, double a, std::vector<LambdaComponent> comps) {
  CharacteristicTriple t;
  t.sigma2 = sigma2;
  t.a = a;
  t.lambda.components = std::move(comps);
  return t;
}

// Largest atom seen over the replicas at every observation time.
double highest_atom(const CharacteristicTriple& t, std::uint64_t seed) {
  double deepest = 1.0;
  for (const auto& c : t.lambda.components)
    for (double x : c.measure.atoms()) deepest = std::max(deepest, -x);
  const auto params = decompose(t, std::floor(deepest) + 1);
  SimulationConfig cfg;
  cfg.horizon = 1.5;
  cfg.observation_times = dyadic(1.5, 6);
  const auto tops = run_replicas(1000, seed, [&](RandomStream& rng, std::size_t) {
    const auto f = simulate_finite(params, cfg, rng);
    double top = -kNeverDies;
    for (double s : cfg.observation_times) {
      const auto m = f.snapshot(s).measure;
      if (!m.empty()) top = std::max(top, m.largest());
    }
    return top;
  });
  return *std::max_element(tops.begin(), tops.end());
}

void support() {
  using C = std::vector<LambdaComponent>;
  const std::vector<CharacteristicTriple> qualifying{
      support_case(0, 0, {{1.0, {0.0, 0.0}}}),
      support_case(0, -0.5, {{1.0, {0.0, 0.0}}}),
      support_case(0, -0.3, {{1.0, {0.0, -1.0}}, {0.5, {-0.5}}}),
      support_case(0, -0.25, {{0.5, {-0.5}}}),
      support_case(0, -1.0, {{0.8, {-0.25, -0.75}}, {0.4, {0.0, 0.0, -2.0}}}),
      support_case(0, 0, {{1.0, {-2.0}}, {1.0, {0.0, -3.0}}}),
      support_case(0, -0.4, {{0.6, {-0.5, -0.5}}, {0.3, {}}}),
      support_case(0, -0.4, {{1.2, {0.0, -0.5, -1.5}}, {0.2, {-1.25}}}),
      support_case(0, -0.8, {{0.7, {-0.125, -0.25}}, {0.9, {-0.75}}, {0.2, {-4.0, -4.0}}}),
      support_case(0, -2.0, {{2.0, {0.0, 0.0}}, {1.0, {-0.5, -0.5, -0.5}}}),
  };
  const std::vector<CharacteristicTriple> non_qualifying{
      support_case(0.5, 0, {{1.0, {0.0, 0.0}}}),
      support_case(0, 0.3, {{1.0, {0.0, 0.0}}}),
      support_case(0, 0, {{1.0, {0.5, -0.5}}}),
      support_case(0, 0, {{1.0, {0.0, 0.25}}}),
      support_case(0, 0, {{1.5, {-0.5, -0.5}}}),  // compensation turns a = 0 into a positive drift
  };
  int good = 0, bad = 0;
  std::string detail;
  std::uint64_t seed = 108;
  for (const auto& t : qualifying) {
    const bool verdict = check_support_negative(t).overall() == Verdict::Pass;
    const double top = highest_atom(t, seed++);
    if (verdict && top <= 0.0) ++good;
    else detail += " qualifying case failed (verdict=" + std::to_string(verdict) + " top=" + format_real(top) + ")";
  }
  for (const auto& t : non_qualifying) {
    const bool verdict = check_support_negative(t).overall() == Verdict::Pass;
    const double top = highest_atom(t, seed++);
    if (!verdict && top > 0.0) ++bad;
    else detail += " non-qualifying case failed (verdict=" + std::to_string(verdict) + " top=" + format_real(top) + ")";
  }
  report(8, "support in (-inf, 0]", good == 10 && bad == 5,
         std::to_string(good) + "/10 qualifying stay <= 0, " + std::to_string(bad) + "/5 non-qualifying go above 0" +
             detail);
}

void branching_property() {
  int passes = 0;
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    if (check_branching_property(mixed(), Theta(0.5), 0.5, 0.5, 10'000, 200 + rep).pass) ++passes;
  }
  report(9, "branching property KS test", passes >= 19, std::to_string(passes) + "/20 repetitions pass at 0.01");
}

void determinism() {
  oracle::TempDir dir("acceptance");
  const auto cfg = dir.write("yule.json", R"({
    "finite_birth": {"beta": 1, "offspring": [{"rate": 1, "atoms": [0, 0]}]},
    "simulation": {"horizon": 1, "observation_times": [0.5, 1]},
    "verify": {"t": 1, "replicas": 5000}
  })");
  bool same = true;
  std::string detail;
  for (const std::string command : {"verify", "simulate", "kappa"}) {
    std::string outputs[2];
    int codes[2];
    for (int i = 0; i < 2; ++i) {
      cli::RunManifest m;
      m.command = command;
      m.config_path = cfg;
      m.out_dir = (dir.path() / (command + std::to_string(i))).string();
      m.replicas = command == "simulate" ? std::optional<std::size_t>(20) : std::nullopt;
      m.threads = i == 0 ? 1 : 4;
      std::ostringstream out, err;
      codes[i] = cli::run(m, out, err);
      for (const auto& e : std::filesystem::recursive_directory_iterator(m.out_dir)) {
        if (e.is_regular_file()) outputs[i] += e.path().filename().string() + "\n" + oracle::slurp(e.path());
      }
    }
    const bool ok = codes[0] == codes[1] && !outputs[0].empty() && outputs[0] == outputs[1];
    detail += " " + command + (ok ? "=identical" : "=differs");
    same = same && ok;
  }
  report(10, "CLI determinism", same, detail.substr(1));
}

}  // namespace

int main() {
  const std::pair<const char*, void (*)()> criteria[] = {
      {"cumulant_yule", cumulant_yule}, {"cumulant_bbm", cumulant_bbm},   {"many_to_one", many_to_one},
      {"nested", nested_inclusion},     {"censored", censored_mass},     {"coagulation", coagulation},
      {"round_trip", round_trip},       {"support", support},            {"branching", branching_property},
      {"determinism", determinism},
  };
  int id = 1;
  for (const auto& [name, fn] : criteria) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(id, name, false, std::string("exception: ") + e.what());
    }
    ++id;
  }
  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << std::endl;
  return failures == 0 ? 0 : 1;
}
