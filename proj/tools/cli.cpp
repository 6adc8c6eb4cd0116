#include "cli.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "blp/verify.hpp"
#include "config.hpp"

namespace blp::cli {
namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

class CsvFile {
 public:
  CsvFile(const fs::path& path, const std::string& hash, const std::string& header) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_ << "# manifest=" << hash << '\n' << header << '\n';
  }
  std::ofstream& stream() { return out_; }

 private:
  std::ofstream out_;
};

struct Context {
  const RunManifest& manifest;
  ModelConfig config;
  std::string hash;
  fs::path out_dir;
  std::ostream& out;
};

FiniteBirthParams resolve_params(const ModelConfig& cfg) {
  if (cfg.params) return *cfg.params;
  try {
    return decompose(*cfg.triple, simulation_level(cfg));
  } catch (const SeriesError& e) {
    throw ConfigError(std::string("decomposition failed: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("decomposition failed: ") + e.what());
  }
}

std::optional<CharacteristicTriple> triple_of(const ModelConfig& cfg) {
  if (cfg.triple) return cfg.triple;
  try {
    return reassemble(*cfg.params, cfg.theta);
  } catch (const std::invalid_argument&) {
    return std::nullopt;  // motion jumps without a point-mass form
  }
}

VerifyOptions verify_options(const Context& ctx) {
  VerifyOptions o;
  o.replicas = ctx.manifest.replicas.value_or(ctx.config.verify.replicas);
  o.seed = ctx.manifest.seed;
  o.k = ctx.manifest.k;
  o.threads = ctx.manifest.threads;
  o.max_particles = ctx.config.simulation.max_particles;
  return o;
}

std::vector<double> nested_levels(const Context& ctx) {
  if (!ctx.manifest.levels.empty()) return ctx.manifest.levels;
  if (!ctx.config.levels.empty()) return ctx.config.levels;
  if (ctx.config.triple) return ctx.config.triple->lambda.declared_levels;
  return {};
}

int cmd_simulate(Context& ctx) {
  const FiniteBirthParams params = resolve_params(ctx.config);
  const SimulationConfig& sim = ctx.config.simulation;
  const std::size_t replicas = ctx.manifest.replicas.value_or(1);
  const auto forests = run_replicas(
      replicas, ctx.manifest.seed, [&](RandomStream& rng, std::size_t) { return simulate_finite(params, sim, rng); },
      ctx.manifest.threads);

  CsvFile snaps(ctx.out_dir / "snapshots.csv", ctx.hash, "replica,time,rank,label,position");
  const fs::path forest_dir = ctx.out_dir / "forests";
  fs::create_directories(forest_dir);
  for (std::size_t i = 0; i < forests.size(); ++i) {
    for (double t : sim.observation_times) {
      const Snapshot snap = forests[i].snapshot(t);
      for (std::size_t r = 0; r < snap.records.size(); ++r) {
        snaps.stream() << i << ',' << format_real(t) << ',' << r + 1 << ','
                       << forests[i].record(snap.records[r]).label.to_string() << ','
                       << format_real(snap.measure[r]) << '\n';
      }
    }
    char name[32];
    std::snprintf(name, sizeof name, "forest_%05zu.txt", i);
    std::ofstream(forest_dir / name, std::ios::binary) << forests[i].export_text();
  }
  ctx.out << "simulated " << replicas << " replica(s); wrote snapshots.csv and forests/\n";
  return kPass;
}

int cmd_verify(Context& ctx) {
  const FiniteBirthParams params = resolve_params(ctx.config);
  const VerifySection& v = ctx.config.verify;
  const VerifyOptions opts = verify_options(ctx);
  const Theta theta = ctx.config.theta;
  const double th = theta.value();
  std::vector<EstimatorReport> reports;

  reports.push_back(check_cumulant(params, v.t, v.z.value_or(th), opts));
  reports.push_back(check_martingale_normalization(params, v.t, v.r, theta, opts));

  const std::pair<const char*, PointFunction> fs_[] = {
      {"f=1", [](double) { return 1.0; }},
      {"f=1{x>0}", [](double x) { return x > 0.0 ? 1.0 : 0.0; }},
      {"f=exp(-x^2)", [](double x) { return std::exp(-x * x); }},
  };
  for (const auto& [name, f] : fs_) {
    reports.push_back(check_many_to_one(params, v.t, theta, f, opts));
    reports.back().parameters += std::string(";") + name;
  }

  const std::size_t mid = (v.grid.size() - 1) / 2;
  const std::pair<const char*, PathFunctional> Fs[] = {
      {"F=1{min>-1}",
       [](std::span<const double> p) { return *std::min_element(p.begin(), p.end()) > -1.0 ? 1.0 : 0.0; }},
      {"F=max", [](std::span<const double> p) { return *std::max_element(p.begin(), p.end()); }},
      {"F=1{mid>end}", [mid](std::span<const double> p) { return p[mid] > p.back() ? 1.0 : 0.0; }},
  };
  for (const auto& [name, F] : Fs) {
    reports.push_back(check_pathwise_many_to_one(params, v.t, theta, v.grid, F, opts));
    reports.back().parameters += std::string(";") + name;
  }

  reports.push_back(weighted_intensity(params, theta, [](double) { return 1.0; }, opts));
  reports.push_back(weighted_intensity_fourier(params, theta, v.r, opts));
  reports.push_back(check_spine_characteristic(params, theta, v.t, v.r, opts));

  if (ctx.config.triple && !v.censor_levels.empty()) {
    const double top = v.top_level.value_or(simulation_level(ctx.config));
    for (double n : v.censor_levels) reports.push_back(check_censored_mass(*ctx.config.triple, top, n, v.t, opts));
  }

  CsvFile csv(ctx.out_dir / "report.csv", ctx.hash, report_csv_header());
  bool all = true;
  for (const auto& r : reports) {
    csv.stream() << to_csv_row(r) << '\n';
    ctx.out << (r.pass ? "PASS " : "FAIL ") << r.check << " [" << r.parameters << "] z=" << format_real(r.z_re);
    if (r.complex_valued) ctx.out << "," << format_real(r.z_im);
    ctx.out << '\n';
    all = all && r.pass;
  }
  if (v.ks_samples > 0) {
    const auto ks = check_branching_property(params, theta, v.ks_s, v.ks_t, v.ks_samples, opts.seed, 0.01,
                                             opts.threads, opts.max_particles);
    EstimatorReport row;
    row.check = "branching_property";
    row.parameters = "s=" + format_real(v.ks_s) + ";t=" + format_real(v.ks_t) + ";estimate=D;target=p_value";
    row.estimate = ks.ks.statistic;
    row.target = ks.ks.p_value;
    row.n_replicas = ks.n;
    row.k = opts.k;
    row.pass = ks.pass;
    csv.stream() << to_csv_row(row) << '\n';
    ctx.out << (ks.pass ? "PASS " : "FAIL ") << "branching_property D=" << format_real(ks.ks.statistic)
            << " p=" << format_real(ks.ks.p_value) << '\n';
    all = all && ks.pass;
  }
  return all ? kPass : kCheckFailed;
}

int cmd_kappa(Context& ctx) {
  const double th = ctx.config.theta.value();
  CsvFile csv(ctx.out_dir / "kappa.csv", ctx.hash, "r,kappa_re,kappa_im,psi_re,psi_im");
  auto k = [&](std::complex<double> z) {
    if (ctx.config.triple) return kappa(*ctx.config.triple, z);
    return cumulant(*ctx.config.params, z);
  };
  const std::complex<double> k0 = k(th);
  for (double r : ctx.config.kappa.r) {
    const std::complex<double> kz = k({th, r});
    const std::complex<double> psi = kz - k0;
    csv.stream() << format_real(r) << ',' << format_real(kz.real()) << ',' << format_real(kz.imag()) << ','
                 << format_real(psi.real()) << ',' << format_real(psi.imag()) << '\n';
  }
  ctx.out << "wrote kappa.csv with " << ctx.config.kappa.r.size() << " frequencies\n";
  return kPass;
}

int cmd_check_measure(Context& ctx, const std::optional<AdmissibilityReport>& adm) {
  CsvFile csv(ctx.out_dir / "measure.csv", ctx.hash, "condition,verdict,value");
  auto row = [&](const std::string& name, Verdict v, double value) {
    csv.stream() << name << ',' << to_string(v) << ',' << format_real(value) << '\n';
    ctx.out << name << ": " << to_string(v) << " (" << format_real(value) << ")\n";
  };
  const auto triple = triple_of(ctx.config);
  if (adm) {
    row("small_jumps", adm->small_jumps.verdict, adm->small_jumps.value);
    row("large_first_atom", adm->large_first.verdict, adm->large_first.value);
    row("offspring", adm->offspring.verdict, adm->offspring.value);
    row("admissible", adm->overall(), 0.0);
  } else {
    row("admissible", Verdict::Pass, 0.0);
  }
  if (triple) {
    const SupportReport sup = check_support_negative(*triple);
    row("support_no_upward_part", sup.no_upward_part, sup.positive_mass);
    row("support_finite_variation", sup.finite_variation, sup.variation_value);
    row("support_nonpositive_drift", sup.nonpositive_drift, sup.drift_value);
    row("support_negative", sup.overall(), 0.0);
  }
  if (ctx.config.triple) {
    for (double n : nested_levels(ctx)) {
      try {
        row("kappa_gap@" + format_real(n), Verdict::Pass, kappa_gap(*ctx.config.triple, n));
      } catch (const std::exception&) {
        row("kappa_gap@" + format_real(n), Verdict::Unknown, std::nan(""));
      }
    }
  }
  return adm && adm->overall() != Verdict::Pass ? kInadmissible : kPass;
}

int cmd_nested(Context& ctx) {
  if (!ctx.config.triple) throw ConfigError("nested needs a 'model' section");
  std::vector<double> levels = nested_levels(ctx);
  if (levels.empty()) throw ConfigError("nested needs levels (--levels, nested.levels or declared_levels)");
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  const SimulationConfig& sim = ctx.config.simulation;
  const std::size_t replicas = ctx.manifest.replicas.value_or(1000);
  const CharacteristicTriple& triple = *ctx.config.triple;

  struct Row {
    std::vector<std::size_t> counts;  // [time][level]
    std::size_t violations = 0;
  };
  const auto rows = run_replicas(
      replicas, ctx.manifest.seed,
      [&](RandomStream& rng, std::size_t) {
        Row row;
        const auto forests = simulate_nested(triple, levels, sim, rng);
        for (double t : sim.observation_times) {
          std::vector<RankedPointMeasure> snaps;
          for (double n : levels) snaps.push_back(forests.at(n).snapshot(t).measure);
          for (std::size_t i = 0; i < snaps.size(); ++i) {
            row.counts.push_back(snaps[i].size());
            for (std::size_t j = i + 1; j < snaps.size(); ++j) {
              if (!snaps[i].included_in(snaps[j])) ++row.violations;
            }
          }
        }
        return row;
      },
      ctx.manifest.threads);

  CsvFile csv(ctx.out_dir / "nested.csv", ctx.hash, "replica,time,level,count");
  std::size_t violations = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::size_t c = 0;
    for (double t : sim.observation_times) {
      for (double n : levels) {
        csv.stream() << r << ',' << format_real(t) << ',' << format_real(n) << ',' << rows[r].counts[c++] << '\n';
      }
    }
    violations += rows[r].violations;
  }
  ctx.out << "nested: " << replicas << " replicas, " << levels.size() << " levels, " << violations
          << " inclusion violations\n";
  return violations == 0 ? kPass : kCheckFailed;
}

}  // namespace

std::string manifest_hash(const RunManifest& m, const std::string& config_text) {
  std::ostringstream canon;
  canon << m.command << '\n' << config_text << '\n' << m.seed << '\n'
        << (m.replicas ? std::to_string(*m.replicas) : "default") << '\n' << format_real(m.k) << '\n';
  for (double n : m.levels) canon << format_real(n) << ',';
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : canon.str()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

int run(const RunManifest& manifest, std::ostream& out, std::ostream& err) {
  static const char* const kCommands[] = {"simulate", "verify", "kappa", "check-measure", "nested"};
  if (std::find(std::begin(kCommands), std::end(kCommands), manifest.command) == std::end(kCommands)) {
    err << "unknown command '" << manifest.command << "'\n";
    return kConfigError;
  }
  try {
    const std::string text = read_file(manifest.config_path);
    Context ctx{manifest, parse_config(text), manifest_hash(manifest, text), manifest.out_dir, out};
    if (!(manifest.k > 0.0)) throw ConfigError("--k must be positive");
    fs::create_directories(ctx.out_dir);

    std::optional<AdmissibilityReport> adm;
    if (ctx.config.triple) adm = check_admissible(*ctx.config.triple);
    if (manifest.command == "check-measure") return cmd_check_measure(ctx, adm);
    if (adm && adm->overall() != Verdict::Pass) {
      err << "model is not admissible (small_jumps=" << to_string(adm->small_jumps.verdict)
          << ", large_first_atom=" << to_string(adm->large_first.verdict)
          << ", offspring=" << to_string(adm->offspring.verdict) << ")\n";
      return kInadmissible;
    }
    if (manifest.command == "simulate") return cmd_simulate(ctx);
    if (manifest.command == "verify") return cmd_verify(ctx);
    if (manifest.command == "kappa") return cmd_kappa(ctx);
    return cmd_nested(ctx);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const BudgetExceeded& e) {
    err << "aborted: " << e.what() << '\n';
    return kBudgetAbort;
  } catch (const SeriesError& e) {
    err << "series error: " << e.what() << '\n';
    return kInadmissible;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace blp::cli
