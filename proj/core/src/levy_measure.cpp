#include "blp/levy_measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace blp {
namespace {

using cplx = std::complex<double>;
constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_zero_singleton(const RankedPointMeasure& m) { return m.size() == 1 && m[0] == 0.0; }

double first_atom_compensator(const RankedPointMeasure& m) {
  if (m.empty()) return 0.0;
  const double x1 = m.largest();
  return std::abs(x1) < 1.0 ? x1 : 0.0;
}

// term(k) = sum_j coef_j * q_j^k for every k >= onset.
struct GeometricTerm {
  cplx coef;
  cplx q;
};

std::vector<GeometricTerm> group_terms(const std::vector<GeometricTerm>& terms) {
  std::vector<GeometricTerm> grouped;
  for (const auto& t : terms) {
    auto it = std::find_if(grouped.begin(), grouped.end(), [&](const GeometricTerm& g) { return g.q == t.q; });
    if (it == grouped.end()) {
      grouped.push_back(t);
    } else {
      it->coef += t.coef;
    }
  }
  std::erase_if(grouped, [](const GeometricTerm& g) { return g.coef == 0.0 || g.q == 0.0; });
  return grouped;
}

cplx complex_pow(cplx q, std::size_t k) {
  if (q.imag() == 0.0) return std::pow(q.real(), static_cast<double>(k));
  return std::pow(q, static_cast<double>(k));
}

// Sum over k >= 1 of term(k), where term(k) is computed explicitly below
// `onset` and follows the geometric form `tail` from `onset` on.
SeriesResult geometric_series(const std::function<cplx(std::size_t)>& term, std::size_t onset,
                              const std::vector<GeometricTerm>& tail, const SeriesOptions& opts) {
  SeriesResult out;
  const auto grouped = group_terms(tail);
  for (const auto& g : grouped) {
    if (std::abs(g.q) >= 1.0) {
      out.status = SeriesStatus::Divergent;
      out.value = kInf;
      out.tail_bound = kInf;
      return out;
    }
  }
  if (onset > opts.max_terms + 1) {
    out.status = SeriesStatus::Unknown;
    out.value = std::numeric_limits<double>::quiet_NaN();
    out.tail_bound = kInf;
    return out;
  }
  cplx sum = 0.0;
  for (std::size_t k = 1; k < onset; ++k) sum += term(k);
  out.explicit_terms = onset - 1;
  for (const auto& g : grouped) {
    const cplx qk = complex_pow(g.q, onset);
    sum += g.coef * qk / (1.0 - g.q);
    out.tail_bound += std::abs(g.coef) * std::abs(qk) / (1.0 - std::abs(g.q));
  }
  out.value = sum;
  return out;
}

// Smallest k >= 1 with pred(k), for predicates of the form k * |t| >= c that
// become true near `estimate`. Returns max_terms + 2 when out of budget.
std::size_t first_k(double estimate, const std::function<bool(std::size_t)>& pred,
                    const SeriesOptions& opts) {
  const std::size_t cap = opts.max_terms + 2;
  if (!(estimate < static_cast<double>(cap))) return cap;
  std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(estimate)));
  while (k > 1 && pred(k - 1)) --k;
  while (!pred(k)) {
    if (++k >= cap) return cap;
  }
  return k;
}

// First k with |k * t1| >= 1, i.e. where the compensator 1_{|x1|<1} switches off.
std::size_t compensator_onset(const GeometricCascade& c, const SeriesOptions& opts) {
  if (c.atom_template.empty() || c.atom_template[0] == 0.0) return 1;
  const double t1 = c.atom_template[0];
  return first_k(1.0 / std::abs(t1),
                 [t1](std::size_t k) { return std::abs(static_cast<double>(k) * t1) >= 1.0; }, opts);
}

SeriesStatus combine(SeriesStatus a, SeriesStatus b) {
  if (a == SeriesStatus::Divergent || b == SeriesStatus::Divergent) return SeriesStatus::Divergent;
  if (a == SeriesStatus::Unknown || b == SeriesStatus::Unknown) return SeriesStatus::Unknown;
  return SeriesStatus::Converged;
}

void accumulate(SeriesResult& total, const SeriesResult& part) {
  total.status = combine(total.status, part.status);
  total.value += part.value;
  total.tail_bound += part.tail_bound;
  total.explicit_terms += part.explicit_terms;
}

Verdict verdict_of(SeriesStatus s) {
  switch (s) {
    case SeriesStatus::Converged: return Verdict::Pass;
    case SeriesStatus::Divergent: return Verdict::Fail;
    case SeriesStatus::Unknown: break;
  }
  return Verdict::Unknown;
}

IntegralCheck integral_check(const SeriesResult& r) {
  return {verdict_of(r.status), r.value.real(), r.tail_bound};
}

// Integral of a component functional over the whole of Lambda: explicit sum
// over finite components plus one geometric series per cascade.
template <class Finite, class Cascade>
SeriesResult integrate(const LambdaSpec& lambda, Finite&& finite, Cascade&& cascade) {
  SeriesResult total;
  for (const auto& c : lambda.components) total.value += c.weight * finite(c.measure);
  for (const auto& c : lambda.cascades) accumulate(total, cascade(c));
  return total;
}

void check_declared(const LambdaSpec& lambda, double n) {
  if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("truncation level must be positive");
  if (lambda.declared_levels.empty()) return;
  if (std::find(lambda.declared_levels.begin(), lambda.declared_levels.end(), n) ==
      lambda.declared_levels.end()) {
    throw std::invalid_argument("truncation level " + format_real(n) + " is not declared");
  }
}

}  // namespace

const char* to_string(SeriesStatus s) noexcept {
  switch (s) {
    case SeriesStatus::Converged: return "converged";
    case SeriesStatus::Divergent: return "divergent";
    case SeriesStatus::Unknown: break;
  }
  return "unknown";
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Unknown: break;
  }
  return "unknown";
}

double GeometricCascade::weight(std::size_t k) const {
  return base_weight * std::pow(ratio, static_cast<double>(k));
}

RankedPointMeasure GeometricCascade::measure(std::size_t k) const {
  std::vector<double> atoms(atom_template.atoms().begin(), atom_template.atoms().end());
  for (double& x : atoms) x *= static_cast<double>(k);
  return RankedPointMeasure(std::move(atoms));
}

void LambdaSpec::validate() const {
  for (const auto& c : components) {
    if (!(c.weight > 0.0) || !std::isfinite(c.weight)) {
      throw std::invalid_argument("Lambda component weights must be positive and finite");
    }
    if (is_zero_singleton(c.measure)) {
      throw std::invalid_argument("Lambda must not charge the measure {0}");
    }
  }
  for (const auto& c : cascades) {
    if (!(c.base_weight > 0.0) || !std::isfinite(c.base_weight) || !(c.ratio > 0.0) ||
        !std::isfinite(c.ratio)) {
      throw std::invalid_argument("cascade needs positive finite base_weight and ratio");
    }
    if (is_zero_singleton(c.atom_template)) {
      throw std::invalid_argument("cascade template {0} charges the measure {0}");
    }
  }
  for (double n : declared_levels) {
    if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("declared levels must be positive");
  }
}

void CharacteristicTriple::validate() const {
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw std::invalid_argument("sigma2 must be >= 0");
  if (!std::isfinite(a)) throw std::invalid_argument("a must be finite");
  lambda.validate();
}

OffspringLaw::OffspringLaw(std::vector<OffspringOutcome> outcomes) : outcomes_(std::move(outcomes)) {
  cumulative_.reserve(outcomes_.size());
  for (const auto& o : outcomes_) {
    if (!(o.rate > 0.0) || !std::isfinite(o.rate)) {
      throw std::invalid_argument("offspring rates must be positive and finite");
    }
    total_ += o.rate;
    cumulative_.push_back(total_);
  }
}

double OffspringLaw::mean_count() const {
  double mean = 0.0;
  for (const auto& o : outcomes_) mean += o.rate * static_cast<double>(o.displacements.size());
  return outcomes_.empty() ? 0.0 : mean / total_;
}

const RankedPointMeasure& OffspringLaw::sample(RandomStream& rng) const {
  static const RankedPointMeasure kEmpty;
  if (outcomes_.empty()) return kEmpty;
  return outcomes_[rng.discrete(cumulative_)].displacements;
}

void FiniteBirthParams::validate() const {
  motion.validate();
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be >= 0");
  for (const auto& o : rho.outcomes()) {
    if (o.displacements.size() == 1) {
      throw std::invalid_argument("offspring law must not charge single-atom measures");
    }
    if (beta == 0.0 && !o.displacements.empty()) {
      throw std::invalid_argument("beta = 0 requires the offspring law to be the empty measure");
    }
  }
}

LambdaSpec truncate_lambda(const LambdaSpec& lambda, double n, const SeriesOptions& opts) {
  check_declared(lambda, n);
  LambdaSpec out;
  auto push = [&](double w, RankedPointMeasure m) {
    if (w > 0.0 && !is_zero_singleton(m)) out.components.push_back({w, std::move(m)});
  };
  for (const auto& c : lambda.components) push(c.weight, truncate(c.measure, n));

  for (const auto& c : lambda.cascades) {
    const auto atoms = c.atom_template.atoms();
    if (!atoms.empty() && atoms[0] > 0.0) {
      throw std::invalid_argument("cascade with positive template atoms has no finite truncation");
    }
    const auto zeros = static_cast<std::size_t>(std::count(atoms.begin(), atoms.end(), 0.0));
    // Last k whose shallowest negative atom k * t survives truncation.
    std::size_t last = 0;
    const auto neg = std::find_if(atoms.begin(), atoms.end(), [](double x) { return x < 0.0; });
    if (neg != atoms.end()) {
      const double t = *neg;
      const std::size_t onset =
          first_k(n / -t, [t, n](std::size_t k) { return static_cast<double>(k) * t < -n; }, opts);
      if (onset > opts.max_terms + 1) throw SeriesError("truncation needs too many cascade terms");
      last = onset - 1;
    }
    for (std::size_t k = 1; k <= last; ++k) push(c.weight(k), truncate(c.measure(k), n));
    if (zeros == 1) continue;  // the merged tail is the measure {0}
    if (!(c.ratio < 1.0)) throw SeriesError("truncated cascade has infinite mass");
    const double tail = c.base_weight * std::pow(c.ratio, static_cast<double>(last + 1)) / (1.0 - c.ratio);
    push(tail, RankedPointMeasure(std::vector<double>(zeros, 0.0)));
  }
  return out;
}

FiniteBirthParams decompose(const CharacteristicTriple& triple, double n, const SeriesOptions& opts) {
  triple.validate();
  const LambdaSpec trunc = truncate_lambda(triple.lambda, n, opts);
  FiniteBirthParams p;
  p.motion.sigma2 = triple.sigma2;
  std::vector<OffspringOutcome> outcomes;
  double compensator = 0.0;
  double beta = 0.0;
  for (const auto& c : trunc.components) {
    if (c.measure.empty()) {
      p.motion.kill_rate += c.weight;
    } else if (c.measure.size() == 1) {
      p.motion.jumps.push_back({c.weight, PointMassJump{c.measure[0]}});
    } else {
      outcomes.push_back({c.weight, c.measure});
      beta += c.weight;
      compensator += c.weight * first_atom_compensator(c.measure);
    }
  }
  p.motion.drift = triple.a - compensator;
  p.beta = beta;
  p.rho = OffspringLaw(std::move(outcomes));
  return p;
}

CharacteristicTriple reassemble(const FiniteBirthParams& params, Theta theta) {
  params.validate();
  CharacteristicTriple t;
  t.sigma2 = params.motion.sigma2;
  t.theta = theta;
  double a = params.motion.drift;
  for (const auto& j : params.motion.jumps) {
    const auto* p = std::get_if<PointMassJump>(&j.law);
    if (!p) throw std::invalid_argument("reassemble: only point-mass motion jumps are supported");
    t.lambda.components.push_back({j.rate, RankedPointMeasure::dirac(p->position)});
  }
  if (params.beta > 0.0) {
    const double total = params.rho.total_rate();
    const double scale = params.rho.empty() || total == params.beta ? 1.0 : params.beta / total;
    if (params.rho.empty()) {
      t.lambda.components.push_back({params.beta, RankedPointMeasure{}});
    }
    for (const auto& o : params.rho.outcomes()) {
      const double w = o.rate * scale;
      t.lambda.components.push_back({w, o.displacements});
      a += w * first_atom_compensator(o.displacements);
    }
  }
  if (params.motion.kill_rate > 0.0) {
    t.lambda.components.push_back({params.motion.kill_rate, RankedPointMeasure{}});
  }
  t.a = a;
  return t;
}

SeriesResult kappa_series(const CharacteristicTriple& triple, cplx z, const SeriesOptions& opts) {
  auto integrand = [z](const RankedPointMeasure& m) {
    return exponential_integral(m, z) - 1.0 - z * first_atom_compensator(m);
  };
  SeriesResult r = integrate(
      triple.lambda, integrand, [&](const GeometricCascade& c) {
        std::vector<GeometricTerm> tail;
        const cplx w0 = c.base_weight;
        for (double t : c.atom_template.atoms()) tail.push_back({w0, c.ratio * std::exp(z * t)});
        tail.push_back({-w0, c.ratio});
        return geometric_series([&](std::size_t k) { return c.weight(k) * integrand(c.measure(k)); },
                                compensator_onset(c, opts), tail, opts);
      });
  r.value += 0.5 * triple.sigma2 * z * z + triple.a * z;
  return r;
}

cplx kappa(const CharacteristicTriple& triple, cplx z, const SeriesOptions& opts) {
  const SeriesResult r = kappa_series(triple, z, opts);
  if (r.status != SeriesStatus::Converged) {
    throw SeriesError(std::string("cumulant series is ") + to_string(r.status));
  }
  return r.value;
}

cplx kappa_truncated(const CharacteristicTriple& triple, double n, cplx z, const SeriesOptions& opts) {
  CharacteristicTriple t = triple;
  t.lambda = truncate_lambda(triple.lambda, n, opts);
  return kappa(t, z, opts);
}

double kappa_gap(const CharacteristicTriple& triple, double n, const SeriesOptions& opts) {
  const double theta = triple.theta.value();
  return (kappa(triple, theta, opts) - kappa_truncated(triple, n, theta, opts)).real();
}

cplx cumulant(const FiniteBirthParams& params, cplx z) {
  cplx value = levy_exponent(params.motion, z) - params.motion.kill_rate;
  if (params.beta > 0.0) {
    if (params.rho.empty()) return value - params.beta;
    const double scale = params.rho.total_rate() == params.beta ? 1.0 : params.beta / params.rho.total_rate();
    for (const auto& o : params.rho.outcomes()) {
      value += o.rate * scale * (exponential_integral(o.displacements, z) - 1.0);
    }
  }
  return value;
}

Verdict AdmissibilityReport::overall() const noexcept {
  const Verdict all[] = {small_jumps.verdict, large_first.verdict, offspring.verdict};
  if (std::find(std::begin(all), std::end(all), Verdict::Fail) != std::end(all)) return Verdict::Fail;
  if (std::find(std::begin(all), std::end(all), Verdict::Unknown) != std::end(all)) return Verdict::Unknown;
  return Verdict::Pass;
}

AdmissibilityReport check_admissible(const CharacteristicTriple& triple, const SeriesOptions& opts) {
  triple.validate();
  const double theta = triple.theta.value();
  AdmissibilityReport rep;

  auto small = [](const RankedPointMeasure& m) -> cplx {
    if (m.empty()) return 1.0;
    return std::min(1.0, m.largest() * m.largest());
  };
  rep.small_jumps = integral_check(integrate(triple.lambda, small, [&](const GeometricCascade& c) {
    std::vector<GeometricTerm> tail;
    const bool flat = !c.atom_template.empty() && c.atom_template[0] == 0.0;
    if (!flat) tail.push_back({c.base_weight, c.ratio});
    return geometric_series([&](std::size_t k) { return c.weight(k) * small(c.measure(k)); },
                            compensator_onset(c, opts), tail, opts);
  }));

  auto large = [theta](const RankedPointMeasure& m) -> cplx {
    if (m.empty() || !(m.largest() > 1.0)) return 0.0;
    return std::exp(theta * m.largest());
  };
  rep.large_first = integral_check(integrate(triple.lambda, large, [&](const GeometricCascade& c) {
    if (c.atom_template.empty() || !(c.atom_template[0] > 0.0)) return SeriesResult{};
    const double t1 = c.atom_template[0];
    const std::size_t onset =
        first_k(1.0 / t1, [t1](std::size_t k) { return static_cast<double>(k) * t1 > 1.0; }, opts);
    return geometric_series([&](std::size_t k) { return c.weight(k) * large(c.measure(k)); }, onset,
                            {{c.base_weight, c.ratio * std::exp(theta * t1)}}, opts);
  }));

  auto offspring = [theta](const RankedPointMeasure& m) -> cplx {
    double s = 0.0;
    for (std::size_t i = 1; i < m.size(); ++i) s += std::exp(theta * m[i]);
    return s;
  };
  rep.offspring = integral_check(integrate(triple.lambda, offspring, [&](const GeometricCascade& c) {
    std::vector<GeometricTerm> tail;
    for (std::size_t i = 1; i < c.atom_template.size(); ++i) {
      tail.push_back({c.base_weight, c.ratio * std::exp(theta * c.atom_template[i])});
    }
    return geometric_series([](std::size_t) { return cplx{}; }, 1, tail, opts);
  }));
  return rep;
}

SeriesResult projected_levy_measure_integral(const CharacteristicTriple& triple,
                                             const std::function<double(double)>& f,
                                             std::optional<Envelope> envelope,
                                             const SeriesOptions& opts) {
  const double theta = triple.theta.value();
  auto integrand = [&](const RankedPointMeasure& m) {
    double s = 0.0;
    for (double x : m.atoms()) {
      if (x != 0.0) s += f(x) * std::exp(theta * x);
    }
    return s;
  };
  SeriesResult out;
  for (const auto& c : triple.lambda.components) out.value += c.weight * integrand(c.measure);

  for (const auto& c : triple.lambda.cascades) {
    SeriesResult part;
    std::vector<std::pair<double, double>> geo;  // (q, |t|) per non-zero template atom
    for (double t : c.atom_template.atoms()) {
      if (t != 0.0) geo.emplace_back(c.ratio * std::exp(theta * t), std::abs(t));
    }
    if (geo.empty()) continue;
    const bool bounded = std::all_of(geo.begin(), geo.end(), [](const auto& g) { return g.first < 1.0; });
    if (!envelope || !bounded) {
      part.status = SeriesStatus::Unknown;
      part.value = std::numeric_limits<double>::quiet_NaN();
      part.tail_bound = kInf;
      accumulate(out, part);
      continue;
    }
    // Tail after k: sum_{j>k} w0 q^j (A + B j |t|).
    auto tail_after = [&](std::size_t k) {
      const double kk = static_cast<double>(k);
      double bound = 0.0;
      for (const auto& [q, t] : geo) {
        const double qk1 = std::pow(q, kk + 1.0);
        bound += c.base_weight * (envelope->constant * qk1 / (1.0 - q) +
                                  envelope->slope * t * qk1 * ((kk + 1.0) - kk * q) / ((1.0 - q) * (1.0 - q)));
      }
      return bound;
    };
    double sum = 0.0;
    std::size_t k = 0;
    double bound = tail_after(0);
    while (bound > opts.rel_tol * std::abs(out.value.real() + sum) &&
           bound > std::numeric_limits<double>::min()) {
      if (k >= opts.max_terms) {
        part.status = SeriesStatus::Unknown;
        break;
      }
      ++k;
      sum += c.weight(k) * integrand(c.measure(k));
      bound = tail_after(k);
    }
    part.value = sum;
    part.tail_bound = bound;
    part.explicit_terms = k;
    accumulate(out, part);
  }
  return out;
}

Verdict SupportReport::overall() const noexcept {
  const Verdict all[] = {no_upward_part, finite_variation, nonpositive_drift};
  if (std::find(std::begin(all), std::end(all), Verdict::Fail) != std::end(all)) return Verdict::Fail;
  if (std::find(std::begin(all), std::end(all), Verdict::Unknown) != std::end(all)) return Verdict::Unknown;
  return Verdict::Pass;
}

SupportReport check_support_negative(const CharacteristicTriple& triple, const SeriesOptions& opts) {
  triple.validate();
  SupportReport rep;

  for (const auto& c : triple.lambda.components) {
    if (!c.measure.empty() && c.measure.largest() > 0.0) rep.positive_mass += c.weight;
  }
  for (const auto& c : triple.lambda.cascades) {
    if (!c.atom_template.empty() && c.atom_template[0] > 0.0) {
      rep.positive_mass += c.ratio < 1.0 ? c.base_weight * c.ratio / (1.0 - c.ratio) : kInf;
    }
  }
  rep.no_upward_part = triple.sigma2 == 0.0 && rep.positive_mass == 0.0 ? Verdict::Pass : Verdict::Fail;

  auto variation = [](const RankedPointMeasure& m) -> cplx {
    if (m.empty()) return 1.0;
    return std::min(1.0, std::abs(m.largest()));
  };
  const SeriesResult var = integrate(triple.lambda, variation, [&](const GeometricCascade& c) {
    std::vector<GeometricTerm> tail;
    const bool flat = !c.atom_template.empty() && c.atom_template[0] == 0.0;
    if (!flat) tail.push_back({c.base_weight, c.ratio});
    return geometric_series([&](std::size_t k) { return c.weight(k) * variation(c.measure(k)); },
                            compensator_onset(c, opts), tail, opts);
  });
  rep.variation_value = var.value.real();
  rep.finite_variation = verdict_of(var.status);

  auto comp = [](const RankedPointMeasure& m) -> cplx { return first_atom_compensator(m); };
  const SeriesResult drift = integrate(triple.lambda, comp, [&](const GeometricCascade& c) {
    return geometric_series([&](std::size_t k) { return c.weight(k) * comp(c.measure(k)); },
                            compensator_onset(c, opts), {}, opts);
  });
  rep.drift_value = triple.a - drift.value.real();
  if (drift.status != SeriesStatus::Converged) {
    rep.nonpositive_drift = Verdict::Unknown;
  } else {
    rep.nonpositive_drift = rep.drift_value <= 0.0 ? Verdict::Pass : Verdict::Fail;
  }
  return rep;
}

}  // namespace blp
