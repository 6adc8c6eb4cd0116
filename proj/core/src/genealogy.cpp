#include "blp/genealogy.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace blp {
namespace {

double parse_real(std::string_view s) {
  std::string field(s);
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (field.empty() || end != field.c_str() + field.size()) {
    throw std::invalid_argument("malformed number '" + field + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = s.find(sep, start);
    if (end == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, end - start));
    start = end + 1;
  }
}

bool carries_position(EventKind k) { return k == EventKind::MotionJump || k == EventKind::Observation; }

}  // namespace

UlamLabel::UlamLabel(std::vector<std::uint32_t> word) : word_(std::move(word)) {
  for (auto w : word_) {
    if (w == 0) throw std::invalid_argument("Ulam labels use positive integers");
  }
}

UlamLabel UlamLabel::child(std::uint32_t j) const {
  if (j == 0) throw std::invalid_argument("Ulam labels use positive integers");
  UlamLabel c = *this;
  c.word_.push_back(j);
  return c;
}

UlamLabel UlamLabel::parent() const {
  if (word_.empty()) throw std::logic_error("the ancestor has no parent");
  UlamLabel p = *this;
  p.word_.pop_back();
  return p;
}

bool UlamLabel::is_prefix_of(const UlamLabel& other) const noexcept {
  return word_.size() <= other.word_.size() &&
         std::equal(word_.begin(), word_.end(), other.word_.begin());
}

std::string UlamLabel::to_string() const {
  if (word_.empty()) return "root";
  std::string s;
  for (std::size_t i = 0; i < word_.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(word_[i]);
  }
  return s;
}

UlamLabel UlamLabel::parse(std::string_view text) {
  if (text == "root") return {};
  std::vector<std::uint32_t> word;
  for (auto part : split(text, '.')) {
    std::uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc{} || ptr != part.data() + part.size() || v == 0) {
      throw std::invalid_argument("malformed Ulam label '" + std::string(text) + "'");
    }
    word.push_back(v);
  }
  return UlamLabel(std::move(word));
}

double AncestralPath::value_at(double s) const {
  auto it = std::upper_bound(points.begin(), points.end(), s,
                             [](double v, const Point& p) { return v < p.time; });
  if (it == points.begin()) throw std::out_of_range("ancestral path: time before start");
  const Point& p = *std::prev(it);
  if (p.time == s) return p.position;
  if (gaussian) throw std::domain_error("ancestral path: Gaussian motion is only known at recorded times");
  return p.position + drift * (s - p.time);
}

AncestralPath AncestralPath::restricted(double s) const {
  AncestralPath out{{}, drift, gaussian};
  for (const auto& p : points) {
    if (p.time <= s) out.points.push_back(p);
  }
  return out;
}

GenealogyForest::GenealogyForest(double horizon, double drift, bool gaussian)
    : horizon_(horizon), drift_(drift), gaussian_(gaussian) {
  if (!(horizon > 0.0)) throw std::invalid_argument("forest horizon must be positive");
}

std::size_t GenealogyForest::add(ParticleRecord record) {
  if (index_.contains(record.label)) throw std::invalid_argument("duplicate label " + record.label.to_string());
  if (!(record.birth < record.death)) throw std::invalid_argument("record needs birth < death");
  const std::size_t id = records_.size();
  record.children.clear();
  if (record.label.is_root()) {
    record.parent.reset();
  } else {
    auto p = index_.find(record.label.parent());
    if (p == index_.end()) throw std::invalid_argument("parent of " + record.label.to_string() + " missing");
    record.parent = p->second;
    records_[p->second].children.push_back(id);
  }
  index_.emplace(record.label, id);
  records_.push_back(std::move(record));
  return id;
}

std::optional<std::size_t> GenealogyForest::find(const UlamLabel& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void GenealogyForest::check_time(double t) const {
  if (!(t >= 0.0) || t > horizon_) throw std::out_of_range("time outside [0, horizon]");
}

double GenealogyForest::position_at(std::size_t i, double t) const {
  const ParticleRecord& r = records_.at(i);
  if (!r.alive_at(t)) throw std::out_of_range("particle " + r.label.to_string() + " not alive at time");
  double time = r.birth;
  double pos = r.birth_position;
  for (const auto& ev : r.events) {
    if (ev.time > t) break;
    if (carries_position(ev.kind)) {
      time = ev.time;
      pos = ev.position;
    }
  }
  if (time == t) return pos;
  if (gaussian_) throw std::domain_error("Gaussian motion is only known at recorded times");
  return pos + drift_ * (t - time);
}

Snapshot GenealogyForest::snapshot(double t) const {
  check_time(t);
  std::vector<std::pair<double, std::size_t>> alive;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (records_[i].alive_at(t)) alive.emplace_back(position_at(i, t), i);
  }
  std::sort(alive.begin(), alive.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return records_[a.second].label < records_[b.second].label;
  });
  Snapshot snap;
  std::vector<double> atoms;
  atoms.reserve(alive.size());
  snap.records.reserve(alive.size());
  for (const auto& [x, i] : alive) {
    atoms.push_back(x);
    snap.records.push_back(i);
  }
  snap.measure = RankedPointMeasure(std::move(atoms));
  return snap;
}

std::size_t GenealogyForest::ancestor_at(std::size_t i, double s) const {
  std::size_t cur = i;
  while (!records_.at(cur).alive_at(s)) {
    if (!records_[cur].parent || records_[cur].birth < s) {
      throw std::out_of_range("no ancestor alive at the requested time");
    }
    cur = *records_[cur].parent;
  }
  return cur;
}

RankedPartition GenealogyForest::partition(double s, double t) const {
  if (s > t) throw std::out_of_range("partition needs s <= t");
  check_time(s);
  check_time(t);
  const Snapshot at_s = snapshot(s);
  const Snapshot at_t = snapshot(t);
  std::map<std::size_t, std::size_t> rank_at_s;
  for (std::size_t k = 0; k < at_s.records.size(); ++k) rank_at_s.emplace(at_s.records[k], k);
  RankedPartition part;
  part.blocks.resize(at_s.records.size());
  for (std::size_t j = 0; j < at_t.records.size(); ++j) {
    part.blocks.at(rank_at_s.at(ancestor_at(at_t.records[j], s))).push_back(j);
  }
  return part;
}

double GenealogyForest::ancestor_position(std::size_t rank, double t, double s) const {
  if (s > t) throw std::out_of_range("ancestor_position needs s <= t");
  check_time(t);
  check_time(s);
  const Snapshot snap = snapshot(t);
  if (rank >= snap.records.size()) throw std::out_of_range("rank out of range");
  return position_at(ancestor_at(snap.records[rank], s), s);
}

AncestralPath GenealogyForest::trajectory_of(std::size_t record, double t) const {
  std::vector<std::size_t> chain;
  for (std::optional<std::size_t> cur = record; cur; cur = records_[*cur].parent) chain.push_back(*cur);
  std::reverse(chain.begin(), chain.end());
  AncestralPath path{{}, drift_, gaussian_};
  for (std::size_t id : chain) {
    const ParticleRecord& r = records_[id];
    path.points.push_back({r.birth, r.birth_position, r.label.is_root() ? 0.0 : r.displacement});
    for (const auto& ev : r.events) {
      if (ev.time > t) break;
      if (carries_position(ev.kind)) path.points.push_back({ev.time, ev.position, ev.jump});
    }
  }
  return path;
}

AncestralPath GenealogyForest::ancestral_trajectory(std::size_t rank, double t) const {
  check_time(t);
  const Snapshot snap = snapshot(t);
  if (rank >= snap.records.size()) throw std::out_of_range("rank out of range");
  return trajectory_of(snap.records[rank], t);
}

std::string GenealogyForest::export_text() const {
  std::ostringstream out;
  out << "#forest horizon=" << format_real(horizon_) << " drift=" << format_real(drift_)
      << " gaussian=" << (gaussian_ ? 1 : 0) << '\n';
  out << "label;birth;death;birth_position;displacement;events\n";
  for (const auto& r : records_) {
    out << r.label.to_string() << ';' << format_real(r.birth) << ';' << format_real(r.death) << ';'
        << format_real(r.birth_position) << ';' << format_real(r.displacement);
    for (const auto& ev : r.events) {
      out << ';' << static_cast<char>(ev.kind) << ':' << format_real(ev.time) << ':'
          << format_real(ev.position) << ':' << format_real(ev.jump);
    }
    out << '\n';
  }
  return out.str();
}

GenealogyForest GenealogyForest::import_text(std::string_view text) {
  auto lines = split(text, '\n');
  if (lines.size() < 2) throw std::invalid_argument("forest text too short");
  auto meta = split(lines[0], ' ');
  if (meta.size() != 4 || meta[0] != "#forest") throw std::invalid_argument("missing forest metadata line");
  auto value_of = [](std::string_view kv, std::string_view key) {
    if (kv.substr(0, key.size()) != key) throw std::invalid_argument("bad forest metadata");
    return parse_real(kv.substr(key.size()));
  };
  GenealogyForest forest(value_of(meta[1], "horizon="), value_of(meta[2], "drift="),
                         value_of(meta[3], "gaussian=") != 0.0);
  for (std::size_t li = 2; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    auto fields = split(lines[li], ';');
    if (fields.size() < 5) throw std::invalid_argument("forest record needs 5 fields");
    ParticleRecord r;
    r.label = UlamLabel::parse(fields[0]);
    r.birth = parse_real(fields[1]);
    r.death = parse_real(fields[2]);
    r.birth_position = parse_real(fields[3]);
    r.displacement = parse_real(fields[4]);
    for (std::size_t f = 5; f < fields.size(); ++f) {
      auto parts = split(fields[f], ':');
      if (parts.size() != 4 || parts[0].size() != 1) throw std::invalid_argument("malformed event");
      const char k = parts[0][0];
      if (k != 'J' && k != 'B' && k != 'K' && k != 'O') throw std::invalid_argument("unknown event kind");
      r.events.push_back({parse_real(parts[1]), parse_real(parts[2]), static_cast<EventKind>(k),
                          parse_real(parts[3])});
    }
    forest.add(std::move(r));
  }
  return forest;
}

}  // namespace blp
