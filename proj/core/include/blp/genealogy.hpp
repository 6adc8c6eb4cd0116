#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blp/point_measure.hpp"

namespace blp {

/// Word over the positive integers; the empty word is the ancestor.
class UlamLabel {
 public:
  UlamLabel() = default;
  explicit UlamLabel(std::vector<std::uint32_t> word);

  [[nodiscard]] const std::vector<std::uint32_t>& word() const noexcept { return word_; }
  [[nodiscard]] std::size_t depth() const noexcept { return word_.size(); }
  [[nodiscard]] bool is_root() const noexcept { return word_.empty(); }
  [[nodiscard]] UlamLabel child(std::uint32_t j) const;
  [[nodiscard]] UlamLabel parent() const;
  [[nodiscard]] bool is_prefix_of(const UlamLabel& other) const noexcept;

  /// "root" for the ancestor, otherwise the word joined with '.', e.g. "1.2".
  [[nodiscard]] std::string to_string() const;
  static UlamLabel parse(std::string_view text);

  /// Lexicographic order; a prefix sorts before its extensions.
  friend auto operator<=>(const UlamLabel&, const UlamLabel&) = default;
  friend bool operator==(const UlamLabel&, const UlamLabel&) = default;

 private:
  std::vector<std::uint32_t> word_;
};

enum class EventKind : char {
  MotionJump = 'J',
  Birth = 'B',
  Killed = 'K',
  Observation = 'O',
};

/// `position` is the post-jump position for MotionJump, the position just
/// before the event for Birth and Killed, and the current position for
/// Observation. `jump` is non-zero only for MotionJump.
struct TrajectoryEvent {
  double time = 0.0;
  double position = 0.0;
  EventKind kind = EventKind::Observation;
  double jump = 0.0;

  friend bool operator==(const TrajectoryEvent&, const TrajectoryEvent&) = default;
};

inline constexpr double kNeverDies = std::numeric_limits<double>::infinity();

struct ParticleRecord {
  UlamLabel label;
  double birth = 0.0;
  double death = kNeverDies;  ///< +inf when alive at the horizon
  double birth_position = 0.0;
  double displacement = 0.0;  ///< offset from the parent's position at its death
  std::vector<TrajectoryEvent> events;  ///< time-ordered
  std::optional<std::size_t> parent;
  std::vector<std::size_t> children;

  [[nodiscard]] bool alive_at(double t) const noexcept { return birth <= t && t < death; }
  friend bool operator==(const ParticleRecord&, const ParticleRecord&) = default;
};

/// Blocks of time-t ranks (0-based), one per time-s rank.
struct RankedPartition {
  std::vector<std::vector<std::size_t>> blocks;
  friend bool operator==(const RankedPartition&, const RankedPartition&) = default;
};

struct Snapshot {
  RankedPointMeasure measure;
  std::vector<std::size_t> records;  ///< rank (0-based) -> record index
};

/// Right-continuous path given by its values at recorded times; between
/// points it follows `drift` unless the motion has a Gaussian part.
struct AncestralPath {
  struct Point {
    double time = 0.0;
    double position = 0.0;
    double jump = 0.0;  ///< size of the jump at `time`, 0 if none
    friend bool operator==(const Point&, const Point&) = default;
  };
  std::vector<Point> points;
  double drift = 0.0;
  bool gaussian = false;

  /// Value at s; with a Gaussian part s must be a recorded time.
  [[nodiscard]] double value_at(double s) const;
  /// Points with time <= s.
  [[nodiscard]] AncestralPath restricted(double s) const;
};

/// Particle records of one realization, indexed in insertion order with a
/// label lookup. Parents are always inserted before their children.
class GenealogyForest {
 public:
  GenealogyForest() = default;
  GenealogyForest(double horizon, double drift, bool gaussian);

  /// Appends a record. Its parent (label prefix) must already be present;
  /// `parent` and `children` links are filled in here.
  std::size_t add(ParticleRecord record);

  [[nodiscard]] const std::vector<ParticleRecord>& records() const noexcept { return records_; }
  [[nodiscard]] const ParticleRecord& record(std::size_t i) const { return records_.at(i); }
  [[nodiscard]] std::size_t size() const noexcept { return records_.size(); }
  [[nodiscard]] std::optional<std::size_t> find(const UlamLabel& label) const;
  [[nodiscard]] double horizon() const noexcept { return horizon_; }
  [[nodiscard]] double drift() const noexcept { return drift_; }
  [[nodiscard]] bool gaussian() const noexcept { return gaussian_; }

  /// Position of record i at a time t in [birth, death). Uses the event
  /// recorded exactly at t when there is one; otherwise extrapolates the
  /// drift, which requires a motion without Gaussian part.
  [[nodiscard]] double position_at(std::size_t i, double t) const;

  /// Alive particles at t ranked by position, ties by label.
  [[nodiscard]] Snapshot snapshot(double t) const;

  /// Index of the ancestor (or self) of record i alive at s.
  [[nodiscard]] std::size_t ancestor_at(std::size_t i, double s) const;

  [[nodiscard]] RankedPartition partition(double s, double t) const;
  [[nodiscard]] double ancestor_position(std::size_t rank, double t, double s) const;
  [[nodiscard]] AncestralPath ancestral_trajectory(std::size_t rank, double t) const;
  /// Ancestral path of record i up to time t, without the rank lookup.
  [[nodiscard]] AncestralPath trajectory_of(std::size_t i, double t) const;

  /// Line-oriented export: a metadata line, a header line, then one record
  /// per line as label;birth;death;birth_position;displacement;events with
  /// each event written as KIND:time:position:jump and separated by ';'.
  [[nodiscard]] std::string export_text() const;
  static GenealogyForest import_text(std::string_view text);

  friend bool operator==(const GenealogyForest& a, const GenealogyForest& b) {
    return a.horizon_ == b.horizon_ && a.drift_ == b.drift_ && a.gaussian_ == b.gaussian_ &&
           a.records_ == b.records_;
  }

 private:
  void check_time(double t) const;

  double horizon_ = 0.0;
  double drift_ = 0.0;
  bool gaussian_ = false;
  std::vector<ParticleRecord> records_;
  std::map<UlamLabel, std::size_t> index_;
};

}  // namespace blp
