#include <algorithm>
#include <cmath>
#include <set>

#include "blp/genealogy.hpp"
#include "blp/simulator.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace blp;

namespace {

UlamLabel L(std::string_view s) { return UlamLabel::parse(s); }

ParticleRecord rec(std::string_view label, double birth, double death, double pos, double disp,
                   std::vector<TrajectoryEvent> events = {}) {
  ParticleRecord r;
  r.label = L(label);
  r.birth = birth;
  r.death = death;
  r.birth_position = pos;
  r.displacement = disp;
  r.events = std::move(events);
  return r;
}

TrajectoryEvent birth_event(double t, double x) { return {t, x, EventKind::Birth, 0.0}; }

// Two particles at s = 0.75; at t = 1.5 the first one's descendants hold
// ranks 0 and 2, the second one keeps rank 1.
GenealogyForest five_records() {
  GenealogyForest f(2.0, 0.0, false);
  f.add(rec("root", 0.0, 0.5, 0.0, 0.0, {birth_event(0.5, 0.0)}));
  f.add(rec("1", 0.5, 1.0, 0.0, 0.0, {birth_event(1.0, 0.0)}));
  f.add(rec("2", 0.5, kNeverDies, -1.0, -1.0));
  f.add(rec("1.1", 1.0, kNeverDies, 1.0, 1.0));
  f.add(rec("1.2", 1.0, kNeverDies, -2.0, -2.0));
  return f;
}

// Drift 2: the parent reaches 2 at time 1 and has children at displacements -1 and 0.
GenealogyForest three_records() {
  GenealogyForest f(2.0, 2.0, false);
  f.add(rec("root", 0.0, 1.0, 0.0, 0.0, {birth_event(1.0, 2.0)}));
  f.add(rec("1", 1.0, kNeverDies, 1.0, -1.0));
  f.add(rec("2", 1.0, kNeverDies, 2.0, 0.0));
  return f;
}

FiniteBirthParams jumpy_model() {
  FiniteBirthParams p;
  p.motion.drift = 0.2;
  p.motion.jumps = {{0.8, PointMassJump{-0.5}}, {0.4, UniformJump{-1.0, 1.0}}};
  p.motion.kill_rate = 0.2;
  p.beta = 1.2;
  p.rho = OffspringLaw({{1.0, RankedPointMeasure{0.0, -0.25}},
                        {0.5, RankedPointMeasure{0.5, 0.0, -1.0}},
                        {0.2, RankedPointMeasure{}}});
  return p;
}

std::vector<double> dyadic(double horizon, int denominator) {
  std::vector<double> out;
  for (int k = 0; k <= denominator; ++k) out.push_back(horizon * k / denominator);
  return out;
}

std::vector<GenealogyForest> simulated(std::size_t count, std::uint64_t seed) {
  SimulationConfig cfg;
  cfg.horizon = 1.0;
  cfg.observation_times = dyadic(1.0, 8);
  std::vector<GenealogyForest> out;
  for (std::size_t i = 0; i < count; ++i) {
    RandomStream rng = RandomStream::substream(seed, i);
    out.push_back(simulate_finite(jumpy_model(), cfg, rng));
  }
  return out;
}

}  // namespace

TEST_CASE("Ulam labels") {
  CHECK(UlamLabel().to_string() == "root");
  CHECK(L("root").is_root());
  CHECK(L("1.2").to_string() == "1.2");
  CHECK(L("1.2").parent() == L("1"));
  CHECK(L("1").child(3) == L("1.3"));
  CHECK(L("1").is_prefix_of(L("1.2.5")));
  CHECK(UlamLabel().is_prefix_of(L("4")));
  CHECK_FALSE(L("2").is_prefix_of(L("1.2")));
  CHECK(L("1") < L("1.1"));
  CHECK(L("1.9") < L("2"));
  CHECK_THROWS(L("1.0"));
  CHECK_THROWS(L("a"));
  CHECK_THROWS((void)UlamLabel().parent());
}

TEST_CASE("snapshot examples") {
  GenealogyForest still(1.0, 0.0, false);
  still.add(rec("root", 0.0, kNeverDies, 0.0, 0.0));
  auto s = still.snapshot(0.5);
  CHECK(s.measure == RankedPointMeasure{0.0});
  CHECK(still.record(s.records[0]).label.is_root());

  GenealogyForest tie(1.0, 0.0, false);
  tie.add(rec("root", 0.0, 0.2, 0.0, 0.0, {birth_event(0.2, 0.0)}));
  tie.add(rec("2", 0.2, kNeverDies, 0.0, 0.0));
  tie.add(rec("1", 0.2, kNeverDies, 0.0, 0.0));
  s = tie.snapshot(0.5);
  CHECK(tie.record(s.records[0]).label == L("1"));
  CHECK(tie.record(s.records[1]).label == L("2"));

  GenealogyForest dead(1.0, 0.0, false);
  dead.add(rec("root", 0.0, 0.3, 0.0, 0.0, {{0.3, 0.0, EventKind::Killed, 0.0}}));
  s = dead.snapshot(0.5);
  CHECK(s.measure.empty());
  CHECK(s.records.empty());
  CHECK_THROWS((void)dead.snapshot(1.5));
}

TEST_CASE("partition examples") {
  const auto f = five_records();
  CHECK(f.partition(1.5, 1.5) == RankedPartition{{{0}, {1}, {2}}});
  CHECK(f.partition(0.25, 1.5) == RankedPartition{{{0, 1, 2}}});
  const auto p = f.partition(0.75, 1.5);
  CHECK(p == RankedPartition{{{0, 2}, {1}}});
  CHECK(p.blocks == oracle::descent_blocks(f, 0.75, 1.5));
  CHECK_THROWS((void)f.partition(1.0, 0.5));
}

TEST_CASE("ancestor_position examples") {
  const auto f = three_records();
  CHECK(f.ancestor_position(0, 1.5, 1.5) == f.snapshot(1.5).measure[0]);
  CHECK(f.snapshot(1.5).measure == RankedPointMeasure{3.0, 2.0});
  CHECK(f.ancestor_position(1, 1.5, 0.5) == 2.0 * 0.5);
  CHECK(f.ancestor_position(1, 1.5, 1.25) == 1.0 + 2.0 * 0.25);
  CHECK_THROWS((void)f.ancestor_position(2, 1.5, 0.5));

  GenealogyForest root_only(1.0, -1.0, false);
  root_only.add(rec("root", 0.0, kNeverDies, 0.0, 0.0));
  CHECK(root_only.ancestor_position(0, 1.0, 0.3) == -0.3);
}

TEST_CASE("ancestral_trajectory examples") {
  GenealogyForest still(1.0, 0.0, false);
  still.add(rec("root", 0.0, kNeverDies, 0.0, 0.0));
  auto path = still.ancestral_trajectory(0, 1.0);
  for (double s : {0.0, 0.3, 1.0}) CHECK(path.value_at(s) == 0.0);

  const double tau = 0.4;
  GenealogyForest f(1.0, 0.0, false);
  f.add(rec("root", 0.0, tau, 0.0, 0.0, {birth_event(tau, 0.0)}));
  f.add(rec("1", tau, kNeverDies, 0.0, 0.0));
  f.add(rec("2", tau, kNeverDies, -1.0, -1.0));
  path = f.ancestral_trajectory(1, 1.0);
  CHECK(path.value_at(0.0) == 0.0);
  CHECK(path.value_at(std::nextafter(tau, 0.0)) == 0.0);
  CHECK(path.value_at(tau) == -1.0);
  CHECK(path.value_at(1.0) == -1.0);
  const auto jump = std::find_if(path.points.begin(), path.points.end(), [](const auto& p) { return p.jump != 0.0; });
  REQUIRE(jump != path.points.end());
  CHECK(jump->time == tau);
  CHECK(jump->jump == -1.0);
}

TEST_CASE("ancestral paths agree with a recursive walk of the records") {
  for (const auto& f : simulated(60, 101)) {
    const auto snap = f.snapshot(1.0);
    for (std::size_t j = 0; j < snap.records.size(); ++j) {
      const auto path = f.ancestral_trajectory(j, 1.0);
      for (const auto& p : path.points) {
        CHECK(path.value_at(p.time) == oracle::lineage_value(f, snap.records[j], p.time));
      }
      for (double s : {0.1, 0.33, 0.71, 0.99}) {
        CHECK(path.value_at(s) == doctest::Approx(oracle::lineage_value(f, snap.records[j], s)).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("coagulation, block cover and prefix property on simulated forests") {
  const auto grid = dyadic(1.0, 8);
  for (const auto& f : simulated(40, 202)) {
    for (std::size_t a = 0; a < grid.size(); ++a) {
      for (std::size_t b = a; b < grid.size(); ++b) {
        const double s = grid[a], t = grid[b];
        const auto pst = f.partition(s, t);
        CHECK(pst.blocks == oracle::descent_blocks(f, s, t));
        std::vector<std::size_t> all;
        for (const auto& blk : pst.blocks) all.insert(all.end(), blk.begin(), blk.end());
        std::sort(all.begin(), all.end());
        CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
        CHECK(all.size() == f.snapshot(t).records.size());
        for (std::size_t c = b; c < grid.size(); ++c) {
          const double u = grid[c];
          const auto psu = f.partition(s, u);
          const auto ptu = f.partition(t, u);
          for (std::size_t j = 0; j < psu.blocks.size(); ++j) {
            std::vector<std::size_t> merged;
            for (std::size_t i : pst.blocks[j]) merged.insert(merged.end(), ptu.blocks[i].begin(), ptu.blocks[i].end());
            std::sort(merged.begin(), merged.end());
            CHECK(merged == psu.blocks[j]);
          }
        }
        // Prefix property of ancestral trajectories.
        const auto snap_t = f.snapshot(t);
        const auto snap_s = f.snapshot(s);
        for (std::size_t j = 0; j < snap_t.records.size(); ++j) {
          const std::size_t anc = f.ancestor_at(snap_t.records[j], s);
          const auto k = static_cast<std::size_t>(
              std::find(snap_s.records.begin(), snap_s.records.end(), anc) - snap_s.records.begin());
          REQUIRE(k < snap_s.records.size());
          CHECK(f.ancestral_trajectory(j, t).restricted(s).points == f.ancestral_trajectory(k, s).points);
          CHECK(f.ancestor_position(j, t, s) == snap_s.measure[k]);
        }
      }
    }
  }
}

TEST_CASE("snapshot counts follow birth and death times") {
  for (const auto& f : simulated(30, 303)) {
    for (double t : dyadic(1.0, 8)) {
      std::size_t alive = 0;
      for (const auto& r : f.records()) alive += (r.birth <= t && t < r.death) ? 1 : 0;
      CHECK(f.snapshot(t).measure.size() == alive);
    }
  }
}

TEST_CASE("export and import round trip") {
  for (const auto& f : simulated(20, 404)) {
    const auto text = f.export_text();
    const auto back = GenealogyForest::import_text(text);
    CHECK(back == f);
    CHECK(back.export_text() == text);
  }
  const auto f = five_records();
  CHECK(GenealogyForest::import_text(f.export_text()) == f);
  CHECK_THROWS(GenealogyForest::import_text("nonsense"));
}

TEST_CASE("forest structure checks") {
  GenealogyForest f(1.0, 0.0, false);
  CHECK_THROWS(f.add(rec("1", 0.0, kNeverDies, 0.0, 0.0)));
  f.add(rec("root", 0.0, kNeverDies, 0.0, 0.0));
  CHECK_THROWS(f.add(rec("root", 0.0, kNeverDies, 0.0, 0.0)));

  GenealogyForest g(1.0, 0.0, true);
  g.add(rec("root", 0.0, kNeverDies, 0.0, 0.0, {{0.5, 0.3, EventKind::Observation, 0.0}}));
  CHECK(g.position_at(0, 0.5) == 0.3);
  CHECK_THROWS_AS((void)g.position_at(0, 0.4), std::domain_error);
}
