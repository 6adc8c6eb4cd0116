#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "blp/genealogy.hpp"
#include "blp/levy_measure.hpp"
#include "blp/rng.hpp"

namespace blp {

struct SimulationConfig {
  double horizon = 1.0;
  std::vector<double> observation_times;  ///< sorted, within [0, horizon]
  std::size_t max_particles = 1'000'000;  ///< cap on particles ever born

  void validate() const;
};

/// Raised when a run exceeds SimulationConfig::max_particles.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Branching Levy process with finite birth intensity started from one
/// particle at 0. Each particle lives an Exp(beta) time, moves by `motion`,
/// may be killed by the motion's kill rate, and at the end of its life is
/// replaced by children displaced from its position by a draw of rho.
/// Particles are processed in (birth time, label) order.
GenealogyForest simulate_finite(const FiniteBirthParams& params, const SimulationConfig& config,
                                RandomStream& rng);

/// Forest of the process truncated at level n, obtained from a forest at a
/// higher level: a particle is killed at its first motion jump below -n and
/// children born more than n to the left of their parent are removed with
/// their descent. A birth event left with a single child becomes a jump of
/// the parent; one left with none becomes a kill.
GenealogyForest prune(const GenealogyForest& forest, double n);

/// Same as `prune` but with the inclusive threshold: every ancestral jump
/// <= -n removes the particle and its descent.
GenealogyForest censor(const GenealogyForest& forest, double n);

/// One forest simulated at the largest level and pruned to every smaller one.
/// Levels must be >= 1 so that the compensated drift is shared by all levels.
std::map<double, GenealogyForest> simulate_nested(const CharacteristicTriple& triple,
                                                  std::vector<double> levels,
                                                  const SimulationConfig& config, RandomStream& rng,
                                                  const SeriesOptions& opts = {});

/// sum_j translate(nu_j, x_j) over the atoms x_j of `start`, nu_j drawn
/// independently from `one_step`.
RankedPointMeasure branching_convolution(const RankedPointMeasure& start,
                                         const std::function<RankedPointMeasure(RandomStream&)>& one_step,
                                         RandomStream& rng);

/// Snapshots at 0, step, 2 step, ..., horizon.
std::vector<RankedPointMeasure> skeleton(const GenealogyForest& forest, double step);

/// Runs fn(rng, index) for index in [0, count) with rng = substream(seed,
/// index), using up to `threads` workers (0 = hardware concurrency). Results
/// are returned in index order, so the output does not depend on scheduling.
template <class Fn>
auto run_replicas(std::size_t count, std::uint64_t seed, Fn&& fn, unsigned threads = 0)
    -> std::vector<decltype(fn(std::declval<RandomStream&>(), std::size_t{}))> {
  using R = decltype(fn(std::declval<RandomStream&>(), std::size_t{}));
  std::vector<R> out(count);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  auto body = [&](std::size_t i) {
    RandomStream rng = RandomStream::substream(seed, i);
    out[i] = fn(rng, i);
  };
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace blp
