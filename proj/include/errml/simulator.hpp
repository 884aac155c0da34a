#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "errml/analyzer.hpp"
#include "errml/composer.hpp"
#include "errml/instance.hpp"

/// Monte Carlo simulation of an instance model's operational semantics.
namespace errml::simulate {

/// Seed of replication k: splitmix64 finalizer applied to
/// master + (k + 1) * 0x9E3779B97F4A7C15.
std::uint64_t replication_seed(std::uint64_t master, std::uint64_t k);

/// mt19937_64 with explicit, library-independent conversions to uniforms:
/// u = (x >> 11) * 2^-53.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

struct TrajectoryPoint {
  double time = 0.0;
  GlobalState state;

  bool operator==(const TrajectoryPoint&) const = default;
};

using Trajectory = std::vector<TrajectoryPoint>;

/// Event-driven run from the initial tangible state: competing exponential
/// clocks over the enabled timed transitions, Bernoulli draws for fixed
/// emissions, cascades and guard reactions resolved in the composer's order.
/// Records one point per tangible state entered; stops at `horizon` or when no
/// timed transition is enabled. Throws CascadeDepthExceeded or GuardLivelock.
Trajectory replication_run(const InstanceModel& instance, double horizon, std::uint64_t seed,
                           const compose::ExploreLimits& limits = {});

struct SimConfig {
  std::size_t replications = 100'000;
  std::uint64_t seed = 1;
  analyze::MeasureSpec measure;
  /// Horizon for steady-state availability, which is approximated by point
  /// availability at this time. Time-indexed measures use measure.time.
  double steady_state_horizon = 0.0;
  compose::ExploreLimits limits;
};

struct Estimate {
  double mean = 0.0;
  double half_width_95 = 0.0;
  std::size_t replications = 0;
  std::size_t successes = 0;
  std::uint64_t seed = 0;
  Diagnostics warnings;
};

/// Mean of the per-replication indicator with a normal-approximation 95%
/// half-width 1.96 * sqrt(s^2 / n). Deterministic in (instance, cfg).
/// MTTF is not supported (InvalidArgument); unknown classes raise LabelMissing.
Estimate simulate_measure(const InstanceModel& instance, const SimConfig& cfg);

}  // namespace errml::simulate
