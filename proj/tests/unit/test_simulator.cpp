#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "errml/analyzer.hpp"
#include "errml/simulator.hpp"
#include "generators.hpp"
#include "oracles/oracles.hpp"
#include "support.hpp"

using namespace errml;
using namespace errml::simulate;
using analyze::MeasureKind;

namespace {

SimConfig config(MeasureKind kind, double t, std::size_t reps, std::uint64_t seed = 1) {
  SimConfig cfg;
  cfg.measure.kind = kind;
  cfg.measure.time = t;
  cfg.replications = reps;
  cfg.seed = seed;
  return cfg;
}

// Every target reachable in one timed step plus its cascade from `s`.
std::set<GlobalState> successors(const InstanceModel& inst, const GlobalState& s) {
  std::set<GlobalState> out;
  for (std::size_t a = 0; a < inst.automata.size(); ++a) {
    const auto& timed = inst.automata[a].timed;
    for (std::size_t i = 0; i < timed.size(); ++i) {
      if (timed[i].source != s[a] || !(timed[i].rate > 0.0)) continue;
      for (const auto& [target, q] : compose::fire(inst, s, a, i)) out.insert(target);
    }
  }
  return out;
}

}  // namespace

TEST(Seeds, SplitMixFinalizer) {
  // splitmix64 of 0x9E3779B97F4A7C15 (its first output from state 0).
  EXPECT_EQ(replication_seed(0, 0), 0xE220A8397B1DCDAFull);
  EXPECT_NE(replication_seed(1, 0), replication_seed(1, 1));
  EXPECT_NE(replication_seed(1, 0), replication_seed(2, 0));
}

TEST(Seeds, UniformsInUnitInterval) {
  Rng rng(42);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.005);
  Rng e(43);
  double mean = 0.0;
  for (int i = 0; i < 100000; ++i) mean += e.exponential(4.0);
  EXPECT_NEAR(mean / 100000, 0.25, 0.005);
}

TEST(Replication, ZeroHorizon) {
  auto inst = support::instance("two_state.errml", 1);
  auto tr = replication_run(inst, 0.0, 7);
  ASSERT_EQ(tr.size(), 1u);
  EXPECT_EQ(tr[0].time, 0.0);
  EXPECT_EQ(inst.automata[0].states[tr[0].state[0]], "Error_Free");
}

TEST(Replication, CertainCascadeIsInstant) {
  auto inst = support::instance("pipeline.errml", 2, {{"p", 1.0}});
  bool seen = false;
  for (std::uint64_t seed = 1; seed <= 200 && !seen; ++seed) {
    auto tr = replication_run(inst, 1e5, seed);
    for (std::size_t k = 1; k < tr.size(); ++k) {
      if (support::triple(inst, tr[k - 1].state) == "EEE" &&
          support::triple(inst, tr[k].state)[0] == 'F') {
        EXPECT_EQ(support::triple(inst, tr[k].state), "FFF");
        seen = true;
      }
    }
  }
  EXPECT_TRUE(seen);
}

TEST(Replication, Deterministic) {
  auto inst = support::instance("pipeline.errml", 3);
  for (std::uint64_t seed : {1ull, 99ull, 123456789ull}) {
    auto a = replication_run(inst, 5000.0, seed);
    auto b = replication_run(inst, 5000.0, seed);
    EXPECT_EQ(a, b);
    EXPECT_GT(a.size(), 1u);
  }
}

TEST(Replication, TrajectoriesFollowTheSemantics) {
  for (int it = 1; it <= 3; ++it) {
    auto inst = support::instance("pipeline.errml", it);
    auto chain = compose::compose(inst);
    std::set<GlobalState> tangible(chain.global_states.begin(), chain.global_states.end());
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
      auto tr = replication_run(inst, 20000.0, seed);
      ASSERT_FALSE(tr.empty());
      EXPECT_EQ(tr[0].state, chain.global_states[chain.initial]);
      for (std::size_t k = 1; k < tr.size(); ++k) {
        EXPECT_GT(tr[k].time, tr[k - 1].time);
        EXPECT_LE(tr[k].time, 20000.0);
        EXPECT_TRUE(tangible.count(tr[k].state));
        EXPECT_TRUE(successors(inst, tr[k - 1].state).count(tr[k].state));
      }
    }
  }
}

TEST(Replication, RandomArchitecturesStayInTheComposedChain) {
  gen::Gen g(17);
  for (int trial = 0; trial < 25; ++trial) {
    auto r = dsl::parse_model(gen::architecture(g));
    ASSERT_TRUE(r.ok());
    auto inst = instantiate(r.model, 1);
    auto chain = compose::compose(inst);
    std::set<GlobalState> tangible(chain.global_states.begin(), chain.global_states.end());
    auto tr = replication_run(inst, 200.0, static_cast<std::uint64_t>(trial));
    for (std::size_t k = 1; k < tr.size(); ++k) {
      EXPECT_TRUE(tangible.count(tr[k].state));
      EXPECT_TRUE(successors(inst, tr[k - 1].state).count(tr[k].state));
    }
  }
}

TEST(Estimate, NoFailuresGivesExactlyOne) {
  auto inst = support::instance("two_state.errml", 1, {{"lambda", 0.0}});
  auto est = simulate_measure(inst, config(MeasureKind::reliability, 100.0, 1000));
  EXPECT_EQ(est.mean, 1.0);
  EXPECT_EQ(est.half_width_95, 0.0);
  EXPECT_EQ(est.successes, 1000u);
}

TEST(Estimate, SeedDeterminism) {
  auto inst = support::instance("pipeline.errml", 2);
  auto cfg = config(MeasureKind::point_availability, 50.0, 2000, 5);
  auto a = simulate_measure(inst, cfg);
  auto b = simulate_measure(inst, cfg);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.half_width_95, b.half_width_95);
  EXPECT_EQ(a.successes, b.successes);
  EXPECT_EQ(a.seed, 5u);
  cfg.seed = 6;
  EXPECT_NE(simulate_measure(inst, cfg).successes, a.successes);
}

TEST(Estimate, TwoStatePointAvailability) {
  auto inst = support::instance("two_state.errml", 1);
  auto est = simulate_measure(inst, config(MeasureKind::point_availability, 10.0, 100000, 2024));
  double exact = oracle::availability_at(1e-3, 1e-1, 10.0);
  EXPECT_GT(est.half_width_95, 0.0);
  EXPECT_LE(std::abs(est.mean - exact), 3 * est.half_width_95);
}

TEST(Estimate, HalfWidthFormula) {
  auto inst = support::instance("two_state.errml", 1, {{"lambda", 0.05}});
  auto est = simulate_measure(inst, config(MeasureKind::reliability, 10.0, 5000, 3));
  double m = est.mean, n = 5000.0;
  EXPECT_DOUBLE_EQ(est.half_width_95, 1.96 * std::sqrt(m * (1 - m) * n / (n - 1) / n));
  EXPECT_NEAR(m, std::exp(-0.5), 4 * est.half_width_95);
}

TEST(Estimate, Errors) {
  auto inst = support::instance("two_state.errml", 1);
  auto cfg = config(MeasureKind::mttf, 0.0, 10);
  EXPECT_THROW(simulate_measure(inst, cfg), Error);
  auto missing = config(MeasureKind::reliability, 1.0, 10);
  missing.measure.failure_class = "Broken";
  try {
    simulate_measure(inst, missing);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::label_missing);
  }
  EXPECT_THROW(replication_run(inst, -1.0, 1), Error);
}

TEST(Estimate, SteadyStateIsApproximated) {
  auto inst = support::instance("two_state.errml", 1);
  auto cfg = config(MeasureKind::steady_state_availability, 0.0, 20000, 9);
  cfg.steady_state_horizon = 200.0;
  auto est = simulate_measure(inst, cfg);
  ASSERT_EQ(est.warnings.size(), 1u);
  EXPECT_EQ(est.warnings[0].code, "steady-state-approximation");
  EXPECT_NEAR(est.mean, oracle::availability_ss(1e-3, 1e-1), 4 * est.half_width_95);
}
