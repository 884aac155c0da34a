#include <algorithm>
#include <deque>

#include <fmt/format.h>

#include "errml/simulator.hpp"

namespace errml::simulate {

std::uint64_t replication_seed(std::uint64_t master, std::uint64_t k) {
  std::uint64_t z = master + (k + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

namespace {

// Samples one path through the immediate consequences of a jump.
class Cascade {
 public:
  Cascade(const InstanceModel& instance, const compose::ExploreLimits& limits, Rng& rng)
      : inst_(instance), limits_(limits), rng_(rng) {}

  void fire(GlobalState& s, std::size_t automaton, const TimedTransition& t) {
    s[automaton] = t.destination;
    if (t.trigger.kind == TriggerKind::out_propagation) {
      emissions_.push_back({automaton, t.trigger.name, 1});
    }
    if (t.destination != t.source) entries_.push_back({automaton, t.destination, 1, 0});
    settle(s);
  }

  void settle(GlobalState& s) {
    int guard_steps = 0;
    for (;;) {
      if (!entries_.empty()) {
        decide(s);
        continue;
      }
      if (!emissions_.empty()) {
        auto [sender, propagation, depth] = emissions_.front();
        emissions_.pop_front();
        if (depth > limits_.max_cascade_depth) {
          throw Error(ErrorCode::cascade_depth_exceeded,
                      fmt::format("propagation cascade exceeds depth {} at {}",
                                  limits_.max_cascade_depth, inst_.describe(s)));
        }
        deliver(s, sender, propagation, depth, nullptr);
        continue;
      }
      const ResolvedGuard* fired = nullptr;
      for (const auto& g : inst_.guards) {
        auto out = guard_output(g, inst_, s);
        if (out && deliver(s, g.owner, *out, 0, &g)) {
          fired = &g;
          break;
        }
      }
      if (!fired) return;
      if (++guard_steps > limits_.max_cascade_depth) {
        throw Error(ErrorCode::guard_livelock,
                    fmt::format("guard reactions do not settle within {} steps",
                                limits_.max_cascade_depth));
      }
    }
  }

 private:
  struct Entry {
    std::size_t automaton;
    std::uint32_t state;
    int depth;
    std::size_t next;
  };
  struct Pending {
    std::size_t sender;
    std::string propagation;
    int depth;
  };

  void decide(GlobalState& s) {
    Entry e = entries_.front();
    entries_.pop_front();
    if (s[e.automaton] != e.state) return;
    const auto& emissions = inst_.automata[e.automaton].emissions;
    for (; e.next < emissions.size(); ++e.next) {
      const Emission& em = emissions[e.next];
      if (em.source != e.state || !(em.probability > 0.0)) continue;
      if (em.probability < 1.0 && !rng_.bernoulli(em.probability)) continue;
      emissions_.push_back({e.automaton, em.propagation, e.depth});
      if (em.destination != e.state) {
        s[e.automaton] = em.destination;
        entries_.push_back({e.automaton, em.destination, e.depth + 1, 0});
        return;
      }
    }
  }

  bool deliver(GlobalState& s, std::size_t sender, const std::string& propagation, int depth,
               const ResolvedGuard* guard) {
    std::vector<std::size_t> reached;
    bool reacted = false;
    for (const Route* r : inst_.routing.from(sender, propagation)) {
      if (r->guarded != (guard != nullptr)) continue;
      if (guard && r->source_port != guard->port) continue;
      if (std::find(reached.begin(), reached.end(), r->receiver) != reached.end()) continue;
      reached.push_back(r->receiver);
      auto dest = inst_.automata[r->receiver].receive(s[r->receiver], propagation);
      if (!dest || *dest == s[r->receiver]) continue;
      s[r->receiver] = *dest;
      entries_.push_back({r->receiver, *dest, depth + 1, 0});
      reacted = true;
    }
    return reacted;
  }

  const InstanceModel& inst_;
  const compose::ExploreLimits& limits_;
  Rng& rng_;
  std::deque<Entry> entries_;
  std::deque<Pending> emissions_;
};

// Runs one replication, calling `visit(time, state)` for every tangible
// state entered; stops early when `visit` returns false.
template <class Visit>
void run(const InstanceModel& instance, double horizon, Rng& rng,
         const compose::ExploreLimits& limits, Visit visit) {
  GlobalState s = instance.initial_state();
  Cascade(instance, limits, rng).settle(s);
  double now = 0.0;
  if (!visit(now, s)) return;
  struct Enabled {
    std::size_t automaton;
    const TimedTransition* transition;
  };
  std::vector<Enabled> enabled;
  for (;;) {
    enabled.clear();
    double total = 0.0;
    for (std::size_t a = 0; a < instance.automata.size(); ++a) {
      for (const auto& t : instance.automata[a].timed) {
        if (t.source == s[a] && t.rate > 0.0) {
          enabled.push_back({a, &t});
          total += t.rate;
        }
      }
    }
    if (enabled.empty()) return;
    now += rng.exponential(total);
    if (now > horizon) return;
    double pick = rng.uniform() * total;
    const Enabled* chosen = &enabled.back();
    for (const auto& e : enabled) {
      if (pick < e.transition->rate) {
        chosen = &e;
        break;
      }
      pick -= e.transition->rate;
    }
    Cascade(instance, limits, rng).fire(s, chosen->automaton, *chosen->transition);
    if (!visit(now, s)) return;
  }
}

const StateClass& find_class(const InstanceModel& instance, const std::string& label) {
  for (const auto& c : instance.classes) {
    if (c.label == label) return c;
  }
  throw Error(ErrorCode::label_missing, fmt::format("the model has no state class '{}'", label));
}

}  // namespace

Trajectory replication_run(const InstanceModel& instance, double horizon, std::uint64_t seed,
                           const compose::ExploreLimits& limits) {
  if (!(horizon >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, fmt::format("horizon must be >= 0, got {}", horizon));
  }
  Rng rng(seed);
  Trajectory out;
  run(instance, horizon, rng, limits, [&](double t, const GlobalState& s) {
    out.push_back({t, s});
    return true;
  });
  return out;
}

Estimate simulate_measure(const InstanceModel& instance, const SimConfig& cfg) {
  using analyze::MeasureKind;
  const auto& spec = cfg.measure;
  if (cfg.replications == 0) throw Error(ErrorCode::invalid_argument, "replications must be >= 1");
  if (spec.kind == MeasureKind::mttf) {
    throw Error(ErrorCode::invalid_argument, "simulation does not estimate mttf");
  }
  Estimate est;
  est.seed = cfg.seed;
  est.replications = cfg.replications;
  double horizon = spec.time;
  if (spec.kind == MeasureKind::steady_state_availability) {
    horizon = cfg.steady_state_horizon;
    est.warnings.push_back(
        {Severity::warning, "steady-state-approximation",
         fmt::format("steady-state availability approximated by point availability at t={}",
                     horizon),
         SourceSpan::unknown()});
  }
  if (!(horizon >= 0.0) || std::isinf(horizon)) {
    throw Error(ErrorCode::invalid_argument, fmt::format("time must be finite and >= 0, got {}",
                                                         horizon));
  }
  const std::string& label =
      spec.kind == MeasureKind::safety ? spec.catastrophic_class : spec.failure_class;
  const StateClass& cls = find_class(instance, label);
  const bool first_passage = spec.kind == MeasureKind::reliability || spec.kind == MeasureKind::safety;

  for (std::size_t k = 0; k < cfg.replications; ++k) {
    Rng rng(replication_seed(cfg.seed, k));
    bool hit = false;
    bool last_bad = false;
    run(instance, horizon, rng, cfg.limits, [&](double, const GlobalState& s) {
      last_bad = evaluate(cls.condition, instance, s);
      if (first_passage && last_bad) {
        hit = true;
        return false;
      }
      return true;
    });
    bool success = first_passage ? !hit : !last_bad;
    if (success) ++est.successes;
  }
  const double n = static_cast<double>(cfg.replications);
  est.mean = static_cast<double>(est.successes) / n;
  double variance = cfg.replications > 1 ? est.mean * (1.0 - est.mean) * n / (n - 1.0) : 0.0;
  est.half_width_95 = 1.96 * std::sqrt(variance / n);
  return est;
}

}  // namespace errml::simulate
