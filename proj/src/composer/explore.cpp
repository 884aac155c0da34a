#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>

#include <fmt/format.h>

#include "errml/composer.hpp"
#include "errml/diagnostic.hpp"

namespace errml::compose {

namespace {

// Pending decisions for the fixed-occurrence emissions of a state an
// automaton has just entered. `next` is the first emission not yet decided.
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

struct Config {
  GlobalState state;
  double probability;
  std::deque<Entry> entries;
  std::deque<Pending> emissions;
  int guard_steps = 0;
};

class Resolver {
 public:
  Resolver(const InstanceModel& instance, const ExploreLimits& limits,
           std::set<GlobalState>* vanishing)
      : inst_(instance), limits_(limits), vanishing_(vanishing) {}

  Distribution run(Config start) {
    std::vector<Config> stack;
    stack.push_back(std::move(start));
    while (!stack.empty()) {
      Config c = std::move(stack.back());
      stack.pop_back();
      step(std::move(c), stack);
    }
    return std::move(result_);
  }

 private:
  // Advances one configuration until it either branches or settles.
  void step(Config c, std::vector<Config>& stack) {
    for (;;) {
      if (!c.entries.empty()) {
        Entry& e = c.entries.front();
        const Automaton& a = inst_.automata[e.automaton];
        if (c.state[e.automaton] != e.state) {
          c.entries.pop_front();
          continue;
        }
        const Emission* em = nullptr;
        while (e.next < a.emissions.size()) {
          const Emission& cand = a.emissions[e.next];
          if (cand.source == e.state && cand.probability > 0.0) {
            em = &cand;
            break;
          }
          ++e.next;
        }
        if (!em) {
          c.entries.pop_front();
          continue;
        }
        ++e.next;
        double p = std::min(em->probability, 1.0);
        if (p < 1.0) {
          // The "not emitted" branch continues with the remaining decisions.
          Config skip = c;
          skip.probability *= 1.0 - p;
          stack.push_back(std::move(skip));
        }
        c.probability *= p;
        Entry taken = e;
        c.entries.pop_front();
        c.emissions.push_back({taken.automaton, em->propagation, taken.depth});
        if (em->destination != taken.state) {
          c.state[taken.automaton] = em->destination;
          c.entries.push_back({taken.automaton, em->destination, taken.depth + 1, 0});
        } else {
          // Still in the same state: its other emissions remain to be decided.
          c.entries.push_front(taken);
        }
        continue;
      }
      if (!c.emissions.empty()) {
        Pending pe = std::move(c.emissions.front());
        c.emissions.pop_front();
        if (pe.depth > limits_.max_cascade_depth) {
          throw Error(ErrorCode::cascade_depth_exceeded,
                      fmt::format("propagation cascade exceeds depth {} at {}",
                                  limits_.max_cascade_depth, inst_.describe(c.state)));
        }
        deliver(c, pe.sender, pe.propagation, pe.depth, false, {});
        continue;
      }
      if (react_to_guards(c)) continue;
      settle(c);
      return;
    }
  }

  // Sends `propagation` from `sender` to every distinct receiver; a receiver
  // without a matching in transition masks it.
  bool deliver(Config& c, std::size_t sender, const std::string& propagation, int depth,
               bool guarded, const std::string& port) {
    std::vector<std::size_t> done;
    bool reacted = false;
    for (const Route* r : inst_.routing.from(sender, propagation)) {
      if (r->guarded != guarded) continue;
      if (guarded && r->source_port != port) continue;
      if (std::find(done.begin(), done.end(), r->receiver) != done.end()) continue;
      done.push_back(r->receiver);
      const Automaton& a = inst_.automata[r->receiver];
      auto dest = a.receive(c.state[r->receiver], propagation);
      if (!dest || *dest == c.state[r->receiver]) continue;
      c.state[r->receiver] = *dest;
      c.entries.push_back({r->receiver, *dest, depth + 1, 0});
      reacted = true;
    }
    return reacted;
  }

  bool react_to_guards(Config& c) {
    for (const auto& g : inst_.guards) {
      auto out = guard_output(g, inst_, c.state);
      if (!out) continue;
      GlobalState before = c.state;
      if (!deliver(c, g.owner, *out, 0, true, g.port)) continue;
      if (vanishing_) vanishing_->insert(before);
      if (++c.guard_steps > limits_.max_cascade_depth) {
        throw Error(ErrorCode::guard_livelock,
                    fmt::format("guard reactions do not settle within {} steps from {}",
                                limits_.max_cascade_depth, inst_.describe(before)));
      }
      return true;
    }
    return false;
  }

  void settle(const Config& c) {
    for (auto& [s, p] : result_) {
      if (s == c.state) {
        p += c.probability;
        return;
      }
    }
    result_.emplace_back(c.state, c.probability);
  }

  const InstanceModel& inst_;
  const ExploreLimits& limits_;
  std::set<GlobalState>* vanishing_;
  Distribution result_;
};

struct StateHash {
  std::size_t operator()(const GlobalState& s) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (auto v : s) h = (h ^ v) * 1099511628211ull;
    return h;
  }
};

}  // namespace

Distribution fire(const InstanceModel& instance, const GlobalState& state, std::size_t automaton,
                  std::size_t index, const ExploreLimits& limits, std::set<GlobalState>* vanishing) {
  const Automaton& a = instance.automata.at(automaton);
  const TimedTransition& t = a.timed.at(index);
  Config c{state, 1.0, {}, {}, 0};
  c.state[automaton] = t.destination;
  if (t.trigger.kind == TriggerKind::out_propagation) {
    c.emissions.push_back({automaton, t.trigger.name, 1});
  }
  if (t.destination != t.source) c.entries.push_back({automaton, t.destination, 1, 0});
  return Resolver(instance, limits, vanishing).run(std::move(c));
}

GlobalState initial_tangible_state(const InstanceModel& instance, const ExploreLimits& limits,
                                   std::set<GlobalState>* vanishing) {
  Config c{instance.initial_state(), 1.0, {}, {}, 0};
  auto dist = Resolver(instance, limits, vanishing).run(std::move(c));
  if (dist.size() != 1) {
    throw Error(ErrorCode::invalid_model,
                "initial configuration resolves to several states with different probabilities");
  }
  return dist.front().first;
}

RawGraph explore(const InstanceModel& instance, const ExploreLimits& limits) {
  RawGraph g;
  std::set<GlobalState> vanishing;
  std::unordered_map<GlobalState, std::size_t, StateHash> index;

  auto intern = [&](const GlobalState& s) {
    auto [it, inserted] = index.emplace(s, g.states.size());
    if (inserted) {
      if (g.states.size() >= limits.max_states) {
        throw Error(ErrorCode::state_limit_exceeded,
                    fmt::format("state space exceeds {} states", limits.max_states));
      }
      g.states.push_back(s);
      g.transitions.emplace_back();
    }
    return it->second;
  };

  g.initial = intern(initial_tangible_state(instance, limits, &vanishing));
  for (std::size_t i = 0; i < g.states.size(); ++i) {
    for (std::size_t a = 0; a < instance.automata.size(); ++a) {
      const auto& timed = instance.automata[a].timed;
      for (std::size_t k = 0; k < timed.size(); ++k) {
        if (timed[k].source != g.states[i][a] || !(timed[k].rate > 0.0)) continue;
        GlobalState from = g.states[i];
        auto dist = fire(instance, from, a, k, limits, &vanishing);
        RawTransition rt{a, timed[k].trigger, timed[k].rate, {}};
        for (const auto& [s, p] : dist) rt.branches.push_back({p, intern(s)});
        g.transitions[i].push_back(std::move(rt));
      }
    }
  }
  g.vanishing = vanishing.size();
  return g;
}

Ctmc fold_guards_and_vanishing(const RawGraph& graph) {
  Ctmc c;
  c.num_states = graph.states.size();
  c.initial = graph.initial;
  c.global_states = graph.states;
  c.vanishing_folded = graph.vanishing;
  for (std::size_t i = 0; i < graph.transitions.size(); ++i) {
    for (const auto& t : graph.transitions[i]) {
      for (const auto& b : t.branches) {
        if (b.target == i) continue;
        c.transitions.push_back({i, b.target, t.rate * b.probability});
      }
    }
  }
  c.normalize();
  c.labels.assign(c.num_states, {});
  return c;
}

void label_states(Ctmc& ctmc, const InstanceModel& instance) {
  ctmc.declared_labels = instance.class_names();
  std::sort(ctmc.declared_labels.begin(), ctmc.declared_labels.end());
  ctmc.labels.assign(ctmc.num_states, {});
  for (std::size_t i = 0; i < ctmc.global_states.size() && i < ctmc.num_states; ++i) {
    auto labels = instance.classify(ctmc.global_states[i]);
    std::sort(labels.begin(), labels.end());
    ctmc.labels[i] = std::move(labels);
  }
}

Ctmc compose(const InstanceModel& instance, const ExploreLimits& limits) {
  Ctmc c = fold_guards_and_vanishing(explore(instance, limits));
  label_states(c, instance);
  c.descriptions.reserve(c.num_states);
  for (const auto& s : c.global_states) c.descriptions.push_back(instance.describe(s));
  return c;
}

}  // namespace errml::compose
