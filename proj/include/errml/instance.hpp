#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "errml/ast.hpp"

namespace errml {

using ParameterMap = std::map<std::string, double>;

/// One local error state index per automaton, in automaton order.
using GlobalState = std::vector<std::uint32_t>;

/// Transition fired by an exponential clock: an error event, or an out
/// propagation with a Poisson occurrence.
struct TimedTransition {
  std::uint32_t source = 0;
  std::uint32_t destination = 0;
  double rate = 0.0;
  Trigger trigger;
};

/// Out propagation with a fixed occurrence: evaluated once when the automaton
/// enters `source`, taken with `probability`.
struct Emission {
  std::uint32_t source = 0;
  std::uint32_t destination = 0;
  std::string propagation;
  double probability = 1.0;
};

struct Reception {
  std::uint32_t source = 0;
  std::uint32_t destination = 0;
  std::string propagation;
};

/// Error model instance bound to one component.
struct Automaton {
  std::string path;   // dotted component path from the root
  std::string model;  // Type.Impl
  std::vector<std::string> states;
  std::uint32_t initial = 0;
  std::vector<TimedTransition> timed;
  std::vector<Emission> emissions;
  std::vector<Reception> receptions;
  std::map<std::string, PropagationDirection> propagations;

  std::optional<std::uint32_t> state_index(const std::string& name) const;
  /// Destination of the in-propagation transition enabled in `state`, if any.
  std::optional<std::uint32_t> receive(std::uint32_t state, const std::string& propagation) const;
  /// True when `state` has a self-loop `s-[out P]->s`, i.e. P is observable there.
  bool observes(std::uint32_t state, const std::string& propagation) const;
};

struct Route {
  std::size_t sender = 0;
  std::string propagation;
  std::size_t receiver = 0;
  std::string source_port;
  std::string destination_port;
  bool guarded = false;  // leaves through a port governed by a Guard_Out

  bool operator==(const Route&) const = default;
};

/// Who hears each out propagation. Routes follow connection direction only and
/// match propagations by name; they are sorted by sender, propagation and
/// receiver (automata are in lexicographic path order).
struct RoutingTable {
  std::vector<Route> routes;
  /// (sender, propagation) pairs declared as out/in out but heard by nobody.
  std::vector<std::pair<std::size_t, std::string>> inactive;

  std::vector<const Route*> from(std::size_t sender, const std::string& propagation) const;
  bool is_inactive(std::size_t sender, const std::string& propagation) const;
};

/// Boolean condition with atoms bound to automata.
struct CompiledExpr {
  BoolExpr::Kind kind = BoolExpr::Kind::constant;
  bool value = false;
  // Guard atom: true when any of `automata` observes `propagation`.
  // Derived atom: true when automata[0] is in `state`.
  std::vector<std::size_t> automata;
  std::string propagation;
  std::optional<std::uint32_t> state;
  std::vector<CompiledExpr> operands;
};

struct ResolvedGuard {
  struct Clause {
    std::string propagation;
    CompiledExpr condition;
  };

  std::size_t owner = 0;
  std::string port;
  std::vector<Clause> clauses;
};

/// A derived state class. Classes of the root component keep their plain
/// name; classes of nested composites are prefixed with the composite path.
struct StateClass {
  std::string label;
  std::string owner;
  CompiledExpr condition;
};

/// Architecture with error models bound to components, resolved at one
/// iteration with all parameters substituted. Immutable after construction.
struct InstanceModel {
  int iteration = 1;
  std::vector<Automaton> automata;  // sorted by path
  RoutingTable routing;
  std::vector<ResolvedGuard> guards;  // sorted by owner path, then port
  std::vector<StateClass> classes;
  Diagnostics diagnostics;  // info and warnings raised while instantiating

  GlobalState initial_state() const;
  std::optional<std::size_t> find(const std::string& path) const;
  std::vector<std::string> class_names() const;
  /// Labels of every class whose condition holds in `state`.
  std::vector<std::string> classify(const GlobalState& state) const;
  /// "(Root.A=Error_Free, Root.B=Failed)"
  std::string describe(const GlobalState& state) const;
};

bool evaluate(const CompiledExpr& expr, const InstanceModel& instance, const GlobalState& state);

/// Propagation emitted through the guarded port in `state`, if any clause holds.
std::optional<std::string> guard_output(const ResolvedGuard& guard, const InstanceModel& instance,
                                        const GlobalState& state);

/// Binds error models to components at `iteration`. `overrides` take
/// precedence over the model's `parameters` block.
///
/// Throws InvalidModel if the model fails validation at that iteration,
/// NoErrorModels, UnknownErrorModel, GuardAtomUnresolvable,
/// DerivedAtomUnresolvable, UnboundParameter or InvalidParameter.
InstanceModel instantiate(const Model& model, int iteration, const ParameterMap& overrides = {});

const RoutingTable& routing_table(const InstanceModel& instance);

}  // namespace errml
