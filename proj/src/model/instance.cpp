#include "errml/instance.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <set>
#include <tuple>

#include <fmt/format.h>

#include "errml/iterations.hpp"
#include "errml/validate.hpp"

namespace errml {

std::optional<std::uint32_t> Automaton::state_index(const std::string& name) const {
  auto it = std::find(states.begin(), states.end(), name);
  if (it == states.end()) return std::nullopt;
  return static_cast<std::uint32_t>(it - states.begin());
}

std::optional<std::uint32_t> Automaton::receive(std::uint32_t state,
                                                const std::string& propagation) const {
  for (const auto& r : receptions) {
    if (r.source == state && r.propagation == propagation) return r.destination;
  }
  return std::nullopt;
}

bool Automaton::observes(std::uint32_t state, const std::string& propagation) const {
  return std::any_of(emissions.begin(), emissions.end(), [&](const Emission& e) {
    return e.source == state && e.destination == state && e.propagation == propagation;
  });
}

std::vector<const Route*> RoutingTable::from(std::size_t sender,
                                             const std::string& propagation) const {
  std::vector<const Route*> out;
  for (const auto& r : routes) {
    if (r.sender == sender && r.propagation == propagation) out.push_back(&r);
  }
  return out;
}

bool RoutingTable::is_inactive(std::size_t sender, const std::string& propagation) const {
  return std::find(inactive.begin(), inactive.end(), std::make_pair(sender, propagation)) !=
         inactive.end();
}

GlobalState InstanceModel::initial_state() const {
  GlobalState s;
  s.reserve(automata.size());
  for (const auto& a : automata) s.push_back(a.initial);
  return s;
}

std::optional<std::size_t> InstanceModel::find(const std::string& path) const {
  for (std::size_t i = 0; i < automata.size(); ++i) {
    if (automata[i].path == path) return i;
  }
  return std::nullopt;
}

std::vector<std::string> InstanceModel::class_names() const {
  std::vector<std::string> out;
  for (const auto& c : classes) out.push_back(c.label);
  return out;
}

std::vector<std::string> InstanceModel::classify(const GlobalState& state) const {
  std::vector<std::string> out;
  for (const auto& c : classes) {
    if (evaluate(c.condition, *this, state)) out.push_back(c.label);
  }
  return out;
}

std::string InstanceModel::describe(const GlobalState& state) const {
  std::string out = "(";
  for (std::size_t i = 0; i < automata.size() && i < state.size(); ++i) {
    if (i) out += ", ";
    out += automata[i].path + "=" + automata[i].states.at(state[i]);
  }
  return out + ")";
}

bool evaluate(const CompiledExpr& expr, const InstanceModel& instance, const GlobalState& state) {
  using Kind = BoolExpr::Kind;
  switch (expr.kind) {
    case Kind::constant:
      return expr.value;
    case Kind::atom:
      if (expr.state) return state.at(expr.automata.front()) == *expr.state;
      return std::any_of(expr.automata.begin(), expr.automata.end(), [&](std::size_t a) {
        return instance.automata[a].observes(state[a], expr.propagation);
      });
    case Kind::negation:
      return !evaluate(expr.operands.front(), instance, state);
    case Kind::conjunction:
      return std::all_of(expr.operands.begin(), expr.operands.end(),
                         [&](const CompiledExpr& e) { return evaluate(e, instance, state); });
    case Kind::disjunction:
      return std::any_of(expr.operands.begin(), expr.operands.end(),
                         [&](const CompiledExpr& e) { return evaluate(e, instance, state); });
  }
  return false;
}

std::optional<std::string> guard_output(const ResolvedGuard& guard, const InstanceModel& instance,
                                        const GlobalState& state) {
  for (const auto& clause : guard.clauses) {
    if (evaluate(clause.condition, instance, state)) return clause.propagation;
  }
  return std::nullopt;
}

const RoutingTable& routing_table(const InstanceModel& instance) { return instance.routing; }

namespace {

using PortKey = std::pair<std::string, std::string>;  // component path, port name

struct VisibleComponent {
  const Component* component = nullptr;
  std::vector<Port> ports;
  std::vector<AnnexItem> annex;
  bool bound = false;
  std::optional<ModelAssociation> association;
};

class Builder {
 public:
  Builder(const Model& resolved, int iteration, ParameterMap parameters)
      : model_(resolved), parameters_(std::move(parameters)) {
    instance_.iteration = iteration;
  }

  InstanceModel build() {
    walk(*model_.architecture.root, model_.architecture.root->name);
    if (bound_paths_.empty()) {
      throw Error(ErrorCode::no_error_models, "no component is bound to an error model",
                  model_.architecture.root->span);
    }
    std::sort(bound_paths_.begin(), bound_paths_.end());
    for (const auto& path : bound_paths_) make_automaton(path);
    build_routes();
    build_guards();
    build_classes();
    return std::move(instance_);
  }

 private:
  void walk(const Component& component, const std::string& path) {
    VisibleComponent visible;
    visible.component = &component;
    visible.ports = component.ports.resolve(1);
    visible.annex = component.annex.resolve(1);
    for (const auto& item : visible.annex) {
      if (const auto* a = std::get_if<ModelAssociation>(&item)) visible.association = *a;
    }
    visible.bound = visible.association.has_value();
    auto subs = component.subcomponents.resolve(1);
    if (visible.bound) {
      bound_paths_.push_back(path);
      if (!subs.empty()) {
        instance_.diagnostics.push_back(
            {Severity::info, "black-box",
             fmt::format("{} binds its own error model; error models of its {} subcomponent(s) "
                         "are not part of the instance",
                         path, subs.size()),
             component.span});
      }
    } else {
      for (const auto& c : component.connections.resolve(1)) add_connection(path, c);
      for (const auto& sub : subs) {
        // Keep the resolved subcomponent alive for the pointers held below.
        owned_.push_back(std::make_unique<Component>(sub));
        walk(*owned_.back(), path + "." + sub.name);
      }
    }
    visible_.emplace(path, std::move(visible));
  }

  void add_connection(const std::string& owner, const Connection& c) {
    auto endpoint = [&](const std::string& ref) -> PortKey {
      auto dot = ref.find('.');
      if (dot == std::string::npos) return {owner, ref};
      return {owner + "." + ref.substr(0, dot), ref.substr(dot + 1)};
    };
    edges_.emplace_back(endpoint(c.source), endpoint(c.destination));
  }

  double quantity(const Quantity& q, const SourceSpan& span) const {
    if (!q.is_parameter()) return std::get<double>(q.value);
    const auto& name = std::get<std::string>(q.value);
    auto it = parameters_.find(name);
    if (it == parameters_.end()) {
      throw Error(ErrorCode::unbound_parameter, fmt::format("parameter '{}' is not bound", name),
                  span);
    }
    return it->second;
  }

  double rate_of(const Occurrence& occ, const std::string& owner) const {
    double v = quantity(occ.value, occ.span);
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::invalid_parameter,
                  fmt::format("rate of '{}' must be a finite value >= 0, got {}", owner, v),
                  occ.span);
    }
    return v;
  }

  double probability_of(const Occurrence& occ, const std::string& owner) const {
    double v = quantity(occ.value, occ.span);
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::invalid_parameter,
                  fmt::format("probability of '{}' must lie in [0, 1], got {}", owner, v),
                  occ.span);
    }
    return v;
  }

  void make_automaton(const std::string& path) {
    const auto& visible = visible_.at(path);
    const auto& assoc = *visible.association;
    const auto* impl = model_.library.find_implementation(assoc.type_name, assoc.impl_name);
    const auto* type = model_.library.find_type(assoc.type_name);
    if (!impl || !type) {
      throw Error(ErrorCode::unknown_error_model,
                  fmt::format("{}: unknown error model {}", path, assoc.qualified_name()),
                  assoc.span);
    }
    Automaton a;
    a.path = path;
    a.model = assoc.qualified_name();
    std::map<std::string, const EventDecl*> events;
    std::map<std::string, const PropagationDecl*> propagations;
    auto features = type->features.resolve(1);
    for (const auto& f : features) {
      if (const auto* s = std::get_if<StateDecl>(&f)) {
        if (s->initial) a.initial = static_cast<std::uint32_t>(a.states.size());
        a.states.push_back(s->name);
      } else if (const auto* e = std::get_if<EventDecl>(&f)) {
        events[e->name] = e;
      } else if (const auto* p = std::get_if<PropagationDecl>(&f)) {
        propagations[p->name] = p;
        a.propagations[p->name] = p->direction;
      }
    }
    if (a.states.empty()) {
      throw Error(ErrorCode::invalid_model,
                  fmt::format("{}: error model {} declares no error states at iteration {}", path,
                              a.model, instance_.iteration),
                  assoc.span);
    }
    for (const auto& t : impl->transitions.resolve(1)) {
      auto src = *a.state_index(t.source);
      auto dst = *a.state_index(t.destination);
      const std::string& name = t.trigger.name;
      switch (t.trigger.kind) {
        case TriggerKind::event: {
          const auto& occ = events.at(name)->occurrence;
          if (!occ) {
            warn("no-occurrence",
                 fmt::format("{}: event {} has no Occurrence and never fires", path, name), t.span);
            break;
          }
          double rate = rate_of(*occ, name);
          if (rate > 0.0) a.timed.push_back({src, dst, rate, t.trigger});
          break;
        }
        case TriggerKind::in_propagation:
          a.receptions.push_back({src, dst, name});
          break;
        case TriggerKind::out_propagation: {
          const auto& occ = propagations.at(name)->occurrence;
          if (occ && occ->kind == OccurrenceKind::poisson) {
            warn("untested-semantics",
                 fmt::format("{}: out propagation {} with a Poisson occurrence fires as a timed "
                             "transition",
                             path, name),
                 t.span);
            double rate = rate_of(*occ, name);
            if (rate > 0.0) a.timed.push_back({src, dst, rate, t.trigger});
          } else {
            double p = occ ? probability_of(*occ, name) : 1.0;
            a.emissions.push_back({src, dst, name, p});
          }
          break;
        }
      }
    }
    instance_.automata.push_back(std::move(a));
  }

  void warn(std::string code, std::string message, const SourceSpan& span) {
    instance_.diagnostics.push_back({Severity::warning, std::move(code), std::move(message), span});
  }

  bool is_bound(const std::string& path) const {
    auto it = visible_.find(path);
    return it != visible_.end() && it->second.bound;
  }

  bool is_guarded(const std::string& path, const std::string& port) const {
    auto it = visible_.find(path);
    if (it == visible_.end()) return false;
    return std::any_of(it->second.annex.begin(), it->second.annex.end(), [&](const AnnexItem& i) {
      const auto* g = std::get_if<GuardOut>(&i);
      return g && g->port == port;
    });
  }

  /// Bound components reachable downstream of `start`, with the port reached.
  std::vector<PortKey> downstream(const PortKey& start) const {
    std::vector<PortKey> out;
    std::set<PortKey> visited{start};
    std::vector<PortKey> stack{start};
    while (!stack.empty()) {
      PortKey node = stack.back();
      stack.pop_back();
      for (const auto& [src, dst] : edges_) {
        if (src != node || !visited.insert(dst).second) continue;
        if (is_bound(dst.first)) {
          out.push_back(dst);
        } else {
          stack.push_back(dst);
        }
      }
    }
    return out;
  }

  /// Bound components upstream of `start`, with the port they send from.
  std::vector<PortKey> upstream(const PortKey& start) const {
    std::vector<PortKey> out;
    std::set<PortKey> visited{start};
    std::vector<PortKey> stack{start};
    while (!stack.empty()) {
      PortKey node = stack.back();
      stack.pop_back();
      for (const auto& [src, dst] : edges_) {
        if (dst != node || !visited.insert(src).second) continue;
        if (is_bound(src.first)) {
          out.push_back(src);
        } else {
          stack.push_back(src);
        }
      }
    }
    return out;
  }

  void build_routes() {
    auto& table = instance_.routing;
    for (std::size_t s = 0; s < instance_.automata.size(); ++s) {
      const auto& sender = instance_.automata[s];
      const auto& visible = visible_.at(sender.path);
      for (const auto& [prop, direction] : sender.propagations) {
        if (!can_send(direction)) continue;
        bool any = false;
        for (const auto& port : visible.ports) {
          if (port.direction != PortDirection::out) continue;
          for (const auto& [path, dst_port] : downstream({sender.path, port.name})) {
            auto r = *instance_.find(path);
            auto it = instance_.automata[r].propagations.find(prop);
            if (it == instance_.automata[r].propagations.end() || !can_receive(it->second)) {
              continue;
            }
            Route route{s, prop, r, port.name, dst_port, is_guarded(sender.path, port.name)};
            if (std::find(table.routes.begin(), table.routes.end(), route) == table.routes.end()) {
              table.routes.push_back(route);
            }
            any = true;
          }
        }
        if (!any) table.inactive.emplace_back(s, prop);
      }
    }
    std::stable_sort(table.routes.begin(), table.routes.end(), [](const Route& a, const Route& b) {
      return std::tie(a.sender, a.propagation, a.receiver, a.source_port) <
             std::tie(b.sender, b.propagation, b.receiver, b.source_port);
    });

    for (std::size_t r = 0; r < instance_.automata.size(); ++r) {
      const auto& receiver = instance_.automata[r];
      std::set<std::string> reported;
      for (const auto& rec : receiver.receptions) {
        bool fed = std::any_of(table.routes.begin(), table.routes.end(), [&](const Route& route) {
          return route.receiver == r && route.propagation == rec.propagation;
        });
        if (!fed && reported.insert(rec.propagation).second) {
          warn("unfed-propagation",
               fmt::format("{}: in propagation {} is never received; its transitions are "
                           "unreachable",
                           receiver.path, rec.propagation),
               visible_.at(receiver.path).association->span);
        }
      }
    }
  }

  CompiledExpr compile(const BoolExpr& expr,
                       const std::function<void(const BoolExpr&, CompiledExpr&)>& bind_atom) {
    CompiledExpr out;
    out.kind = expr.kind;
    out.value = expr.value;
    if (expr.kind == BoolExpr::Kind::atom) bind_atom(expr, out);
    for (const auto& operand : expr.operands) out.operands.push_back(compile(operand, bind_atom));
    return out;
  }

  void build_guards() {
    for (const auto& [path, visible] : visible_) {
      for (const auto& item : visible.annex) {
        const auto* guard = std::get_if<GuardOut>(&item);
        if (!guard) continue;
        auto owner = instance_.find(path);
        if (!owner) {
          throw Error(ErrorCode::guard_atom_unresolvable,
                      fmt::format("Guard_Out on {} needs an error model bound to {}", guard->port,
                                  path),
                      guard->span);
        }
        const auto& automaton = instance_.automata[*owner];
        ResolvedGuard resolved;
        resolved.owner = *owner;
        resolved.port = guard->port;
        for (const auto& clause : guard->clauses) {
          auto decl = automaton.propagations.find(clause.propagation);
          if (decl == automaton.propagations.end() || !can_send(decl->second)) {
            throw Error(ErrorCode::guard_atom_unresolvable,
                        fmt::format("{}: Guard_Out emits {}, which {} does not declare as an out "
                                    "propagation",
                                    path, clause.propagation, automaton.model),
                        clause.span);
          }
          auto bind = [&](const BoolExpr& atom, CompiledExpr& out) {
            out.propagation = atom.item;
            for (const auto& [sender_path, sender_port] : upstream({path, atom.target})) {
              auto s = *instance_.find(sender_path);
              auto it = instance_.automata[s].propagations.find(atom.item);
              if (it != instance_.automata[s].propagations.end() && can_send(it->second)) {
                out.automata.push_back(s);
              }
            }
            std::sort(out.automata.begin(), out.automata.end());
            out.automata.erase(std::unique(out.automata.begin(), out.automata.end()),
                               out.automata.end());
            if (out.automata.empty()) {
              throw Error(ErrorCode::guard_atom_unresolvable,
                          fmt::format("{}: no component connected to port {} sends {}", path,
                                      atom.target, atom.item),
                          atom.span);
            }
          };
          resolved.clauses.push_back({clause.propagation, compile(clause.condition, bind)});
        }
        instance_.guards.push_back(std::move(resolved));
      }
    }
    std::sort(instance_.guards.begin(), instance_.guards.end(),
              [](const ResolvedGuard& a, const ResolvedGuard& b) {
                return std::tie(a.owner, a.port) < std::tie(b.owner, b.port);
              });
  }

  void build_classes() {
    const std::string& root = model_.architecture.root->name;
    for (const auto& [path, visible] : visible_) {
      for (const auto& item : visible.annex) {
        const auto* clause = std::get_if<DerivedClause>(&item);
        if (!clause) continue;
        auto bind = [&](const BoolExpr& atom, CompiledExpr& out) {
          auto target = instance_.find(path + "." + atom.target);
          if (!target) {
            throw Error(ErrorCode::derived_atom_unresolvable,
                        fmt::format("{}: {} is not a subcomponent with an error model", path,
                                    atom.target),
                        atom.span);
          }
          auto state = instance_.automata[*target].state_index(atom.item);
          if (!state) {
            throw Error(ErrorCode::derived_atom_unresolvable,
                        fmt::format("{}: {} has no error state {}", path, atom.target, atom.item),
                        atom.span);
          }
          out.automata = {*target};
          out.state = *state;
        };
        std::string label = path == root ? clause->class_name : path + "." + clause->class_name;
        instance_.classes.push_back({label, path, compile(clause->condition, bind)});
      }
    }
    std::stable_sort(instance_.classes.begin(), instance_.classes.end(),
                     [](const StateClass& a, const StateClass& b) { return a.label < b.label; });
  }

  const Model& model_;
  ParameterMap parameters_;
  InstanceModel instance_;
  std::map<std::string, VisibleComponent> visible_;
  std::vector<std::string> bound_paths_;
  std::vector<std::pair<PortKey, PortKey>> edges_;
  std::vector<std::unique_ptr<Component>> owned_;
};

}  // namespace

InstanceModel instantiate(const Model& model, int iteration, const ParameterMap& overrides) {
  Model resolved = apply_iterations(model, iteration);
  Diagnostics problems = validate_model(resolved);
  for (const auto& d : problems) {
    if (d.severity == Severity::error && d.code == "unknown-error-model") {
      throw Error(ErrorCode::unknown_error_model, d.message, d.span);
    }
  }
  for (const auto& d : problems) {
    if (d.severity == Severity::error) throw Error(ErrorCode::invalid_model, d.message, d.span);
  }
  if (!resolved.architecture.root) {
    throw Error(ErrorCode::no_error_models, "the model declares no architecture");
  }
  ParameterMap parameters;
  for (const auto& p : resolved.parameters) parameters[p.name] = p.value;
  for (const auto& [name, value] : overrides) parameters[name] = value;

  return Builder(resolved, iteration, std::move(parameters)).build();
}

}  // namespace errml
