#include "errml/iterations.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

namespace errml {

namespace {

// Keys cover every field that takes part in equality, so the canonical order
// never depends on declaration order, even for invalid duplicates.
std::string expr_key(const BoolExpr& e) {
  std::string out = fmt::format("({}{}{}[{}]", static_cast<int>(e.kind), e.value ? 1 : 0, e.target, e.item);
  for (const auto& op : e.operands) out += expr_key(op);
  return out + ")";
}

std::string occurrence_key(const std::optional<Occurrence>& o) {
  if (!o) return "-";
  const auto& v = o->value.value;
  return fmt::format("{}{}", static_cast<int>(o->kind),
                     std::holds_alternative<double>(v) ? fmt::format("{}", std::get<double>(v))
                                                       : "$" + std::get<std::string>(v));
}

std::string sort_key(const Feature& feature) {
  struct {
    std::string operator()(const StateDecl& s) const { return fmt::format("0{}", s.initial ? 1 : 0); }
    std::string operator()(const EventDecl& e) const { return "1" + occurrence_key(e.occurrence); }
    std::string operator()(const PropagationDecl& p) const {
      return fmt::format("2{}{}", static_cast<int>(p.direction), occurrence_key(p.occurrence));
    }
  } key;
  return name_of(feature) + "\x1f" + std::visit(key, feature);
}

std::string sort_key(const Transition& t) {
  return fmt::format("{}\x1f{}\x1f{}\x1f{}", t.source, static_cast<int>(t.trigger.kind),
                     t.trigger.name, t.destination);
}

std::string sort_key(const Port& port) {
  return fmt::format("{}\x1f{}{}", port.name, static_cast<int>(port.direction),
                     static_cast<int>(port.kind));
}

std::string sort_key(const Connection& connection) {
  return fmt::format("{}\x1f{}\x1f{}", connection.name, connection.source, connection.destination);
}

std::string sort_key(const Component& component) { return component.name; }

std::string sort_key(const AnnexItem& item) {
  struct {
    std::string operator()(const ModelAssociation& m) const { return "0" + m.qualified_name(); }
    std::string operator()(const GuardOut& g) const {
      std::string out = "1" + g.port;
      for (const auto& c : g.clauses) out += "\x1f" + c.propagation + expr_key(c.condition);
      return out;
    }
    std::string operator()(const DerivedClause& d) const {
      return "2" + d.class_name + "\x1f" + expr_key(d.condition);
    }
  } key;
  return std::visit(key, item);
}

template <class T>
Staged<T> flatten(std::vector<T> items) {
  std::stable_sort(items.begin(), items.end(),
                   [](const T& a, const T& b) { return sort_key(a) < sort_key(b); });
  Staged<T> out;
  for (auto& item : items) out.add(std::move(item), 1);
  return out;
}

Component resolve_component(const Component& component, int iteration) {
  Component out;
  out.category = component.category;
  out.name = component.name;
  out.span = component.span;
  out.ports = flatten(component.ports.resolve(iteration));
  out.connections = flatten(component.connections.resolve(iteration));
  out.annex = flatten(component.annex.resolve(iteration));
  std::vector<Component> subs;
  for (const auto& sub : component.subcomponents.resolve(iteration)) {
    subs.push_back(resolve_component(sub, iteration));
  }
  out.subcomponents = flatten(std::move(subs));
  return out;
}

void check_forward_references(const ErrorModelType& type, const ErrorModelImplementation& impl,
                              const std::vector<Feature>& current_features,
                              const std::vector<Transition>& transitions, int iteration) {
  std::set<std::string> current;
  for (const auto& f : current_features) current.insert(name_of(f));
  std::set<std::string> ever;
  for (const auto& f : type.features.all_added()) ever.insert(name_of(f));

  auto check = [&](const std::string& name, const Transition& t) {
    if (!current.count(name) && ever.count(name)) {
      throw Error(ErrorCode::forward_reference,
                  fmt::format("{}: transition at iteration <= {} references '{}', which '{}' "
                              "declares only at a later iteration",
                              impl.qualified_name(), iteration, name, type.name),
                  t.span);
    }
  };
  for (const auto& t : transitions) {
    check(t.source, t);
    check(t.trigger.name, t);
    check(t.destination, t);
  }
}

template <class T, class Normalize>
std::vector<T> advance_list(const Staged<T>& resolved, const Staged<T>& source, int iteration,
                            Normalize normalize_removed) {
  std::vector<T> current = resolved.resolve(1);
  for (const auto& delta : source.deltas()) {
    if (delta.iteration != iteration) continue;
    for (const auto& gone : delta.removed) {
      T target = normalize_removed(gone);
      auto it = std::find(current.begin(), current.end(), target);
      if (it == current.end()) {
        throw Error(ErrorCode::remove_without_add,
                    fmt::format("iteration {} removes a declaration that is not present", iteration),
                    span_of(gone));
      }
      current.erase(it);
    }
    current.insert(current.end(), delta.added.begin(), delta.added.end());
  }
  return current;
}

template <class T>
T identity(const T& item) {
  return item;
}

Component advance_component(const Component& resolved, const Component& source, int iteration) {
  Component out;
  out.category = resolved.category;
  out.name = resolved.name;
  out.span = resolved.span;
  out.ports = flatten(advance_list(resolved.ports, source.ports, iteration, identity<Port>));
  out.connections =
      flatten(advance_list(resolved.connections, source.connections, iteration, identity<Connection>));
  out.annex = flatten(advance_list(resolved.annex, source.annex, iteration, identity<AnnexItem>));

  // Subcomponents that survive from the previous iteration advance their own
  // lists; newly added ones are resolved from scratch at this iteration.
  std::vector<Component> previous = resolved.subcomponents.resolve(1);
  std::vector<Component> added;
  std::vector<Component> kept = previous;
  for (const auto& delta : source.subcomponents.deltas()) {
    if (delta.iteration != iteration) continue;
    for (const auto& gone : delta.removed) {
      Component target = resolve_component(gone, iteration - 1);
      auto it = std::find(kept.begin(), kept.end(), target);
      if (it == kept.end()) {
        throw Error(ErrorCode::remove_without_add,
                    fmt::format("iteration {} removes component '{}' that is not present", iteration,
                                gone.name),
                    gone.span);
      }
      kept.erase(it);
    }
    added = delta.added;
  }

  auto all_sources = source.subcomponents.all_added();
  std::vector<Component> subs;
  for (const auto& sub : kept) {
    auto it = std::find_if(all_sources.rbegin(), all_sources.rend(),
                           [&](const Component& c) { return c.name == sub.name; });
    subs.push_back(it == all_sources.rend() ? sub : advance_component(sub, *it, iteration));
  }
  for (const auto& sub : added) subs.push_back(resolve_component(sub, iteration));
  out.subcomponents = flatten(std::move(subs));
  return out;
}

}  // namespace

Model apply_iterations(const Model& model, int iteration) {
  if (iteration < 1) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("iteration must be >= 1, got {}", iteration));
  }
  Model out;
  out.parameters = model.parameters;
  for (const auto& type : model.library.types) {
    ErrorModelType resolved{type.name, flatten(type.features.resolve(iteration)), type.span};
    out.library.types.push_back(std::move(resolved));
  }
  for (const auto& impl : model.library.implementations) {
    auto transitions = impl.transitions.resolve(iteration);
    if (const auto* type = model.library.find_type(impl.type_name)) {
      check_forward_references(*type, impl, type->features.resolve(iteration), transitions,
                               iteration);
    }
    ErrorModelImplementation resolved{impl.type_name, impl.impl_name, flatten(std::move(transitions)),
                                      impl.span};
    out.library.implementations.push_back(std::move(resolved));
  }
  if (model.architecture.root) {
    out.architecture.root = resolve_component(*model.architecture.root, iteration);
  }
  return out;
}

Model advance_iteration(const Model& resolved, const Model& source, int iteration) {
  Model out;
  out.parameters = resolved.parameters;
  for (const auto& type : resolved.library.types) {
    const ErrorModelType* origin = source.library.find_type(type.name);
    ErrorModelType next = type;
    if (origin) {
      next.features = flatten(advance_list(type.features, origin->features, iteration,
                                           identity<Feature>));
    }
    out.library.types.push_back(std::move(next));
  }
  for (const auto& impl : resolved.library.implementations) {
    const auto* origin = source.library.find_implementation(impl.type_name, impl.impl_name);
    ErrorModelImplementation next = impl;
    if (origin) {
      next.transitions = flatten(advance_list(impl.transitions, origin->transitions, iteration,
                                              identity<Transition>));
    }
    out.library.implementations.push_back(std::move(next));
  }
  if (resolved.architecture.root && source.architecture.root) {
    out.architecture.root =
        advance_component(*resolved.architecture.root, *source.architecture.root, iteration);
  } else {
    out.architecture = resolved.architecture;
  }
  return out;
}

}  // namespace errml
