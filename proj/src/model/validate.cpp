#include "errml/validate.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <fmt/format.h>

#include "errml/iterations.hpp"

namespace errml {

namespace {

class Collector {
 public:
  void error(std::string code, std::string message, const SourceSpan& span) {
    push(Severity::error, std::move(code), std::move(message), span);
  }
  void warning(std::string code, std::string message, const SourceSpan& span) {
    push(Severity::warning, std::move(code), std::move(message), span);
  }

  Diagnostics take() { return std::move(out_); }

 private:
  void push(Severity severity, std::string code, std::string message, const SourceSpan& span) {
    Diagnostic d{severity, std::move(code), std::move(message), span};
    if (std::find(out_.begin(), out_.end(), d) == out_.end()) out_.push_back(std::move(d));
  }

  Diagnostics out_;
};

void check_occurrence(const std::optional<Occurrence>& occurrence, const std::string& owner,
                      Collector& sink) {
  if (!occurrence || occurrence->value.is_parameter()) return;
  double v = std::get<double>(occurrence->value.value);
  if (occurrence->kind == OccurrenceKind::poisson && !(v > 0.0)) {
    sink.error("invalid-occurrence",
               fmt::format("Poisson occurrence of '{}' must be > 0, got {}", owner, v),
               occurrence->span);
  }
  if (occurrence->kind == OccurrenceKind::fixed && !(v > 0.0 && v <= 1.0)) {
    sink.error("invalid-occurrence",
               fmt::format("fixed occurrence of '{}' must lie in (0, 1], got {}", owner, v),
               occurrence->span);
  }
}

struct TypeView {
  std::map<std::string, const StateDecl*> states;
  std::map<std::string, const EventDecl*> events;
  std::map<std::string, const PropagationDecl*> propagations;
  std::set<std::string> later;  // names declared only at later iterations
};

void check_type(const ErrorModelType& type, int iteration, Collector& sink, TypeView& view,
                std::vector<Feature>& storage) {
  try {
    storage = type.features.resolve(iteration);
  } catch (const Error& e) {
    sink.error("remove-without-add", fmt::format("error model {}: {}", type.name, e.what()),
               e.span().value_or(type.span));
    storage.clear();
  }
  std::set<std::string> seen;
  std::vector<const StateDecl*> initials;
  for (const auto& feature : storage) {
    const std::string& name = name_of(feature);
    if (!seen.insert(name).second) {
      sink.error("duplicate-name",
                 fmt::format("error model {}: duplicate name '{}'", type.name, name),
                 span_of(feature));
      continue;
    }
    if (const auto* s = std::get_if<StateDecl>(&feature)) {
      view.states[name] = s;
      if (s->initial) initials.push_back(s);
    } else if (const auto* e = std::get_if<EventDecl>(&feature)) {
      view.events[name] = e;
      check_occurrence(e->occurrence, name, sink);
      if (e->occurrence && e->occurrence->kind == OccurrenceKind::fixed) {
        sink.error("invalid-occurrence",
                   fmt::format("error event '{}' needs a Poisson occurrence", name),
                   e->occurrence->span);
      }
    } else if (const auto* p = std::get_if<PropagationDecl>(&feature)) {
      view.propagations[name] = p;
      check_occurrence(p->occurrence, name, sink);
    }
  }
  if (initials.size() > 1) {
    sink.error("multiple-initial",
               fmt::format("error model {}: multiple initial states", type.name), initials[1]->span);
  } else if (initials.empty() && !storage.empty()) {
    sink.error("no-initial", fmt::format("error model {}: no initial error state", type.name),
               type.span);
  }
  for (const auto& feature : type.features.all_added()) {
    if (!seen.count(name_of(feature))) view.later.insert(name_of(feature));
  }
}

void check_reference(bool found, const TypeView& view, const std::string& kind,
                     const std::string& name, const Transition& t, Collector& sink) {
  if (found) return;
  if (view.later.count(name)) {
    sink.error("forward-reference",
               fmt::format("{} '{}' is declared only at a later iteration", kind, name), t.span);
  } else {
    sink.error(fmt::format("unknown-{}", kind == "state" ? "state" : "trigger"),
               fmt::format("unknown {} {}", kind, name), t.span);
  }
}

void check_implementation(const ErrorModelImplementation& impl, const TypeView& view,
                          int iteration, Collector& sink) {
  std::vector<Transition> transitions;
  try {
    transitions = impl.transitions.resolve(iteration);
  } catch (const Error& e) {
    sink.error("remove-without-add",
               fmt::format("error model implementation {}: {}", impl.qualified_name(), e.what()),
               e.span().value_or(impl.span));
    return;
  }
  std::set<std::tuple<std::string, int, std::string>> seen_triggers;
  for (const auto& t : transitions) {
    check_reference(view.states.count(t.source) > 0, view, "state", t.source, t, sink);
    check_reference(view.states.count(t.destination) > 0, view, "state", t.destination, t, sink);
    switch (t.trigger.kind) {
      case TriggerKind::event:
        check_reference(view.events.count(t.trigger.name) > 0, view, "event", t.trigger.name, t,
                        sink);
        break;
      case TriggerKind::in_propagation:
      case TriggerKind::out_propagation: {
        auto it = view.propagations.find(t.trigger.name);
        check_reference(it != view.propagations.end(), view, "propagation", t.trigger.name, t,
                        sink);
        if (it == view.propagations.end()) break;
        bool in = t.trigger.kind == TriggerKind::in_propagation;
        if (in && !can_receive(it->second->direction)) {
          sink.error("direction-mismatch",
                     fmt::format("'{}' is not an in propagation", t.trigger.name), t.span);
        }
        if (!in && !can_send(it->second->direction)) {
          sink.error("direction-mismatch",
                     fmt::format("'{}' is not an out propagation", t.trigger.name), t.span);
        }
        break;
      }
    }
    // Out-propagation transitions from one state fire independently; events
    // and receptions must select a single destination.
    if (t.trigger.kind != TriggerKind::out_propagation &&
        !seen_triggers.emplace(t.source, static_cast<int>(t.trigger.kind), t.trigger.name).second) {
      sink.error("ambiguous-transition",
                 fmt::format("state {} has more than one transition triggered by {}", t.source,
                             t.trigger.name),
                 t.span);
    }
  }
}

void check_library_at(const ErrorModelLibrary& library, int iteration, Collector& sink) {
  std::map<std::string, TypeView> views;
  std::map<std::string, std::vector<Feature>> storage;
  std::set<std::string> type_names;
  for (const auto& type : library.types) {
    if (!type_names.insert(type.name).second) {
      sink.error("duplicate-name", fmt::format("duplicate error model type '{}'", type.name),
                 type.span);
      continue;
    }
    check_type(type, iteration, sink, views[type.name], storage[type.name]);
  }
  std::set<std::string> impl_names;
  for (const auto& impl : library.implementations) {
    if (!impl_names.insert(impl.qualified_name()).second) {
      sink.error("duplicate-name",
                 fmt::format("duplicate error model implementation '{}'", impl.qualified_name()),
                 impl.span);
      continue;
    }
    auto view = views.find(impl.type_name);
    if (view == views.end()) {
      sink.error("unknown-type",
                 fmt::format("implementation {} refers to unknown error model type {}",
                             impl.qualified_name(), impl.type_name),
                 impl.span);
      continue;
    }
    check_implementation(impl, view->second, iteration, sink);
  }
}

int library_max_iteration(const ErrorModelLibrary& library) {
  Model m;
  m.library = library;
  return m.max_iteration();
}

struct PortRef {
  const Port* port = nullptr;
  bool own = false;
};

PortRef find_endpoint(const std::vector<Component>& subs,
                      const std::vector<Port>& own_ports, const std::string& path) {
  auto dot = path.find('.');
  if (dot == std::string::npos) {
    for (const auto& p : own_ports) {
      if (p.name == path) return {&p, true};
    }
    return {};
  }
  std::string sub_name = path.substr(0, dot);
  std::string port_name = path.substr(dot + 1);
  for (const auto& sub : subs) {
    if (sub.name != sub_name) continue;
    for (const auto& delta : sub.ports.deltas()) {
      for (const auto& p : delta.added) {
        if (p.name == port_name) return {&p, false};
      }
    }
  }
  return {};
}

void check_component(const Component& component, const ErrorModelLibrary& library,
                     Collector& sink) {
  auto ports = component.ports.resolve(1);
  auto subs = component.subcomponents.resolve(1);
  auto connections = component.connections.resolve(1);
  auto annex = component.annex.resolve(1);

  std::set<std::string> names;
  for (const auto& p : ports) {
    if (!names.insert(p.name).second) {
      sink.error("duplicate-name",
                 fmt::format("component {}: duplicate port '{}'", component.name, p.name), p.span);
    }
  }
  names.clear();
  for (const auto& s : subs) {
    if (!names.insert(s.name).second) {
      sink.error("duplicate-name",
                 fmt::format("component {}: duplicate subcomponent '{}'", component.name, s.name),
                 s.span);
    }
  }
  for (const auto& c : connections) {
    PortRef src = find_endpoint(subs, ports, c.source);
    PortRef dst = find_endpoint(subs, ports, c.destination);
    if (!src.port) {
      sink.error("unknown-port", fmt::format("connection {}: unknown port {}", c.name, c.source),
                 c.span);
    }
    if (!dst.port) {
      sink.error("unknown-port",
                 fmt::format("connection {}: unknown port {}", c.name, c.destination), c.span);
    }
    if (src.port && src.port->direction != (src.own ? PortDirection::in : PortDirection::out)) {
      sink.error("connection-direction",
                 fmt::format("connection {}: source {} cannot send here", c.name, c.source), c.span);
    }
    if (dst.port && dst.port->direction != (dst.own ? PortDirection::out : PortDirection::in)) {
      sink.error("connection-direction",
                 fmt::format("connection {}: destination {} cannot receive here", c.name,
                             c.destination),
                 c.span);
    }
  }

  int associations = 0;
  std::set<std::string> guarded_ports;
  std::set<std::string> classes;
  for (const auto& item : annex) {
    if (const auto* a = std::get_if<ModelAssociation>(&item)) {
      if (++associations > 1) {
        sink.error("multiple-models",
                   fmt::format("component {} binds more than one error model", component.name),
                   a->span);
      }
      if (!library.find_implementation(a->type_name, a->impl_name)) {
        sink.error("unknown-error-model",
                   fmt::format("component {}: unknown error model {}", component.name,
                               a->qualified_name()),
                   a->span);
      }
    } else if (const auto* g = std::get_if<GuardOut>(&item)) {
      auto port = std::find_if(ports.begin(), ports.end(),
                               [&](const Port& p) { return p.name == g->port; });
      if (port == ports.end() || port->direction != PortDirection::out) {
        sink.error("guard-port",
                   fmt::format("Guard_Out applies to {}, which is not an out port of {}", g->port,
                               component.name),
                   g->span);
      }
      if (!guarded_ports.insert(g->port).second) {
        sink.error("guard-port", fmt::format("port {} has more than one Guard_Out", g->port),
                   g->span);
      }
    } else if (const auto* d = std::get_if<DerivedClause>(&item)) {
      if (!classes.insert(d->class_name).second) {
        sink.error("duplicate-name",
                   fmt::format("component {}: derived class {} declared twice", component.name,
                               d->class_name),
                   d->span);
      }
    }
  }
  for (const auto& s : subs) check_component(s, library, sink);
}

}  // namespace

Diagnostics validate_library(const ErrorModelLibrary& library) {
  Collector sink;
  int last = library_max_iteration(library);
  for (int i = 1; i <= last; ++i) check_library_at(library, i, sink);
  return sink.take();
}

Diagnostics validate_model(const Model& model) {
  Collector sink;
  std::set<std::string> parameters;
  for (const auto& p : model.parameters) {
    if (!parameters.insert(p.name).second) {
      sink.error("duplicate-name", fmt::format("parameter {} bound twice", p.name), p.span);
    }
  }
  int last = model.max_iteration();
  for (int i = 1; i <= last; ++i) {
    check_library_at(model.library, i, sink);
    if (!model.architecture.root) continue;
    try {
      Model resolved = apply_iterations(model, i);
      check_component(*resolved.architecture.root, model.library, sink);
    } catch (const Error& e) {
      // Library-level failures were already reported above.
      if (e.code() == ErrorCode::remove_without_add || e.code() == ErrorCode::forward_reference) {
        bool library_issue = false;
        try {
          Model lib_only;
          lib_only.library = model.library;
          apply_iterations(lib_only, i);
        } catch (const Error&) {
          library_issue = true;
        }
        if (!library_issue) {
          sink.error(e.code() == ErrorCode::remove_without_add ? "remove-without-add"
                                                               : "forward-reference",
                     e.what(), e.span().value_or(SourceSpan{}));
        }
      }
    }
  }
  return sink.take();
}

}  // namespace errml
