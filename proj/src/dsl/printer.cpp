#include <fmt/format.h>

#include "errml/dsl.hpp"

namespace errml::dsl {

namespace {

std::string quantity(const Quantity& q) {
  if (q.is_parameter()) return std::get<std::string>(q.value);
  return fmt::format("{}", std::get<double>(q.value));
}

std::string occurrence(const std::optional<Occurrence>& occ) {
  if (!occ) return "";
  return fmt::format(" {{Occurrence => {} {}}}",
                     occ->kind == OccurrenceKind::poisson ? "Poisson" : "fixed",
                     quantity(occ->value));
}

int precedence(const BoolExpr& e) {
  switch (e.kind) {
    case BoolExpr::Kind::disjunction: return 1;
    case BoolExpr::Kind::conjunction: return 2;
    case BoolExpr::Kind::negation: return 3;
    default: return 4;
  }
}

std::string expr(const BoolExpr& e);

// Operands of the same n-ary operator are parenthesized so that nesting
// survives a round trip instead of being flattened by the parser.
std::string operand(const BoolExpr& e, int parent) {
  std::string text = expr(e);
  return precedence(e) <= parent ? "(" + text + ")" : text;
}

std::string expr(const BoolExpr& e) {
  switch (e.kind) {
    case BoolExpr::Kind::constant:
      return e.value ? "true" : "false";
    case BoolExpr::Kind::atom:
      return e.target + "[" + e.item + "]";
    case BoolExpr::Kind::negation: {
      const auto& inner = e.operands.front();
      return "not " + (precedence(inner) < 3 ? "(" + expr(inner) + ")" : expr(inner));
    }
    case BoolExpr::Kind::conjunction:
    case BoolExpr::Kind::disjunction: {
      int p = precedence(e);
      std::string sep = p == 2 ? " and " : " or ";
      std::string out;
      for (std::size_t i = 0; i < e.operands.size(); ++i) {
        if (i) out += sep;
        out += operand(e.operands[i], p);
      }
      return out;
    }
  }
  return "";
}

class Printer {
 public:
  std::string run(const Model& model) {
    if (!model.parameters.empty()) {
      line("parameters {");
      for (const auto& p : model.parameters) line(fmt::format("  {} = {};", p.name, p.value));
      line("}");
    }
    for (const auto& type : model.library.types) {
      separate();
      line("error model " + type.name);
      line("features");
      indent_ += 2;
      staged(type.features, [&](const Feature& f) { feature(f); });
      indent_ -= 2;
      line("end " + type.name + ";");
    }
    for (const auto& impl : model.library.implementations) {
      separate();
      line("error model implementation " + impl.qualified_name());
      line("transitions");
      indent_ += 2;
      staged(impl.transitions, [&](const Transition& t) { transition(t); });
      indent_ -= 2;
      line("end " + impl.qualified_name() + ";");
    }
    if (model.architecture.root) {
      separate();
      component(*model.architecture.root);
    }
    return std::move(out_);
  }

 private:
  void line(const std::string& text) {
    out_.append(static_cast<std::size_t>(indent_), ' ');
    out_ += text;
    out_ += '\n';
  }

  void separate() {
    if (!out_.empty()) out_ += '\n';
  }

  template <class T, class Fn>
  void staged(const Staged<T>& list, Fn print) {
    for (const auto& d : list.deltas()) {
      if (d.iteration == 1) {
        for (const auto& item : d.added) print(item);
      }
    }
    for (const auto& d : list.deltas()) {
      bool plain_first = d.iteration == 1;
      if ((plain_first || d.added.empty()) && d.removed.empty()) continue;
      line(fmt::format("iteration {} {{", d.iteration));
      indent_ += 2;
      if (!plain_first && !d.added.empty()) {
        line("add {");
        indent_ += 2;
        for (const auto& item : d.added) print(item);
        indent_ -= 2;
        line("}");
      }
      if (!d.removed.empty()) {
        line("remove {");
        indent_ += 2;
        for (const auto& item : d.removed) print(item);
        indent_ -= 2;
        line("}");
      }
      indent_ -= 2;
      line("}");
    }
  }

  void feature(const Feature& f) {
    if (const auto* s = std::get_if<StateDecl>(&f)) {
      line(fmt::format("{}: {}error state;", s->name, s->initial ? "initial " : ""));
    } else if (const auto* e = std::get_if<EventDecl>(&f)) {
      line(fmt::format("{}: error event{};", e->name, occurrence(e->occurrence)));
    } else if (const auto* p = std::get_if<PropagationDecl>(&f)) {
      line(fmt::format("{}: {} error propagation{};", p->name, to_string(p->direction),
                       occurrence(p->occurrence)));
    }
  }

  void transition(const Transition& t) {
    const char* prefix = t.trigger.kind == TriggerKind::in_propagation    ? "in "
                         : t.trigger.kind == TriggerKind::out_propagation ? "out "
                                                                          : "";
    line(fmt::format("{}-[{}{}]->{};", t.source, prefix, t.trigger.name, t.destination));
  }

  void component(const Component& c) {
    line(fmt::format("{} {}", to_string(c.category), c.name));
    if (!c.ports.empty()) {
      line("features");
      indent_ += 2;
      staged(c.ports, [&](const Port& p) {
        line(fmt::format("{}: {} {} port;", p.name, p.direction == PortDirection::in ? "in" : "out",
                         p.kind == PortKind::data ? "data" : "event"));
      });
      indent_ -= 2;
    }
    if (!c.subcomponents.empty()) {
      line("subcomponents");
      indent_ += 2;
      staged(c.subcomponents, [&](const Component& sub) { component(sub); });
      indent_ -= 2;
    }
    if (!c.connections.empty()) {
      line("connections");
      indent_ += 2;
      staged(c.connections, [&](const Connection& k) {
        line(fmt::format("{}: port {} -> {};", k.name, k.source, k.destination));
      });
      indent_ -= 2;
    }
    if (!c.annex.empty()) {
      line("annex error_model {**");
      indent_ += 2;
      annex(c.annex);
      indent_ -= 2;
      line("**};");
    }
    line(fmt::format("end {};", c.name));
  }

  // Consecutive derived clauses share one `derived { }` block.
  void annex_items(const std::vector<AnnexItem>& items) {
    for (std::size_t i = 0; i < items.size();) {
      if (const auto* a = std::get_if<ModelAssociation>(&items[i])) {
        line(fmt::format("model => {};", a->qualified_name()));
        ++i;
      } else if (const auto* g = std::get_if<GuardOut>(&items[i])) {
        line("Guard_Out => " + pretty_print(*g) + ";");
        ++i;
      } else {
        line("derived {");
        indent_ += 2;
        while (i < items.size()) {
          const auto* d = std::get_if<DerivedClause>(&items[i]);
          if (!d) break;
          line(fmt::format("{} when {};", d->class_name, expr(d->condition)));
          ++i;
        }
        indent_ -= 2;
        line("}");
      }
    }
  }

  void annex(const Staged<AnnexItem>& list) {
    for (const auto& d : list.deltas()) {
      if (d.iteration == 1) annex_items(d.added);
    }
    for (const auto& d : list.deltas()) {
      bool plain_first = d.iteration == 1;
      if ((plain_first || d.added.empty()) && d.removed.empty()) continue;
      line(fmt::format("iteration {} {{", d.iteration));
      indent_ += 2;
      if (!plain_first && !d.added.empty()) {
        line("add {");
        indent_ += 2;
        annex_items(d.added);
        indent_ -= 2;
        line("}");
      }
      if (!d.removed.empty()) {
        line("remove {");
        indent_ += 2;
        annex_items(d.removed);
        indent_ -= 2;
        line("}");
      }
      indent_ -= 2;
      line("}");
    }
  }

  std::string out_;
  int indent_ = 0;
};

}  // namespace

std::string pretty_print(const BoolExpr& e) { return expr(e); }

std::string pretty_print(const GuardOut& guard) {
  std::string out;
  for (const auto& clause : guard.clauses) {
    out += fmt::format("{} when {} ", clause.propagation, expr(clause.condition));
  }
  return out + "mask when others applies to " + guard.port;
}

std::string pretty_print(const Model& model) { return Printer().run(model); }

}  // namespace errml::dsl
