#include "errml/ast.hpp"

#include <algorithm>

namespace errml {

const char* to_string(PropagationDirection direction) {
  switch (direction) {
    case PropagationDirection::in: return "in";
    case PropagationDirection::out: return "out";
    case PropagationDirection::in_out: return "in out";
  }
  return "in out";
}

bool can_receive(PropagationDirection direction) {
  return direction == PropagationDirection::in || direction == PropagationDirection::in_out;
}

bool can_send(PropagationDirection direction) {
  return direction == PropagationDirection::out || direction == PropagationDirection::in_out;
}

const std::string& name_of(const Feature& feature) {
  return std::visit([](const auto& f) -> const std::string& { return f.name; }, feature);
}

BoolExpr BoolExpr::constant(bool v) {
  BoolExpr e;
  e.kind = Kind::constant;
  e.value = v;
  return e;
}

BoolExpr BoolExpr::atom(std::string target, std::string item) {
  BoolExpr e;
  e.kind = Kind::atom;
  e.target = std::move(target);
  e.item = std::move(item);
  return e;
}

BoolExpr BoolExpr::negation(BoolExpr operand) {
  BoolExpr e;
  e.kind = Kind::negation;
  e.operands.push_back(std::move(operand));
  return e;
}

BoolExpr BoolExpr::conjunction(std::vector<BoolExpr> operands) {
  BoolExpr e;
  e.kind = Kind::conjunction;
  e.operands = std::move(operands);
  return e;
}

BoolExpr BoolExpr::disjunction(std::vector<BoolExpr> operands) {
  BoolExpr e;
  e.kind = Kind::disjunction;
  e.operands = std::move(operands);
  return e;
}

const char* to_string(Category category) {
  switch (category) {
    case Category::system: return "system";
    case Category::process: return "process";
    case Category::thread: return "thread";
    case Category::device: return "device";
    case Category::processor: return "processor";
  }
  return "system";
}

std::optional<Category> category_from(const std::string& keyword) {
  for (auto c : {Category::system, Category::process, Category::thread, Category::device,
                 Category::processor}) {
    if (keyword == to_string(c)) return c;
  }
  return std::nullopt;
}

const ErrorModelType* ErrorModelLibrary::find_type(const std::string& name) const {
  auto it = std::find_if(types.begin(), types.end(),
                         [&](const ErrorModelType& t) { return t.name == name; });
  return it == types.end() ? nullptr : &*it;
}

const ErrorModelImplementation* ErrorModelLibrary::find_implementation(
    const std::string& type_name, const std::string& impl_name) const {
  auto it = std::find_if(implementations.begin(), implementations.end(),
                         [&](const ErrorModelImplementation& i) {
                           return i.type_name == type_name && i.impl_name == impl_name;
                         });
  return it == implementations.end() ? nullptr : &*it;
}

namespace {

int max_iteration(const Component& component) {
  int result = std::max({component.ports.max_iteration(), component.connections.max_iteration(),
                         component.annex.max_iteration(), component.subcomponents.max_iteration()});
  for (const auto& delta : component.subcomponents.deltas()) {
    for (const auto& sub : delta.added) result = std::max(result, max_iteration(sub));
    for (const auto& sub : delta.removed) result = std::max(result, max_iteration(sub));
  }
  return result;
}

}  // namespace

int Model::max_iteration() const {
  int result = 1;
  for (const auto& t : library.types) result = std::max(result, t.features.max_iteration());
  for (const auto& i : library.implementations) {
    result = std::max(result, i.transitions.max_iteration());
  }
  if (architecture.root) result = std::max(result, errml::max_iteration(*architecture.root));
  return result;
}

}  // namespace errml
