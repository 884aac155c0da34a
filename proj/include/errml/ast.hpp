#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "errml/diagnostic.hpp"
#include "errml/staged.hpp"

namespace errml {

/// A numeric literal or a reference to a named parameter (`lambda`, `μ`, ...).
struct Quantity {
  std::variant<double, std::string> value;

  bool is_parameter() const { return std::holds_alternative<std::string>(value); }
  bool operator==(const Quantity&) const = default;
};

enum class OccurrenceKind { poisson, fixed };

/// Poisson rate (per hour) of a timed event, or fixed probability of an
/// immediate propagation.
struct Occurrence {
  OccurrenceKind kind = OccurrenceKind::poisson;
  Quantity value;
  SourceSpan span;

  bool operator==(const Occurrence&) const = default;
};

enum class PropagationDirection { in, out, in_out };

const char* to_string(PropagationDirection direction);
bool can_receive(PropagationDirection direction);
bool can_send(PropagationDirection direction);

struct StateDecl {
  std::string name;
  bool initial = false;
  SourceSpan span;

  bool operator==(const StateDecl&) const = default;
};

struct EventDecl {
  std::string name;
  std::optional<Occurrence> occurrence;
  SourceSpan span;

  bool operator==(const EventDecl&) const = default;
};

struct PropagationDecl {
  std::string name;
  PropagationDirection direction = PropagationDirection::in_out;
  std::optional<Occurrence> occurrence;
  SourceSpan span;

  bool operator==(const PropagationDecl&) const = default;
};

using Feature = std::variant<StateDecl, EventDecl, PropagationDecl>;

const std::string& name_of(const Feature& feature);

struct ErrorModelType {
  std::string name;
  Staged<Feature> features;
  SourceSpan span;

  bool operator==(const ErrorModelType&) const = default;
};

enum class TriggerKind { event, in_propagation, out_propagation };

struct Trigger {
  TriggerKind kind = TriggerKind::event;
  std::string name;

  bool operator==(const Trigger&) const = default;
};

struct Transition {
  std::string source;
  Trigger trigger;
  std::string destination;
  SourceSpan span;

  bool operator==(const Transition&) const = default;
};

struct ErrorModelImplementation {
  std::string type_name;
  std::string impl_name;
  Staged<Transition> transitions;
  SourceSpan span;

  std::string qualified_name() const { return type_name + "." + impl_name; }
  bool operator==(const ErrorModelImplementation&) const = default;
};

/// Boolean condition over atoms `target[item]`. In a Guard_Out the target is an
/// in port and the item a propagation; in a derived model the target is a
/// subcomponent path and the item one of its error states.
struct BoolExpr {
  enum class Kind { constant, atom, negation, conjunction, disjunction };

  Kind kind = Kind::constant;
  bool value = false;
  std::string target;
  std::string item;
  std::vector<BoolExpr> operands;
  SourceSpan span;

  static BoolExpr constant(bool v);
  static BoolExpr atom(std::string target, std::string item);
  static BoolExpr negation(BoolExpr operand);
  static BoolExpr conjunction(std::vector<BoolExpr> operands);
  static BoolExpr disjunction(std::vector<BoolExpr> operands);

  bool operator==(const BoolExpr&) const = default;
};

struct GuardClause {
  std::string propagation;
  BoolExpr condition;
  SourceSpan span;

  bool operator==(const GuardClause&) const = default;
};

/// Guard_Out property: the first clause whose condition holds names the
/// propagation emitted through `port`; everything else is masked.
struct GuardOut {
  std::string port;
  std::vector<GuardClause> clauses;
  SourceSpan span;

  bool operator==(const GuardOut&) const = default;
};

struct ModelAssociation {
  std::string type_name;
  std::string impl_name;
  SourceSpan span;

  std::string qualified_name() const { return type_name + "." + impl_name; }
  bool operator==(const ModelAssociation&) const = default;
};

/// One state class of a derived error model, e.g. `Failed when A[Failed] or B[Failed]`.
struct DerivedClause {
  std::string class_name;
  BoolExpr condition;
  SourceSpan span;

  bool operator==(const DerivedClause&) const = default;
};

using AnnexItem = std::variant<ModelAssociation, GuardOut, DerivedClause>;

enum class Category { system, process, thread, device, processor };
enum class PortDirection { in, out };
enum class PortKind { data, event };

const char* to_string(Category category);
std::optional<Category> category_from(const std::string& keyword);

struct Port {
  std::string name;
  PortDirection direction = PortDirection::in;
  PortKind kind = PortKind::data;
  SourceSpan span;

  bool operator==(const Port&) const = default;
};

/// Directed port connection. Endpoints are `sub.port` for a subcomponent port
/// or a bare `port` for a port of the declaring component.
struct Connection {
  std::string name;
  std::string source;
  std::string destination;
  SourceSpan span;

  bool operator==(const Connection&) const = default;
};

struct Component {
  Category category = Category::system;
  std::string name;
  Staged<Port> ports;
  Staged<Component> subcomponents;
  Staged<Connection> connections;
  Staged<AnnexItem> annex;
  SourceSpan span;

  bool operator==(const Component&) const = default;
};

struct ParameterBinding {
  std::string name;
  double value = 0.0;
  SourceSpan span;

  bool operator==(const ParameterBinding&) const = default;
};

struct ErrorModelLibrary {
  std::vector<ErrorModelType> types;
  std::vector<ErrorModelImplementation> implementations;

  const ErrorModelType* find_type(const std::string& name) const;
  const ErrorModelImplementation* find_implementation(const std::string& type_name,
                                                      const std::string& impl_name) const;
  bool empty() const { return types.empty() && implementations.empty(); }
  bool operator==(const ErrorModelLibrary&) const = default;
};

struct ArchitectureModel {
  std::optional<Component> root;

  bool operator==(const ArchitectureModel&) const = default;
};

/// Everything one `.errml` source declares.
struct Model {
  std::vector<ParameterBinding> parameters;
  ErrorModelLibrary library;
  ArchitectureModel architecture;

  bool empty() const { return parameters.empty() && library.empty() && !architecture.root; }
  /// Highest iteration number appearing in any delta (1 for untagged models).
  int max_iteration() const;
  bool operator==(const Model&) const = default;
};

}  // namespace errml
