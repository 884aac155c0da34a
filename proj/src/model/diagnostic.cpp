#include "errml/diagnostic.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace errml {

const char* to_string(Severity severity) {
  switch (severity) {
    case Severity::error: return "error";
    case Severity::warning: return "warning";
    case Severity::info: return "info";
  }
  return "error";
}

bool Diagnostic::operator==(const Diagnostic& other) const {
  return severity == other.severity && code == other.code && message == other.message &&
         span.file == other.span.file && span.line == other.span.line &&
         span.column == other.span.column && span.length == other.span.length;
}

bool has_errors(const Diagnostics& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::error; });
}

std::string format(const Diagnostic& d) {
  if (!d.span.located()) return fmt::format("{}: {}", to_string(d.severity), d.message);
  std::string file = d.span.file.empty() ? "<input>" : d.span.file;
  return fmt::format("{}:{}:{}: {}: {}", file, d.span.line, d.span.column, to_string(d.severity),
                     d.message);
}

std::ostream& operator<<(std::ostream& os, const Diagnostic& diagnostic) {
  return os << format(diagnostic);
}

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_model: return "InvalidModel";
    case ErrorCode::remove_without_add: return "RemoveWithoutAdd";
    case ErrorCode::forward_reference: return "ForwardReference";
    case ErrorCode::unknown_error_model: return "UnknownErrorModel";
    case ErrorCode::guard_atom_unresolvable: return "GuardAtomUnresolvable";
    case ErrorCode::derived_atom_unresolvable: return "DerivedAtomUnresolvable";
    case ErrorCode::no_error_models: return "NoErrorModels";
    case ErrorCode::unbound_parameter: return "UnboundParameter";
    case ErrorCode::invalid_parameter: return "InvalidParameter";
    case ErrorCode::state_limit_exceeded: return "StateLimitExceeded";
    case ErrorCode::cascade_depth_exceeded: return "CascadeDepthExceeded";
    case ErrorCode::guard_livelock: return "GuardLivelock";
    case ErrorCode::not_irreducible: return "NotIrreducible";
    case ErrorCode::no_convergence: return "NoConvergence";
    case ErrorCode::label_missing: return "LabelMissing";
    case ErrorCode::size_limit: return "SizeLimit";
    case ErrorCode::numeric_range: return "NumericRange";
    case ErrorCode::io: return "IoError";
    case ErrorCode::format: return "FormatError";
    case ErrorCode::invalid_argument: return "InvalidArgument";
  }
  return "Error";
}

Error::Error(ErrorCode code, const std::string& message, std::optional<SourceSpan> span)
    : std::runtime_error(message), code_(code), span_(std::move(span)) {}

Diagnostic Error::to_diagnostic() const {
  Diagnostic d;
  d.severity = Severity::error;
  d.code = to_string(code_);
  d.message = what();
  d.span = span_ ? *span_ : SourceSpan::unknown();
  return d;
}

}  // namespace errml
