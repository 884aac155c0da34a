#pragma once

#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace errml {

/// Location of a construct in a source file. Lines and columns are 1-based;
/// columns and lengths count characters (UTF-8 code points), not bytes.
struct SourceSpan {
  std::string file;
  int line = 1;
  int column = 1;
  int length = 0;

  /// Placeholder for diagnostics not tied to source text; line 0.
  static SourceSpan unknown() { return {{}, 0, 0, 0}; }
  bool located() const { return line > 0; }

  // Spans never take part in structural equality of the AST.
  friend bool operator==(const SourceSpan&, const SourceSpan&) { return true; }
};

enum class Severity { error, warning, info };

const char* to_string(Severity severity);

struct Diagnostic {
  Severity severity = Severity::error;
  std::string code;  // short machine-readable tag, e.g. "multiple-initial"
  std::string message;
  SourceSpan span;

  bool operator==(const Diagnostic& other) const;
};

using Diagnostics = std::vector<Diagnostic>;

bool has_errors(const Diagnostics& diagnostics);

/// "file:line:col: severity: message", or "severity: message" without a location
std::string format(const Diagnostic& diagnostic);
std::ostream& operator<<(std::ostream& os, const Diagnostic& diagnostic);

enum class ErrorCode {
  invalid_model,
  remove_without_add,
  forward_reference,
  unknown_error_model,
  guard_atom_unresolvable,
  derived_atom_unresolvable,
  no_error_models,
  unbound_parameter,
  invalid_parameter,
  state_limit_exceeded,
  cascade_depth_exceeded,
  guard_livelock,
  not_irreducible,
  no_convergence,
  label_missing,
  size_limit,
  numeric_range,
  io,
  format,
  invalid_argument,
};

const char* to_string(ErrorCode code);

/// Failure of a pipeline operation. Carries a stable code so callers and
/// tests can distinguish error kinds without matching message text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::optional<SourceSpan> span = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  const std::optional<SourceSpan>& span() const noexcept { return span_; }

  Diagnostic to_diagnostic() const;

 private:
  ErrorCode code_;
  std::optional<SourceSpan> span_;
};

}  // namespace errml
