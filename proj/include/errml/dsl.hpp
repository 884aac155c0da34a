#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "errml/ast.hpp"

/// Textual error-model language (`.errml`).
///
/// Grammar sketch; keywords are case-insensitive, `--` starts a comment:
///
///   file        ::= { parameters | type | implementation | component }
///   parameters  ::= 'parameters' '{' { ID '=' NUMBER ';' } '}'
///   type        ::= 'error' 'model' ID 'features' { feature | iteration } 'end' ID ';'
///   feature     ::= ID ':' 'initial'? 'error' 'state' ';'
///                 | ID ':' 'error' 'event' occurrence? ';'
///                 | ID ':' ('in' | 'out' | 'in' 'out') 'error' 'propagation' occurrence? ';'
///   occurrence  ::= '{' 'Occurrence' '=>' ('Poisson' | 'fixed') (NUMBER | ID) '}'
///   implementation ::= 'error' 'model' 'implementation' ID '.' ID
///                      'transitions' { ID '-[' trigger ']->' ID ';' | iteration }
///                      'end' ID '.' ID ';'
///   trigger     ::= ID | 'in' ID | 'out' ID
///   component   ::= CATEGORY ID [ 'features' { port | iteration } ]
///                   [ 'subcomponents' { component | iteration } ]
///                   [ 'connections' { ID ':' 'port' QID '->' QID ';' | iteration } ]
///                   [ 'annex' 'error_model' '{**' { annex_item | iteration } '**}' ';' ]
///                   'end' ID ';'
///   port        ::= ID ':' ('in' | 'out') ('data' | 'event') 'port' ';'
///   annex_item  ::= 'model' '=>' ID '.' ID ';'
///                 | 'Guard_Out' '=>' guard ';'
///                 | 'derived' '{' { ID 'when' expr ';' } '}'
///   guard       ::= ID 'when' expr { ID 'when' expr } 'mask' 'when' 'others' 'applies' 'to' ID
///   expr        ::= and_expr { 'or' and_expr }
///   and_expr    ::= not_expr { 'and' not_expr }
///   not_expr    ::= 'not' not_expr | '(' expr ')' | 'true' | 'false' | QID '[' ID ']'
///   iteration   ::= 'iteration' NUMBER '{' [ 'add' '{' items '}' ] [ 'remove' '{' items '}' ] '}'
///
/// CATEGORY is one of system, process, thread, device, processor. At most one
/// top-level component may appear; it is the architecture root.
namespace errml::dsl {

struct ParseResult {
  Model model;
  Diagnostics diagnostics;

  bool ok() const { return !has_errors(diagnostics); }
};

/// Parses a whole source. Syntax errors are reported as diagnostics; the
/// parser skips to the next `;` and continues, so the model may be partial.
ParseResult parse_model(std::string_view text, const std::string& file = {});

/// Reads and parses a file. Throws Error(io) when the file cannot be read.
ParseResult parse_file(const std::filesystem::path& path);

struct GuardParseResult {
  std::optional<GuardOut> guard;
  Diagnostics diagnostics;
};

/// Parses one Guard_Out property value, with or without the leading
/// `Guard_Out =>` and trailing `;`. A missing `mask when others` default is
/// reported with code "missing-default".
GuardParseResult parse_guard_expr(std::string_view text, const std::string& file = {});

/// Canonical source text: parse_model(pretty_print(m)).model == m (spans aside).
std::string pretty_print(const Model& model);
std::string pretty_print(const BoolExpr& expr);
std::string pretty_print(const GuardOut& guard);

}  // namespace errml::dsl
