#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "errml/diagnostic.hpp"

namespace errml::dsl {

enum class Tok {
  identifier,
  number,
  colon,
  semicolon,
  lbrace,
  rbrace,
  lparen,
  rparen,
  lbracket,
  rbracket,
  dash,
  arrow,      // ->
  fat_arrow,  // =>
  equals,
  dot,
  comma,
  annex_open,   // {**
  annex_close,  // **}
  end_of_file,
};

const char* describe(Tok kind);

struct Token {
  Tok kind = Tok::end_of_file;
  std::string text;
  SourceSpan span;
};

/// Splits source text into tokens. `--` starts a comment running to the end of
/// the line. Identifiers may contain non-ASCII letters (λ, μ). Unknown
/// characters produce an error diagnostic and are skipped. The result always
/// ends with an end_of_file token.
std::vector<Token> tokenize(std::string_view text, const std::string& file,
                            Diagnostics& diagnostics);

}  // namespace errml::dsl
