#include "lexer.hpp"

#include <cctype>

#include <fmt/format.h>

namespace errml::dsl {

const char* describe(Tok kind) {
  switch (kind) {
    case Tok::identifier: return "identifier";
    case Tok::number: return "number";
    case Tok::colon: return "':'";
    case Tok::semicolon: return "';'";
    case Tok::lbrace: return "'{'";
    case Tok::rbrace: return "'}'";
    case Tok::lparen: return "'('";
    case Tok::rparen: return "')'";
    case Tok::lbracket: return "'['";
    case Tok::rbracket: return "']'";
    case Tok::dash: return "'-'";
    case Tok::arrow: return "'->'";
    case Tok::fat_arrow: return "'=>'";
    case Tok::equals: return "'='";
    case Tok::dot: return "'.'";
    case Tok::comma: return "','";
    case Tok::annex_open: return "'{**'";
    case Tok::annex_close: return "'**}'";
    case Tok::end_of_file: return "end of input";
  }
  return "token";
}

namespace {

bool is_ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool is_ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }
bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

class Lexer {
 public:
  Lexer(std::string_view text, const std::string& file, Diagnostics& diagnostics)
      : text_(text), file_(file), diagnostics_(diagnostics) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_blanks();
      if (pos_ >= text_.size()) break;
      out.push_back(next());
      if (out.back().kind == Tok::end_of_file) out.pop_back();
    }
    Token eof;
    eof.kind = Tok::end_of_file;
    eof.span = {file_, line_, column_, 0};
    out.push_back(eof);
    return out;
  }

 private:
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  void advance() {
    unsigned char c = static_cast<unsigned char>(text_[pos_++]);
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else if (!is_continuation(c)) {
      ++column_;
    }
  }

  void skip_blanks() {
    while (pos_ < text_.size()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
        advance();
      } else if (c == '-' && peek(1) == '-') {
        while (pos_ < text_.size() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  Token make(Tok kind, std::size_t start, int line, int column) const {
    Token t;
    t.kind = kind;
    t.text = std::string(text_.substr(start, pos_ - start));
    t.span = {file_, line, column, column_ - column};
    if (line_ != line) t.span.length = static_cast<int>(pos_ - start);
    return t;
  }

  Token next() {
    std::size_t start = pos_;
    int line = line_;
    int column = column_;
    unsigned char c = static_cast<unsigned char>(peek());

    if (is_ident_start(c)) {
      while (pos_ < text_.size() && is_ident_char(static_cast<unsigned char>(peek()))) advance();
      return make(Tok::identifier, start, line, column);
    }
    if (std::isdigit(c)) {
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
        advance();
        while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      }
      if (peek() == 'e' || peek() == 'E') {
        std::size_t digits_at = (peek(1) == '+' || peek(1) == '-') ? 2 : 1;
        if (std::isdigit(static_cast<unsigned char>(peek(digits_at)))) {
          for (std::size_t i = 0; i < digits_at; ++i) advance();
          while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
        }
      }
      return make(Tok::number, start, line, column);
    }

    auto single = [&](Tok kind) {
      advance();
      return make(kind, start, line, column);
    };
    auto twice = [&](Tok kind) {
      advance();
      advance();
      return make(kind, start, line, column);
    };
    switch (c) {
      case ':': return single(Tok::colon);
      case ';': return single(Tok::semicolon);
      case '}': return single(Tok::rbrace);
      case '(': return single(Tok::lparen);
      case ')': return single(Tok::rparen);
      case '[': return single(Tok::lbracket);
      case ']': return single(Tok::rbracket);
      case '.': return single(Tok::dot);
      case ',': return single(Tok::comma);
      case '{':
        if (peek(1) == '*' && peek(2) == '*') {
          advance();
          return twice(Tok::annex_open);
        }
        return single(Tok::lbrace);
      case '*':
        if (peek(1) == '*' && peek(2) == '}') {
          advance();
          return twice(Tok::annex_close);
        }
        break;
      case '-':
        if (peek(1) == '>') return twice(Tok::arrow);
        return single(Tok::dash);
      case '=':
        if (peek(1) == '>') return twice(Tok::fat_arrow);
        return single(Tok::equals);
      default:
        break;
    }
    advance();
    Token bad = make(Tok::end_of_file, start, line, column);
    diagnostics_.push_back({Severity::error, "syntax",
                            fmt::format("unexpected character '{}'", bad.text), bad.span});
    return bad;
  }

  std::string_view text_;
  const std::string& file_;
  Diagnostics& diagnostics_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view text, const std::string& file,
                            Diagnostics& diagnostics) {
  return Lexer(text, file, diagnostics).run();
}

}  // namespace errml::dsl
