#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "errml/dsl.hpp"
#include "lexer.hpp"

namespace errml::dsl {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

// Unwinds to the innermost list, which resynchronizes.
struct SyntaxError {};

class Parser {
 public:
  Parser(std::vector<Token> tokens, Diagnostics& diagnostics)
      : tokens_(std::move(tokens)), diagnostics_(diagnostics) {}

  Model parse_file() {
    Model model;
    while (!at(Tok::end_of_file)) {
      std::size_t before = pos_;
      try {
        if (at_kw("error") && at_kw("model", 1)) {
          parse_error_model(model.library);
        } else if (at_kw("parameters")) {
          parse_parameters(model.parameters);
        } else if (category_from(lowered(cur().text)) && cur().kind == Tok::identifier) {
          Component component = parse_component();
          if (model.architecture.root) {
            report(component.span, "multiple-roots",
                   fmt::format("component {} is a second top-level component; the architecture "
                               "has a single root",
                               component.name));
          } else {
            model.architecture.root = std::move(component);
          }
        } else {
          fail("a declaration");
        }
      } catch (const SyntaxError&) {
        synchronize(/*top_level=*/true);
      }
      if (pos_ == before) take();
    }
    return model;
  }

  std::optional<GuardOut> parse_guard_standalone() {
    try {
      if (at_kw("Guard_Out")) {
        take();
        expect(Tok::fat_arrow, "'=>'");
      }
      GuardOut guard = parse_guard_body();
      accept(Tok::semicolon);
      if (!at(Tok::end_of_file)) fail("end of the Guard_Out property");
      return guard;
    } catch (const SyntaxError&) {
      return std::nullopt;
    }
  }

 private:
  // -- token access ---------------------------------------------------------

  const Token& cur() const { return tokens_[pos_]; }
  const Token& peek(std::size_t ahead) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  bool at(Tok kind) const { return cur().kind == kind; }
  bool at_kw(std::string_view keyword, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Tok::identifier && iequals(t.text, keyword);
  }

  Token take() {
    Token t = cur();
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }

  bool accept(Tok kind) {
    if (!at(kind)) return false;
    take();
    return true;
  }

  bool accept_kw(std::string_view keyword) {
    if (!at_kw(keyword)) return false;
    take();
    return true;
  }

  static std::string lowered(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  }

  void report(const SourceSpan& span, std::string code, std::string message) {
    diagnostics_.push_back({Severity::error, std::move(code), std::move(message), span});
  }

  [[noreturn]] void fail(std::string_view expected) {
    std::string found =
        at(Tok::end_of_file) ? std::string("end of input") : fmt::format("'{}'", cur().text);
    report(cur().span, "syntax", fmt::format("expected {}, found {}", expected, found));
    throw SyntaxError{};
  }

  Token expect(Tok kind, std::string_view what) {
    if (!at(kind)) fail(what);
    return take();
  }

  Token expect_ident(std::string_view what) { return expect(Tok::identifier, what); }

  void expect_kw(std::string_view keyword) {
    if (!at_kw(keyword)) fail(fmt::format("'{}'", keyword));
    take();
  }

  /// Skips to just past the next ';'. Nested lists stop early in front of a
  /// token that closes them so the enclosing construct can still finish.
  void synchronize(bool top_level = false) {
    while (!at(Tok::end_of_file)) {
      if (accept(Tok::semicolon)) return;
      if (!top_level && (at_kw("end") || at(Tok::rbrace) || at(Tok::annex_close))) return;
      take();
    }
  }

  double number(const Token& t) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size()) {
      report(t.span, "syntax", fmt::format("invalid number '{}'", t.text));
      throw SyntaxError{};
    }
    return value;
  }

  // -- staged lists ---------------------------------------------------------

  template <class T, class ItemFn, class StopFn>
  void parse_list(Staged<T>& out, ItemFn item, StopFn stop) {
    while (!at(Tok::end_of_file) && !stop()) {
      std::size_t before = pos_;
      try {
        if (at_kw("iteration") && peek(1).kind == Tok::number) {
          parse_iteration_block(out, item);
        } else {
          for (auto& x : item()) out.add(std::move(x), 1);
        }
      } catch (const SyntaxError&) {
        synchronize();
        if (pos_ == before) take();
      }
    }
  }

  template <class T, class ItemFn>
  void parse_iteration_block(Staged<T>& out, ItemFn item) {
    take();
    Token n = take();
    double value = number(n);
    if (value < 1 || value != static_cast<int>(value)) {
      report(n.span, "syntax", fmt::format("iteration number must be a positive integer"));
      throw SyntaxError{};
    }
    int iteration = static_cast<int>(value);
    out.delta_at(iteration);
    expect(Tok::lbrace, "'{'");
    while (!at(Tok::rbrace)) {
      bool removal = false;
      if (accept_kw("remove")) {
        removal = true;
      } else if (!accept_kw("add")) {
        fail("'add', 'remove' or '}'");
      }
      expect(Tok::lbrace, "'{'");
      while (!at(Tok::end_of_file) && !at(Tok::rbrace)) {
        std::size_t before = pos_;
        try {
          for (auto& x : item()) {
            if (removal) {
              out.remove(std::move(x), iteration);
            } else {
              out.add(std::move(x), iteration);
            }
          }
        } catch (const SyntaxError&) {
          synchronize();
          if (pos_ == before) take();
        }
      }
      expect(Tok::rbrace, "'}'");
    }
    take();
  }

  // -- error models ---------------------------------------------------------

  void parse_error_model(ErrorModelLibrary& library) {
    Token start = take();
    take();
    if (accept_kw("implementation")) {
      ErrorModelImplementation impl;
      impl.span = start.span;
      impl.type_name = expect_ident("error model type name").text;
      expect(Tok::dot, "'.'");
      impl.impl_name = expect_ident("implementation name").text;
      expect_kw("transitions");
      parse_list(impl.transitions, [&] { return std::vector<Transition>{parse_transition()}; },
                 [&] { return at_kw("end"); });
      expect_kw("end");
      Token t1 = expect_ident("implementation name");
      expect(Tok::dot, "'.'");
      Token t2 = expect_ident("implementation name");
      if (t1.text != impl.type_name || t2.text != impl.impl_name) {
        report(t1.span, "end-name",
               fmt::format("'end {}.{}' does not match '{}'", t1.text, t2.text,
                           impl.qualified_name()));
      }
      expect(Tok::semicolon, "';'");
      library.implementations.push_back(std::move(impl));
      return;
    }
    ErrorModelType type;
    type.span = start.span;
    type.name = expect_ident("error model name").text;
    expect_kw("features");
    parse_list(type.features, [&] { return std::vector<Feature>{parse_feature()}; },
               [&] { return at_kw("end"); });
    expect_kw("end");
    Token end_name = expect_ident("error model name");
    if (end_name.text != type.name) {
      report(end_name.span, "end-name",
             fmt::format("'end {}' does not match 'error model {}'", end_name.text, type.name));
    }
    expect(Tok::semicolon, "';'");
    library.types.push_back(std::move(type));
  }

  std::optional<Occurrence> parse_occurrence() {
    if (!at(Tok::lbrace)) return std::nullopt;
    Occurrence occ;
    occ.span = take().span;
    expect_kw("Occurrence");
    expect(Tok::fat_arrow, "'=>'");
    if (accept_kw("Poisson")) {
      occ.kind = OccurrenceKind::poisson;
    } else if (accept_kw("fixed")) {
      occ.kind = OccurrenceKind::fixed;
    } else {
      fail("'Poisson' or 'fixed'");
    }
    if (at(Tok::number)) {
      occ.value.value = number(take());
    } else {
      occ.value.value = expect_ident("a number or parameter name").text;
    }
    expect(Tok::rbrace, "'}'");
    return occ;
  }

  Feature parse_feature() {
    Token name = expect_ident("a feature name");
    expect(Tok::colon, "':'");
    if (accept_kw("initial")) {
      expect_kw("error");
      expect_kw("state");
      expect(Tok::semicolon, "';'");
      return StateDecl{name.text, true, name.span};
    }
    if (accept_kw("error")) {
      if (accept_kw("state")) {
        expect(Tok::semicolon, "';'");
        return StateDecl{name.text, false, name.span};
      }
      if (accept_kw("event")) {
        auto occ = parse_occurrence();
        expect(Tok::semicolon, "';'");
        return EventDecl{name.text, occ, name.span};
      }
      fail("'state' or 'event'");
    }
    PropagationDirection direction;
    if (accept_kw("in")) {
      direction = accept_kw("out") ? PropagationDirection::in_out : PropagationDirection::in;
    } else if (accept_kw("out")) {
      direction = PropagationDirection::out;
    } else {
      fail("'initial', 'error', 'in' or 'out'");
    }
    expect_kw("error");
    expect_kw("propagation");
    auto occ = parse_occurrence();
    expect(Tok::semicolon, "';'");
    return PropagationDecl{name.text, direction, occ, name.span};
  }

  Transition parse_transition() {
    Transition t;
    Token source = expect_ident("a source state");
    t.source = source.text;
    t.span = source.span;
    expect(Tok::dash, "'-['");
    expect(Tok::lbracket, "'['");
    if ((at_kw("in") || at_kw("out")) && peek(1).kind == Tok::identifier) {
      t.trigger.kind = at_kw("in") ? TriggerKind::in_propagation : TriggerKind::out_propagation;
      take();
    }
    t.trigger.name = expect_ident("a trigger").text;
    expect(Tok::rbracket, "']'");
    expect(Tok::arrow, "'->'");
    t.destination = expect_ident("a destination state").text;
    expect(Tok::semicolon, "';'");
    return t;
  }

  void parse_parameters(std::vector<ParameterBinding>& out) {
    take();
    expect(Tok::lbrace, "'{'");
    while (!at(Tok::end_of_file) && !at(Tok::rbrace)) {
      std::size_t before = pos_;
      try {
        Token name = expect_ident("a parameter name");
        expect(Tok::equals, "'='");
        double value = number(expect(Tok::number, "a number"));
        expect(Tok::semicolon, "';'");
        out.push_back({name.text, value, name.span});
      } catch (const SyntaxError&) {
        synchronize();
        if (pos_ == before) take();
      }
    }
    expect(Tok::rbrace, "'}'");
  }

  // -- architecture ---------------------------------------------------------

  bool at_section_end() const {
    return at_kw("features") || at_kw("subcomponents") || at_kw("connections") ||
           at_kw("annex") || at_kw("end");
  }

  Component parse_component() {
    Component c;
    Token category = take();
    c.category = *category_from(lowered(category.text));
    c.span = category.span;
    c.name = expect_ident("a component name").text;
    auto stop = [&] { return at_section_end(); };
    while (!at_kw("end")) {
      if (accept_kw("features")) {
        parse_list(c.ports, [&] { return std::vector<Port>{parse_port()}; }, stop);
      } else if (accept_kw("subcomponents")) {
        parse_list(c.subcomponents, [&] { return std::vector<Component>{parse_subcomponent()}; },
                   stop);
      } else if (accept_kw("connections")) {
        parse_list(c.connections, [&] { return std::vector<Connection>{parse_connection()}; },
                   stop);
      } else if (accept_kw("annex")) {
        expect_kw("error_model");
        expect(Tok::annex_open, "'{**'");
        parse_list(c.annex, [&] { return parse_annex_item(); },
                   [&] { return at(Tok::annex_close); });
        expect(Tok::annex_close, "'**}'");
        expect(Tok::semicolon, "';'");
      } else {
        fail("'features', 'subcomponents', 'connections', 'annex' or 'end'");
      }
    }
    take();
    Token end_name = expect_ident("a component name");
    if (end_name.text != c.name) {
      report(end_name.span, "end-name",
             fmt::format("'end {}' does not match component {}", end_name.text, c.name));
    }
    expect(Tok::semicolon, "';'");
    return c;
  }

  Component parse_subcomponent() {
    if (!category_from(lowered(cur().text)) || !at(Tok::identifier)) {
      fail("a component category (system, process, thread, device, processor)");
    }
    return parse_component();
  }

  Port parse_port() {
    Port p;
    Token name = expect_ident("a port name");
    p.name = name.text;
    p.span = name.span;
    expect(Tok::colon, "':'");
    if (accept_kw("in")) {
      p.direction = PortDirection::in;
    } else if (accept_kw("out")) {
      p.direction = PortDirection::out;
    } else {
      fail("'in' or 'out'");
    }
    if (accept_kw("data")) {
      p.kind = PortKind::data;
    } else if (accept_kw("event")) {
      p.kind = PortKind::event;
    } else {
      fail("'data' or 'event'");
    }
    expect_kw("port");
    expect(Tok::semicolon, "';'");
    return p;
  }

  std::string parse_qualified() {
    std::string out = expect_ident("a name").text;
    while (at(Tok::dot) && peek(1).kind == Tok::identifier) {
      take();
      out += "." + take().text;
    }
    return out;
  }

  Connection parse_connection() {
    Connection c;
    Token name = expect_ident("a connection name");
    c.name = name.text;
    c.span = name.span;
    expect(Tok::colon, "':'");
    expect_kw("port");
    c.source = parse_qualified();
    expect(Tok::arrow, "'->'");
    c.destination = parse_qualified();
    expect(Tok::semicolon, "';'");
    return c;
  }

  std::vector<AnnexItem> parse_annex_item() {
    if (at_kw("model") && peek(1).kind == Tok::fat_arrow) {
      ModelAssociation a;
      a.span = take().span;
      take();
      a.type_name = expect_ident("an error model type").text;
      expect(Tok::dot, "'.'");
      a.impl_name = expect_ident("an implementation name").text;
      expect(Tok::semicolon, "';'");
      return {a};
    }
    if (at_kw("Guard_Out")) {
      SourceSpan span = take().span;
      expect(Tok::fat_arrow, "'=>'");
      GuardOut guard = parse_guard_body();
      guard.span = span;
      expect(Tok::semicolon, "';'");
      return {guard};
    }
    if (accept_kw("derived")) {
      expect(Tok::lbrace, "'{'");
      std::vector<AnnexItem> out;
      while (!at(Tok::end_of_file) && !at(Tok::rbrace)) {
        DerivedClause clause;
        Token name = expect_ident("a state class name");
        clause.class_name = name.text;
        clause.span = name.span;
        expect_kw("when");
        clause.condition = parse_expr();
        expect(Tok::semicolon, "';'");
        out.push_back(std::move(clause));
      }
      expect(Tok::rbrace, "'}'");
      return out;
    }
    fail("'model =>', 'Guard_Out =>' or 'derived'");
  }

  GuardOut parse_guard_body() {
    GuardOut guard;
    guard.span = cur().span;
    while (at(Tok::identifier) && !at_kw("mask") && !at_kw("applies")) {
      GuardClause clause;
      Token name = take();
      clause.propagation = name.text;
      clause.span = name.span;
      expect_kw("when");
      clause.condition = parse_expr();
      guard.clauses.push_back(std::move(clause));
    }
    if (guard.clauses.empty()) fail("a guard clause 'PROPAGATION when CONDITION'");
    if (accept_kw("mask")) {
      expect_kw("when");
      expect_kw("others");
    } else {
      report(cur().span, "missing-default",
             "Guard_Out needs a final 'mask when others' default");
    }
    expect_kw("applies");
    expect_kw("to");
    guard.port = expect_ident("a port name").text;
    return guard;
  }

  // -- boolean expressions --------------------------------------------------

  BoolExpr parse_expr() {
    SourceSpan span = cur().span;
    std::vector<BoolExpr> terms{parse_and()};
    while (accept_kw("or")) terms.push_back(parse_and());
    if (terms.size() == 1) return std::move(terms.front());
    BoolExpr e = BoolExpr::disjunction(std::move(terms));
    e.span = span;
    return e;
  }

  BoolExpr parse_and() {
    SourceSpan span = cur().span;
    std::vector<BoolExpr> factors{parse_not()};
    while (accept_kw("and")) factors.push_back(parse_not());
    if (factors.size() == 1) return std::move(factors.front());
    BoolExpr e = BoolExpr::conjunction(std::move(factors));
    e.span = span;
    return e;
  }

  BoolExpr parse_not() {
    SourceSpan span = cur().span;
    if (accept_kw("not")) {
      BoolExpr e = BoolExpr::negation(parse_not());
      e.span = span;
      return e;
    }
    if (accept(Tok::lparen)) {
      BoolExpr inner = parse_expr();
      expect(Tok::rparen, "')'");
      return inner;
    }
    if ((at_kw("true") || at_kw("false")) && peek(1).kind != Tok::lbracket) {
      BoolExpr e = BoolExpr::constant(at_kw("true"));
      e.span = take().span;
      return e;
    }
    std::string target = parse_qualified();
    expect(Tok::lbracket, "'['");
    std::string item = expect_ident("a state or propagation name").text;
    expect(Tok::rbracket, "']'");
    BoolExpr e = BoolExpr::atom(std::move(target), std::move(item));
    e.span = span;
    return e;
  }

  std::vector<Token> tokens_;
  Diagnostics& diagnostics_;
  std::size_t pos_ = 0;
};

}  // namespace

ParseResult parse_model(std::string_view text, const std::string& file) {
  ParseResult result;
  auto tokens = tokenize(text, file, result.diagnostics);
  result.model = Parser(std::move(tokens), result.diagnostics).parse_file();
  return result;
}

ParseResult parse_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::io, fmt::format("cannot read {}", path.string()));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str(), path.string());
}

GuardParseResult parse_guard_expr(std::string_view text, const std::string& file) {
  GuardParseResult result;
  auto tokens = tokenize(text, file, result.diagnostics);
  result.guard = Parser(std::move(tokens), result.diagnostics).parse_guard_standalone();
  return result;
}

}  // namespace errml::dsl
