#pragma once

// Seeded random inputs for property tests.

#include <fmt/format.h>

#include <random>
#include <string>

#include "errml/ast.hpp"
#include "errml/ctmc.hpp"

namespace gen {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return real(0.0, 1.0) < p; }
  // Log-uniform on [lo, hi].
  double rate(double lo, double hi) { return std::exp(real(std::log(lo), std::log(hi))); }
  std::mt19937_64& engine() { return rng_; }

  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(integer(0, static_cast<int>(v.size()) - 1))];
  }

 private:
  std::mt19937_64 rng_;
};

// ---- random syntax trees (well-formed enough to print and reparse) ----

inline std::string ident(Gen& g, const char* prefix) {
  return fmt::format("{}{}", prefix, g.integer(0, 40));
}

inline errml::Quantity quantity(Gen& g) {
  if (g.coin(0.3)) return {ident(g, "k")};
  return {g.coin() ? g.rate(1e-6, 10.0) : static_cast<double>(g.integer(1, 9)) / 10.0};
}

inline std::optional<errml::Occurrence> occurrence(Gen& g) {
  if (g.coin(0.3)) return std::nullopt;
  return errml::Occurrence{g.coin() ? errml::OccurrenceKind::poisson : errml::OccurrenceKind::fixed,
                           quantity(g), {}};
}

inline errml::Feature feature(Gen& g) {
  switch (g.integer(0, 2)) {
    case 0: return errml::StateDecl{ident(g, "S"), g.coin(0.3), {}};
    case 1: return errml::EventDecl{ident(g, "E"), occurrence(g), {}};
    default: {
      auto dir = static_cast<errml::PropagationDirection>(g.integer(0, 2));
      return errml::PropagationDecl{ident(g, "P"), dir, occurrence(g), {}};
    }
  }
}

inline errml::Transition transition(Gen& g) {
  auto kind = static_cast<errml::TriggerKind>(g.integer(0, 2));
  return {ident(g, "S"), {kind, ident(g, kind == errml::TriggerKind::event ? "E" : "P")},
          ident(g, "S"), {}};
}

inline errml::BoolExpr expr(Gen& g, int depth) {
  using errml::BoolExpr;
  int choice = depth <= 0 ? g.integer(0, 1) : g.integer(0, 4);
  switch (choice) {
    case 0: return g.coin(0.2) ? BoolExpr::constant(g.coin()) : BoolExpr::atom(ident(g, "c"), ident(g, "X"));
    case 1: return BoolExpr::atom(fmt::format("{}.{}", ident(g, "a"), ident(g, "b")), ident(g, "Y"));
    case 2: return BoolExpr::negation(expr(g, depth - 1));
    default: {
      std::vector<BoolExpr> ops;
      int n = g.integer(2, 3);
      for (int i = 0; i < n; ++i) ops.push_back(expr(g, depth - 1));
      return choice == 3 ? BoolExpr::conjunction(std::move(ops)) : BoolExpr::disjunction(std::move(ops));
    }
  }
}

inline errml::AnnexItem annex_item(Gen& g) {
  switch (g.integer(0, 2)) {
    case 0: return errml::ModelAssociation{ident(g, "T"), ident(g, "i"), {}};
    case 1: {
      errml::GuardOut guard{ident(g, "p"), {}, {}};
      int n = g.integer(1, 2);
      for (int i = 0; i < n; ++i) guard.clauses.push_back({ident(g, "P"), expr(g, 2), {}});
      return guard;
    }
    default: return errml::DerivedClause{ident(g, "C"), expr(g, 3), {}};
  }
}

template <class T, class Make>
errml::Staged<T> staged(Gen& g, Make make, int max_items) {
  errml::Staged<T> s;
  int n = g.integer(0, max_items);
  std::vector<std::pair<T, int>> added;
  for (int i = 0; i < n; ++i) {
    int it = g.coin(0.6) ? 1 : g.integer(1, 4);
    if (g.coin(0.15)) {
      s.remove(make(), it);  // usually matches nothing
    } else if (!added.empty() && g.coin(0.25)) {
      // Retract an earlier declaration at a later iteration.
      const auto& [item, at] = added[static_cast<std::size_t>(g.integer(0, static_cast<int>(added.size()) - 1))];
      if (at < 4) s.remove(item, g.integer(at + 1, 4));
    } else {
      T item = make();
      s.add(item, it);
      added.emplace_back(std::move(item), it);
    }
  }
  return s;
}

// Component names are unique across the tree so that siblings never clash.
inline errml::Component component(Gen& g, int depth, int& serial) {
  errml::Component c;
  c.category = static_cast<errml::Category>(g.integer(0, 4));
  c.name = fmt::format("Comp{}", serial++);
  c.ports = staged<errml::Port>(
      g,
      [&] {
        return errml::Port{ident(g, "port"), g.coin() ? errml::PortDirection::in : errml::PortDirection::out,
                           g.coin() ? errml::PortKind::data : errml::PortKind::event, {}};
      },
      3);
  if (depth > 0) {
    c.subcomponents = staged<errml::Component>(g, [&] { return component(g, depth - 1, serial); }, 2);
  }
  c.connections = staged<errml::Connection>(
      g,
      [&] {
        return errml::Connection{ident(g, "conn"), fmt::format("{}.{}", ident(g, "Comp"), ident(g, "port")),
                                 g.coin() ? ident(g, "port") : fmt::format("{}.{}", ident(g, "Comp"), ident(g, "port")),
                                 {}};
      },
      2);
  c.annex = staged<errml::AnnexItem>(g, [&] { return annex_item(g); }, 3);
  return c;
}

inline errml::Model model(Gen& g) {
  errml::Model m;
  int np = g.integer(0, 3);
  for (int i = 0; i < np; ++i) m.parameters.push_back({ident(g, "k"), g.rate(1e-4, 1.0), {}});
  int nt = g.integer(0, 3);
  for (int i = 0; i < nt; ++i) {
    errml::ErrorModelType t;
    t.name = fmt::format("T{}", i);
    t.features = staged<errml::Feature>(g, [&] { return feature(g); }, 5);
    m.library.types.push_back(std::move(t));
  }
  int ni = g.integer(0, 2);
  for (int i = 0; i < ni; ++i) {
    errml::ErrorModelImplementation impl;
    impl.type_name = ident(g, "T");
    impl.impl_name = fmt::format("i{}", i);
    impl.transitions = staged<errml::Transition>(g, [&] { return transition(g); }, 4);
    m.library.implementations.push_back(std::move(impl));
  }
  int serial = 0;
  if (g.coin(0.7)) m.architecture.root = component(g, 2, serial);
  return m;
}

// ---- random chains ----

/// Random generator on n states: each ordered pair gets a transition with
/// probability `density`, rates log-uniform on [0.01, 5].
inline errml::Ctmc chain(Gen& g, std::size_t n, double density = 0.5) {
  errml::Ctmc c;
  c.num_states = n;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && g.coin(density)) c.transitions.push_back({i, j, g.rate(0.01, 5.0)});
    }
  }
  c.normalize();
  c.labels.assign(n, {});
  c.initial = static_cast<std::size_t>(g.integer(0, static_cast<int>(n) - 1));
  return c;
}

// ---- random architectures, as source text ----

/// A chain-and-fan-out of 1..4 threads bound to randomly parameterized
/// fail/recover models with KO-style propagations along forward connections,
/// optionally with a Guard_Out-driven restart like the pipeline's Recovery.
inline std::string architecture(Gen& g) {
  int n = g.integer(1, 4);
  bool guarded = n >= 2 && g.coin(0.4);
  std::string text;
  text += "error model unit\nfeatures\n"
          "  Ok: initial error state;\n  Down: error state;\n  Hold: error state;\n"
          "  Fail: error event {Occurrence => Poisson lam};\n"
          "  Repair: error event {Occurrence => Poisson mu};\n"
          "  KO: in out error propagation {Occurrence => fixed p};\n"
          "  Alive: out error propagation;\n"
          "  Go: in error propagation;\n"
          "end unit;\n";
  text += "error model implementation unit.basic\ntransitions\n"
          "  Ok-[Fail]->Down;\n  Ok-[in KO]->Down;\n  Down-[out KO]->Down;\n"
          "  Down-[Repair]->Ok;\n  Ok-[out Alive]->Ok;\nend unit.basic;\n";
  text += "error model implementation unit.held\ntransitions\n"
          "  Ok-[Fail]->Down;\n  Ok-[in KO]->Down;\n  Down-[out KO]->Down;\n"
          "  Down-[in Go]->Hold;\n  Hold-[Repair]->Ok;\nend unit.held;\n";
  text += "error model watcher\nfeatures\n  W: initial error state;\n"
          "  Alive: in error propagation;\n  Go: out error propagation;\nend watcher;\n"
          "error model implementation watcher.w\ntransitions\nend watcher.w;\n";
  text += "system Rand\nsubcomponents\n";
  for (int i = 0; i < n; ++i) {
    bool held = guarded && i == n - 1;
    text += fmt::format("  thread T{}\n  features\n    i: in data port;\n    o: out data port;\n", i);
    if (held) text += "    go: in event port;\n";
    text += fmt::format("  annex error_model {{**\n    model => unit.{};\n  **}};\n  end T{};\n",
                        held ? "held" : "basic", i);
  }
  if (guarded) {
    text += "  thread W\n  features\n";
    for (int i = 0; i < n - 1; ++i) text += fmt::format("    w{}: in data port;\n", i);
    text += "    cmd: out event port;\n  annex error_model {**\n    model => watcher.w;\n"
            "    Guard_Out => Go when ";
    for (int i = 0; i < n - 1; ++i) text += fmt::format("{}w{}[Alive]", i ? " and " : "", i);
    text += " mask when others applies to cmd;\n  **};\n  end W;\n";
  }
  text += "connections\n";
  int k = 0;
  for (int j = 1; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      if (i == j - 1 || g.coin(0.3)) text += fmt::format("  c{}: port T{}.o -> T{}.i;\n", k++, i, j);
    }
  }
  if (guarded) {
    for (int i = 0; i < n - 1; ++i) text += fmt::format("  c{}: port T{}.o -> W.w{};\n", k++, i, i);
    text += fmt::format("  c{}: port W.cmd -> T{}.go;\n", k++, n - 1);
  }
  text += "annex error_model {**\n  derived {\n    Failed when ";
  for (int i = 0; i < n; ++i) text += fmt::format("{}not T{}[Ok]", i ? " or " : "", i);
  text += ";\n    Catastrophic when ";
  for (int i = 0; i < n; ++i) text += fmt::format("{}not T{}[Ok]", i ? " and " : "", i);
  text += ";\n  }\n**};\nend Rand;\n";
  double p = g.coin(0.2) ? (g.coin() ? 0.0 : 1.0) : g.real(0.05, 0.95);
  text = fmt::format("parameters {{\n  lam = {};\n  mu = {};\n  p = {};\n}}\n", g.rate(1e-3, 1.0),
                     g.rate(1e-2, 2.0), p) +
         text;
  return text;
}

}  // namespace gen
