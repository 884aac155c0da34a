#include <algorithm>

#include <gtest/gtest.h>

#include "errml/iterations.hpp"
#include "errml/validate.hpp"
#include "support.hpp"

using namespace errml;

namespace {

Model parse(const std::string& text) {
  auto r = dsl::parse_model(text);
  EXPECT_TRUE(r.ok()) << (r.diagnostics.empty() ? "" : format(r.diagnostics.front()));
  return r.model;
}

std::vector<std::string> state_names(const ErrorModelType& type) {
  std::vector<std::string> out;
  for (const auto& f : type.features.resolve(1)) {
    if (const auto* s = std::get_if<StateDecl>(&f)) out.push_back(s->name);
  }
  return out;
}

std::vector<std::string> transitions(const ErrorModelImplementation& impl) {
  std::vector<std::string> out;
  for (const auto& t : impl.transitions.resolve(1)) {
    std::string prefix = t.trigger.kind == TriggerKind::in_propagation    ? "in "
                         : t.trigger.kind == TriggerKind::out_propagation ? "out "
                                                                          : "";
    out.push_back(t.source + "-[" + prefix + t.trigger.name + "]->" + t.destination);
  }
  std::sort(out.begin(), out.end());
  return out;
}

const std::string two_initials = R"(
error model twice
features
  A: initial error state;
  B: initial error state;
end twice;
)";

const std::string dangling = R"(
error model dangling
features
  A: initial error state;
  Fail: error event {Occurrence => Poisson 1.0e-3};
end dangling;
error model implementation dangling.impl
transitions
  A-[Fail]->B;
end dangling.impl;
)";

}  // namespace

TEST(ValidateLibrary, SimpleModelIsClean) {
  auto model = support::load("simple.errml");
  EXPECT_TRUE(validate_library(model.library).empty());
}

TEST(ValidateLibrary, TwoInitialStates) {
  auto d = validate_library(parse(two_initials).library);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].severity, Severity::error);
  EXPECT_NE(d[0].message.find("multiple initial states"), std::string::npos);
}

TEST(ValidateLibrary, UnknownDestinationState) {
  auto d = validate_library(parse(dangling).library);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].severity, Severity::error);
  EXPECT_NE(d[0].message.find("unknown state B"), std::string::npos);
  EXPECT_GT(d[0].span.line, 1);
}

TEST(ValidateLibrary, OccurrenceDomains) {
  auto d = validate_library(parse(R"(
error model bad
features
  A: initial error state;
  E1: error event {Occurrence => Poisson 0};
  P1: out error propagation {Occurrence => fixed 1.5};
end bad;
)")
                                .library);
  EXPECT_EQ(d.size(), 2u);
  for (const auto& x : d) EXPECT_EQ(x.code, "invalid-occurrence");
}

TEST(ValidateLibrary, DirectionMismatch) {
  auto d = validate_library(parse(R"(
error model m
features
  A: initial error state;
  B: error state;
  P: out error propagation;
end m;
error model implementation m.i
transitions
  A-[in P]->B;
end m.i;
)")
                                .library);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].code, "direction-mismatch");
}

TEST(ApplyIterations, Comp3AtIterationOne) {
  auto m = apply_iterations(support::load("pipeline.errml"), 1);
  const auto* type = m.library.find_type("Comp3");
  const auto* impl = m.library.find_implementation("Comp3", "general");
  ASSERT_TRUE(type && impl);
  EXPECT_EQ(state_names(*type), (std::vector<std::string>{"Error_Free", "Failed"}));
  EXPECT_EQ(transitions(*impl), (std::vector<std::string>{"Error_Free-[Fail]->Failed",
                                                          "Failed-[Recover]->Error_Free"}));
}

TEST(ApplyIterations, Comp3AtIterationThree) {
  auto m = apply_iterations(support::load("pipeline.errml"), 3);
  auto names = state_names(*m.library.find_type("Comp3"));
  EXPECT_NE(std::find(names.begin(), names.end(), "CanRecover"), names.end());
  auto t = transitions(*m.library.find_implementation("Comp3", "general"));
  EXPECT_EQ(std::find(t.begin(), t.end(), "Failed-[Recover]->Error_Free"), t.end());
  EXPECT_NE(std::find(t.begin(), t.end(), "Failed-[in RecoverAuthorize]->CanRecover"), t.end());
  EXPECT_NE(std::find(t.begin(), t.end(), "CanRecover-[Recover]->Error_Free"), t.end());
}

TEST(ApplyIterations, UntaggedModelIsUnchanged) {
  auto m = support::load("simple.errml");
  auto resolved = apply_iterations(m, 1);
  for (int i : {1, 2, 7}) EXPECT_EQ(apply_iterations(m, i), resolved);
  EXPECT_EQ(transitions(*resolved.library.find_implementation("simple", "general")).size(), 4u);
}

TEST(ApplyIterations, RemoveWithoutAdd) {
  auto m = parse(R"(
error model m
features
  A: initial error state;
  B: error state;
  iteration 2 { remove { C: error state; } }
end m;
)");
  EXPECT_NO_THROW(apply_iterations(m, 1));
  try {
    apply_iterations(m, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::remove_without_add);
  }
}

TEST(ApplyIterations, ForwardReference) {
  auto m = parse(R"(
error model m
features
  A: initial error state;
  iteration 2 { add { B: error state; } }
end m;
error model implementation m.i
transitions
  A-[in X]->A;
end m.i;
)");
  auto d = validate_library(m.library);
  ASSERT_FALSE(d.empty());
  auto m2 = parse(R"(
error model m
features
  A: initial error state;
  Fail: error event {Occurrence => Poisson 1};
  iteration 3 { add { B: error state; } }
end m;
error model implementation m.i
transitions
  A-[Fail]->A;
  iteration 2 { add { A-[Fail]->B; } }
end m.i;
)");
  auto d2 = validate_library(m2.library);
  ASSERT_FALSE(d2.empty());
  EXPECT_EQ(d2[0].code, "forward-reference");
}

TEST(ApplyIterations, RejectsIterationZero) {
  EXPECT_THROW(apply_iterations(support::load("simple.errml"), 0), Error);
}

TEST(Instantiate, PipelineIterationThree) {
  auto inst = support::instance("pipeline.errml", 3);
  ASSERT_EQ(inst.automata.size(), 4u);
  EXPECT_EQ(inst.automata[0].path, "Pipeline.Compute1");
  EXPECT_EQ(inst.automata[3].path, "Pipeline.Recovery");
  auto c1 = *inst.find("Pipeline.Compute1"), c2 = *inst.find("Pipeline.Compute2"),
       c3 = *inst.find("Pipeline.Compute3"), rec = *inst.find("Pipeline.Recovery");
  auto receivers = [&](std::size_t s, const std::string& p) {
    std::vector<std::size_t> out;
    for (const auto* r : inst.routing.from(s, p)) out.push_back(r->receiver);
    return out;
  };
  EXPECT_EQ(receivers(c1, "KO"), std::vector<std::size_t>{c2});
  EXPECT_EQ(receivers(c2, "KO"), std::vector<std::size_t>{c3});
  EXPECT_EQ(receivers(rec, "RecoverAuthorize"), std::vector<std::size_t>{c3});
  EXPECT_TRUE(inst.routing.is_inactive(c3, "KO"));
  ASSERT_EQ(inst.guards.size(), 1u);
  EXPECT_EQ(inst.guards[0].port, "to3");
}

TEST(Instantiate, BlackBoxSuppressesSubtree) {
  auto inst = support::instance("blackbox.errml", 1);
  ASSERT_EQ(inst.automata.size(), 1u);
  EXPECT_EQ(inst.automata[0].path, "Plant.Controller");
  auto info = std::find_if(inst.diagnostics.begin(), inst.diagnostics.end(),
                           [](const Diagnostic& d) { return d.severity == Severity::info; });
  ASSERT_NE(info, inst.diagnostics.end());
  EXPECT_EQ(info->code, "black-box");
}

TEST(Instantiate, NoErrorModels) {
  auto m = parse("system Empty\nsubcomponents\n  thread T\n  end T;\nend Empty;\n");
  try {
    instantiate(m, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::no_error_models);
  }
}

TEST(Instantiate, UnknownErrorModel) {
  auto m = parse(R"(
system S
annex error_model {**
  model => nothing.here;
**};
end S;
)");
  try {
    instantiate(m, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unknown_error_model);
  }
}

TEST(Instantiate, UnresolvableAtoms) {
  auto base = support::load("two_state.errml");
  {
    auto m = base;
    auto& annex = m.architecture.root->annex;
    annex.add(DerivedClause{"Broken", BoolExpr::atom("Ghost", "Failed"), {}});
    try {
      instantiate(m, 1);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::derived_atom_unresolvable);
    }
  }
  {
    auto m = base;
    auto& annex = m.architecture.root->annex;
    annex.add(DerivedClause{"Broken", BoolExpr::atom("Component", "Sleeping"), {}});
    EXPECT_THROW(instantiate(m, 1), Error);
  }
}

TEST(Instantiate, GuardAtomWithoutSender) {
  auto m = parse(R"(
error model g
features
  S: initial error state;
  Go: out error propagation;
end g;
error model implementation g.i
transitions
end g.i;
system Top
subcomponents
  thread Lonely
  features
    watch: in data port;
    emit: out event port;
  annex error_model {**
    model => g.i;
    Guard_Out => Go when watch[OK] mask when others applies to emit;
  **};
  end Lonely;
end Top;
)");
  try {
    instantiate(m, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::guard_atom_unresolvable);
  }
}

TEST(Instantiate, ParameterOverridesAndBinding) {
  auto inst = support::instance("two_state.errml", 1, {{"lambda", 2.0}});
  EXPECT_DOUBLE_EQ(inst.automata[0].timed[0].rate, 2.0);
  auto m = support::load("two_state.errml");
  m.parameters.clear();
  try {
    instantiate(m, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unbound_parameter);
  }
  try {
    instantiate(support::load("two_state.errml"), 1, {{"p", 1.5}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_parameter);
  }
}

TEST(RoutingTable, TwoComponentsOneWay) {
  auto inst = support::instance("fig3.errml", 1);
  auto c1 = *inst.find("Pair.Component1"), c2 = *inst.find("Pair.Component2");
  const auto& table = routing_table(inst);
  auto routes = table.from(c1, "KO");
  ASSERT_EQ(routes.size(), 1u);
  EXPECT_EQ(routes[0]->receiver, c2);
  EXPECT_TRUE(table.from(c2, "KO").empty());
  EXPECT_TRUE(table.is_inactive(c2, "KO"));
}

TEST(RoutingTable, NoConnectionsMeansInactive) {
  auto inst = support::instance("two_state.errml", 1);
  EXPECT_TRUE(inst.routing.routes.empty());
  EXPECT_TRUE(inst.routing.is_inactive(0, "KO"));
}

TEST(RoutingTable, PipelineNeverRoutesBackwards) {
  for (int it : {2, 3}) {
    auto inst = support::instance("pipeline.errml", it);
    for (const auto& r : inst.routing.routes) {
      if (r.propagation == "KO") {
        EXPECT_LT(r.sender, r.receiver);
      }
    }
  }
}

TEST(InstanceModel, DescribeAndClassify) {
  auto inst = support::instance("pipeline.errml", 1);
  auto s = inst.initial_state();
  EXPECT_EQ(inst.describe(s),
            "(Pipeline.Compute1=Error_Free, Pipeline.Compute2=Error_Free, "
            "Pipeline.Compute3=Error_Free)");
  EXPECT_TRUE(inst.classify(s).empty());
  s[2] = 1;
  EXPECT_EQ(inst.classify(s), std::vector<std::string>{"Failed"});
}
