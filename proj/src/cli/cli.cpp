#include "errml/cli.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "errml/analyzer.hpp"
#include "errml/composer.hpp"
#include "errml/dsl.hpp"
#include "errml/instance.hpp"
#include "errml/simulator.hpp"
#include "errml/validate.hpp"

namespace errml::cli {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised after the diagnostics explaining it have been reported.
struct Reported {};

struct Options {
  std::string model;
  std::optional<int> iteration;
  std::string params;
  bool json = false;
  bool stats = false;
  std::string measure;
  std::optional<double> time;
  std::string failed = "Failed";
  std::string catastrophic = "Catastrophic";
  std::string format = "explicit";
  std::string out;
  std::uint64_t seed = 1;
  std::size_t reps = 100'000;
  double tol = 1e-10;
  std::size_t max_states = 1'000'000;
  int max_depth = 32;
};

json diagnostic_json(const Diagnostic& d) {
  json j = {{"severity", to_string(d.severity)}, {"code", d.code}, {"message", d.message}};
  if (d.span.located()) {
    j["file"] = d.span.file;
    j["line"] = d.span.line;
    j["column"] = d.span.column;
  }
  return j;
}

class Session {
 public:
  Session(const Options& opt, std::ostream& out, std::ostream& err)
      : opt_(opt), out_(out), err_(err) {}

  ~Session() { flush(); }

  void report(const Diagnostic& d) {
    if (opt_.json) {
      pending_.push_back(diagnostic_json(d));
    } else {
      err_ << format(d) << '\n';
    }
  }

  void report(const Diagnostics& ds) {
    for (const auto& d : ds) report(d);
  }

  void flush() {
    if (opt_.json && !pending_.empty()) {
      err_ << json{{"diagnostics", pending_}}.dump() << '\n';
      pending_.clear();
    }
  }

  Model load() {
    auto parsed = dsl::parse_file(opt_.model);
    report(parsed.diagnostics);
    if (!parsed.ok()) throw Reported{};
    return std::move(parsed.model);
  }

  ParameterMap parameters() const {
    ParameterMap map;
    std::stringstream ss(opt_.params);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw UsageError(fmt::format("--params: expected key=value, got '{}'", item));
      }
      std::string key = item.substr(0, eq);
      std::string text = item.substr(eq + 1);
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(text, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != text.size()) {
        throw UsageError(fmt::format("--params: '{}' is not a number", text));
      }
      map[key] = value;
    }
    return map;
  }

  int iteration(const Model& model) const {
    int it = opt_.iteration.value_or(model.max_iteration());
    if (it < 1) throw UsageError("--iteration must be >= 1");
    return it;
  }

  InstanceModel instance(const Model& model) {
    auto inst = instantiate(model, iteration(model), parameters());
    report(inst.diagnostics);
    return inst;
  }

  compose::ExploreLimits limits() const {
    return {opt_.max_states, opt_.max_depth};
  }

  Ctmc chain() {
    if (std::filesystem::path(opt_.model).extension() == ".tra") {
      return compose::read_explicit(std::filesystem::path(opt_.model));
    }
    Model model = load();
    return compose::compose(instance(model), limits());
  }

  analyze::MeasureSpec measure_spec() const {
    auto kind = analyze::measure_kind_from(opt_.measure);
    if (!kind) throw UsageError(fmt::format("unknown measure '{}'", opt_.measure));
    analyze::MeasureSpec spec;
    spec.kind = *kind;
    if (analyze::is_time_indexed(*kind)) {
      if (!opt_.time) throw UsageError(fmt::format("--time is required for {}", opt_.measure));
      spec.time = *opt_.time;
    }
    if (opt_.time && !(*opt_.time >= 0.0)) throw UsageError("--time must be >= 0");
    spec.failure_class = opt_.failed;
    spec.catastrophic_class = opt_.catastrophic;
    return spec;
  }

  std::ostream& out() { return out_; }
  const Options& options() const { return opt_; }

 private:
  const Options& opt_;
  std::ostream& out_;
  std::ostream& err_;
  json pending_ = json::array();
};

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json warnings_json(const Diagnostics& ds) {
  json a = json::array();
  for (const auto& d : ds) a.push_back(diagnostic_json(d));
  return a;
}

int cmd_validate(Session& s) {
  Model model = s.load();
  auto diags = validate_model(model);
  s.report(diags);
  if (has_errors(diags)) return model_error;
  if (!model.architecture.root) return ok;
  if (s.options().iteration) {
    s.instance(model);
  } else {
    for (int it = 1; it <= model.max_iteration(); ++it) {
      auto inst = instantiate(model, it, s.parameters());
      if (it == model.max_iteration()) s.report(inst.diagnostics);
    }
  }
  return ok;
}

int cmd_compose(Session& s) {
  Model model = s.load();
  auto inst = s.instance(model);
  Ctmc c = compose::compose(inst, s.limits());
  if (s.options().json) {
    s.out() << json{{"iteration", inst.iteration},
                    {"states", c.num_states},
                    {"transitions", c.transitions.size()},
                    {"vanishing_folded", c.vanishing_folded},
                    {"initial", c.initial}}
                   .dump(2)
            << '\n';
  } else if (s.options().stats) {
    s.out() << "states " << c.num_states << '\n'
            << "transitions " << c.transitions.size() << '\n'
            << "vanishing " << c.vanishing_folded << '\n';
  } else {
    for (std::size_t i = 0; i < c.num_states; ++i) {
      s.out() << i << (i == c.initial ? "* " : "  ") << c.descriptions[i];
      if (c.labels[i].empty()) s.out() << " operational";
      for (const auto& l : c.labels[i]) s.out() << ' ' << l;
      s.out() << '\n';
    }
  }
  return ok;
}

int cmd_analyze(Session& s) {
  auto spec = s.measure_spec();
  analyze::SolverConfig cfg;
  cfg.tolerance = s.options().tol;
  Ctmc c = s.chain();
  auto r = analyze::measure(c, spec, cfg);
  s.report(r.warnings);
  json j = {{"measure", analyze::to_string(r.kind)},
            {"value", number_or_null(r.value)},
            {"residual", r.residual},
            {"method", r.method},
            {"states", c.num_states},
            {"transitions", c.transitions.size()}};
  if (analyze::is_time_indexed(r.kind)) {
    j["time"] = r.time;
    j["truncation"] = {{"left", r.truncation_left}, {"right", r.truncation_right}};
    j["uniformization_rate"] = r.uniformization_rate;
  }
  if (r.kind == analyze::MeasureKind::steady_state_availability) {
    j["iterations"] = r.iterations;
    j["tolerance"] = cfg.tolerance;
  }
  if (r.kind == analyze::MeasureKind::mttf && !std::isfinite(r.value)) j["unbounded"] = true;
  j["class"] = r.kind == analyze::MeasureKind::safety ? spec.catastrophic_class : spec.failure_class;
  j["warnings"] = warnings_json(r.warnings);
  s.out() << j.dump(2) << '\n';
  return ok;
}

int cmd_export(Session& s) {
  const auto& opt = s.options();
  Ctmc c = s.chain();
  auto format = opt.format == "dot" ? compose::ExportFormat::dot
                                    : compose::ExportFormat::explicit_state;
  if (opt.out.empty()) {
    if (format == compose::ExportFormat::dot) {
      compose::write_dot(c, s.out());
      return ok;
    }
    throw UsageError("--out is required for the explicit format");
  }
  compose::export_ctmc(c, format, opt.out);
  return ok;
}

int cmd_simulate(Session& s) {
  const auto& opt = s.options();
  auto spec = s.measure_spec();
  if (opt.reps == 0) throw UsageError("--reps must be >= 1");
  Model model = s.load();
  auto inst = s.instance(model);
  simulate::SimConfig cfg;
  cfg.replications = opt.reps;
  cfg.seed = opt.seed;
  cfg.measure = spec;
  cfg.steady_state_horizon = opt.time.value_or(0.0);
  cfg.limits = s.limits();
  if (spec.kind == analyze::MeasureKind::steady_state_availability && !opt.time) {
    throw UsageError("--time is required to approximate steady_state_availability by simulation");
  }
  auto est = simulate::simulate_measure(inst, cfg);
  s.report(est.warnings);
  json j = {{"measure", analyze::to_string(spec.kind)},
            {"value", est.mean},
            {"half_width_95", est.half_width_95},
            {"replications", est.replications},
            {"seed", est.seed},
            {"method", "monte-carlo"},
            {"time", spec.kind == analyze::MeasureKind::steady_state_availability
                         ? cfg.steady_state_horizon
                         : spec.time},
            {"class",
             spec.kind == analyze::MeasureKind::safety ? spec.catastrophic_class
                                                       : spec.failure_class},
            {"warnings", warnings_json(est.warnings)}};
  s.out() << j.dump(2) << '\n';
  return ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Architecture dependability models: validate, compose, analyze, export, simulate",
               "errml"};
  app.require_subcommand(1);

  auto model_arg = [&](CLI::App* sub) {
    sub->add_option("model", opt.model, "Model file (.errml)")->required();
    sub->add_option("--iteration", opt.iteration, "Iteration to resolve (default: highest declared)");
    sub->add_option("--params", opt.params, "Parameter bindings k=v,... overriding the file");
    sub->add_flag("--json", opt.json, "Diagnostics as JSON");
  };
  auto limits = [&](CLI::App* sub) {
    sub->add_option("--max-states", opt.max_states, "State-space limit")->check(CLI::PositiveNumber);
    sub->add_option("--max-depth", opt.max_depth, "Cascade depth limit")->check(CLI::PositiveNumber);
  };
  const std::vector<std::string> kinds = {"steady_state_availability", "point_availability",
                                          "reliability", "safety", "mttf"};
  auto measure_args = [&](CLI::App* sub) {
    sub->add_option("--measure", opt.measure, "Measure kind")
        ->required()
        ->check(CLI::IsMember(kinds));
    sub->add_option("--time", opt.time, "Time in hours for time-indexed measures");
    sub->add_option("--failed", opt.failed, "Failure state class");
    sub->add_option("--catastrophic", opt.catastrophic, "Catastrophic state class");
  };

  auto* validate = app.add_subcommand("validate", "Check a model; silent when it is well formed");
  model_arg(validate);

  auto* compose = app.add_subcommand("compose", "Build the Markov chain and list its states");
  model_arg(compose);
  limits(compose);
  compose->add_flag("--stats", opt.stats, "Print state, transition and vanishing counts");

  auto* analyze = app.add_subcommand("analyze", "Evaluate a dependability measure (JSON)");
  model_arg(analyze);
  limits(analyze);
  measure_args(analyze);
  analyze->add_option("--tol", opt.tol, "Steady-state residual tolerance")
      ->check(CLI::PositiveNumber);

  auto* exporter = app.add_subcommand("export", "Write the Markov chain (explicit or dot)");
  model_arg(exporter);
  limits(exporter);
  exporter->add_option("--format", opt.format, "explicit or dot")
      ->check(CLI::IsMember({"explicit", "dot"}));
  exporter->add_option("--out", opt.out,
                       "Output path; explicit writes PATH.tra and PATH.lab, dot writes PATH");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of a measure (JSON)");
  model_arg(simulate);
  limits(simulate);
  measure_args(simulate);
  simulate->add_option("--seed", opt.seed, "Master seed");
  simulate->add_option("--reps", opt.reps, "Replications");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "errml: " << e.what() << '\n';
    return usage_error;
  }

  Session session(opt, out, err);
  try {
    if (validate->parsed()) return cmd_validate(session);
    if (compose->parsed()) return cmd_compose(session);
    if (analyze->parsed()) return cmd_analyze(session);
    if (exporter->parsed()) return cmd_export(session);
    if (simulate->parsed()) return cmd_simulate(session);
  } catch (const UsageError& e) {
    session.flush();
    err << "errml: " << e.what() << '\n';
    return usage_error;
  } catch (const Reported&) {
    return model_error;
  } catch (const Error& e) {
    session.report(e.to_diagnostic());
    return model_error;
  }
  return usage_error;
}

}  // namespace errml::cli
