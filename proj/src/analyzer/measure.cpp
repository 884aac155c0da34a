#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <fmt/format.h>

#include "errml/analyzer.hpp"

namespace errml::analyze {

const char* to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::steady_state_availability: return "steady_state_availability";
    case MeasureKind::point_availability: return "point_availability";
    case MeasureKind::reliability: return "reliability";
    case MeasureKind::safety: return "safety";
    case MeasureKind::mttf: return "mttf";
  }
  return "?";
}

std::optional<MeasureKind> measure_kind_from(const std::string& text) {
  for (auto k : {MeasureKind::steady_state_availability, MeasureKind::point_availability,
                 MeasureKind::reliability, MeasureKind::safety, MeasureKind::mttf}) {
    if (text == to_string(k)) return k;
  }
  return std::nullopt;
}

bool is_time_indexed(MeasureKind kind) {
  return kind == MeasureKind::point_availability || kind == MeasureKind::reliability ||
         kind == MeasureKind::safety;
}

Ctmc make_absorbing(const Ctmc& ctmc, const std::string& label) {
  Ctmc out = ctmc;
  std::erase_if(out.transitions,
                [&](const RateTransition& t) { return ctmc.has_label(t.source, label); });
  return out;
}

namespace {

void require_label(const Ctmc& ctmc, const std::string& label) {
  if (!ctmc.declares(label)) {
    throw Error(ErrorCode::label_missing, fmt::format("the chain has no state class '{}'", label));
  }
}

double mass_without(const Ctmc& ctmc, const std::vector<double>& pi, const std::string& label) {
  double sum = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    if (!ctmc.has_label(i, label)) sum += pi[i];
  }
  return std::clamp(sum, 0.0, 1.0);
}

MeasureResult transient_measure(const Ctmc& chain, const MeasureSpec& spec,
                                const std::string& label, const SolverConfig& cfg) {
  auto tr = transient(chain, spec.time, cfg);
  MeasureResult r;
  r.value = mass_without(chain, tr.probabilities, label);
  r.truncation_left = tr.left;
  r.truncation_right = tr.right;
  r.uniformization_rate = tr.rate;
  r.method = "uniformization";
  return r;
}

MeasureResult mttf(const Ctmc& ctmc, const std::string& label) {
  MeasureResult r;
  r.method = "sparse-lu";
  const std::size_t n = ctmc.num_states;
  std::vector<bool> failed(n);
  for (std::size_t i = 0; i < n; ++i) failed[i] = ctmc.has_label(i, label);
  if (failed[ctmc.initial]) return r;

  auto infinite = [&](const std::string& why) {
    r.value = std::numeric_limits<double>::infinity();
    r.warnings.push_back({Severity::warning, "mttf-infinite", why, SourceSpan::unknown()});
    return r;
  };
  Ctmc absorbing = make_absorbing(ctmc, label);
  auto reach = reachable_from(absorbing, ctmc.initial);
  auto hits = can_reach(absorbing, failed);
  bool any_failed = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (!reach[i]) continue;
    if (failed[i]) any_failed = true;
    else if (!hits[i]) {
      return infinite(fmt::format("state {} is reachable and never leads to '{}'", i, label));
    }
  }
  if (!any_failed) return infinite(fmt::format("no '{}' state is reachable", label));

  // Expected hitting times over reachable non-failed states:
  //   exit_i * tau_i - sum_j q_ij tau_j = 1.
  std::vector<std::ptrdiff_t> slot(n, -1);
  std::ptrdiff_t m = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (reach[i] && !failed[i]) slot[i] = m++;
  }
  auto exit = absorbing.exit_rates();
  std::vector<Eigen::Triplet<double>> entries;
  for (std::size_t i = 0; i < n; ++i) {
    if (slot[i] >= 0) entries.emplace_back(slot[i], slot[i], exit[i]);
  }
  for (const auto& t : absorbing.transitions) {
    if (slot[t.source] >= 0 && slot[t.destination] >= 0) {
      entries.emplace_back(slot[t.source], slot[t.destination], -t.rate);
    }
  }
  Eigen::SparseMatrix<double> a(m, m);
  a.setFromTriplets(entries.begin(), entries.end());
  a.makeCompressed();
  Eigen::VectorXd b = Eigen::VectorXd::Ones(m);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) {
    throw Error(ErrorCode::no_convergence, "MTTF system is singular");
  }
  Eigen::VectorXd tau = lu.solve(b);
  r.value = tau[slot[ctmc.initial]];
  r.residual = (a * tau - b).cwiseAbs().maxCoeff();
  return r;
}

}  // namespace

MeasureResult measure(const Ctmc& ctmc, const MeasureSpec& spec, const SolverConfig& cfg) {
  if (is_time_indexed(spec.kind) && (!(spec.time >= 0.0) || std::isinf(spec.time))) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("time must be finite and >= 0, got {}", spec.time));
  }
  MeasureResult r;
  switch (spec.kind) {
    case MeasureKind::steady_state_availability: {
      require_label(ctmc, spec.failure_class);
      auto ss = steady_state(ctmc, cfg);
      r.value = mass_without(ctmc, ss.probabilities, spec.failure_class);
      r.residual = ss.residual;
      r.iterations = ss.iterations;
      r.method = "gauss-seidel";
      break;
    }
    case MeasureKind::point_availability:
      require_label(ctmc, spec.failure_class);
      r = transient_measure(ctmc, spec, spec.failure_class, cfg);
      break;
    case MeasureKind::reliability:
      require_label(ctmc, spec.failure_class);
      r = transient_measure(make_absorbing(ctmc, spec.failure_class), spec, spec.failure_class,
                            cfg);
      break;
    case MeasureKind::safety:
      require_label(ctmc, spec.catastrophic_class);
      r = transient_measure(make_absorbing(ctmc, spec.catastrophic_class), spec,
                            spec.catastrophic_class, cfg);
      break;
    case MeasureKind::mttf:
      require_label(ctmc, spec.failure_class);
      r = mttf(ctmc, spec.failure_class);
      break;
  }
  r.kind = spec.kind;
  r.time = is_time_indexed(spec.kind) ? spec.time : 0.0;
  return r;
}

}  // namespace errml::analyze
