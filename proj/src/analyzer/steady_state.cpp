#include <cmath>

#include <fmt/format.h>

#include "errml/analyzer.hpp"

namespace errml::analyze {

namespace {

double residual_norm(const Ctmc& ctmc, const std::vector<double>& pi,
                     const std::vector<double>& exit) {
  std::vector<double> r(ctmc.num_states, 0.0);
  for (std::size_t i = 0; i < ctmc.num_states; ++i) r[i] = -pi[i] * exit[i];
  for (const auto& t : ctmc.transitions) r[t.destination] += pi[t.source] * t.rate;
  double m = 0.0;
  for (double v : r) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

SteadyStateResult steady_state(const Ctmc& ctmc, const SolverConfig& cfg) {
  const std::size_t n = ctmc.num_states;
  if (n == 0) throw Error(ErrorCode::invalid_argument, "empty chain");
  auto bottoms = bottom_components(ctmc);
  if (bottoms.size() > 1) {
    throw Error(ErrorCode::not_irreducible,
                fmt::format("chain has {} recurrent classes", bottoms.size()));
  }
  const auto& recurrent = bottoms.front();
  if (recurrent.size() == 1 && n > 1) {
    throw Error(ErrorCode::not_irreducible,
                fmt::format("chain is absorbed in state {}", recurrent.front()));
  }

  std::vector<bool> member(n, false);
  for (auto s : recurrent) member[s] = true;
  std::vector<double> exit = ctmc.exit_rates();
  std::vector<std::vector<std::pair<std::size_t, double>>> incoming(n);
  for (const auto& t : ctmc.transitions) {
    if (member[t.source] && member[t.destination]) {
      incoming[t.destination].emplace_back(t.source, t.rate);
    }
  }

  SteadyStateResult result;
  std::vector<double> pi(n, 0.0);
  for (auto s : recurrent) pi[s] = 1.0 / static_cast<double>(recurrent.size());
  if (recurrent.size() == 1) {
    result.probabilities = pi;
    result.residual = residual_norm(ctmc, pi, exit);
    return result;
  }

  for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
    for (auto j : recurrent) {
      double in = 0.0;
      for (const auto& [i, rate] : incoming[j]) in += pi[i] * rate;
      pi[j] = in / exit[j];
    }
    double sum = 0.0;
    for (auto s : recurrent) sum += pi[s];
    for (auto s : recurrent) pi[s] /= sum;
    double res = residual_norm(ctmc, pi, exit);
    if (res <= cfg.tolerance) {
      result.probabilities = std::move(pi);
      result.residual = res;
      result.iterations = it;
      return result;
    }
  }
  throw Error(ErrorCode::no_convergence,
              fmt::format("steady state did not reach residual {} within {} sweeps", cfg.tolerance,
                          cfg.max_iterations));
}

}  // namespace errml::analyze
