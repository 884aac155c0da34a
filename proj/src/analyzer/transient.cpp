#include <cmath>

#include <fmt/format.h>

#include "errml/analyzer.hpp"

namespace errml::analyze {

namespace {

constexpr double max_poisson_mean = 1e8;

struct PoissonWindow {
  std::size_t left = 0;
  std::vector<double> weights;  // weights[k - left], normalized over the window
};

// Weights of Poisson(q) on [left, right], each tail trimmed to at most eps/2.
PoissonWindow poisson_window(double q, double eps) {
  const double mode = std::floor(q);
  const double log_eps = std::log(2.0 / eps);
  const double spread = (std::sqrt(2.0 * log_eps) + 3.0) * std::sqrt(q) + 3.0 * log_eps + 10.0;
  const std::size_t lo = mode > spread ? static_cast<std::size_t>(mode - spread) : 0;
  const std::size_t hi = static_cast<std::size_t>(mode + spread) + 1;

  std::vector<double> w(hi - lo + 1);
  for (std::size_t k = lo; k <= hi; ++k) {
    double kd = static_cast<double>(k);
    double log_w = -q + (k == 0 ? 0.0 : kd * std::log(q)) - std::lgamma(kd + 1.0);
    w[k - lo] = std::exp(log_w);
  }
  double total = 0.0;
  for (double v : w) total += v;

  std::size_t a = 0, b = w.size() - 1;
  double cut = 0.0;
  while (a < b && cut + w[a] <= 0.5 * eps * total) cut += w[a++];
  cut = 0.0;
  while (b > a && cut + w[b] <= 0.5 * eps * total) cut += w[b--];

  PoissonWindow out;
  out.left = lo + a;
  out.weights.assign(w.begin() + static_cast<std::ptrdiff_t>(a),
                     w.begin() + static_cast<std::ptrdiff_t>(b) + 1);
  double kept = 0.0;
  for (double v : out.weights) kept += v;
  for (double& v : out.weights) v /= kept;
  return out;
}

}  // namespace

TransientResult transient(const Ctmc& ctmc, double t, const SolverConfig& cfg) {
  std::vector<double> initial(ctmc.num_states, 0.0);
  if (ctmc.num_states) initial.at(ctmc.initial) = 1.0;
  return transient(ctmc, initial, t, cfg);
}

TransientResult transient(const Ctmc& ctmc, const std::vector<double>& initial, double t,
                          const SolverConfig& cfg) {
  if (!(t >= 0.0) || std::isinf(t)) {
    throw Error(ErrorCode::invalid_argument, fmt::format("time must be finite and >= 0, got {}", t));
  }
  if (initial.size() != ctmc.num_states) {
    throw Error(ErrorCode::invalid_argument, "initial distribution has the wrong size");
  }
  TransientResult result;
  std::vector<double> exit = ctmc.exit_rates();
  double rate = 0.0;
  for (double e : exit) rate = std::max(rate, e);
  result.rate = rate;
  const double q = rate * t;
  if (q == 0.0) {
    result.probabilities = initial;
    return result;
  }
  if (q > max_poisson_mean) {
    throw Error(ErrorCode::numeric_range,
                fmt::format("uniformization needs rate*t <= {}, got {}", max_poisson_mean, q));
  }

  auto window = poisson_window(q, cfg.truncation);
  result.left = window.left;
  result.right = window.left + window.weights.size() - 1;

  // v <- v P with P = I + Q / rate.
  std::vector<double> stay(ctmc.num_states);
  for (std::size_t i = 0; i < ctmc.num_states; ++i) stay[i] = 1.0 - exit[i] / rate;
  std::vector<double> v = initial, next(ctmc.num_states);
  std::vector<double> acc(ctmc.num_states, 0.0);
  for (std::size_t k = 0; k <= result.right; ++k) {
    if (k >= result.left) {
      double w = window.weights[k - result.left];
      for (std::size_t i = 0; i < v.size(); ++i) acc[i] += w * v[i];
    }
    if (k == result.right) break;
    for (std::size_t i = 0; i < v.size(); ++i) next[i] = v[i] * stay[i];
    for (const auto& tr : ctmc.transitions) next[tr.destination] += v[tr.source] * tr.rate / rate;
    v.swap(next);
  }
  result.probabilities = std::move(acc);
  return result;
}

}  // namespace errml::analyze
