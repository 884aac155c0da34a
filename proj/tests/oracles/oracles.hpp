#pragma once

// Reference values computed without the parser, composer or solvers.

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

// Two-state repairable component.
inline double availability_ss(double lambda, double mu) { return mu / (lambda + mu); }

inline double availability_at(double lambda, double mu, double t) {
  double s = lambda + mu;
  return mu / s + (lambda / s) * std::exp(-s * t);
}

inline double reliability_at(double lambda, double t) { return std::exp(-lambda * t); }

// Pipeline chains, enumerated from the operational rules. Local states are
// 'E' (Error_Free), 'F' (Failed), 'R' (CanRecover, Compute3 at iteration 3).
using Triple = std::string;  // e.g. "EFE"
using Distribution = std::map<Triple, double>;

struct PipelineChain {
  std::vector<Triple> states;                        // discovery order from "EEE"
  std::map<std::pair<Triple, Triple>, double> rates;  // off-diagonal, summed
};

inline Distribution pipeline_settle(const Distribution& d, int iteration) {
  if (iteration < 3) return d;
  Distribution out;
  for (const auto& [s, p] : d) out[s == "EEF" ? "EER" : s] += p;
  return out;
}

// Thread i fails; at iteration >= 2 each thread entering F knocks out the
// next one (if error free) with probability p.
inline Distribution pipeline_fail(const Triple& from, int i, int iteration, double p) {
  Distribution d;
  Triple s = from;
  s[static_cast<std::size_t>(i)] = 'F';
  double prob = 1.0;
  int j = i;
  for (;;) {
    int next = j + 1;
    if (iteration < 2 || next > 2) {
      d[s] += prob;
      break;
    }
    if (p < 1.0) d[s] += prob * (1.0 - p);
    double loud = prob * p;
    if (loud == 0.0) break;
    if (s[static_cast<std::size_t>(next)] != 'E') {
      d[s] += loud;
      break;
    }
    s[static_cast<std::size_t>(next)] = 'F';
    prob = loud;
    j = next;
  }
  return pipeline_settle(d, iteration);
}

inline PipelineChain pipeline_chain(int iteration, double lambda, double mu, double p) {
  PipelineChain c;
  c.states.push_back("EEE");
  for (std::size_t k = 0; k < c.states.size(); ++k) {
    Triple s = c.states[k];
    std::vector<std::pair<double, Distribution>> moves;
    for (int i = 0; i < 3; ++i) {
      char local = s[static_cast<std::size_t>(i)];
      Triple up = s;
      up[static_cast<std::size_t>(i)] = 'E';
      if (local == 'E') {
        moves.emplace_back(lambda, pipeline_fail(s, i, iteration, p));
      } else if ((local == 'F' && !(iteration >= 3 && i == 2)) || local == 'R') {
        moves.emplace_back(mu, pipeline_settle({{up, 1.0}}, iteration));
      }
    }
    for (const auto& [rate, dist] : moves) {
      if (!(rate > 0.0)) continue;
      for (const auto& [target, q] : dist) {
        if (q == 0.0) continue;
        bool known = false;
        for (const auto& x : c.states) known = known || x == target;
        if (!known) c.states.push_back(target);
        if (target != s) c.rates[{s, target}] += rate * q;
      }
    }
  }
  return c;
}

// Kronecker sum of generators given as dense row-major matrices.
inline std::vector<std::vector<double>> kronecker_sum(
    const std::vector<std::vector<std::vector<double>>>& parts) {
  std::vector<std::vector<double>> acc{{0.0}};
  for (const auto& b : parts) {
    std::size_t n = acc.size(), m = b.size();
    std::vector<std::vector<double>> out(n * m, std::vector<double>(n * m, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < m; ++k) out[i * m + k][j * m + k] += acc[i][j];
      }
      for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t l = 0; l < m; ++l) out[i * m + k][i * m + l] += b[k][l];
      }
    }
    acc = std::move(out);
  }
  return acc;
}

}  // namespace oracle
