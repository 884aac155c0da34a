#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "errml/ctmc.hpp"
#include "errml/diagnostic.hpp"

/// Numerical evaluation of dependability measures. Time is in hours and
/// rates are per hour.
namespace errml::analyze {

struct SolverConfig {
  double tolerance = 1e-10;             // steady-state residual bound on ||pi Q||_inf
  std::size_t max_iterations = 1'000'000;
  double truncation = 1e-12;            // Poisson mass discarded by uniformization
};

enum class MeasureKind { steady_state_availability, point_availability, reliability, safety, mttf };

const char* to_string(MeasureKind kind);
std::optional<MeasureKind> measure_kind_from(const std::string& text);
bool is_time_indexed(MeasureKind kind);

struct MeasureSpec {
  MeasureKind kind = MeasureKind::steady_state_availability;
  double time = 0.0;
  std::string failure_class = "Failed";
  std::string catastrophic_class = "Catastrophic";
};

struct MeasureResult {
  MeasureKind kind = MeasureKind::steady_state_availability;
  double time = 0.0;
  double value = 0.0;  // probability, or hours for MTTF
  double residual = 0.0;
  std::size_t iterations = 0;  // Gauss-Seidel sweeps
  std::size_t truncation_left = 0;
  std::size_t truncation_right = 0;
  double uniformization_rate = 0.0;
  std::string method;
  Diagnostics warnings;
};

struct SteadyStateResult {
  std::vector<double> probabilities;
  double residual = 0.0;
  std::size_t iterations = 0;
};

/// Gauss-Seidel on pi Q = 0 restricted to the recurrent class, normalized
/// after every sweep; stops when ||pi Q||_inf <= tolerance.
/// Throws NotIrreducible when there is more than one recurrent class, or when
/// the only one is an absorbing state of a larger chain; NoConvergence after
/// max_iterations sweeps.
SteadyStateResult steady_state(const Ctmc& ctmc, const SolverConfig& cfg = {});

struct TransientResult {
  std::vector<double> probabilities;
  std::size_t left = 0;   // first Poisson term kept
  std::size_t right = 0;  // last Poisson term kept
  double rate = 0.0;      // uniformization rate: largest exit rate
};

/// Uniformization. Poisson weights are computed in log space around the mode;
/// each tail is trimmed to at most truncation/2 of the mass. Throws
/// NumericRange when rate * t exceeds 1e8, InvalidArgument when t < 0.
TransientResult transient(const Ctmc& ctmc, double t, const SolverConfig& cfg = {});
TransientResult transient(const Ctmc& ctmc, const std::vector<double>& initial, double t,
                          const SolverConfig& cfg = {});

/// Copy of `ctmc` in which every state carrying `label` has no outgoing transitions.
Ctmc make_absorbing(const Ctmc& ctmc, const std::string& label);

/// Throws LabelMissing if a referenced class is unknown to the chain.
/// An unreachable or avoidable failure set yields MTTF = +inf with a warning.
MeasureResult measure(const Ctmc& ctmc, const MeasureSpec& spec, const SolverConfig& cfg = {});

using DenseMatrix = std::vector<std::vector<double>>;

DenseMatrix generator_matrix(const Ctmc& ctmc);

/// exp(Q t) by scaling and squaring of a truncated Taylor series (terms are
/// added until they drop below 1e-18 relative to the partial sum's norm).
/// Test oracle only: throws SizeLimit above 64 states.
DenseMatrix dense_expm_reference(const DenseMatrix& generator, double t);

// Graph structure of the transition relation.
std::vector<std::vector<std::size_t>> strongly_connected_components(const Ctmc& ctmc);
/// Components with no transition leaving them (the recurrent classes).
std::vector<std::vector<std::size_t>> bottom_components(const Ctmc& ctmc);
std::vector<bool> reachable_from(const Ctmc& ctmc, std::size_t start);
/// States from which some state in `targets` is reachable.
std::vector<bool> can_reach(const Ctmc& ctmc, const std::vector<bool>& targets);

}  // namespace errml::analyze
