#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "errml/instance.hpp"

namespace errml {

struct RateTransition {
  std::size_t source = 0;
  std::size_t destination = 0;
  double rate = 0.0;

  bool operator==(const RateTransition&) const = default;
};

/// Labeled continuous-time Markov chain. Transitions are sorted by (source,
/// destination), carry strictly positive rates and never loop on a state;
/// the diagonal of the generator is implied by the exit rates.
struct Ctmc {
  std::size_t num_states = 0;
  std::vector<RateTransition> transitions;
  std::vector<std::vector<std::string>> labels;  // per state, sorted
  std::vector<std::string> declared_labels;      // every class name known to the model
  std::size_t initial = 0;

  // Present when the chain was composed from an instance model.
  std::vector<GlobalState> global_states;
  std::vector<std::string> descriptions;
  std::size_t vanishing_folded = 0;

  bool has_label(std::size_t state, const std::string& label) const;
  bool declares(const std::string& label) const;
  std::vector<double> exit_rates() const;
  /// Sorts transitions, merges parallel ones and drops self-loops.
  void normalize();
};

}  // namespace errml
