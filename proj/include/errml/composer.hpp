#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "errml/ctmc.hpp"
#include "errml/instance.hpp"

namespace errml::compose {

struct ExploreLimits {
  std::size_t max_states = 1'000'000;
  int max_cascade_depth = 32;
};

struct Branch {
  double probability = 0.0;
  std::size_t target = 0;
};

/// One timed firing out of a tangible state, before rates are folded.
struct RawTransition {
  std::size_t automaton = 0;
  Trigger trigger;
  double rate = 0.0;
  std::vector<Branch> branches;  // distinct targets, probabilities sum to 1
};

struct RawGraph {
  std::vector<GlobalState> states;                      // tangible, in discovery order
  std::vector<std::vector<RawTransition>> transitions;  // per state
  std::size_t initial = 0;
  std::size_t vanishing = 0;  // distinct configurations eliminated by guard reactions
};

using Distribution = std::vector<std::pair<GlobalState, double>>;

/// Resolves the immediate consequences of firing timed transition `index` of
/// automaton `automaton` in tangible `state`: fixed-occurrence emissions on
/// state entry (Bernoulli branches), propagation deliveries along the routing
/// table, and Guard_Out reactions until no further reaction is enabled.
/// Returns the tangible successors with their probabilities, merged by state
/// in order of first appearance. Configurations in which a guard reacted are
/// added to `vanishing` when it is given.
///
/// Throws CascadeDepthExceeded or GuardLivelock when resolution does not
/// settle within `limits.max_cascade_depth`.
Distribution fire(const InstanceModel& instance, const GlobalState& state, std::size_t automaton,
                  std::size_t index, const ExploreLimits& limits = {},
                  std::set<GlobalState>* vanishing = nullptr);

/// Tangible state reached from the all-initial configuration after guard
/// reactions settle.
GlobalState initial_tangible_state(const InstanceModel& instance, const ExploreLimits& limits = {},
                                   std::set<GlobalState>* vanishing = nullptr);

/// Breadth-first exploration from the initial state. Deterministic: state
/// indexing and transition order depend only on the instance.
/// Throws StateLimitExceeded, CascadeDepthExceeded or GuardLivelock.
RawGraph explore(const InstanceModel& instance, const ExploreLimits& limits = {});

/// Turns branch-distributed firings into rates r*q, sums parallel
/// transitions and drops self-loops.
Ctmc fold_guards_and_vanishing(const RawGraph& graph);

/// Attaches derived state classes to every state of a chain composed from
/// `instance` (requires global_states).
void label_states(Ctmc& ctmc, const InstanceModel& instance);

/// explore + fold + label + state descriptions.
Ctmc compose(const InstanceModel& instance, const ExploreLimits& limits = {});

enum class ExportFormat { explicit_state, dot };

/// Rate in scientific notation with 17 significant digits and an unpadded
/// exponent, e.g. 1.0000000000000000e-3.
std::string format_rate(double rate);

/// Explicit-state transitions file: `STATES n TRANSITIONS m`, then `src dst rate`.
void write_transitions(const Ctmc& ctmc, std::ostream& out);
/// Labels file: `#INIT i`, then `index label...` for every labeled state.
void write_labels(const Ctmc& ctmc, std::ostream& out);
void write_dot(const Ctmc& ctmc, std::ostream& out);

/// Explicit format writes `<path>.tra` and `<path>.lab`; dot writes `path`.
/// Throws Error(io) naming the path on failure.
void export_ctmc(const Ctmc& ctmc, ExportFormat format, const std::filesystem::path& path);

/// Reads the explicit-state format back. Throws Error(format) on malformed input.
Ctmc read_explicit(std::istream& transitions, std::istream& labels);
Ctmc read_explicit(const std::filesystem::path& transitions_file);

}  // namespace errml::compose
