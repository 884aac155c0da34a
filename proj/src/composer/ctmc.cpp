#include <algorithm>

#include "errml/ctmc.hpp"

namespace errml {

bool Ctmc::has_label(std::size_t state, const std::string& label) const {
  if (state >= labels.size()) return false;
  const auto& l = labels[state];
  return std::find(l.begin(), l.end(), label) != l.end();
}

bool Ctmc::declares(const std::string& label) const {
  return std::find(declared_labels.begin(), declared_labels.end(), label) !=
         declared_labels.end();
}

std::vector<double> Ctmc::exit_rates() const {
  std::vector<double> out(num_states, 0.0);
  for (const auto& t : transitions) out[t.source] += t.rate;
  return out;
}

void Ctmc::normalize() {
  std::stable_sort(transitions.begin(), transitions.end(), [](const auto& a, const auto& b) {
    return a.source != b.source ? a.source < b.source : a.destination < b.destination;
  });
  std::vector<RateTransition> merged;
  merged.reserve(transitions.size());
  for (const auto& t : transitions) {
    if (t.source == t.destination || !(t.rate > 0.0)) continue;
    if (!merged.empty() && merged.back().source == t.source &&
        merged.back().destination == t.destination) {
      merged.back().rate += t.rate;
    } else {
      merged.push_back(t);
    }
  }
  transitions = std::move(merged);
}

}  // namespace errml
