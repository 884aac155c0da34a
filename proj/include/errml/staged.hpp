#pragma once

#include <algorithm>
#include <type_traits>
#include <variant>
#include <vector>

#include <fmt/format.h>

#include "errml/diagnostic.hpp"

namespace errml {

/// Declarations added and removed at one modeling iteration.
template <class T>
struct IterationDelta {
  int iteration = 1;
  std::vector<T> added;
  std::vector<T> removed;

  bool operator==(const IterationDelta&) const = default;
};

template <class T>
const SourceSpan& span_of(const T& item) {
  if constexpr (requires { item.span; }) {
    return item.span;
  } else {
    return std::visit([](const auto& alternative) -> const SourceSpan& { return alternative.span; },
                      item);
  }
}

/// A declaration list whose content evolves over modeling iterations.
/// Items declared outside any `iteration N { ... }` block live in iteration 1.
/// Deltas are kept sorted by iteration, at most one delta per iteration.
template <class T>
class Staged {
 public:
  Staged() = default;
  Staged(std::initializer_list<T> items) {
    for (const auto& item : items) add(item);
  }

  void add(T item, int iteration = 1) { delta_at(iteration).added.push_back(std::move(item)); }
  void remove(T item, int iteration) { delta_at(iteration).removed.push_back(std::move(item)); }

  /// Ensures a (possibly empty) delta exists for `iteration`.
  IterationDelta<T>& delta_at(int iteration) {
    auto it = std::lower_bound(deltas_.begin(), deltas_.end(), iteration,
                               [](const IterationDelta<T>& d, int i) { return d.iteration < i; });
    if (it == deltas_.end() || it->iteration != iteration) {
      it = deltas_.insert(it, IterationDelta<T>{iteration, {}, {}});
    }
    return *it;
  }

  const std::vector<IterationDelta<T>>& deltas() const noexcept { return deltas_; }
  std::vector<IterationDelta<T>>& deltas() noexcept { return deltas_; }

  bool empty() const noexcept {
    return std::all_of(deltas_.begin(), deltas_.end(),
                       [](const auto& d) { return d.added.empty() && d.removed.empty(); });
  }

  int max_iteration() const noexcept {
    int result = 0;
    for (const auto& d : deltas_) {
      if (!d.added.empty() || !d.removed.empty()) result = std::max(result, d.iteration);
    }
    return result;
  }

  /// Items in effect at `iteration`: everything added at an iteration <= i and
  /// not removed at an iteration <= i. Within one iteration removals apply
  /// before additions. Throws RemoveWithoutAdd when a removal matches nothing.
  std::vector<T> resolve(int iteration) const {
    std::vector<T> current;
    for (const auto& d : deltas_) {
      if (d.iteration > iteration) break;
      for (const auto& gone : d.removed) {
        auto it = std::find(current.begin(), current.end(), gone);
        if (it == current.end()) {
          throw Error(ErrorCode::remove_without_add,
                      fmt::format("iteration {} removes a declaration that is not present",
                                  d.iteration),
                      span_of(gone));
        }
        current.erase(it);
      }
      current.insert(current.end(), d.added.begin(), d.added.end());
    }
    return current;
  }

  /// Every item ever added, in iteration order.
  std::vector<T> all_added() const {
    std::vector<T> out;
    for (const auto& d : deltas_) out.insert(out.end(), d.added.begin(), d.added.end());
    return out;
  }

  bool operator==(const Staged& other) const { return normalized() == other.normalized(); }

 private:
  std::vector<IterationDelta<T>> normalized() const {
    std::vector<IterationDelta<T>> out;
    for (const auto& d : deltas_) {
      if (!d.added.empty() || !d.removed.empty()) out.push_back(d);
    }
    return out;
  }

  std::vector<IterationDelta<T>> deltas_;
};

}  // namespace errml
