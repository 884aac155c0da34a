#pragma once

#include "errml/ast.hpp"

namespace errml {

/// The effective model at `iteration`: every declaration added at an iteration
/// <= i and not removed at an iteration <= i. The result is flat (all content
/// in iteration 1) and canonically ordered, so permuting declarations inside
/// one iteration block never changes it.
///
/// Throws RemoveWithoutAdd when a removal matches nothing and ForwardReference
/// when a transition at iteration <= i names a state, event or propagation
/// that its type only declares at a later iteration.
Model apply_iterations(const Model& model, int iteration);

/// Advances an already resolved model by exactly one iteration using the
/// deltas `source` declares for `iteration`. For every model m and i >= 1,
/// advance_iteration(apply_iterations(m, i), m, i + 1) == apply_iterations(m, i + 1).
Model advance_iteration(const Model& resolved, const Model& source, int iteration);

}  // namespace errml
