#pragma once

#include "errml/ast.hpp"

namespace errml {

/// Structural well-formedness of the error model library, checked at every
/// iteration from 1 to the highest declared one. Each type must have exactly
/// one initial state and pairwise distinct names; transitions must reference
/// declared states, events and propagations in a compatible direction;
/// literal Occurrence values must lie in their domain. Identical diagnostics
/// raised at several iterations are reported once.
Diagnostics validate_library(const ErrorModelLibrary& library);

/// validate_library plus architecture checks: unique sibling and port names,
/// connection endpoints and directions, error model associations, Guard_Out
/// ports and parameter declarations.
Diagnostics validate_model(const Model& model);

}  // namespace errml
