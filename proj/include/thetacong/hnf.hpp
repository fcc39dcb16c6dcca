#pragma once

#include "thetacong/matrix.hpp"

namespace thetacong {

/// Row-style Hermite normal form of the row lattice spanned by `generators`.
/// Returns rank-many rows; pivot columns strictly increase, pivots are
/// positive and entries above a pivot lie in [0, pivot). Zero rows dropped.
IntMatrix hermite_normal_form(const IntMatrix& generators);

}  // namespace thetacong
