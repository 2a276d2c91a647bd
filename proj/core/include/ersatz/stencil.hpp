#pragma once

#include <vector>

namespace ersatz {

/// Fixed set of lattice directions used by all difference operators.
///
/// Stores one representative per +/- pair: the coordinate directions
/// e_1..e_d first, then e_i+e_j and e_i-e_j for i<j in lexicographic
/// order.  m = d^2 for d >= 2, m = 1 for d = 1.
struct StencilSet {
    int dim = 0;
    // vectors[k] is a d-vector with integer coordinates.
    std::vector<std::vector<int>> vectors;
    // Radius of the smallest closed ball containing the symmetrized set.
    double radius = 0.0;

    int size() const { return static_cast<int>(vectors.size()); }
};

/// Builds the standard stencil for dimension d.
/// Throws Error(invalid-dimension) for d <= 0.
StencilSet build_standard_stencil(int d);

}  // namespace ersatz
