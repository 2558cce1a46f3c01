#pragma once

#include "podkit/gram_space.hpp"

namespace podkit {

/// Continuous piecewise-linear finite elements on a uniform grid of [0, 1].
struct Fem1d {
  Index nodes = 0;
  double h = 0.0;
  Matrix mass;       // (phi_j, phi_i)_{L2}, nodes x nodes
  Matrix stiffness;  // (phi_j', phi_i')_{L2}, nodes x nodes
  Matrix advection;  // (phi_j', phi_i)_{L2}, nodes x nodes
  /// Nodal values -> element-wise constant derivative, (nodes-1) x nodes.
  Matrix deriv;
  /// L2 Gram matrix of element-wise constants: diag(h), (nodes-1) x (nodes-1).
  Matrix element_gram;
};

/// Exact element integration; requires nodes >= 3.
Fem1d assemble_fem_1d(Index nodes);

/// diag(block, ..., block) with `copies` copies.
Matrix block_diagonal(const Matrix& block, Index copies);

}  // namespace podkit
