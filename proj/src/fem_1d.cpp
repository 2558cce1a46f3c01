#include "podkit/fem_1d.hpp"

#include "podkit/errors.hpp"

namespace podkit {

Fem1d assemble_fem_1d(Index nodes) {
  if (nodes < 3) {
    throw Error(ErrorCode::InvalidArgument, "FEM assembly needs at least 3 nodes, got " +
                                                std::to_string(nodes));
  }
  Fem1d fem;
  fem.nodes = nodes;
  const Index elements = nodes - 1;
  fem.h = 1.0 / static_cast<double>(elements);
  const double h = fem.h;

  fem.mass = Matrix::Zero(nodes, nodes);
  fem.stiffness = Matrix::Zero(nodes, nodes);
  fem.advection = Matrix::Zero(nodes, nodes);
  fem.deriv = Matrix::Zero(elements, nodes);
  fem.element_gram = Matrix::Zero(elements, elements);

  const double m_local[2][2] = {{h / 3.0, h / 6.0}, {h / 6.0, h / 3.0}};
  const double s_local[2][2] = {{1.0 / h, -1.0 / h}, {-1.0 / h, 1.0 / h}};
  // row i = test function, column j = differentiated trial function
  const double c_local[2][2] = {{-0.5, 0.5}, {-0.5, 0.5}};

  for (Index e = 0; e < elements; ++e) {
    const Index dofs[2] = {e, e + 1};
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        fem.mass(dofs[a], dofs[b]) += m_local[a][b];
        fem.stiffness(dofs[a], dofs[b]) += s_local[a][b];
        fem.advection(dofs[a], dofs[b]) += c_local[a][b];
      }
    }
    fem.deriv(e, e) = -1.0 / h;
    fem.deriv(e, e + 1) = 1.0 / h;
    fem.element_gram(e, e) = h;
  }
  return fem;
}

Matrix block_diagonal(const Matrix& block, Index copies) {
  Matrix out = Matrix::Zero(block.rows() * copies, block.cols() * copies);
  for (Index k = 0; k < copies; ++k) {
    out.block(k * block.rows(), k * block.cols(), block.rows(), block.cols()) = block;
  }
  return out;
}

}  // namespace podkit
