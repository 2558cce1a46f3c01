#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "podkit/gram_space.hpp"
#include "podkit/linear_map.hpp"
#include "podkit/snapshot_io.hpp"

namespace podkit {

enum class EmbeddingExample { example1, example2, example3 };

/// Coefficients of the Example 3 form a(u, v) = (u', v') + kappa (u, v) + beta (u', v):
/// an advection-diffusion-reaction form on H1 that is elliptic but not symmetric.
struct RitzFormParams {
  double kappa = 4.0;
  double beta = 0.5;
};

struct EmbeddingInstance {
  GramSpace space_X;
  GramSpace space_Y;
  LinearMap map;
  std::optional<Matrix> form;  // Example 3 only, on Y
};

/// Example 1: X = L2 (mass), Y = H1 (mass + stiffness), L = identity coordinates.
/// Example 2: the roles reversed. Example 3: Example 1 plus a Ritz form.
EmbeddingInstance make_embedding_instance(Index nodes, EmbeddingExample which, RitzFormParams params = {});
EmbeddingExample parse_example(const std::string& name);

/// Smooth space-time field sampled on the FEM nodes and turned into a
/// continuous snapshot set; the seed perturbs amplitudes and phases.
SnapshotSet synthetic_trajectory(Index nodes, std::uint64_t seed, Index intervals = 60, double t_end = 2.0);

enum class MapClass {
  invertible,    // square, condition <= 1e2
  injective,     // tall rectangular, full column rank
  rank_deficient,// square with a nontrivial kernel
  wide,          // short rectangular
};

struct RandomInstance {
  SnapshotSet set;
  GramSpace space_X;
  GramSpace space_Y;
  LinearMap map;
};

/// Reproducible from (dim, s, seed, map class). Grams are (B^T B + dim I) / dim
/// for Gaussian B, weights uniform in [0.2, 1.5], and the data has a geometric
/// spectrum so that tails span several orders of magnitude.
RandomInstance random_instance(Index dim, Index s, std::uint64_t seed, MapClass map_class);
RandomInstance random_instance(Index dim, Index s, std::uint64_t seed, bool invertible);

/// W = [[1, 1], [0, 1]], Gamma = I, G = I, L = diag(1, 2).
RandomInstance gr2_instance();

}  // namespace podkit
