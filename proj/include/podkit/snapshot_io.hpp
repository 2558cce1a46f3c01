#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "json.hpp"
#include "podkit/gram_space.hpp"

namespace podkit {

enum class SnapshotKind { discrete, continuous };

/// Snapshot coefficient vectors (columns of data) with positive weights.
///
/// The continuous kind carries the s+1 point time grid the weights came from;
/// weight k is grid[k+1] - grid[k].
class SnapshotSet {
 public:
  static SnapshotSet discrete(Matrix data, Vector weights);
  static SnapshotSet continuous(Matrix data, Vector grid);

  Index space_dim() const { return data_.rows(); }
  Index count() const { return data_.cols(); }
  const Matrix& data() const { return data_; }
  const Vector& weights() const { return weights_; }
  SnapshotKind kind() const { return kind_; }
  const std::optional<Vector>& grid() const { return grid_; }

  /// Same kind, grid and weights, new columns (row count may differ).
  SnapshotSet with_data(Matrix data) const;

 private:
  SnapshotSet(Matrix data, Vector weights, SnapshotKind kind, std::optional<Vector> grid);

  Matrix data_;
  Vector weights_;
  SnapshotKind kind_;
  std::optional<Vector> grid_;
};

/// Piecewise-constant-in-time representation of a sampled trajectory: column k
/// is the average of states k and k+1, weighted by the interval length.
SnapshotSet from_trajectory(const Vector& grid, const Matrix& states);

/// Several trajectories flattened into one discrete set (columns and weights
/// concatenated in order).
SnapshotSet concatenate(const std::vector<SnapshotSet>& sets);

/// Resolve a gram description from a manifest:
///   "identity" | "<path to dense CSV>" | {"fem_mass": n} | {"fem_stiffness": n}
///   | {"fem_h1": n} | {"element_l2": n}
/// Generator objects accept an optional "blocks": k for block-diagonal copies.
GramSpace gram_from_spec(const nlohmann::json& spec, Index expected_dim,
                         const std::filesystem::path& base_dir);

struct LoadedSnapshots {
  SnapshotSet set;
  std::optional<GramSpace> space;  // absent when the manifest has no "gram"
  nlohmann::json manifest;         // the parsed manifest, including extra keys
  std::filesystem::path base_dir;
};

struct SaveOptions {
  nlohmann::json gram = "identity";
  /// Extra manifest keys (for example "map" or "form"), written verbatim.
  nlohmann::json extra = nlohmann::json::object();
};

/// Writes <manifest> and <manifest stem>.data.csv next to it.
void save(const SnapshotSet& set, const std::filesystem::path& manifest_path,
          const SaveOptions& options = {});
LoadedSnapshots load(const std::filesystem::path& manifest_path);

}  // namespace podkit
