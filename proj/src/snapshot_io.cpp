#include "podkit/snapshot_io.hpp"

#include "podkit/csv.hpp"
#include "podkit/errors.hpp"
#include "podkit/fem_1d.hpp"

namespace podkit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void check_weights(const Vector& weights) {
  for (Index j = 0; j < weights.size(); ++j) {
    if (!(weights[j] > 0.0)) {
      throw Error(ErrorCode::WeightNonPositive,
                  "weight " + std::to_string(j) + " = " + csv::format_double(weights[j]));
    }
  }
}

void check_grid(const Vector& grid) {
  for (Index k = 0; k + 1 < grid.size(); ++k) {
    if (!(grid[k + 1] > grid[k])) {
      throw Error(ErrorCode::NonMonotoneGrid, "grid[" + std::to_string(k + 1) +
                                                  "] = " + csv::format_double(grid[k + 1]) +
                                                  " does not exceed grid[" + std::to_string(k) + "]");
    }
  }
}

Vector grid_weights(const Vector& grid) {
  Vector w(grid.size() - 1);
  for (Index k = 0; k < w.size(); ++k) w[k] = grid[k + 1] - grid[k];
  return w;
}

Vector vector_from_json(const json& j, const char* key) {
  if (!j.is_array()) throw Error(ErrorCode::MalformedManifest, std::string("'") + key + "' must be an array");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw Error(ErrorCode::MalformedManifest, std::string("'") + key + "' entries must be numbers");
    }
    v[static_cast<Index>(i)] = j[i].get<double>();
  }
  return v;
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

}  // namespace

SnapshotSet::SnapshotSet(Matrix data, Vector weights, SnapshotKind kind, std::optional<Vector> grid)
    : data_(std::move(data)), weights_(std::move(weights)), kind_(kind), grid_(std::move(grid)) {}

SnapshotSet SnapshotSet::discrete(Matrix data, Vector weights) {
  if (data.cols() < 1 || data.rows() < 1) {
    throw Error(ErrorCode::DimensionMismatch, "snapshot set needs at least one non-empty column");
  }
  if (weights.size() != data.cols()) {
    throw Error(ErrorCode::DimensionMismatch, std::to_string(weights.size()) + " weights for " +
                                                  std::to_string(data.cols()) + " snapshots");
  }
  check_weights(weights);
  return SnapshotSet(std::move(data), std::move(weights), SnapshotKind::discrete, std::nullopt);
}

SnapshotSet SnapshotSet::continuous(Matrix data, Vector grid) {
  if (data.cols() < 1 || data.rows() < 1) {
    throw Error(ErrorCode::DimensionMismatch, "snapshot set needs at least one non-empty column");
  }
  if (grid.size() != data.cols() + 1) {
    throw Error(ErrorCode::DimensionMismatch, "continuous set with " + std::to_string(data.cols()) +
                                                  " snapshots needs " +
                                                  std::to_string(data.cols() + 1) + " grid points");
  }
  check_grid(grid);
  Vector weights = grid_weights(grid);
  check_weights(weights);
  return SnapshotSet(std::move(data), std::move(weights), SnapshotKind::continuous, std::move(grid));
}

SnapshotSet SnapshotSet::with_data(Matrix data) const {
  if (data.cols() != count()) {
    throw Error(ErrorCode::DimensionMismatch, "with_data: column count changed");
  }
  return SnapshotSet(std::move(data), weights_, kind_, grid_);
}

SnapshotSet from_trajectory(const Vector& grid, const Matrix& states) {
  if (grid.size() < 2) throw Error(ErrorCode::DimensionMismatch, "trajectory needs >= 2 time points");
  if (states.cols() != grid.size()) {
    throw Error(ErrorCode::DimensionMismatch, std::to_string(states.cols()) + " states for " +
                                                  std::to_string(grid.size()) + " time points");
  }
  check_grid(grid);
  const Index s = grid.size() - 1;
  Matrix mid(states.rows(), s);
  for (Index k = 0; k < s; ++k) mid.col(k) = 0.5 * (states.col(k) + states.col(k + 1));
  return SnapshotSet::continuous(std::move(mid), grid);
}

SnapshotSet concatenate(const std::vector<SnapshotSet>& sets) {
  if (sets.empty()) throw Error(ErrorCode::DimensionMismatch, "nothing to concatenate");
  const Index dim = sets.front().space_dim();
  Index total = 0;
  for (const auto& s : sets) {
    if (s.space_dim() != dim) throw Error(ErrorCode::DimensionMismatch, "concatenate: dimensions differ");
    total += s.count();
  }
  Matrix data(dim, total);
  Vector weights(total);
  Index at = 0;
  for (const auto& s : sets) {
    data.middleCols(at, s.count()) = s.data();
    weights.segment(at, s.count()) = s.weights();
    at += s.count();
  }
  return SnapshotSet::discrete(std::move(data), std::move(weights));
}

GramSpace gram_from_spec(const json& spec, Index expected_dim, const fs::path& base_dir) {
  auto checked = [&](Matrix g, std::string label) {
    if (g.rows() != expected_dim) {
      throw Error(ErrorCode::MalformedManifest, "gram '" + label + "' has dimension " +
                                                    std::to_string(g.rows()) + ", manifest declares " +
                                                    std::to_string(expected_dim));
    }
    return GramSpace::make(std::move(g), std::move(label));
  };

  if (spec.is_string()) {
    const auto token = spec.get<std::string>();
    if (token == "identity") return GramSpace::identity(expected_dim);
    fs::path p = token;
    if (p.is_relative()) p = base_dir / p;
    return checked(csv::read_matrix(p), p.filename().string());
  }
  if (!spec.is_object()) throw Error(ErrorCode::MalformedManifest, "unrecognized gram description");

  Index blocks = 1;
  if (spec.contains("blocks")) blocks = spec.at("blocks").get<Index>();
  if (blocks < 1) throw Error(ErrorCode::MalformedManifest, "'blocks' must be >= 1");

  for (const char* key : {"fem_mass", "fem_stiffness", "fem_h1", "element_l2"}) {
    if (!spec.contains(key)) continue;
    const Index nodes = spec.at(key).get<Index>();
    const Fem1d fem = assemble_fem_1d(nodes);
    const std::string name = key;
    Matrix block;
    if (name == "fem_mass") block = fem.mass;
    else if (name == "fem_stiffness") block = fem.stiffness;
    else if (name == "fem_h1") block = fem.mass + fem.stiffness;
    else block = fem.element_gram;
    return checked(block_diagonal(block, blocks), name + "(" + std::to_string(nodes) + ")");
  }
  throw Error(ErrorCode::MalformedManifest, "unrecognized gram generator " + spec.dump());
}

void save(const SnapshotSet& set, const fs::path& manifest_path, const SaveOptions& options) {
  fs::path data_path = manifest_path;
  data_path.replace_extension(".data.csv");
  csv::write_matrix(data_path, set.data());

  json m = json::object();
  m["dim"] = set.space_dim();
  m["count"] = set.count();
  if (set.kind() == SnapshotKind::continuous) {
    m["kind"] = "continuous";
    m["grid"] = vector_to_json(*set.grid());
  } else {
    m["kind"] = "discrete";
    m["weights"] = vector_to_json(set.weights());
  }
  m["gram"] = options.gram;
  m["data"] = data_path.filename().string();
  for (const auto& [key, value] : options.extra.items()) m[key] = value;
  // nlohmann's double formatting round-trips (shortest repr, >= 17 significant digits when needed)
  csv::write_file_atomic(manifest_path, m.dump(2) + "\n");
}

LoadedSnapshots load(const fs::path& manifest_path) {
  json m;
  try {
    m = json::parse(csv::read_file(manifest_path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedManifest, manifest_path.string() + ": " + e.what());
  }
  if (!m.is_object()) throw Error(ErrorCode::MalformedManifest, "manifest must be a JSON object");
  for (const char* key : {"dim", "count", "kind", "data"}) {
    if (!m.contains(key)) {
      throw Error(ErrorCode::MalformedManifest, std::string("manifest missing '") + key + "'");
    }
  }
  const fs::path base = manifest_path.parent_path();
  try {
    const Index dim = m.at("dim").get<Index>();
    const Index count = m.at("count").get<Index>();
    const auto kind = m.at("kind").get<std::string>();

    fs::path data_path = m.at("data").get<std::string>();
    if (data_path.is_relative()) data_path = base / data_path;
    if (!fs::exists(data_path)) throw Error(ErrorCode::MissingDataFile, data_path.string());
    Matrix data = csv::read_matrix(data_path);
    if (data.rows() != dim || data.cols() != count) {
      throw Error(ErrorCode::MalformedManifest,
                  "data file is " + std::to_string(data.rows()) + "x" + std::to_string(data.cols()) +
                      ", manifest declares " + std::to_string(dim) + "x" + std::to_string(count));
    }

    std::optional<SnapshotSet> set;
    if (kind == "continuous") {
      if (!m.contains("grid")) throw Error(ErrorCode::MalformedManifest, "continuous manifest needs 'grid'");
      Vector grid = vector_from_json(m.at("grid"), "grid");
      if (m.contains("weights")) {
        Vector w = vector_from_json(m.at("weights"), "weights");
        check_weights(w);
      }
      set = SnapshotSet::continuous(std::move(data), std::move(grid));
    } else if (kind == "discrete") {
      if (!m.contains("weights")) throw Error(ErrorCode::MalformedManifest, "discrete manifest needs 'weights'");
      set = SnapshotSet::discrete(std::move(data), vector_from_json(m.at("weights"), "weights"));
    } else {
      throw Error(ErrorCode::MalformedManifest, "unknown kind '" + kind + "'");
    }

    std::optional<GramSpace> space;
    if (m.contains("gram")) space = gram_from_spec(m.at("gram"), dim, base);
    return LoadedSnapshots{std::move(*set), std::move(space), std::move(m), base};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedManifest, manifest_path.string() + ": " + e.what());
  }
}

}  // namespace podkit
