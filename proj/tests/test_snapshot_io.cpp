#include "doctest.h"

#include <fstream>
#include <random>

#include "json.hpp"
#include "podkit/csv.hpp"
#include "podkit/errors.hpp"
#include "podkit/fem_1d.hpp"
#include "podkit/snapshot_io.hpp"
#include "support.hpp"

using namespace podkit;
using testing_support::TempDir;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no podkit::Error thrown");
  return ErrorCode::InvalidArgument;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("discrete and continuous constructors validate weights and grids") {
  const Matrix w = Matrix::Ones(3, 2);
  CHECK(code_of([&] { SnapshotSet::discrete(w, Vector::Zero(2)); }) == ErrorCode::WeightNonPositive);
  CHECK(code_of([&] { SnapshotSet::discrete(w, Vector::Ones(3)); }) == ErrorCode::DimensionMismatch);
  Vector bad(3);
  bad << 0.0, 0.5, 0.5;
  CHECK(code_of([&] { SnapshotSet::continuous(w, bad); }) == ErrorCode::NonMonotoneGrid);
  Vector grid(3);
  grid << 0.0, 0.25, 1.0;
  const SnapshotSet c = SnapshotSet::continuous(w, grid);
  CHECK(c.kind() == SnapshotKind::continuous);
  CHECK(c.weights()[0] == doctest::Approx(0.25));
  CHECK(c.weights()[1] == doctest::Approx(0.75));
}

TEST_CASE("from_trajectory averages neighbouring states") {
  Vector grid(3);
  grid << 0.0, 1.0, 3.0;
  Matrix states(2, 3);
  states << 0, 2, 4, 1, 1, 5;
  const SnapshotSet s = from_trajectory(grid, states);
  REQUIRE(s.count() == 2);
  CHECK(s.data()(0, 0) == 1.0);
  CHECK(s.data()(0, 1) == 3.0);
  CHECK(s.data()(1, 1) == 3.0);
  CHECK(s.weights()[1] == 2.0);
}

TEST_CASE("concatenate keeps columns and weights in order") {
  const SnapshotSet a = SnapshotSet::discrete(Matrix::Ones(2, 1), Vector::Constant(1, 0.5));
  const SnapshotSet b = SnapshotSet::discrete(Matrix::Zero(2, 2), Vector::Constant(2, 2.0));
  const SnapshotSet c = concatenate({a, b});
  CHECK(c.count() == 3);
  CHECK(c.weights()[0] == 0.5);
  CHECK(c.weights()[2] == 2.0);
  CHECK(c.data()(0, 0) == 1.0);
}

TEST_CASE("save and load round-trip bit for bit") {
  TempDir dir("io");
  std::mt19937_64 rng(1);
  Matrix data = testing_support::gaussian(6, 4, rng);
  data(0, 0) = 1.0 / 3.0;
  data(1, 1) = -1e-300;
  Vector grid(5);
  grid << 0.0, 0.1, 0.35, 0.7, 1.0 / 3.0 + 1.0;
  const SnapshotSet set = SnapshotSet::continuous(data, grid);
  SaveOptions opt;
  opt.gram = {{"fem_mass", 6}};
  opt.extra = {{"note", "kept"}};
  save(set, dir / "s.json", opt);
  CHECK(std::filesystem::exists(dir / "s.data.csv"));
  const LoadedSnapshots back = load(dir / "s.json");
  CHECK(back.set.data() == set.data());
  CHECK(back.set.weights() == set.weights());
  CHECK(*back.set.grid() == grid);
  REQUIRE(back.space);
  CHECK(back.space->gram() == assemble_fem_1d(6).mass);
  CHECK(back.manifest.at("note") == "kept");

  const SnapshotSet disc = SnapshotSet::discrete(data, Vector::LinSpaced(4, 0.2, 1.1));
  save(disc, dir / "d.json");
  const LoadedSnapshots back2 = load(dir / "d.json");
  CHECK(back2.set.kind() == SnapshotKind::discrete);
  CHECK(back2.set.weights() == disc.weights());
  CHECK(back2.space->is_identity());
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.2250738585072014e-308, 5e-324}) {
    CHECK(std::strtod(csv::format_double(v).c_str(), nullptr) == v);
  }
}

TEST_CASE("corrupted manifests map to distinct input errors") {
  TempDir dir("bad");
  save(SnapshotSet::discrete(Matrix::Ones(2, 2), Vector::Ones(2)), dir / "ok.json");
  const auto m = nlohmann::json::parse(csv::read_file(dir / "ok.json"));

  write_text(dir / "garbage.json", "{ not json");
  CHECK(code_of([&] { load(dir / "garbage.json"); }) == ErrorCode::MalformedManifest);

  auto missing_key = m;
  missing_key.erase("count");
  write_text(dir / "nokey.json", missing_key.dump());
  CHECK(code_of([&] { load(dir / "nokey.json"); }) == ErrorCode::MalformedManifest);

  auto missing_data = m;
  missing_data["data"] = "nowhere.csv";
  write_text(dir / "nodata.json", missing_data.dump());
  CHECK(code_of([&] { load(dir / "nodata.json"); }) == ErrorCode::MissingDataFile);

  auto neg = m;
  neg["weights"] = {1.0, -1.0};
  write_text(dir / "neg.json", neg.dump());
  CHECK(code_of([&] { load(dir / "neg.json"); }) == ErrorCode::WeightNonPositive);

  auto cont = m;
  cont["kind"] = "continuous";
  cont["grid"] = {0.0, 1.0, 0.5};
  write_text(dir / "grid.json", cont.dump());
  CHECK(code_of([&] { load(dir / "grid.json"); }) == ErrorCode::NonMonotoneGrid);

  auto shape = m;
  shape["dim"] = 3;
  write_text(dir / "shape.json", shape.dump());
  CHECK(code_of([&] { load(dir / "shape.json"); }) == ErrorCode::MalformedManifest);

  auto gram = m;
  gram["gram"] = {{"fem_mass", 3}};
  write_text(dir / "gram.json", gram.dump());
  CHECK(code_of([&] { load(dir / "gram.json"); }) == ErrorCode::MalformedManifest);
}

TEST_CASE("gram specs resolve generators, blocks and CSV paths") {
  TempDir dir("gram");
  const Fem1d fem = assemble_fem_1d(4);
  CHECK(gram_from_spec(nlohmann::json{{"fem_h1", 4}}, 4, dir.path()).gram() == fem.mass + fem.stiffness);
  CHECK(gram_from_spec(nlohmann::json{{"fem_mass", 4}, {"blocks", 2}}, 8, dir.path()).gram() ==
        block_diagonal(fem.mass, 2));
  CHECK(gram_from_spec(nlohmann::json{{"element_l2", 4}}, 3, dir.path()).gram() == fem.element_gram);
  csv::write_matrix(dir / "g.csv", 2.0 * Matrix::Identity(3, 3));
  CHECK(gram_from_spec("g.csv", 3, dir.path()).gram()(1, 1) == 2.0);
  CHECK(code_of([&] { gram_from_spec(nlohmann::json{{"fem_magic", 4}}, 4, dir.path()); }) ==
        ErrorCode::MalformedManifest);
}
