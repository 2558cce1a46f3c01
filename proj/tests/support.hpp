#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "podkit/gram_space.hpp"

namespace testing_support {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("podkit_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline podkit::Matrix gaussian(podkit::Index rows, podkit::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  podkit::Matrix m(rows, cols);
  for (podkit::Index j = 0; j < cols; ++j)
    for (podkit::Index i = 0; i < rows; ++i) m(i, j) = n(rng);
  return m;
}

inline podkit::Matrix random_spd(podkit::Index dim, std::mt19937_64& rng) {
  const podkit::Matrix b = gaussian(dim, dim, rng);
  return (b.transpose() * b + static_cast<double>(dim) * podkit::Matrix::Identity(dim, dim)) / static_cast<double>(dim);
}

inline double rel(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s > 0.0 ? std::abs(a - b) / s : 0.0;
}

}  // namespace testing_support
