#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "podkit/gram_space.hpp"

namespace podkit::csv {

/// 17 significant digits: parses back to the identical double.
std::string format_double(double value);

/// One matrix row per line, comma separated, no header.
std::string matrix_to_csv(const Matrix& m);
Matrix matrix_from_csv(std::string_view text, const std::string& origin);

void write_matrix(const std::filesystem::path& path, const Matrix& m);
/// Throws MissingDataFile when the file cannot be opened.
Matrix read_matrix(const std::filesystem::path& path);

/// Write to a sibling temporary file, then rename over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace podkit::csv
