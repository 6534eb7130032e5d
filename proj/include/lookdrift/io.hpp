#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lookdrift/sample_batch.hpp"

namespace lookdrift {

/// Writes `bytes` to `<path>.tmp` then renames over `path`, so readers never
/// see a partial file. Throws IoError with the path on failure.
void atomic_write(const std::filesystem::path& path, std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

/// Header x0,x1,...; one row per point; values printed with %.17g.
std::string to_csv(const Matrix& points);

/// Parses the format written by to_csv. A header-only file yields 0 rows.
Matrix parse_csv(std::string_view text, const std::string& source);

/// Shortest-roundtrip-safe text for a double (%.17g).
std::string format_double(double v);

}  // namespace lookdrift
