#pragma once

#include "aclab/curve.hpp"
#include "aclab/grid.hpp"

#include <filesystem>
#include <string>

namespace aclab {

/// 17 significant digits, enough to read back the same double.
std::string format_double(double v);

/// Binary field dump: a text header "aclab-field 1 n1 n2 R h side\n" followed by
/// side * side little-endian doubles in grid index order.
void write_field(const std::filesystem::path& path, const ScalarField2D& field);
/// Throws InvalidArgument on a malformed or truncated file.
ScalarField2D read_field(const std::filesystem::path& path);

/// CSV with a "# n1=.. n2=.. spacing=.. orientation=.." line and columns s,x,y,theta.
void write_curve_csv(const std::filesystem::path& path, const GeneratingCurve& curve);
GeneratingCurve read_curve_csv(const std::filesystem::path& path);

/// Lower-case hex SHA-256 of a file's bytes or of a string.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_text(const std::string& text);

}  // namespace aclab
