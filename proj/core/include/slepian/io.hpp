#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "slepian/regions.hpp"

namespace slepian::io {

/// Binary matrix file: "SLEPB001", u32 rows, u32 cols, u8 tag (0 real f64,
/// 1 complex interleaved f64), then the row-major little-endian payload.
inline constexpr char kMatrixMagic[8] = {'S', 'L', 'E', 'P', 'B', '0', '0', '1'};

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);
void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXcd& m);

struct MatrixFile {
  bool complex = false;
  Eigen::MatrixXcd values;
};
MatrixFile read_matrix(const std::filesystem::path& path);

/// Writes `contents` to a temporary sibling and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_text(const std::filesystem::path& path);

/// Shortest decimal text that round-trips a double (17 significant digits).
std::string format_double(double x);

/// CSV table with a header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string str() const;
};

/// Mask pixels from text lines "theta phi indicator [weight]". '#' starts a
/// comment. Without a weight column the file must list exactly the
/// Gauss-Legendre x uniform-phi grid of some band-limit, in row-major order.
AngularMask read_mask_pixels(const std::filesystem::path& path, int grid_band_limit_hint = 0);

/// Region from `product:R1,R2,theta1,theta2`, `mask:<path>,R1,R2` or
/// `fullball` (angles in radians). Weighted mask files take their grid
/// band-limit from `mask_grid_band_limit`.
Region parse_region(const std::string& descriptor, int mask_grid_band_limit = 0);

}  // namespace slepian::io
