#include "slepian/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

#include "slepian/errors.hpp"
#include "slepian/quadrature.hpp"

namespace slepian::io {
namespace {

static_assert(std::endian::native == std::endian::little, "binary matrix I/O assumes a little-endian host");

void put_u32(std::string& out, std::uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.append(b, 4);
}

void put_f64(std::string& out, double v) {
  char b[8];
  std::memcpy(b, &v, 8);
  out.append(b, 8);
}

std::string header(Eigen::Index rows, Eigen::Index cols, std::uint8_t tag) {
  if (rows > 0xFFFFFFFFll || cols > 0xFFFFFFFFll) throw ValidationError("matrix too large for the binary format");
  std::string out(kMatrixMagic, sizeof kMatrixMagic);
  put_u32(out, static_cast<std::uint32_t>(rows));
  put_u32(out, static_cast<std::uint32_t>(cols));
  out.push_back(static_cast<char>(tag));
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, const std::string& field) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf" || t == "infinity") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw ValidationError("region descriptor: " + field + " is not a number: '" + t + "'");
  return v;
}

}  // namespace

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    os.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!os) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  std::string out = header(m.rows(), m.cols(), 0);
  out.reserve(out.size() + static_cast<std::size_t>(m.size()) * 8);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) put_f64(out, m(i, j));
  write_atomic(path, out);
}

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXcd& m) {
  std::string out = header(m.rows(), m.cols(), 1);
  out.reserve(out.size() + static_cast<std::size_t>(m.size()) * 16);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      put_f64(out, m(i, j).real());
      put_f64(out, m(i, j).imag());
    }
  write_atomic(path, out);
}

MatrixFile read_matrix(const std::filesystem::path& path) {
  const std::string data = read_text(path);
  constexpr std::size_t head = sizeof kMatrixMagic + 9;
  if (data.size() < head || std::memcmp(data.data(), kMatrixMagic, sizeof kMatrixMagic) != 0)
    throw ValidationError(path.string() + ": not a SLEPB001 matrix file");
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::memcpy(&rows, data.data() + 8, 4);
  std::memcpy(&cols, data.data() + 12, 4);
  const auto tag = static_cast<std::uint8_t>(data[16]);
  if (tag > 1) throw ValidationError(path.string() + ": unknown scalar tag");
  const std::size_t per = tag == 0 ? 8 : 16;
  if (data.size() != head + static_cast<std::size_t>(rows) * cols * per)
    throw ValidationError(path.string() + ": payload size does not match the header");
  MatrixFile f;
  f.complex = tag == 1;
  f.values.resize(rows, cols);
  const char* p = data.data() + head;
  for (std::uint32_t i = 0; i < rows; ++i)
    for (std::uint32_t j = 0; j < cols; ++j) {
      double re = 0.0;
      double im = 0.0;
      std::memcpy(&re, p, 8);
      p += 8;
      if (f.complex) {
        std::memcpy(&im, p, 8);
        p += 8;
      }
      f.values(i, j) = {re, im};
    }
  return f;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

std::string CsvTable::str() const {
  std::string out;
  auto row_out = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += row[i];
    }
    out += '\n';
  };
  row_out(header);
  for (const auto& r : rows) row_out(r);
  return out;
}

AngularMask read_mask_pixels(const std::filesystem::path& path, int grid_band_limit_hint) {
  std::istringstream is(read_text(path));
  std::string line;
  std::vector<MaskPixel> pixels;
  bool weighted = false;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto c = line.find('#'); c != std::string::npos) line.resize(c);
    if (trim(line).empty()) continue;
    std::istringstream ls(line);
    std::vector<double> v;
    double x = 0.0;
    while (ls >> x) v.push_back(x);
    if (!ls.eof() || (v.size() != 3 && v.size() != 4))
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected 'theta phi indicator [weight]'");
    if (v[2] != 0.0 && v[2] != 1.0)
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": indicator must be 0 or 1");
    if (!pixels.empty() && weighted != (v.size() == 4))
      throw ValidationError(path.string() + ": mixed weighted and unweighted lines");
    weighted = v.size() == 4;
    pixels.push_back({v[0], v[1], weighted ? v[3] : 0.0, v[2] == 1.0});
  }
  if (pixels.empty()) throw ValidationError(path.string() + ": no pixels");
  if (weighted) {
    if (grid_band_limit_hint < 1)
      throw ValidationError(path.string() + ": weighted pixel lists need an explicit grid band-limit");
    return AngularMask::from_pixels(grid_band_limit_hint, std::move(pixels));
  }
  // Unweighted: must be the standard grid of some L_grid, row-major.
  const auto n = pixels.size();
  int lg = 1;
  while (static_cast<std::size_t>(lg) * (2 * lg - 1) < n) ++lg;
  if (static_cast<std::size_t>(lg) * (2 * lg - 1) != n)
    throw ValidationError(path.string() + ": " + std::to_string(n) +
                          " pixels do not form an L x (2L-1) grid; add a weight column");
  std::vector<std::uint8_t> ind(n);
  for (std::size_t i = 0; i < n; ++i) ind[i] = pixels[i].inside ? 1 : 0;
  AngularMask mask = AngularMask::from_indicator(lg, ind);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = mask.pixels()[i];
    if (std::abs(a.theta - pixels[i].theta) > 1e-8 || std::abs(a.phi - pixels[i].phi) > 1e-8)
      throw ValidationError(path.string() + ": pixel " + std::to_string(i) +
                            " is not on the Gauss-Legendre grid; add a weight column");
  }
  return mask;
}

Region parse_region(const std::string& descriptor, int mask_grid_band_limit) {
  const std::string d = trim(descriptor);
  if (d == "fullball") return Region::full_ball();
  const auto colon = d.find(':');
  if (colon == std::string::npos)
    throw ValidationError("region descriptor: expected product:..., mask:... or fullball, got '" + d + "'");
  const std::string kind = d.substr(0, colon);
  const std::string rest = d.substr(colon + 1);
  if (kind == "product") {
    const auto f = split(rest, ',');
    if (f.size() != 4) throw ValidationError("region descriptor: product needs R1,R2,theta1,theta2");
    const double r1 = parse_number(f[0], "R1");
    const double r2 = parse_number(f[1], "R2");
    const double t1 = parse_number(f[2], "theta1");
    const double t2 = parse_number(f[3], "theta2");
    if (!(r2 > r1)) throw ValidationError("region descriptor: R2 must be greater than R1");
    if (!(t2 > t1)) throw ValidationError("region descriptor: theta2 must be greater than theta1");
    return Region::product(r1, r2, t1, t2);
  }
  if (kind == "mask") {
    const auto c2 = rest.rfind(',');
    const auto c1 = c2 == std::string::npos ? std::string::npos : rest.rfind(',', c2 - 1);
    if (c1 == std::string::npos) throw ValidationError("region descriptor: mask needs <path>,R1,R2");
    const double r1 = parse_number(rest.substr(c1 + 1, c2 - c1 - 1), "R1");
    const double r2 = parse_number(rest.substr(c2 + 1), "R2");
    if (!(r2 > r1)) throw ValidationError("region descriptor: R2 must be greater than R1");
    return Region::masked(read_mask_pixels(trim(rest.substr(0, c1)), mask_grid_band_limit), r1, r2);
  }
  throw ValidationError("region descriptor: unknown region kind '" + kind + "'");
}

}  // namespace slepian::io
