#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace slepian {

/// Point of the ball in spherical coordinates. theta is colatitude in
/// [0, pi], phi is azimuth in [0, 2 pi).
struct BallPoint {
  double r = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

/// One quadrature pixel of an angular mask.
struct MaskPixel {
  double theta = 0.0;
  double phi = 0.0;
  double weight = 0.0;
  bool inside = false;
};

/// Colatitude/longitude rectangle [theta_min, theta_max] x [phi_min, phi_max].
struct AngularRectangle {
  double theta_min = 0.0;
  double theta_max = 0.0;
  double phi_min = 0.0;
  double phi_max = 0.0;
};

/// Binary angular region stored on a quadrature pixel grid.
///
/// Every grid integrates products Y_{lm} Y^*_{l'm'} with l, l' < grid_band_limit()
/// exactly, so sums over inside pixels are exact angular integrals whenever
/// the region's boundary coincides with cell boundaries of the grid.
class AngularMask {
 public:
  using Predicate = std::function<bool(double theta, double phi)>;

  /// Gauss-Legendre (in cos theta) x uniform-phi grid with L_grid x (2 L_grid - 1)
  /// pixels; the indicator is sampled at pixel centres.
  static AngularMask gauss_grid(int grid_band_limit, const Predicate& inside);

  /// Same grid as gauss_grid, indicator given row-major (theta outer, phi inner).
  static AngularMask from_indicator(int grid_band_limit, const std::vector<std::uint8_t>& indicator);

  /// Union of lat/long rectangles on a composite grid whose cells follow the
  /// rectangle edges, so the mask integrals are exact to rounding.
  static AngularMask rectangles(int grid_band_limit, const std::vector<AngularRectangle>& parts);

  /// Arbitrary pixels with explicit weights. The weights must sum to 4 pi.
  static AngularMask from_pixels(int grid_band_limit, std::vector<MaskPixel> pixels);

  /// The full sphere.
  static AngularMask full_sphere(int grid_band_limit);

  int grid_band_limit() const { return grid_band_limit_; }
  const std::vector<MaskPixel>& pixels() const { return pixels_; }

  /// Sum of the weights of inside pixels (steradians).
  double solid_angle() const;
  /// Nearest-pixel indicator lookup.
  bool contains(double theta, double phi) const;

 private:
  AngularMask(int grid_band_limit, std::vector<MaskPixel> pixels);

  int grid_band_limit_ = 0;
  std::vector<MaskPixel> pixels_;
};

/// {R1 <= r <= R2, theta1 <= theta <= theta2}. R2 may be +inf.
struct ProductSymmetric {
  double r_min = 0.0;
  double r_max = 1.0;
  double theta_min = 0.0;
  double theta_max = 0.0;
};

/// Axisymmetric region described by an (r, theta) indicator sampled on a
/// tensor quadrature grid: composite Gauss-Legendre in r over [r_lo, r_hi]
/// and Gauss-Legendre in cos(theta).
struct AzimuthallySymmetric {
  using Predicate = std::function<bool(double r, double theta)>;

  std::vector<double> r_nodes;
  std::vector<double> r_weights;      ///< weights for int ... r^2 dr (r^2 folded in)
  std::vector<double> theta_nodes;
  std::vector<double> theta_weights;  ///< weights for int ... sin(theta) dtheta
  std::vector<std::uint8_t> indicator;  ///< row-major, r outer
  Predicate predicate;                 ///< exact indicator when available

  /// Samples `inside` on `radial_panels` x `nodes_per_panel` radial nodes over
  /// [r_lo, r_hi] and `theta_nodes` colatitude nodes.
  static AzimuthallySymmetric sample(const Predicate& inside, double r_lo, double r_hi, int radial_panels,
                                     int nodes_per_panel, int theta_nodes);

  bool inside_node(std::size_t ir, std::size_t it) const { return indicator[ir * theta_nodes.size() + it] != 0; }
};

/// Arbitrary angular region times a radial interval.
struct ProductMask {
  AngularMask mask;
  double r_min = 0.0;
  double r_max = 1.0;
};

/// Union of pairwise disjoint ProductSymmetric pieces (shared boundaries allowed).
struct DisjointUnion {
  std::vector<ProductSymmetric> parts;
};

/// Rotation taking the z-axis to the direction (theta0, phi0): rotate by
/// theta0 about y, then by phi0 about z.
struct Orientation {
  double theta0 = 0.0;
  double phi0 = 0.0;
};

class Region {
 public:
  using Shape = std::variant<ProductSymmetric, AzimuthallySymmetric, ProductMask, DisjointUnion>;

  static Region product(double r_min, double r_max, double theta_min, double theta_max);
  static Region full_ball(double r_max = std::numeric_limits<double>::infinity());
  static Region axisymmetric(AzimuthallySymmetric shape);
  static Region masked(AngularMask mask, double r_min, double r_max);
  static Region union_of(std::vector<ProductSymmetric> parts);

  /// Copy rotated to (theta0, phi0). Only axisymmetric shapes can be oriented.
  Region oriented(double theta0, double phi0) const;
  /// Copy without orientation.
  Region unoriented() const;

  const Shape& shape() const { return shape_; }
  const std::optional<Orientation>& orientation() const { return orientation_; }

  template <class T>
  const T* as() const { return std::get_if<T>(&shape_); }

  bool radially_independent() const;
  bool is_axisymmetric() const;
  std::string describe() const;

 private:
  explicit Region(Shape s) : shape_(std::move(s)) {}
  Shape shape_;
  std::optional<Orientation> orientation_;
};

/// Closed-form band area 2 pi (cos theta1 - cos theta2).
double solid_angle_band(double theta_min, double theta_max);
double solid_angle(const AngularMask& mask);
/// Angular area of a radially independent region; ValidationError otherwise.
double solid_angle(const Region& region);

double volume(const Region& region);

/// Closed-set membership; masks use nearest-pixel lookup.
bool contains(const Region& region, const BallPoint& point);

/// Rotation matrix of an orientation (acts on Cartesian column vectors).
Eigen::Matrix3d rotation_matrix(const Orientation& o);
Eigen::Vector3d to_cartesian(const BallPoint& p);
BallPoint from_cartesian(const Eigen::Vector3d& v);

}  // namespace slepian
