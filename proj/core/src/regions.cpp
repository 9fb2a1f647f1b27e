#include "slepian/regions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "slepian/errors.hpp"
#include "slepian/quadrature.hpp"

namespace slepian {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_radial(double r_min, double r_max, const char* who) {
  if (!(r_min >= 0.0) || !std::isfinite(r_min))
    throw ValidationError(std::string(who) + ": R1 must be a finite number >= 0");
  if (!(r_max >= r_min)) throw ValidationError(std::string(who) + ": R2 must be >= R1");
}

void check_colatitude(double t_min, double t_max, const char* who) {
  if (!(t_min >= 0.0 && t_min <= kPi)) throw ValidationError(std::string(who) + ": theta1 must lie in [0, pi]");
  if (!(t_max >= 0.0 && t_max <= kPi)) throw ValidationError(std::string(who) + ": theta2 must lie in [0, pi]");
  if (!(t_max >= t_min)) throw ValidationError(std::string(who) + ": theta2 must be >= theta1");
}

// Colatitude nodes/weights of a Gauss-Legendre rule in cos(theta) on [t_lo, t_hi],
// returned with ascending theta.
void colatitude_rule(int n, double t_lo, double t_hi, std::vector<double>& theta, std::vector<double>& w) {
  const QuadratureRule q = quadrature::gauss_legendre(n, std::cos(t_hi), std::cos(t_lo));
  theta.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    theta[n - 1 - i] = std::acos(std::clamp(q.nodes[i], -1.0, 1.0));
    w[n - 1 - i] = q.weights[i];
  }
}

double wrap_phi(double phi) {
  double p = std::fmod(phi, kTwoPi);
  if (p < 0.0) p += kTwoPi;
  return p;
}

bool in_rectangle(const AngularRectangle& r, double theta, double phi) {
  if (theta < r.theta_min || theta > r.theta_max) return false;
  if (r.phi_max - r.phi_min >= kTwoPi) return true;
  const double p = wrap_phi(phi - r.phi_min);
  return p <= r.phi_max - r.phi_min;
}

bool contains_base(const Region::Shape& shape, const BallPoint& p);

bool contains_product(const ProductSymmetric& s, const BallPoint& p) {
  return p.r >= s.r_min && p.r <= s.r_max && p.theta >= s.theta_min && p.theta <= s.theta_max;
}

bool contains_base(const Region::Shape& shape, const BallPoint& p) {
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ProductSymmetric>) {
          return contains_product(s, p);
        } else if constexpr (std::is_same_v<T, AzimuthallySymmetric>) {
          if (s.predicate) return s.predicate(p.r, p.theta);
          if (s.r_nodes.empty() || p.r < s.r_nodes.front() - 1e-12 * (1.0 + s.r_nodes.front()) ||
              p.r > s.r_nodes.back() + 1e-12 * (1.0 + s.r_nodes.back()))
            return false;
          auto nearest = [](const std::vector<double>& v, double x) {
            const auto it = std::lower_bound(v.begin(), v.end(), x);
            if (it == v.begin()) return std::size_t{0};
            if (it == v.end()) return v.size() - 1;
            const auto i = static_cast<std::size_t>(it - v.begin());
            return (x - v[i - 1] <= v[i] - x) ? i - 1 : i;
          };
          return s.inside_node(nearest(s.r_nodes, p.r), nearest(s.theta_nodes, p.theta));
        } else if constexpr (std::is_same_v<T, ProductMask>) {
          return p.r >= s.r_min && p.r <= s.r_max && s.mask.contains(p.theta, p.phi);
        } else {
          return std::any_of(s.parts.begin(), s.parts.end(),
                             [&](const ProductSymmetric& part) { return contains_product(part, p); });
        }
      },
      shape);
}

}  // namespace

// ---------------------------------------------------------------------------
// AngularMask

AngularMask::AngularMask(int grid_band_limit, std::vector<MaskPixel> pixels)
    : grid_band_limit_(grid_band_limit), pixels_(std::move(pixels)) {}

AngularMask AngularMask::from_indicator(int grid_band_limit, const std::vector<std::uint8_t>& indicator) {
  if (grid_band_limit < 1) throw ValidationError("mask: grid band-limit must be >= 1");
  const int nt = grid_band_limit;
  const int np = 2 * grid_band_limit - 1;
  if (indicator.size() != static_cast<std::size_t>(nt) * np)
    throw ValidationError("mask: indicator size must be L_grid * (2 L_grid - 1)");
  std::vector<double> theta;
  std::vector<double> wt;
  colatitude_rule(nt, 0.0, kPi, theta, wt);
  std::vector<MaskPixel> pixels;
  pixels.reserve(indicator.size());
  for (int i = 0; i < nt; ++i) {
    for (int k = 0; k < np; ++k) {
      const std::uint8_t v = indicator[static_cast<std::size_t>(i) * np + k];
      if (v > 1) throw ValidationError("mask: indicator values must be 0 or 1");
      pixels.push_back({theta[i], kTwoPi * k / np, wt[i] * kTwoPi / np, v == 1});
    }
  }
  return AngularMask(grid_band_limit, std::move(pixels));
}

AngularMask AngularMask::gauss_grid(int grid_band_limit, const Predicate& inside) {
  if (grid_band_limit < 1) throw ValidationError("mask: grid band-limit must be >= 1");
  const int nt = grid_band_limit;
  const int np = 2 * grid_band_limit - 1;
  std::vector<double> theta;
  std::vector<double> wt;
  colatitude_rule(nt, 0.0, kPi, theta, wt);
  std::vector<std::uint8_t> ind;
  ind.reserve(static_cast<std::size_t>(nt) * np);
  for (int i = 0; i < nt; ++i)
    for (int k = 0; k < np; ++k) ind.push_back(inside(theta[i], kTwoPi * k / np) ? 1 : 0);
  return from_indicator(grid_band_limit, ind);
}

AngularMask AngularMask::full_sphere(int grid_band_limit) {
  return gauss_grid(grid_band_limit, [](double, double) { return true; });
}

AngularMask AngularMask::rectangles(int grid_band_limit, const std::vector<AngularRectangle>& parts) {
  if (grid_band_limit < 1) throw ValidationError("mask: grid band-limit must be >= 1");
  std::vector<double> tb{0.0, kPi};
  std::vector<double> pb{0.0, kTwoPi};
  bool full_longitude = true;
  for (const auto& r : parts) {
    check_colatitude(r.theta_min, r.theta_max, "mask rectangle");
    if (!(r.phi_max >= r.phi_min)) throw ValidationError("mask rectangle: phi_max must be >= phi_min");
    tb.push_back(r.theta_min);
    tb.push_back(r.theta_max);
    if (r.phi_max - r.phi_min < kTwoPi) {
      full_longitude = false;
      const double a = wrap_phi(r.phi_min);
      const double b = a + (r.phi_max - r.phi_min);
      pb.push_back(a);
      if (b <= kTwoPi) {
        pb.push_back(b);
      } else {
        pb.push_back(b - kTwoPi);
      }
    }
  }
  auto uniq = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end(), [](double a, double b) { return std::abs(a - b) < 1e-14; }), v.end());
  };
  uniq(tb);
  uniq(pb);

  // Longitude nodes: uniform when every rectangle spans all longitudes,
  // otherwise Gauss-Legendre per cell, sized for e^{i k phi} with |k| <= 2L-2.
  std::vector<double> phi;
  std::vector<double> wphi;
  const int kmax = 2 * grid_band_limit - 2;
  if (full_longitude) {
    const int np = 2 * grid_band_limit - 1;
    for (int k = 0; k < np; ++k) {
      phi.push_back(kTwoPi * k / np);
      wphi.push_back(kTwoPi / np);
    }
  } else {
    for (std::size_t c = 0; c + 1 < pb.size(); ++c) {
      const double h = pb[c + 1] - pb[c];
      if (h <= 0.0) continue;
      const int n = static_cast<int>(std::ceil(0.7 * kmax * h)) + 10;
      const QuadratureRule q = quadrature::gauss_legendre(n, pb[c], pb[c + 1]);
      phi.insert(phi.end(), q.nodes.begin(), q.nodes.end());
      wphi.insert(wphi.end(), q.weights.begin(), q.weights.end());
    }
  }

  std::vector<MaskPixel> pixels;
  for (std::size_t c = 0; c + 1 < tb.size(); ++c) {
    if (tb[c + 1] - tb[c] <= 0.0) continue;
    std::vector<double> theta;
    std::vector<double> wt;
    colatitude_rule(grid_band_limit, tb[c], tb[c + 1], theta, wt);
    const double tmid = 0.5 * (tb[c] + tb[c + 1]);
    for (std::size_t i = 0; i < theta.size(); ++i) {
      for (std::size_t k = 0; k < phi.size(); ++k) {
        // Cells never straddle a rectangle edge, so test the cell's interior.
        bool inside = false;
        for (const auto& r : parts) inside = inside || in_rectangle(r, tmid, phi[k]);
        pixels.push_back({theta[i], phi[k], wt[i] * wphi[k], inside});
      }
    }
  }
  return AngularMask(grid_band_limit, std::move(pixels));
}

AngularMask AngularMask::from_pixels(int grid_band_limit, std::vector<MaskPixel> pixels) {
  if (grid_band_limit < 1) throw ValidationError("mask: grid band-limit must be >= 1");
  double total = 0.0;
  for (const auto& p : pixels) {
    if (!(p.weight > 0.0)) throw ValidationError("mask: pixel weights must be positive");
    check_colatitude(p.theta, p.theta, "mask pixel");
    total += p.weight;
  }
  if (std::abs(total - 4.0 * kPi) > 1e-10 * 4.0 * kPi)
    throw ValidationError("mask: pixel weights must sum to 4 pi");
  return AngularMask(grid_band_limit, std::move(pixels));
}

double AngularMask::solid_angle() const {
  double s = 0.0;
  for (const auto& p : pixels_)
    if (p.inside) s += p.weight;
  return s;
}

bool AngularMask::contains(double theta, double phi) const {
  const double st = std::sin(theta);
  const Eigen::Vector3d u(st * std::cos(phi), st * std::sin(phi), std::cos(theta));
  double best = -2.0;
  bool inside = false;
  for (const auto& p : pixels_) {
    const double sp = std::sin(p.theta);
    const double d = u.x() * sp * std::cos(p.phi) + u.y() * sp * std::sin(p.phi) + u.z() * std::cos(p.theta);
    if (d > best) {
      best = d;
      inside = p.inside;
    }
  }
  return inside;
}

// ---------------------------------------------------------------------------
// AzimuthallySymmetric

AzimuthallySymmetric AzimuthallySymmetric::sample(const Predicate& inside, double r_lo, double r_hi,
                                                  int radial_panels, int nodes_per_panel, int theta_nodes) {
  check_radial(r_lo, r_hi, "axisymmetric region");
  if (!(r_hi > r_lo) || !std::isfinite(r_hi))
    throw ValidationError("axisymmetric region: sampling interval must be finite with r_hi > r_lo");
  if (theta_nodes < 1 || radial_panels < 1 || nodes_per_panel < 1)
    throw ValidationError("axisymmetric region: grid sizes must be positive");
  AzimuthallySymmetric s;
  const QuadratureRule qr = quadrature::composite_gauss_legendre(radial_panels, nodes_per_panel, r_lo, r_hi);
  s.r_nodes = qr.nodes;
  s.r_weights.resize(qr.size());
  for (std::size_t i = 0; i < qr.size(); ++i) s.r_weights[i] = qr.weights[i] * qr.nodes[i] * qr.nodes[i];
  colatitude_rule(theta_nodes, 0.0, kPi, s.theta_nodes, s.theta_weights);
  s.indicator.resize(s.r_nodes.size() * s.theta_nodes.size());
  for (std::size_t i = 0; i < s.r_nodes.size(); ++i)
    for (std::size_t j = 0; j < s.theta_nodes.size(); ++j)
      s.indicator[i * s.theta_nodes.size() + j] = inside(s.r_nodes[i], s.theta_nodes[j]) ? 1 : 0;
  s.predicate = inside;
  return s;
}

// ---------------------------------------------------------------------------
// Region

Region Region::product(double r_min, double r_max, double theta_min, double theta_max) {
  check_radial(r_min, r_max, "product region");
  check_colatitude(theta_min, theta_max, "product region");
  return Region(ProductSymmetric{r_min, r_max, theta_min, theta_max});
}

Region Region::full_ball(double r_max) { return product(0.0, r_max, 0.0, kPi); }

Region Region::axisymmetric(AzimuthallySymmetric shape) {
  if (shape.indicator.size() != shape.r_nodes.size() * shape.theta_nodes.size())
    throw ValidationError("axisymmetric region: indicator does not match grid");
  return Region(std::move(shape));
}

Region Region::masked(AngularMask mask, double r_min, double r_max) {
  check_radial(r_min, r_max, "mask region");
  return Region(ProductMask{std::move(mask), r_min, r_max});
}

Region Region::union_of(std::vector<ProductSymmetric> parts) {
  if (parts.empty()) throw ValidationError("union: needs at least one part");
  for (const auto& p : parts) {
    check_radial(p.r_min, p.r_max, "union part");
    check_colatitude(p.theta_min, p.theta_max, "union part");
  }
  for (std::size_t a = 0; a < parts.size(); ++a) {
    for (std::size_t b = a + 1; b < parts.size(); ++b) {
      const double r_overlap = std::min(parts[a].r_max, parts[b].r_max) - std::max(parts[a].r_min, parts[b].r_min);
      const double t_overlap =
          std::min(parts[a].theta_max, parts[b].theta_max) - std::max(parts[a].theta_min, parts[b].theta_min);
      if (r_overlap > 0.0 && t_overlap > 0.0)
        throw ValidationError("union: parts " + std::to_string(a) + " and " + std::to_string(b) + " overlap");
    }
  }
  return Region(DisjointUnion{std::move(parts)});
}

Region Region::oriented(double theta0, double phi0) const {
  if (!is_axisymmetric()) throw ValidationError("orientation: only axisymmetric regions can be rotated");
  check_colatitude(theta0, theta0, "orientation");
  Region r = *this;
  r.orientation_ = Orientation{theta0, phi0};
  return r;
}

Region Region::unoriented() const {
  Region r = *this;
  r.orientation_.reset();
  return r;
}

bool Region::radially_independent() const {
  return std::holds_alternative<ProductSymmetric>(shape_) || std::holds_alternative<ProductMask>(shape_);
}

bool Region::is_axisymmetric() const { return !std::holds_alternative<ProductMask>(shape_); }

std::string Region::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ProductSymmetric>) {
          os << "product:" << s.r_min << "," << s.r_max << "," << s.theta_min << "," << s.theta_max;
        } else if constexpr (std::is_same_v<T, AzimuthallySymmetric>) {
          os << "axisymmetric:" << s.r_nodes.size() << "x" << s.theta_nodes.size();
        } else if constexpr (std::is_same_v<T, ProductMask>) {
          os << "mask:" << s.mask.pixels().size() << "px," << s.r_min << "," << s.r_max;
        } else {
          os << "union:" << s.parts.size();
        }
      },
      shape_);
  if (orientation_) os << "@" << orientation_->theta0 << "," << orientation_->phi0;
  return os.str();
}

// ---------------------------------------------------------------------------
// measures

double solid_angle_band(double theta_min, double theta_max) {
  check_colatitude(theta_min, theta_max, "solid_angle_band");
  return kTwoPi * (std::cos(theta_min) - std::cos(theta_max));
}

double solid_angle(const AngularMask& mask) { return mask.solid_angle(); }

double solid_angle(const Region& region) {
  if (const auto* p = region.as<ProductSymmetric>()) return solid_angle_band(p->theta_min, p->theta_max);
  if (const auto* m = region.as<ProductMask>()) return m->mask.solid_angle();
  throw ValidationError("solid_angle: region is not radially independent");
}

double volume(const Region& region) {
  auto shell = [](double a, double b) { return std::isinf(b) ? b : (b * b * b - a * a * a) / 3.0; };
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ProductSymmetric>) {
          if (s.r_max == s.r_min) return 0.0;
          return shell(s.r_min, s.r_max) * solid_angle_band(s.theta_min, s.theta_max);
        } else if constexpr (std::is_same_v<T, AzimuthallySymmetric>) {
          double v = 0.0;
          for (std::size_t i = 0; i < s.r_nodes.size(); ++i)
            for (std::size_t j = 0; j < s.theta_nodes.size(); ++j)
              if (s.inside_node(i, j)) v += s.r_weights[i] * s.theta_weights[j];
          return kTwoPi * v;
        } else if constexpr (std::is_same_v<T, ProductMask>) {
          if (s.r_max == s.r_min) return 0.0;
          return shell(s.r_min, s.r_max) * s.mask.solid_angle();
        } else {
          double v = 0.0;
          for (const auto& p : s.parts)
            if (p.r_max > p.r_min) v += shell(p.r_min, p.r_max) * solid_angle_band(p.theta_min, p.theta_max);
          return v;
        }
      },
      region.shape());
}

Eigen::Matrix3d rotation_matrix(const Orientation& o) {
  const Eigen::Matrix3d ry = Eigen::AngleAxisd(o.theta0, Eigen::Vector3d::UnitY()).toRotationMatrix();
  const Eigen::Matrix3d rz = Eigen::AngleAxisd(o.phi0, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  return rz * ry;
}

Eigen::Vector3d to_cartesian(const BallPoint& p) {
  const double st = std::sin(p.theta);
  return {p.r * st * std::cos(p.phi), p.r * st * std::sin(p.phi), p.r * std::cos(p.theta)};
}

BallPoint from_cartesian(const Eigen::Vector3d& v) {
  BallPoint p;
  p.r = v.norm();
  if (p.r == 0.0) return p;
  p.theta = std::acos(std::clamp(v.z() / p.r, -1.0, 1.0));
  p.phi = wrap_phi(std::atan2(v.y(), v.x()));
  return p;
}

bool contains(const Region& region, const BallPoint& point) {
  if (!region.orientation()) return contains_base(region.shape(), point);
  const Eigen::Matrix3d rot = rotation_matrix(*region.orientation());
  BallPoint local = from_cartesian(rot.transpose() * to_cartesian(point));
  if (point.r == 0.0) local = point;
  return contains_base(region.shape(), local);
}

}  // namespace slepian
