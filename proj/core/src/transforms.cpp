#include "slepian/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "slepian/errors.hpp"
#include "slepian/parallel.hpp"
#include "slepian/quadrature.hpp"
#include "slepian/specfun.hpp"

namespace slepian {
namespace {

constexpr double kPi = std::numbers::pi;
using cd = std::complex<double>;

void colatitude_nodes(int n, double t1, double t2, std::vector<double>& theta, std::vector<double>& w) {
  const QuadratureRule q = quadrature::gauss_legendre(n, std::cos(t2), std::cos(t1));
  theta.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    theta[n - 1 - i] = std::acos(std::clamp(q.nodes[i], -1.0, 1.0));
    w[n - 1 - i] = q.weights[i];
  }
}

void uniform_phi(int n, std::vector<double>& phi, std::vector<double>& w) {
  phi.resize(n);
  w.assign(n, 2.0 * kPi / n);
  for (int k = 0; k < n; ++k) phi[k] = 2.0 * kPi * k / n;
}

// Y_lm(theta, 0) for all l < L, |m| <= l, indexed by angular slot.
void harmonics_at(int L, double theta, std::vector<double>& y, std::vector<double>& scratch) {
  y.assign(static_cast<std::size_t>(L) * L, 0.0);
  scratch.resize(L);
  for (int m = 0; m < L; ++m) {
    specfun::normalized_legendre(L - 1, m, theta, std::span<double>(scratch.data(), L - m));
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    for (int l = m; l < L; ++l) {
      y[IndexMap::angular_slot(l, m)] = scratch[l - m];
      if (m > 0) y[IndexMap::angular_slot(l, -m)] = sign * scratch[l - m];
    }
  }
}

// e^{i m phi} for m = -(L-1) .. L-1 at index m + L - 1.
void azimuth_phases(int L, double phi, std::vector<cd>& e) {
  e.resize(2 * L - 1);
  for (int m = -(L - 1); m < L; ++m) e[m + L - 1] = std::polar(1.0, m * phi);
}

// g_lm(r) coefficients -> values on the angular part of a grid at one radius.
// a holds sum_radial coefficients by angular slot.
void angular_synthesis(int L, const std::vector<cd>& a, const SpatialGrid& grid, const std::vector<double>& ytab,
                       std::size_t ir, Eigen::VectorXcd& out) {
  const std::size_t nt = grid.theta.size();
  const std::size_t np = grid.phi.size();
  std::vector<cd> b(2 * L - 1);
  for (std::size_t it = 0; it < nt; ++it) {
    const double* y = ytab.data() + it * static_cast<std::size_t>(L) * L;
    for (int m = -(L - 1); m < L; ++m) {
      cd s = 0.0;
      for (int l = std::abs(m); l < L; ++l) s += a[IndexMap::angular_slot(l, m)] * y[IndexMap::angular_slot(l, m)];
      b[m + L - 1] = s;
    }
    for (std::size_t ip = 0; ip < np; ++ip) {
      cd s = 0.0;
      for (int m = -(L - 1); m < L; ++m) s += b[m + L - 1] * std::polar(1.0, m * grid.phi[ip]);
      out[static_cast<Eigen::Index>(grid.flat(ir, it, ip))] = s;
    }
  }
}

std::vector<double> harmonic_table(int L, const std::vector<double>& theta) {
  std::vector<double> tab(theta.size() * static_cast<std::size_t>(L) * L);
  std::vector<double> y;
  std::vector<double> scratch;
  for (std::size_t it = 0; it < theta.size(); ++it) {
    harmonics_at(L, theta[it], y, scratch);
    std::copy(y.begin(), y.end(), tab.begin() + static_cast<std::ptrdiff_t>(it * y.size()));
  }
  return tab;
}

const FourierLaguerreBand& fl_band(const HarmonicCoeffs& c, const char* who) {
  const auto* b = std::get_if<FourierLaguerreBand>(&c.band);
  if (!b) throw ValidationError(std::string(who) + ": needs Fourier-Laguerre coefficients");
  return *b;
}

const FourierBesselBand& fb_band(const HarmonicCoeffs& c, const char* who) {
  const auto* b = std::get_if<FourierBesselBand>(&c.band);
  if (!b) throw ValidationError(std::string(who) + ": needs Fourier-Bessel coefficients");
  return *b;
}

void check_basis(const HarmonicCoeffs& h, const EigenResult& basis, const char* who) {
  if (!same_band(h.band, basis.band())) throw ValidationError(std::string(who) + ": band mismatch");
}

}  // namespace

// ---------------------------------------------------------------------------
// grids

std::vector<BallPoint> SpatialGrid::points() const {
  std::vector<BallPoint> pts;
  pts.reserve(size());
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = 0; j < theta.size(); ++j)
      for (std::size_t k = 0; k < phi.size(); ++k) pts.push_back(point(i, j, k));
  return pts;
}

SpatialGrid SpatialGrid::fourier_laguerre(int P, int L, int margin) {
  if (P < 1 || L < 1 || margin < 0) throw ValidationError("grid: need P, L >= 1 and margin >= 0");
  SpatialGrid g;
  const QuadratureRule q = quadrature::radial_laguerre(P + margin);
  g.r = q.nodes;
  g.r_weights = q.weights;
  colatitude_nodes(L + margin, 0.0, kPi, g.theta, g.theta_weights);
  uniform_phi(2 * L - 1 + margin, g.phi, g.phi_weights);
  // |f|^2 has radial degree 2P-2 (exact up to 2n-1), colatitude degree 2L-2,
  // and azimuthal frequencies below 2L-1.
  g.exact_P = static_cast<int>(g.r.size());
  g.exact_L = std::min(static_cast<int>(g.theta.size()), static_cast<int>((g.phi.size() + 1) / 2));
  g.whole_ball = true;
  return g;
}

SpatialGrid SpatialGrid::product(double r1, double r2, double theta1, double theta2, int radial_panels,
                                 int radial_nodes, int theta_nodes, int phi_nodes) {
  if (!(r2 > r1) || !(r1 >= 0.0) || !std::isfinite(r2)) throw ValidationError("grid: need 0 <= R1 < R2 < inf");
  if (!(theta1 >= 0.0 && theta2 <= kPi && theta2 > theta1)) throw ValidationError("grid: need 0 <= t1 < t2 <= pi");
  if (radial_panels < 1 || radial_nodes < 1 || theta_nodes < 1 || phi_nodes < 1)
    throw ValidationError("grid: node counts must be positive");
  SpatialGrid g;
  const QuadratureRule q = quadrature::composite_gauss_legendre(radial_panels, radial_nodes, r1, r2);
  g.r = q.nodes;
  g.r_weights.resize(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) g.r_weights[i] = q.weights[i] * q.nodes[i] * q.nodes[i];
  colatitude_nodes(theta_nodes, theta1, theta2, g.theta, g.theta_weights);
  uniform_phi(phi_nodes, g.phi, g.phi_weights);
  return g;
}

SpatialGrid SpatialGrid::for_region(const ProductSymmetric& region, int P, int L) {
  const int panels = std::max(1, static_cast<int>(std::ceil((region.r_max - region.r_min) / 8.0)));
  SpatialGrid g = product(region.r_min, region.r_max, region.theta_min, region.theta_max, panels, 2 * P + 16, L + 2,
                          2 * L + 1);
  g.exact_P = P;
  g.exact_L = L;
  return g;
}

// ---------------------------------------------------------------------------
// Fourier-Laguerre

Eigen::VectorXcd synthesis_fl(const HarmonicCoeffs& coeffs, const std::vector<BallPoint>& points) {
  const FourierLaguerreBand& band = fl_band(coeffs, "synthesis_fl");
  const IndexMap map(band.P, band.L);
  Eigen::VectorXcd out(static_cast<Eigen::Index>(points.size()));
  parallel_for(points.size(), [&](std::size_t i) {
    std::vector<double> k(band.P);
    std::vector<double> y;
    std::vector<double> scratch;
    std::vector<cd> e;
    const BallPoint& x = points[i];
    specfun::laguerre_K_array(band.P, x.r, k);
    harmonics_at(band.L, x.theta, y, scratch);
    azimuth_phases(band.L, x.phi, e);
    cd s = 0.0;
    for (int l = 0; l < band.L; ++l) {
      for (int m = -l; m <= l; ++m) {
        cd radial = 0.0;
        const std::size_t base = map.flat(l, m, 0);
        for (int p = 0; p < band.P; ++p) radial += coeffs.values[static_cast<Eigen::Index>(base + p)] * k[p];
        s += radial * y[IndexMap::angular_slot(l, m)] * e[m + band.L - 1];
      }
    }
    out[static_cast<Eigen::Index>(i)] = s;
  });
  return out;
}

Eigen::VectorXcd synthesis_fl(const HarmonicCoeffs& coeffs, const SpatialGrid& grid) {
  const FourierLaguerreBand& band = fl_band(coeffs, "synthesis_fl");
  const IndexMap map(band.P, band.L);
  const std::vector<double> ytab = harmonic_table(band.L, grid.theta);
  Eigen::VectorXcd out(static_cast<Eigen::Index>(grid.size()));
  const std::size_t slots = static_cast<std::size_t>(band.L) * band.L;
  parallel_for(grid.r.size(), [&](std::size_t ir) {
    std::vector<double> k(band.P);
    specfun::laguerre_K_array(band.P, grid.r[ir], k);
    std::vector<cd> a(slots);
    for (std::size_t slot = 0; slot < slots; ++slot) {
      cd s = 0.0;
      for (int p = 0; p < band.P; ++p) s += coeffs.values[static_cast<Eigen::Index>(slot * band.P + p)] * k[p];
      a[slot] = s;
    }
    angular_synthesis(band.L, a, grid, ytab, ir, out);
  });
  return out;
}

HarmonicCoeffs analysis_fl(const Eigen::VectorXcd& samples, const SpatialGrid& grid, const FourierLaguerreBand& band) {
  validate(SpectralBand{band});
  if (static_cast<std::size_t>(samples.size()) != grid.size())
    throw ValidationError("analysis_fl: sample count does not match grid size");
  if (!grid.whole_ball || grid.exact_P < band.P || grid.exact_L < band.L)
    throw ValidationError("analysis_fl: grid is not exact for P=" + std::to_string(band.P) +
                          ", L=" + std::to_string(band.L));
  return project_fl(samples, grid, band);
}

HarmonicCoeffs project_fl(const Eigen::VectorXcd& samples, const SpatialGrid& grid, const FourierLaguerreBand& band) {
  validate(SpectralBand{band});
  if (static_cast<std::size_t>(samples.size()) != grid.size())
    throw ValidationError("project_fl: sample count does not match grid size");
  const int L = band.L;
  const std::size_t nt = grid.theta.size();
  const std::size_t np = grid.phi.size();
  const std::vector<double> ytab = harmonic_table(L, grid.theta);
  const std::size_t slots = static_cast<std::size_t>(L) * L;

  // d(slot, ir) = sum_{theta, phi} w f Y^*
  Eigen::MatrixXcd d(static_cast<Eigen::Index>(slots), static_cast<Eigen::Index>(grid.r.size()));
  parallel_for(grid.r.size(), [&](std::size_t ir) {
    std::vector<cd> c(2 * L - 1);
    std::vector<cd> acc(slots, 0.0);
    for (std::size_t it = 0; it < nt; ++it) {
      for (int m = -(L - 1); m < L; ++m) {
        cd s = 0.0;
        for (std::size_t ip = 0; ip < np; ++ip)
          s += grid.phi_weights[ip] * samples[static_cast<Eigen::Index>(grid.flat(ir, it, ip))] *
               std::polar(1.0, -m * grid.phi[ip]);
        c[m + L - 1] = s * grid.theta_weights[it];
      }
      const double* y = ytab.data() + it * slots;
      for (int l = 0; l < L; ++l)
        for (int m = -l; m <= l; ++m)
          acc[IndexMap::angular_slot(l, m)] += c[m + L - 1] * y[IndexMap::angular_slot(l, m)];
    }
    for (std::size_t s = 0; s < slots; ++s) d(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(ir)) = acc[s];
  });

  HarmonicCoeffs out = HarmonicCoeffs::zeros(band);
  std::vector<double> k(band.P);
  for (std::size_t ir = 0; ir < grid.r.size(); ++ir) {
    specfun::laguerre_K_array(band.P, grid.r[ir], k);
    for (std::size_t s = 0; s < slots; ++s) {
      const cd v = grid.r_weights[ir] * d(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(ir));
      for (int p = 0; p < band.P; ++p) out.values[static_cast<Eigen::Index>(s * band.P + p)] += v * k[p];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fourier-Bessel

namespace {

// sum_n w_n f_lm(k_n) sqrt(2/pi) k_n j_l(k_n r) for every angular slot.
void fb_radial(const HarmonicCoeffs& coeffs, const FourierBesselBand& band, double r, std::vector<cd>& a) {
  const int L = band.L;
  const int M = band.M;
  const std::size_t slots = static_cast<std::size_t>(L) * L;
  a.assign(slots, 0.0);
  std::vector<double> j(L);
  for (int n = 0; n < M; ++n) {
    const double k = band.sample(n + 1);
    specfun::spherical_bessel_j_array(L - 1, k * r, j);
    const double s = band.weight(n + 1) * std::sqrt(2.0 / kPi) * k;
    for (int l = 0; l < L; ++l)
      for (int m = -l; m <= l; ++m) {
        const std::size_t slot = IndexMap::angular_slot(l, m);
        a[slot] += s * j[l] * coeffs.values[static_cast<Eigen::Index>(slot * M + n)];
      }
  }
}

}  // namespace

Eigen::VectorXcd synthesis_fb(const HarmonicCoeffs& coeffs, const std::vector<BallPoint>& points) {
  const FourierBesselBand& band = fb_band(coeffs, "synthesis_fb");
  Eigen::VectorXcd out(static_cast<Eigen::Index>(points.size()));
  parallel_for(points.size(), [&](std::size_t i) {
    std::vector<cd> a;
    std::vector<double> y;
    std::vector<double> scratch;
    std::vector<cd> e;
    const BallPoint& x = points[i];
    fb_radial(coeffs, band, x.r, a);
    harmonics_at(band.L, x.theta, y, scratch);
    azimuth_phases(band.L, x.phi, e);
    cd s = 0.0;
    for (int l = 0; l < band.L; ++l)
      for (int m = -l; m <= l; ++m)
        s += a[IndexMap::angular_slot(l, m)] * y[IndexMap::angular_slot(l, m)] * e[m + band.L - 1];
    out[static_cast<Eigen::Index>(i)] = s;
  });
  return out;
}

Eigen::VectorXcd synthesis_fb(const HarmonicCoeffs& coeffs, const SpatialGrid& grid) {
  const FourierBesselBand& band = fb_band(coeffs, "synthesis_fb");
  const std::vector<double> ytab = harmonic_table(band.L, grid.theta);
  Eigen::VectorXcd out(static_cast<Eigen::Index>(grid.size()));
  parallel_for(grid.r.size(), [&](std::size_t ir) {
    std::vector<cd> a;
    fb_radial(coeffs, band, grid.r[ir], a);
    angular_synthesis(band.L, a, grid, ytab, ir, out);
  });
  return out;
}

Eigen::VectorXcd synthesis(const HarmonicCoeffs& coeffs, const SpatialGrid& grid) {
  return is_fourier_laguerre(coeffs.band) ? synthesis_fl(coeffs, grid) : synthesis_fb(coeffs, grid);
}

double spatial_energy(const Eigen::VectorXcd& values, const SpatialGrid& grid, const Region* region) {
  if (static_cast<std::size_t>(values.size()) != grid.size())
    throw ValidationError("spatial_energy: value count does not match grid size");
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.r.size(); ++i)
    for (std::size_t j = 0; j < grid.theta.size(); ++j)
      for (std::size_t k = 0; k < grid.phi.size(); ++k) {
        if (region && !contains(*region, grid.point(i, j, k))) continue;
        sum += grid.weight(i, j, k) * std::norm(values[static_cast<Eigen::Index>(grid.flat(i, j, k))]);
      }
  return sum;
}

// ---------------------------------------------------------------------------
// Slepian basis

Eigen::VectorXcd slepian_coeffs(const HarmonicCoeffs& h, const EigenResult& basis, std::optional<std::size_t> count) {
  check_basis(h, basis, "slepian_coeffs");
  const std::size_t n = std::min(count.value_or(basis.size()), basis.size());
  Eigen::VectorXcd out(static_cast<Eigen::Index>(n));
  parallel_for(n, [&](std::size_t a) { out[static_cast<Eigen::Index>(a)] = inner_product(h, basis.eigenfunction(a)); });
  return out;
}

HarmonicCoeffs truncate_reconstruct(const Eigen::VectorXcd& h_alpha, const EigenResult& basis, std::size_t J) {
  if (J > static_cast<std::size_t>(h_alpha.size()) || J > basis.size())
    throw ValidationError("truncate_reconstruct: J exceeds the number of stored coefficients");
  HarmonicCoeffs out = HarmonicCoeffs::zeros(basis.band());
  for (std::size_t a = 0; a < J; ++a) out.values += h_alpha[static_cast<Eigen::Index>(a)] * basis.eigenfunction(a).values;
  return out;
}

double quality_measure(const Eigen::VectorXcd& h_alpha, const EigenResult& basis, std::size_t J) {
  const auto n = static_cast<std::size_t>(h_alpha.size());
  if (n > basis.size()) throw ValidationError("quality_measure: more coefficients than eigenfunctions");
  if (J > n) throw ValidationError("quality_measure: J exceeds the number of coefficients");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    const double t = basis.eigenvalue(a) * std::norm(h_alpha[static_cast<Eigen::Index>(a)]);
    den += t;
    if (a < J) num += t;
  }
  if (den < 1e-30) throw ValidationError("quality_measure: signal has no energy inside the region");
  return num / den;
}

std::size_t default_truncation(const EigenResult& basis) {
  const double n = std::floor(basis.shannon());
  return static_cast<std::size_t>(std::clamp(n, 0.0, static_cast<double>(basis.size())));
}

}  // namespace slepian
