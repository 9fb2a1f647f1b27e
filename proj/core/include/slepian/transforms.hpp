#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "slepian/band.hpp"
#include "slepian/concentration.hpp"
#include "slepian/regions.hpp"

namespace slepian {

/// Tensor grid r x theta x phi with quadrature weights, flattened with r
/// outermost and phi innermost.
///
/// `exact_P` and `exact_L` record the largest Fourier-Laguerre band whose
/// products the grid integrates exactly (0 when it makes no such claim).
struct SpatialGrid {
  std::vector<double> r;
  std::vector<double> r_weights;  ///< for int ... r^2 dr
  std::vector<double> theta;
  std::vector<double> theta_weights;  ///< for int ... sin(theta) dtheta
  std::vector<double> phi;
  std::vector<double> phi_weights;
  int exact_P = 0;
  int exact_L = 0;
  bool whole_ball = false;

  std::size_t size() const { return r.size() * theta.size() * phi.size(); }
  std::size_t flat(std::size_t ir, std::size_t it, std::size_t ip) const {
    return (ir * theta.size() + it) * phi.size() + ip;
  }
  BallPoint point(std::size_t ir, std::size_t it, std::size_t ip) const { return {r[ir], theta[it], phi[ip]}; }
  double weight(std::size_t ir, std::size_t it, std::size_t ip) const {
    return r_weights[ir] * theta_weights[it] * phi_weights[ip];
  }
  std::vector<BallPoint> points() const;

  /// Grid on the whole ball that integrates |f|^2 and f Z^* exactly for
  /// Fourier-Laguerre bands up to (P, L): Laguerre radial nodes (P + margin of
  /// them), L + margin Gauss-Legendre nodes in cos(theta), and 2L - 1 + margin
  /// uniform longitudes.
  static SpatialGrid fourier_laguerre(int P, int L, int margin = 8);

  /// Grid over a product region: composite Gauss-Legendre in r on [r1, r2]
  /// (`radial_panels` x `radial_nodes`), Gauss-Legendre in cos(theta) on
  /// [theta1, theta2] and `phi_nodes` uniform longitudes.
  static SpatialGrid product(double r1, double r2, double theta1, double theta2, int radial_panels, int radial_nodes,
                             int theta_nodes, int phi_nodes);

  /// Product grid whose quadrature is exact for |f|^2 of band-limited
  /// Fourier-Laguerre signals over a ProductSymmetric region.
  static SpatialGrid for_region(const ProductSymmetric& region, int P, int L);
};

/// f(x) = sum f_lmp Z_lmp(x) at arbitrary points.
Eigen::VectorXcd synthesis_fl(const HarmonicCoeffs& coeffs, const std::vector<BallPoint>& points);
/// Separable synthesis on every node of a grid, ordered as SpatialGrid::flat.
Eigen::VectorXcd synthesis_fl(const HarmonicCoeffs& coeffs, const SpatialGrid& grid);

/// f_lmp = <f, Z_lmp> by the grid's quadrature. Requires the grid to be exact
/// for the band.
HarmonicCoeffs analysis_fl(const Eigen::VectorXcd& samples, const SpatialGrid& grid, const FourierLaguerreBand& band);

/// sum_nodes w f Z^*_{lmp}: the grid's quadrature of <f, Z_lmp> without any
/// exactness requirement (e.g. restricted to a region's grid).
HarmonicCoeffs project_fl(const Eigen::VectorXcd& samples, const SpatialGrid& grid, const FourierLaguerreBand& band);

/// Riemann-sum synthesis sum_{lmn} w_n f_lm(k_n) X_lm(k_n, x) with the band's
/// sample weights.
Eigen::VectorXcd synthesis_fb(const HarmonicCoeffs& coeffs, const std::vector<BallPoint>& points);
Eigen::VectorXcd synthesis_fb(const HarmonicCoeffs& coeffs, const SpatialGrid& grid);

/// Synthesis dispatching on the coefficient band.
Eigen::VectorXcd synthesis(const HarmonicCoeffs& coeffs, const SpatialGrid& grid);

/// int_grid |f|^2 over grid nodes inside `region` (all nodes when null).
double spatial_energy(const Eigen::VectorXcd& values, const SpatialGrid& grid, const Region* region = nullptr);

/// Slepian coefficients h_alpha = <h, f^alpha> for the first `count` stored
/// eigenfunctions (all when count is omitted).
Eigen::VectorXcd slepian_coeffs(const HarmonicCoeffs& h, const EigenResult& basis,
                                std::optional<std::size_t> count = std::nullopt);

/// sum_{alpha < J} h_alpha f^alpha.
HarmonicCoeffs truncate_reconstruct(const Eigen::VectorXcd& h_alpha, const EigenResult& basis, std::size_t J);

/// Q(J) = sum_{alpha < J} lambda |h_alpha|^2 / sum_alpha lambda |h_alpha|^2.
double quality_measure(const Eigen::VectorXcd& h_alpha, const EigenResult& basis, std::size_t J);

/// Default truncation: floor of the Shannon number.
std::size_t default_truncation(const EigenResult& basis);

}  // namespace slepian
