#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "slepian/band.hpp"
#include "slepian/regions.hpp"

namespace slepian::kernels {

enum class KernelDomain { FourierLaguerre, FourierBessel };

/// Dense Hermitian kernel over an explicit list of harmonic indices.
///
/// Fixed-order blocks list only indices of one order m (ell >= |m|, radial
/// fastest). Full kernels list the band's IndexMap order. For Fourier-Bessel
/// kernels the matrix is the symmetrized operator W^{1/2} (C o G) W^{1/2} and
/// `weights` holds the diagonal of W. The imaginary part is empty for real
/// kernels.
struct KernelMatrix {
  KernelDomain domain = KernelDomain::FourierLaguerre;
  SpectralBand band;
  std::optional<int> order;
  std::vector<HarmonicIndex> indices;
  Eigen::MatrixXd re;
  Eigen::MatrixXd im;
  Eigen::VectorXd weights;

  Eigen::Index size() const { return re.rows(); }
  bool is_real() const { return im.size() == 0; }
  Eigen::MatrixXcd complex_matrix() const;
  /// max |K - K^H| / max |K|
  double hermitian_defect() const;
};

/// Radial coupling E_{pp'} = int_{R1}^{R2} r^2 K_p K_p' dr (P x P). R2 may be +inf.
///
/// Low degrees use the binomial double sum over exponential moments in
/// 100-digit arithmetic; pairs with p + p' > 60 use quadrature.
Eigen::MatrixXd E_matrix(int P, double r1, double r2);

/// E by quadrature only (composite Gauss-Legendre, shifted Gauss-Laguerre tail).
Eigen::MatrixXd E_matrix_quadrature(int P, double r1, double r2);

/// Angular coupling G^m_{ll'} = 2 pi int_{t1}^{t2} Y_lm(t,0) Y_l'm(t,0) sin t dt
/// for l, l' = |m| .. L-1, from the Wigner-3j expansion.
Eigen::MatrixXd G_matrix(int m, int L, double theta1, double theta2);

/// Same matrix by Gauss-Legendre quadrature in cos(theta).
Eigen::MatrixXd G_matrix_quadrature(int m, int L, double theta1, double theta2);

/// C_{ll'}(k,k') = (2/pi) int_{R1}^{R2} r^2 k k' j_l(kr) j_l'(k'r) dr.
/// Closed forms for l = l'; oscillation-resolving quadrature otherwise.
double C_kernel(int ell, int ell_p, double k, double k_p, double r1, double r2);

/// C by composite Gauss-Legendre only.
double C_kernel_quadrature(int ell, int ell_p, double k, double k_p, double r1, double r2);

/// Number of Gauss-Legendre panels used for radial Bessel integrals on [r1, r2].
int bessel_panels(double k_max, double r2);

/// Single Fourier-Laguerre entry int_R Z_{lmp} Z^*_{l'm'p'} dv.
std::complex<double> kernel_fl_entry(const Region& region, const FourierLaguerreBand& band, const HarmonicIndex& a,
                                     const HarmonicIndex& b);

/// Fixed-order Fourier-Laguerre block for azimuthally symmetric, unoriented
/// regions (product, sampled axisymmetric, disjoint union). Real symmetric.
KernelMatrix kernel_fl_fixed_order(int m, const FourierLaguerreBand& band, const Region& region);

/// Factors of the Fourier-Laguerre kernel of a radially independent region:
/// K = G (x) E with G indexed by angular slot l^2 + l + m.
struct SeparableKernel {
  FourierLaguerreBand band;
  Eigen::MatrixXd E;
  Eigen::MatrixXcd G;

  /// Dense PL^2 x PL^2 product in IndexMap order.
  KernelMatrix materialize() const;
};

/// Angular matrix of a mask: sum_i w_i I_i Y_lm(i) Y^*_l'm'(i) over pixels.
Eigen::MatrixXcd G_mask(const AngularMask& mask, int L);

SeparableKernel kernel_fl_mask(const FourierLaguerreBand& band, const Region& region);

/// Full dense Fourier-Laguerre kernel of any region, oriented regions included.
/// Refuses bands with PL^2 above `max_dimension`.
KernelMatrix kernel_fl_dense(const FourierLaguerreBand& band, const Region& region,
                             std::size_t max_dimension = 10000);

/// Block-diagonal Wigner-D rotation acting on coefficient vectors:
/// f'_{lmp} = sum_n e^{-i m phi0} d^l_{mn}(theta0) f_{lnp}.
Eigen::MatrixXcd rotation_operator(int L, int radial_count, const Orientation& o);

/// Symmetrized Fourier-Bessel block of order m over (l, k_n), l >= |m|, for
/// unoriented product, sampled axisymmetric and union regions. `couplings`
/// may carry a precomputed fb_radial_couplings matrix for product regions.
KernelMatrix kernel_fb_fixed_order(int m, const FourierBesselBand& band, const Region& region,
                                   const Eigen::MatrixXd* couplings = nullptr);

/// Matrix of C_{ll'}(k_n, k_n') for all l, l' < L and samples n, n', shared by
/// every order. Block (l, l') is M x M at rows l*M, columns l'*M.
Eigen::MatrixXd fb_radial_couplings(const FourierBesselBand& band, double r1, double r2);

}  // namespace slepian::kernels
