#pragma once

#include <complex>
#include <span>

#include <Eigen/Dense>

namespace slepian::specfun {

/// Spherical Bessel function of the first kind j_ell(x) for ell >= -1, x >= 0.
///
/// ell = -1 is the analytic continuation cos(x)/x. Values are obtained from
/// upward recurrence when x >= ell and Miller's downward recurrence otherwise,
/// normalized with sum_l (2l+1) j_l(x)^2 = 1.
double spherical_bessel_j(int ell, double x);

/// j_0(x) .. j_lmax(x) into `out` (size lmax + 1).
void spherical_bessel_j_array(int lmax, double x, std::span<double> out);

/// Orthonormal spherical Laguerre function
///   K_p(r) = sqrt(p!/(p+2)!) e^{-r/2} L_p^{(2)}(r),
/// evaluated by the three-term recurrence of the normalized functions.
double laguerre_K(int p, double r);

/// K_0(r) .. K_{count-1}(r) into `out`.
void laguerre_K_array(int count, double r, std::span<double> out);

/// Reference evaluation of L_p^{(2)}(r) by its alternating binomial sum.
/// Only usable for small p; kept for cross-checks against the recurrence.
double laguerre_L2_binomial(int p, double r);

/// Orthonormal spherical harmonic Y_{ell m}(theta, phi), Condon-Shortley phase.
std::complex<double> spherical_harmonic(int ell, int m, double theta, double phi);

/// Y_{ell m}(theta, 0) for ell = m .. lmax and fixed m >= 0 into `out`
/// (size lmax - m + 1). Computed by the normalized ascending recurrence.
void normalized_legendre(int lmax, int m, double theta, std::span<double> out);

/// Legendre polynomial P_n(x) with the convention P_{-1} = 1.
double legendre_p(int n, double x);

/// Wigner 3j symbol (l1 l2 l3; m1 m2 m3). Zero whenever a selection rule fails.
double wigner_3j(int l1, int l2, int l3, int m1, int m2, int m3);

/// Wigner small-d element d^ell_{mn}(beta) = <ell m| exp(-i beta J_y) |ell n>.
double wigner_d(int ell, int m, int n, double beta);

/// Full (2 ell + 1)^2 matrix d^ell(beta); row/column index m + ell.
Eigen::MatrixXd wigner_d_matrix(int ell, double beta);

/// Truncated exponential moment int_{R1}^{R2} e^{-r} r^j dr. R2 may be +inf.
double radial_moment_integral(int j, double r1, double r2);

}  // namespace slepian::specfun
