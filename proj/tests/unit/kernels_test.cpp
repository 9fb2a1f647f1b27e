#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "slepian/concentration.hpp"
#include "slepian/errors.hpp"
#include "slepian/kernels.hpp"
#include "slepian/quadrature.hpp"
#include "slepian/specfun.hpp"

namespace {

using namespace slepian;
using namespace slepian::kernels;
constexpr double kPi = std::numbers::pi;
const double kInf = std::numeric_limits<double>::infinity();

double max_abs(const Eigen::MatrixXd& a) { return a.cwiseAbs().maxCoeff(); }

template <class F>
double adaptive(F f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 12, 1e-13);
}

// Independent angular oracle: 2 pi int Y_lm Y_l'm^* sin t dt from the complex harmonics.
double g_oracle(int l, int lp, int m, double t1, double t2) {
  auto f = [&](double t) {
    return (specfun::spherical_harmonic(l, m, t, 0.0) * std::conj(specfun::spherical_harmonic(lp, m, t, 0.0))).real() *
           std::sin(t);
  };
  return 2 * kPi * adaptive(f, t1, t2);
}

TEST(EMatrix, WholeHalfLineIsIdentity) {
  for (int P : {1, 5, 30}) EXPECT_LT(max_abs(E_matrix(P, 0.0, kInf) - Eigen::MatrixXd::Identity(P, P)), 1e-12);
}

TEST(EMatrix, AnalyticMatchesQuadrature) {
  EXPECT_LT(max_abs(E_matrix(8, 15, 25) - E_matrix_quadrature(8, 15, 25)), 1e-10);
  EXPECT_LT(max_abs(E_matrix(30, 15, 25) - E_matrix_quadrature(30, 15, 25)), 1e-10);
  EXPECT_LT(max_abs(E_matrix(45, 3, 70) - E_matrix_quadrature(45, 3, 70)), 1e-10);
}

TEST(EMatrix, EntriesMatchAdaptiveOracle) {
  const Eigen::MatrixXd e = E_matrix(12, 15, 25);
  for (int p : {0, 3, 11})
    for (int q : {0, 7, 11}) {
      const double ref = adaptive([&](double r) { return r * r * specfun::laguerre_K(p, r) * specfun::laguerre_K(q, r); },
                                  15.0, 25.0);
      EXPECT_NEAR(e(p, q), ref, 1e-12);
    }
}

TEST(EMatrix, SymmetricWithProjectionSpectrum) {
  const Eigen::MatrixXd e = E_matrix(30, 15, 25);
  EXPECT_LT(max_abs(e - e.transpose()), 1e-15);
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(e).eigenvalues();
  EXPECT_GE(ev.minCoeff(), -1e-12);
  EXPECT_LE(ev.maxCoeff(), 1 + 1e-12);
}

TEST(EMatrix, TraceMatchesRadialShannonIntegral) {
  const double ref = adaptive(
      [](double r) {
        double s = 0.0;
        for (int p = 0; p < 30; ++p) s += std::pow(specfun::laguerre_K(p, r), 2);
        return r * r * s;
      },
      15.0, 25.0);
  EXPECT_NEAR(E_matrix(30, 15, 25).trace(), ref, 1e-11);
  EXPECT_NEAR(radial_shannon(30, 15, 25), ref, 1e-11);
}

TEST(EMatrix, RejectsBadInterval) {
  EXPECT_THROW(E_matrix(3, 5, 2), ValidationError);
  EXPECT_THROW(E_matrix(0, 1, 2), ValidationError);
}

TEST(GMatrix, TrivialCases) {
  const Eigen::MatrixXd g = G_matrix(0, 1, 0.0, kPi);
  ASSERT_EQ(g.rows(), 1);
  EXPECT_NEAR(g(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(G_matrix(0, 5, 0.4, 1.3)(0, 0), (std::cos(0.4) - std::cos(1.3)) / 2, 1e-14);
  EXPECT_LT(max_abs(G_matrix(3, 12, 0.0, kPi) - Eigen::MatrixXd::Identity(9, 9)), 1e-13);
}

TEST(GMatrix, MatchesQuadratureAndOracle) {
  for (int m : {0, 2, 7, 19}) {
    const Eigen::MatrixXd g = G_matrix(m, 20, kPi / 8, 3 * kPi / 8);
    EXPECT_LT(max_abs(g - G_matrix_quadrature(m, 20, kPi / 8, 3 * kPi / 8)), 1e-12) << "m=" << m;
    for (int a = 0; a < g.rows(); a += 3)
      for (int b = 0; b < g.cols(); b += 4) EXPECT_NEAR(g(a, b), g_oracle(m + a, m + b, m, kPi / 8, 3 * kPi / 8), 1e-12);
  }
}

TEST(GMatrix, NegativeOrderSymmetry) {
  const Eigen::MatrixXd g = G_matrix(4, 10, 0.3, 1.9);
  for (int a = 0; a < g.rows(); ++a)
    for (int b = 0; b < g.cols(); ++b) EXPECT_NEAR(g(a, b), g_oracle(4 + a, 4 + b, -4, 0.3, 1.9), 1e-12);
}

TEST(GMatrix, AngularShannonClosedForm) {
  const int L = 20;
  double n = 0.0;
  for (int m = 0; m < L; ++m) n += (m == 0 ? 1.0 : 2.0) * G_matrix(m, L, kPi / 8, 3 * kPi / 8).trace();
  EXPECT_NEAR(n, L * L / 2.0 * (std::cos(kPi / 8) - std::cos(3 * kPi / 8)), 1e-9);
}

TEST(GMatrix, ProjectionSpectrum) {
  for (int m : {0, 5}) {
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G_matrix(m, 20, 0.2, 2.0)).eigenvalues();
    EXPECT_GE(ev.minCoeff(), -1e-12);
    EXPECT_LE(ev.maxCoeff(), 1 + 1e-12);
  }
}

TEST(CKernel, ElementaryAntiderivative) {
  for (double k : {0.3, 1.1, 1.9}) {
    const double r1 = 15, r2 = 25;
    const double ref = 2 / kPi * ((r2 - r1) / 2 - (std::sin(2 * k * r2) - std::sin(2 * k * r1)) / (4 * k));
    EXPECT_NEAR(C_kernel(0, 0, k, k, r1, r2), ref, 1e-12);
  }
}

TEST(CKernel, ClosedFormsMatchQuadrature) {
  EXPECT_NEAR(C_kernel(2, 2, 0.8, 1.1, 15, 25), C_kernel_quadrature(2, 2, 0.8, 1.1, 15, 25), 1e-9);
  EXPECT_NEAR(C_kernel(2, 2, 0.8, 0.8, 15, 25), C_kernel_quadrature(2, 2, 0.8, 0.8, 15, 25), 1e-9);
  EXPECT_NEAR(C_kernel(0, 0, 0.8, 1.1, 0, 25), C_kernel_quadrature(0, 0, 0.8, 1.1, 0, 25), 1e-9);
}

TEST(CKernel, MatchesAdaptiveOracle) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> uk(0.05, 2.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int l = static_cast<int>(rng() % 20);
    const int lp = trial % 2 ? l : static_cast<int>(rng() % 20);
    const double k = uk(rng);
    const double kp = trial % 5 == 0 ? k : uk(rng);
    const double ref = 2 / kPi * k * kp *
                       adaptive([&](double r) { return r * r * std::sph_bessel(l, k * r) * std::sph_bessel(lp, kp * r); },
                                15.0, 25.0);
    EXPECT_NEAR(C_kernel(l, lp, k, kp, 15, 25), ref, 1e-9) << l << " " << lp << " " << k << " " << kp;
  }
}

TEST(CKernel, EmptyIntervalAndErrors) {
  EXPECT_EQ(C_kernel(1, 1, 0.5, 0.7, 10, 10), 0.0);
  EXPECT_THROW(C_kernel(1, 1, 0.0, 0.7, 10, 12), ValidationError);
  EXPECT_THROW(C_kernel(-1, 1, 0.5, 0.7, 10, 12), ValidationError);
}

TEST(CKernel, PanelCountResolvesOscillation) {
  EXPECT_EQ(bessel_panels(0.1, 1.0), 32);
  EXPECT_EQ(bessel_panels(2.0, 100.0), static_cast<int>(std::ceil(4 * 2.0 * 100.0 / kPi)));
}

TEST(FlEntry, FullBallIsIdentity) {
  const FourierLaguerreBand band{4, 3};
  const Region ball = Region::full_ball();
  const IndexMap map(band.P, band.L);
  for (std::size_t a = 0; a < map.size(); a += 5)
    for (std::size_t b = 0; b < map.size(); b += 3) {
      const auto v = kernel_fl_entry(ball, band, map.index(a), map.index(b));
      EXPECT_NEAR(std::abs(v - std::complex<double>(a == b ? 1.0 : 0.0)), 0.0, 1e-12);
    }
}

TEST(FlEntry, ProductRegionOrdersDecouple) {
  const FourierLaguerreBand band{4, 5};
  const Region r = Region::product(15, 25, kPi / 8, 3 * kPi / 8);
  EXPECT_EQ(kernel_fl_entry(r, band, {3, 1, 2}, {3, 2, 2}), std::complex<double>(0.0));
  EXPECT_EQ(kernel_fl_entry(r, band, {2, -1, 0}, {4, 1, 1}), std::complex<double>(0.0));
}

TEST(FlEntry, ProductRegionMatchesTwoDimensionalQuadrature) {
  const FourierLaguerreBand band{6, 6};
  const Region r = Region::product(15, 25, kPi / 8, 3 * kPi / 8);
  const QuadratureRule qr = quadrature::composite_gauss_legendre(4, 40, 15, 25);
  const QuadratureRule qt = quadrature::gauss_legendre(30, std::cos(3 * kPi / 8), std::cos(kPi / 8));
  for (const auto& [a, b] : std::vector<std::pair<HarmonicIndex, HarmonicIndex>>{
           {{0, 0, 0}, {0, 0, 0}}, {{3, 2, 1}, {5, 2, 4}}, {{4, -3, 5}, {3, -3, 2}}, {{5, 0, 2}, {1, 0, 2}}}) {
    double ref = 0.0;
    for (std::size_t i = 0; i < qr.size(); ++i)
      for (std::size_t j = 0; j < qt.size(); ++j) {
        const double t = std::acos(qt.nodes[j]);
        const auto y = specfun::spherical_harmonic(a.ell, a.m, t, 0.0) * std::conj(specfun::spherical_harmonic(b.ell, b.m, t, 0.0));
        ref += qr.weights[i] * qt.weights[j] * 2 * kPi * qr.nodes[i] * qr.nodes[i] * specfun::laguerre_K(a.radial, qr.nodes[i]) *
               specfun::laguerre_K(b.radial, qr.nodes[i]) * y.real();
      }
    EXPECT_NEAR(kernel_fl_entry(r, band, a, b).real(), ref, 1e-10);
  }
}

TEST(FixedOrder, ProductBlockIsKroneckerOfFactors) {
  const FourierLaguerreBand band{5, 6};
  const Region r = Region::product(10, 20, 0.2, 1.0);
  const KernelMatrix k = kernel_fl_fixed_order(2, band, r);
  const Eigen::MatrixXd e = E_matrix(5, 10, 20);
  const Eigen::MatrixXd g = G_matrix(2, 6, 0.2, 1.0);
  ASSERT_EQ(k.size(), g.rows() * e.rows());
  for (Eigen::Index a = 0; a < k.size(); ++a)
    for (Eigen::Index b = 0; b < k.size(); ++b)
      EXPECT_NEAR(k.re(a, b), g(a / 5, b / 5) * e(a % 5, b % 5), 1e-15);
  EXPECT_TRUE(k.is_real());
}

TEST(Mask, FullSkyIsIdentity) {
  const Eigen::MatrixXcd g = G_mask(AngularMask::full_sphere(10), 10);
  EXPECT_LT((g - Eigen::MatrixXcd::Identity(100, 100)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Mask, BandMaskMatchesAxisymmetricFactor) {
  const int L = 12;
  const double t1 = kPi / 8, t2 = 3 * kPi / 8;
  const Eigen::MatrixXcd g = G_mask(AngularMask::rectangles(L, {{t1, t2, 0.0, 2 * kPi}}), L);
  for (int l = 0; l < L; ++l)
    for (int m = -l; m <= l; ++m)
      for (int lp = 0; lp < L; ++lp)
        for (int mp = -lp; mp <= lp; ++mp) {
          const auto v = g(IndexMap::angular_slot(l, m), IndexMap::angular_slot(lp, mp));
          const double ref = m == mp ? G_matrix(m, L, t1, t2)(l - std::abs(m), lp - std::abs(m)) : 0.0;
          EXPECT_NEAR(std::abs(v - ref), 0.0, 1e-10);
        }
}

TEST(Mask, TraceFactorsIntoShannonNumber) {
  const FourierLaguerreBand band{10, 12};
  const AngularMask mask = AngularMask::rectangles(12, {{0.4, 1.1, 0.5, 2.5}, {1.9, 2.3, 3.8, 4.6}});
  const Region r = Region::masked(mask, 8, 13);
  const SeparableKernel k = kernel_fl_mask(band, r);
  const double lhs = k.E.trace() * k.G.trace().real();
  const double rhs = radial_shannon(10, 8, 13) * 144 / (4 * kPi) * mask.solid_angle();
  EXPECT_NEAR(lhs / rhs, 1.0, 1e-8);
  EXPECT_NEAR(shannon_fl(r, band) / rhs, 1.0, 1e-12);
}

TEST(Mask, GridTooCoarseRejected) {
  EXPECT_THROW(G_mask(AngularMask::full_sphere(5), 8), ValidationError);
}

TEST(Mask, MaterializedProductIsHermitian) {
  const FourierLaguerreBand band{3, 5};
  const AngularMask mask = AngularMask::rectangles(5, {{0.4, 1.1, 0.5, 2.5}});
  const KernelMatrix k = kernel_fl_mask(band, Region::masked(mask, 2, 9)).materialize();
  EXPECT_EQ(k.size(), 75);
  EXPECT_LT(k.hermitian_defect(), 1e-12);
  const KernelMatrix d = kernel_fl_dense(band, Region::masked(mask, 2, 9));
  EXPECT_LT((k.complex_matrix() - d.complex_matrix()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Dense, OrientedKernelIsRotatedBase) {
  const FourierLaguerreBand band{3, 5};
  const Region base = Region::product(2, 8, 0.0, 0.5);
  const Orientation o{0.9, 2.1};
  const KernelMatrix k = kernel_fl_dense(band, base.oriented(o.theta0, o.phi0));
  EXPECT_LT(k.hermitian_defect(), 1e-12);
  const Eigen::MatrixXcd d = rotation_operator(band.L, band.P, o);
  const Eigen::MatrixXcd ref = d * kernel_fl_dense(band, base).complex_matrix() * d.adjoint();
  EXPECT_LT((k.complex_matrix() - ref).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(k.complex_matrix().trace().real(), shannon_fl(base, band), 1e-10);
}

TEST(Dense, DimensionLimit) {
  EXPECT_THROW(kernel_fl_dense({10, 10}, Region::product(1, 2, 0, 1), 500), ValidationError);
}

TEST(FourierBessel, BlockSymmetricWithBoundedSpectrum) {
  const FourierBesselBand band{1.0, 6, 25};
  const Region r = Region::product(5, 12, 0.3, 1.2);
  for (int m : {0, 3}) {
    const KernelMatrix k = kernel_fb_fixed_order(m, band, r);
    EXPECT_EQ(k.domain, KernelDomain::FourierBessel);
    EXPECT_LT(k.hermitian_defect(), 1e-12);
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(k.re).eigenvalues();
    EXPECT_GE(ev.minCoeff(), -1e-9);
    EXPECT_LE(ev.maxCoeff(), 1 + 1e-9);
    ASSERT_EQ(k.weights.size(), k.size());
  }
}

TEST(FourierBessel, EntriesAreWeightedCouplingTimesAngular) {
  const FourierBesselBand band{1.2, 4, 10};
  const Region r = Region::product(5, 12, 0.3, 1.2);
  const KernelMatrix k = kernel_fb_fixed_order(1, band, r);
  const Eigen::MatrixXd g = G_matrix(1, 4, 0.3, 1.2);
  for (Eigen::Index a = 0; a < k.size(); a += 3)
    for (Eigen::Index b = 0; b < k.size(); b += 2) {
      const auto& ia = k.indices[a];
      const auto& ib = k.indices[b];
      const double ka = band.sample(ia.radial + 1);
      const double kb = band.sample(ib.radial + 1);
      const double ref = std::sqrt(band.weight(ia.radial + 1) * band.weight(ib.radial + 1)) *
                         C_kernel_quadrature(ia.ell, ib.ell, ka, kb, 5, 12) * g(ia.ell - 1, ib.ell - 1);
      EXPECT_NEAR(k.re(a, b), ref, 1e-11);
    }
}

TEST(FourierBessel, TraceNearAnalyticShannon) {
  const FourierBesselBand band{1.4, 20, 70};
  const Region r = Region::product(15, 25, kPi / 8, 3 * kPi / 8);
  const Eigen::MatrixXd c = fb_radial_couplings(band, 15, 25);
  double tr = 0.0;
  for (int m = 0; m < band.L; ++m) tr += (m == 0 ? 1.0 : 2.0) * kernel_fb_fixed_order(m, band, r, &c).re.trace();
  EXPECT_NEAR(tr / shannon_fb(r, band), 1.0, 0.01);
}

}  // namespace
