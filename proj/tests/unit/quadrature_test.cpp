#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "slepian/errors.hpp"
#include "slepian/quadrature.hpp"
#include "slepian/specfun.hpp"

namespace {

using namespace slepian;

void expect_well_formed(const QuadratureRule& q) {
  for (std::size_t i = 0; i < q.size(); ++i) {
    EXPECT_GT(q.weights[i], 0.0);
    if (i) EXPECT_GT(q.nodes[i], q.nodes[i - 1]);
  }
}

TEST(GaussLegendre, IntegratesMonomialsToDegree) {
  for (int n : {1, 2, 5, 16, 40, 100}) {
    const double a = -0.3;
    const double b = 2.1;
    const QuadratureRule q = quadrature::gauss_legendre(n, a, b);
    ASSERT_EQ(q.size(), static_cast<std::size_t>(n));
    expect_well_formed(q);
    for (int d = 0; d <= 2 * n - 1; ++d) {
      const double exact = (std::pow(b, d + 1) - std::pow(a, d + 1)) / (d + 1);
      const double got = q.integrate([d](double x) { return std::pow(x, d); });
      EXPECT_NEAR(got, exact, 1e-12 * std::max(1.0, std::abs(exact))) << "n=" << n << " d=" << d;
    }
  }
}

TEST(GaussLegendre, CompositePanels) {
  const QuadratureRule q = quadrature::composite_gauss_legendre(7, 6, 15.0, 25.0);
  EXPECT_EQ(q.size(), 42u);
  expect_well_formed(q);
  EXPECT_NEAR(q.integrate([](double x) { return x * x; }), (25.0 * 25 * 25 - 15.0 * 15 * 15) / 3, 1e-10);
  EXPECT_NEAR(q.integrate([](double x) { return std::sin(x); }), std::cos(15.0) - std::cos(25.0), 1e-13);
}

TEST(GaussLegendre, RejectsBadInput) {
  EXPECT_THROW(quadrature::gauss_legendre(0), ValidationError);
  EXPECT_THROW(quadrature::gauss_legendre(3, 1.0, 1.0), ValidationError);
  EXPECT_THROW(quadrature::composite_gauss_legendre(0, 3, 0.0, 1.0), ValidationError);
}

TEST(GaussLaguerre, IntegratesWeightedMonomials) {
  for (double alpha : {0.0, 2.0, 0.5})
    for (int n : {3, 10, 30}) {
      const QuadratureRule q = quadrature::gauss_laguerre(n, alpha);
      expect_well_formed(q);
      for (int d = 0; d <= 2 * n - 1; ++d) {
        const double exact = std::tgamma(d + alpha + 1.0);
        EXPECT_NEAR(q.integrate([d](double x) { return std::pow(x, d); }) / exact, 1.0, 1e-11)
            << "alpha=" << alpha << " n=" << n << " d=" << d;
      }
    }
}

TEST(RadialLaguerre, ExactForLaguerreProducts) {
  const int n = 25;
  const QuadratureRule q = quadrature::radial_laguerre(n);
  std::vector<double> k(n);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < q.size(); ++i) {
    specfun::laguerre_K_array(n, q.nodes[i], k);
    for (int p = 0; p < n; ++p)
      for (int s = 0; s < n; ++s) gram(p, s) += q.weights[i] * k[p] * k[s];
  }
  EXPECT_LT((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-12);
}

}  // namespace
