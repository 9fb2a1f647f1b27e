#include "slepian/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "slepian/errors.hpp"

namespace slepian::quadrature {
namespace {

// Legendre P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre_with_derivative(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

// Orthonormal Laguerre functions u_k(x) = q_k(x) x^{alpha/2} e^{-x/2} for
// k < count, where q_k are orthonormal against x^alpha e^{-x}. The common
// factor keeps magnitudes bounded far out on the real line.
void laguerre_functions(int count, double alpha, double x, std::vector<double>& u) {
  u.assign(count + 1, 0.0);
  u[0] = std::exp(0.5 * alpha * std::log(x) - 0.5 * x - 0.5 * std::lgamma(alpha + 1.0));
  if (count == 0) return;
  u[1] = (x - (alpha + 1.0)) * u[0] / std::sqrt(alpha + 1.0);
  for (int k = 1; k < count; ++k) {
    const double a = std::sqrt((k + 1.0) * (k + 1.0 + alpha));
    const double b = std::sqrt(k * (k + alpha));
    u[k + 1] = ((x - (2.0 * k + alpha + 1.0)) * u[k] - b * u[k - 1]) / a;
  }
}

// Zeros of L_n^{(alpha)} with Golub-Welsch starting values polished by Newton.
std::vector<double> laguerre_zeros(int n, double alpha) {
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int i = 0; i < n; ++i) diag[i] = 2.0 * i + alpha + 1.0;
  for (int i = 1; i < n; ++i) sub[i - 1] = std::sqrt(i * (i + alpha));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  std::vector<double> zeros(solver.eigenvalues().data(), solver.eigenvalues().data() + n);

  std::vector<double> u;
  for (double& x : zeros) {
    for (int it = 0; it < 8; ++it) {
      laguerre_functions(n, alpha, x, u);
      // x q_n' = n q_n + sqrt(n (n + alpha)) q_{n-1}; the common factor cancels.
      const double denom = n * u[n] + std::sqrt(n * (n + alpha)) * u[n - 1];
      if (denom == 0.0) break;
      const double step = x * u[n] / denom;
      x -= step;
      if (std::abs(step) <= 1e-15 * x) break;
    }
  }
  std::sort(zeros.begin(), zeros.end());
  return zeros;
}

}  // namespace

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw ValidationError("gauss_legendre: need at least one node");
  if (!(b > a)) throw ValidationError("gauss_legendre: interval must satisfy b > a");

  QuadratureRule rule;
  rule.kind = QuadratureKind::GaussLegendre;
  rule.nodes.resize(n);
  rule.weights.resize(n);

  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      const auto [p, d] = legendre_with_derivative(n, x);
      dp = d;
      const double dx = p / d;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    dp = legendre_with_derivative(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // i counts from the right end; store ascending.
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.weights[n - 1 - i] = half * w;
    rule.nodes[i] = mid - half * x;
    rule.weights[i] = half * w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = mid;
  return rule;
}

QuadratureRule composite_gauss_legendre(int panels, int n, double a, double b) {
  if (panels < 1) throw ValidationError("composite_gauss_legendre: need at least one panel");
  if (!(b > a)) throw ValidationError("composite_gauss_legendre: interval must satisfy b > a");
  QuadratureRule rule;
  rule.kind = QuadratureKind::GaussLegendre;
  rule.nodes.reserve(static_cast<std::size_t>(panels) * n);
  rule.weights.reserve(static_cast<std::size_t>(panels) * n);
  const double h = (b - a) / panels;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + k * h;
    const double hi = (k + 1 == panels) ? b : lo + h;
    const QuadratureRule panel = gauss_legendre(n, lo, hi);
    rule.nodes.insert(rule.nodes.end(), panel.nodes.begin(), panel.nodes.end());
    rule.weights.insert(rule.weights.end(), panel.weights.begin(), panel.weights.end());
  }
  return rule;
}

QuadratureRule gauss_laguerre(int n, double alpha) {
  if (n < 1) throw ValidationError("gauss_laguerre: need at least one node");
  if (!(alpha > -1.0)) throw ValidationError("gauss_laguerre: alpha must exceed -1");

  QuadratureRule rule;
  rule.kind = QuadratureKind::GaussLaguerre;
  rule.nodes = laguerre_zeros(n, alpha);
  rule.weights.resize(n);
  std::vector<double> u;
  for (int i = 0; i < n; ++i) {
    const double x = rule.nodes[i];
    laguerre_functions(n - 1, alpha, x, u);
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += u[k] * u[k];
    // Christoffel number: x^alpha e^{-x} / sum_k q_k(x)^2, with the weight
    // function already folded into u_k.
    rule.weights[i] = std::exp(alpha * std::log(x) - x) / s;
  }
  return rule;
}

QuadratureRule radial_laguerre(int n) {
  if (n < 1) throw ValidationError("radial_laguerre: need at least one node");
  QuadratureRule rule;
  rule.kind = QuadratureKind::GaussLaguerre;
  rule.nodes = laguerre_zeros(n, 2.0);
  rule.weights.resize(n);
  std::vector<double> u;
  for (int i = 0; i < n; ++i) {
    const double x = rule.nodes[i];
    laguerre_functions(n - 1, 2.0, x, u);
    double s = 0.0;
    // u_k = x K_k(x) up to sign, and the weight for int g r^2 dr is 1 / sum K_k^2.
    for (int k = 0; k < n; ++k) s += u[k] * u[k];
    rule.weights[i] = x * x / s;
  }
  return rule;
}

}  // namespace slepian::quadrature
