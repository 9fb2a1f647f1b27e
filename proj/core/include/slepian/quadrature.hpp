#pragma once

#include <cstddef>
#include <vector>

namespace slepian {

enum class QuadratureKind {
  GaussLegendre,  ///< plain weights on a finite interval
  GaussLaguerre,  ///< nodes of a Laguerre polynomial on [0, inf)
};

/// Immutable set of nodes and positive weights. Nodes are strictly increasing.
struct QuadratureRule {
  QuadratureKind kind = QuadratureKind::GaussLegendre;
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }

  template <class F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

namespace quadrature {

/// n-point Gauss-Legendre rule on [a, b]; exact for polynomials of degree 2n-1.
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// `panels` equal sub-intervals of [a, b], each carrying an n-point Gauss-Legendre rule.
QuadratureRule composite_gauss_legendre(int panels, int n, double a, double b);

/// Generalized Gauss-Laguerre rule for the weight x^alpha e^{-x} on [0, inf).
/// Exact for polynomials of degree 2n-1 against that weight.
QuadratureRule gauss_laguerre(int n, double alpha = 0.0);

/// Rule for integrals of the form int_0^inf g(r) r^2 dr with g = e^{-r} * poly.
/// Nodes are the zeros of L_n^{(2)}; exact whenever deg(poly) <= 2n - 1, in
/// particular for products K_p K_q with p, q < n.
QuadratureRule radial_laguerre(int n);

}  // namespace quadrature
}  // namespace slepian
