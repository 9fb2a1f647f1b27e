#include "slepian/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "slepian/errors.hpp"
#include "slepian/parallel.hpp"
#include "slepian/quadrature.hpp"
#include "slepian/specfun.hpp"

namespace slepian::kernels {
namespace {

using mp = boost::multiprecision::cpp_bin_float_100;

constexpr double kPi = std::numbers::pi;
constexpr int kBinomialDegreeLimit = 60;
constexpr int kBesselNodesPerPanel = 16;

void check_interval(double r1, double r2, const char* who) {
  if (!(r1 >= 0.0) || !std::isfinite(r1)) throw ValidationError(std::string(who) + ": R1 must be finite and >= 0");
  if (!(r2 >= r1)) throw ValidationError(std::string(who) + ": R2 must be >= R1");
}

void check_band(const FourierLaguerreBand& band) { validate(SpectralBand{band}); }

// Rows K_p(r_i) sqrt(w_i r_i^2) of a radial rule, so E = Phi Phi^T.
Eigen::MatrixXd radial_design(int P, const std::vector<double>& r, const std::vector<double>& w, double scale = 1.0) {
  Eigen::MatrixXd phi(P, static_cast<Eigen::Index>(r.size()));
  std::vector<double> k(P);
  for (std::size_t i = 0; i < r.size(); ++i) {
    specfun::laguerre_K_array(P, r[i], k);
    const double s = std::sqrt(w[i]) * r[i] * scale;
    for (int p = 0; p < P; ++p) phi(p, static_cast<Eigen::Index>(i)) = k[p] * s;
  }
  return phi;
}

// int_{r1}^{inf} r^2 K_p K_q dr on a Gauss-Laguerre rule shifted to r1.
Eigen::MatrixXd E_tail(int P, double r1) {
  const QuadratureRule q = quadrature::gauss_laguerre(P + 8);
  Eigen::MatrixXd phi(P, static_cast<Eigen::Index>(q.size()));
  std::vector<double> k(P);
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double s = q.nodes[i];
    const double r = s + r1;
    specfun::laguerre_K_array(P, r, k);
    // The rule carries e^{-s}; e^{s/2} per factor undoes it.
    const double scale = std::sqrt(q.weights[i]) * std::exp(0.5 * s) * r;
    for (int p = 0; p < P; ++p) phi(p, static_cast<Eigen::Index>(i)) = k[p] * scale;
  }
  return phi * phi.transpose();
}

Eigen::MatrixXd E_finite_quadrature(int P, double r1, double r2) {
  if (r2 == r1) return Eigen::MatrixXd::Zero(P, P);
  const int panels = std::max(1, static_cast<int>(std::ceil((r2 - r1) / 8.0)));
  const QuadratureRule q = quadrature::composite_gauss_legendre(panels, 2 * P + 16, r1, r2);
  const Eigen::MatrixXd phi = radial_design(P, q.nodes, q.weights);
  return phi * phi.transpose();
}

// Exponential moments mu_n = int_{r1}^{r2} e^{-r} r^n dr
//   = n! sum_{a<=n} (e^{-r1} r1^a - e^{-r2} r2^a) / a!
std::vector<mp> exponential_moments(int nmax, double r1, double r2) {
  std::vector<mp> mu(nmax + 1);
  const mp a1 = r1;
  const bool infinite = std::isinf(r2);
  const mp a2 = infinite ? mp(0) : mp(r2);
  const mp e1 = exp(-a1);
  const mp e2 = infinite ? mp(0) : mp(exp(-a2));
  mp t1 = e1;  // e^{-r1} r1^a / a!
  mp t2 = e2;
  mp partial = t1 - t2;
  mp factorial = 1;
  mu[0] = partial;
  for (int n = 1; n <= nmax; ++n) {
    t1 *= a1 / n;
    t2 *= a2 / n;
    partial += t1 - t2;
    factorial *= n;
    mu[n] = factorial * partial;
  }
  return mu;
}

double legendre_bracket(int j, double x1, double x2) {
  return specfun::legendre_p(j - 1, x2) + specfun::legendre_p(j + 1, x1) - specfun::legendre_p(j + 1, x2) -
         specfun::legendre_p(j - 1, x1);
}

// T(l, k, R) = R^3 (j_l(kR)^2 - j_{l-1}(kR) j_{l+1}(kR))
double bessel_T(int ell, double k, double r) {
  if (r == 0.0) return 0.0;
  const double x = k * r;
  const double jl = specfun::spherical_bessel_j(ell, x);
  return r * r * r * (jl * jl - specfun::spherical_bessel_j(ell - 1, x) * specfun::spherical_bessel_j(ell + 1, x));
}

// R^2 (k' j_{l-1}(k'R) j_l(kR) - k j_{l-1}(kR) j_l(k'R))
double bessel_cross(int ell, double k, double kp, double r) {
  if (r == 0.0) return 0.0;
  using specfun::spherical_bessel_j;
  return r * r *
         (kp * spherical_bessel_j(ell - 1, kp * r) * spherical_bessel_j(ell, k * r) -
          k * spherical_bessel_j(ell - 1, k * r) * spherical_bessel_j(ell, kp * r));
}


// Y_{l m}(theta_j, 0) for l = |m| .. L-1 at each theta; rows l - |m|.
Eigen::MatrixXd legendre_table(int m, int L, const std::vector<double>& theta) {
  const int am = std::abs(m);
  const int n = L - am;
  Eigen::MatrixXd y(n, static_cast<Eigen::Index>(theta.size()));
  std::vector<double> col(n);
  const double sign = (m < 0 && (am % 2 == 1)) ? -1.0 : 1.0;
  for (std::size_t j = 0; j < theta.size(); ++j) {
    specfun::normalized_legendre(L - 1, am, theta[j], col);
    for (int i = 0; i < n; ++i) y(i, static_cast<Eigen::Index>(j)) = sign * col[i];
  }
  return y;
}

std::vector<HarmonicIndex> order_indices(int m, int L, int radial) {
  std::vector<HarmonicIndex> idx;
  for (int ell = std::abs(m); ell < L; ++ell)
    for (int r = 0; r < radial; ++r) idx.push_back({ell, m, r});
  return idx;
}

// kron(G, E): row (l, p) = l * P + p.
Eigen::MatrixXd kron(const Eigen::MatrixXd& g, const Eigen::MatrixXd& e) {
  Eigen::MatrixXd out(g.rows() * e.rows(), g.cols() * e.cols());
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j) out.block(i * e.rows(), j * e.cols(), e.rows(), e.cols()) = g(i, j) * e;
  return out;
}

void require_unoriented(const Region& region, const char* who) {
  if (region.orientation()) throw ValidationError(std::string(who) + ": oriented regions need the dense path");
}

Eigen::MatrixXd fl_axisymmetric_block(int m, const FourierLaguerreBand& band, const AzimuthallySymmetric& s) {
  const int P = band.P;
  const int nl = band.L - std::abs(m);
  std::vector<std::pair<std::size_t, std::size_t>> inside;
  for (std::size_t i = 0; i < s.r_nodes.size(); ++i)
    for (std::size_t j = 0; j < s.theta_nodes.size(); ++j)
      if (s.inside_node(i, j)) inside.emplace_back(i, j);
  const Eigen::MatrixXd y = legendre_table(m, band.L, s.theta_nodes);
  Eigen::MatrixXd kr(P, static_cast<Eigen::Index>(s.r_nodes.size()));
  std::vector<double> k(P);
  for (std::size_t i = 0; i < s.r_nodes.size(); ++i) {
    specfun::laguerre_K_array(P, s.r_nodes[i], k);
    for (int p = 0; p < P; ++p) kr(p, static_cast<Eigen::Index>(i)) = k[p];
  }
  Eigen::MatrixXd a(static_cast<Eigen::Index>(nl) * P, static_cast<Eigen::Index>(inside.size()));
  for (std::size_t c = 0; c < inside.size(); ++c) {
    const auto [i, j] = inside[c];
    const double sw = std::sqrt(2.0 * kPi * s.r_weights[i] * s.theta_weights[j]);
    for (int l = 0; l < nl; ++l)
      for (int p = 0; p < P; ++p)
        a(static_cast<Eigen::Index>(l) * P + p, static_cast<Eigen::Index>(c)) =
            sw * y(l, static_cast<Eigen::Index>(j)) * kr(p, static_cast<Eigen::Index>(i));
  }
  return a * a.transpose();
}

Eigen::MatrixXd fl_block_unoriented(int m, const FourierLaguerreBand& band, const Region::Shape& shape) {
  return std::visit(
      [&](const auto& s) -> Eigen::MatrixXd {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ProductSymmetric>) {
          return kron(G_matrix(m, band.L, s.theta_min, s.theta_max), E_matrix(band.P, s.r_min, s.r_max));
        } else if constexpr (std::is_same_v<T, AzimuthallySymmetric>) {
          return fl_axisymmetric_block(m, band, s);
        } else if constexpr (std::is_same_v<T, DisjointUnion>) {
          const Eigen::Index n = static_cast<Eigen::Index>(band.L - std::abs(m)) * band.P;
          Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
          for (const auto& part : s.parts)
            sum += kron(G_matrix(m, band.L, part.theta_min, part.theta_max), E_matrix(band.P, part.r_min, part.r_max));
          return sum;
        } else {
          throw ValidationError("fixed-order kernel: mask regions are not azimuthally symmetric");
        }
      },
      shape);
}

// Full kernel of an unoriented region in IndexMap order.
Eigen::MatrixXcd fl_dense_unoriented(const FourierLaguerreBand& band, const Region& region) {
  if (region.as<ProductMask>()) {
    SeparableKernel sep = kernel_fl_mask(band, region);
    return sep.materialize().complex_matrix();
  }
  const IndexMap map(band.P, band.L);
  const auto n = static_cast<Eigen::Index>(map.size());
  Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(n, n);
  for (int m = 0; m < band.L; ++m) {
    const Eigen::MatrixXd block = fl_block_unoriented(m, band, region.shape());
    for (const int sm : signed_orders(m)) {
      const auto idx = order_indices(sm, band.L, band.P);
      for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = 0; b < idx.size(); ++b)
          k(static_cast<Eigen::Index>(map.flat(idx[a])), static_cast<Eigen::Index>(map.flat(idx[b]))) =
              block(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
  }
  return k;
}

KernelMatrix make_kernel(KernelDomain domain, SpectralBand band, std::optional<int> order,
                         std::vector<HarmonicIndex> idx, Eigen::MatrixXd re, Eigen::MatrixXd im = {}) {
  KernelMatrix k;
  k.domain = domain;
  k.band = band;
  k.order = order;
  k.indices = std::move(idx);
  k.re = std::move(re);
  k.im = std::move(im);
  k.weights = Eigen::VectorXd::Ones(k.re.rows());
  return k;
}

std::vector<HarmonicIndex> all_indices(const IndexMap& map) {
  std::vector<HarmonicIndex> idx(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) idx[i] = map.index(i);
  return idx;
}

}  // namespace

Eigen::MatrixXcd KernelMatrix::complex_matrix() const {
  Eigen::MatrixXcd c = re.cast<std::complex<double>>();
  if (!is_real()) c += std::complex<double>(0.0, 1.0) * im.cast<std::complex<double>>();
  return c;
}

double KernelMatrix::hermitian_defect() const {
  const double scale = std::max(re.cwiseAbs().maxCoeff(), is_real() ? 0.0 : im.cwiseAbs().maxCoeff());
  if (scale == 0.0) return 0.0;
  double d = (re - re.transpose()).cwiseAbs().maxCoeff();
  if (!is_real()) d = std::max(d, (im + im.transpose()).cwiseAbs().maxCoeff());
  return d / scale;
}

// ---------------------------------------------------------------------------
// radial coupling E

Eigen::MatrixXd E_matrix_quadrature(int P, double r1, double r2) {
  if (P < 1) throw ValidationError("E matrix: P must be >= 1");
  check_interval(r1, r2, "E matrix");
  if (std::isinf(r2)) return E_tail(P, r1);
  return E_finite_quadrature(P, r1, r2);
}

Eigen::MatrixXd E_matrix(int P, double r1, double r2) {
  if (P < 1) throw ValidationError("E matrix: P must be >= 1");
  check_interval(r1, r2, "E matrix");
  if (r1 == r2) return Eigen::MatrixXd::Zero(P, P);

  const int pa = std::min(P, kBinomialDegreeLimit + 1);
  const std::vector<mp> mu = exponential_moments(2 * pa + 2, r1, r2);

  // a(p, j) = (-1)^j binom(p+2, p-j) / j!  times sqrt(p!/(p+2)!)
  std::vector<std::vector<mp>> a(pa);
  for (int p = 0; p < pa; ++p) {
    a[p].resize(p + 1);
    mp binom = 1;  // binom(p+2, p-j) starting at j = p: binom(p+2, 0)
    std::vector<mp> b(p + 1);
    for (int j = p; j >= 0; --j) {
      b[j] = binom;
      // binom(p+2, p-j+1) = binom(p+2, p-j) * (j+2) / (p-j+1)
      binom = binom * (j + 2) / (p - j + 1);
    }
    mp jfact = 1;
    const mp norm = 1 / sqrt(mp((p + 1) * (p + 2)));
    for (int j = 0; j <= p; ++j) {
      if (j > 0) jfact *= j;
      a[p][j] = ((j % 2 == 0) ? 1 : -1) * norm * b[j] / jfact;
    }
  }

  Eigen::MatrixXd e(P, P);
  Eigen::MatrixXd quad;
  bool need_quad = P > pa;
  for (int p = 0; p < pa; ++p) {
    for (int q = p; q < pa; ++q) {
      if (p + q > kBinomialDegreeLimit) {
        need_quad = true;
        continue;
      }
      mp sum = 0;
      double magnitude = 0.0;
      for (int j = 0; j <= p; ++j) {
        mp inner = 0;
        for (int jj = 0; jj <= q; ++jj) inner += a[q][jj] * mu[j + jj + 2];
        const mp term = a[p][j] * inner;
        sum += term;
        magnitude = std::max(magnitude, static_cast<double>(abs(term)));
      }
      const double v = static_cast<double>(sum);
      // 100 digits leave ample room; anything worse goes to quadrature.
      if (magnitude * 1e-90 > 1e-16 * std::max(std::abs(v), 1e-300)) {
        need_quad = true;
        e(p, q) = std::numeric_limits<double>::quiet_NaN();
      } else {
        e(p, q) = v;
      }
      e(q, p) = e(p, q);
    }
  }
  if (need_quad) {
    quad = E_matrix_quadrature(P, r1, r2);
    for (int p = 0; p < P; ++p)
      for (int q = p; q < P; ++q)
        if (p >= pa || q >= pa || p + q > kBinomialDegreeLimit || std::isnan(e(p, q))) e(p, q) = e(q, p) = quad(p, q);
  }
  return e;
}

// ---------------------------------------------------------------------------
// angular coupling G

Eigen::MatrixXd G_matrix(int m, int L, double theta1, double theta2) {
  const int am = std::abs(m);
  if (L < 1 || am >= L) throw ValidationError("G matrix: need 0 <= |m| < L");
  if (!(theta1 >= 0.0 && theta2 <= kPi && theta2 >= theta1))
    throw ValidationError("G matrix: need 0 <= theta1 <= theta2 <= pi");
  const double x1 = std::cos(theta1);
  const double x2 = std::cos(theta2);
  std::vector<double> bracket(2 * L + 1);
  for (int j = 0; j <= 2 * L; ++j) bracket[j] = legendre_bracket(j, x1, x2);

  const int n = L - am;
  Eigen::MatrixXd g(n, n);
  const double phase = (am % 2 == 0) ? 1.0 : -1.0;
  for (int l = am; l < L; ++l) {
    for (int lp = l; lp < L; ++lp) {
      double sum = 0.0;
      for (int j = lp - l; j <= l + lp; ++j) {
        if ((l + j + lp) % 2 != 0) continue;
        const double w0 = specfun::wigner_3j(l, j, lp, 0, 0, 0);
        if (w0 == 0.0) continue;
        sum += w0 * specfun::wigner_3j(l, j, lp, am, 0, -am) * bracket[j];
      }
      const double v = phase * std::sqrt((2.0 * l + 1.0) * (2.0 * lp + 1.0)) * 0.5 * sum;
      g(l - am, lp - am) = v;
      g(lp - am, l - am) = v;
    }
  }
  return g;
}

Eigen::MatrixXd G_matrix_quadrature(int m, int L, double theta1, double theta2) {
  const int am = std::abs(m);
  if (L < 1 || am >= L) throw ValidationError("G matrix: need 0 <= |m| < L");
  const QuadratureRule q = quadrature::gauss_legendre(L + 1, std::cos(theta2), std::cos(theta1));
  std::vector<double> theta(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) theta[i] = std::acos(std::clamp(q.nodes[i], -1.0, 1.0));
  Eigen::MatrixXd y = legendre_table(am, L, theta);
  for (std::size_t i = 0; i < q.size(); ++i) y.col(static_cast<Eigen::Index>(i)) *= std::sqrt(2.0 * kPi * q.weights[i]);
  return y * y.transpose();
}

// ---------------------------------------------------------------------------
// Fourier-Bessel radial coupling C

int bessel_panels(double k_max, double r2) {
  return std::max(32, static_cast<int>(std::ceil(4.0 * k_max * r2 / kPi)));
}

double C_kernel_quadrature(int ell, int ell_p, double k, double k_p, double r1, double r2) {
  if (ell < 0 || ell_p < 0) throw ValidationError("C kernel: degrees must be >= 0");
  if (!(k > 0.0) || !(k_p > 0.0)) throw ValidationError("C kernel: k, k' must be positive");
  check_interval(r1, r2, "C kernel");
  if (!std::isfinite(r2)) throw ValidationError("C kernel: R2 must be finite");
  if (r1 == r2) return 0.0;
  const QuadratureRule q =
      quadrature::composite_gauss_legendre(bessel_panels(std::max(k, k_p), r2), kBesselNodesPerPanel, r1, r2);
  double sum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double r = q.nodes[i];
    sum += q.weights[i] * r * r * specfun::spherical_bessel_j(ell, k * r) * specfun::spherical_bessel_j(ell_p, k_p * r);
  }
  return 2.0 / kPi * k * k_p * sum;
}

double C_kernel(int ell, int ell_p, double k, double k_p, double r1, double r2) {
  if (ell < 0 || ell_p < 0) throw ValidationError("C kernel: degrees must be >= 0");
  if (!(k > 0.0) || !(k_p > 0.0)) throw ValidationError("C kernel: k, k' must be positive");
  check_interval(r1, r2, "C kernel");
  if (!std::isfinite(r2)) throw ValidationError("C kernel: R2 must be finite");
  if (r1 == r2) return 0.0;
  if (ell != ell_p) return C_kernel_quadrature(ell, ell_p, k, k_p, r1, r2);
  if (k == k_p) {
    // The difference is T(R2) - T(R1); the printed form repeats R2.
    return k * k / kPi * (bessel_T(ell, k, r2) - bessel_T(ell, k, r1));
  }
  // The cross-product form divides by k^2 - k'^2 and loses digits as k' -> k.
  if (std::abs(k - k_p) < 1e-3 * std::max(k, k_p)) return C_kernel_quadrature(ell, ell_p, k, k_p, r1, r2);
  return 2.0 * k * k_p / (kPi * (k * k - k_p * k_p)) *
         (bessel_cross(ell, k, k_p, r2) - bessel_cross(ell, k, k_p, r1));
}

Eigen::MatrixXd fb_radial_couplings(const FourierBesselBand& band, double r1, double r2) {
  validate(SpectralBand{band});
  check_interval(r1, r2, "C couplings");
  if (!std::isfinite(r2)) throw ValidationError("Fourier-Bessel kernels need a finite R2");
  const int L = band.L;
  const int M = band.M;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(L) * M, static_cast<Eigen::Index>(L) * M);
  if (r1 == r2) return c;

  const QuadratureRule q =
      quadrature::composite_gauss_legendre(bessel_panels(band.K, r2), kBesselNodesPerPanel, r1, r2);
  const auto nq = static_cast<Eigen::Index>(q.size());
  // tab[l](n, i) = sqrt(2/pi) k_n j_l(k_n r_i) r_i sqrt(w_i)
  std::vector<Eigen::MatrixXd> tab(L, Eigen::MatrixXd(M, nq));
  parallel_for(static_cast<std::size_t>(M), [&](std::size_t n) {
    std::vector<double> j(L);
    const double k = band.sample(static_cast<int>(n) + 1);
    for (Eigen::Index i = 0; i < nq; ++i) {
      const double r = q.nodes[i];
      specfun::spherical_bessel_j_array(L - 1, k * r, j);
      const double s = std::sqrt(2.0 / kPi) * k * r * std::sqrt(q.weights[i]);
      for (int l = 0; l < L; ++l) tab[l](static_cast<Eigen::Index>(n), i) = s * j[l];
    }
  });

  std::vector<std::pair<int, int>> pairs;
  for (int l = 0; l < L; ++l)
    for (int lp = l; lp < L; ++lp) pairs.emplace_back(l, lp);
  parallel_for(pairs.size(), [&](std::size_t t) {
    const auto [l, lp] = pairs[t];
    Eigen::MatrixXd block;
    if (l == lp) {
      block.resize(M, M);
      for (int a = 0; a < M; ++a)
        for (int b = a; b < M; ++b)
          block(a, b) = block(b, a) = C_kernel(l, l, band.sample(a + 1), band.sample(b + 1), r1, r2);
    } else {
      block = tab[l] * tab[lp].transpose();
    }
    c.block(static_cast<Eigen::Index>(l) * M, static_cast<Eigen::Index>(lp) * M, M, M) = block;
    if (l != lp) c.block(static_cast<Eigen::Index>(lp) * M, static_cast<Eigen::Index>(l) * M, M, M) = block.transpose();
  });
  return c;
}

// ---------------------------------------------------------------------------
// Fourier-Laguerre kernels

std::complex<double> kernel_fl_entry(const Region& region, const FourierLaguerreBand& band, const HarmonicIndex& a,
                                     const HarmonicIndex& b) {
  check_band(band);
  const IndexMap map(band.P, band.L);
  if (!map.contains(a) || !map.contains(b)) throw ValidationError("kernel entry: index outside band");

  if (region.orientation()) {
    // Entry of D K D^H, with D the Wigner-D rotation.
    const Orientation& o = *region.orientation();
    const Region base = region.unoriented();
    const Eigen::MatrixXd da = specfun::wigner_d_matrix(a.ell, o.theta0);
    const Eigen::MatrixXd db = specfun::wigner_d_matrix(b.ell, o.theta0);
    std::complex<double> sum = 0.0;
    // The unrotated kernel is diagonal in m, so one sum over n remains.
    for (int n = -std::min(a.ell, b.ell); n <= std::min(a.ell, b.ell); ++n) {
      const double w = da(a.m + a.ell, n + a.ell) * db(b.m + b.ell, n + b.ell);
      if (w == 0.0) continue;
      sum += w * kernel_fl_entry(base, band, {a.ell, n, a.radial}, {b.ell, n, b.radial});
    }
    return std::polar(1.0, -(a.m - b.m) * o.phi0) * sum;
  }

  return std::visit(
      [&](const auto& s) -> std::complex<double> {
        using T = std::decay_t<decltype(s)>;
        const int pmax = std::max(a.radial, b.radial) + 1;
        if constexpr (std::is_same_v<T, ProductMask>) {
          const Eigen::MatrixXd e = E_matrix(pmax, s.r_min, s.r_max);
          std::complex<double> g = 0.0;
          for (const auto& px : s.mask.pixels())
            if (px.inside)
              g += px.weight * specfun::spherical_harmonic(a.ell, a.m, px.theta, px.phi) *
                   std::conj(specfun::spherical_harmonic(b.ell, b.m, px.theta, px.phi));
          return e(a.radial, b.radial) * g;
        } else {
          if (a.m != b.m) return 0.0;
          const int lmax = std::max(a.ell, b.ell) + 1;
          const int am = std::abs(a.m);
          auto product_entry = [&](const ProductSymmetric& p) {
            const Eigen::MatrixXd e = E_matrix(pmax, p.r_min, p.r_max);
            const Eigen::MatrixXd g = G_matrix(am, lmax, p.theta_min, p.theta_max);
            return e(a.radial, b.radial) * g(a.ell - am, b.ell - am);
          };
          if constexpr (std::is_same_v<T, ProductSymmetric>) {
            return product_entry(s);
          } else if constexpr (std::is_same_v<T, DisjointUnion>) {
            double sum = 0.0;
            for (const auto& p : s.parts) sum += product_entry(p);
            return sum;
          } else {
            double sum = 0.0;
            std::vector<double> k(pmax);
            for (std::size_t i = 0; i < s.r_nodes.size(); ++i) {
              specfun::laguerre_K_array(pmax, s.r_nodes[i], k);
              const double rad = s.r_weights[i] * k[a.radial] * k[b.radial];
              for (std::size_t j = 0; j < s.theta_nodes.size(); ++j) {
                if (!s.inside_node(i, j)) continue;
                const double t = s.theta_nodes[j];
                sum += rad * s.theta_weights[j] * specfun::spherical_harmonic(a.ell, a.m, t, 0.0).real() *
                       specfun::spherical_harmonic(b.ell, b.m, t, 0.0).real();
              }
            }
            return 2.0 * kPi * sum;
          }
        }
      },
      region.shape());
}

KernelMatrix kernel_fl_fixed_order(int m, const FourierLaguerreBand& band, const Region& region) {
  check_band(band);
  if (std::abs(m) >= band.L) throw ValidationError("fixed-order kernel: need |m| < L");
  require_unoriented(region, "fixed-order kernel");
  return make_kernel(KernelDomain::FourierLaguerre, band, m, order_indices(m, band.L, band.P),
                     fl_block_unoriented(m, band, region.shape()));
}

Eigen::MatrixXcd G_mask(const AngularMask& mask, int L) {
  if (L < 1) throw ValidationError("mask kernel: L must be >= 1");
  if (mask.grid_band_limit() < L)
    throw ValidationError("mask kernel: grid band-limit " + std::to_string(mask.grid_band_limit()) +
                          " is below L = " + std::to_string(L));
  std::vector<const MaskPixel*> inside;
  for (const auto& p : mask.pixels())
    if (p.inside) inside.push_back(&p);
  const auto n = static_cast<Eigen::Index>(L) * L;
  Eigen::MatrixXcd y(n, static_cast<Eigen::Index>(inside.size()));
  std::vector<double> leg(L);
  for (std::size_t c = 0; c < inside.size(); ++c) {
    const MaskPixel& px = *inside[c];
    const double sw = std::sqrt(px.weight);
    for (int m = 0; m < L; ++m) {
      specfun::normalized_legendre(L - 1, m, px.theta, std::span<double>(leg.data(), L - m));
      const std::complex<double> e = std::polar(1.0, m * px.phi);
      const double sign = (m % 2 == 0) ? 1.0 : -1.0;
      for (int l = m; l < L; ++l) {
        const std::complex<double> v = sw * leg[l - m] * e;
        y(static_cast<Eigen::Index>(IndexMap::angular_slot(l, m)), static_cast<Eigen::Index>(c)) = v;
        if (m > 0) y(static_cast<Eigen::Index>(IndexMap::angular_slot(l, -m)), static_cast<Eigen::Index>(c)) = sign * std::conj(v);
      }
    }
  }
  Eigen::MatrixXcd g = y * y.adjoint();
  // Exact Hermitian symmetry.
  g = 0.5 * (g + g.adjoint()).eval();
  return g;
}

SeparableKernel kernel_fl_mask(const FourierLaguerreBand& band, const Region& region) {
  check_band(band);
  const auto* s = region.as<ProductMask>();
  if (!s) throw ValidationError("mask kernel: region is not a mask product");
  SeparableKernel k;
  k.band = band;
  k.E = E_matrix(band.P, s->r_min, s->r_max);
  k.G = G_mask(s->mask, band.L);
  return k;
}

KernelMatrix SeparableKernel::materialize() const {
  const IndexMap map(band.P, band.L);
  const auto n = static_cast<Eigen::Index>(map.size());
  const Eigen::Index P = band.P;
  Eigen::MatrixXd re(n, n);
  Eigen::MatrixXd im(n, n);
  for (Eigen::Index i = 0; i < G.rows(); ++i) {
    for (Eigen::Index j = 0; j < G.cols(); ++j) {
      re.block(i * P, j * P, P, P) = G(i, j).real() * E;
      im.block(i * P, j * P, P, P) = G(i, j).imag() * E;
    }
  }
  return make_kernel(KernelDomain::FourierLaguerre, band, std::nullopt, all_indices(map), std::move(re),
                     std::move(im));
}

Eigen::MatrixXcd rotation_operator(int L, int radial_count, const Orientation& o) {
  const IndexMap map(radial_count, L);
  const auto n = static_cast<Eigen::Index>(map.size());
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(n, n);
  for (int l = 0; l < L; ++l) {
    const Eigen::MatrixXd dl = specfun::wigner_d_matrix(l, o.theta0);
    for (int m = -l; m <= l; ++m) {
      const std::complex<double> ph = std::polar(1.0, -m * o.phi0);
      for (int k = -l; k <= l; ++k) {
        const std::complex<double> v = ph * dl(m + l, k + l);
        for (int p = 0; p < radial_count; ++p)
          d(static_cast<Eigen::Index>(map.flat(l, m, p)), static_cast<Eigen::Index>(map.flat(l, k, p))) = v;
      }
    }
  }
  return d;
}

KernelMatrix kernel_fl_dense(const FourierLaguerreBand& band, const Region& region, std::size_t max_dimension) {
  check_band(band);
  const IndexMap map(band.P, band.L);
  if (map.size() > max_dimension)
    throw ValidationError("dense kernel: dimension " + std::to_string(map.size()) + " exceeds limit " +
                          std::to_string(max_dimension));
  Eigen::MatrixXcd k;
  if (region.orientation()) {
    const Region base = region.unoriented();
    const Eigen::MatrixXcd d = rotation_operator(band.L, band.P, *region.orientation());
    k = d * fl_dense_unoriented(band, base) * d.adjoint();
    k = 0.5 * (k + k.adjoint()).eval();
  } else {
    k = fl_dense_unoriented(band, region);
  }
  Eigen::MatrixXd im = k.imag();
  if (im.cwiseAbs().maxCoeff() == 0.0) im.resize(0, 0);
  return make_kernel(KernelDomain::FourierLaguerre, band, std::nullopt, all_indices(map), k.real(), std::move(im));
}

// ---------------------------------------------------------------------------
// Fourier-Bessel kernels

KernelMatrix kernel_fb_fixed_order(int m, const FourierBesselBand& band, const Region& region,
                                   const Eigen::MatrixXd* couplings) {
  validate(SpectralBand{band});
  if (std::abs(m) >= band.L) throw ValidationError("Fourier-Bessel kernel: need |m| < L");
  require_unoriented(region, "Fourier-Bessel kernel");
  const int am = std::abs(m);
  const int M = band.M;
  const int nl = band.L - am;
  const auto n = static_cast<Eigen::Index>(nl) * M;
  Eigen::VectorXd sw(M);
  for (int i = 0; i < M; ++i) sw[i] = std::sqrt(band.weight(i + 1));

  auto product_block = [&](const ProductSymmetric& p, const Eigen::MatrixXd* c) {
    Eigen::MatrixXd local;
    if (!c) {
      local = fb_radial_couplings(band, p.r_min, p.r_max);
      c = &local;
    }
    const Eigen::MatrixXd g = G_matrix(am, band.L, p.theta_min, p.theta_max);
    Eigen::MatrixXd b(n, n);
    for (int l = 0; l < nl; ++l)
      for (int lp = 0; lp < nl; ++lp)
        b.block(static_cast<Eigen::Index>(l) * M, static_cast<Eigen::Index>(lp) * M, M, M) =
            g(l, lp) * c->block(static_cast<Eigen::Index>(l + am) * M, static_cast<Eigen::Index>(lp + am) * M, M, M);
    return b;
  };

  Eigen::MatrixXd b = std::visit(
      [&](const auto& s) -> Eigen::MatrixXd {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ProductSymmetric>) {
          return product_block(s, couplings);
        } else if constexpr (std::is_same_v<T, DisjointUnion>) {
          Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
          for (const auto& p : s.parts) sum += product_block(p, nullptr);
          return sum;
        } else if constexpr (std::is_same_v<T, AzimuthallySymmetric>) {
          std::vector<std::pair<std::size_t, std::size_t>> inside;
          for (std::size_t i = 0; i < s.r_nodes.size(); ++i)
            for (std::size_t j = 0; j < s.theta_nodes.size(); ++j)
              if (s.inside_node(i, j)) inside.emplace_back(i, j);
          const Eigen::MatrixXd y = legendre_table(am, band.L, s.theta_nodes);
          Eigen::MatrixXd a(n, static_cast<Eigen::Index>(inside.size()));
          std::vector<double> j(band.L);
          for (std::size_t c = 0; c < inside.size(); ++c) {
            const auto [ir, it] = inside[c];
            const double r = s.r_nodes[ir];
            const double wc = std::sqrt(2.0 * kPi * s.r_weights[ir] * s.theta_weights[it] * 2.0 / kPi);
            for (int kn = 0; kn < M; ++kn) {
              const double k = band.sample(kn + 1);
              specfun::spherical_bessel_j_array(band.L - 1, k * r, j);
              for (int l = 0; l < nl; ++l)
                a(static_cast<Eigen::Index>(l) * M + kn, static_cast<Eigen::Index>(c)) =
                    wc * k * j[l + am] * y(l, static_cast<Eigen::Index>(it));
            }
          }
          // W^{1/2} already folded in below.
          return a * a.transpose();
        } else {
          throw ValidationError("Fourier-Bessel kernel: mask regions are not supported");
        }
      },
      region.shape());

  for (Eigen::Index i = 0; i < n; ++i) b.row(i) *= sw[i % M];
  for (Eigen::Index j = 0; j < n; ++j) b.col(j) *= sw[j % M];

  KernelMatrix k = make_kernel(KernelDomain::FourierBessel, band, m, order_indices(m, band.L, M), std::move(b));
  for (Eigen::Index i = 0; i < n; ++i) k.weights[i] = band.weight(static_cast<int>(i % M) + 1);
  return k;
}

}  // namespace slepian::kernels
