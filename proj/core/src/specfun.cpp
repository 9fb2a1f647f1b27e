#include "slepian/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace slepian::specfun {
namespace {

constexpr double kPi = std::numbers::pi;

[[noreturn]] void domain_fail(const std::string& what) { throw std::domain_error(what); }

// log(n!) in extended precision, tabulated for the index ranges the kernels use.
long double log_factorial(int n) {
  static const std::vector<long double> table = [] {
    std::vector<long double> t(1024);
    t[0] = 0.0L;
    for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] + std::log(static_cast<long double>(i));
    return t;
  }();
  if (n < 0) domain_fail("log_factorial: negative argument");
  if (static_cast<std::size_t>(n) < table.size()) return table[n];
  return std::lgamma(static_cast<long double>(n) + 1.0L);
}

long double log_binomial(int n, int k) {
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

// Jacobi polynomial P_n^{(a,b)}(x) by the standard three-term recurrence.
long double jacobi(int n, int a, int b, long double x) {
  if (n == 0) return 1.0L;
  long double p0 = 1.0L;
  long double p1 = (a + 1) + 0.5L * (a + b + 2) * (x - 1.0L);
  for (int k = 2; k <= n; ++k) {
    const long double c = 2.0L * k + a + b;
    const long double a1 = 2.0L * k * (k + a + b) * (c - 2.0L);
    const long double a2 = (c - 1.0L) * (c * (c - 2.0L) * x + static_cast<long double>(a) * a -
                                         static_cast<long double>(b) * b);
    const long double a3 = 2.0L * (k + a - 1) * (k + b - 1) * c;
    const long double p2 = (a2 * p1 - a3 * p0) / a1;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

// log of the lower incomplete gamma gamma(s, x) for integer s >= 1, x > 0.
long double log_lower_gamma(int s, long double x) {
  long double term = 1.0L / s;
  long double sum = term;
  for (int k = 1; k < 100000; ++k) {
    term *= x / (s + k);
    sum += term;
    if (term < sum * 1e-21L) break;
  }
  return s * std::log(x) - x + std::log(sum);
}

// log of the upper incomplete gamma Gamma(s, x) = (s-1)! e^{-x} sum_{a<s} x^a/a!.
long double log_upper_gamma(int s, long double x) {
  const int j = s - 1;
  if (x < j) {
    // Largest terms sit at small a; factor out j! instead of x^j.
    long double term = 1.0L;
    long double sum = 1.0L;
    for (int a = 1; a <= j; ++a) {
      term *= x / a;
      sum += term;
    }
    return log_factorial(j) - x + std::log(sum);
  }
  long double term = 1.0L;
  long double sum = 1.0L;
  for (int i = 1; i <= j; ++i) {
    term *= (j - i + 1) / x;
    sum += term;
  }
  return -x + j * std::log(x) + std::log(sum);
}

// exp(la) - exp(lb) in the log domain, assuming la >= lb. Returns log of the
// difference or -inf when it vanishes.
long double log_difference(long double la, long double lb) {
  if (lb == -std::numeric_limits<long double>::infinity()) return la;
  const long double d = -std::expm1(lb - la);
  if (d <= 0.0L) return -std::numeric_limits<long double>::infinity();
  return la + std::log(d);
}

long double log_sum(long double la, long double lb) {
  const long double hi = std::max(la, lb);
  const long double lo = std::min(la, lb);
  if (hi == -std::numeric_limits<long double>::infinity()) return hi;
  return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace

void spherical_bessel_j_array(int lmax, double x, std::span<double> out) {
  if (lmax < 0) domain_fail("spherical_bessel_j_array: lmax must be >= 0");
  if (!(x >= 0.0)) domain_fail("spherical_bessel_j_array: x must be >= 0");
  if (out.size() < static_cast<std::size_t>(lmax) + 1)
    throw std::invalid_argument("spherical_bessel_j_array: output span too small");

  if (x == 0.0) {
    out[0] = 1.0;
    for (int l = 1; l <= lmax; ++l) out[l] = 0.0;
    return;
  }

  if (x >= lmax) {
    const double s = std::sin(x);
    const double c = std::cos(x);
    out[0] = s / x;
    if (lmax >= 1) out[1] = (s / x - c) / x;
    for (int l = 1; l < lmax; ++l) out[l + 1] = (2.0 * l + 1.0) / x * out[l] - out[l - 1];
    return;
  }

  // Miller: start well inside the evanescent region and recur downward.
  const int start = lmax + 20 + static_cast<int>(std::sqrt(40.0 * (lmax + x))) + static_cast<int>(x);
  std::vector<double> buf(start + 2, 0.0);
  double jp1 = 0.0;
  double jc = 1e-300;
  buf[start] = jc;
  for (int l = start; l >= 1; --l) {
    const double jm1 = (2.0 * l + 1.0) / x * jc - jp1;
    jp1 = jc;
    jc = jm1;
    buf[l - 1] = jc;
    if (std::abs(jc) > 1e250) {
      for (int k = l - 1; k <= start; ++k) buf[k] *= 1e-250;
      jp1 *= 1e-250;
      jc *= 1e-250;
    }
  }
  // sum_l (2l+1) j_l^2 = 1. Accumulate from small terms up.
  long double norm = 0.0L;
  for (int l = start; l >= 0; --l) norm += (2.0L * l + 1.0L) * buf[l] * static_cast<long double>(buf[l]);
  double scale = static_cast<double>(1.0L / std::sqrt(norm));
  // Fix the overall sign from j_0 = sin(x)/x or, near its zeros, j_1.
  const double j0 = std::sin(x) / x;
  const double j1 = (std::sin(x) / x - std::cos(x)) / x;
  if (std::abs(j0) >= std::abs(j1)) {
    if ((j0 < 0.0) != (buf[0] < 0.0)) scale = -scale;
  } else {
    if ((j1 < 0.0) != (buf[1] < 0.0)) scale = -scale;
  }
  for (int l = 0; l <= lmax; ++l) out[l] = buf[l] * scale;
}

double spherical_bessel_j(int ell, double x) {
  if (ell < -1) domain_fail("spherical_bessel_j: ell must be >= -1, got " + std::to_string(ell));
  if (!(x >= 0.0)) domain_fail("spherical_bessel_j: x must be >= 0");
  if (ell == -1) {
    if (x == 0.0) domain_fail("spherical_bessel_j: j_{-1} is singular at x = 0");
    return std::cos(x) / x;
  }
  std::vector<double> v(ell + 1);
  spherical_bessel_j_array(ell, x, v);
  return v[ell];
}

void laguerre_K_array(int count, double r, std::span<double> out) {
  if (count <= 0) return;
  if (out.size() < static_cast<std::size_t>(count))
    throw std::invalid_argument("laguerre_K_array: output span too small");
  out[0] = std::exp(-0.5 * r) / std::numbers::sqrt2;
  if (count == 1) return;
  out[1] = (3.0 - r) * out[0] / std::sqrt(3.0);
  // K_{p+1} = ((2p+3-r) K_p - sqrt(p(p+2)) K_{p-1}) / sqrt((p+1)(p+3))
  for (int p = 1; p + 1 < count; ++p) {
    out[p + 1] = ((2.0 * p + 3.0 - r) * out[p] - std::sqrt(p * (p + 2.0)) * out[p - 1]) /
                 std::sqrt((p + 1.0) * (p + 3.0));
  }
}

double laguerre_K(int p, double r) {
  if (p < 0) domain_fail("laguerre_K: degree must be >= 0");
  std::vector<double> v(p + 1);
  laguerre_K_array(p + 1, r, v);
  return v[p];
}

double laguerre_L2_binomial(int p, double r) {
  double sum = 0.0;
  for (int j = 0; j <= p; ++j) {
    const double binom = std::exp(static_cast<double>(log_binomial(p + 2, p - j)));
    sum += std::round(binom) * std::pow(-r, j) / std::exp(static_cast<double>(log_factorial(j)));
  }
  return sum;
}

void normalized_legendre(int lmax, int m, double theta, std::span<double> out) {
  if (m < 0 || m > lmax) domain_fail("normalized_legendre: need 0 <= m <= lmax");
  if (out.size() < static_cast<std::size_t>(lmax - m + 1))
    throw std::invalid_argument("normalized_legendre: output span too small");
  const double x = std::cos(theta);
  const double s = std::sin(theta);
  double pmm = 0.5 / std::sqrt(kPi);
  for (int k = 1; k <= m; ++k) pmm *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * s;
  out[0] = pmm;
  if (lmax == m) return;
  out[1] = std::sqrt(2.0 * m + 3.0) * x * pmm;
  for (int l = m + 2; l <= lmax; ++l) {
    const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - static_cast<double>(m) * m));
    const double b = std::sqrt((static_cast<double>(l - 1) * (l - 1) - static_cast<double>(m) * m) /
                               (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
    out[l - m] = a * (x * out[l - m - 1] - b * out[l - m - 2]);
  }
}

std::complex<double> spherical_harmonic(int ell, int m, double theta, double phi) {
  if (ell < 0 || std::abs(m) > ell)
    domain_fail("spherical_harmonic: need ell >= 0 and |m| <= ell");
  const int am = std::abs(m);
  std::vector<double> p(ell - am + 1);
  normalized_legendre(ell, am, theta, p);
  const std::complex<double> y = std::polar(p[ell - am], am * phi);
  if (m >= 0) return y;
  return (am % 2 == 0 ? 1.0 : -1.0) * std::conj(y);
}

double legendre_p(int n, double x) {
  if (n < -1) domain_fail("legendre_p: n must be >= -1");
  if (n <= 0) return 1.0;
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double wigner_3j(int l1, int l2, int l3, int m1, int m2, int m3) {
  if (l1 < 0 || l2 < 0 || l3 < 0) return 0.0;
  if (m1 + m2 + m3 != 0) return 0.0;
  if (std::abs(m1) > l1 || std::abs(m2) > l2 || std::abs(m3) > l3) return 0.0;
  if (l3 < std::abs(l1 - l2) || l3 > l1 + l2) return 0.0;
  const int big_j = l1 + l2 + l3;
  if (m1 == 0 && m2 == 0 && m3 == 0) {
    if (big_j % 2 != 0) return 0.0;
    // Closed form, free of cancellation.
    const int g = big_j / 2;
    const long double lv = 0.5L * (log_factorial(big_j - 2 * l1) + log_factorial(big_j - 2 * l2) +
                                   log_factorial(big_j - 2 * l3) - log_factorial(big_j + 1)) +
                           log_factorial(g) - log_factorial(g - l1) - log_factorial(g - l2) -
                           log_factorial(g - l3);
    const double sign = (g % 2 == 0) ? 1.0 : -1.0;
    return sign * static_cast<double>(std::exp(lv));
  }

  // Racah single sum.
  const long double log_pre =
      0.5L * (log_factorial(l1 + l2 - l3) + log_factorial(l1 - l2 + l3) + log_factorial(-l1 + l2 + l3) -
              log_factorial(big_j + 1) + log_factorial(l1 + m1) + log_factorial(l1 - m1) +
              log_factorial(l2 + m2) + log_factorial(l2 - m2) + log_factorial(l3 + m3) +
              log_factorial(l3 - m3));
  const int kmin = std::max({0, l2 - l3 - m1, l1 - l3 + m2});
  const int kmax = std::min({l1 + l2 - l3, l1 - m1, l2 + m2});
  if (kmin > kmax) return 0.0;
  const long double first =
      std::exp(log_pre - (log_factorial(kmin) + log_factorial(l3 - l2 + kmin + m1) +
                          log_factorial(l3 - l1 + kmin - m2) + log_factorial(l1 + l2 - l3 - kmin) +
                          log_factorial(l1 - kmin - m1) + log_factorial(l2 - kmin + m2)));
  // t_{k+1} / t_k, sign included
  auto ratio = [&](int k) {
    return -static_cast<long double>(l1 + l2 - l3 - k) * (l1 - k - m1) * (l2 - k + m2) /
           (static_cast<long double>(k + 1) * (l3 - l2 + k + 1 + m1) * (l3 - l1 + k + 1 - m2));
  };
  long double sum = 0.0L;
  long double mass = 0.0L;
  long double term = (kmin % 2 == 0) ? first : -first;
  for (int k = kmin; k <= kmax; ++k) {
    sum += term;
    mass += std::abs(term);
    if (k < kmax) term *= ratio(k);
  }
  if (mass > 1e2L * std::abs(sum)) {
    // Heavy cancellation: redo the alternating sum with exact ratios.
    using big = boost::multiprecision::cpp_bin_float_50;
    big t = (kmin % 2 == 0) ? big(first) : big(-first);
    big acc = 0;
    for (int k = kmin; k <= kmax; ++k) {
      acc += t;
      if (k < kmax)
        t *= -big(l1 + l2 - l3 - k) * (l1 - k - m1) * (l2 - k + m2) /
             (big(k + 1) * (l3 - l2 + k + 1 + m1) * (l3 - l1 + k + 1 - m2));
    }
    sum = static_cast<long double>(acc);
  }
  const int phase = l1 - l2 - m3;
  return static_cast<double>(((phase % 2 == 0) ? 1.0L : -1.0L) * sum);
}

double wigner_d(int ell, int m, int n, double beta) {
  if (ell < 0 || std::abs(m) > ell || std::abs(n) > ell)
    domain_fail("wigner_d: need |m|, |n| <= ell");
  if (beta == 0.0) return m == n ? 1.0 : 0.0;
  // Row index mp = m, column index mm = n in the Jacobi-polynomial form.
  const int mp = m;
  const int mm = n;
  const int k = std::min({ell + mm, ell - mm, ell + mp, ell - mp});
  int a = 0;
  int lambda = 0;
  if (k == ell + mm) {
    a = mp - mm;
    lambda = mp - mm;
  } else if (k == ell - mm) {
    a = mm - mp;
  } else if (k == ell + mp) {
    a = mm - mp;
  } else {
    a = mp - mm;
    lambda = mp - mm;
  }
  const int b = 2 * ell - 2 * k - a;
  const long double half = 0.5L * static_cast<long double>(beta);
  const long double sh = std::sin(half);
  const long double ch = std::cos(half);
  const long double coef = std::exp(0.5L * log_binomial(2 * ell - k, k + a) - 0.5L * log_binomial(k + b, b));
  long double value = coef * std::pow(sh, a) * std::pow(ch, b) * jacobi(k, a, b, std::cos(static_cast<long double>(beta)));
  if (lambda % 2 != 0) value = -value;
  return static_cast<double>(value);
}

Eigen::MatrixXd wigner_d_matrix(int ell, double beta) {
  if (ell < 0) domain_fail("wigner_d_matrix: ell must be >= 0");
  Eigen::MatrixXd d(2 * ell + 1, 2 * ell + 1);
  for (int m = -ell; m <= ell; ++m)
    for (int n = -ell; n <= ell; ++n) d(m + ell, n + ell) = wigner_d(ell, m, n, beta);
  return d;
}

double radial_moment_integral(int j, double r1, double r2) {
  if (j < 0) domain_fail("radial_moment_integral: j must be >= 0");
  if (!(r1 >= 0.0)) domain_fail("radial_moment_integral: R1 must be >= 0");
  if (!(r2 > r1)) domain_fail("radial_moment_integral: need R2 > R1");

  constexpr long double kNegInf = -std::numeric_limits<long double>::infinity();
  const int s = j + 1;
  const long double a = r1;
  const long double b = r2;
  const bool b_inf = std::isinf(r2);

  auto lower = [&](long double x) { return x == 0.0L ? kNegInf : log_lower_gamma(s, x); };
  auto upper = [&](long double x) { return log_upper_gamma(s, x); };

  long double log_value = kNegInf;
  if (!b_inf && b <= s) {
    log_value = log_difference(lower(b), lower(a));
  } else if (a >= s) {
    log_value = b_inf ? upper(a) : log_difference(upper(a), upper(b));
  } else {
    const long double left = log_difference(lower(static_cast<long double>(s)), lower(a));
    const long double right = b_inf ? upper(static_cast<long double>(s))
                                    : log_difference(upper(static_cast<long double>(s)), upper(b));
    log_value = log_sum(left, right);
  }
  return static_cast<double>(std::exp(log_value));
}

}  // namespace slepian::specfun
