#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace slepian {

/// Fourier-Laguerre band A_PL: radial degrees p < P, angular degrees ell < L.
struct FourierLaguerreBand {
  int P = 1;
  int L = 1;

  std::size_t dimension() const { return static_cast<std::size_t>(P) * L * L; }
  int radial_count() const { return P; }
};

/// Fourier-Bessel band A~_KL, discretized at k_n = n K / M for n = 1..M.
///
/// Samples carry trapezoid weights on [0, K]: dk for n < M and dk/2 at k = K.
/// The k = 0 end point contributes nothing because every kernel entry
/// vanishes there.
struct FourierBesselBand {
  double K = 1.0;
  int L = 1;
  int M = 1;

  double step() const { return K / M; }
  /// n in 1..M
  double sample(int n) const { return n * K / M; }
  /// Quadrature weight of sample n.
  double weight(int n) const { return n == M ? 0.5 * step() : step(); }
  std::size_t dimension() const { return static_cast<std::size_t>(M) * L * L; }
  int radial_count() const { return M; }
};

using SpectralBand = std::variant<FourierLaguerreBand, FourierBesselBand>;

/// Throws ValidationError when the band parameters are out of range.
void validate(const SpectralBand& band);

int angular_band_limit(const SpectralBand& band);
int radial_count(const SpectralBand& band);
std::size_t dimension(const SpectralBand& band);
bool is_fourier_laguerre(const SpectralBand& band);
std::string describe(const SpectralBand& band);

/// (ell, m, radial) triple; `radial` is p for Fourier-Laguerre and n-1 for
/// Fourier-Bessel samples.
struct HarmonicIndex {
  int ell = 0;
  int m = 0;
  int radial = 0;

  friend bool operator==(const HarmonicIndex&, const HarmonicIndex&) = default;
};

/// Flat ordering (ell^2 + ell + m) * R + radial, with R the radial count.
class IndexMap {
 public:
  IndexMap(int radial_count, int L) : radial_count_(radial_count), L_(L) {}
  explicit IndexMap(const SpectralBand& band);

  std::size_t size() const { return static_cast<std::size_t>(radial_count_) * L_ * L_; }
  int radial_count() const { return radial_count_; }
  int L() const { return L_; }

  std::size_t flat(int ell, int m, int radial) const {
    return static_cast<std::size_t>(ell * ell + ell + m) * radial_count_ + radial;
  }
  std::size_t flat(const HarmonicIndex& i) const { return flat(i.ell, i.m, i.radial); }
  HarmonicIndex index(std::size_t flat) const;
  bool contains(const HarmonicIndex& i) const;

  /// Angular (ell, m) slot, ell^2 + ell + m.
  static std::size_t angular_slot(int ell, int m) { return static_cast<std::size_t>(ell * ell + ell + m); }

 private:
  int radial_count_;
  int L_;
};

/// Coefficient vector over the band's index map. For Fourier-Bessel bands the
/// entries are samples f_{ell m}(k_n).
struct HarmonicCoeffs {
  SpectralBand band;
  Eigen::VectorXcd values;

  HarmonicCoeffs() = default;
  HarmonicCoeffs(SpectralBand b, Eigen::VectorXcd v);
  static HarmonicCoeffs zeros(const SpectralBand& b);

  IndexMap index_map() const { return IndexMap(band); }
  std::complex<double>& at(int ell, int m, int radial);
  const std::complex<double>& at(int ell, int m, int radial) const;
};

/// Band inner product <a, b>: the plain coefficient dot product for
/// Fourier-Laguerre and the k-quadrature of sum_{lm} a b^* for Fourier-Bessel.
std::complex<double> inner_product(const HarmonicCoeffs& a, const HarmonicCoeffs& b);
double squared_norm(const HarmonicCoeffs& a);

/// Per-entry quadrature weights of a band (all ones for Fourier-Laguerre).
Eigen::VectorXd coefficient_weights(const SpectralBand& band);

bool same_band(const SpectralBand& a, const SpectralBand& b);

/// Orders with absolute value m: {m} for m = 0, otherwise {-m, m}.
inline std::vector<int> signed_orders(int m) { return m == 0 ? std::vector<int>{0} : std::vector<int>{-m, m}; }

}  // namespace slepian
