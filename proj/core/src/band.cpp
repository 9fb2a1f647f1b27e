#include "slepian/band.hpp"

#include <cmath>
#include <sstream>

#include "slepian/errors.hpp"

namespace slepian {

void validate(const SpectralBand& band) {
  std::visit(
      [](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if (b.L < 1) throw ValidationError("band: L must be >= 1");
        if constexpr (std::is_same_v<T, FourierLaguerreBand>) {
          if (b.P < 1) throw ValidationError("band: P must be >= 1");
        } else {
          if (!(b.K > 0.0) || !std::isfinite(b.K)) throw ValidationError("band: K must be a positive finite number");
          if (b.M < 1) throw ValidationError("band: M must be >= 1");
        }
      },
      band);
}

int angular_band_limit(const SpectralBand& band) {
  return std::visit([](const auto& b) { return b.L; }, band);
}

int radial_count(const SpectralBand& band) {
  return std::visit([](const auto& b) { return b.radial_count(); }, band);
}

std::size_t dimension(const SpectralBand& band) {
  return std::visit([](const auto& b) { return b.dimension(); }, band);
}

bool is_fourier_laguerre(const SpectralBand& band) {
  return std::holds_alternative<FourierLaguerreBand>(band);
}

std::string describe(const SpectralBand& band) {
  std::ostringstream os;
  os.precision(17);
  if (const auto* fl = std::get_if<FourierLaguerreBand>(&band)) {
    os << "fourier-laguerre(P=" << fl->P << ", L=" << fl->L << ")";
  } else {
    const auto& fb = std::get<FourierBesselBand>(band);
    os << "fourier-bessel(K=" << fb.K << ", L=" << fb.L << ", M=" << fb.M << ")";
  }
  return os.str();
}

IndexMap::IndexMap(const SpectralBand& band)
    : radial_count_(slepian::radial_count(band)), L_(angular_band_limit(band)) {}

HarmonicIndex IndexMap::index(std::size_t flat) const {
  const auto slot = static_cast<int>(flat / radial_count_);
  const int radial = static_cast<int>(flat % radial_count_);
  const int ell = static_cast<int>(std::sqrt(static_cast<double>(slot)));
  int l = ell;
  while (l * l > slot) --l;
  while ((l + 1) * (l + 1) <= slot) ++l;
  return {l, slot - l * l - l, radial};
}

bool IndexMap::contains(const HarmonicIndex& i) const {
  return i.ell >= 0 && i.ell < L_ && std::abs(i.m) <= i.ell && i.radial >= 0 && i.radial < radial_count_;
}

HarmonicCoeffs::HarmonicCoeffs(SpectralBand b, Eigen::VectorXcd v) : band(b), values(std::move(v)) {
  if (static_cast<std::size_t>(values.size()) != dimension(band))
    throw ValidationError("HarmonicCoeffs: vector length does not match band dimension");
}

HarmonicCoeffs HarmonicCoeffs::zeros(const SpectralBand& b) {
  return HarmonicCoeffs(b, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dimension(b))));
}

std::complex<double>& HarmonicCoeffs::at(int ell, int m, int radial) {
  const IndexMap map(band);
  if (!map.contains({ell, m, radial})) throw ValidationError("HarmonicCoeffs: index outside band");
  return values[static_cast<Eigen::Index>(map.flat(ell, m, radial))];
}

const std::complex<double>& HarmonicCoeffs::at(int ell, int m, int radial) const {
  const IndexMap map(band);
  if (!map.contains({ell, m, radial})) throw ValidationError("HarmonicCoeffs: index outside band");
  return values[static_cast<Eigen::Index>(map.flat(ell, m, radial))];
}

Eigen::VectorXd coefficient_weights(const SpectralBand& band) {
  const auto n = static_cast<Eigen::Index>(dimension(band));
  if (is_fourier_laguerre(band)) return Eigen::VectorXd::Ones(n);
  const auto& fb = std::get<FourierBesselBand>(band);
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) w[i] = fb.weight(static_cast<int>(i % fb.M) + 1);
  return w;
}

bool same_band(const SpectralBand& a, const SpectralBand& b) {
  if (a.index() != b.index()) return false;
  if (const auto* fa = std::get_if<FourierLaguerreBand>(&a)) {
    const auto& fb = std::get<FourierLaguerreBand>(b);
    return fa->P == fb.P && fa->L == fb.L;
  }
  const auto& x = std::get<FourierBesselBand>(a);
  const auto& y = std::get<FourierBesselBand>(b);
  return x.K == y.K && x.L == y.L && x.M == y.M;
}

std::complex<double> inner_product(const HarmonicCoeffs& a, const HarmonicCoeffs& b) {
  if (!same_band(a.band, b.band)) throw ValidationError("inner_product: band mismatch");
  if (is_fourier_laguerre(a.band)) return b.values.dot(a.values);
  const Eigen::VectorXd w = coefficient_weights(a.band);
  return b.values.dot(w.cast<std::complex<double>>().cwiseProduct(a.values));
}

double squared_norm(const HarmonicCoeffs& a) { return inner_product(a, a).real(); }

}  // namespace slepian
