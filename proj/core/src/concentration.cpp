#include "slepian/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "slepian/errors.hpp"
#include "slepian/kernels.hpp"
#include "slepian/parallel.hpp"
#include "slepian/quadrature.hpp"
#include "slepian/specfun.hpp"
#include "slepian/transforms.hpp"

namespace slepian {
namespace {

constexpr double kPi = std::numbers::pi;

template <class Matrix>
struct Spectrum {
  Eigen::VectorXd values;  // descending
  Matrix vectors;          // matching columns
};

template <class Matrix>
Spectrum<Matrix> hermitian_spectrum(const Matrix& a, bool vectors, const std::string& what) {
  Spectrum<Matrix> s;
  if (a.rows() == 0) return s;
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed to converge for " + what);
  const Eigen::Index n = a.rows();
  s.values = es.eigenvalues().reverse();
  if (!vectors) return s;
  s.vectors = es.eigenvectors().rowwise().reverse();
  // Fix sign/phase: the largest-magnitude entry becomes real positive.
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index imax = 0;
    s.vectors.col(c).cwiseAbs().maxCoeff(&imax);
    const auto pivot = s.vectors(imax, c);
    if constexpr (std::is_same_v<typename Matrix::Scalar, double>) {
      if (pivot < 0.0) s.vectors.col(c) *= -1.0;
    } else {
      s.vectors.col(c) *= std::conj(pivot) / std::abs(pivot);
    }
  }
  return s;
}

void check_spectrum(const Eigen::VectorXd& v, const std::string& what) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(v[i] >= -kEigenvalueTolerance && v[i] <= 1.0 + kEigenvalueTolerance))
      throw NumericalError("eigenvalue " + std::to_string(v[i]) + " of " + what + " lies outside [0, 1]");
  }
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

bool mode_before(const EigenMode& a, const EigenMode& b) {
  if (a.lambda != b.lambda) return a.lambda > b.lambda;
  const int ma = a.m.value_or(0);
  const int mb = b.m.value_or(0);
  if (ma != mb) return ma < mb;
  if (a.radial_rank != b.radial_rank) return a.radial_rank < b.radial_rank;
  return a.angular_rank < b.angular_rank;
}

void require_fb_region(const Region& region) {
  if (region.orientation()) throw ValidationError("Fourier-Bessel solve: oriented regions are not supported");
  if (region.as<ProductMask>()) throw ValidationError("Fourier-Bessel solve: mask regions are not supported");
}

}  // namespace

class EigenAssembler {
 public:
  static void finish(EigenResult& r, std::vector<EigenMode> modes, double raw_min, double raw_max) {
    std::stable_sort(modes.begin(), modes.end(), mode_before);
    r.modes_ = std::move(modes);
    r.raw_min_ = raw_min;
    r.raw_max_ = raw_max;
  }
  static void set_shannon(EigenResult& r, double s) { r.shannon_ = s; }

  static void separable_fixed_order(EigenResult& r, const FourierLaguerreBand& band, const ProductSymmetric& s,
                                    const SolveOptions& opt) {
    r.storage_ = EigenStorage::SeparableFixedOrder;
    r.has_vectors_ = opt.vectors;
    const auto radial =
        hermitian_spectrum(kernels::E_matrix(band.P, s.r_min, s.r_max), opt.vectors, "radial factor E");
    check_spectrum(radial.values, "radial factor E");
    r.radial_ = radial.vectors;

    std::vector<Spectrum<Eigen::MatrixXd>> ang(band.L);
    parallel_for(static_cast<std::size_t>(band.L), [&](std::size_t m) {
      ang[m] = hermitian_spectrum(kernels::G_matrix(static_cast<int>(m), band.L, s.theta_min, s.theta_max),
                                  opt.vectors, "angular factor G^" + std::to_string(m));
    });
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    std::vector<EigenMode> modes;
    modes.reserve(static_cast<std::size_t>(band.P) * band.L * band.L);
    r.angular_.resize(band.L);
    for (int m = 0; m < band.L; ++m) {
      check_spectrum(ang[m].values, "angular factor G^" + std::to_string(m));
      r.angular_[m] = std::move(ang[m].vectors);
      for (int i = 0; i < band.P; ++i) {
        for (int j = 0; j < band.L - m; ++j) {
          const double l1 = radial.values[i];
          const double l2 = ang[m].values[j];
          lo = std::min(lo, l1 * l2);
          hi = std::max(hi, l1 * l2);
          for (const int sm : signed_orders(m)) {
            EigenMode e;
            e.lambda = clamp01(clamp01(l1) * clamp01(l2));
            e.m = sm;
            e.radial_rank = i;
            e.angular_rank = j;
            e.lambda_radial = clamp01(l1);
            e.lambda_angular = clamp01(l2);
            modes.push_back(e);
          }
        }
      }
    }
    finish(r, std::move(modes), lo, hi);
  }

  static void separable_mask(EigenResult& r, const FourierLaguerreBand& band, const Region& region,
                             const SolveOptions& opt) {
    r.storage_ = EigenStorage::SeparableMask;
    r.has_vectors_ = opt.vectors;
    const kernels::SeparableKernel k = kernels::kernel_fl_mask(band, region);
    const auto radial = hermitian_spectrum(k.E, opt.vectors, "radial factor E");
    check_spectrum(radial.values, "radial factor E");
    const auto ang = hermitian_spectrum(k.G, opt.vectors, "mask factor G");
    check_spectrum(ang.values, "mask factor G");
    r.radial_ = radial.vectors;
    r.mask_ = ang.vectors;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    std::vector<EigenMode> modes;
    for (int i = 0; i < band.P; ++i) {
      for (Eigen::Index j = 0; j < ang.values.size(); ++j) {
        const double l1 = radial.values[i];
        const double l2 = ang.values[j];
        lo = std::min(lo, l1 * l2);
        hi = std::max(hi, l1 * l2);
        EigenMode e;
        e.lambda = clamp01(clamp01(l1) * clamp01(l2));
        e.radial_rank = i;
        e.angular_rank = static_cast<int>(j);
        e.lambda_radial = clamp01(l1);
        e.lambda_angular = clamp01(l2);
        modes.push_back(e);
      }
    }
    finish(r, std::move(modes), lo, hi);
  }

  template <class BlockFn>
  static void blocks(EigenResult& r, int L, const SolveOptions& opt, BlockFn&& block) {
    r.storage_ = EigenStorage::Blocks;
    r.has_vectors_ = opt.vectors;
    std::vector<Spectrum<Eigen::MatrixXd>> spec(L);
    parallel_for(static_cast<std::size_t>(L), [&](std::size_t m) {
      spec[m] = hermitian_spectrum(block(static_cast<int>(m)), opt.vectors, "order block m=" + std::to_string(m));
    });
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    std::vector<EigenMode> modes;
    r.blocks_.resize(L);
    for (int m = 0; m < L; ++m) {
      check_spectrum(spec[m].values, "order block m=" + std::to_string(m));
      if (spec[m].values.size() > 0) {
        lo = std::min(lo, spec[m].values.minCoeff());
        hi = std::max(hi, spec[m].values.maxCoeff());
      }
      r.blocks_[m] = std::move(spec[m].vectors);
      for (Eigen::Index i = 0; i < spec[m].values.size(); ++i) {
        for (const int sm : signed_orders(m)) {
          EigenMode e;
          e.lambda = clamp01(spec[m].values[i]);
          e.m = sm;
          e.radial_rank = static_cast<int>(i);
          modes.push_back(e);
        }
      }
    }
    finish(r, std::move(modes), lo, hi);
  }

  static void dense(EigenResult& r, const kernels::KernelMatrix& k, const SolveOptions& opt) {
    r.storage_ = EigenStorage::Dense;
    r.has_vectors_ = opt.vectors;
    const auto spec = hermitian_spectrum(k.complex_matrix(), opt.vectors, "dense kernel");
    check_spectrum(spec.values, "dense kernel");
    r.dense_ = spec.vectors;
    std::vector<EigenMode> modes(static_cast<std::size_t>(spec.values.size()));
    for (Eigen::Index i = 0; i < spec.values.size(); ++i) {
      modes[i].lambda = clamp01(spec.values[i]);
      modes[i].radial_rank = static_cast<int>(i);
    }
    const double lo = spec.values.size() ? spec.values.minCoeff() : 0.0;
    const double hi = spec.values.size() ? spec.values.maxCoeff() : 0.0;
    finish(r, std::move(modes), lo, hi);
  }
};

// ---------------------------------------------------------------------------
// EigenResult

Eigen::VectorXd EigenResult::eigenvalues() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(modes_.size()));
  for (std::size_t i = 0; i < modes_.size(); ++i) v[static_cast<Eigen::Index>(i)] = modes_[i].lambda;
  return v;
}

double EigenResult::eigenvalue_sum() const {
  // Ascending order keeps the small terms from being swamped.
  double s = 0.0;
  for (auto it = modes_.rbegin(); it != modes_.rend(); ++it) s += it->lambda;
  return s;
}

HarmonicCoeffs EigenResult::eigenfunction(std::size_t rank) const {
  if (!has_vectors_) throw ValidationError("eigenfunction: result was computed without eigenvectors");
  if (rank >= modes_.size()) throw ValidationError("eigenfunction: rank out of range");
  const EigenMode& e = modes_[rank];
  HarmonicCoeffs f = HarmonicCoeffs::zeros(band_);
  const IndexMap map(band_);
  const int R = map.radial_count();
  const int L = map.L();
  switch (storage_) {
    case EigenStorage::SeparableFixedOrder: {
      const int m = *e.m;
      const int am = std::abs(m);
      const auto& g = angular_[am];
      for (int l = am; l < L; ++l)
        for (int p = 0; p < R; ++p)
          f.values[static_cast<Eigen::Index>(map.flat(l, m, p))] =
              radial_(p, e.radial_rank) * g(l - am, e.angular_rank);
      break;
    }
    case EigenStorage::SeparableMask: {
      for (Eigen::Index slot = 0; slot < mask_.rows(); ++slot)
        for (int p = 0; p < R; ++p)
          f.values[slot * R + p] = radial_(p, e.radial_rank) * mask_(slot, e.angular_rank);
      break;
    }
    case EigenStorage::Blocks: {
      const int m = *e.m;
      const int am = std::abs(m);
      const auto& b = blocks_[am];
      const Eigen::VectorXd w = coefficient_weights(band_);
      for (int l = am; l < L; ++l) {
        for (int p = 0; p < R; ++p) {
          const auto flat = static_cast<Eigen::Index>(map.flat(l, m, p));
          f.values[flat] = b(static_cast<Eigen::Index>(l - am) * R + p, e.radial_rank) / std::sqrt(w[flat]);
        }
      }
      break;
    }
    case EigenStorage::Dense:
      f.values = dense_.col(e.radial_rank);
      break;
  }
  return f;
}

Eigen::MatrixXcd EigenResult::eigenvectors(std::size_t count) const {
  count = std::min(count, modes_.size());
  Eigen::MatrixXcd v(static_cast<Eigen::Index>(dimension(band_)), static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) v.col(static_cast<Eigen::Index>(i)) = eigenfunction(i).values;
  return v;
}

// ---------------------------------------------------------------------------
// solvers

EigenResult solve_fl(const Region& region, const FourierLaguerreBand& band, const SolveOptions& options) {
  validate(SpectralBand{band});
  EigenResult r(band, region);
  if (region.orientation() || options.force_dense) {
    EigenAssembler::dense(r, kernels::kernel_fl_dense(band, region, options.max_dense_dimension), options);
  } else if (const auto* p = region.as<ProductSymmetric>()) {
    EigenAssembler::separable_fixed_order(r, band, *p, options);
  } else if (region.as<ProductMask>()) {
    EigenAssembler::separable_mask(r, band, region, options);
  } else {
    EigenAssembler::blocks(r, band.L, options,
                           [&](int m) { return kernels::kernel_fl_fixed_order(m, band, region).re; });
  }
  EigenAssembler::set_shannon(r, shannon_fl(region, band));
  return r;
}

EigenResult solve_fb(const Region& region, const FourierBesselBand& band, const SolveOptions& options) {
  validate(SpectralBand{band});
  require_fb_region(region);
  EigenResult r(band, region);
  Eigen::MatrixXd couplings;
  const Eigen::MatrixXd* cptr = nullptr;
  if (const auto* p = region.as<ProductSymmetric>()) {
    couplings = kernels::fb_radial_couplings(band, p->r_min, p->r_max);
    cptr = &couplings;
  }
  EigenAssembler::blocks(r, band.L, options,
                         [&](int m) { return kernels::kernel_fb_fixed_order(m, band, region, cptr).re; });
  EigenAssembler::set_shannon(r, shannon_fb(region, band));
  return r;
}

// ---------------------------------------------------------------------------
// Shannon numbers

double radial_shannon(int P, double r1, double r2) {
  return kernels::E_matrix_quadrature(P, r1, r2).trace();
}

double shannon_fl(const Region& region, const FourierLaguerreBand& band) {
  validate(SpectralBand{band});
  const double l2 = static_cast<double>(band.L) * band.L;
  // Rotations leave the trace unchanged.
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ProductSymmetric>) {
          return l2 / (4.0 * kPi) * radial_shannon(band.P, s.r_min, s.r_max) *
                 solid_angle_band(s.theta_min, s.theta_max);
        } else if constexpr (std::is_same_v<T, ProductMask>) {
          return l2 / (4.0 * kPi) * radial_shannon(band.P, s.r_min, s.r_max) * s.mask.solid_angle();
        } else if constexpr (std::is_same_v<T, DisjointUnion>) {
          double sum = 0.0;
          for (const auto& p : s.parts)
            sum += radial_shannon(band.P, p.r_min, p.r_max) * solid_angle_band(p.theta_min, p.theta_max);
          return l2 / (4.0 * kPi) * sum;
        } else {
          double sum = 0.0;
          std::vector<double> k(band.P);
          for (std::size_t i = 0; i < s.r_nodes.size(); ++i) {
            specfun::laguerre_K_array(band.P, s.r_nodes[i], k);
            double kk = 0.0;
            for (double v : k) kk += v * v;
            for (std::size_t j = 0; j < s.theta_nodes.size(); ++j)
              if (s.inside_node(i, j)) sum += s.r_weights[i] * s.theta_weights[j] * kk;
          }
          return l2 / (4.0 * kPi) * 2.0 * kPi * sum;
        }
      },
      region.shape());
}

namespace {

// sum_l (2l+1) (j_l^2 - j_{l-1} j_{l+1})(x) for l < L.
double fb_trace_density(int L, double x) {
  if (x == 0.0) return 2.0 / 3.0;  // only l = 0 survives: j_0^2 - j_{-1} j_1 -> 1 - 1/3
  std::vector<double> j(L + 1);
  specfun::spherical_bessel_j_array(L, x, j);
  const double jm1 = specfun::spherical_bessel_j(-1, x);
  double sum = 0.0;
  for (int l = 0; l < L; ++l) {
    const double lower = l == 0 ? jm1 : j[l - 1];
    sum += (2.0 * l + 1.0) * (j[l] * j[l] - lower * j[l + 1]);
  }
  return sum;
}

double fb_radial_integral(const FourierBesselBand& band, double r1, double r2) {
  if (!std::isfinite(r2)) throw ValidationError("Fourier-Bessel Shannon number needs a finite R2");
  if (r2 == r1) return 0.0;
  const QuadratureRule q = quadrature::composite_gauss_legendre(kernels::bessel_panels(band.K, r2), 16, r1, r2);
  double sum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i)
    sum += q.weights[i] * q.nodes[i] * q.nodes[i] * fb_trace_density(band.L, band.K * q.nodes[i]);
  return sum;
}

}  // namespace

double shannon_fb(const Region& region, const FourierBesselBand& band) {
  validate(SpectralBand{band});
  const double pref = band.K * band.K * band.K / (4.0 * kPi * kPi);
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ProductSymmetric>) {
          return pref * fb_radial_integral(band, s.r_min, s.r_max) * solid_angle_band(s.theta_min, s.theta_max);
        } else if constexpr (std::is_same_v<T, ProductMask>) {
          return pref * fb_radial_integral(band, s.r_min, s.r_max) * s.mask.solid_angle();
        } else if constexpr (std::is_same_v<T, DisjointUnion>) {
          double sum = 0.0;
          for (const auto& p : s.parts)
            sum += fb_radial_integral(band, p.r_min, p.r_max) * solid_angle_band(p.theta_min, p.theta_max);
          return pref * sum;
        } else {
          double sum = 0.0;
          for (std::size_t i = 0; i < s.r_nodes.size(); ++i) {
            const double d = fb_trace_density(band.L, band.K * s.r_nodes[i]);
            for (std::size_t j = 0; j < s.theta_nodes.size(); ++j)
              if (s.inside_node(i, j)) sum += s.r_weights[i] * s.theta_weights[j] * d;
          }
          return pref * 2.0 * kPi * sum;
        }
      },
      region.shape());
}

// ---------------------------------------------------------------------------
// duals and rotations

SpaceLimited space_limit(const HarmonicCoeffs& f, double lambda, const Region& region) {
  if (!(lambda >= kSpaceLimitThreshold))
    throw ValidationError("space_limit: eigenvalue " + std::to_string(lambda) + " is below the threshold 1e-12");
  SpaceLimited g;
  g.f = f;
  g.lambda = lambda;
  g.band_coeffs = HarmonicCoeffs(f.band, std::sqrt(lambda) * f.values);
  const double scale = 1.0 / std::sqrt(lambda);
  g.evaluate = [f, region, scale](const BallPoint& x) -> std::complex<double> {
    if (!contains(region, x)) return 0.0;
    const std::vector<BallPoint> pts{x};
    const Eigen::VectorXcd v = is_fourier_laguerre(f.band) ? synthesis_fl(f, pts) : synthesis_fb(f, pts);
    return scale * v[0];
  };
  return g;
}

HarmonicCoeffs rotate_eigenfunction(const HarmonicCoeffs& f, double theta0, double phi0) {
  if (!is_fourier_laguerre(f.band)) throw ValidationError("rotate_eigenfunction: needs Fourier-Laguerre coefficients");
  const IndexMap map(f.band);
  HarmonicCoeffs out = HarmonicCoeffs::zeros(f.band);
  for (int l = 0; l < map.L(); ++l) {
    const Eigen::MatrixXd d = specfun::wigner_d_matrix(l, theta0);
    for (int m = -l; m <= l; ++m) {
      const std::complex<double> ph = std::polar(1.0, -m * phi0);
      for (int n = -l; n <= l; ++n) {
        const double dmn = d(m + l, n + l);
        if (dmn == 0.0) continue;
        for (int p = 0; p < map.radial_count(); ++p)
          out.values[static_cast<Eigen::Index>(map.flat(l, m, p))] +=
              ph * dmn * f.values[static_cast<Eigen::Index>(map.flat(l, n, p))];
      }
    }
  }
  return out;
}

}  // namespace slepian
