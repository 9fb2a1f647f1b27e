#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "slepian/band.hpp"
#include "slepian/regions.hpp"

namespace slepian {

/// Admissible spectrum of a projection-type kernel before clamping to [0, 1].
inline constexpr double kEigenvalueTolerance = 1e-9;
/// Smallest eigenvalue for which a space-limited dual is built.
inline constexpr double kSpaceLimitThreshold = 1e-12;

/// One concentration eigenpair.
struct EigenMode {
  double lambda = 0.0;
  /// Azimuthal order when the kernel is block diagonal in m.
  std::optional<int> m;
  /// Rank within the radial factor (separable) or the order block (blocks);
  /// 0 is the largest eigenvalue.
  int radial_rank = 0;
  /// Rank within the angular factor of a separable problem.
  int angular_rank = 0;
  /// Factor eigenvalues lambda = lambda^1 lambda^2 for separable problems.
  std::optional<double> lambda_radial;
  std::optional<double> lambda_angular;
};

enum class EigenStorage {
  SeparableFixedOrder,  ///< E and per-order G^m factors
  SeparableMask,        ///< E and a full L^2 x L^2 mask factor
  Blocks,               ///< one real symmetric block per order |m|
  Dense,                ///< one complex Hermitian matrix
};

/// Sorted eigenpairs of a concentration problem with factorized storage of
/// the eigenvectors; eigenfunction(rank) assembles coefficient vectors.
class EigenResult {
 public:
  EigenResult(SpectralBand band, Region region) : band_(band), region_(std::move(region)) {}

  const SpectralBand& band() const { return band_; }
  const Region& region() const { return region_; }
  const std::vector<EigenMode>& modes() const { return modes_; }
  std::size_t size() const { return modes_.size(); }
  double eigenvalue(std::size_t rank) const { return modes_.at(rank).lambda; }
  Eigen::VectorXd eigenvalues() const;
  double eigenvalue_sum() const;

  /// Shannon number from the trace integral (independent of the spectrum).
  double shannon() const { return shannon_; }
  /// Extremes of the raw solver output before clamping.
  double raw_min() const { return raw_min_; }
  double raw_max() const { return raw_max_; }
  EigenStorage storage() const { return storage_; }
  bool has_vectors() const { return has_vectors_; }

  /// Coefficients of eigenfunction `rank` (0-based). Unit norm under the
  /// band inner product.
  HarmonicCoeffs eigenfunction(std::size_t rank) const;
  /// First `count` eigenfunctions as columns.
  Eigen::MatrixXcd eigenvectors(std::size_t count) const;

 private:
  friend class EigenAssembler;

  SpectralBand band_;
  Region region_;
  std::vector<EigenMode> modes_;
  double shannon_ = 0.0;
  double raw_min_ = 0.0;
  double raw_max_ = 0.0;
  EigenStorage storage_ = EigenStorage::Dense;
  bool has_vectors_ = true;

  Eigen::MatrixXd radial_;                // P x P, column = radial rank
  std::vector<Eigen::MatrixXd> angular_;  // per |m|, column = angular rank
  Eigen::MatrixXcd mask_;                 // L^2 x L^2, column = angular rank
  std::vector<Eigen::MatrixXd> blocks_;   // per |m|, column = block rank
  Eigen::MatrixXcd dense_;                // column = dense rank (radial_rank)
};

struct SolveOptions {
  /// Force the dense PL^2 x PL^2 path even when the region separates.
  bool force_dense = false;
  /// Compute eigenvectors; eigenvalue-only runs are much faster for large blocks.
  bool vectors = true;
  std::size_t max_dense_dimension = 10000;
};

/// Fourier-Laguerre concentration problem. Product regions separate into
/// E and G^m, masks into E and G_mask, other unoriented axisymmetric regions
/// into fixed-order blocks; oriented regions use the dense kernel.
EigenResult solve_fl(const Region& region, const FourierLaguerreBand& band, const SolveOptions& options = {});

/// Fourier-Bessel concentration problem over fixed-order blocks. Eigenvectors
/// are mapped back to samples f_lm(k_n) with unit norm sum_n w_n |f|^2 = 1.
EigenResult solve_fb(const Region& region, const FourierBesselBand& band, const SolveOptions& options = {});

/// sum_p int_{R1}^{R2} r^2 K_p(r)^2 dr by quadrature.
double radial_shannon(int P, double r1, double r2);
/// N_PL = L^2/(4 pi) sum_p int_R K_p^2 dv.
double shannon_fl(const Region& region, const FourierLaguerreBand& band);
/// N~_KL = sum_l (2l+1)/(4 pi^2) K^3 int_R (j_l^2 - j_{l-1} j_{l+1})(K r) dv.
double shannon_fb(const Region& region, const FourierBesselBand& band);

/// Space-limited dual g = I_R f / sqrt(lambda) of a Fourier-Laguerre
/// eigenfunction.
struct SpaceLimited {
  HarmonicCoeffs f;
  double lambda = 0.0;
  /// In-band coefficients sqrt(lambda) f.
  HarmonicCoeffs band_coeffs;
  /// Pointwise values of g.
  std::function<std::complex<double>(const BallPoint&)> evaluate;
};

SpaceLimited space_limit(const HarmonicCoeffs& f, double lambda, const Region& region);

/// Rotation by theta0 about y followed by phi0 about z, applied degree by
/// degree to Fourier-Laguerre coefficients.
HarmonicCoeffs rotate_eigenfunction(const HarmonicCoeffs& f, double theta0, double phi0);

}  // namespace slepian
