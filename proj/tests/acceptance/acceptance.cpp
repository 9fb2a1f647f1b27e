// Acceptance checks: one [PASS]/[FAIL] line per criterion; exit status 1 if any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "slepian/concentration.hpp"
#include "slepian/kernels.hpp"
#include "slepian/regions.hpp"
#include "slepian/transforms.hpp"

namespace {

using namespace slepian;
using Clock = std::chrono::steady_clock;
constexpr double kPi = std::numbers::pi;

// Reference configuration: r in [15, 25], theta in [pi/8, 3pi/8].
constexpr double kR1 = 15.0, kR2 = 25.0;
constexpr double kT1 = kPi / 8, kT2 = 3 * kPi / 8;

// Pinned tolerances.
constexpr double kNLTarget = 108.24, kNLTol = 0.01, kNLClosedTol = 1e-9;
constexpr double kNPTarget = 3.72, kNPTol = 0.01;
constexpr double kNPLTarget = 403.21, kNPLTol = 0.5, kTraceRelTol = 1e-6;
constexpr double kNKLTarget = 408.33, kNKLTol = 0.5, kFbSumRelTol = 0.01, kFbHalvingTol = 0.002;
constexpr double kBoundTol = 1e-9;
constexpr double kBallOrthTol = 1e-9, kRegionOrthTol = 1e-8, kCoeffOrthTol = 1e-12;
constexpr double kDualTol = 1e-8;
constexpr double kOracleTol = 1e-9;
constexpr int kOracleDraws = 200;
constexpr double kIdentityTol = 1e-10;
constexpr double kQualityMin = 0.99, kDecayFraction = 0.01, kDecayIndexFactor = 1.5;
constexpr double kRotIdentityTol = 1e-14, kRotNormTol = 1e-12, kRotEnergyTol = 1e-6;
constexpr double kRoundTripTol = 1e-10, kParsevalTol = 1e-10;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Raw spectrum extremes gathered from every solve below.
struct Bounds {
  double lo = 1.0, hi = 0.0;
  int solves = 0;
  void add(const EigenResult& r) {
    lo = std::min(lo, r.raw_min());
    hi = std::max(hi, r.raw_max());
    ++solves;
  }
} bounds;

HarmonicCoeffs random_coeffs(const SpectralBand& band, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  HarmonicCoeffs c = HarmonicCoeffs::zeros(band);
  for (auto& v : c.values) v = {n(rng), n(rng)};
  return c;
}

// ---- independent oracles (std special functions, Boost Gauss rules) ----

template <int N>
double panels(const std::function<double(double)>& f, double a, double b, int count) {
  const double h = (b - a) / count;
  double s = 0.0;
  for (int i = 0; i < count; ++i) s += boost::math::quadrature::gauss<double, N>::integrate(f, a + i * h, a + (i + 1) * h);
  return s;
}

double oracle_K(int p, double r) {
  return std::exp(-r / 2) * std::assoc_laguerre(p, 2, r) / std::sqrt((p + 1.0) * (p + 2.0));
}

double oracle_E(int p, int q, double r1, double r2) {
  const int count = std::max(1, static_cast<int>(std::ceil((r2 - r1) / 2)));
  return panels<30>([&](double r) { return r * r * oracle_K(p, r) * oracle_K(q, r); }, r1, r2, count);
}

double oracle_G(int m, int l, int lp, double t1, double t2) {
  const int am = std::abs(m);
  auto f = [&](double x) {
    const double t = std::acos(x);
    return std::sph_legendre(l, am, t) * std::sph_legendre(lp, am, t);
  };
  return 2 * kPi * panels<30>(f, std::cos(t2), std::cos(t1), 1);
}

double oracle_C(int l, double k, double kp, double r1, double r2) {
  const int count = 16 + static_cast<int>(std::ceil((k + kp) * (r2 - r1)));
  auto f = [&](double r) { return r * r * k * kp * std::sph_bessel(l, k * r) * std::sph_bessel(l, kp * r); };
  return 2 / kPi * panels<30>(f, r1, r2, count);
}

// ---- criteria ----

Outcome angular_shannon() {
  const auto t0 = Clock::now();
  const int L = 20;
  double n = 0.0;
  for (int m = 0; m < L; ++m) n += (m == 0 ? 1 : 2) * kernels::G_matrix(m, L, kT1, kT2).trace();
  const double dt = seconds_since(t0);
  const double closed = L * L / 2.0 * (std::cos(kT1) - std::cos(kT2));
  Outcome o;
  o.pass = std::abs(n - kNLTarget) <= kNLTol && std::abs(n - closed) <= kNLClosedTol && dt < 1.0;
  o.detail = fmt("N_L=%.9f (target %.2f+-%.2f), |N_L-closed|=%.1e, %.3fs", n, kNLTarget, kNLTol,
                 std::abs(n - closed), dt);
  return o;
}

Outcome radial_shannon_number() {
  const auto t0 = Clock::now();
  const double n = kernels::E_matrix(30, kR1, kR2).trace();
  const double dt = seconds_since(t0);
  const double n31 = kernels::E_matrix(31, kR1, kR2).trace();
  Outcome o;
  o.pass = std::abs(n - kNPTarget) <= kNPTol && dt < 1.0;
  o.detail = fmt("N^P=trace(E)=%.8f for p<30 (target %.2f+-%.2f), %.3fs; p<=30 would give %.8f", n, kNPTarget, kNPTol,
                 dt, n31);
  return o;
}

struct FlContext {
  Region region = Region::product(kR1, kR2, kT1, kT2);
  FourierLaguerreBand band{30, 20};
  EigenResult result{band, region};
};

Outcome fl_shannon(FlContext& ctx) {
  const auto t0 = Clock::now();
  const double npl = shannon_fl(ctx.region, ctx.band);
  ctx.result = solve_fl(ctx.region, ctx.band);
  const double dt = seconds_since(t0);
  bounds.add(ctx.result);
  const double sum = ctx.result.eigenvalue_sum();
  const double rel = std::abs(sum - npl) / npl;
  Outcome o;
  o.pass = std::abs(npl - kNPLTarget) <= kNPLTol && rel <= kTraceRelTol && ctx.result.size() == 12000 && dt < 60.0;
  o.detail = fmt("N_PL=%.6f (target %.2f+-%.1f), sum of %zu eigenvalues rel. diff %.1e, %.2fs", npl, kNPLTarget,
                 kNPLTol, ctx.result.size(), rel, dt);
  return o;
}

Outcome fb_shannon() {
  const auto t0 = Clock::now();
  const Region region = Region::product(kR1, kR2, kT1, kT2);
  const double K = 1.4;
  const int L = 20;
  const double analytic = shannon_fb(region, {K, L, 70});
  SolveOptions opts;
  opts.vectors = false;
  const EigenResult coarse = solve_fb(region, {K, L, 70}, opts);
  const EigenResult fine = solve_fb(region, {K, L, 140}, opts);
  const double dt = seconds_since(t0);
  bounds.add(coarse);
  bounds.add(fine);
  const double s1 = coarse.eigenvalue_sum(), s2 = fine.eigenvalue_sum();
  const double rel_sum = std::abs(s1 - analytic) / analytic;
  const double rel_half = std::abs(s2 - s1) / s1;
  Outcome o;
  o.pass = std::abs(analytic - kNKLTarget) <= kNKLTol && rel_sum <= kFbSumRelTol && rel_half < kFbHalvingTol &&
           dt < 300.0;
  o.detail = fmt("N~_KL=%.6f (target %.2f+-%.1f), sum dk=0.02 %.6f (rel %.1e), dk=0.01 %.6f (change %.1e), %.1fs",
                 analytic, kNKLTarget, kNKLTol, s1, rel_sum, s2, rel_half, dt);
  return o;
}

Outcome orthogonality(const FlContext& ctx) {
  const auto t0 = Clock::now();
  const int count = 20;
  const Eigen::MatrixXcd V = ctx.result.eigenvectors(count);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(count, count);
  const double coeff = (V.adjoint() * V - I).cwiseAbs().maxCoeff();

  auto gram = [&](const SpatialGrid& g) {
    Eigen::MatrixXcd S(static_cast<Eigen::Index>(g.size()), count);
    for (int a = 0; a < count; ++a) S.col(a) = synthesis_fl(HarmonicCoeffs(ctx.band, V.col(a)), g);
    Eigen::VectorXd w(static_cast<Eigen::Index>(g.size()));
    for (std::size_t i = 0; i < g.r.size(); ++i)
      for (std::size_t j = 0; j < g.theta.size(); ++j)
        for (std::size_t k = 0; k < g.phi.size(); ++k) w[static_cast<Eigen::Index>(g.flat(i, j, k))] = g.weight(i, j, k);
    return Eigen::MatrixXcd(S.adjoint() * w.asDiagonal() * S);
  };
  const double ball = (gram(SpatialGrid::fourier_laguerre(ctx.band.P, ctx.band.L)) - I).cwiseAbs().maxCoeff();
  Eigen::VectorXd lam(count);
  for (int a = 0; a < count; ++a) lam[a] = ctx.result.eigenvalue(static_cast<std::size_t>(a));
  const SpatialGrid rg = SpatialGrid::for_region(*ctx.region.as<ProductSymmetric>(), ctx.band.P, ctx.band.L);
  const double region = (gram(rg) - Eigen::MatrixXd(lam.asDiagonal())).cwiseAbs().maxCoeff();
  Outcome o;
  o.pass = ball <= kBallOrthTol && region <= kRegionOrthTol && coeff <= kCoeffOrthTol;
  o.detail = fmt("%d leading modes: ball Gram err %.1e, region Gram-diag(lambda) err %.1e, coefficient err %.1e, %.2fs",
                 count, ball, region, coeff, seconds_since(t0));
  return o;
}

Outcome duality(const FlContext& ctx) {
  const auto t0 = Clock::now();
  const SpatialGrid rg = SpatialGrid::for_region(*ctx.region.as<ProductSymmetric>(), ctx.band.P, ctx.band.L);
  const std::vector<BallPoint> pts = rg.points();
  double coeff_err = 0.0, band_err = 0.0, space_err = 0.0;
  for (const std::size_t a : {0, 5, 19}) {
    const SpaceLimited g = space_limit(ctx.result.eigenfunction(a), ctx.result.eigenvalue(a), ctx.region);
    Eigen::VectorXcd vals(static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) vals[static_cast<Eigen::Index>(i)] = g.evaluate(pts[i]);
    const HarmonicCoeffs proj = project_fl(vals, rg, ctx.band);
    coeff_err = std::max(coeff_err, (proj.values - std::sqrt(g.lambda) * g.f.values).cwiseAbs().maxCoeff());
    coeff_err = std::max(coeff_err, (proj.values - g.band_coeffs.values).cwiseAbs().maxCoeff());
    band_err = std::max(band_err, std::abs(proj.values.squaredNorm() - g.lambda));
    space_err = std::max(space_err, std::abs(spatial_energy(vals, rg) - 1.0));
  }
  Outcome o;
  o.pass = coeff_err <= kDualTol && band_err <= kDualTol && space_err <= kDualTol;
  o.detail = fmt("ranks 0,5,19: |P_band g - sqrt(lambda) f| %.1e, |band energy - lambda| %.1e, |int_R |g|^2 - 1| %.1e, "
                 "%.2fs",
                 coeff_err, band_err, space_err, seconds_since(t0));
  return o;
}

Outcome oracles() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  double e_err = 0.0, g_err = 0.0, c_err = 0.0, c_diag_err = 0.0;
  for (int d = 0; d < kOracleDraws; ++d) {
    const int P = pick(1, 30);
    const double r1 = 40 * u(rng), r2 = r1 + 0.5 + 29.5 * u(rng);
    const Eigen::MatrixXd E = kernels::E_matrix(P, r1, r2);
    for (int p = 0; p < P; ++p)
      for (int q = 0; q <= p; ++q) e_err = std::max(e_err, std::abs(E(p, q) - oracle_E(p, q, r1, r2)));

    const int L = pick(1, 20);
    const int m = pick(-(L - 1), L - 1);
    double t1 = kPi * u(rng), t2 = kPi * u(rng);
    if (t1 > t2) std::swap(t1, t2);
    const Eigen::MatrixXd G = kernels::G_matrix(m, L, t1, t2);
    const int am = std::abs(m);
    for (int l = am; l < L; ++l)
      for (int lp = am; lp <= l; ++lp)
        g_err = std::max(g_err, std::abs(G(l - am, lp - am) - oracle_G(m, l, lp, t1, t2)));

    const int l = pick(0, 19);
    const double k = 2 * (1 - u(rng)), kp = (d % 2 == 0) ? k : 2 * (1 - u(rng));
    const double a = 30 * u(rng), b = a + 1 + 19 * u(rng);
    const double err = std::abs(kernels::C_kernel(l, l, k, kp, a, b) - oracle_C(l, k, kp, a, b));
    (d % 2 == 0 ? c_diag_err : c_err) = std::max(d % 2 == 0 ? c_diag_err : c_err, err);
  }
  Outcome o;
  o.pass = std::max({e_err, g_err, c_err, c_diag_err}) <= kOracleTol;
  o.detail = fmt("%d draws: max|E-oracle| %.1e, max|G-oracle| %.1e, max|C-oracle| k!=k' %.1e, k=k' %.1e, %.2fs",
                 kOracleDraws, e_err, g_err, c_err, c_diag_err, seconds_since(t0));
  return o;
}

Outcome trivial_regions() {
  const auto t0 = Clock::now();
  const Region ball = Region::full_ball();
  const FourierLaguerreBand small{10, 10};
  const kernels::KernelMatrix K = kernels::kernel_fl_dense(small, ball);
  const double dense_err = (K.complex_matrix() - Eigen::MatrixXcd::Identity(K.size(), K.size())).cwiseAbs().maxCoeff();
  double lam_err = 0.0, n_err = 0.0;
  for (const FourierLaguerreBand& b : {small, FourierLaguerreBand{30, 20}}) {
    SolveOptions opts;
    opts.force_dense = b.P == small.P;
    const EigenResult r = solve_fl(ball, b, opts);
    bounds.add(r);
    const double n = static_cast<double>(b.P) * b.L * b.L;
    lam_err = std::max(lam_err, (r.eigenvalues().array() - 1.0).abs().maxCoeff());
    lam_err = std::max({lam_err, std::abs(r.raw_min() - 1.0), std::abs(r.raw_max() - 1.0)});
    n_err = std::max(n_err, std::abs(r.shannon() - n) / n);
  }
  double mask_err = 0.0;
  for (const int grid_L : {20, 33}) {
    const Eigen::MatrixXcd G = kernels::G_mask(AngularMask::full_sphere(grid_L), 20);
    mask_err = std::max(mask_err, (G - Eigen::MatrixXcd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff());
  }
  Outcome o;
  o.pass = dense_err <= kIdentityTol && lam_err <= kIdentityTol && n_err <= kIdentityTol && mask_err <= kIdentityTol;
  o.detail = fmt("full ball: |K-I| %.1e, |lambda-1| %.1e, |N-PL^2|/PL^2 %.1e; full-sphere |G_mask-I| %.1e, %.2fs",
                 dense_err, lam_err, n_err, mask_err, seconds_since(t0));
  return o;
}

double angular_distance(double t1, double p1, double t2, double p2) {
  const double c = std::cos(t1) * std::cos(t2) + std::sin(t1) * std::sin(t2) * std::cos(p1 - p2);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

Outcome sparsity() {
  const auto t0 = Clock::now();
  const int P = 16, L = 16;
  const FourierLaguerreBand band{P, L};
  const AngularMask mask = AngularMask::gauss_grid(64, [](double t, double p) {
    const bool cap = angular_distance(t, p, 1.0, 1.5) <= 0.3;
    const bool rect = t >= 1.9 && t <= 2.3 && p >= 3.8 && p <= 4.6;
    return cap || rect;
  });
  const Region region = Region::masked(mask, 8.0, 13.0);
  const EigenResult res = solve_fl(region, band);
  bounds.add(res);
  const double N = res.shannon();
  const std::size_t J = default_truncation(res);

  std::size_t span = 0;
  while (span < res.size() && res.eigenvalue(span) > 0.5) ++span;
  const Eigen::MatrixXcd F = res.eigenvectors(span);
  const HarmonicCoeffs white = random_coeffs(band, 10);
  const Eigen::VectorXcd in = F * (F.adjoint() * white.values);
  const HarmonicCoeffs white2 = random_coeffs(band, 11);
  Eigen::VectorXcd out = white2.values - F * (F.adjoint() * white2.values);
  out *= std::sqrt(0.01 * in.squaredNorm() / out.squaredNorm());
  const HarmonicCoeffs signal(band, in + out);

  const Eigen::VectorXcd h = slepian_coeffs(signal, res);
  const double q = quality_measure(h, res, J);
  auto sorted_mag = [](const Eigen::VectorXcd& v) {
    std::vector<double> s(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) s[static_cast<std::size_t>(i)] = std::abs(v[i]);
    std::sort(s.begin(), s.end(), std::greater<>());
    return s;
  };
  const auto idx = static_cast<std::size_t>(std::floor(kDecayIndexFactor * static_cast<double>(J)));
  const auto slep = sorted_mag(h), fl = sorted_mag(signal.values);
  const double slep_ratio = slep.at(idx) / slep.front(), fl_ratio = fl.at(idx) / fl.front();
  const double dt = seconds_since(t0);
  Outcome o;
  o.pass = q >= kQualityMin && slep_ratio < kDecayFraction && fl_ratio >= kDecayFraction && dt < 120.0;
  o.detail = fmt("N_PL=%.3f, %zu modes with lambda>0.5, Q(%zu)=%.5f; |h| at rank %zu: Slepian %.2e of max, FL %.2e "
                 "of max, %.2fs",
                 N, span, J, q, idx, slep_ratio, fl_ratio, dt);
  return o;
}

Outcome rotation(const FlContext& ctx) {
  const auto t0 = Clock::now();
  const HarmonicCoeffs x = random_coeffs(ctx.band, 12);
  const double id_err = (rotate_eigenfunction(x, 0.0, 0.0).values - x.values).cwiseAbs().maxCoeff();
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ut(0, kPi), up(0, 2 * kPi);
  double norm_err = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double n = rotate_eigenfunction(x, ut(rng), up(rng)).values.squaredNorm();
    norm_err = std::max(norm_err, std::abs(n - x.values.squaredNorm()) / x.values.squaredNorm());
  }
  const double th0 = 0.7, ph0 = 1.2;
  const Region rotated = ctx.region.oriented(th0, ph0);
  const SpatialGrid rg = SpatialGrid::for_region(*ctx.region.as<ProductSymmetric>(), ctx.band.P, ctx.band.L);
  std::vector<BallPoint> pts = rg.points();
  const Eigen::Matrix3d R = rotation_matrix(*rotated.orientation());
  for (auto& p : pts) p = from_cartesian(R * to_cartesian(p));
  double energy_err = 0.0;
  for (const std::size_t a : {0, 10, 200}) {
    const HarmonicCoeffs f = rotate_eigenfunction(ctx.result.eigenfunction(a), th0, ph0);
    energy_err = std::max(energy_err, std::abs(spatial_energy(synthesis_fl(f, pts), rg) - ctx.result.eigenvalue(a)));
  }
  Outcome o;
  o.pass = id_err <= kRotIdentityTol && norm_err <= kRotNormTol && energy_err <= kRotEnergyTol;
  o.detail = fmt("identity err %.1e, norm rel. err %.1e, |energy in rotated region - lambda| %.1e (ranks 0,10,200), "
                 "%.2fs",
                 id_err, norm_err, energy_err, seconds_since(t0));
  return o;
}

Outcome round_trip() {
  const auto t0 = Clock::now();
  double rt = 0.0, pv = 0.0;
  unsigned seed = 20;
  for (const auto& [P, L] : {std::pair{1, 1}, std::pair{7, 13}, std::pair{20, 12}, std::pair{32, 32}}) {
    const FourierLaguerreBand band{P, L};
    const HarmonicCoeffs c = random_coeffs(band, seed++);
    const SpatialGrid g = SpatialGrid::fourier_laguerre(P, L);
    const Eigen::VectorXcd f = synthesis_fl(c, g);
    const double scale = c.values.cwiseAbs().maxCoeff();
    rt = std::max(rt, (analysis_fl(f, g, band).values - c.values).cwiseAbs().maxCoeff() / scale);
    pv = std::max(pv, std::abs(spatial_energy(f, g) / c.values.squaredNorm() - 1.0));
  }
  Outcome o;
  o.pass = rt <= kRoundTripTol && pv <= kParsevalTol;
  o.detail = fmt("(P,L) up to (32,32): round-trip err %.1e, Parseval rel. err %.1e, %.2fs", rt, pv, seconds_since(t0));
  return o;
}

}  // namespace

int main() {
  FlContext ctx;
  std::vector<std::pair<std::string, Outcome>> rows;
  auto run = [&](const char* name, auto&& fn) {
    rows.emplace_back(name, fn());
    const auto& [n, o] = rows.back();
    std::printf("[%s] criterion %zu: %s: %s\n", o.pass ? "PASS" : "FAIL", rows.size(), n.c_str(), o.detail.c_str());
    std::fflush(stdout);
  };
  run("angular Shannon number", angular_shannon);
  run("radial Shannon number", radial_shannon_number);
  run("FL Shannon number and spectrum", [&] { return fl_shannon(ctx); });
  run("FB Shannon number", fb_shannon);
  // Bounds are reported once every other solve has contributed.
  Outcome orth = orthogonality(ctx), dual = duality(ctx), orac = oracles(), triv = trivial_regions(),
          sparse = sparsity(), rot = rotation(ctx), trip = round_trip();
  run("projection spectrum bounds", [&] {
    Outcome o;
    o.pass = bounds.lo >= -kBoundTol && bounds.hi <= 1 + kBoundTol;
    o.detail = fmt("%d solves (FL and FB): raw eigenvalues in [%.3e, 1%+.3e]", bounds.solves, bounds.lo, bounds.hi - 1);
    return o;
  });
  run("orthogonality", [&] { return orth; });
  run("duality", [&] { return dual; });
  run("analytic vs quadrature", [&] { return orac; });
  run("trivial-region identities", [&] { return triv; });
  run("sparsity", [&] { return sparse; });
  run("rotation", [&] { return rot; });
  run("round-trip and Parseval", [&] { return trip; });
  const auto failed = std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r.second.pass; });
  std::printf("%zu/%zu criteria pass\n", rows.size() - static_cast<std::size_t>(failed), rows.size());
  return failed == 0 ? 0 : 1;
}
