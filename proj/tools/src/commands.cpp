#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "slepian/concentration.hpp"
#include "slepian/errors.hpp"
#include "slepian/io.hpp"
#include "slepian/kernels.hpp"
#include "slepian/transforms.hpp"

namespace slepian::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

struct Prepared {
  SpectralBand band;
  Region region;
};

// Everything is validated before any output directory is touched.
Prepared prepare(const RunConfig& c) {
  Prepared p{c.band(), c.parsed_region()};
  fs::create_directories(c.out);
  return p;
}

void write_json(const fs::path& path, const json& j) { io::write_atomic(path, j.dump(2) + "\n"); }

json meta(const RunConfig& c) {
  json j;
  j["version"] = "0.1.0";
  j["config"] = to_json(c);
  return j;
}

std::string num(double x) { return io::format_double(x); }

EigenResult solve(const Prepared& p, bool vectors = true) {
  SolveOptions opts;
  opts.vectors = vectors;
  return is_fourier_laguerre(p.band) ? solve_fl(p.region, std::get<FourierLaguerreBand>(p.band), opts)
                                     : solve_fb(p.region, std::get<FourierBesselBand>(p.band), opts);
}

double shannon_number(const SpectralBand& band, const Region& region) {
  return is_fourier_laguerre(band) ? shannon_fl(region, std::get<FourierLaguerreBand>(band))
                                   : shannon_fb(region, std::get<FourierBesselBand>(band));
}

double outer_radius(const Region& region) {
  if (const auto* s = region.as<ProductSymmetric>()) return s->r_max;
  if (const auto* s = region.as<ProductMask>()) return s->r_max;
  return std::numeric_limits<double>::infinity();
}

std::vector<int> parse_ints(const std::string& text, const std::string& what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ValidationError(what + ": '" + item + "' is not an integer");
    out.push_back(v);
  }
  return out;
}

Eigen::VectorXd sorted_magnitudes(const Eigen::VectorXcd& v) {
  Eigen::VectorXd s = v.cwiseAbs();
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

std::vector<BallPoint> read_points(const fs::path& path) {
  std::vector<BallPoint> pts;
  std::stringstream lines(io::read_text(path));
  std::string line;
  int number = 0;
  while (std::getline(lines, line)) {
    ++number;
    if (line.empty() || line[0] == '#' || line.find_first_of("abcdefghijklmnopqrstuvwxyz") == 0) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<double> v;
    while (std::getline(ss, field, ',')) {
      try {
        v.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw ValidationError(path.string() + ":" + std::to_string(number) + ": '" + field + "' is not a number");
      }
    }
    if (v.size() != 3)
      throw ValidationError(path.string() + ":" + std::to_string(number) + ": expected r,theta,phi");
    if (v[0] < 0 || v[1] < 0 || v[1] > kPi)
      throw ValidationError(path.string() + ":" + std::to_string(number) + ": need r >= 0 and theta in [0, pi]");
    pts.push_back({v[0], v[1], v[2]});
  }
  if (pts.empty()) throw ValidationError(path.string() + ": no points");
  return pts;
}

HarmonicCoeffs read_coefficients(const RunConfig& c, const SpectralBand& band) {
  if (c.input.empty()) throw ValidationError(c.command + ": --input is required");
  const io::MatrixFile f = io::read_matrix(c.input);
  if (f.values.cols() != 1) throw ValidationError("input: expected a single column, got " + std::to_string(f.values.cols()));
  const Eigen::VectorXcd v = f.values.col(0);
  if (c.input_kind == "samples") {
    if (!is_fourier_laguerre(band)) throw ValidationError("input-kind: samples need the fl domain");
    const SpatialGrid g = SpatialGrid::fourier_laguerre(c.P, c.L, c.grid_margin);
    if (static_cast<std::size_t>(v.size()) != g.size())
      throw ValidationError("input: " + std::to_string(v.size()) + " samples, grid has " + std::to_string(g.size()));
    return analysis_fl(v, g, std::get<FourierLaguerreBand>(band));
  }
  if (static_cast<std::size_t>(v.size()) != dimension(band))
    throw ValidationError("input: " + std::to_string(v.size()) + " coefficients, band " + describe(band) + " has " +
                          std::to_string(dimension(band)));
  return HarmonicCoeffs(band, v);
}

}  // namespace

void cmd_kernel(const RunConfig& c) {
  const Prepared p = prepare(c);
  json m = meta(c);
  std::vector<std::string> files;
  double trace = 0.0;
  if (const auto* fl = std::get_if<FourierLaguerreBand>(&p.band)) {
    double r1 = 0.0, r2 = 0.0;
    if (const auto* s = p.region.as<ProductSymmetric>()) {
      r1 = s->r_min;
      r2 = s->r_max;
    } else if (const auto* s = p.region.as<ProductMask>()) {
      r1 = s->r_min;
      r2 = s->r_max;
    } else {
      throw ValidationError("region: kernel factors need a product or mask region");
    }
    const Eigen::MatrixXd E = kernels::E_matrix(fl->P, r1, r2);
    io::write_matrix(c.out / "E.mat", E);
    files.push_back("E.mat");
    double trace_g = 0.0;
    if (const auto* s = p.region.as<ProductSymmetric>()) {
      for (int order = 0; order < fl->L; ++order) {
        const Eigen::MatrixXd G = kernels::G_matrix(order, fl->L, s->theta_min, s->theta_max);
        const std::string name = "G_m" + std::to_string(order) + ".mat";
        io::write_matrix(c.out / name, G);
        files.push_back(name);
        trace_g += (order == 0 ? 1 : 2) * G.trace();
      }
      m["G_note"] = "G_m<m>.mat holds orders m >= 0 over l = m..L-1; G^{-m} = G^m";
    } else {
      const Eigen::MatrixXcd G = kernels::G_mask(p.region.as<ProductMask>()->mask, fl->L);
      io::write_matrix(c.out / "G_mask.mat", G);
      files.push_back("G_mask.mat");
      trace_g = G.trace().real();
    }
    m["trace_E"] = E.trace();
    m["trace_G"] = trace_g;
    trace = E.trace() * trace_g;
    if (c.dense) {
      io::write_matrix(c.out / "K.mat", kernels::kernel_fl_dense(*fl, p.region).complex_matrix());
      files.push_back("K.mat");
    }
  } else {
    const auto& fb = std::get<FourierBesselBand>(p.band);
    const auto* s = p.region.as<ProductSymmetric>();
    if (!s) throw ValidationError("region: Fourier-Bessel kernels need a product region");
    const Eigen::MatrixXd couplings = kernels::fb_radial_couplings(fb, s->r_min, s->r_max);
    for (int order = 0; order < fb.L; ++order) {
      const kernels::KernelMatrix B = kernels::kernel_fb_fixed_order(order, fb, p.region, &couplings);
      const std::string name = "B_m" + std::to_string(order) + ".mat";
      io::write_matrix(c.out / name, B.re);
      files.push_back(name);
      trace += (order == 0 ? 1 : 2) * B.re.trace();
    }
    io::CsvTable samples{{"n", "k", "weight"}, {}};
    for (int n = 1; n <= fb.M; ++n) samples.rows.push_back({std::to_string(n), num(fb.sample(n)), num(fb.weight(n))});
    io::write_atomic(c.out / "k_samples.csv", samples.str());
    files.push_back("k_samples.csv");
    m["B_note"] = "B_m<m>.mat is W^1/2 (C o G^m) W^1/2 over (l, n), l = m..L-1, n fastest";
  }
  m["trace"] = trace;
  m["files"] = files;
  write_json(c.out / "meta.json", m);
}

void cmd_eigen(const RunConfig& c) {
  std::vector<int> dims;
  double rmax = 0.0;
  if (!c.grid.empty()) {
    dims = parse_ints(c.grid, "grid");
    if (dims.size() != 2 || dims[0] < 2 || dims[1] < 2) throw ValidationError("grid: expected nr,ntheta with both >= 2");
    rmax = c.grid_rmax > 0 ? c.grid_rmax : 1.2 * outer_radius(c.parsed_region());
    if (!std::isfinite(rmax)) throw ValidationError("grid-rmax: required for unbounded regions");
  }
  const Prepared p = prepare(c);
  const EigenResult res = solve(p);

  io::CsvTable values{{"rank", "lambda", "m", "lambda_radial", "lambda_angular"}, {}};
  values.rows.reserve(res.size());
  std::size_t above_half = 0;
  for (std::size_t a = 0; a < res.size(); ++a) {
    const EigenMode& mode = res.modes()[a];
    if (mode.lambda >= 0.5) ++above_half;
    values.rows.push_back({std::to_string(a + 1), num(mode.lambda), mode.m ? std::to_string(*mode.m) : "",
                           mode.lambda_radial ? num(*mode.lambda_radial) : "",
                           mode.lambda_angular ? num(*mode.lambda_angular) : ""});
  }
  io::write_atomic(c.out / "eigenvalues.csv", values.str());

  std::vector<std::size_t> ranks;
  for (std::size_t a = 0; a < res.size(); ++a)
    if (!c.order || res.modes()[a].m == c.order) ranks.push_back(a);
  if (c.order && ranks.empty()) throw ValidationError("m: no eigenfunctions of order " + std::to_string(*c.order));
  const std::size_t wanted =
      c.count > 0 ? static_cast<std::size_t>(c.count) : std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(res.shannon())));
  ranks.resize(std::min(ranks.size(), wanted));

  Eigen::MatrixXcd vectors(static_cast<Eigen::Index>(dimension(p.band)), static_cast<Eigen::Index>(ranks.size()));
  for (std::size_t i = 0; i < ranks.size(); ++i) vectors.col(static_cast<Eigen::Index>(i)) = res.eigenfunction(ranks[i]).values;
  io::write_matrix(c.out / "eigenvectors.mat", vectors);

  std::vector<std::string> files{"eigenvalues.csv", "eigenvectors.mat", "shannon.json"};
  if (!c.grid.empty()) {
    std::vector<BallPoint> pts;
    for (int i = 0; i < dims[0]; ++i)
      for (int j = 0; j < dims[1]; ++j) pts.push_back({rmax * i / (dims[0] - 1), kPi * j / (dims[1] - 1), 0.0});
    for (const std::size_t a : ranks) {
      const HarmonicCoeffs f = res.eigenfunction(a);
      const Eigen::VectorXcd v = is_fourier_laguerre(p.band) ? synthesis_fl(f, pts) : synthesis_fb(f, pts);
      io::CsvTable t{{"r", "theta", "re", "im"}, {}};
      for (std::size_t k = 0; k < pts.size(); ++k) {
        const auto val = v[static_cast<Eigen::Index>(k)];
        t.rows.push_back({num(pts[k].r), num(pts[k].theta), num(val.real()), num(val.imag())});
      }
      const std::string name = "eigenfunction_" + std::to_string(a + 1) + ".csv";
      io::write_atomic(c.out / name, t.str());
      files.push_back(name);
    }
  }

  json s;
  s["shannon"] = res.shannon();
  s["eigenvalue_sum"] = res.eigenvalue_sum();
  s["size"] = res.size();
  s["count_lambda_ge_half"] = above_half;
  s["raw_min"] = res.raw_min();
  s["raw_max"] = res.raw_max();
  write_json(c.out / "shannon.json", s);

  json m = meta(c);
  json r = json::array();
  for (const std::size_t a : ranks) r.push_back(a + 1);
  m["eigenvector_ranks"] = r;
  m["files"] = files;
  write_json(c.out / "meta.json", m);
}

void cmd_shannon(const RunConfig& c) {
  const Prepared p = prepare(c);
  json s;
  s["shannon"] = shannon_number(p.band, p.region);
  if (is_fourier_laguerre(p.band) && p.region.radially_independent()) {
    if (const auto* ps = p.region.as<ProductSymmetric>()) {
      s["radial"] = radial_shannon(c.P, ps->r_min, ps->r_max);
      s["angular"] = c.L * c.L / (4 * kPi) * solid_angle_band(ps->theta_min, ps->theta_max);
    } else if (const auto* pm = p.region.as<ProductMask>()) {
      s["radial"] = radial_shannon(c.P, pm->r_min, pm->r_max);
      s["angular"] = c.L * c.L / (4 * kPi) * solid_angle(pm->mask);
    }
  }
  std::vector<std::string> files{"shannon.json"};
  if (!c.sweep.empty()) {
    const auto eq = c.sweep.find('=');
    const std::string name = c.sweep.substr(0, eq);
    if (eq == std::string::npos || (name != "P" && name != "L" && name != "K" && name != "M"))
      throw ValidationError("sweep: expected NAME=start:stop:step with NAME in P, L, K, M");
    std::vector<double> range;
    std::stringstream ss(c.sweep.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ':')) {
      try {
        range.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw ValidationError("sweep: '" + item + "' is not a number");
      }
    }
    if (range.size() != 3 || !(range[2] > 0) || range[1] < range[0])
      throw ValidationError("sweep: need start <= stop and step > 0");
    io::CsvTable t{{name, "shannon"}, {}};
    const auto steps = static_cast<long>(std::floor((range[1] - range[0]) / range[2] + 1e-9));
    for (long i = 0; i <= steps; ++i) {
      RunConfig v = c;
      const double x = range[0] + static_cast<double>(i) * range[2];
      if (name == "K") {
        v.K = x;
      } else {
        if (x != std::floor(x)) throw ValidationError("sweep: " + name + " takes integer values");
        (name == "P" ? v.P : name == "L" ? v.L : v.M) = static_cast<int>(x);
      }
      t.rows.push_back({name == "K" ? num(x) : std::to_string(static_cast<long>(x)), num(shannon_number(v.band(), p.region))});
    }
    io::write_atomic(c.out / "shannon_sweep.csv", t.str());
    files.push_back("shannon_sweep.csv");
  }
  write_json(c.out / "shannon.json", s);
  json m = meta(c);
  m["files"] = files;
  write_json(c.out / "meta.json", m);
}

void cmd_project(const RunConfig& c) {
  const Prepared p = prepare(c);
  const HarmonicCoeffs signal = read_coefficients(c, p.band);
  if (c.J && static_cast<std::size_t>(*c.J) > dimension(p.band))
    throw ValidationError("J: " + std::to_string(*c.J) + " exceeds the band dimension " + std::to_string(dimension(p.band)));
  const EigenResult res = solve(p);
  const Eigen::VectorXcd h = slepian_coeffs(signal, res);
  const std::size_t J = c.J ? static_cast<std::size_t>(*c.J) : default_truncation(res);
  io::write_matrix(c.out / "slepian_coeffs.mat", Eigen::MatrixXcd(h));

  const Eigen::VectorXd hs = sorted_magnitudes(signal.values), ss = sorted_magnitudes(h);
  io::CsvTable decay{{"index", "harmonic", "slepian"}, {}};
  for (Eigen::Index i = 0; i < hs.size(); ++i)
    decay.rows.push_back({std::to_string(i + 1), num(hs[i]), num(i < ss.size() ? ss[i] : 0.0)});
  io::write_atomic(c.out / "decay.csv", decay.str());

  io::CsvTable q{{"J", "Q"}, {}};
  for (std::size_t j = 0; j <= res.size(); ++j) q.rows.push_back({std::to_string(j), num(quality_measure(h, res, j))});
  io::write_atomic(c.out / "q.csv", q.str());

  json qj;
  qj["J"] = J;
  qj["Q"] = quality_measure(h, res, J);
  qj["shannon"] = res.shannon();
  qj["energy_fraction"] = h.head(static_cast<Eigen::Index>(J)).squaredNorm() / h.squaredNorm();
  write_json(c.out / "q.json", qj);

  json m = meta(c);
  m["files"] = {"slepian_coeffs.mat", "decay.csv", "q.csv", "q.json"};
  write_json(c.out / "meta.json", m);
}

void cmd_synth(const RunConfig& c) {
  const Prepared p = prepare(c);
  RunConfig coeff_cfg = c;
  coeff_cfg.input_kind = "coeffs";
  const HarmonicCoeffs f = read_coefficients(coeff_cfg, p.band);
  json m = meta(c);
  if (!c.points.empty()) {
    const std::vector<BallPoint> pts = read_points(c.points);
    const Eigen::VectorXcd v = is_fourier_laguerre(p.band) ? synthesis_fl(f, pts) : synthesis_fb(f, pts);
    io::CsvTable t{{"r", "theta", "phi", "re", "im"}, {}};
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const auto val = v[static_cast<Eigen::Index>(k)];
      t.rows.push_back({num(pts[k].r), num(pts[k].theta), num(pts[k].phi), num(val.real()), num(val.imag())});
    }
    io::write_atomic(c.out / "values.csv", t.str());
    m["files"] = {"values.csv"};
  } else {
    if (!is_fourier_laguerre(p.band)) throw ValidationError("points: Fourier-Bessel synthesis needs --points");
    const SpatialGrid g = SpatialGrid::fourier_laguerre(c.P, c.L, c.grid_margin);
    io::write_matrix(c.out / "samples.mat", Eigen::MatrixXcd(synthesis_fl(f, g)));
    io::CsvTable t{{"r", "theta", "phi", "weight"}, {}};
    for (std::size_t i = 0; i < g.r.size(); ++i)
      for (std::size_t j = 0; j < g.theta.size(); ++j)
        for (std::size_t k = 0; k < g.phi.size(); ++k)
          t.rows.push_back({num(g.r[i]), num(g.theta[j]), num(g.phi[k]), num(g.weight(i, j, k))});
    io::write_atomic(c.out / "nodes.csv", t.str());
    m["files"] = {"samples.mat", "nodes.csv"};
  }
  write_json(c.out / "meta.json", m);
}

}  // namespace slepian::cli
