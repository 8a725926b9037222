#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "pgap/constants.hpp"
#include "pgap/fem.hpp"
#include "pgap/geometry.hpp"
#include "pgap/mesh.hpp"
#include "pgap/onedim.hpp"
#include "pgap/parallel.hpp"
#include "pgap/weight.hpp"

namespace pgap {

struct FittedQuantity {
  std::string name;
  double value = 0.0;
  double residual = 0.0;  // rms residual of the fit, or solver diagnostic
};

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
};

/// One experiment end to end: samples, fitted quantities, pass/fail per
/// acceptance rule, runtime.
struct ExperimentReport {
  std::string name;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::vector<DeficitSample> samples;
  std::vector<FittedQuantity> fits;
  std::vector<CheckResult> checks;
  double runtime_seconds = 0.0;
  int excluded_samples = 0;
  bool pass = true;

  void finish_checks() {
    pass = true;
    for (const auto& c : checks) pass = pass && c.pass;
  }
};

namespace expdetail {

struct LinFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
};

inline LinFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
  const size_t n = xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  LinFit f;
  const double det = n * sxx - sx * sx;
  f.slope = (n * sxy - sx * sy) / det;
  f.intercept = (sy * sxx - sx * sxy) / det;
  double ss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double r = ys[i] - f.slope * xs[i] - f.intercept;
    ss += r * r;
  }
  f.rms = std::sqrt(ss / n);
  return f;
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

struct RichardsonMu {
  double mu = 0.0;          // extrapolated eigenvalue
  double margin_ln = 0.0;   // L^inf bound margin of the fine solve, log space
};

/// Eigenvalue on an axis-aligned rectangle with two nested structured meshes
/// and Richardson extrapolation of the leading h^2 error.
inline RichardsonMu rect_mu_richardson(double p, const ConvexPolygon2D& rect,
                                       const Weight& w, double h,
                                       const Fem2DOptions& opt = {}) {
  const Mesh coarse = triangulate(rect, h);
  const Mesh fine = triangulate(rect, h / 2.0);
  const double mu1 = (p == 2.0) ? mu_2_fem(rect, w, coarse, opt).mu
                                : mu_p_fem(p, rect, w, coarse, opt).mu;
  const Eig2DResult res2 =
      (p == 2.0) ? mu_2_fem(rect, w, fine, opt) : mu_p_fem(p, rect, w, fine, opt);
  RichardsonMu out;
  out.mu = (4.0 * res2.mu - mu1) / 3.0;
  out.margin_ln =
      static_cast<double>(linf_bound_check(res2, rect, w, p, fine).margin.ln());
  return out;
}

} // namespace expdetail

/// Rectangle sweep (0,1)x(0,eps): the deficit must scale like the square of
/// the second John semi-axis, and at p = 2 the ratio approaches 4 pi^2.
inline ExperimentReport sharpness_sweep(double p, std::vector<double> eps_grid) {
  if (eps_grid.size() < 5)
    throw Error(ErrorCode::UsageError, "sharpness_sweep needs at least 5 epsilon values");
  for (double e : eps_grid)
    if (!(e > 0.0 && e <= 0.2))
      throw Error(ErrorCode::UsageError, "sharpness eps_grid must lie in (0, 0.2]");
  std::sort(eps_grid.begin(), eps_grid.end(), std::greater<double>());

  expdetail::Stopwatch clock;
  ExperimentReport rep;
  rep.name = "sharpness";
  rep.parameters = {{"p", std::to_string(p)}};

  const int n = static_cast<int>(eps_grid.size());
  std::vector<DeficitSample> samples(n);
  parallel_for_index(n, [&](int i) {
    const double eps = eps_grid[i];
    const auto rect = ConvexPolygon2D::rectangle(1.0, eps);
    DeficitSample s;
    s.shape_id = "rect_eps=" + std::to_string(eps);
    s.p = p;
    s.D = rect.diameter();
    s.width = rect.width();
    try {
      const auto je = john_ellipse(rect);
      s.a1 = je.a1;
      s.a2 = je.a2;
      const auto rich = expdetail::rect_mu_richardson(p, rect, Weight::constant(), eps / 4.0);
      s.mu = rich.mu;
      s.linf_margin_ln = rich.margin_ln;
      s.has_linf_margin = true;
      s.deficit = s.mu - std::pow(pi_p(p) / s.D, p);
      s.ratio = s.deficit * std::pow(s.D, p + 2.0) / (s.a2 * s.a2);
    } catch (const Error& e) {
      s.status = std::string("failed:") + to_string(e.code());
    }
    samples[i] = s;
  });
  rep.samples = samples;

  // slope over the 3 smallest eps to suppress preasymptotic curvature
  std::vector<double> lx, ly;
  for (int i = n - 3; i < n; ++i) {
    lx.push_back(std::log(samples[i].a2));
    ly.push_back(std::log(std::max(samples[i].deficit, 1e-300)));
  }
  const auto fit = expdetail::least_squares(lx, ly);
  rep.fits.push_back({"log-deficit vs log-a2 slope", fit.slope, fit.rms});
  rep.checks.push_back(
      {"slope == 2 within 0.05", std::abs(fit.slope - 2.0) <= 0.05, fit.slope, 0.05});

  if (p == 2.0) {
    const auto& last = samples[n - 1];
    const double eps_min = eps_grid[n - 1];
    rep.fits.push_back({"ratio at smallest eps", last.ratio, 0.0});
    // the closed form is 4 pi^2 (1 + eps^2); divide the curvature out
    const double limit = last.ratio / (1.0 + eps_min * eps_min);
    rep.fits.push_back({"ratio limit (closed-form normalized)", limit, 0.0});
    rep.checks.push_back({"ratio limit == 4 pi^2 within 1%",
                          std::abs(limit - 4.0 * kPi * kPi) <= 0.01 * 4.0 * kPi * kPi,
                          limit, 4.0 * kPi * kPi});
  } else {
    // mu_p(Omega_eps) <= (pi_p)^p up to discretization slack
    bool all_below = true;
    for (const auto& s : samples) all_below = all_below && s.mu <= pi_p_pow(p) * 1.01;
    rep.checks.push_back({"mu_p <= (pi_p)^p + mesh slack", all_below,
                          samples[n - 1].mu, pi_p_pow(p) * 1.01});
  }
  rep.finish_checks();
  rep.runtime_seconds = clock.seconds();
  return rep;
}

/// mu_2(B1, n e^{-(ny)^2}) approaches pi^2/4 = (pi/D)^2: the quantitative
/// inequality fails for merely log-concave weights.
inline ExperimentReport counterexample_logconcave(std::vector<double> n_grid,
                                                  std::size_t mesh_budget = 500000) {
  if (n_grid.size() < 3)
    throw Error(ErrorCode::UsageError, "counterexample needs at least 3 scales");
  std::sort(n_grid.begin(), n_grid.end());

  expdetail::Stopwatch clock;
  ExperimentReport rep;
  rep.name = "counterexample";
  rep.parameters = {{"weight", "gaussian_y"}, {"domain", "unit disk (64-gon)"}};

  const auto disk = ConvexPolygon2D::regular_ngon(64, 1.0);
  const double target = kPi * kPi / 4.0;
  const int n = static_cast<int>(n_grid.size());
  std::vector<DeficitSample> samples(n);
  parallel_for_index(n, [&](int i) {
    const double scale = n_grid[i];
    DeficitSample s;
    s.shape_id = "disk_n=" + std::to_string(scale);
    s.p = 2.0;
    s.D = disk.diameter();
    try {
      const Weight w = Weight::gaussian_y(scale);
      // resolve the weight's y-scale 1/n; two meshes for extrapolation
      const double h = std::min(0.1, 0.4 / scale);
      const auto m1 = triangulate(disk, h, mesh_budget);
      const auto m2 = triangulate(disk, h / 2.0, mesh_budget);
      const double mu1 = mu_2_fem(disk, w, m1).mu;
      const auto res2 = mu_2_fem(disk, w, m2);
      s.mu = (4.0 * res2.mu - mu1) / 3.0;
      s.linf_margin_ln =
          static_cast<double>(linf_bound_check(res2, disk, w, 2.0, m2).margin.ln());
      s.has_linf_margin = true;
      const auto je = john_ellipse(disk);
      s.a1 = je.a1;
      s.a2 = je.a2;
      s.width = disk.width();
      s.deficit = s.mu - target;
      s.ratio = s.deficit * std::pow(s.D, 4.0) / (s.a2 * s.a2);
    } catch (const Error& e) {
      s.status = std::string("failed:") + to_string(e.code());
    }
    samples[i] = s;
  });
  rep.samples = samples;

  bool rigid = true, decreasing = true;
  for (int i = 0; i < n; ++i) {
    rigid = rigid && samples[i].mu > target;
    if (i > 0) decreasing = decreasing && samples[i].deficit < samples[i - 1].deficit;
  }
  rep.checks.push_back({"mu > pi^2/4 at every n (rigidity)", rigid,
                        samples[n - 1].mu, target});
  rep.checks.push_back({"deficit ratio decreasing in n", decreasing,
                        samples[n - 1].ratio, samples[0].ratio});

  // extrapolate mu(n) linearly in 1/n over the three largest scales
  std::vector<double> xs, ys;
  for (int i = std::max(0, n - 3); i < n; ++i) {
    xs.push_back(1.0 / n_grid[i]);
    ys.push_back(samples[i].mu);
  }
  const auto fit = expdetail::least_squares(xs, ys);
  rep.fits.push_back({"extrapolated limit of mu_2(B1, phi_n)", fit.intercept, fit.rms});
  rep.checks.push_back({"extrapolated limit == pi^2/4 within 2%",
                        std::abs(fit.intercept - target) <= 0.02 * target,
                        fit.intercept, target});
  rep.finish_checks();
  rep.runtime_seconds = clock.seconds();
  return rep;
}

struct BlaschkeOptions {
  double h = 0.025;
  int restarts = 0;
  int min_points = 6;
  int max_points = 32;
  int m = 1;
  // deterministic reference shapes plotted next to the random cloud; the
  // cut-disk family tracks the empirical infimum of the semi-axis ratio
  std::vector<double> cut_disk_heights = {0.3, 0.2, 0.15, 0.1, 0.07};
};

/// Disk of radius 1/2 clipped to |y| <= c: the corner-to-corner diagonal is
/// exactly 1, so flattening does not inflate the diameter. This family
/// approaches the smallest deficit ratio we observe over convex shapes.
inline ConvexPolygon2D cut_disk_polygon(double c, int arc_points = 256) {
  std::vector<Vec2> pts;
  for (int i = 0; i < arc_points; ++i) {
    const double t = 2.0 * kPi * i / arc_points;
    Vec2 p{0.5 * std::cos(t), 0.5 * std::sin(t)};
    p.y = std::clamp(p.y, -c, c);
    pts.push_back(p);
  }
  return ConvexPolygon2D::validate(detail::convex_hull(pts));
}

/// Seeded Blaschke-diagram sampling: unit-diameter random convex hulls, the
/// deficit ratio against a2, plus deterministic reference shapes (square and
/// the cut-disk family near the empirical infimum).
inline ExperimentReport blaschke_sample(double p, int count, std::uint64_t seed,
                                        const BlaschkeOptions& opt = {}) {
  if (count < 1) throw Error(ErrorCode::UsageError, "blaschke needs count >= 1");
  expdetail::Stopwatch clock;
  ExperimentReport rep;
  rep.name = "blaschke";
  std::string refs = "square";
  for (double c : opt.cut_disk_heights) refs += ", cut-disk c=" + std::to_string(c);
  rep.parameters = {{"p", std::to_string(p)},
                    {"count", std::to_string(count)},
                    {"seed", std::to_string(seed)},
                    {"h", std::to_string(opt.h)},
                    {"sampler", "convex hull of uniform disk points, diameter 1"},
                    {"x_axis", "a2, second John semi-axis at unit diameter"},
                    {"reference_shapes", refs}};

  const auto chain = constants_report(p, opt.m, 2);
  const double ln_k0 = static_cast<double>(chain.k0.ln());

  Fem2DOptions fopt;
  fopt.restarts = opt.restarts;
  auto measure = [&](const ConvexPolygon2D& poly, const std::string& shape_id,
                     std::uint64_t sample_seed) {
    DeficitSample s;
    s.seed = sample_seed;
    s.shape_id = shape_id;
    s.p = p;
    try {
      const Mesh mesh = triangulate(poly, opt.h);
      const auto res = (p == 2.0) ? mu_2_fem(poly, Weight::constant(), mesh, fopt)
                                  : mu_p_fem(p, poly, Weight::constant(), mesh, fopt);
      const auto je = john_ellipse(poly);
      s.D = poly.diameter();
      s.a1 = je.a1;
      s.a2 = je.a2;
      s.width = poly.width();
      s.mu = res.mu;
      s.deficit = res.mu - std::pow(pi_p(p) / s.D, p);
      s.ratio = s.deficit * std::pow(s.D, p + 2.0) / (s.a2 * s.a2);
      s.residual = res.residual;
      s.ln_ratio = std::log(s.ratio);
      s.ln_k0 = ln_k0;
      s.above_floor = s.ln_ratio > ln_k0;
      s.linf_margin_ln = static_cast<double>(
          linf_bound_check(res, poly, Weight::constant(), p, mesh).margin.ln());
      s.has_linf_margin = true;
      if (!res.converged) s.status = "failed:NotConverged";
    } catch (const Error& e) {
      s.status = std::string("failed:") + to_string(e.code());
    }
    return s;
  };

  const int n_fixed = 1 + static_cast<int>(opt.cut_disk_heights.size());
  std::vector<DeficitSample> samples(n_fixed + count);
  parallel_for_index(n_fixed + count, [&](int i) {
    if (i == 0) {
      const double side = 1.0 / std::sqrt(2.0);
      samples[0] = measure(ConvexPolygon2D::rectangle(side, side), "square", 0);
    } else if (i < n_fixed) {
      const double c = opt.cut_disk_heights[i - 1];
      samples[i] = measure(cut_disk_polygon(c), "cutdisk_c=" + std::to_string(c), 0);
    } else {
      const int k = i - n_fixed;
      const std::uint64_t si = seed + 1000003ULL * std::uint64_t(k);
      const int npts =
          opt.min_points + int(si % std::uint64_t(opt.max_points - opt.min_points + 1));
      try {
        samples[i] = measure(random_convex_polygon(si, npts), "random", si);
      } catch (const Error& e) {
        samples[i].seed = si;
        samples[i].shape_id = "random";
        samples[i].p = p;
        samples[i].status = std::string("failed:") + to_string(e.code());
      }
    }
  });
  rep.samples = samples;

  double min_all = std::numeric_limits<double>::infinity();
  double min_seeded = std::numeric_limits<double>::infinity();
  bool all_above = true;
  bool all_positive = true;
  int excluded = 0;
  for (const auto& s : rep.samples) {
    if (s.status != "ok") {
      ++excluded;
      continue;
    }
    min_all = std::min(min_all, s.ratio);
    if (s.shape_id == "random") min_seeded = std::min(min_seeded, s.ratio);
    all_above = all_above && s.above_floor;
    all_positive = all_positive && s.deficit > 0.0;
  }
  rep.excluded_samples = excluded;
  rep.fits.push_back({"empirical minimum ratio (seeded samples)", min_seeded, 0.0});
  rep.fits.push_back({"empirical minimum ratio (incl. reference shapes)", min_all, 0.0});
  rep.checks.push_back({"ln(ratio) > ln(K0) on every sample", all_above, min_all, ln_k0});
  rep.checks.push_back({"deficit > 0 on every sample (rigidity)", all_positive,
                        min_all, 0.0});
  rep.finish_checks();
  rep.runtime_seconds = clock.seconds();
  return rep;
}

/// Collapsing rectangles (0,1)x(0,eps) against the one-dimensional limit
/// problem with the section-measure weight.
inline ExperimentReport collapse_study(double p, const Weight& w,
                                       std::vector<double> eps_grid) {
  // The collapsed weight is (section measure) * phi; for a rectangle the
  // section measure is constant, so the 1D weight is phi(x) itself (the
  // eigenvalue is invariant under scaling of the weight).
  std::sort(eps_grid.begin(), eps_grid.end(), std::greater<double>());
  if (eps_grid.empty())
    throw Error(ErrorCode::UsageError, "collapse_study needs a nonempty eps grid");
  for (double e : eps_grid)
    if (!(e > 0.0 && e < 1.0))
      throw Error(ErrorCode::UsageError, "collapse eps grid must lie in (0,1)");

  expdetail::Stopwatch clock;
  ExperimentReport rep;
  rep.name = "collapse";
  rep.parameters = {{"p", std::to_string(p)}, {"weight", w.describe()}};

  const auto target1d = mu_p_1d_shoot(p, 1.0, w);
  rep.fits.push_back({"1D collapsed eigenvalue", target1d.mu, target1d.residual});

  const int n = static_cast<int>(eps_grid.size());
  std::vector<DeficitSample> samples(n);
  parallel_for_index(n, [&](int i) {
    const double eps = eps_grid[i];
    const auto rect = ConvexPolygon2D::rectangle(1.0, eps);
    DeficitSample s;
    s.shape_id = "rect_eps=" + std::to_string(eps);
    s.p = p;
    s.D = rect.diameter();
    try {
      const auto rich = expdetail::rect_mu_richardson(p, rect, w, eps / 4.0);
      s.mu = rich.mu;
      s.linf_margin_ln = rich.margin_ln;
      s.has_linf_margin = true;
      s.deficit = s.mu - target1d.mu;  // here: distance to the 1D limit
      s.ratio = std::abs(s.deficit) / target1d.mu;
    } catch (const Error& e) {
      s.status = std::string("failed:") + to_string(e.code());
    }
    samples[i] = s;
  });
  rep.samples = samples;

  // convergence rate in eps (log-log slope over the smallest three)
  if (n >= 3) {
    std::vector<double> lx, ly;
    for (int i = n - 3; i < n; ++i) {
      lx.push_back(std::log(eps_grid[i]));
      ly.push_back(std::log(std::max(samples[i].ratio, 1e-16)));
    }
    const auto fit = expdetail::least_squares(lx, ly);
    rep.fits.push_back({"log-log convergence rate in eps", fit.slope, fit.rms});
  }
  const double last_gap = samples[n - 1].ratio;
  rep.checks.push_back({"2D within 1% of the 1D limit at the smallest eps",
                        last_gap <= 0.01, last_gap, 0.01});

  // full-spectrum statement at p = 2: first three eigenvalues
  if (p == 2.0) {
    const double eps = eps_grid[n - 1];
    const auto rect = ConvexPolygon2D::rectangle(1.0, eps);
    const Mesh mesh = triangulate(rect, eps / 4.0);
    const auto eigs2d = mu_2_fem_spectrum(rect, w, mesh, 3);
    bool all3 = true;
    for (int k = 1; k <= 3; ++k) {
      Shoot1DOptions sopt;
      sopt.max_mode = k;
      const auto tk = mu_p_1d_shoot(2.0, 1.0, w, sopt);
      const double rel = std::abs(eigs2d[k - 1] - tk.mu) / tk.mu;
      rep.fits.push_back({"mode " + std::to_string(k) + " relative gap", rel, 0.0});
      all3 = all3 && rel <= 0.02;
    }
    rep.checks.push_back({"first three eigenvalues track the 1D spectrum (2%)",
                          all3, 0.0, 0.02});
  }
  rep.finish_checks();
  rep.runtime_seconds = clock.seconds();
  return rep;
}

} // namespace pgap
