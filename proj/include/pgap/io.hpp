#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "pgap/constants.hpp"
#include "pgap/errors.hpp"
#include "pgap/experiments.hpp"
#include "pgap/fem.hpp"
#include "pgap/geometry.hpp"
#include "pgap/onedim.hpp"
#include "pgap/version.hpp"
#include "pgap/weight.hpp"

namespace pgap {

// insertion-ordered so emitted files are byte-stable
using ojson = nlohmann::ordered_json;

inline std::string format_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// ---------------------------------------------------------------- polygons

inline ojson polygon_to_json(const ConvexPolygon2D& poly) {
  ojson j;
  j["vertices"] = ojson::array();
  for (const auto& v : poly.vertices()) j["vertices"].push_back({v.x, v.y});
  return j;
}

inline ConvexPolygon2D polygon_from_json(const ojson& j) {
  if (!j.contains("vertices") || !j["vertices"].is_array())
    throw Error(ErrorCode::UsageError, "polygon JSON needs a \"vertices\" array");
  std::vector<Vec2> pts;
  for (const auto& v : j["vertices"]) {
    if (!v.is_array() || v.size() != 2)
      throw Error(ErrorCode::UsageError, "polygon vertices must be [x, y] pairs");
    pts.push_back({v[0].get<double>(), v[1].get<double>()});
  }
  return ConvexPolygon2D::validate(std::move(pts));
}

// ----------------------------------------------------------------- weights

inline ojson weight_to_json(const Weight& w) {
  ojson j;
  switch (w.kind()) {
    case WeightKind::Constant:
      j["kind"] = "constant";
      j["value"] = w.constant_value();
      break;
    case WeightKind::AffinePower:
      j["kind"] = "affine_power";
      j["linear"] = {w.affine_gradient().x, w.affine_gradient().y, w.affine_offset()};
      j["exponent"] = w.affine_exponent();
      break;
    case WeightKind::GaussianY:
      j["kind"] = "gaussian_y";
      j["scale"] = w.gaussian_scale();
      break;
    case WeightKind::Product: {
      j["kind"] = "product";
      j["factors"] = ojson::array();
      for (const auto& f : w.factors()) j["factors"].push_back(weight_to_json(f));
      break;
    }
  }
  switch (w.concavity_class()) {
    case ConcavityClass::PowerConcave:
      j["concavity"] = "power_concave(1/" + std::to_string(*w.power_concavity_m()) + ")";
      break;
    case ConcavityClass::LogConcave:
      j["concavity"] = "log_concave";
      break;
    case ConcavityClass::None:
      j["concavity"] = "none";
      break;
  }
  return j;
}

inline Weight weight_from_json(const ojson& j) {
  if (!j.contains("kind"))
    throw Error(ErrorCode::UsageError, "weight JSON needs a \"kind\" tag");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "constant") return Weight::constant(j.value("value", 1.0));
  if (kind == "affine_power") {
    const auto& lin = j.at("linear");
    if (!lin.is_array() || lin.size() != 3)
      throw Error(ErrorCode::UsageError, "affine_power needs \"linear\": [ax, ay, b]");
    return Weight::affine_power(lin[0].get<double>(), lin[1].get<double>(),
                                lin[2].get<double>(), j.at("exponent").get<int>());
  }
  if (kind == "gaussian_y") return Weight::gaussian_y(j.at("scale").get<double>());
  if (kind == "product") {
    std::vector<Weight> factors;
    for (const auto& f : j.at("factors")) factors.push_back(weight_from_json(f));
    return Weight::product(std::move(factors));
  }
  throw Error(ErrorCode::UsageError, "unknown weight kind \"" + kind + "\"");
}

// ------------------------------------------------------------------- files

inline ojson load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::UsageError, "cannot open " + path);
  ojson j;
  in >> j;
  return j;
}

inline void save_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::UsageError, "cannot write " + path);
  out << body;
}

// --------------------------------------------------------------- constants

inline ojson log_value_json(const LogValue& v) {
  ojson j;
  j["ln"] = static_cast<double>(v.ln());
  if (v.representable())
    j["value"] = v.value();
  else
    j["value"] = nullptr;
  return j;
}

inline ojson constants_report_to_json(const ConstantsReport& r) {
  ojson j;
  j["p"] = r.p;
  j["N"] = r.N;
  j["m"] = r.m;
  j["pi_p"] = r.pi_p_value;
  j["pi_p_pow"] = r.pi_p_pow;
  j["d_p"] = r.d_p;
  j["d_p_ln"] = d_p_ln(r.p);
  j["k_inf"] = r.k_inf;
  j["k_inf_tilde"] = r.k_inf_tilde;
  j["beta"] = r.beta;
  j["trace_constant"] = r.trace_c;
  j["moser_c1"] = r.c1_moser;
  j["moser_c2"] = r.c2_moser;
  j["moser_c3"] = r.c3_moser;
  j["gamma"] = ojson{{"ln", static_cast<double>(r.gamma_ln)},
                     {"value", std::isfinite(r.gamma) ? ojson(r.gamma) : ojson(nullptr)}};
  j["kappa_star"] =
      ojson{{"ln", static_cast<double>(r.kappa_star_ln)},
            {"value", std::isfinite(r.kappa_star) ? ojson(r.kappa_star) : ojson(nullptr)}};
  j["k1"] = log_value_json(r.k1);
  j["k3"] = r.k3;
  j["kroger_at_N_plus_m"] = r.kroger;
  j["k2"] = log_value_json(r.k2);
  j["eta0"] = log_value_json(r.eta0);
  j["c0"] = log_value_json(r.c0);
  j["k0"] = log_value_json(r.k0);
  return j;
}

// ----------------------------------------------------------------- samples

inline ojson deficit_sample_to_json(const DeficitSample& s) {
  ojson j;
  j["seed"] = s.seed;
  j["shape_id"] = s.shape_id;
  j["p"] = s.p;
  j["D"] = s.D;
  j["a1"] = s.a1;
  j["a2"] = s.a2;
  j["width"] = s.width;
  j["mu"] = s.mu;
  j["deficit"] = s.deficit;
  j["ratio"] = s.ratio;
  j["residual"] = s.residual;
  j["status"] = s.status;
  j["ln_ratio"] = s.ln_ratio;
  j["ln_k0"] = s.ln_k0;
  j["above_floor"] = s.above_floor;
  if (s.has_linf_margin) j["linf_margin_ln"] = s.linf_margin_ln;
  return j;
}

inline std::string samples_to_csv(const std::vector<DeficitSample>& samples) {
  std::string out = "seed,p,D,a1,a2,width,mu,deficit,ratio,residual,status\n";
  for (const auto& s : samples) {
    out += std::to_string(s.seed) + ",";
    out += format_g(s.p) + ",";
    out += format_g(s.D) + ",";
    out += format_g(s.a1) + ",";
    out += format_g(s.a2) + ",";
    out += format_g(s.width) + ",";
    out += format_g(s.mu) + ",";
    out += format_g(s.deficit) + ",";
    out += format_g(s.ratio) + ",";
    out += format_g(s.residual) + ",";
    out += s.status + "\n";
  }
  return out;
}

// ------------------------------------------------------------------ report

inline ojson experiment_report_to_json(const ExperimentReport& rep, double p_chain,
                                       int m_chain) {
  ojson j;
  j["schema_version"] = "1";
  j["library_version"] = kVersion;
  j["experiment"] = rep.name;
  j["parameters"] = ojson::object();
  for (const auto& [k, v] : rep.parameters) j["parameters"][k] = v;
  j["constants"] = constants_report_to_json(constants_report(p_chain, m_chain, 2));
  j["tolerances"] = ojson{{"fem_quotient_rel_change", 1e-9},
                          {"fem_inverse_iteration_residual", 1e-9},
                          {"shoot_rtol", 1e-12},
                          {"john_rel_objective_change", 1e-10},
                          {"constraint_residual", 1e-10}};
  j["fits"] = ojson::array();
  for (const auto& f : rep.fits)
    j["fits"].push_back(ojson{{"name", f.name}, {"value", f.value}, {"residual", f.residual}});
  j["checks"] = ojson::array();
  for (const auto& c : rep.checks)
    j["checks"].push_back(ojson{{"name", c.name},
                                {"pass", c.pass},
                                {"value", c.value},
                                {"threshold", c.threshold}});
  j["samples"] = ojson::array();
  for (const auto& s : rep.samples) j["samples"].push_back(deficit_sample_to_json(s));
  j["excluded_samples"] = rep.excluded_samples;
  j["runtime_seconds"] = rep.runtime_seconds;
  j["pass"] = rep.pass;
  return j;
}

// --------------------------------------------------------------------- svg

/// Self-contained scatter plot of (a2, ratio); no external assets.
inline std::string scatter_svg(const std::vector<DeficitSample>& samples,
                               const std::string& title) {
  const int W = 640, H = 480, ml = 70, mr = 20, mt = 40, mb = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : samples) {
    if (s.status != "ok") continue;
    xmin = std::min(xmin, s.a2);
    xmax = std::max(xmax, s.a2);
    ymin = std::min(ymin, s.ratio);
    ymax = std::max(ymax, s.ratio);
  }
  if (!(xmax > xmin)) {
    xmin = 0.0;
    xmax = 1.0;
  }
  if (!(ymax > ymin)) {
    ymin = 0.0;
    ymax = 1.0;
  }
  const bool logy = ymin > 0.0 && ymax / ymin > 50.0;
  auto ty = [&](double y) {
    const double lo = logy ? std::log10(ymin) : ymin;
    const double hi = logy ? std::log10(ymax) : ymax;
    const double v = logy ? std::log10(y) : y;
    return mt + (H - mt - mb) * (1.0 - (v - lo) / (hi - lo));
  };
  auto tx = [&](double x) { return ml + (W - ml - mr) * (x - xmin) / (xmax - xmin); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
      << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  svg << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";
  // axes
  svg << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr
      << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
      << H - mb << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double x = xmin + (xmax - xmin) * i / 5.0;
    svg << "<line x1=\"" << tx(x) << "\" y1=\"" << H - mb << "\" x2=\"" << tx(x)
        << "\" y2=\"" << H - mb + 5 << "\" stroke=\"black\"/>"
        << "<text x=\"" << tx(x) << "\" y=\"" << H - mb + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << format_g(x) << "</text>\n";
    const double yv = logy ? ymin * std::pow(ymax / ymin, i / 5.0)
                           : ymin + (ymax - ymin) * i / 5.0;
    svg << "<line x1=\"" << ml - 5 << "\" y1=\"" << ty(yv) << "\" x2=\"" << ml
        << "\" y2=\"" << ty(yv) << "\" stroke=\"black\"/>"
        << "<text x=\"" << ml - 8 << "\" y=\"" << ty(yv) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << format_g(yv) << "</text>\n";
  }
  svg << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << "a2 (second John semi-axis)</text>\n";
  svg << "<text x=\"18\" y=\"" << (mt + H - mb) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
      << "transform=\"rotate(-90 18 " << (mt + H - mb) / 2 << ")\">"
      << "deficit * D^(p+2) / a2^2" << (logy ? " (log scale)" : "") << "</text>\n";
  for (const auto& s : samples) {
    if (s.status != "ok") continue;
    const bool ref = s.shape_id != "random";
    svg << "<circle cx=\"" << tx(s.a2) << "\" cy=\"" << ty(s.ratio) << "\" r=\""
        << (ref ? 4.0 : 2.5) << "\" fill=\"" << (ref ? "#d9541e" : "#3572a5")
        << "\" fill-opacity=\"0.75\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

} // namespace pgap
