// poincare-gap command line driver: explicit constants, 1D/2D eigensolvers,
// and the four batch experiments with JSON/CSV/SVG outputs.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pgap/experiments.hpp"
#include "pgap/io.hpp"
#include "pgap/version.hpp"

namespace fs = std::filesystem;
using namespace pgap;

namespace {

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  if (out.empty()) throw Error(ErrorCode::UsageError, "empty list: " + csv);
  return out;
}

Weight load_weight_arg(const std::string& arg) {
  if (arg == "1" || arg == "constant") return Weight::constant();
  if (arg == "x") return Weight::affine_power(1, 0, 0, 1);
  if (fs::exists(arg)) return weight_from_json(load_json_file(arg));
  throw Error(ErrorCode::UsageError,
              "weight argument must be a JSON file path, \"1\", or \"x\": " + arg);
}

void write_experiment(const ExperimentReport& rep, const std::string& out_dir,
                      double p_chain, int m_chain, bool with_svg) {
  fs::create_directories(out_dir);
  save_text_file(out_dir + "/report.json",
                 experiment_report_to_json(rep, p_chain, m_chain).dump(2) + "\n");
  save_text_file(out_dir + "/samples.csv", samples_to_csv(rep.samples));
  if (with_svg)
    save_text_file(out_dir + "/diagram.svg",
                   scatter_svg(rep.samples, rep.name + " (p = " + format_g(p_chain) +
                                                ", min ratio = " +
                                                format_g(rep.fits.empty()
                                                             ? 0.0
                                                             : rep.fits.back().value) +
                                                ")"));
}

int summarize(const ExperimentReport& rep) {
  std::cout << rep.name << ": " << (rep.pass ? "PASS" : "FAIL");
  for (const auto& f : rep.fits) std::cout << " | " << f.name << " = " << f.value;
  std::cout << " | " << format_g(rep.runtime_seconds) << " s\n";
  return rep.pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"poincare-gap: quantitative Poincare inequality toolkit for the "
               "weighted Neumann p-Laplacian on convex planar domains"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // ---- constants
  auto* c_cmd = app.add_subcommand("constants", "explicit constant chain as JSON");
  double c_p = 2.0;
  int c_m = 1, c_N = 2;
  bool c_grid = false;
  std::string c_out;
  c_cmd->add_option("--p", c_p, "exponent p > 1");
  c_cmd->add_option("--m", c_m, "power-concavity exponent m >= 1");
  c_cmd->add_option("--N", c_N, "dimension (K0 assembly is for N = 2)");
  c_cmd->add_flag("--grid", c_grid, "run the inequality suite over the (p, m) grid");
  c_cmd->add_option("--out", c_out, "write JSON here instead of stdout");

  // ---- pip
  auto* pip_cmd = app.add_subcommand("pip", "print pi_p, (pi_p)^p and d_p");
  double pip_p = 2.0;
  pip_cmd->add_option("--p", pip_p, "exponent p > 1")->required();

  // ---- eig1d
  auto* e1_cmd = app.add_subcommand("eig1d", "weighted 1D Neumann p-Laplacian");
  double e1_p = 2.0, e1_d = 1.0;
  std::string e1_w = "1", e1_out;
  int e1_n = 4096;
  bool e1_both = false;
  e1_cmd->add_option("--p", e1_p, "exponent");
  e1_cmd->add_option("--d", e1_d, "interval length");
  e1_cmd->add_option("--weight", e1_w, "weight JSON file, \"1\", or \"x\"");
  e1_cmd->add_option("--n", e1_n, "grid size for the Rayleigh oracle");
  e1_cmd->add_flag("--both", e1_both, "also run the discretized Rayleigh oracle");
  e1_cmd->add_option("--out", e1_out, "result JSON path");

  // ---- eig2d
  auto* e2_cmd = app.add_subcommand("eig2d", "weighted 2D Neumann p-Laplacian");
  std::string e2_poly, e2_w = "1", e2_out;
  double e2_p = 2.0, e2_h = 0.02;
  e2_cmd->set_help_flag("--help", "print help");
  e2_cmd->add_option("--polygon", e2_poly, "polygon JSON file")->required();
  e2_cmd->add_option("--weight", e2_w, "weight JSON file, \"1\", or \"x\"");
  e2_cmd->add_option("--p", e2_p, "exponent");
  e2_cmd->add_option("--h", e2_h, "target mesh size");
  e2_cmd->add_option("--out", e2_out, "result JSON path");

  // ---- verify
  auto* v_cmd = app.add_subcommand("verify", "quantitative inequality check");
  std::string v_poly, v_w = "1", v_out;
  double v_p = 2.0, v_h = 0.02;
  int v_m = 1;
  v_cmd->set_help_flag("--help", "print help");
  v_cmd->add_option("--polygon", v_poly, "polygon JSON file")->required();
  v_cmd->add_option("--weight", v_w, "power-concave weight (file, \"1\", or \"x\")");
  v_cmd->add_option("--p", v_p, "exponent");
  v_cmd->add_option("--m", v_m, "concavity exponent for the constant chain");
  v_cmd->add_option("--h", v_h, "target mesh size");
  v_cmd->add_option("--out", v_out, "result JSON path");

  // ---- sharpness
  auto* sh_cmd = app.add_subcommand("sharpness", "rectangle sweep: deficit ~ a2^2");
  double sh_p = 2.0;
  std::string sh_eps = "0.1,0.05,0.02,0.01,0.005", sh_out = "out_sharpness";
  sh_cmd->add_option("--p", sh_p, "exponent");
  sh_cmd->add_option("--eps", sh_eps, "comma list of rectangle heights in (0, 0.2]");
  sh_cmd->add_option("--out", sh_out, "output directory");

  // ---- counterexample
  auto* cx_cmd = app.add_subcommand("counterexample",
                                    "log-concave gaussian weights on the disk");
  std::string cx_grid = "2,4,8,16", cx_out = "out_counterexample";
  std::size_t cx_budget = 500000;
  cx_cmd->add_option("--n-grid", cx_grid, "comma list of gaussian scales");
  cx_cmd->add_option("--mesh-budget", cx_budget, "node cap per mesh");
  cx_cmd->add_option("--out", cx_out, "output directory");

  // ---- blaschke
  auto* bl_cmd = app.add_subcommand("blaschke", "seeded deficit-ratio diagram");
  double bl_p = 2.0;
  int bl_count = 200;
  std::uint64_t bl_seed = 7;
  double bl_h = 0.025;
  std::string bl_out = "out_blaschke";
  bl_cmd->set_help_flag("--help", "print help");
  bl_cmd->add_option("--p", bl_p, "exponent");
  bl_cmd->add_option("--count", bl_count, "number of random polygons");
  bl_cmd->add_option("--seed", bl_seed, "base seed");
  bl_cmd->add_option("--h", bl_h, "target mesh size");
  bl_cmd->add_option("--out", bl_out, "output directory");

  // ---- collapse
  auto* co_cmd = app.add_subcommand("collapse", "thin rectangles vs the 1D limit");
  double co_p = 2.0;
  std::string co_w = "1", co_eps = "0.1,0.05,0.02", co_out = "out_collapse";
  co_cmd->add_option("--p", co_p, "exponent");
  co_cmd->add_option("--weight", co_w, "y-independent weight (file, \"1\", or \"x\")");
  co_cmd->add_option("--eps", co_eps, "comma list of rectangle heights");
  co_cmd->add_option("--out", co_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*c_cmd) {
      if (c_grid) {
        bool all = true;
        for (double p : {1.2, 1.5, 2.0, 3.0, 5.0})
          for (int m : {1, 2, 3}) {
            for (const auto& chk : chain_inequality_suite(p, m, c_N)) {
              all = all && chk.pass;
              std::cout << (chk.pass ? "PASS " : "FAIL ") << "p=" << p << " m=" << m
                        << "  " << chk.name << "\n";
            }
          }
        return all ? 0 : 1;
      }
      const auto j = constants_report_to_json(constants_report(c_p, c_m, c_N));
      if (c_out.empty())
        std::cout << j.dump(2) << "\n";
      else
        save_text_file(c_out, j.dump(2) + "\n");
      return 0;
    }
    if (*pip_cmd) {
      std::cout << "pi_p(" << format_g(pip_p) << ") = " << format_g(pi_p(pip_p))
                << "\n(pi_p)^p = " << format_g(pi_p_pow(pip_p))
                << "\nd_p = " << format_g(d_p(pip_p)) << "\n";
      return 0;
    }
    if (*e1_cmd) {
      const Weight w = load_weight_arg(e1_w);
      const auto res = mu_p_1d_shoot(e1_p, e1_d, w);
      ojson j;
      j["schema_version"] = "1";
      j["library_version"] = kVersion;
      j["p"] = e1_p;
      j["d"] = e1_d;
      j["weight"] = weight_to_json(w);
      j["mu"] = res.mu;
      j["zero_crossing"] = res.zero_crossing;
      j["sign_changes"] = res.sign_changes;
      j["residual"] = res.residual;
      j["boundary_defect"] = res.boundary_defect;
      j["orthogonality_defect"] = res.orthogonality_defect;
      j["floored_weight"] = res.floored_weight;
      if (e1_both) {
        const auto oracle = mu_p_1d_rayleigh(e1_p, e1_d, w, e1_n);
        j["rayleigh"] = ojson{{"n", e1_n},
                              {"value", oracle.value},
                              {"iterations", oracle.iterations},
                              {"stalled", oracle.stalled}};
        j["relative_gap"] = std::abs(res.mu - oracle.value) / res.mu;
      }
      if (e1_out.empty())
        std::cout << j.dump(2) << "\n";
      else
        save_text_file(e1_out, j.dump(2) + "\n");
      std::cout << "mu_" << format_g(e1_p) << " = " << format_g(res.mu) << "\n";
      return 0;
    }
    if (*e2_cmd) {
      const auto poly = polygon_from_json(load_json_file(e2_poly));
      const Weight w = load_weight_arg(e2_w);
      const Mesh mesh = triangulate(poly, e2_h);
      const auto res = (e2_p == 2.0) ? mu_2_fem(poly, w, mesh)
                                     : mu_p_fem(e2_p, poly, w, mesh);
      const auto linf = linf_bound_check(res, poly, w, e2_p, mesh);
      const double D = poly.diameter();
      ojson j;
      j["schema_version"] = "1";
      j["library_version"] = kVersion;
      j["p"] = e2_p;
      j["polygon"] = polygon_to_json(poly);
      j["weight"] = weight_to_json(w);
      j["mesh"] = ojson{{"target_h", mesh.target_h},
                        {"realized_h", mesh.realized_h},
                        {"nodes", mesh.node_count()},
                        {"triangles", mesh.tri_count()},
                        {"min_angle_deg", mesh.min_angle_deg},
                        {"area", mesh.area}};
      j["mu"] = res.mu;
      j["iterations"] = res.iterations;
      j["converged"] = res.converged;
      j["residual"] = res.residual;
      j["constraint_residual"] = res.constraint_residual;
      j["shift_c"] = res.shift_c;
      const auto je = john_ellipse(poly);
      j["geometry"] = ojson{{"diameter", D},
                            {"width", poly.width()},
                            {"vertical_depth", poly.vertical_depth()},
                            {"john_a1", je.a1},
                            {"john_a2", je.a2}};
      j["bounds"] = ojson{
          {"payne_weinberger_floor", std::pow(pi_p(e2_p) / D, e2_p)},
          {"rigidity_strict", res.mu > std::pow(pi_p(e2_p) / D, e2_p)},
          {"kroger_ceiling_at_m1", kroger_constant(e2_p, 3) / std::pow(D, e2_p)},
          {"linf_lhs", linf.lhs},
          {"linf_rhs_ln", static_cast<double>(linf.rhs.ln())},
          {"linf_margin_ln", static_cast<double>(linf.margin.ln())},
          {"linf_margin_ge_1", linf.margin.ln() >= 0.0L},
          {"linf_m_used", linf.m_used}};
      if (e2_out.empty())
        std::cout << j.dump(2) << "\n";
      else
        save_text_file(e2_out, j.dump(2) + "\n");
      std::cout << "mu = " << format_g(res.mu) << " (nodes " << mesh.node_count()
                << ", residual " << format_g(res.residual) << ")\n";
      return 0;
    }
    if (*v_cmd) {
      const auto poly = polygon_from_json(load_json_file(v_poly));
      const Weight w = load_weight_arg(v_w);
      const auto s = verify_quantitative(v_p, poly, w, v_m, v_h);
      ojson j;
      j["schema_version"] = "1";
      j["library_version"] = kVersion;
      j["sample"] = deficit_sample_to_json(s);
      j["constants"] = constants_report_to_json(constants_report(v_p, v_m, 2));
      if (v_out.empty())
        std::cout << j.dump(2) << "\n";
      else
        save_text_file(v_out, j.dump(2) + "\n");
      std::cout << "deficit = " << format_g(s.deficit) << ", ratio = "
                << format_g(s.ratio) << ", ln(ratio) > ln(K0): "
                << (s.above_floor ? "yes" : "NO") << "\n";
      return s.above_floor ? 0 : 1;
    }
    if (*sh_cmd) {
      const auto rep = sharpness_sweep(sh_p, parse_list(sh_eps));
      write_experiment(rep, sh_out, sh_p, 1, false);
      return summarize(rep);
    }
    if (*cx_cmd) {
      const auto rep = counterexample_logconcave(parse_list(cx_grid), cx_budget);
      write_experiment(rep, cx_out, 2.0, 1, false);
      return summarize(rep);
    }
    if (*bl_cmd) {
      BlaschkeOptions opt;
      opt.h = bl_h;
      const auto rep = blaschke_sample(bl_p, bl_count, bl_seed, opt);
      write_experiment(rep, bl_out, bl_p, 1, true);
      return summarize(rep);
    }
    if (*co_cmd) {
      const auto rep = collapse_study(co_p, load_weight_arg(co_w), parse_list(co_eps));
      write_experiment(rep, co_out, co_p, 1, false);
      return summarize(rep);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::UsageError) {
      std::cerr << "usage error: " << e.what() << "\n";
      return 2;
    }
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
