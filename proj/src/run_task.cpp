#include "ptspec/run_task.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>

#include "ptspec/cache.hpp"
#include "ptspec/criteria.hpp"
#include "ptspec/grushin.hpp"
#include "ptspec/matrix_io.hpp"
#include "ptspec/sweep.hpp"
#include "ptspec/version.hpp"

namespace ptspec::io {

namespace {

using nlohmann::ordered_json;

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ordered_json json_complex(std::complex<double> z) {
  return ordered_json{{"re", z.real()}, {"im", z.imag()}};
}

ordered_json json_matrix2(const Eigen::Matrix2cd& m) {
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < 2; ++i) {
    ordered_json row = ordered_json::array();
    for (int j = 0; j < 2; ++j) row.push_back(json_complex(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

std::string hex_hash(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw AssemblyError("cannot write '" + path + "'");
  out << text;
}

ordered_json family_summary(const family::OperatorFamily& fam) {
  ordered_json j;
  j["size"] = fam.size();
  j["symmetry_residual_h0"] = fam.residual_h0;
  j["symmetry_residual_h1"] = fam.residual_h1;
  j["valid"] = fam.valid;
  if (!fam.parity_note.empty()) j["parity_note"] = fam.parity_note;
  if (fam.pt_form) j["w_node_sup"] = fam.w_node_sup;
  return j;
}

std::string eigenvalue_csv(const linalg::SpectralDecomposition& dec) {
  std::string out = "index,re,im,residual\n";
  for (Eigen::Index i = 0; i < dec.eigenvalues.size(); ++i) {
    out += std::to_string(i) + "," + format_g17(dec.eigenvalues[i].real()) + "," +
           format_g17(dec.eigenvalues[i].imag()) + "," +
           format_g17(dec.residuals[i]) + "\n";
  }
  return out;
}

double default_cluster_tol(double level) { return 1e-8 * (1.0 + std::fabs(level)); }

}  // namespace

ordered_json run_task(const RunConfig& cfg, const RunOptions& opts) {
  const std::string out_dir =
      opts.out_dir_override.empty() ? cfg.out_dir : opts.out_dir_override;
  if (opts.write_files) std::filesystem::create_directories(out_dir);

  std::unique_ptr<EigenCache> cache;
  if (!opts.no_cache) {
    std::string dir = opts.cache_dir;
    if (dir.empty())
      if (const char* env = std::getenv("PTSPEC_CACHE")) dir = env;
    if (!dir.empty()) cache = std::make_unique<EigenCache>(dir);
  }

  std::vector<double> epsilons = cfg.epsilons;
  if (opts.epsilon_override) epsilons = {*opts.epsilon_override};

  ordered_json report;
  report["tool"] = {{"name", "ptspec"}, {"version", kVersion}};
  report["timestamp"] =
      opts.timestamp
          ? std::to_string(std::chrono::duration_cast<std::chrono::seconds>(
                               std::chrono::system_clock::now().time_since_epoch())
                               .count())
          : "0";
  report["config"] = {{"path", cfg.path},
                      {"hash", hex_hash(cfg.content_hash)},
                      {"echo", cfg.raw_text}};
  report["task"] = cfg.task;
  ordered_json diagnostics;
  diagnostics["cache"] = cache ? "enabled" : "disabled";

  if (cfg.task == "doublewell-fit") {
    const bool hbar_form = cfg.dw_family == "hbar";
    const int n_modes = cfg.problem.basis.modes_per_dim;
    auto generator = [&](double p) {
      family::ProblemSpec spec;
      spec.dimension = 1;
      spec.basis.dimension = 1;
      spec.basis.modes_per_dim = n_modes;
      spec.reflection = {1, 0};
      if (hbar_form) {
        // -hbar^2 d^2/dx^2 + (x^2 - 1/4)^2, the well pair centered at 0
        spec.basis.kinetic_coefficient = p * p;
        spec.basis.length_scale = {std::sqrt(p), 1.0};
        spec.potential = expr::Expr::parse("(x^2 - 1/4)^2", 1);
      } else {
        // -d^2/dx^2 + (g x^2 - 1/(4g))^2, centered form of x^2 (1 + gx)^2
        spec.basis.kinetic_coefficient = 1.0;
        spec.basis.length_scale = {1.0, 1.0};
        spec.potential = expr::Expr::parse(
            "(" + format_g17(p) + "*x^2 - " + format_g17(1.0 / (4.0 * p)) + ")^2", 1);
      }
      spec.perturbation = expr::Expr::parse("x/(1+x^2)", 1);
      return spec;
    };
    const auto fit = sweep::fit_splitting_law(
        generator, cfg.dw_values,
        hbar_form ? sweep::FitAbscissa::InverseParam
                  : sweep::FitAbscissa::InverseParamSquared);
    ordered_json jf;
    jf["family"] = cfg.dw_family;
    jf["abscissa"] = hbar_form ? "1/hbar" : "1/g^2";
    jf["slope"] = fit.slope;
    jf["intercept"] = fit.intercept;
    jf["r_squared"] = fit.r_squared;
    jf["samples"] = ordered_json::array();
    for (std::size_t i = 0; i < fit.abscissa.size(); ++i)
      jf["samples"].push_back({{"parameter", cfg.dw_values[i]},
                               {"x", fit.abscissa[i]},
                               {"log_gap", fit.log_gap[i]}});
    report["splitting_fit"] = jf;
    if (opts.write_files) {
      std::string dat = "# x log_gap fit\n";
      for (std::size_t i = 0; i < fit.abscissa.size(); ++i)
        dat += format_g17(fit.abscissa[i]) + " " + format_g17(fit.log_gap[i]) + " " +
               format_g17(fit.intercept + fit.slope * fit.abscissa[i]) + "\n";
      std::filesystem::create_directories(out_dir + "/plotdata");
      write_text(out_dir + "/plotdata/splitting_fit.dat", dat);
    }
    report["diagnostics"] = diagnostics;
    if (opts.write_files) write_text(out_dir + "/report.json", report.dump(2) + "\n");
    return report;
  }

  // every other task assembles the configured family
  const family::OperatorFamily fam = family::assemble(cfg.problem);
  report["family"] = family_summary(fam);
  if (opts.write_files && opts.dump_matrices) {
    write_matrix(out_dir + "/h0.mat", fam.h0.cast<std::complex<double>>());
    write_matrix(out_dir + "/h1.mat", fam.h1);
    write_matrix(out_dir + "/j.mat", fam.j.cast<std::complex<double>>());
  }

  bool cache_hit = false;
  const linalg::SpectralDecomposition h0_eig =
      eig_symmetric_cached(fam.h0, cache.get(), &cache_hit);
  diagnostics["h0_eigensolve"] = cache_hit ? "cache hit" : "computed";

  if (cfg.task == "spectrum") {
    const double eps = epsilons.empty() ? 0.0 : epsilons[0];
    linalg::SpectralDecomposition dec =
        eps == 0.0 ? h0_eig : linalg::eig_complex(family::evaluate_at(fam, eps));
    report["epsilon"] = eps;
    ordered_json values = ordered_json::array();
    for (Eigen::Index i = 0; i < dec.eigenvalues.size(); ++i)
      values.push_back(json_complex(dec.eigenvalues[i]));
    report["eigenvalues"] = values;
    if (opts.write_files)
      write_text(out_dir + "/eigenvalues.csv", eigenvalue_csv(dec));
  } else if (cfg.task == "classify") {
    const double level = *cfg.level;
    const double ctol =
        cfg.cluster_tolerance > 0.0 ? cfg.cluster_tolerance : default_cluster_tol(level);
    const auto cluster = grushin::spectral_projector(h0_eig, level, ctol);

    if (cluster.vectors.size() == 2) {
      grushin::GrushinOperators g(fam, h0_eig, level, ctol);
      const auto verdict = criteria::classify_degenerate(g);
      ordered_json jv;
      jv["kind"] = "degenerate";
      jv["lambda0"] = verdict.lambda0;
      jv["tau_product"] = verdict.tau_product;
      jv["h1_block"] = json_matrix2(verdict.h1_block);
      jv["discriminant"] = verdict.discriminant;
      jv["verdict"] = criteria::to_string(verdict.verdict);
      jv["epsilon_star"] = verdict.epsilon_star;
      jv["gap_norm_R"] = g.norm_R();
      report["verdict"] = jv;

      ordered_json pairs = ordered_json::array();
      for (const double eps : epsilons) {
        const auto pair = grushin::eigenvalues_near(g, fam, eps);
        ordered_json jp;
        jp["epsilon"] = eps;
        jp["z_plus"] = json_complex(pair.z_plus);
        jp["z_minus"] = json_complex(pair.z_minus);
        jp["classification"] = grushin::to_string(pair.classification);
        jp["newton_iterations"] = pair.newton_iterations;
        jp["det_residual"] = pair.final_residual;
        const auto series = grushin::e_minus_plus_series(
            g, fam, eps, grushin::Complex(g.lambda0(), 0.125 / g.norm_R()), 10);
        jp["contraction_K"] = series.contraction;
        jp["tail_bound"] = series.tail_bound;
        jp["eq18_residual"] = grushin::symmetry_check(
            g, fam, eps, grushin::Complex(g.lambda0() + 0.1 / g.norm_R(), 0.0));
        pairs.push_back(jp);
      }
      report["pairs"] = pairs;
    } else {
      if (!cfg.level2)
        throw MultiplicityError(1);
      const double ctol2 = cfg.cluster_tolerance > 0.0
                               ? cfg.cluster_tolerance
                               : default_cluster_tol(*cfg.level2);
      const Eigen::VectorXd lam = h0_eig.real_eigenvalues();
      auto index_near = [&](double target, double tol) {
        int best = -1;
        double dist = std::numeric_limits<double>::infinity();
        for (int i = 0; i < lam.size(); ++i)
          if (std::fabs(lam[i] - target) < dist) {
            dist = std::fabs(lam[i] - target);
            best = i;
          }
        if (best < 0 || dist > std::max(tol, 1e-3 * (1.0 + std::fabs(target))))
          throw MultiplicityError(0);
        return best;
      };
      const int i1 = index_near(level, ctol);
      const int i2 = index_near(*cfg.level2, ctol2);
      const double eps = epsilons.empty() ? 0.0 : epsilons[0];
      const auto verdict = criteria::classify_near_degenerate(h0_eig, i1, i2, fam, eps);
      ordered_json jv;
      jv["kind"] = "near-degenerate";
      jv["lambda_mean"] = verdict.lambda0;
      jv["tau_product"] = verdict.tau_product;
      jv["h1_block"] = json_matrix2(verdict.h1_block);
      jv["d"] = verdict.d;
      jv["D"] = verdict.big_d;
      jv["epsilon"] = eps;
      jv["coupling"] = verdict.coupling;
      jv["threshold_d_over_2"] = verdict.threshold;
      jv["verdict"] = criteria::to_string(verdict.verdict);
      if (!verdict.note.empty()) jv["note"] = verdict.note;
      report["verdict"] = jv;
    }
  } else if (cfg.task == "reality") {
    const auto cert = criteria::reality_radius(cfg.problem, fam, cfg.trusted_count);
    ordered_json jc;
    jc["delta"] = cert.delta;
    jc["h1_norm"] = cert.h1_norm;
    jc["radius"] = cert.radius;
    jc["trusted_count"] = cert.trusted_count;
    jc["trusted"] = cert.trusted;
    report["certificate"] = jc;

    ordered_json checks = ordered_json::array();
    for (const double eps : epsilons) {
      const auto rep = criteria::verify_reality(fam, eps, cert);
      ordered_json je;
      je["epsilon"] = eps;
      je["all_real"] = rep.all_ok;
      double worst = 0.0;
      for (const auto& level : rep.levels)
        worst = std::max(worst, std::fabs(level.found.imag()));
      je["max_imag"] = worst;
      checks.push_back(je);
    }
    report["reality_checks"] = checks;
    if (opts.write_files)
      write_text(out_dir + "/eigenvalues.csv", eigenvalue_csv(h0_eig));
  } else if (cfg.task == "sweep") {
    std::vector<double> grid(static_cast<std::size_t>(cfg.eps_count));
    for (int i = 0; i < cfg.eps_count; ++i)
      grid[static_cast<std::size_t>(i)] =
          cfg.eps_min + (cfg.eps_max - cfg.eps_min) * i / (cfg.eps_count - 1);
    sweep::Window window;
    if (cfg.window_is_interval) {
      window.kind = sweep::Window::Kind::Interval;
      window.lo = cfg.window_lo;
      window.hi = cfg.window_hi;
    } else {
      window.kind = sweep::Window::Kind::LowestCount;
      window.count = cfg.window_count;
    }
    const auto trace = sweep::sweep(fam, grid, window);

    ordered_json jt;
    jt["trajectories"] = static_cast<int>(trace.trajectories.size());
    jt["steps"] = static_cast<int>(trace.epsilons.size());
    jt["real_throughout"] = trace.real_throughout;
    ordered_json eps_records = ordered_json::array();
    for (const auto& rec : trace.exceptional_points) {
      ordered_json jr;
      jr["eps_lo"] = rec.eps_lo;
      jr["eps_hi"] = rec.eps_hi;
      jr["trajectories"] = {rec.traj_a, rec.traj_b};
      jr["lambda"] = json_complex(rec.lambda_at);
      // refine by bisection inside the bracketing grid interval
      try {
        const auto ep = sweep::locate_exceptional_point(
            fam, rec.lambda_at.real(), rec.eps_lo, rec.eps_hi);
        jr["eps_c"] = ep.eps_c;
        jr["width"] = ep.width;
      } catch (const BracketError&) {
        jr["eps_c"] = nullptr;
      }
      eps_records.push_back(jr);
    }
    jt["exceptional_points"] = eps_records;
    if (!trace.log.empty()) diagnostics["matching_log"] = trace.log;
    report["sweep"] = jt;

    if (cfg.bracket) {
      const auto ep = sweep::locate_exceptional_point(
          fam, *cfg.level, cfg.bracket->first, cfg.bracket->second);
      report["bisection"] = {{"lambda_ref", *cfg.level},
                             {"eps_c", ep.eps_c},
                             {"width", ep.width}};
    }

    if (opts.write_files) {
      std::string csv = "epsilon,trajectory_id,re,im,reality_flag\n";
      for (std::size_t k = 0; k < trace.epsilons.size(); ++k)
        for (std::size_t t = 0; t < trace.trajectories.size(); ++t) {
          const auto z = trace.trajectories[t][k];
          const bool real_here =
              std::fabs(z.imag()) <= 1e-10 * (1.0 + std::fabs(z.real()));
          csv += format_g17(trace.epsilons[k]) + "," + std::to_string(t) + "," +
                 format_g17(z.real()) + "," + format_g17(z.imag()) + "," +
                 (real_here ? "1" : "0") + "\n";
        }
      write_text(out_dir + "/sweep.csv", csv);
      std::filesystem::create_directories(out_dir + "/plotdata");
      std::string dat = "# epsilon re im (blocks per trajectory)\n";
      for (std::size_t t = 0; t < trace.trajectories.size(); ++t) {
        for (std::size_t k = 0; k < trace.epsilons.size(); ++k) {
          const auto z = trace.trajectories[t][k];
          dat += format_g17(trace.epsilons[k]) + " " + format_g17(z.real()) + " " +
                 format_g17(z.imag()) + "\n";
        }
        dat += "\n";
      }
      write_text(out_dir + "/plotdata/trajectories.dat", dat);
    }
  }

  report["diagnostics"] = diagnostics;
  if (opts.write_files) write_text(out_dir + "/report.json", report.dump(2) + "\n");
  return report;
}

}  // namespace ptspec::io
