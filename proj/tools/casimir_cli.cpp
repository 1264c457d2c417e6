// Command-line front end: compute, sweep, closed-form, check-criteria, voxelize.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include <casimir/casimir.hpp>

namespace {

using namespace casimir;

constexpr int exit_ok = 0;
constexpr int exit_validation = 1;
constexpr int exit_nonconvergence = 2;

/// Scene-level overrides shared by the scene-driven subcommands.
struct Overrides {
  std::string scene;
  std::string method, kernel;
  double rel_tol = 0.0, tail_tol = 0.0, temperature = -1.0;
  long j_max = 0;
  unsigned threads = 0;
  std::string output = "-";

  void add_to(CLI::App* app, bool with_temperature = true) {
    app->add_option("--scene", scene, "Scene file")->required()->check(CLI::ExistingFile);
    app->add_option("--method", method, "Volume solver: solve | born")->check(CLI::IsMember({"solve", "born"}));
    app->add_option("--kernel", kernel, "Kernel: retarded | nonretarded")->check(CLI::IsMember({"retarded", "nonretarded"}));
    app->add_option("--rel-tol", rel_tol, "Iterative solver relative tolerance")->check(CLI::PositiveNumber);
    app->add_option("--matsubara-tail-tol", tail_tol, "Relative Matsubara truncation tolerance")->check(CLI::PositiveNumber);
    app->add_option("--j-max", j_max, "Maximum number of Matsubara terms")->check(CLI::PositiveNumber);
    app->add_option("--threads", threads, "Worker threads (0: all cores)");
    app->add_option("--output", output, "Output path ('-' for stdout)");
    if (with_temperature) app->add_option("--temperature", temperature, "Temperature in K (overrides the scene)");
  }

  io::Scene load() const {
    io::Scene sc = io::parse_scene(scene);
    if (method == "solve") sc.solver.method = born::Method::direct_solve;
    if (method == "born") sc.solver.method = born::Method::born_series;
    if (kernel == "retarded") sc.kernel = KernelKind::retarded;
    if (kernel == "nonretarded") sc.kernel = KernelKind::nonretarded;
    if (rel_tol > 0.0) sc.solver.krylov_tol = rel_tol;
    if (tail_tol > 0.0) sc.thermal.matsubara.rel_tail_tol = tail_tol;
    if (j_max > 0) sc.thermal.matsubara.j_max = j_max;
    if (temperature != -1.0) {
      if (!(temperature >= 0.0)) throw ValidationError("--temperature must be >= 0");
      sc.thermal.T = temperature;
    }
    return sc;
  }
};

int finish_sweep(const SweepResult& r, const std::string& output) {
  io::emit_table(r.table, output);
  if (r.failures == 0) return exit_ok;
  for (std::size_t i = 0; i < r.table.status.size(); ++i)
    if (r.table.status[i] == "failed") std::cerr << "error: " << r.table.notes[i] << "\n";
  return r.nonconvergence ? exit_nonconvergence : exit_validation;
}

std::string fmt(double v) { return io::format_number(v); }

/// Nonretarded |Re Gamma(w) - Gamma_0| sampled on a geometric grid below w.
std::pair<std::vector<double>, std::vector<double>> eta_samples(const GammaProvider& g, double omega, int n) {
  std::vector<double> w, d;
  const Mat3 g0 = g.gamma0();
  for (int i = 0; i < n; ++i) {
    const double wi = omega / std::pow(2.0, i);
    w.push_back(wi);
    d.push_back((g.gamma_nonretarded(wi).real() - g0).norm());
  }
  return {w, d};
}

int run_check_criteria(const io::Scene& sc, std::size_t point, int eta_points, const std::string& output) {
  if (point >= sc.points.size()) throw ValidationError("--point index out of range");
  std::shared_ptr<const born::ScatteringSolver> solver;
  if (sc.geometry != io::GeometryKind::plate) solver = std::make_shared<born::ScatteringSolver>(sc.build_body(), sc.solver);
  const auto g = io::make_provider(sc, solver, point);
  const double zt = solver ? criteria::relevant_extent(*solver, sc.points[point], sc.extent_fraction)
                           : 2.0 * sc.points[point].z();
  const auto rep = criteria::build_report(sc.particle, *g, zt, sc.thermal.T, sc.q_factor, sc.thresholds);

  std::string eta_line = "not evaluated";
  std::optional<criteria::EtaFit> eta;
  if (eta_points > 0) {
    const double w = std::abs(sc.particle.transitions[criteria::dominant_transition(sc.particle)].omega_ev);
    const auto [ws, ds] = eta_samples(*g, w, eta_points);
    bool all_zero = true;
    for (double v : ds) all_zero = all_zero && v == 0.0;
    if (all_zero) {
      eta_line = "not applicable (body response is frequency independent)";
    } else {
      try {
        eta = criteria::estimate_eta(ws, ds);
        eta_line = fmt(eta->eta) + " (residual " + fmt(eta->residual) + ", case " + criteria::to_string(eta->classification) +
                   ", omega " + fmt(eta->omega_lo) + ".." + fmt(eta->omega_hi) + " eV)";
      } catch (const criteria::FitError& e) {
        eta_line = std::string("fit rejected: ") + e.what();
      }
    }
  }

  std::ostringstream txt;
  txt << "criteria report\n";
  txt << "  scene        " << sc.source << " (" << sc.hash << ")\n";
  txt << "  point        (" << fmt(sc.points[point].x()) << ", " << fmt(sc.points[point].y()) << ", "
      << fmt(sc.points[point].z()) << ") nm\n";
  txt << "  temperature  " << fmt(rep.temperature) << " K\n";
  txt << "  extent z~    " << fmt(rep.z_tilde) << " nm\n";
  txt << "  thresholds   pass < " << fmt(rep.thresholds.pass) << ", marginal < " << fmt(rep.thresholds.marginal) << "\n\n";
  char line[256];
  std::snprintf(line, sizeof line, "  %-4s %-14s %-14s %-9s %-14s %-9s\n", "k", "omega_eV", "retardation", "verdict",
                "reflectivity", "verdict");
  txt << line;
  for (const auto& t : rep.transitions) {
    std::snprintf(line, sizeof line, "  %-4zu %-14s %-14s %-9s %-14s %-9s\n", t.index, fmt(t.omega_ev).c_str(),
                  fmt(t.retardation).c_str(), criteria::to_string(t.retardation_verdict), fmt(t.reflectivity).c_str(),
                  criteria::to_string(t.reflectivity_verdict));
    txt << line;
  }
  txt << "\n  dominance (Q " << (rep.q_factor ? fmt(*rep.q_factor) : std::string("not set")) << ")\n";
  if (rep.dominance.empty()) txt << "    single transition, nothing to compare\n";
  for (std::size_t i = 0; i < rep.dominance.size(); ++i)
    txt << "    " << rep.dominance[i].dominant << " vs " << rep.dominance[i].other << "  " << fmt(rep.dominance[i].value)
        << "  " << criteria::to_string(rep.dominance_verdicts[i]) << "\n";
  txt << "\n  eta          " << eta_line << "\n";
  txt << "  U0           " << fmt(rep.u0) << " eV\n";
  txt << "  dU/dT (lin)  " << fmt(rep.predicted_slope) << " eV/K\n";
  txt << "  overall      " << criteria::to_string(rep.overall()) << "\n";

  std::ostringstream kv;
  kv << "schema = casimir-criteria/1\n";
  kv << "scene_hash = " << sc.hash << "\n";
  kv << "norm = frobenius\n";
  kv << "temperature_k = " << fmt(rep.temperature) << "\n";
  kv << "z_tilde_nm = " << fmt(rep.z_tilde) << "\n";
  kv << "threshold_pass = " << fmt(rep.thresholds.pass) << "\n";
  kv << "threshold_marginal = " << fmt(rep.thresholds.marginal) << "\n";
  for (const auto& t : rep.transitions) {
    const std::string p = "transition." + std::to_string(t.index) + ".";
    kv << p << "omega_ev = " << fmt(t.omega_ev) << "\n";
    kv << p << "retardation = " << fmt(t.retardation) << "\n";
    kv << p << "retardation_verdict = " << criteria::to_string(t.retardation_verdict) << "\n";
    kv << p << "reflectivity = " << fmt(t.reflectivity) << "\n";
    kv << p << "reflectivity_verdict = " << criteria::to_string(t.reflectivity_verdict) << "\n";
  }
  for (std::size_t i = 0; i < rep.dominance.size(); ++i) {
    const std::string p = "dominance." + std::to_string(rep.dominance[i].other) + ".";
    kv << p << "value = " << fmt(rep.dominance[i].value) << "\n";
    kv << p << "verdict = " << criteria::to_string(rep.dominance_verdicts[i]) << "\n";
  }
  if (eta) {
    kv << "eta = " << fmt(eta->eta) << "\n";
    kv << "eta_residual = " << fmt(eta->residual) << "\n";
    kv << "eta_case = " << criteria::to_string(eta->classification) << "\n";
  }
  kv << "u0_ev = " << fmt(rep.u0) << "\n";
  kv << "linear_slope_ev_per_k = " << fmt(rep.predicted_slope) << "\n";
  kv << "overall = " << criteria::to_string(rep.overall()) << "\n";

  std::cout << txt.str();
  if (output.empty() || output == "-") {
    std::cout << "\n" << kv.str();
  } else {
    std::ofstream out(output);
    if (!out) throw ValidationError("cannot write report to '" + output + "'");
    out << kv.str();
  }
  return exit_ok;
}

int run_closed_form(const std::string& geometry, double x, double radius, double d2, const std::string& m_sum,
                    const std::string& output) {
  io::Table t;
  t.set_meta("geometry", geometry);
  double tr = 0.0;
  std::vector<double> extra;
  if (geometry == "sphere") {
    t.columns = {"radius_nm", "r_over_R", "TrGamma0_nm-3", "U_eV"};
    tr = closed_forms::sphere_trace_gamma0_pc(x * radius, radius);
  } else if (geometry == "plate") {
    t.columns = {"radius_nm", "z_over_R", "TrGamma0_nm-3", "U_eV"};
    tr = closed_forms::plate_gamma0(x * radius).value.trace().real();
  } else {
    closed_forms::CylinderOptions opt;
    if (m_sum == "unit_weight_zero") opt.m_sum = closed_forms::AzimuthalSum::unit_weight_zero;
    else if (m_sum == "symmetric") opt.m_sum = closed_forms::AzimuthalSum::symmetric;
    t.set_meta("m_sum", closed_forms::to_string(opt.m_sum));
    t.columns = {"radius_nm", "rho_over_R", "TrGamma0_nm-3", "U_eV", "quad_error_nm-3", "m_terms"};
    const auto r = closed_forms::cylinder_trace_gamma0_pc(x * radius, radius, opt);
    tr = r.trace_gamma0;
    extra = {r.quad_error, static_cast<double>(r.m_terms)};
  }
  t.set_meta("material", "pec");
  t.set_meta("d2_debye2", fmt(d2));
  std::vector<double> row{radius, x, tr, closed_forms::potential_from_trace(tr, d2)};
  row.insert(row.end(), extra.begin(), extra.end());
  t.add_row(row);
  io::emit_table(t, output);
  return exit_ok;
}

int run_voxelize(const io::Scene& sc, bool inspect, const std::string& output) {
  const auto body = sc.build_body();
  std::ostringstream os;
  const double va = born::analytic_volume(sc.shape);
  os << "body          " << body.label() << "\n";
  os << "cells         " << body.size() << "\n";
  if (body.lattice()) {
    const auto& l = *body.lattice();
    os << "cell edge     " << fmt(l.h) << " nm\n";
    os << "grid          " << l.dims[0] << " x " << l.dims[1] << " x " << l.dims[2] << "\n";
  }
  os << "volume        " << fmt(body.occupied_volume()) << " nm^3 (analytic " << fmt(va) << ", ratio "
     << fmt(body.occupied_volume() / va) << ")\n";
  char hb[17];
  std::snprintf(hb, sizeof hb, "%016llx", static_cast<unsigned long long>(body.hash()));
  os << "hash          " << hb << "\n";
  std::cerr << os.str();
  if (inspect) {
    io::Table t;
    t.columns = {"x_nm", "y_nm", "z_nm", "volume_nm3", "fill"};
    t.set_meta("scene_hash", sc.hash);
    t.set_meta("body_hash", hb);
    for (const auto& c : body.cells()) t.add_row({c.center.x(), c.center.y(), c.center.z(), c.volume, c.fill});
    io::emit_table(t, output, {false});
  }
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thermal Casimir-Polder potentials of particles near bodies"};
  app.require_subcommand(1);

  Overrides compute_o, sweep_o, crit_o, vox_o;
  auto* compute = app.add_subcommand("compute", "Potentials at every evaluation point of a scene");
  compute_o.add_to(compute);

  auto* sweep = app.add_subcommand("sweep", "Temperature, position or kr sweep");
  sweep_o.add_to(sweep);
  std::string t_sweep, kr_sweep;
  bool pos_sweep = false;
  auto* ts = sweep->add_option("--temperature-sweep", t_sweep, "start:stop:step in K (or comma list)");
  auto* ks = sweep->add_option("--kr-sweep", kr_sweep, "kr values, comma list or start:stop:step");
  auto* ps = sweep->add_flag("--position", pos_sweep, "Sweep over the scene's evaluation points");
  ts->excludes(ks)->excludes(ps);
  ks->excludes(ps);

  auto* closed = app.add_subcommand("closed-form", "Perfect-conductor closed forms (single-row table)");
  std::string geometry = "sphere", m_sum = "half_weight_zero", closed_out = "-";
  double ratio = 0.0, radius = 1.0, d2 = 1.0;
  closed->add_option("--geometry", geometry, "sphere | cylinder | plate")->check(CLI::IsMember({"sphere", "cylinder", "plate"}));
  closed->add_option("--rho-over-r", ratio, "Position in units of R (r/R outside a sphere, rho/R inside a cylinder, z/R for a plate)")
      ->required();
  closed->add_option("--radius-nm", radius, "Radius R in nm")->check(CLI::PositiveNumber);
  closed->add_option("--d2-debye2", d2, "Total |d|^2 of an isotropic particle in Debye^2")->check(CLI::NonNegativeNumber);
  closed->add_option("--m-sum", m_sum, "Azimuthal sum convention")
      ->check(CLI::IsMember({"half_weight_zero", "unit_weight_zero", "symmetric"}));
  closed->add_option("--output", closed_out, "Output path ('-' for stdout)");

  auto* crit = app.add_subcommand("check-criteria", "Validity report for the temperature-independent potential");
  crit_o.add_to(crit);
  double q_factor = 0.0;
  std::size_t point = 0;
  int eta_points = 6;
  crit->add_option("--q-factor", q_factor, "Quality factor Q of the dominance criterion")->check(CLI::PositiveNumber);
  crit->add_option("--point", point, "Evaluation point index");
  crit->add_option("--eta-points", eta_points, "Frequencies for the eta fit (0 disables)")->check(CLI::NonNegativeNumber);

  auto* vox = app.add_subcommand("voxelize", "Voxelize the scene body and report statistics");
  vox_o.add_to(vox, false);
  bool inspect = false;
  vox->add_flag("--inspect", inspect, "Write the cell table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_validation;
  }

  try {
    if (*compute) {
      const auto sc = compute_o.load();
      return finish_sweep(run_sweep(sc, {SweepKind::position, {}, compute_o.threads}), compute_o.output);
    }
    if (*sweep) {
      const auto sc = sweep_o.load();
      SweepSpec spec;
      spec.threads = sweep_o.threads;
      if (!t_sweep.empty()) {
        spec.kind = SweepKind::temperature;
        spec.values = parse_value_list(t_sweep);
      } else if (!kr_sweep.empty()) {
        spec.kind = SweepKind::kr;
        spec.values = parse_value_list(kr_sweep);
      } else if (pos_sweep) {
        spec.kind = SweepKind::position;
      } else {
        throw ValidationError("sweep: give --temperature-sweep, --kr-sweep or --position");
      }
      return finish_sweep(run_sweep(sc, spec), sweep_o.output);
    }
    if (*closed) return run_closed_form(geometry, ratio, radius, d2, m_sum, closed_out);
    if (*crit) {
      auto sc = crit_o.load();
      if (q_factor > 0.0) sc.q_factor = q_factor;
      return run_check_criteria(sc, point, eta_points, crit_o.output);
    }
    if (*vox) return run_voxelize(vox_o.load(), inspect, vox_o.output);
  } catch (const ConvergenceError& e) {
    std::cerr << "error (non-convergence): " << e.what() << "\n";
    return exit_nonconvergence;
  } catch (const ConditioningError& e) {
    std::cerr << "error (ill-conditioned): " << e.what() << "\n";
    return exit_nonconvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_validation;
  }
  return exit_ok;
}
