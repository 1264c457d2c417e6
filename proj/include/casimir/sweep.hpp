/**
 * @file sweep.hpp
 * @brief Temperature, position and frequency-scale (kr) sweeps over a scene.
 */
#ifndef CASIMIR_SWEEP_HPP
#define CASIMIR_SWEEP_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "born/scattering.hpp"
#include "io/scene.hpp"
#include "io/table.hpp"
#include "thermal.hpp"

namespace casimir {

enum class SweepKind { temperature, position, kr };

inline const char* to_string(SweepKind k) {
  switch (k) {
    case SweepKind::temperature: return "temperature";
    case SweepKind::position: return "position";
    default: return "kr";
  }
}

struct SweepSpec {
  SweepKind kind = SweepKind::temperature;
  std::vector<double> values;  // temperatures (K) or kr values; ignored for position sweeps
  unsigned threads = 0;        // 0: hardware concurrency
};

/// start:stop:step, inclusive of stop within half a step.
inline std::vector<double> parse_range(const std::string& spec) {
  std::vector<double> parts;
  std::size_t pos = 0;
  while (true) {
    const auto c = spec.find(':', pos);
    const std::string tok = spec.substr(pos, c == std::string::npos ? std::string::npos : c - pos);
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ValidationError("range '" + spec + "': invalid number '" + tok + "'");
    }
    if (c == std::string::npos) break;
    pos = c + 1;
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3) throw ValidationError("range '" + spec + "' must be start:stop:step or a single value");
  const double a = parts[0], b = parts[1], h = parts[2];
  if (!(h > 0.0) || !(b >= a)) throw ValidationError("range '" + spec + "' needs step > 0 and stop >= start");
  std::vector<double> out;
  const long n = static_cast<long>(std::floor((b - a) / h + 0.5));
  for (long i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * h);
  return out;
}

/// Comma-separated list, each entry a number or a start:stop:step range.
inline std::vector<double> parse_value_list(const std::string& spec) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const auto c = spec.find(',', pos);
    const auto part = parse_range(spec.substr(pos, c == std::string::npos ? std::string::npos : c - pos));
    out.insert(out.end(), part.begin(), part.end());
    if (c == std::string::npos) break;
    pos = c + 1;
  }
  return out;
}

/// Particle with every transition frequency scaled so the dominant one has k l = kr.
inline Particle scale_to_kr(const Particle& p, double kr, double length_nm) {
  if (!(kr > 0.0)) throw DomainError("kr sweep: kr must be > 0");
  if (!(length_nm > 0.0)) throw DomainError("kr sweep: length must be > 0");
  std::size_t dom = 0;
  for (std::size_t i = 1; i < p.transitions.size(); ++i)
    if (p.transitions[i].d2() > p.transitions[dom].d2()) dom = i;
  const double target = units::energy_from_wavenumber(kr / length_nm);
  const double f = target / std::abs(p.transitions[dom].omega_ev);
  Particle q = p;
  for (auto& t : q.transitions) t.omega_ev *= f;
  return q;
}

struct SweepRow {
  double value;
  PotentialBreakdown u;
  double u0;
  double linear_correction;
};

/// One row of the result table for particle p, provider g and temperature T.
inline SweepRow evaluate_row(double value, const Particle& p, const GammaProvider& g, ThermalContext ctx) {
  const auto u = total_potential(p, g, ctx);
  const double u0 = temperature_independent_potential(p, g.gamma0());
  double lin = 0.0;
  if (ctx.T > 0.0) lin = linear_temperature_correction(p, g, ctx);
  return {value, u, u0, lin};
}

inline std::vector<std::string> sweep_columns(SweepKind k) {
  std::string first = k == SweepKind::temperature ? "T_K" : k == SweepKind::position ? "r_nm" : "kr";
  return {first, "U_total_eV", "U_nr_eV", "U_r_eV", "U0_eV", "U_total_over_U0", "dU_linear_eV"};
}

/// Metadata shared by every table produced from a scene.
inline void scene_metadata(io::Table& t, const io::Scene& sc) {
  t.set_meta("scene", sc.source);
  t.set_meta("scene_hash", sc.hash);
  t.set_meta("geometry", io::to_string(sc.geometry));
  t.set_meta("material", sc.material.describe());
  t.set_meta("kernel", born::to_string(sc.kernel));
  t.set_meta("method", born::to_string(sc.solver.method));
  t.set_meta("m_sum", closed_forms::to_string(sc.m_sum));
  t.set_meta("norm", "frobenius");
  t.set_meta("units", "energies eV, lengths nm, temperatures K");
}

struct SweepResult {
  io::Table table;
  std::size_t failures = 0;
  bool nonconvergence = false;  // at least one failure was numerical non-convergence
};

/// Run the sweep; failed points become rows with status "failed" and NaN values.
inline SweepResult run_sweep(const io::Scene& sc, const SweepSpec& spec) {
  std::shared_ptr<const born::ScatteringSolver> solver;
  if (sc.geometry != io::GeometryKind::plate) solver = std::make_shared<born::ScatteringSolver>(sc.build_body(), sc.solver);

  struct Job {
    double value;
    std::size_t point;
    Particle particle;
    double T;
  };
  std::vector<Job> jobs;
  switch (spec.kind) {
    case SweepKind::temperature:
      for (double T : spec.values) {
        if (!(T >= 0.0)) throw ValidationError("temperature sweep: temperatures must be >= 0");
        jobs.push_back({T, 0, sc.particle, T});
      }
      break;
    case SweepKind::position:
      for (std::size_t i = 0; i < sc.points.size(); ++i)
        jobs.push_back({sc.geometry == io::GeometryKind::plate ? sc.points[i].z() : sc.points[i].norm(), i, sc.particle,
                        sc.thermal.T});
      break;
    case SweepKind::kr:
      for (double kr : spec.values) jobs.push_back({kr, 0, scale_to_kr(sc.particle, kr, sc.kr_length(0)), sc.thermal.T});
      break;
  }

  io::Table table;
  table.columns = sweep_columns(spec.kind);
  scene_metadata(table, sc);
  table.set_meta("sweep", to_string(spec.kind));
  if (spec.kind == SweepKind::kr) table.set_meta("kr_length_nm", io::format_number(sc.kr_length(0)));

  std::vector<std::size_t> points;
  for (const auto& j : jobs) points.push_back(j.point);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  std::vector<std::unique_ptr<GammaProvider>> providers(sc.points.size());
  for (auto i : points) providers[i] = io::make_provider(sc, solver, i);

  // Static solves are shared by every job; doing them once avoids duplicate work across threads.
  for (auto i : points) {
    try {
      providers[i]->gamma0();
    } catch (const Error&) {
      // reported per row below
    }
  }

  std::vector<SweepRow> rows(jobs.size());
  std::vector<std::string> errors(jobs.size());
  std::vector<char> diverged(jobs.size(), 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        ThermalContext ctx = sc.thermal;
        ctx.T = jobs[i].T;
        rows[i] = evaluate_row(jobs[i].value, jobs[i].particle, *providers[jobs[i].point], ctx);
      } catch (const ConvergenceError& e) {
        errors[i] = e.what();
        diverged[i] = 1;
      } catch (const ConditioningError& e) {
        errors[i] = e.what();
        diverged[i] = 1;
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  unsigned n = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  n = std::min<unsigned>(n, static_cast<unsigned>(std::max<std::size_t>(jobs.size(), 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  SweepResult out;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (!errors[i].empty()) {
      table.add_row({jobs[i].value, nan, nan, nan, nan, nan, nan}, "failed", errors[i]);
      ++out.failures;
      out.nonconvergence = out.nonconvergence || diverged[i];
      continue;
    }
    const auto& r = rows[i];
    table.add_row({r.value, r.u.total, r.u.nonresonant, r.u.resonant, r.u0, r.u.total / r.u0, r.linear_correction});
  }
  out.table = std::move(table);
  return out;
}

}  // namespace casimir

#endif
