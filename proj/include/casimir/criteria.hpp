/**
 * @file criteria.hpp
 * @brief Validity criteria for the temperature-independent potential and their report.
 *
 * (A) retardation:  (k_B T / hbar|w|) (z w / c)^2
 * (B) reflectivity: (k_B T / hbar|w|) |Re Gamma^nret_w - Gamma_0|_F / |Gamma_0|_F
 * (C) dominance:    Q (|d_nl| / |d_nk|) (k_B T / hbar|w_ln|)
 */
#ifndef CASIMIR_CRITERIA_HPP
#define CASIMIR_CRITERIA_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "gamma_provider.hpp"
#include "thermal.hpp"
#include "units.hpp"

namespace casimir::criteria {

struct Thresholds {
  double pass = 0.05;
  double marginal = 0.2;
};

enum class Verdict { pass, marginal, fail };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::marginal: return "marginal";
    default: return "fail";
  }
}

inline Verdict classify(double parameter, const Thresholds& t = {}) {
  if (parameter < t.pass) return Verdict::pass;
  if (parameter < t.marginal) return Verdict::marginal;
  return Verdict::fail;
}

/// Fit quality too poor to report an exponent.
class FitError : public Error {
 public:
  using Error::Error;
};

/// (A) per transition, for extent z_tilde (nm).
inline std::vector<double> check_retardation(const Particle& p, double z_tilde, double T) {
  p.validate();
  if (!(z_tilde >= 0.0)) throw DomainError("check_retardation: extent must be >= 0");
  if (!(T >= 0.0)) throw DomainError("check_retardation: temperature must be >= 0");
  std::vector<double> out;
  for (const auto& t : p.transitions) {
    const double w = std::abs(t.omega_ev);
    const double kz = units::wavenumber(w) * z_tilde;
    out.push_back(units::thermal_energy(T) / w * kz * kz);
  }
  return out;
}

/// (B) per transition, Frobenius norm.
inline std::vector<double> check_reflectivity(const Particle& p, const Mat3& gamma0, const GammaProvider& g, double T) {
  p.validate();
  if (!(T >= 0.0)) throw DomainError("check_reflectivity: temperature must be >= 0");
  const double n0 = gamma0.norm();
  if (!(n0 > 0.0)) throw DomainError("check_reflectivity: |Gamma_0| = 0 (degenerate geometry)");
  std::vector<double> out;
  for (const auto& t : p.transitions) {
    const double w = std::abs(t.omega_ev);
    const double dg = (g.gamma_nonretarded(t.omega_ev).real() - gamma0).norm();
    out.push_back(units::thermal_energy(T) / w * dg / n0);
  }
  return out;
}

struct DominanceEntry {
  std::size_t dominant;
  std::size_t other;
  double value;
};

/// (C) for every transition other than `dominant`, optionally multiplied by a quality factor Q.
inline std::vector<DominanceEntry> check_dominance(const Particle& p, std::size_t dominant, double T,
                                                   std::optional<double> Q = std::nullopt) {
  p.validate();
  if (dominant >= p.transitions.size()) throw DomainError("check_dominance: dominant transition index out of range");
  const double dk = std::sqrt(p.transitions[dominant].d2());
  if (!(dk > 0.0)) throw DomainError("check_dominance: dominant transition has zero dipole (dominance undefined)");
  if (Q && !(*Q > 0.0)) throw DomainError("check_dominance: Q must be > 0");
  std::vector<DominanceEntry> out;
  for (std::size_t l = 0; l < p.transitions.size(); ++l) {
    if (l == dominant) continue;
    const auto& t = p.transitions[l];
    double v = std::sqrt(t.d2()) / dk * units::thermal_energy(T) / std::abs(t.omega_ev);
    if (Q) v *= *Q;
    out.push_back({dominant, l, v});
  }
  return out;
}

enum class EtaCase { suppressible, marginal, floor };  // eta > 1, eta = 1, eta < 1

inline const char* to_string(EtaCase c) {
  switch (c) {
    case EtaCase::suppressible: return "i(eta>1)";
    case EtaCase::marginal: return "ii(eta=1)";
    default: return "iii(eta<1)";
  }
}

struct EtaFit {
  double eta;
  double residual;  // rms deviation of log|DeltaGamma| from the fitted line
  double omega_lo, omega_hi;
  EtaCase classification;
};

/// Least-squares slope of log|DeltaGamma| against log omega.
inline EtaFit estimate_eta(const std::vector<double>& omegas, const std::vector<double>& norms,
                           double unit_tolerance = 0.05) {
  if (omegas.size() != norms.size()) throw DomainError("estimate_eta: sample arrays differ in length");
  if (omegas.size() < 4) throw FitError("estimate_eta: at least 4 samples required");
  std::vector<std::size_t> order(omegas.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return omegas[a] < omegas[b]; });
  std::vector<double> x, y;
  for (auto i : order) {
    if (!(omegas[i] > 0.0) || !(norms[i] > 0.0)) throw FitError("estimate_eta: samples must be positive");
    x.push_back(std::log(omegas[i]));
    y.push_back(std::log(norms[i]));
  }
  bool up = true, down = true;
  for (std::size_t i = 1; i < y.size(); ++i) {
    up = up && y[i] > y[i - 1];
    down = down && y[i] < y[i - 1];
  }
  if (!up && !down) throw FitError("estimate_eta: |DeltaGamma| is not monotone over the frequency range");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) ss += std::pow(y[i] - (icpt + slope * x[i]), 2);
  const double res = std::sqrt(ss / n);
  EtaCase c = EtaCase::floor;
  if (std::abs(slope - 1.0) <= std::max(unit_tolerance, res)) c = EtaCase::marginal;
  else if (slope > 1.0) c = EtaCase::suppressible;
  return {slope, res, omegas[order.front()], omegas[order.back()], c};
}

/// Index of an interior minimum of values (sampled on an ordered grid), if any.
inline std::optional<std::size_t> interior_minimum(const std::vector<double>& values) {
  if (values.size() < 3) return std::nullopt;
  const auto it = std::min_element(values.begin(), values.end());
  const auto i = static_cast<std::size_t>(it - values.begin());
  if (i == 0 || i + 1 == values.size()) return std::nullopt;
  return i;
}

/// Extent z: radius around r (ordered by cell distance) that holds all but `fraction` of Tr Gamma_0.
/// A per-cell cutoff would shrink to zero under refinement, so the cutoff is cumulative.
inline double relevant_extent(const born::ScatteringSolver& solver, const Vec3& r, double fraction = 0.01) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw DomainError("relevant_extent: fraction must be in (0, 1)");
  const auto contrib = solver.static_cell_contributions(r);
  const auto& cells = solver.body().cells();
  std::vector<std::pair<double, double>> dc;
  double total = 0.0;
  for (std::size_t i = 0; i < contrib.size(); ++i) {
    dc.emplace_back((cells[i].center - r).norm(), contrib[i]);
    total += contrib[i];
  }
  std::sort(dc.begin(), dc.end());
  double acc = 0.0;
  for (const auto& [d, c] : dc) {
    acc += c;
    if (std::abs(acc) >= (1.0 - fraction) * std::abs(total)) return d;
  }
  return dc.empty() ? 0.0 : dc.back().first;
}

struct TransitionEntry {
  std::size_t index;
  double omega_ev;
  double retardation;
  double reflectivity;
  Verdict retardation_verdict;
  Verdict reflectivity_verdict;
};

struct CriteriaReport {
  double temperature;
  double z_tilde;
  Thresholds thresholds;
  std::optional<double> q_factor;
  std::vector<TransitionEntry> transitions;
  std::vector<DominanceEntry> dominance;
  std::vector<Verdict> dominance_verdicts;
  std::optional<EtaFit> eta;
  double predicted_slope;  // eV/K, linear-in-T correction divided by T
  double u0;               // temperature-independent potential, eV

  Verdict overall() const {
    Verdict worst = Verdict::pass;
    auto take = [&](Verdict v) {
      if (static_cast<int>(v) > static_cast<int>(worst)) worst = v;
    };
    for (const auto& t : transitions) {
      take(t.retardation_verdict);
      take(t.reflectivity_verdict);
    }
    for (auto v : dominance_verdicts) take(v);
    return worst;
  }
};

/// Index of the transition with the largest |d|^2.
inline std::size_t dominant_transition(const Particle& p) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < p.transitions.size(); ++i)
    if (p.transitions[i].d2() > p.transitions[best].d2()) best = i;
  return best;
}

inline CriteriaReport build_report(const Particle& p, const GammaProvider& g, double z_tilde, double T,
                                   std::optional<double> Q = std::nullopt, const Thresholds& th = {}) {
  CriteriaReport rep{};
  rep.temperature = T;
  rep.z_tilde = z_tilde;
  rep.thresholds = th;
  rep.q_factor = Q;
  const Mat3 g0 = g.gamma0();
  const auto ret = check_retardation(p, z_tilde, T);
  const auto refl = check_reflectivity(p, g0, g, T);
  for (std::size_t k = 0; k < p.transitions.size(); ++k)
    rep.transitions.push_back({k, p.transitions[k].omega_ev, ret[k], refl[k], classify(ret[k], th), classify(refl[k], th)});
  rep.dominance = check_dominance(p, dominant_transition(p), T, Q);
  for (const auto& d : rep.dominance) rep.dominance_verdicts.push_back(classify(d.value, th));
  ThermalContext ctx;
  ctx.T = T;
  rep.predicted_slope = T > 0.0 ? linear_temperature_correction(p, g, ctx) / T : 0.0;
  rep.u0 = temperature_independent_potential(p, g0);
  return rep;
}

}  // namespace casimir::criteria

#endif
