/**
 * @file materials.hpp
 * @brief Permittivity models (Drude, perfect conductor, tabulated) on the real and imaginary axes.
 *
 * Frequencies are photon energies hbar*omega in eV and may be complex; a purely
 * imaginary argument i*xi selects the imaginary-axis branch.
 */
#ifndef CASIMIR_MATERIALS_HPP
#define CASIMIR_MATERIALS_HPP

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "error.hpp"
#include "numerics/interp.hpp"
#include "units.hpp"

namespace casimir {

struct Drude {
  double plasma_ev;
  double gamma_ev;
};

struct PerfectConductor {};

struct Tabulated {
  std::vector<double> imag_freq_ev;  // hbar*xi
  std::vector<double> imag_eps;      // eps(i xi), real
  std::vector<double> real_freq_ev;  // hbar*omega > 0
  std::vector<cplx> real_eps;
  std::string source;
};

struct Permittivity {
  cplx eps;
  bool infinite = false;      // perfect conductor sentinel
  bool extrapolated = false;  // tabulated query was clamped to the grid end
};

struct SurfaceFactor {
  double approx;  // omega_P^-1 [ (sqrt(w^2+g^2) + |w|) |w| / 2 ]^(1/2); NaN when not Drude
  double exact;   // Re[i / sqrt(eps(omega))]
};

class Material {
 public:
  using Model = std::variant<Drude, PerfectConductor, Tabulated>;

  Material() : model_(PerfectConductor{}) {}

  static Material drude(double plasma_ev, double gamma_ev) {
    if (!(plasma_ev > 0.0) || !(gamma_ev > 0.0))
      throw DomainError("Drude material: plasma frequency and relaxation must be > 0");
    return Material(Drude{plasma_ev, gamma_ev});
  }

  static Material perfect_conductor() { return Material(PerfectConductor{}); }

  static Material tabulated(Tabulated t) {
    if (t.imag_freq_ev.size() != t.imag_eps.size() || t.real_freq_ev.size() != t.real_eps.size())
      throw DomainError("tabulated material: frequency and permittivity columns differ in length");
    if (t.imag_freq_ev.empty() && t.real_freq_ev.empty())
      throw DomainError("tabulated material: no data rows");
    for (double e : t.imag_eps)
      if (!(e >= 1.0)) throw DomainError("tabulated material: eps(i xi) must be real and >= 1");
    for (double f : t.imag_freq_ev)
      if (!(f > 0.0)) throw DomainError("tabulated material: imaginary-axis frequencies must be > 0");
    for (double f : t.real_freq_ev)
      if (!(f > 0.0)) throw DomainError("tabulated material: real-axis frequencies must be > 0");
    Material m(std::move(t));
    auto& tab = std::get<Tabulated>(m.model_);
    if (!tab.imag_freq_ev.empty()) m.imag_ = numerics::MonotoneCubic(tab.imag_freq_ev, tab.imag_eps);
    if (!tab.real_freq_ev.empty()) {
      std::vector<double> re, im;
      for (auto e : tab.real_eps) {
        re.push_back(e.real());
        im.push_back(e.imag());
      }
      m.real_re_ = numerics::MonotoneCubic(tab.real_freq_ev, re);
      m.real_im_ = numerics::MonotoneCubic(tab.real_freq_ev, im);
    }
    return m;
  }

  const Model& model() const { return model_; }
  bool is_perfect_conductor() const { return std::holds_alternative<PerfectConductor>(model_); }
  bool is_drude() const { return std::holds_alternative<Drude>(model_); }
  bool is_tabulated() const { return std::holds_alternative<Tabulated>(model_); }

  /// Short human-readable description for output metadata.
  std::string describe() const {
    std::ostringstream os;
    os.precision(9);
    if (auto d = std::get_if<Drude>(&model_))
      os << "drude(plasma_ev=" << d->plasma_ev << ",gamma_ev=" << d->gamma_ev << ")";
    else if (is_perfect_conductor())
      os << "pec";
    else
      os << "table(" << std::get<Tabulated>(model_).source << ")";
    return os.str();
  }

  Permittivity permittivity(cplx hw) const {
    check_axis(hw);
    if (auto d = std::get_if<Drude>(&model_)) {
      if (hw == 0.0) throw StaticDivergenceError("Drude permittivity diverges at zero frequency; use born_strength");
      const cplx i(0.0, 1.0);
      return {1.0 - d->plasma_ev * d->plasma_ev / (hw * (hw + i * d->gamma_ev))};
    }
    if (is_perfect_conductor()) return {cplx(std::numeric_limits<double>::infinity(), 0.0), true, false};
    return tabulated_eps(hw);
  }

  /// u = chi / (1 + chi/3) with chi = eps - 1. Equals 3 for perfect conductors and for Drude at zero frequency.
  cplx born_strength(cplx hw) const {
    check_axis(hw);
    if (auto d = std::get_if<Drude>(&model_)) {
      // 3 chi/(chi + 3) with chi = -wp^2/(w(w + i g)), multiplied through by w(w + i g)
      const cplx i(0.0, 1.0);
      const double wp2 = d->plasma_ev * d->plasma_ev;
      return 3.0 * wp2 / (wp2 - 3.0 * hw * (hw + i * d->gamma_ev));
    }
    if (is_perfect_conductor()) return 3.0;
    const Permittivity p = tabulated_eps(hw);
    return 3.0 * (p.eps - 1.0) / (p.eps + 2.0);
  }

  /// u at zero frequency: 3 for conductors; tabulated data use the lowest imaginary-axis sample.
  cplx static_born_strength() const {
    if (!is_tabulated()) return born_strength(0.0);
    const auto& t = std::get<Tabulated>(model_);
    if (imag_.empty()) throw DomainError("tabulated material '" + t.source + "' has no imaginary-axis data for the static limit");
    const double eps = t.imag_eps.front();
    return 3.0 * (eps - 1.0) / (eps + 2.0);
  }

  /// Surface factor Re[i/sqrt(eps)] at real frequency, with the small-gamma Drude approximation.
  SurfaceFactor drude_surface_factor(double hw) const {
    if (!std::isfinite(hw)) throw DomainError("drude_surface_factor: frequency must be finite");
    if (is_perfect_conductor()) return {0.0, 0.0};
    const double w = std::abs(hw);
    if (w == 0.0) return {0.0, 0.0};
    const cplx eps = permittivity(cplx(w, 0.0)).eps;
    const double exact = (cplx(0.0, 1.0) / std::sqrt(eps)).real();
    if (auto d = std::get_if<Drude>(&model_)) {
      const double approx = std::sqrt(0.5 * (std::hypot(w, d->gamma_ev) + w) * w) / d->plasma_ev;
      return {approx, exact};
    }
    return {std::numeric_limits<double>::quiet_NaN(), exact};
  }

 private:
  explicit Material(Model m) : model_(std::move(m)) {}

  static bool on_imag_axis(cplx hw) { return hw.real() == 0.0 && hw.imag() != 0.0; }

  static void check_axis(cplx hw) {
    if (!std::isfinite(hw.real()) || !std::isfinite(hw.imag()))
      throw DomainError("permittivity: frequency must be finite");
    if (hw.real() == 0.0 && hw.imag() < 0.0)
      throw DomainError("permittivity: imaginary-axis frequency must have xi > 0");
  }

  Permittivity tabulated_eps(cplx hw) const {
    const auto& t = std::get<Tabulated>(model_);
    if (on_imag_axis(hw)) {
      if (imag_.empty()) throw DomainError("tabulated material '" + t.source + "' has no imaginary-axis data");
      const auto r = imag_(hw.imag());
      return {cplx(r.value, 0.0), false, r.extrapolated};
    }
    if (hw.imag() != 0.0) throw DomainError("tabulated material: only real or purely imaginary frequencies");
    if (hw.real() == 0.0) throw StaticDivergenceError("tabulated material: zero frequency not tabulated");
    if (real_re_.empty()) throw DomainError("tabulated material '" + t.source + "' has no real-axis data");
    const double w = std::abs(hw.real());
    const auto re = real_re_(w), im = real_im_(w);
    cplx eps(re.value, im.value);
    if (hw.real() < 0.0) eps = std::conj(eps);
    return {eps, false, re.extrapolated};
  }

  Model model_;
  numerics::MonotoneCubic imag_, real_re_, real_im_;
};

/// Reads a permittivity table: each non-comment row is either
///   frequency_ev eps            (imaginary-axis sample eps(i xi), real)
///   frequency_ev eps_re eps_im  (real-axis sample)
/// Rows of each kind must be sorted by strictly increasing frequency.
inline Material load_permittivity_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open permittivity table '" + path + "'");
  Tabulated t;
  t.source = path;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    for (char& c : line)
      if (c == ',' || c == '\t') c = ' ';
    std::istringstream ls(line);
    std::vector<double> cols;
    double v;
    while (ls >> v) cols.push_back(v);
    if (!ls.eof()) throw ValidationError(path + ":" + std::to_string(lineno) + ": non-numeric entry");
    if (cols.empty()) continue;
    if (cols.size() == 2) {
      t.imag_freq_ev.push_back(cols[0]);
      t.imag_eps.push_back(cols[1]);
    } else if (cols.size() == 3) {
      t.real_freq_ev.push_back(cols[0]);
      t.real_eps.emplace_back(cols[1], cols[2]);
    } else {
      throw ValidationError(path + ":" + std::to_string(lineno) + ": expected 2 or 3 columns");
    }
  }
  try {
    return Material::tabulated(std::move(t));
  } catch (const DomainError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

}  // namespace casimir

#endif
