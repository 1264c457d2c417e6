/**
 * @file matsubara.hpp
 * @brief Matsubara frequencies, Bose photon numbers and primed Matsubara sums.
 */
#ifndef CASIMIR_NUMERICS_MATSUBARA_HPP
#define CASIMIR_NUMERICS_MATSUBARA_HPP

#include <cmath>
#include <string>
#include <vector>

#include "../error.hpp"
#include "../units.hpp"

namespace casimir::numerics {

enum class TailEstimate { none, power_law };

struct MatsubaraPolicy {
  double rel_tail_tol = 1e-9;
  long j_max = 2000000;
  TailEstimate tail_estimate = TailEstimate::power_law;

  void validate() const {
    if (!(rel_tail_tol > 0.0)) throw DomainError("MatsubaraPolicy: rel_tail_tol must be > 0");
    if (j_max < 1) throw DomainError("MatsubaraPolicy: j_max must be >= 1");
  }
};

/// Spacing hbar*xi_1 = 2 pi k_B T in eV.
inline double matsubara_spacing(double T) {
  if (!(T > 0.0)) throw DomainError("matsubara: temperature must be > 0 (use the zero-temperature integral form)");
  return 2.0 * units::pi * units::thermal_energy(T);
}

/// hbar*xi_j for j = 0 .. j_max. The j = 0 entry carries half weight in primed sums.
inline std::vector<double> matsubara_frequencies(double T, const MatsubaraPolicy& policy) {
  policy.validate();
  const double step = matsubara_spacing(T);
  std::vector<double> xi(static_cast<std::size_t>(policy.j_max) + 1);
  for (long j = 0; j <= policy.j_max; ++j) xi[static_cast<std::size_t>(j)] = step * static_cast<double>(j);
  return xi;
}

/// Weight of term j in a primed sum.
inline double matsubara_weight(long j) { return j == 0 ? 0.5 : 1.0; }

/// Mean thermal photon number 1/(exp(hbar w / k_B T) - 1) for signed hbar*omega in eV.
/// At T = 0 this is -Theta(-omega).
inline double photon_number(double hw, double T) {
  if (hw == 0.0 || !std::isfinite(hw)) throw DomainError("photon_number: frequency must be finite and non-zero");
  if (T < 0.0) throw DomainError("photon_number: temperature must be >= 0");
  if (T == 0.0) return hw > 0.0 ? 0.0 : -1.0;
  const double x = hw / units::thermal_energy(T);
  if (x > 700.0) return 0.0;
  if (x < -700.0) return -1.0;
  return 1.0 / std::expm1(x);
}

struct MatsubaraSumResult {
  double value;      // includes the tail estimate when enabled
  double tail;       // tail estimate that was added
  long terms;        // number of terms evaluated (j = 0 .. terms-1)
};

/// Primed sum sum'_{j>=0} term(j, hbar*xi_j).
/// Stops once three consecutive terms are each below rel_tail_tol times the
/// running sum, then adds sum_{j>J} C/j^2 ~ C/(J + 1/2) with C = term(J) J^2.
template <class Term>
MatsubaraSumResult matsubara_sum(const Term& term, double T, const MatsubaraPolicy& policy) {
  policy.validate();
  const double step = matsubara_spacing(T);
  double sum = 0.0;
  int small_run = 0;
  double last = 0.0;
  long j = 0;
  for (; j <= policy.j_max; ++j) {
    last = matsubara_weight(j) * term(j, step * static_cast<double>(j));
    if (!std::isfinite(last)) throw ConvergenceError("matsubara_sum: non-finite term at j=" + std::to_string(j), sum, 0.0);
    sum += last;
    if (j > 0 && std::abs(last) <= policy.rel_tail_tol * std::abs(sum)) {
      if (++small_run >= 3) break;
    } else {
      small_run = 0;
    }
    if (j > 0 && sum == 0.0 && last == 0.0) {
      if (++small_run >= 3) break;
    }
  }
  if (j > policy.j_max)
    throw ConvergenceError("matsubara_sum: tail tolerance not reached within j_max=" + std::to_string(policy.j_max),
                           sum, std::abs(last) * static_cast<double>(policy.j_max));
  double tail = 0.0;
  if (policy.tail_estimate == TailEstimate::power_law && j > 0) {
    const double J = static_cast<double>(j);
    tail = last * J * J / (J + 0.5);
  }
  return {sum + tail, tail, j + 1};
}

}  // namespace casimir::numerics

#endif
