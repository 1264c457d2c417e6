/**
 * @file bessel.hpp
 * @brief Modified Bessel functions I_m, K_m of integer order and their derivatives.
 *
 * K_0 and K_1 come from the ascending series for x <= 2 and from Steed's
 * continued fraction (CF2) above. Higher K_m follow by forward recurrence,
 * which is stable for K. I_m is recovered from the CF1 ratio I_m'/I_m and
 * the Wronskian I_m K_m' - I_m' K_m = -1/x, so no downward recurrence for I
 * is needed. For x >= max(25, (m+1)^2) I_m comes from its asymptotic series.
 *
 * Internally values are held as mantissas with a shared log scale L:
 *   I_m = I * exp(+L),  K_m = K * exp(-L).
 * This keeps products such as K_m(a) I_m(b)^2 / I_m(a) finite for large m
 * and small arguments, where the unscaled functions under/overflow.
 */
#ifndef CASIMIR_NUMERICS_BESSEL_HPP
#define CASIMIR_NUMERICS_BESSEL_HPP

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "../error.hpp"

namespace casimir::numerics {

struct BesselIK {
  double I, dI, K, dK;
};

/// Log-scaled form: true I = I*exp(log_scale), true K = K*exp(-log_scale).
struct BesselIKLog {
  double I, dI, K, dK;
  double log_scale;

  /// log|I_m(x)|
  double log_I() const { return std::log(std::abs(I)) + log_scale; }
  /// I_m(x) K_m(x), always representable.
  double IK() const { return I * K; }
};

inline constexpr int bessel_max_order = 200;

namespace detail {

inline constexpr double euler_gamma = 0.57721566490153286061;

// K_0, K_1 times exp(x).
inline void k01_scaled(double x, double& k0, double& k1) {
  if (x <= 2.0) {
    const double y = 0.25 * x * x;
    const double lg = std::log(0.5 * x);
    // I_0, I_1 and the digamma-weighted partner series
    double t0 = 1.0, t1 = 1.0;  // (y^k/(k!)^2), (y^k/(k!(k+1)!))
    double i0 = 1.0, i1 = 1.0;
    double h = 0.0;                         // harmonic number H_k
    double psi_k1 = -euler_gamma;           // psi(k+1)
    double psi_k2 = -euler_gamma + 1.0;     // psi(k+2)
    double s0 = 0.0;
    double s1 = psi_k1 + psi_k2;
    for (int k = 1; k < 60; ++k) {
      t0 *= y / (double(k) * k);
      t1 *= y / (double(k) * (k + 1));
      h += 1.0 / k;
      psi_k1 += 1.0 / k;
      psi_k2 += 1.0 / (k + 1);
      i0 += t0;
      i1 += t1;
      s0 += h * t0;
      s1 += (psi_k1 + psi_k2) * t1;
      if (t0 < 1e-18 * i0 && t1 < 1e-18 * i1) break;
    }
    i1 *= 0.5 * x;
    const double K0 = -(lg + euler_gamma) * i0 + s0;
    const double K1 = 1.0 / x + lg * i1 - 0.25 * x * s1;
    const double ex = std::exp(x);
    k0 = K0 * ex;
    k1 = K1 * ex;
    return;
  }
  // Steed's CF2 at order 0.
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d, delh = d;
  double q1 = 0.0, q2 = 1.0;
  const double a1 = 0.25;
  double q = a1, c = a1, a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 1; i < 100000; ++i) {
    a -= 2 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < 1e-17) break;
  }
  h = a1 * h;
  k0 = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
  k1 = k0 * (x + 0.5 - h) / x;
}

// CF1: I_m'(x)/I_m(x) by modified Lentz.
inline double cf1_ratio(int m, double x) {
  constexpr double tiny = 1e-300;
  const double xi = 1.0 / x, xi2 = 2.0 * xi;
  double h = m * xi;
  if (h < tiny) h = tiny;
  double b = xi2 * m, d = 0.0, c = h;
  for (int i = 1; i < 1000000; ++i) {
    b += xi2;
    d = 1.0 / (b + d);
    c = b + 1.0 / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) return h;
  }
  throw ConvergenceError("bessel: CF1 did not converge at x=" + std::to_string(x));
}

// I_m(x) exp(-x) from the large-argument asymptotic series; valid for x >= max(25, m^2).
inline double i_scaled_asymptotic(int m, double x) {
  const double mu = 4.0 * m * m;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double f = (mu - (2.0 * k - 1) * (2.0 * k - 1)) / (8.0 * k * x);
    const double next = -term * f;
    if (std::abs(next) >= std::abs(term) && k > 1) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

inline bool use_asymptotic(int m, double x) { return x >= std::max(25.0, static_cast<double>(m + 1) * (m + 1)); }

}  // namespace detail

/// Core evaluation with shared log scale.
inline BesselIKLog bessel_modified_log(int m, double x) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw DomainError("bessel_modified: argument must be finite and > 0, got " + std::to_string(x));
  if (m < 0 || m > bessel_max_order)
    throw DomainError("bessel_modified: order must be in [0, 200], got " + std::to_string(m));

  double k0, k1;
  detail::k01_scaled(x, k0, k1);
  double L = x;  // K = mantissa * exp(-L)

  // Forward recurrence to K_m and K_{m+1}.
  double km = k0, kp = k1;
  for (int n = 1; n <= m; ++n) {
    const double next = km + (2.0 * n / x) * kp;
    km = kp;
    kp = next;
    if (std::abs(kp) > 1e250) {
      km *= 1e-250;
      kp *= 1e-250;
      L -= 250.0 * std::log(10.0);
    }
  }
  const double dk = (m / x) * km - kp;
  if (detail::use_asymptotic(m, x)) {
    // I mantissa relative to exp(L); here L = x since no renormalisation occurs for x >= m^2
    const double sc = std::exp(x - L);
    const double im = detail::i_scaled_asymptotic(m, x) * sc;
    const double ip = detail::i_scaled_asymptotic(m + 1, x) * sc;
    return {im, ip + (m / x) * im, km, dk, L};
  }
  const double f = detail::cf1_ratio(m, x);
  const double i = 1.0 / (x * (f * km - dk));
  // Move the magnitude of I into the log scale so that all mantissas are O(1)
  // (I_m K_m is of order 1/(2m) or larger).
  const double shift = std::log(std::abs(i));
  const double s = std::abs(i);
  return {i / s, f * i / s, km * s, dk * s, L + shift};
}

/// Unscaled values. Throws RangeError when a value is not representable.
inline BesselIK bessel_modified(int m, double x) {
  const BesselIKLog r = bessel_modified_log(m, x);
  const double up = std::exp(r.log_scale), down = std::exp(-r.log_scale);
  BesselIK out{r.I * up, r.dI * up, r.K * down, r.dK * down};
  if (!std::isfinite(out.I) || !std::isfinite(out.K) || !std::isfinite(out.dI) || !std::isfinite(out.dK) ||
      !std::isfinite(up) || !std::isfinite(down))
    throw RangeError("bessel_modified: overflow at m=" + std::to_string(m) + ", x=" + std::to_string(x) +
                     "; use bessel_modified_scaled or bessel_modified_log");
  return out;
}

/// Exponentially scaled values: I*exp(-x), I'*exp(-x), K*exp(x), K'*exp(x).
inline BesselIK bessel_modified_scaled(int m, double x) {
  const BesselIKLog r = bessel_modified_log(m, x);
  const double up = std::exp(r.log_scale - x), down = std::exp(x - r.log_scale);
  BesselIK out{r.I * up, r.dI * up, r.K * down, r.dK * down};
  if (!std::isfinite(out.K) || !std::isfinite(out.dK) || !std::isfinite(out.I))
    throw RangeError("bessel_modified_scaled: overflow at m=" + std::to_string(m) + ", x=" + std::to_string(x) +
                     "; use bessel_modified_log");
  return out;
}

}  // namespace casimir::numerics

#endif
