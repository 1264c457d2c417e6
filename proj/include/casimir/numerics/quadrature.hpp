/**
 * @file quadrature.hpp
 * @brief Adaptive Gauss-Kronrod (21-point) and double-exponential quadrature.
 */
#ifndef CASIMIR_NUMERICS_QUADRATURE_HPP
#define CASIMIR_NUMERICS_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

#include "../error.hpp"

namespace casimir::numerics {

enum class QuadScheme { gauss_kronrod, double_exponential };

struct QuadratureSpec {
  QuadScheme scheme = QuadScheme::gauss_kronrod;
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  long max_evals = 200000;
  /// Length scale of the integrand on [0, inf); sets the variable change.
  double scale = 1.0;

  void validate() const {
    if (!(rel_tol > 0.0)) throw DomainError("QuadratureSpec: rel_tol must be > 0");
    if (max_evals < 100) throw DomainError("QuadratureSpec: max_evals must be >= 100");
    if (!(scale > 0.0)) throw DomainError("QuadratureSpec: scale must be > 0");
  }
};

struct QuadResult {
  double value;
  double error;
  long evals;
};

namespace detail {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
inline constexpr double xgk21[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452, 0.930157491355708226001207180059508,
    0.865063366688984510732096688423493, 0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784, 0.294392862701460198131126603103866,
    0.148874338981631210884826001129720, 0.0};
inline constexpr double wgk21[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390, 0.054755896574351996031381300244580,
    0.075039674810919952767043140916190, 0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707, 0.142775938577060080797094273138717,
    0.147739104901338491374841515972068, 0.149445554002916905664936468389821};
inline constexpr double wg10[5] = {0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
                                   0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
                                   0.295524224714752870173892994651338};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk21(const F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double k = fc * wgk21[10];
  double g = 0.0;
  for (int j = 0; j < 10; ++j) {
    const double dx = h * xgk21[j];
    const double s = f(c - dx) + f(c + dx);
    k += wgk21[j] * s;
    if (j % 2 == 1) g += wg10[j / 2] * s;
  }
  const double value = k * h;
  double err = std::abs((k - g) * h);
  // QUADPACK-style scaling of the raw Gauss/Kronrod difference.
  if (err > 0.0) err = std::max(err * std::min(1.0, std::pow(200.0 * err / std::max(std::abs(value), 1e-300), 1.5)),
                                50.0 * 2.2e-16 * std::abs(value));
  return {a, b, value, err};
}

}  // namespace detail

/// Adaptive GK21 on a finite interval [a, b].
template <class F>
QuadResult integrate_gk(const F& f, double a, double b, const QuadratureSpec& spec) {
  spec.validate();
  std::priority_queue<detail::Panel> heap;
  long evals = 0;
  const int initial = 8;
  double total = 0.0, err = 0.0;
  for (int i = 0; i < initial; ++i) {
    const double lo = a + (b - a) * i / initial, hi = a + (b - a) * (i + 1) / initial;
    auto p = detail::gk21(f, lo, hi);
    evals += 21;
    total += p.value;
    err += p.error;
    heap.push(p);
  }
  while (err > std::max(spec.rel_tol * std::abs(total), spec.abs_tol)) {
    if (evals + 42 > spec.max_evals)
      throw ConvergenceError("integrate: no convergence within " + std::to_string(spec.max_evals) + " evaluations",
                             total, err);
    const detail::Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b))
      throw ConvergenceError("integrate: panel width reached machine precision", total, err);
    auto l = detail::gk21(f, worst.a, mid);
    auto r = detail::gk21(f, mid, worst.b);
    evals += 42;
    total += l.value + r.value - worst.value;
    err += l.error + r.error - worst.error;
    heap.push(l);
    heap.push(r);
    if (heap.size() % 64 == 0) {
      // re-accumulate to shed round-off from the running updates
      auto copy = heap;
      total = err = 0.0;
      while (!copy.empty()) {
        total += copy.top().value;
        err += copy.top().error;
        copy.pop();
      }
    }
  }
  if (!std::isfinite(total)) throw ConvergenceError("integrate: non-finite result", total, err);
  return {total, err, evals};
}

/// Integral over [0, inf) by adaptive GK21 after x = L t / (1 - t).
template <class F>
QuadResult integrate_semi_infinite_gk(const F& f, const QuadratureSpec& spec) {
  const double L = spec.scale;
  auto g = [&](double t) {
    if (t >= 1.0) return 0.0;
    const double s = 1.0 - t;
    const double x = L * t / s;
    const double v = f(x) * L / (s * s);
    return std::isfinite(v) ? v : 0.0;
  };
  return integrate_gk(g, 0.0, 1.0, spec);
}

/// Integral over [0, inf) by exp-sinh double-exponential quadrature,
/// x = L exp(pi/2 sinh t), trapezoidal rule refined by step halving.
template <class F>
QuadResult integrate_semi_infinite_de(const F& f, const QuadratureSpec& spec) {
  spec.validate();
  const double L = spec.scale;
  const double half_pi = 0.5 * std::numbers::pi;
  long evals = 0;
  auto term = [&](double t) {
    const double x = L * std::exp(half_pi * std::sinh(t));
    if (x == 0.0 || !std::isfinite(x)) return 0.0;
    ++evals;
    const double v = f(x) * x * half_pi * std::cosh(t);
    return std::isfinite(v) ? v : 0.0;
  };
  // Truncate the t-range where the integrand weight is negligible in both directions.
  const double t_lo = -4.5, t_hi = 4.5;
  double h = 0.5;
  double sum = 0.0;
  for (double t = t_lo; t <= t_hi + 1e-12; t += h) sum += term(t);
  double estimate = sum * h;
  double prev = estimate;
  double err = std::abs(estimate);
  for (int level = 1; level < 14; ++level) {
    h *= 0.5;
    for (double t = t_lo + h; t < t_hi; t += 2.0 * h) sum += term(t);
    estimate = sum * h;
    err = std::abs(estimate - prev);
    if (level >= 3 && err <= std::max(spec.rel_tol * std::abs(estimate), spec.abs_tol))
      return {estimate, err, evals};
    if (evals > spec.max_evals) break;
    prev = estimate;
  }
  throw ConvergenceError("integrate (double-exponential): tolerance not reached", estimate, err);
}

template <class F>
QuadResult integrate_semi_infinite(const F& f, const QuadratureSpec& spec) {
  return spec.scheme == QuadScheme::gauss_kronrod ? integrate_semi_infinite_gk(f, spec)
                                                  : integrate_semi_infinite_de(f, spec);
}

/// Finite interval, either scheme (the double-exponential variant uses tanh-sinh).
template <class F>
QuadResult integrate_interval(const F& f, double a, double b, const QuadratureSpec& spec) {
  if (spec.scheme == QuadScheme::gauss_kronrod) return integrate_gk(f, a, b, spec);
  spec.validate();
  const double half_pi = 0.5 * std::numbers::pi;
  const double c = 0.5 * (a + b), r = 0.5 * (b - a);
  long evals = 0;
  auto term = [&](double t) {
    const double u = half_pi * std::sinh(t);
    const double ch = std::cosh(u);
    const double x = std::tanh(u);
    const double w = half_pi * std::cosh(t) / (ch * ch);
    if (w < 1e-300 || std::abs(x) >= 1.0) return 0.0;
    ++evals;
    const double v = f(c + r * x) * w * r;
    return std::isfinite(v) ? v : 0.0;
  };
  const double t_max = 3.5;
  double h = 0.5, sum = 0.0;
  for (double t = -t_max; t <= t_max + 1e-12; t += h) sum += term(t);
  double estimate = sum * h, prev = estimate, err = std::abs(estimate);
  for (int level = 1; level < 14; ++level) {
    h *= 0.5;
    for (double t = -t_max + h; t < t_max; t += 2.0 * h) sum += term(t);
    estimate = sum * h;
    err = std::abs(estimate - prev);
    if (level >= 3 && err <= std::max(spec.rel_tol * std::abs(estimate), spec.abs_tol))
      return {estimate, err, evals};
    if (evals > spec.max_evals) break;
    prev = estimate;
  }
  throw ConvergenceError("integrate (tanh-sinh): tolerance not reached", estimate, err);
}

}  // namespace casimir::numerics

#endif
