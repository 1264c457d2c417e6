/**
 * @file kernel.hpp
 * @brief Free-space dipole kernel A(rho) in retarded and nonretarded form.
 *
 * A(rho) p / eps0 is the field of a point dipole p at displacement rho:
 *   retarded:    -exp(ik rho)/(4 pi rho^3) {[1 - ik rho - k^2 rho^2] I - [3 - 3ik rho - k^2 rho^2] e e}
 *   nonretarded: -(I - 3 e e)/(4 pi rho^3)
 */
#ifndef CASIMIR_BORN_KERNEL_HPP
#define CASIMIR_BORN_KERNEL_HPP

#include <Eigen/Dense>
#include <cmath>

#include "../error.hpp"
#include "../units.hpp"

namespace casimir::born {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat3c = Eigen::Matrix3cd;

enum class KernelKind { retarded, nonretarded };

inline const char* to_string(KernelKind k) { return k == KernelKind::retarded ? "retarded" : "nonretarded"; }

/// Static (k = 0) point kernel.
inline Mat3 static_kernel(const Vec3& rho) {
  const double r = rho.norm();
  if (!(r > 0.0)) throw DomainError("kernel_A: zero displacement (self-interaction is excluded)");
  const Vec3 e = rho / r;
  return -(Mat3::Identity() - 3.0 * e * e.transpose()) / (4.0 * units::pi * r * r * r);
}

namespace detail {

// exp(x)(1 - x + x^2) - 1 and exp(x)(3 - 3x + x^2) - 3 for complex x = i k rho.
// Both start at x^2; a power series avoids the cancellation for small |x|.
inline void retarded_brackets_minus_static(cplx x, cplx& p, cplx& q) {
  if (std::abs(x) > 0.5) {
    const cplx ex = std::exp(x);
    p = ex * (1.0 - x + x * x) - 1.0;
    q = ex * (3.0 - 3.0 * x + x * x) - 3.0;
    return;
  }
  // coefficient of x^n: P_n = 1/n! - 1/(n-1)! + 1/(n-2)!,  Q_n = 3/n! - 3/(n-1)! + 1/(n-2)!
  p = 0.0;
  q = 0.0;
  cplx xn = x * x;
  double f_n = 0.5, f_n1 = 1.0, f_n2 = 1.0;  // 1/n!, 1/(n-1)!, 1/(n-2)! at n = 2
  for (int n = 2; n < 40; ++n) {
    const cplx tp = (f_n - f_n1 + f_n2) * xn;
    const cplx tq = (3.0 * f_n - 3.0 * f_n1 + f_n2) * xn;
    p += tp;
    q += tq;
    if (std::abs(xn) * f_n2 < 1e-18 * (std::abs(p) + std::abs(q) + 1e-300)) break;
    xn *= x;
    f_n2 = f_n1;
    f_n1 = f_n;
    f_n /= (n + 1);
  }
}

}  // namespace detail

/// A_retarded(rho; k) - A_static(rho), evaluated without cancellation for small k rho.
inline Mat3c retarded_remainder(const Vec3& rho, cplx k) {
  const double r = rho.norm();
  if (!(r > 0.0)) throw DomainError("kernel_A: zero displacement (self-interaction is excluded)");
  const Vec3 e = rho / r;
  cplx p, q;
  detail::retarded_brackets_minus_static(cplx(0.0, 1.0) * k * r, p, q);
  const double pre = -1.0 / (4.0 * units::pi * r * r * r);
  return pre * (p * Mat3c::Identity() - q * (e * e.transpose()).cast<cplx>());
}

/// Dipole kernel A(rho) for wavenumber k (1/nm).
inline Mat3c kernel_A(const Vec3& rho, cplx k, KernelKind kind) {
  const Mat3c s = static_kernel(rho).cast<cplx>();
  if (kind == KernelKind::nonretarded || k == 0.0) return s;
  return s + retarded_remainder(rho, k);
}

}  // namespace casimir::born

#endif
