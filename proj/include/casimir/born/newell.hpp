/**
 * @file newell.hpp
 * @brief Cube-averaged static dipole kernel between two lattice cells.
 *
 * For two unit cubes offset by (X, Y, Z) cell lengths, N(X,Y,Z) is the
 * demagnetisation-type tensor of Newell, Williams and Dunlop (1993):
 * the mean field over one cube produced by uniform unit polarization of the
 * other is -N. The self tensor is N(0) = I/3. At large offsets N tends to
 * (I - 3 e e)/(4 pi |X|^3), i.e. the averaged kernel tends to the point kernel.
 */
#ifndef CASIMIR_BORN_NEWELL_HPP
#define CASIMIR_BORN_NEWELL_HPP

#include <Eigen/Dense>
#include <cmath>

#include "../units.hpp"

namespace casimir::born {

namespace detail {

inline double newell_f(double x, double y, double z) {
  x = std::abs(x);
  y = std::abs(y);
  z = std::abs(z);
  const double x2 = x * x, y2 = y * y, z2 = z * z;
  const double R = std::sqrt(x2 + y2 + z2);
  double r = 0.0;
  if (y > 0.0 && z2 != x2) r += 0.5 * y * (z2 - x2) * std::asinh(y / std::sqrt(x2 + z2));
  if (z > 0.0 && y2 != x2) r += 0.5 * z * (y2 - x2) * std::asinh(z / std::sqrt(x2 + y2));
  if (x * y * z > 0.0) r -= x * y * z * std::atan(y * z / (x * R));
  r += (2.0 * x2 - y2 - z2) * R / 6.0;
  return r;
}

inline double newell_g(double x, double y, double z) {
  const double sgn = (x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0)) * (y > 0 ? 1.0 : (y < 0 ? -1.0 : 0.0));
  if (sgn == 0.0) return 0.0;
  x = std::abs(x);
  y = std::abs(y);
  z = std::abs(z);
  const double x2 = x * x, y2 = y * y, z2 = z * z;
  const double R = std::sqrt(x2 + y2 + z2);
  double r = 0.0;
  if (z > 0.0) r += x * y * z * std::asinh(z / std::sqrt(x2 + y2));
  r += y / 6.0 * (3.0 * z2 - y2) * std::asinh(x / std::sqrt(y2 + z2));
  r += x / 6.0 * (3.0 * z2 - x2) * std::asinh(y / std::sqrt(x2 + z2));
  if (z > 0.0) {
    r -= z2 * z / 6.0 * std::atan(x * y / (z * R));
    r -= 0.5 * z * y2 * std::atan(x * z / (y * R));
    r -= 0.5 * z * x2 * std::atan(y * z / (x * R));
  }
  r -= x * y * R / 3.0;
  return sgn * r;
}

template <class F>
double newell_stencil(F fun, double X, double Y, double Z) {
  constexpr double w[3] = {-1.0, 2.0, -1.0};
  double t = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) t += w[i] * w[j] * w[k] * fun(X + i - 1, Y + j - 1, Z + k - 1);
  return t / (4.0 * units::pi);
}

}  // namespace detail

/// Newell tensor for an offset given in units of the cell edge.
inline Eigen::Matrix3d newell_tensor(double X, double Y, double Z) {
  using detail::newell_f;
  using detail::newell_g;
  using detail::newell_stencil;
  Eigen::Matrix3d N;
  N(0, 0) = newell_stencil(newell_f, X, Y, Z);
  N(1, 1) = newell_stencil([](double a, double b, double c) { return newell_f(b, a, c); }, X, Y, Z);
  N(2, 2) = newell_stencil([](double a, double b, double c) { return newell_f(c, b, a); }, X, Y, Z);
  N(0, 1) = N(1, 0) = newell_stencil(newell_g, X, Y, Z);
  N(0, 2) = N(2, 0) = newell_stencil([](double a, double b, double c) { return newell_g(a, c, b); }, X, Y, Z);
  N(1, 2) = N(2, 1) = newell_stencil([](double a, double b, double c) { return newell_g(b, c, a); }, X, Y, Z);
  return N;
}

/// Cube-averaged static kernel between cells of edge h offset by integer lattice steps.
inline Eigen::Matrix3d averaged_static_kernel(int dx, int dy, int dz, double h) {
  return -newell_tensor(dx, dy, dz) / (h * h * h);
}

}  // namespace casimir::born

#endif
