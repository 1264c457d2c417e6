/**
 * @file krylov.hpp
 * @brief Conjugate-orthogonal conjugate gradients for complex symmetric systems.
 *
 * Uses the unconjugated bilinear form x^T y, so for real symmetric positive
 * definite systems it is ordinary CG. Several right-hand sides are iterated
 * together (independent recurrences, shared operator applications).
 */
#ifndef CASIMIR_BORN_KRYLOV_HPP
#define CASIMIR_BORN_KRYLOV_HPP

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "../error.hpp"

namespace casimir::born {

struct KrylovResult {
  int iterations = 0;
  double max_relative_residual = 0.0;
};

/// Solves A X = B column by column. X holds the initial guess on entry.
template <class Scalar, class Apply>
KrylovResult cocg(const Apply& apply, const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& B,
                  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& X, double rel_tol, int max_iter) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = B.rows(), m = B.cols();
  if (X.rows() != n || X.cols() != m) X = Mat::Zero(n, m);
  Mat R(n, m), AX(n, m);
  apply(X, AX);
  R = B - AX;
  Mat P = R;
  std::vector<Scalar> rho(static_cast<std::size_t>(m));
  std::vector<double> bnorm(static_cast<std::size_t>(m));
  std::vector<char> active(static_cast<std::size_t>(m), 1);
  for (Eigen::Index c = 0; c < m; ++c) {
    rho[c] = (R.col(c).transpose() * R.col(c))(0, 0);
    bnorm[c] = B.col(c).norm();
    if (bnorm[c] == 0.0 || R.col(c).norm() <= rel_tol * bnorm[c]) active[c] = 0;
  }
  KrylovResult res;
  Mat AP(n, m);
  for (int it = 0; it < max_iter; ++it) {
    bool any = false;
    for (Eigen::Index c = 0; c < m; ++c) any = any || active[c];
    if (!any) break;
    apply(P, AP);
    res.iterations = it + 1;
    for (Eigen::Index c = 0; c < m; ++c) {
      if (!active[c]) continue;
      const Scalar pAp = (P.col(c).transpose() * AP.col(c))(0, 0);
      if (std::abs(pAp) == 0.0) throw ConvergenceError("cocg: breakdown (p^T A p = 0)");
      const Scalar alpha = rho[c] / pAp;
      X.col(c) += alpha * P.col(c);
      R.col(c) -= alpha * AP.col(c);
      const double rn = R.col(c).norm();
      if (rn <= rel_tol * bnorm[c]) {
        active[c] = 0;
        continue;
      }
      const Scalar rho_new = (R.col(c).transpose() * R.col(c))(0, 0);
      if (std::abs(rho_new) <= 1e-300) throw ConvergenceError("cocg: breakdown (r^T r = 0)");
      const Scalar beta = rho_new / rho[c];
      rho[c] = rho_new;
      P.col(c) = R.col(c) + beta * P.col(c);
    }
  }
  // true residuals
  apply(X, AX);
  for (Eigen::Index c = 0; c < m; ++c) {
    if (bnorm[c] == 0.0) continue;
    res.max_relative_residual = std::max(res.max_relative_residual, (B.col(c) - AX.col(c)).norm() / bnorm[c]);
  }
  if (res.max_relative_residual > 10.0 * rel_tol)
    throw ConvergenceError("cocg: relative residual " + std::to_string(res.max_relative_residual) + " after " +
                               std::to_string(res.iterations) + " iterations",
                           0.0, res.max_relative_residual);
  return res;
}

}  // namespace casimir::born

#endif
