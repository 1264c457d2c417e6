/**
 * @file scattering.hpp
 * @brief Scattering Green tensor Gamma(r; omega) of a voxel body.
 *
 * Gamma = sum_i c_i A(r - s_i) X_i with (I - C) X = B, B_i = A(s_i - r).
 * In symmetrised form Gamma = Bw^T S^{-1} Bw with Bw = W B; the Born series
 * is the Neumann expansion sum_n Bw^T (I - S)^n Bw.
 */
#ifndef CASIMIR_BORN_SCATTERING_HPP
#define CASIMIR_BORN_SCATTERING_HPP

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "../error.hpp"
#include "../units.hpp"
#include "coupling_operator.hpp"
#include "kernel.hpp"
#include "krylov.hpp"
#include "voxel_body.hpp"

namespace casimir::born {

enum class Method { born_series, direct_solve };

inline const char* to_string(Method m) { return m == Method::born_series ? "born" : "solve"; }

struct SolverOptions {
  Method method = Method::direct_solve;
  int series_max = 20;           // highest Born order (number of strength factors)
  double series_tol = 1e-13;     // stop once an order contributes less than this, relative
  std::size_t dense_max_cells = 150;
  double krylov_tol = 1e-11;
  int krylov_max_iter = 20000;
  double min_rcond = 1e-13;
  CouplingOptions coupling;
};

struct GammaTensor {
  Mat3c value;
  cplx hw;  // photon energy (eV), complex in general
  Vec3 point;
  KernelKind kernel;
};

struct SolveStats {
  bool dense = false;
  int iterations = 0;
  int series_orders = 0;
  bool series_converged = true;
  double residual = 0.0;
};

struct FrequencyDerivatives {
  Mat3 gamma0;       // static Gamma (nm^-3)
  Mat3 gamma0_dd;    // d^2 Gamma / d(hbar omega)^2 at omega = 0, chi frozen (nm^-3 eV^-2)
  double step_ev;    // largest finite-difference step used
  double extrapolation_error;  // relative change of the last Richardson level
};

class ScatteringSolver {
 public:
  explicit ScatteringSolver(VoxelBody body, SolverOptions opt = {}) : body_(std::move(body)), opt_(opt) {}

  const VoxelBody& body() const { return body_; }
  const SolverOptions& options() const { return opt_; }

  /// Gamma at each point for photon energy hw (eV), using the materials' u(hw).
  std::vector<GammaTensor> gamma(const std::vector<Vec3>& points, cplx hw, KernelKind kind) const {
    std::vector<cplx> mat_u(body_.materials().size());
    for (std::size_t m = 0; m < mat_u.size(); ++m)
      mat_u[m] = hw == 0.0 ? body_.materials()[m].static_born_strength() : body_.materials()[m].born_strength(hw);
    auto vals = gamma_with_strengths(points, units::wavenumber(hw), kind, mat_u);
    std::vector<GammaTensor> out;
    for (std::size_t p = 0; p < points.size(); ++p) out.push_back({vals[p], hw, points[p], kind});
    return out;
  }

  GammaTensor gamma(const Vec3& point, cplx hw, KernelKind kind) const { return gamma(std::vector<Vec3>{point}, hw, kind)[0]; }

  /// Gamma with explicit wavenumber k (1/nm) and per-material strengths; results are memoised.
  std::vector<Mat3c> gamma_with_strengths(const std::vector<Vec3>& points, cplx k, KernelKind kind,
                                          const std::vector<cplx>& material_u, SolveStats* stats = nullptr) const {
    if (material_u.size() != body_.materials().size())
      throw DomainError("gamma_with_strengths: one strength per material required");
    if (kind == KernelKind::nonretarded || k == 0.0) {
      kind = KernelKind::nonretarded;
      k = 0.0;
    }
    std::vector<Mat3c> out(points.size());
    std::vector<std::size_t> missing;
    {
      std::lock_guard<std::mutex> lock(cache_mutex_);
      for (std::size_t p = 0; p < points.size(); ++p) {
        auto it = cache_.find(make_key(points[p], k, kind, material_u));
        if (it != cache_.end())
          out[p] = it->second;
        else
          missing.push_back(p);
      }
    }
    if (missing.empty()) return out;
    std::vector<Vec3> todo;
    for (auto p : missing) {
      body_.check_outside(points[p]);  // cached points were checked when first solved
      todo.push_back(points[p]);
    }
    const auto strengths = body_.strengths_from(material_u);
    const auto vals = compute(todo, k, kind, strengths, stats);
    std::lock_guard<std::mutex> lock(cache_mutex_);
    for (std::size_t q = 0; q < missing.size(); ++q) {
      out[missing[q]] = vals[q];
      cache_.emplace(make_key(todo[q], k, kind, material_u), vals[q]);
    }
    return out;
  }

  /// Static Gamma and its second frequency derivative with u frozen at its zero-frequency value.
  /// Central differences over real omega with the retarded kernel, Richardson-extrapolated in step^2.
  FrequencyDerivatives frequency_derivatives(const Vec3& r, int levels = 4, double k_rho_start = 0.1) const {
    if (levels < 2) throw DomainError("frequency_derivatives: need at least two Richardson levels");
    std::vector<cplx> u0(body_.materials().size());
    for (std::size_t m = 0; m < u0.size(); ++m) u0[m] = body_.materials()[m].static_born_strength();
    double rho_max = 0.0;
    for (const auto& c : body_.cells()) rho_max = std::max(rho_max, (c.center - r).norm());
    if (rho_max == 0.0) return {Mat3::Zero(), Mat3::Zero(), 0.0, 0.0};
    const Mat3c g0 = gamma_with_strengths({r}, 0.0, KernelKind::nonretarded, u0)[0];
    const double k0 = k_rho_start / rho_max;
    std::vector<std::vector<Mat3c>> T(static_cast<std::size_t>(levels));
    double step = 0.0;
    for (int l = 0; l < levels; ++l) {
      const double k = k0 / std::pow(2.0, l);
      const Mat3c gp = gamma_with_strengths({r}, k, KernelKind::retarded, u0)[0];
      const Mat3c gm = gamma_with_strengths({r}, -k, KernelKind::retarded, u0)[0];
      const double dE = k * units::hbar_c;
      if (l == 0) step = dE;
      T[l].push_back((gp - 2.0 * g0 + gm) / (dE * dE));
      for (int m = 1; m <= l; ++m) {
        const double f = std::pow(4.0, m);
        T[l].push_back((f * T[l][m - 1] - T[l - 1][m - 1]) / (f - 1.0));
      }
    }
    const Mat3c best = T.back().back();
    const Mat3c prev = T[levels - 2].back();
    const double scale = best.norm();
    const double change = scale > 0.0 ? (best - prev).norm() / scale : 0.0;
    if (change > 1e-4)
      throw ConvergenceError("frequency_derivatives: Richardson sequence not converging (relative change " +
                                 std::to_string(change) + "); adjust the finite-difference step",
                             scale, change);
    const double im = best.imag().norm();
    if (scale > 0.0 && im > 1e-6 * scale)
      throw ConvergenceError("frequency_derivatives: imaginary residue " + std::to_string(im / scale) +
                                 " relative exceeds 1e-6",
                             scale, im / scale);
    return {g0.real(), best.real(), step, change};
  }

  /// Share of Tr Gamma_0 contributed by each cell: Tr(c_i A(r - s_i) X_i) for the static problem.
  std::vector<double> static_cell_contributions(const Vec3& r) const {
    body_.check_outside(r);
    std::vector<cplx> u0(body_.materials().size());
    for (std::size_t m = 0; m < u0.size(); ++m) u0[m] = body_.materials()[m].static_born_strength();
    std::vector<double> contrib;
    compute({r}, 0.0, KernelKind::nonretarded, body_.strengths_from(u0), nullptr, &contrib);
    return contrib;
  }

  std::size_t cache_size() const {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    return cache_.size();
  }

 private:
  using Key = std::tuple<int, double, double, std::vector<double>, double, double, double>;

  static Key make_key(const Vec3& p, cplx k, KernelKind kind, const std::vector<cplx>& u) {
    std::vector<double> uu;
    for (auto v : u) {
      uu.push_back(v.real());
      uu.push_back(v.imag());
    }
    return {static_cast<int>(kind), k.real(), k.imag(), uu, p.x(), p.y(), p.z()};
  }

  std::vector<Mat3c> compute(const std::vector<Vec3>& points, cplx k, KernelKind kind, const std::vector<cplx>& strengths,
                             SolveStats* stats, std::vector<double>* contributions = nullptr) const {
    if (body_.empty()) {
      if (contributions) contributions->clear();
      return std::vector<Mat3c>(points.size(), Mat3c::Zero());
    }
    bool real = (k.real() == 0.0);
    for (const auto& s : strengths) real = real && s.imag() == 0.0 && s.real() >= 0.0;
    if (real) {
      auto r = compute_impl<double>(points, k, kind, strengths, stats, contributions);
      std::vector<Mat3c> out;
      for (const auto& m : r) out.push_back(m.cast<cplx>());
      return out;
    }
    return compute_impl<cplx>(points, k, kind, strengths, stats, contributions);
  }

  template <class Scalar>
  std::vector<Eigen::Matrix<Scalar, 3, 3>> compute_impl(const std::vector<Vec3>& points, cplx k, KernelKind kind,
                                                        const std::vector<cplx>& strengths, SolveStats* stats,
                                                        std::vector<double>* contributions) const {
    using Mat = MatX<Scalar>;
    using M3 = Eigen::Matrix<Scalar, 3, 3>;
    const CouplingOperator<Scalar> op(body_, k, kind, strengths, opt_.coupling);
    const std::size_t n = body_.size();
    const auto P = static_cast<Eigen::Index>(points.size());
    const auto& w = op.weights();
    Mat Bw(static_cast<Eigen::Index>(3 * n), 3 * P);
    for (Eigen::Index p = 0; p < P; ++p)
      for (std::size_t i = 0; i < n; ++i) {
        const Mat3c a = kernel_A(body_.cells()[i].center - points[static_cast<std::size_t>(p)], k, kind);
        M3 as;
        if constexpr (std::is_same_v<Scalar, double>)
          as = a.real();
        else
          as = a;
        Bw.block(3 * static_cast<Eigen::Index>(i), 3 * p, 3, 3) = w[i] * as;
      }
    SolveStats local;
    Mat Y;
    if (opt_.method == Method::born_series) {
      Y = series(op, Bw, local);
    } else if (n <= opt_.dense_max_cells) {
      local.dense = true;
      const Mat S = op.dense();
      Eigen::PartialPivLU<Mat> lu(S);
      const double rc = lu.rcond();
      if (!(rc > opt_.min_rcond))
        throw ConditioningError("scattering_gamma: coupling matrix numerically singular (rcond " + std::to_string(rc) + ")",
                                rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity());
      Y = lu.solve(Bw);
    } else {
      Y = Mat::Zero(Bw.rows(), Bw.cols());
      const auto res = cocg<Scalar>([&](const Mat& X, Mat& AX) { op.apply(X, AX); }, Bw, Y, opt_.krylov_tol,
                                    opt_.krylov_max_iter);
      local.iterations = res.iterations;
      local.residual = res.max_relative_residual;
    }
    if (stats) *stats = local;
    std::vector<M3> out(points.size());
    for (Eigen::Index p = 0; p < P; ++p)
      out[static_cast<std::size_t>(p)] = Bw.middleCols(3 * p, 3).transpose() * Y.middleCols(3 * p, 3);
    if (contributions) {
      contributions->assign(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const auto ii = 3 * static_cast<Eigen::Index>(i);
        const M3 blk = Bw.block(ii, 0, 3, 3).transpose() * Y.block(ii, 0, 3, 3);
        (*contributions)[i] = std::real(blk.trace());
      }
    }
    return out;
  }

  template <class Scalar>
  MatX<Scalar> series(const CouplingOperator<Scalar>& op, const MatX<Scalar>& Bw, SolveStats& st) const {
    using Mat = MatX<Scalar>;
    // Y accumulates sum_n (I - S)^n Bw so that Gamma = Bw^T Y.
    Mat v = Bw, Y = Bw, Sv;
    std::vector<double> norms;
    auto term_norm = [&](const Mat& x) { return (Bw.transpose() * x).norm(); };
    norms.push_back(term_norm(v));
    st.series_orders = 1;
    st.series_converged = false;
    for (int order = 2; order <= opt_.series_max; ++order) {
      op.apply(v, Sv);
      v = v - Sv;
      Y += v;
      const double tn = term_norm(v);
      norms.push_back(tn);
      st.series_orders = order;
      const std::size_t s = norms.size();
      if (s >= 4 && norms[s - 1] > norms[s - 2] && norms[s - 2] > norms[s - 3] && norms[s - 3] > norms[s - 4])
        throw DivergenceError("Born series divergent (term norm grew over 3 consecutive orders); use direct_solve",
                              (Bw.transpose() * Y).norm(), tn);
      if (tn <= opt_.series_tol * (Bw.transpose() * Y).norm()) {
        st.series_converged = true;
        break;
      }
    }
    return Y;
  }

  VoxelBody body_;
  SolverOptions opt_;
  mutable std::mutex cache_mutex_;
  mutable std::map<Key, Mat3c> cache_;
};

/// One-shot evaluation of Gamma at a single point.
inline GammaTensor scattering_gamma(const VoxelBody& body, const Vec3& r, cplx hw, Method method, KernelKind kind,
                                    SolverOptions opt = {}) {
  opt.method = method;
  return ScatteringSolver(body, opt).gamma(r, hw, kind);
}

}  // namespace casimir::born

#endif
