/**
 * @file coupling_operator.hpp
 * @brief The symmetrised cell-coupling operator S = I - W T W of the voxel scattering problem.
 *
 * With cell strengths c_i = u_i V_i and W = diag(sqrt(c_i)), the system
 * (I - C) X = B with C_ij = c_j A(s_i - s_j) becomes S Y = W B with Y = W X,
 * and S is complex symmetric (real symmetric on the imaginary frequency axis).
 *
 * Lattice bodies use a table of kernels indexed by integer cell offset. Near
 * offsets take the cube-averaged static kernel (plus the point-sampled
 * retarded remainder); the product with a block of vectors is then a discrete
 * convolution and is evaluated with FFTs. Bodies without a lattice use point
 * kernels and an explicit pair sum.
 */
#ifndef CASIMIR_BORN_COUPLING_OPERATOR_HPP
#define CASIMIR_BORN_COUPLING_OPERATOR_HPP

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <type_traits>
#include <vector>

#include "../error.hpp"
#include "kernel.hpp"
#include "newell.hpp"
#include "voxel_body.hpp"

namespace casimir::born {

template <class Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

enum class MatvecMode { automatic, fft, pairwise };

struct CouplingOptions {
  bool averaged_near_field = true;  // cube-averaged static kernel for near lattice offsets
  int near_range = 6;               // max |offset|_inf (cells) that uses the averaged kernel
  MatvecMode matvec = MatvecMode::automatic;
};

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// Smallest n' >= n whose prime factors are 2, 3, 5, 7.
inline int fft_friendly(int n) {
  for (int m = std::max(n, 1);; ++m) {
    int r = m;
    for (int p : {2, 3, 5, 7})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

// Newell tensors for offsets with |d|_inf <= range, unit cell edge. Shared, computed once per range.
inline const std::vector<Eigen::Matrix3d>& newell_table(int range) {
  static std::mutex m;
  static std::map<int, std::vector<Eigen::Matrix3d>> tables;
  std::lock_guard<std::mutex> lock(m);
  auto it = tables.find(range);
  if (it != tables.end()) return it->second;
  const int n = 2 * range + 1;
  std::vector<Eigen::Matrix3d> t(static_cast<std::size_t>(n) * n * n, Eigen::Matrix3d::Zero());
  for (int a = -range; a <= range; ++a)
    for (int b = -range; b <= range; ++b)
      for (int c = -range; c <= range; ++c) {
        if (a == 0 && b == 0 && c == 0) continue;
        t[static_cast<std::size_t>(((a + range) * n + (b + range)) * n + (c + range))] = newell_tensor(a, b, c);
      }
  return tables.emplace(range, std::move(t)).first->second;
}

template <class Scalar>
Scalar cast_scalar(cplx v) {
  if constexpr (std::is_same_v<Scalar, double>)
    return v.real();
  else
    return v;
}

}  // namespace detail

/// Symmetric 3x3 stored as xx, yy, zz, xy, xz, yz.
template <class Scalar>
using Sym3 = std::array<Scalar, 6>;

template <class Scalar>
class CouplingOperator {
 public:
  using Mat = MatX<Scalar>;

  /// strengths: per-cell u_i (already including fractional fill). k in 1/nm.
  CouplingOperator(const VoxelBody& body, cplx k, KernelKind kind, const std::vector<cplx>& strengths,
                   const CouplingOptions& opt = {})
      : body_(body), k_(kind == KernelKind::nonretarded ? cplx(0.0) : k), opt_(opt) {
    const std::size_t n = body.size();
    if (strengths.size() != n) throw DomainError("CouplingOperator: strength count differs from cell count");
    w_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const cplx c = strengths[i] * body.cells()[i].volume;
      if constexpr (std::is_same_v<Scalar, double>) {
        if (c.imag() != 0.0 || c.real() < 0.0)
          throw DomainError("CouplingOperator<double>: strengths must be real and >= 0");
        w_[i] = std::sqrt(c.real());
      } else {
        w_[i] = std::sqrt(c);
      }
    }
    if constexpr (std::is_same_v<Scalar, double>) {
      if (k_.real() != 0.0) throw DomainError("CouplingOperator<double>: wavenumber must be imaginary or zero");
    }
    if (body.lattice()) build_table();
  }

  std::size_t cells() const { return w_.size(); }
  std::size_t dim() const { return 3 * w_.size(); }
  const std::vector<Scalar>& weights() const { return w_; }

  /// Kernel coupling cell i to cell j (i != j), as used by the operator.
  Eigen::Matrix<Scalar, 3, 3> coupling(std::size_t i, std::size_t j) const {
    if (body_.lattice()) {
      const auto& a = body_.lattice()->index[i];
      const auto& b = body_.lattice()->index[j];
      return expand(table_[table_index(a[0] - b[0], a[1] - b[1], a[2] - b[2])]);
    }
    const Vec3 rho = body_.cells()[i].center - body_.cells()[j].center;
    if constexpr (std::is_same_v<Scalar, double>)
      return kernel_A(rho, k_, KernelKind::retarded).real();
    else
      return kernel_A(rho, k_, KernelKind::retarded);
  }

  /// Y = S X for a block of column vectors (3N rows).
  void apply(const Mat& X, Mat& Y) const {
    if (X.rows() != static_cast<Eigen::Index>(dim())) throw DomainError("CouplingOperator::apply: size mismatch");
    Y.resize(X.rows(), X.cols());
    if (use_fft())
      apply_fft(X, Y);
    else
      apply_pairwise(X, Y);
  }

  /// Dense S (3N x 3N).
  Mat dense() const {
    const std::size_t n = cells();
    Mat S = Mat::Identity(static_cast<Eigen::Index>(dim()), static_cast<Eigen::Index>(dim()));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const Eigen::Matrix<Scalar, 3, 3> blk = -(w_[i] * w_[j]) * coupling(i, j);
        S.template block<3, 3>(3 * static_cast<Eigen::Index>(i), 3 * static_cast<Eigen::Index>(j)) = blk;
        S.template block<3, 3>(3 * static_cast<Eigen::Index>(j), 3 * static_cast<Eigen::Index>(i)) = blk.transpose();
      }
    return S;
  }

  bool use_fft() const {
    if (!body_.lattice()) return false;
    if (opt_.matvec == MatvecMode::fft) return true;
    if (opt_.matvec == MatvecMode::pairwise) return false;
    return cells() > 400;
  }

 private:
  std::size_t table_index(int dx, int dy, int dz) const {
    return static_cast<std::size_t>(((dx + ext_[0]) * (2 * ext_[1] + 1) + (dy + ext_[1])) * (2 * ext_[2] + 1) +
                                    (dz + ext_[2]));
  }

  static Eigen::Matrix<Scalar, 3, 3> expand(const Sym3<Scalar>& s) {
    Eigen::Matrix<Scalar, 3, 3> m;
    m << s[0], s[3], s[4], s[3], s[1], s[5], s[4], s[5], s[2];
    return m;
  }

  void build_table() {
    const Lattice& lat = *body_.lattice();
    for (int a = 0; a < 3; ++a) ext_[a] = lat.dims[a] - 1;
    table_.assign(static_cast<std::size_t>(2 * ext_[0] + 1) * (2 * ext_[1] + 1) * (2 * ext_[2] + 1),
                  Sym3<Scalar>{});
    const int range = opt_.averaged_near_field ? opt_.near_range : -1;
    const auto* near = range >= 0 ? &detail::newell_table(range) : nullptr;
    const int nn = 2 * range + 1;
    const double h = lat.h, h3 = h * h * h;
    for (int a = -ext_[0]; a <= ext_[0]; ++a)
      for (int b = -ext_[1]; b <= ext_[1]; ++b)
        for (int c = -ext_[2]; c <= ext_[2]; ++c) {
          if (a == 0 && b == 0 && c == 0) continue;
          const Vec3 rho = h * Vec3(a, b, c);
          Eigen::Matrix3cd m;
          if (range >= 0 && std::abs(a) <= range && std::abs(b) <= range && std::abs(c) <= range)
            m = (-(*near)[static_cast<std::size_t>(((a + range) * nn + (b + range)) * nn + (c + range))] / h3)
                    .cast<cplx>();
          else
            m = static_kernel(rho).cast<cplx>();
          if (k_ != 0.0) m += retarded_remainder(rho, k_);
          auto& t = table_[table_index(a, b, c)];
          t = {detail::cast_scalar<Scalar>(m(0, 0)), detail::cast_scalar<Scalar>(m(1, 1)),
               detail::cast_scalar<Scalar>(m(2, 2)), detail::cast_scalar<Scalar>(m(0, 1)),
               detail::cast_scalar<Scalar>(m(0, 2)), detail::cast_scalar<Scalar>(m(1, 2))};
        }
  }

  void apply_pairwise(const Mat& X, Mat& Y) const {
    const std::size_t n = cells();
    const Eigen::Index R = X.cols();
    // Z = W X
    Mat Z(X.rows(), R);
    for (std::size_t i = 0; i < n; ++i) Z.middleRows(3 * static_cast<Eigen::Index>(i), 3) = w_[i] * X.middleRows(3 * static_cast<Eigen::Index>(i), 3);
    Mat acc = Mat::Zero(X.rows(), R);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const Eigen::Matrix<Scalar, 3, 3> t = coupling(i, j);
        const auto ii = 3 * static_cast<Eigen::Index>(i), jj = 3 * static_cast<Eigen::Index>(j);
        acc.middleRows(ii, 3).noalias() += t * Z.middleRows(jj, 3);
        acc.middleRows(jj, 3).noalias() += t * Z.middleRows(ii, 3);
      }
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = 3 * static_cast<Eigen::Index>(i);
      Y.middleRows(ii, 3) = X.middleRows(ii, 3) - w_[i] * acc.middleRows(ii, 3);
    }
  }

  struct FftPlan {
    std::array<int, 3> dims{};
    std::size_t size = 0;
    fftw_plan forward = nullptr, backward = nullptr;
    std::array<std::vector<cplx>, 6> kernel_hat;
    ~FftPlan() {
      std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
      if (forward) fftw_destroy_plan(forward);
      if (backward) fftw_destroy_plan(backward);
    }
  };

  void ensure_fft() const {
    std::call_once(fft_once_, [this] {
      auto plan = std::make_shared<FftPlan>();
      const Lattice& lat = *body_.lattice();
      for (int a = 0; a < 3; ++a) plan->dims[a] = detail::fft_friendly(2 * lat.dims[a] - 1);
      plan->size = static_cast<std::size_t>(plan->dims[0]) * plan->dims[1] * plan->dims[2];
      std::vector<cplx> buf(plan->size);
      auto* p = reinterpret_cast<fftw_complex*>(buf.data());
      {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        plan->forward = fftw_plan_dft_3d(plan->dims[0], plan->dims[1], plan->dims[2], p, p, FFTW_FORWARD, FFTW_ESTIMATE);
        plan->backward = fftw_plan_dft_3d(plan->dims[0], plan->dims[1], plan->dims[2], p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
      }
      if (!plan->forward || !plan->backward) throw ResourceError("CouplingOperator: FFT planning failed");
      auto& kh = plan->kernel_hat;
      const auto& D = plan->dims;
      for (int comp = 0; comp < 6; ++comp) {
        kh[comp].assign(plan->size, cplx(0.0));
        for (int a = -ext_[0]; a <= ext_[0]; ++a)
          for (int b = -ext_[1]; b <= ext_[1]; ++b)
            for (int c = -ext_[2]; c <= ext_[2]; ++c) {
              const int ia = (a + D[0]) % D[0], ib = (b + D[1]) % D[1], ic = (c + D[2]) % D[2];
              kh[comp][static_cast<std::size_t>((ia * D[1] + ib) * D[2] + ic)] =
                  cplx(table_[table_index(a, b, c)][comp]);
            }
        fftw_execute_dft(plan->forward, reinterpret_cast<fftw_complex*>(kh[comp].data()),
                         reinterpret_cast<fftw_complex*>(kh[comp].data()));
      }
      fft_ = std::move(plan);
    });
  }

  void apply_fft(const Mat& X, Mat& Y) const {
    ensure_fft();
    const FftPlan& P = *fft_;
    const auto& D = P.dims;
    const auto& idx = body_.lattice()->index;
    const std::size_t n = cells();
    const auto& kh = P.kernel_hat;
    std::array<std::vector<cplx>, 3> g;
    for (auto& v : g) v.resize(P.size);
    std::vector<std::size_t> pos(n);
    for (std::size_t i = 0; i < n; ++i)
      pos[i] = static_cast<std::size_t>((idx[i][0] * D[1] + idx[i][1]) * D[2] + idx[i][2]);
    const double scale = 1.0 / static_cast<double>(P.size);
    for (Eigen::Index col = 0; col < X.cols(); ++col) {
      for (auto& v : g) std::fill(v.begin(), v.end(), cplx(0.0));
      for (std::size_t i = 0; i < n; ++i)
        for (int a = 0; a < 3; ++a) g[a][pos[i]] = cplx(w_[i] * X(3 * static_cast<Eigen::Index>(i) + a, col));
      for (auto& v : g)
        fftw_execute_dft(P.forward, reinterpret_cast<fftw_complex*>(v.data()), reinterpret_cast<fftw_complex*>(v.data()));
      for (std::size_t q = 0; q < P.size; ++q) {
        const cplx x = g[0][q], y = g[1][q], z = g[2][q];
        g[0][q] = kh[0][q] * x + kh[3][q] * y + kh[4][q] * z;
        g[1][q] = kh[3][q] * x + kh[1][q] * y + kh[5][q] * z;
        g[2][q] = kh[4][q] * x + kh[5][q] * y + kh[2][q] * z;
      }
      for (auto& v : g)
        fftw_execute_dft(P.backward, reinterpret_cast<fftw_complex*>(v.data()), reinterpret_cast<fftw_complex*>(v.data()));
      for (std::size_t i = 0; i < n; ++i)
        for (int a = 0; a < 3; ++a) {
          const auto r = 3 * static_cast<Eigen::Index>(i) + a;
          Y(r, col) = X(r, col) - w_[i] * detail::cast_scalar<Scalar>(g[a][pos[i]] * scale);
        }
    }
  }

  const VoxelBody& body_;
  cplx k_;
  CouplingOptions opt_;
  std::vector<Scalar> w_;
  std::array<int, 3> ext_{};
  std::vector<Sym3<Scalar>> table_;
  mutable std::once_flag fft_once_;
  mutable std::shared_ptr<FftPlan> fft_;
};

}  // namespace casimir::born

#endif
