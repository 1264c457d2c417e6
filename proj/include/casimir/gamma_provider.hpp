/**
 * @file gamma_provider.hpp
 * @brief Frequency-indexed sources of the scattering Green tensor at one point.
 */
#ifndef CASIMIR_GAMMA_PROVIDER_HPP
#define CASIMIR_GAMMA_PROVIDER_HPP

#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>

#include "born/scattering.hpp"
#include "closed_forms.hpp"
#include "error.hpp"

namespace casimir {

using born::KernelKind;
using born::Mat3;
using born::Mat3c;
using born::Vec3;

class GammaProvider {
 public:
  virtual ~GammaProvider() = default;

  /// Gamma at photon energy hw (eV) with the provider's kernel; imaginary hw = i*xi for Matsubara terms.
  virtual Mat3c gamma(cplx hw) const = 0;

  /// Nonretarded-kernel Gamma with the material response taken at hw.
  virtual Mat3c gamma_nonretarded(cplx hw) const = 0;

  /// Static Gamma_0 (real).
  virtual Mat3 gamma0() const = 0;

  /// d^2 Gamma / d(hbar omega)^2 at zero frequency with the static response frozen (nm^-3 eV^-2).
  virtual Mat3 gamma0_dd() const = 0;

  virtual KernelKind kernel() const = 0;

  /// Typical particle-body distance (nm), used to scale frequency integrals.
  virtual double distance_scale() const = 0;

  /// True when only the trace of Gamma is meaningful (isotropic particles only).
  virtual bool isotropic_only() const { return false; }

  virtual std::string describe() const = 0;
};

/// Volume-solver backed provider.
class VoxelGammaProvider final : public GammaProvider {
 public:
  VoxelGammaProvider(std::shared_ptr<const born::ScatteringSolver> solver, Vec3 point, KernelKind kernel)
      : solver_(std::move(solver)), r_(point), kernel_(kernel) {
    if (!solver_) throw DomainError("VoxelGammaProvider: null solver");
    solver_->body().check_outside(r_);
    dist_ = std::numeric_limits<double>::infinity();
    for (const auto& c : solver_->body().cells()) dist_ = std::min(dist_, (c.center - r_).norm());
    if (!std::isfinite(dist_)) dist_ = 1.0;
  }

  Mat3c gamma(cplx hw) const override { return solver_->gamma(r_, hw, kernel_).value; }
  Mat3c gamma_nonretarded(cplx hw) const override { return solver_->gamma(r_, hw, KernelKind::nonretarded).value; }
  Mat3 gamma0() const override { return solver_->gamma(r_, 0.0, KernelKind::nonretarded).value.real(); }

  Mat3 gamma0_dd() const override {
    std::lock_guard<std::mutex> lock(m_);
    if (!dd_) dd_ = solver_->frequency_derivatives(r_).gamma0_dd;
    return *dd_;
  }

  KernelKind kernel() const override { return kernel_; }
  double distance_scale() const override { return dist_; }
  const Vec3& point() const { return r_; }
  const born::ScatteringSolver& solver() const { return *solver_; }

  std::string describe() const override {
    std::ostringstream os;
    os << "voxel(" << solver_->body().size() << " cells, " << born::to_string(kernel_) << ")";
    return os.str();
  }

 private:
  std::shared_ptr<const born::ScatteringSolver> solver_;
  Vec3 r_;
  KernelKind kernel_;
  double dist_;
  mutable std::mutex m_;
  mutable std::optional<Mat3> dd_;
};

/// Perfectly conducting plane at height z (image-dipole tensor, static or retarded).
class PlateGammaProvider final : public GammaProvider {
 public:
  PlateGammaProvider(double z, KernelKind kernel) : z_(z), kernel_(kernel) {
    if (!(z > 0.0)) throw DomainError("PlateGammaProvider: z must be > 0");
  }

  Mat3c gamma(cplx hw) const override {
    return kernel_ == KernelKind::retarded ? closed_forms::plate_gamma(z_, hw).value : closed_forms::plate_gamma0(z_).value;
  }
  Mat3c gamma_nonretarded(cplx) const override { return closed_forms::plate_gamma0(z_).value; }
  Mat3 gamma0() const override { return closed_forms::plate_gamma0(z_).value.real(); }

  /// Second-order term of the retarded image kernel: A ~ A_0 + k^2 (I + e e)/(8 pi rho) at rho = 2z.
  Mat3 gamma0_dd() const override {
    Mat3 g = Mat3::Zero();
    const double s = 2.0 / (16.0 * units::pi * z_ * units::hbar_c * units::hbar_c);
    g(0, 0) = -s;
    g(1, 1) = -s;
    g(2, 2) = 2.0 * s;
    return g;
  }

  KernelKind kernel() const override { return kernel_; }
  double distance_scale() const override { return z_; }
  std::string describe() const override { return std::string("plate_pec(") + born::to_string(kernel_) + ")"; }

 private:
  double z_;
  KernelKind kernel_;
};

/// Frequency-independent provider built from a static trace (perfect-conductor closed forms).
/// The tensor is represented as (Tr/3) I, which is exact for isotropic particles only.
class StaticTraceProvider final : public GammaProvider {
 public:
  StaticTraceProvider(double trace, double distance, std::string label)
      : trace_(trace), dist_(distance), label_(std::move(label)) {}

  Mat3c gamma(cplx) const override { return (trace_ / 3.0) * Mat3c::Identity(); }
  Mat3c gamma_nonretarded(cplx) const override { return gamma(0.0); }
  Mat3 gamma0() const override { return (trace_ / 3.0) * Mat3::Identity(); }
  Mat3 gamma0_dd() const override {
    throw DomainError("StaticTraceProvider: no frequency dependence available for " + label_);
  }
  KernelKind kernel() const override { return KernelKind::nonretarded; }
  double distance_scale() const override { return dist_; }
  bool isotropic_only() const override { return true; }
  std::string describe() const override { return label_; }

 private:
  double trace_;
  double dist_;
  std::string label_;
};

}  // namespace casimir

#endif
