/**
 * @file voxel_body.hpp
 * @brief Shapes, signed distances and voxelization into cubic cells.
 */
#ifndef CASIMIR_BORN_VOXEL_BODY_HPP
#define CASIMIR_BORN_VOXEL_BODY_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "../error.hpp"
#include "../materials.hpp"
#include "kernel.hpp"

namespace casimir::born {

struct SphereShape {
  double radius;
};

/// Hollow cylinder along z, centred at the origin.
struct AnnularCylinderShape {
  double inner_radius;
  double outer_radius;
  double length;
};

/// Rectangular slab occupying -thickness <= z <= 0 and |x|, |y| <= lateral/2.
/// The top face z = 0 stands in for a half-space surface.
struct HalfSpaceSlabShape {
  double thickness;
  double lateral;
};

struct UnionShape;

using Shape = std::variant<SphereShape, AnnularCylinderShape, HalfSpaceSlabShape, std::shared_ptr<UnionShape>>;

struct UnionPart {
  Shape shape;
  Vec3 center = Vec3::Zero();
};

struct UnionShape {
  std::vector<UnionPart> parts;
};

struct Box {
  Vec3 lo, hi;
};

namespace detail {

inline double box_sdf(const Vec3& p, const Vec3& half) {
  const Vec3 d = p.cwiseAbs() - half;
  return d.cwiseMax(0.0).norm() + std::min(d.maxCoeff(), 0.0);
}

}  // namespace detail

/// Signed distance (nm), negative inside.
inline double signed_distance(const Shape& s, const Vec3& p) {
  if (auto sp = std::get_if<SphereShape>(&s)) return p.norm() - sp->radius;
  if (auto c = std::get_if<AnnularCylinderShape>(&s)) {
    const double q = std::hypot(p.x(), p.y());
    const double dr = std::max(c->inner_radius - q, q - c->outer_radius);
    const double dz = std::abs(p.z()) - 0.5 * c->length;
    const double ox = std::max(dr, 0.0), oz = std::max(dz, 0.0);
    return std::hypot(ox, oz) + std::min(std::max(dr, dz), 0.0);
  }
  if (auto sl = std::get_if<HalfSpaceSlabShape>(&s)) {
    const Vec3 half(0.5 * sl->lateral, 0.5 * sl->lateral, 0.5 * sl->thickness);
    return detail::box_sdf(p - Vec3(0.0, 0.0, -0.5 * sl->thickness), half);
  }
  const auto& u = *std::get<std::shared_ptr<UnionShape>>(s);
  double d = std::numeric_limits<double>::infinity();
  for (const auto& part : u.parts) d = std::min(d, signed_distance(part.shape, p - part.center));
  return d;
}

inline bool inside(const Shape& s, const Vec3& p) { return signed_distance(s, p) < 0.0; }

inline Box bounding_box(const Shape& s) {
  if (auto sp = std::get_if<SphereShape>(&s)) return {Vec3::Constant(-sp->radius), Vec3::Constant(sp->radius)};
  if (auto c = std::get_if<AnnularCylinderShape>(&s)) {
    const double R = c->outer_radius, h = 0.5 * c->length;
    return {Vec3(-R, -R, -h), Vec3(R, R, h)};
  }
  if (auto sl = std::get_if<HalfSpaceSlabShape>(&s)) {
    const double w = 0.5 * sl->lateral;
    return {Vec3(-w, -w, -sl->thickness), Vec3(w, w, 0.0)};
  }
  const auto& u = *std::get<std::shared_ptr<UnionShape>>(s);
  if (u.parts.empty()) throw DomainError("union shape has no parts");
  Box b{Vec3::Constant(std::numeric_limits<double>::infinity()), Vec3::Constant(-std::numeric_limits<double>::infinity())};
  for (const auto& part : u.parts) {
    const Box pb = bounding_box(part.shape);
    b.lo = b.lo.cwiseMin(pb.lo + part.center);
    b.hi = b.hi.cwiseMax(pb.hi + part.center);
  }
  return b;
}

inline double analytic_volume(const Shape& s) {
  if (auto sp = std::get_if<SphereShape>(&s)) return 4.0 / 3.0 * units::pi * std::pow(sp->radius, 3);
  if (auto c = std::get_if<AnnularCylinderShape>(&s))
    return units::pi * (c->outer_radius * c->outer_radius - c->inner_radius * c->inner_radius) * c->length;
  if (auto sl = std::get_if<HalfSpaceSlabShape>(&s)) return sl->lateral * sl->lateral * sl->thickness;
  double v = 0.0;  // parts assumed disjoint
  for (const auto& part : std::get<std::shared_ptr<UnionShape>>(s)->parts) v += analytic_volume(part.shape);
  return v;
}

/// Size that "resolution" counts cells across: sphere and cylinder diameter, slab thickness,
/// union bounding-box maximum extent.
inline double reference_length(const Shape& s) {
  if (auto sp = std::get_if<SphereShape>(&s)) return 2.0 * sp->radius;
  if (auto c = std::get_if<AnnularCylinderShape>(&s)) return 2.0 * c->outer_radius;
  if (auto sl = std::get_if<HalfSpaceSlabShape>(&s)) return sl->thickness;
  const Box b = bounding_box(s);
  return (b.hi - b.lo).maxCoeff();
}

inline void validate_shape(const Shape& s) {
  if (auto sp = std::get_if<SphereShape>(&s)) {
    if (!(sp->radius > 0.0)) throw DomainError("sphere: radius must be > 0");
  } else if (auto c = std::get_if<AnnularCylinderShape>(&s)) {
    if (!(c->inner_radius >= 0.0) || !(c->outer_radius > c->inner_radius) || !(c->length > 0.0))
      throw DomainError("annular_cylinder: need 0 <= inner_radius < outer_radius and length > 0");
  } else if (auto sl = std::get_if<HalfSpaceSlabShape>(&s)) {
    if (!(sl->thickness > 0.0) || !(sl->lateral > 0.0))
      throw DomainError("half_space_slab: thickness and lateral extent must be > 0");
  } else {
    const auto& u = std::get<std::shared_ptr<UnionShape>>(s);
    if (!u || u->parts.empty()) throw DomainError("union: needs at least one part");
    for (const auto& p : u->parts) validate_shape(p.shape);
  }
}

struct Cell {
  Vec3 center;
  double volume;   // full cube volume h^3
  double fill;     // occupied fraction of the cube in (0, 1]
  int material;    // index into VoxelBody::materials
};

/// Integer lattice description shared by all cells of a voxelized body.
struct Lattice {
  double h;
  Vec3 origin;                      // center of cell (0, 0, 0)
  std::array<int, 3> dims;          // cells per axis of the bounding grid
  std::vector<std::array<int, 3>> index;  // per-cell lattice index, 0 <= index < dims
};

enum class FillRule {
  center,    // cell kept iff its centre is inside; fill = 1
  harmonic,  // boundary cells get fractional fill, combined with the material by 1/eps averaging
};

class VoxelBody {
 public:
  VoxelBody() = default;

  /// Arbitrary (non-lattice) body from explicit cells; solved with point kernels.
  VoxelBody(std::vector<Cell> cells, std::vector<Material> materials, std::string label = "cells")
      : cells_(std::move(cells)), materials_(std::move(materials)), label_(std::move(label)) {
    for (const auto& c : cells_) {
      if (!(c.volume > 0.0)) throw DomainError("VoxelBody: cell volumes must be > 0");
      if (!(c.fill > 0.0 && c.fill <= 1.0)) throw DomainError("VoxelBody: cell fill must be in (0, 1]");
      if (c.material < 0 || c.material >= static_cast<int>(materials_.size()))
        throw DomainError("VoxelBody: cell material index out of range");
    }
    for (std::size_t i = 0; i < cells_.size(); ++i)
      for (std::size_t j = i + 1; j < cells_.size(); ++j)
        if ((cells_[i].center - cells_[j].center).norm() == 0.0)
          throw DomainError("VoxelBody: two cells share a centre");
  }

  VoxelBody(std::vector<Cell> cells, std::vector<Material> materials, Lattice lattice, std::string label)
      : cells_(std::move(cells)), materials_(std::move(materials)), lattice_(std::move(lattice)), label_(std::move(label)) {}

  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<Material>& materials() const { return materials_; }
  const std::optional<Lattice>& lattice() const { return lattice_; }
  const std::string& label() const { return label_; }
  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }

  /// Sum of fill * volume.
  double occupied_volume() const {
    double v = 0.0;
    for (const auto& c : cells_) v += c.fill * c.volume;
    return v;
  }

  /// Born strength of each cell at frequency hw, including fractional-fill averaging.
  std::vector<cplx> strengths(cplx hw) const {
    std::vector<cplx> mat_u(materials_.size());
    for (std::size_t m = 0; m < materials_.size(); ++m)
      mat_u[m] = hw == 0.0 ? materials_[m].static_born_strength() : materials_[m].born_strength(hw);
    return strengths_from(mat_u);
  }

  /// Cell strengths from per-material u values.
  std::vector<cplx> strengths_from(const std::vector<cplx>& material_u) const {
    std::vector<cplx> out(cells_.size());
    for (std::size_t i = 0; i < cells_.size(); ++i)
      out[i] = filled_strength(material_u[static_cast<std::size_t>(cells_[i].material)], cells_[i].fill);
    return out;
  }

  /// u of a cell filled to fraction f with a material of strength u, using
  /// 1/eps_eff = f/eps + (1 - f) and eps = (3 + 2u)/(3 - u).
  static cplx filled_strength(cplx u, double f) {
    if (f >= 1.0) return u;
    const cplx inv_eps = (3.0 - u) / (3.0 + 2.0 * u);
    const cplx a = f * inv_eps + (1.0 - f);
    return 3.0 * (1.0 - a) / (1.0 + 2.0 * a);
  }

  /// Throws DomainError if r lies inside (or on) any cell cube.
  void check_outside(const Vec3& r) const {
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      const double half = 0.5 * std::cbrt(cells_[i].volume);
      if (((r - cells_[i].center).cwiseAbs().array() <= half).all()) {
        std::ostringstream os;
        os << "evaluation point (" << r.x() << ", " << r.y() << ", " << r.z() << ") nm lies inside body cell " << i;
        throw DomainError(os.str());
      }
    }
  }

  /// Order-independent digest of geometry and materials, for caching and output metadata.
  std::uint64_t hash() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](const void* p, std::size_t n) {
      const auto* b = static_cast<const unsigned char*>(p);
      for (std::size_t i = 0; i < n; ++i) {
        h ^= b[i];
        h *= 1099511628211ull;
      }
    };
    for (const auto& c : cells_) {
      mix(c.center.data(), sizeof(double) * 3);
      mix(&c.volume, sizeof(double));
      mix(&c.fill, sizeof(double));
      mix(&c.material, sizeof(int));
    }
    for (const auto& m : materials_) {
      const std::string d = m.describe();
      mix(d.data(), d.size());
    }
    return h;
  }

 private:
  std::vector<Cell> cells_;
  std::vector<Material> materials_;
  std::optional<Lattice> lattice_;
  std::string label_;
};

struct VoxelizeOptions {
  FillRule fill = FillRule::harmonic;
  int subsamples = 8;            // per axis, for boundary-cell fill fractions
  std::size_t max_cells = 20000;
  double cell_nm = 0.0;          // overrides the resolution-derived cell edge when > 0
};

/// Cubic cells on a grid centred on the shape's bounding box.
inline VoxelBody voxelize(const Shape& shape, int resolution, const Material& material,
                          const VoxelizeOptions& opt = {}) {
  validate_shape(shape);
  if (resolution < 4) throw DomainError("voxelize: resolution must be >= 4");
  if (opt.subsamples < 1) throw DomainError("voxelize: subsamples must be >= 1");
  const double h = opt.cell_nm > 0.0 ? opt.cell_nm : reference_length(shape) / resolution;
  const Box box = bounding_box(shape);
  const Vec3 mid = 0.5 * (box.lo + box.hi);
  std::array<int, 3> dims{};
  Vec3 origin;
  double grid_cells = 1.0;
  for (int a = 0; a < 3; ++a) {
    dims[a] = std::max(1, static_cast<int>(std::ceil((box.hi[a] - box.lo[a]) / h - 1e-9)));
    origin[a] = mid[a] - 0.5 * (dims[a] - 1) * h;
    grid_cells *= dims[a];
  }
  if (grid_cells > 50.0 * static_cast<double>(opt.max_cells) + 1e6)
    throw ResourceError("voxelize: bounding grid far exceeds the cell limit; coarsen the resolution");

  const double reach = 0.5 * std::sqrt(3.0) * h;
  std::vector<Cell> cells;
  Lattice lat{h, origin, dims, {}};
  const int sub = opt.subsamples;
  for (int i = 0; i < dims[0]; ++i)
    for (int j = 0; j < dims[1]; ++j)
      for (int k = 0; k < dims[2]; ++k) {
        const Vec3 c = origin + h * Vec3(i, j, k);
        const double sd = signed_distance(shape, c);
        double f;
        if (opt.fill == FillRule::center) {
          if (!(sd < 0.0)) continue;
          f = 1.0;
        } else if (sd <= -reach) {
          f = 1.0;
        } else if (sd >= reach) {
          continue;
        } else {
          int count = 0;
          for (int a = 0; a < sub; ++a)
            for (int b = 0; b < sub; ++b)
              for (int d = 0; d < sub; ++d) {
                const Vec3 q = c + h * Vec3((a + 0.5) / sub - 0.5, (b + 0.5) / sub - 0.5, (d + 0.5) / sub - 0.5);
                if (signed_distance(shape, q) < 0.0) ++count;
              }
          if (count == 0) continue;
          f = static_cast<double>(count) / (sub * sub * sub);
        }
        cells.push_back({c, h * h * h, f, 0});
        lat.index.push_back({i, j, k});
        if (cells.size() > opt.max_cells)
          throw ResourceError("voxelize: more than " + std::to_string(opt.max_cells) +
                              " cells; lower the resolution or raise the cell limit");
      }
  return VoxelBody(std::move(cells), {material}, std::move(lat), "voxelized");
}

}  // namespace casimir::born

#endif
