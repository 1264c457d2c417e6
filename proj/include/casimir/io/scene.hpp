/**
 * @file scene.hpp
 * @brief Scene description: particle, body, material, evaluation points, thermal and numerical settings.
 */
#ifndef CASIMIR_IO_SCENE_HPP
#define CASIMIR_IO_SCENE_HPP

#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "../born/scattering.hpp"
#include "../closed_forms.hpp"
#include "../criteria.hpp"
#include "../gamma_provider.hpp"
#include "../materials.hpp"
#include "../thermal.hpp"
#include "kv_parser.hpp"

namespace casimir::io {

enum class GeometryKind { sphere, annular_cylinder, slab, union_of, plate };

inline const char* to_string(GeometryKind g) {
  switch (g) {
    case GeometryKind::sphere: return "sphere";
    case GeometryKind::annular_cylinder: return "annular_cylinder";
    case GeometryKind::slab: return "slab";
    case GeometryKind::union_of: return "union";
    default: return "plate";
  }
}

inline ThermalContext default_thermal() {
  ThermalContext c;
  c.T = 300.0;
  return c;
}

struct Scene {
  std::string source = "<string>";
  std::string hash;  // FNV-1a of the scene text, hex

  Particle particle;

  GeometryKind geometry = GeometryKind::sphere;
  born::Shape shape = born::SphereShape{1.0};
  int resolution = 16;
  born::VoxelizeOptions voxelize;
  double plate_height_nm = 0.0;  // plate geometry: evaluation uses the point's z

  Material material = Material::perfect_conductor();

  std::vector<Vec3> points;
  std::optional<double> kr_length_nm;  // length l in the kr sweep (k l = kr); default |r|

  ThermalContext thermal = default_thermal();
  born::SolverOptions solver;
  KernelKind kernel = KernelKind::retarded;
  closed_forms::AzimuthalSum m_sum = closed_forms::AzimuthalSum::half_weight_zero;

  std::optional<double> q_factor;
  double extent_fraction = 0.01;
  criteria::Thresholds thresholds;

  /// Body cells for voxel geometries (throws for the analytic plate).
  born::VoxelBody build_body() const {
    if (geometry == GeometryKind::plate) throw DomainError("scene: the plate geometry is analytic and has no cells");
    return born::voxelize(shape, resolution, material, voxelize);
  }

  /// Length scale of the kr sweep at point index i.
  double kr_length(std::size_t i = 0) const {
    if (kr_length_nm) return *kr_length_nm;
    if (geometry == GeometryKind::plate) return points.at(i).z();
    return points.at(i).norm();
  }
};

namespace detail {

inline std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Typed access to one section; records which keys were read so the rest can be rejected.
class Section {
 public:
  Section(const KvDocument& doc, const Json& node, std::string path) : doc_(doc), node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail(path_, "expected a section/table");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  [[noreturn]] void fail(const std::string& key_path, const std::string& msg) const {
    throw ValidationError(doc_.where(key_path) + ": [" + path_ + "] " + msg);
  }

  const Json& raw(const std::string& key) {
    used_.insert(key);
    if (!node_.contains(key)) fail(path_, "missing required key '" + key + "'");
    return node_.at(key);
  }

  double number(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_number()) fail(full(key), "'" + key + "' must be a number");
    return v.get<double>();
  }
  double number(const std::string& key, double def) { return has(key) ? number(key) : (used_.insert(key), def); }

  long integer(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_number_integer()) fail(full(key), "'" + key + "' must be an integer");
    return v.get<long>();
  }
  long integer(const std::string& key, long def) { return has(key) ? integer(key) : (used_.insert(key), def); }

  std::string string(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_string()) fail(full(key), "'" + key + "' must be a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& def) {
    return has(key) ? string(key) : (used_.insert(key), def);
  }

  bool boolean(const std::string& key, bool def) {
    if (!has(key)) return def;
    const Json& v = raw(key);
    if (!v.is_boolean()) fail(full(key), "'" + key + "' must be true or false");
    return v.get<bool>();
  }

  Vec3 vec3(const std::string& key) { return to_vec3(raw(key), key); }

  Vec3 to_vec3(const Json& v, const std::string& key) const {
    if (!v.is_array() || v.size() != 3) fail(full(key), "'" + key + "' must be a 3-element array [x, y, z]");
    Vec3 out;
    for (int i = 0; i < 3; ++i) {
      if (!v[static_cast<std::size_t>(i)].is_number()) fail(full(key), "'" + key + "' entries must be numbers");
      out[i] = v[static_cast<std::size_t>(i)].get<double>();
    }
    return out;
  }

  /// Reject any key that was never read.
  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it)
      if (!used_.count(it.key())) fail(full(it.key()), "unknown key '" + it.key() + "'");
  }

  std::string full(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  const std::string& path() const { return path_; }
  const KvDocument& doc() const { return doc_; }

 private:
  const KvDocument& doc_;
  const Json& node_;
  std::string path_;
  std::set<std::string> used_;
};

template <class Fn>
auto checked(const Section& s, const std::string& key, Fn&& fn) {
  try {
    return fn();
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    s.fail(s.full(key), e.what());
  }
}

inline born::Shape parse_shape(Section& g, const std::string& kind, GeometryKind& out_kind) {
  if (kind == "sphere") {
    out_kind = GeometryKind::sphere;
    return born::SphereShape{g.number("radius_nm")};
  }
  if (kind == "annular_cylinder") {
    out_kind = GeometryKind::annular_cylinder;
    return born::AnnularCylinderShape{g.number("inner_radius_nm"), g.number("outer_radius_nm"), g.number("length_nm")};
  }
  if (kind == "slab") {
    out_kind = GeometryKind::slab;
    return born::HalfSpaceSlabShape{g.number("thickness_nm"), g.number("lateral_nm")};
  }
  g.fail(g.full("shape"), "unknown shape '" + kind + "' (sphere, annular_cylinder, slab, union, plate)");
}

inline void parse_particle(Section s, Scene& sc) {
  sc.particle.label = s.string("label", "particle");
  const Json& tr = s.raw("transitions");
  if (!tr.is_array() || tr.empty()) s.fail(s.full("transitions"), "'transitions' must be a non-empty array of tables");
  for (std::size_t i = 0; i < tr.size(); ++i) {
    Section t(s.doc(), tr[i], s.full("transitions"));
    const double w = t.number("omega_ev");
    const bool iso = t.boolean("isotropic", true);
    Transition x;
    try {
      if (iso) {
        x = Transition::isotropic_dipole(w, t.number("d2_debye2"));
      } else {
        const Vec3 re = t.vec3("dipole_debye");
        Vec3 im = Vec3::Zero();
        if (t.has("dipole_imag_debye")) im = t.vec3("dipole_imag_debye");
        Eigen::Vector3cd d;
        for (int k = 0; k < 3; ++k) d[k] = cplx(re[k], im[k]);
        x = Transition::from_dipole(w, d);
      }
    } catch (const DomainError& e) {
      t.fail(s.full("transitions"), "transition " + std::to_string(i) + ": " + e.what());
    }
    t.finish();
    sc.particle.transitions.push_back(x);
  }
  s.finish();
}

inline void parse_geometry(Section s, Scene& sc) {
  const std::string kind = s.string("shape");
  if (kind == "plate") {
    sc.geometry = GeometryKind::plate;
  } else if (kind == "union") {
    sc.geometry = GeometryKind::union_of;
    auto u = std::make_shared<born::UnionShape>();
    const Json& parts = s.raw("parts");
    if (!parts.is_array() || parts.empty()) s.fail(s.full("parts"), "'parts' must be a non-empty array of tables");
    for (const auto& pj : parts) {
      Section p(s.doc(), pj, s.full("parts"));
      GeometryKind pk;
      born::UnionPart part{parse_shape(p, p.string("shape"), pk), Vec3::Zero()};
      if (p.has("center_nm")) part.center = p.vec3("center_nm");
      p.finish();
      u->parts.push_back(part);
    }
    sc.shape = u;
  } else {
    sc.shape = parse_shape(s, kind, sc.geometry);
  }
  if (sc.geometry != GeometryKind::plate) {
    checked(s, "shape", [&] {
      born::validate_shape(sc.shape);
      return 0;
    });
    sc.resolution = static_cast<int>(s.integer("resolution", 16));
    if (sc.resolution < 2) s.fail(s.full("resolution"), "'resolution' must be >= 2");
    const std::string fill = s.string("fill", "harmonic");
    if (fill == "harmonic") sc.voxelize.fill = born::FillRule::harmonic;
    else if (fill == "center") sc.voxelize.fill = born::FillRule::center;
    else s.fail(s.full("fill"), "'fill' must be 'harmonic' or 'center'");
    sc.voxelize.subsamples = static_cast<int>(s.integer("subsamples", 8));
    if (sc.voxelize.subsamples < 1) s.fail(s.full("subsamples"), "'subsamples' must be >= 1");
    const long mc = s.integer("max_cells", 20000);
    if (mc < 1) s.fail(s.full("max_cells"), "'max_cells' must be >= 1");
    sc.voxelize.max_cells = static_cast<std::size_t>(mc);
    sc.voxelize.cell_nm = s.number("cell_nm", 0.0);
    if (sc.voxelize.cell_nm < 0.0) s.fail(s.full("cell_nm"), "'cell_nm' must be >= 0");
  }
  s.finish();
}

inline void parse_material(Section s, Scene& sc, const std::filesystem::path& base) {
  const std::string kind = s.string("kind");
  if (kind == "pec") {
    sc.material = Material::perfect_conductor();
  } else if (kind == "drude") {
    const double wp = s.number("plasma_ev");
    const double g = s.number("gamma_ev");
    sc.material = checked(s, "kind", [&] { return Material::drude(wp, g); });
  } else if (kind == "table") {
    std::filesystem::path p = s.string("path");
    if (p.is_relative()) p = base / p;
    if (!std::filesystem::exists(p)) s.fail(s.full("path"), "table file '" + p.string() + "' does not exist");
    sc.material = checked(s, "path", [&] { return load_permittivity_table(p.string()); });
  } else {
    s.fail(s.full("kind"), "unknown material kind '" + kind + "' (pec, drude, table)");
  }
  s.finish();
}

inline void parse_evaluation(Section s, Scene& sc) {
  if (s.has("points_nm")) {
    const Json& pts = s.raw("points_nm");
    if (!pts.is_array() || pts.empty()) s.fail(s.full("points_nm"), "'points_nm' must be a non-empty array of [x, y, z]");
    for (const auto& p : pts) sc.points.push_back(s.to_vec3(p, "points_nm"));
  }
  if (s.has("radial")) {
    Section r(s.doc(), s.raw("radial"), s.full("radial"));
    Vec3 dir = r.has("direction") ? r.vec3("direction") : Vec3(0, 0, 1);
    if (!(dir.norm() > 0.0)) r.fail(s.full("radial"), "'direction' must be non-zero");
    dir.normalize();
    const double a = r.number("start_nm"), b = r.number("stop_nm");
    const long n = r.integer("count");
    if (n < 1) r.fail(s.full("radial"), "'count' must be >= 1");
    if (!(a > 0.0 && b >= a)) r.fail(s.full("radial"), "need 0 < start_nm <= stop_nm");
    for (long i = 0; i < n; ++i) sc.points.push_back(dir * (n == 1 ? a : a + (b - a) * static_cast<double>(i) / (n - 1)));
    r.finish();
  }
  if (sc.points.empty()) s.fail(s.path(), "give 'points_nm' or 'radial'");
  if (s.has("kr_length_nm")) {
    sc.kr_length_nm = s.number("kr_length_nm");
    if (!(*sc.kr_length_nm > 0.0)) s.fail(s.full("kr_length_nm"), "'kr_length_nm' must be > 0");
  }
  s.finish();
}

inline void parse_thermal(Section s, Scene& sc) {
  sc.thermal.T = s.number("temperature_k", 300.0);
  if (!(sc.thermal.T >= 0.0)) s.fail(s.full("temperature_k"), "'temperature_k' must be >= 0");
  sc.thermal.matsubara.rel_tail_tol = s.number("matsubara_tail_tol", sc.thermal.matsubara.rel_tail_tol);
  if (!(sc.thermal.matsubara.rel_tail_tol > 0.0)) s.fail(s.full("matsubara_tail_tol"), "'matsubara_tail_tol' must be > 0");
  sc.thermal.matsubara.j_max = s.integer("j_max", sc.thermal.matsubara.j_max);
  if (sc.thermal.matsubara.j_max < 1) s.fail(s.full("j_max"), "'j_max' must be >= 1");
  const std::string tail = s.string("tail", "power_law");
  if (tail == "power_law") sc.thermal.matsubara.tail_estimate = numerics::TailEstimate::power_law;
  else if (tail == "none") sc.thermal.matsubara.tail_estimate = numerics::TailEstimate::none;
  else s.fail(s.full("tail"), "'tail' must be 'power_law' or 'none'");
  sc.thermal.quad.rel_tol = s.number("integral_rel_tol", sc.thermal.quad.rel_tol);
  if (!(sc.thermal.quad.rel_tol > 0.0)) s.fail(s.full("integral_rel_tol"), "'integral_rel_tol' must be > 0");
  s.finish();
}

inline void parse_numerics(Section s, Scene& sc) {
  const std::string method = s.string("method", "solve");
  if (method == "solve") sc.solver.method = born::Method::direct_solve;
  else if (method == "born") sc.solver.method = born::Method::born_series;
  else s.fail(s.full("method"), "'method' must be 'solve' or 'born'");
  const std::string kernel = s.string("kernel", "retarded");
  if (kernel == "retarded") sc.kernel = KernelKind::retarded;
  else if (kernel == "nonretarded") sc.kernel = KernelKind::nonretarded;
  else s.fail(s.full("kernel"), "'kernel' must be 'retarded' or 'nonretarded'");
  sc.solver.krylov_tol = s.number("rel_tol", sc.solver.krylov_tol);
  if (!(sc.solver.krylov_tol > 0.0)) s.fail(s.full("rel_tol"), "'rel_tol' must be > 0");
  sc.solver.series_max = static_cast<int>(s.integer("series_max", sc.solver.series_max));
  if (sc.solver.series_max < 1) s.fail(s.full("series_max"), "'series_max' must be >= 1");
  const long dm = s.integer("dense_max_cells", static_cast<long>(sc.solver.dense_max_cells));
  if (dm < 0) s.fail(s.full("dense_max_cells"), "'dense_max_cells' must be >= 0");
  sc.solver.dense_max_cells = static_cast<std::size_t>(dm);
  sc.solver.krylov_max_iter = static_cast<int>(s.integer("max_iterations", sc.solver.krylov_max_iter));
  if (sc.solver.krylov_max_iter < 1) s.fail(s.full("max_iterations"), "'max_iterations' must be >= 1");
  const std::string near = s.string("near_field", "averaged");
  if (near == "averaged") sc.solver.coupling.averaged_near_field = true;
  else if (near == "point") sc.solver.coupling.averaged_near_field = false;
  else s.fail(s.full("near_field"), "'near_field' must be 'averaged' or 'point'");
  const std::string ms = s.string("m_sum", "half_weight_zero");
  if (ms == "half_weight_zero") sc.m_sum = closed_forms::AzimuthalSum::half_weight_zero;
  else if (ms == "unit_weight_zero") sc.m_sum = closed_forms::AzimuthalSum::unit_weight_zero;
  else if (ms == "symmetric") sc.m_sum = closed_forms::AzimuthalSum::symmetric;
  else s.fail(s.full("m_sum"), "'m_sum' must be half_weight_zero, unit_weight_zero or symmetric");
  s.finish();
}

inline void parse_criteria(Section s, Scene& sc) {
  if (s.has("q_factor")) {
    sc.q_factor = s.number("q_factor");
    if (!(*sc.q_factor > 0.0)) s.fail(s.full("q_factor"), "'q_factor' must be > 0");
  }
  sc.extent_fraction = s.number("extent_fraction", sc.extent_fraction);
  if (!(sc.extent_fraction > 0.0 && sc.extent_fraction < 1.0))
    s.fail(s.full("extent_fraction"), "'extent_fraction' must be in (0, 1)");
  sc.thresholds.pass = s.number("pass", sc.thresholds.pass);
  sc.thresholds.marginal = s.number("marginal", sc.thresholds.marginal);
  if (!(sc.thresholds.pass > 0.0 && sc.thresholds.marginal > sc.thresholds.pass))
    s.fail(s.path(), "need 0 < pass < marginal");
  s.finish();
}

}  // namespace detail

/// Parse and validate a scene document; relative table paths resolve against base_dir.
inline Scene scene_from_document(const KvDocument& doc, const std::string& text, const std::filesystem::path& base_dir = ".") {
  Scene sc;
  sc.source = doc.source;
  sc.hash = detail::fnv1a_hex(text);
  detail::Section root(doc, doc.root, "");
  auto section = [&](const char* name) { return detail::Section(doc, root.raw(name), name); };
  detail::parse_particle(section("particle"), sc);
  detail::parse_geometry(section("geometry"), sc);
  detail::parse_material(section("material"), sc, base_dir);
  detail::parse_evaluation(section("evaluation"), sc);
  if (root.has("thermal")) detail::parse_thermal(section("thermal"), sc);
  if (root.has("numerics")) detail::parse_numerics(section("numerics"), sc);
  if (root.has("criteria")) detail::parse_criteria(section("criteria"), sc);
  for (auto it = doc.root.begin(); it != doc.root.end(); ++it)
    if (!it->is_object()) root.fail(it.key(), "top-level key '" + it.key() + "' must sit inside a section");
  root.finish();

  if (sc.geometry == GeometryKind::plate && !sc.material.is_perfect_conductor())
    throw ValidationError(doc.where("material.kind") + ": the analytic plate geometry requires kind = \"pec\"");
  for (std::size_t i = 0; i < sc.points.size(); ++i) {
    const Vec3& p = sc.points[i];
    const std::string name = "evaluation point " + std::to_string(i) + " (" + std::to_string(p.x()) + ", " +
                             std::to_string(p.y()) + ", " + std::to_string(p.z()) + ") nm";
    if (sc.geometry == GeometryKind::plate) {
      if (!(p.z() > 0.0)) throw ValidationError(doc.where("evaluation.points_nm") + ": " + name + " must lie above the plate (z > 0)");
    } else if (born::signed_distance(sc.shape, p) <= 0.0) {
      throw ValidationError(doc.where("evaluation.points_nm") + ": " + name + " lies inside the body");
    }
  }
  return sc;
}

inline Scene parse_scene_text(const std::string& text, const std::string& source = "<string>",
                              const std::filesystem::path& base_dir = ".") {
  return scene_from_document(parse_kv(text, source), text, base_dir);
}

inline Scene parse_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scene file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scene_text(ss.str(), path, std::filesystem::path(path).parent_path());
}

/// Gamma provider for point i of the scene.
inline std::unique_ptr<GammaProvider> make_provider(const Scene& sc, std::shared_ptr<const born::ScatteringSolver> solver,
                                                    std::size_t i, std::optional<KernelKind> kernel = std::nullopt) {
  const KernelKind k = kernel.value_or(sc.kernel);
  if (sc.geometry == GeometryKind::plate) return std::make_unique<PlateGammaProvider>(sc.points.at(i).z(), k);
  return std::make_unique<VoxelGammaProvider>(std::move(solver), sc.points.at(i), k);
}

}  // namespace casimir::io

#endif
