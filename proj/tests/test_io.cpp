#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include <casimir/io/kv_parser.hpp>
#include <casimir/io/scene.hpp>
#include <casimir/io/table.hpp>
#include <casimir/sweep.hpp>

namespace {

using namespace casimir;

const std::string minimal = R"(
[particle]
transitions = [ { omega_ev = 0.1, d2_debye2 = 4.0 } ]

[geometry]
shape = "sphere"
radius_nm = 10.0
resolution = 8

[material]
kind = "pec"

[evaluation]
points_nm = [[0.0, 0.0, 30.0]]
)";

std::string with_line(const std::string& text, const std::string& section, const std::string& line) {
  std::string s = text;
  const auto at = s.find("[" + section + "]");
  const auto eol = s.find('\n', at);
  return s.insert(eol + 1, line + "\n");
}

TEST(KvParser, ValuesAndLines) {
  const auto doc = io::parse_kv(R"(# comment
top = 1
[a]
s = "x\ty"   # trailing
n = -2.5e-3
b = true
arr = [1, 2,
       3]
t = { k = "v", list = [[1, 2], [3, 4]] }
)",
                                "doc");
  EXPECT_EQ(doc.root["top"], 1);
  EXPECT_EQ(doc.root["a"]["s"], "x\ty");
  EXPECT_DOUBLE_EQ(doc.root["a"]["n"].get<double>(), -2.5e-3);
  EXPECT_EQ(doc.root["a"]["b"], true);
  EXPECT_EQ(doc.root["a"]["arr"].size(), 3u);
  EXPECT_EQ(doc.root["a"]["t"]["list"][1][0], 3);
  EXPECT_EQ(doc.where("a.n"), "doc:5");
}

TEST(KvParser, ErrorsCarryLocation) {
  try {
    io::parse_kv("[a]\nx = 1\nx = 2\n", "dup");
    FAIL() << "duplicate key accepted";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("dup:3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(io::parse_kv("[a\n", "s"), ValidationError);
  EXPECT_THROW(io::parse_kv("x = \"open\n", "s"), ValidationError);
  EXPECT_THROW(io::parse_kv("x = [1, 2\n", "s"), ValidationError);
  EXPECT_THROW(io::parse_kv("x = 1 2\n", "s"), ValidationError);
}

TEST(Scene, MinimalSceneUsesDefaults) {
  const auto sc = io::parse_scene_text(minimal, "min");
  EXPECT_EQ(sc.geometry, io::GeometryKind::sphere);
  EXPECT_EQ(sc.resolution, 8);
  EXPECT_EQ(sc.thermal.T, 300.0);
  EXPECT_EQ(sc.kernel, KernelKind::retarded);
  EXPECT_EQ(sc.m_sum, closed_forms::AzimuthalSum::half_weight_zero);
  ASSERT_EQ(sc.particle.transitions.size(), 1u);
  EXPECT_TRUE(sc.particle.transitions[0].isotropic);
  EXPECT_DOUBLE_EQ(sc.particle.transitions[0].d2(), 4.0);
  EXPECT_EQ(sc.points.size(), 1u);
  EXPECT_EQ(sc.hash, io::parse_scene_text(minimal, "other").hash);
  EXPECT_NE(sc.hash, io::parse_scene_text(minimal + "\n", "min").hash);
}

TEST(Scene, PointInsideBodyIsNamed) {
  std::string s = minimal;
  s.replace(s.find("[[0.0, 0.0, 30.0]]"), 18, "[[0.0, 0.0, 30.0], [0.0, 0.0, 5.0]]");
  try {
    io::parse_scene_text(s, "inside");
    FAIL() << "point inside the sphere accepted";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("evaluation point 1 (0.000000, 0.000000, 5.000000)"), std::string::npos) << e.what();
  }
}

TEST(Scene, RejectsInvalidInput) {
  EXPECT_THROW(io::parse_scene_text(minimal + "[thermal]\ntemperature_k = -1.0\n"), ValidationError);
  EXPECT_THROW(io::parse_scene_text(with_line(minimal, "geometry", "colour = \"red\"")), ValidationError);
  EXPECT_THROW(io::parse_scene_text(with_line(minimal, "material", "plasma_ev = \"nine\"")), ValidationError);
  EXPECT_THROW(io::parse_scene_text(minimal + "[extras]\nx = 1\n"), ValidationError);
  std::string no_points = minimal;
  no_points.erase(no_points.find("[evaluation]"));
  EXPECT_THROW(io::parse_scene_text(no_points), ValidationError);
  std::string table = minimal;
  table.replace(table.find("kind = \"pec\""), 12, "kind = \"table\"\npath = \"missing.txt\"");
  EXPECT_THROW(io::parse_scene_text(table), ValidationError);
}

TEST(Scene, ErrorNamesTheLine) {
  try {
    io::parse_scene_text(with_line(minimal, "geometry", "colour = \"red\""), "scene.toml");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("scene.toml:"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("colour"), std::string::npos) << e.what();
  }
}

TEST(Scene, ShippedScenesParse) {
  for (const char* name : {"pec_sphere.toml", "gold_sphere.toml", "drude_cavity.toml", "pec_plate.toml"})
    EXPECT_NO_THROW(io::parse_scene(std::string(CASIMIR_SCENE_DIR) + "/" + name)) << name;
}

io::Table sample_table() {
  io::Table t;
  t.columns = {"x", "y"};
  t.set_meta("m_sum", "m>=0,w0=1/2");
  t.add_row({1.0, -2.5e-7});
  t.add_row({1.0 / 3.0, 123456789.123});
  t.add_row({std::nan(""), 0.0}, "failed", "solver did not converge");
  return t;
}

TEST(Table, RoundTripAtNineDigits) {
  const auto t = sample_table();
  std::stringstream ss;
  io::write_table(ss, t);
  const auto back = io::read_table(ss);
  ASSERT_EQ(back.columns, t.columns);
  ASSERT_EQ(back.rows.size(), 3u);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 2; ++c)
      EXPECT_EQ(back.rows[r][c], std::stod(io::format_number(t.rows[r][c])));
  EXPECT_TRUE(std::isnan(back.rows[2][0]));
  EXPECT_EQ(back.status[2], "failed");
  EXPECT_EQ(back.notes[2], "solver did not converge");
  EXPECT_EQ(back.meta("schema"), io::table_schema);
  EXPECT_EQ(back.meta("m_sum"), "m>=0,w0=1/2");
  EXPECT_EQ(io::format_number(1.0 / 3.0), "0.333333333");
}

TEST(Table, EmptyTableIsHeaderOnly) {
  io::Table t;
  t.columns = {"T_K", "U_total_eV"};
  std::stringstream ss;
  io::write_table(ss, t, {false});
  std::string line, last;
  int data = 0;
  while (std::getline(ss, line)) {
    if (line.empty() || line[0] == '#') continue;
    last = line;
    ++data;
  }
  EXPECT_EQ(data, 1);
  EXPECT_EQ(last, "T_K\tU_total_eV");
}

TEST(Sweep, RangeParsing) {
  EXPECT_EQ(parse_range("0:600:50").size(), 13u);
  EXPECT_DOUBLE_EQ(parse_range("0:600:50").back(), 600.0);
  EXPECT_EQ(parse_range("0.01:0.05:0.01").size(), 5u);
  EXPECT_EQ(parse_value_list("0.01, 0.003,0.001"), (std::vector<double>{0.01, 0.003, 0.001}));
  EXPECT_THROW(parse_range("1:0:1"), ValidationError);
  EXPECT_THROW(parse_range("0:1:0"), ValidationError);
  EXPECT_THROW(parse_range("a:b"), ValidationError);
}

TEST(Sweep, KrScalingTargetsDominantTransition) {
  Particle p{"p", {Transition::isotropic_dipole(0.1, 1.0), Transition::isotropic_dipole(-0.3, 5.0)}};
  const auto q = scale_to_kr(p, 0.01, 1000.0);
  EXPECT_NEAR(units::wavenumber(std::abs(q.transitions[1].omega_ev)) * 1000.0, 0.01, 1e-15);
  EXPECT_LT(q.transitions[1].omega_ev, 0.0);
  EXPECT_NEAR(q.transitions[0].omega_ev / q.transitions[1].omega_ev, -1.0 / 3.0, 1e-15);
}

TEST(Sweep, PecTemperatureSweepIsFlat) {
  auto sc = io::parse_scene_text(minimal + "[numerics]\nkernel = \"nonretarded\"\n", "pec");
  const auto res = run_sweep(sc, {SweepKind::temperature, parse_range("0:600:50"), 1});
  EXPECT_EQ(res.failures, 0u);
  ASSERT_EQ(res.table.rows.size(), 13u);
  for (const auto& row : res.table.rows) EXPECT_NEAR(row[5], 1.0, 1e-6) << "T=" << row[0];
  EXPECT_EQ(res.table.meta("m_sum"), "m>=0,w0=1/2");
  EXPECT_EQ(res.table.meta("kernel"), "nonretarded");
}

TEST(Sweep, DeterministicOutput) {
  // Micron-sized body: Matsubara terms die off after a few tens of frequencies.
  std::string text = minimal;
  text.replace(text.find("radius_nm = 10.0"), 16, "radius_nm = 1000.0");
  text.replace(text.find("[[0.0, 0.0, 30.0]]"), 18, "[[0.0, 0.0, 3000.0]]");
  auto sc = io::parse_scene_text(text, "det");
  auto run = [&](unsigned threads) {
    std::stringstream ss;
    io::write_table(ss, run_sweep(sc, {SweepKind::temperature, {600.0, 300.0, 77.0}, threads}).table, {false});
    return ss.str();
  };
  const auto a = run(1);
  EXPECT_EQ(a, run(1));
  EXPECT_EQ(a, run(3));
}

TEST(Sweep, PositionSweepOverPlate) {
  const auto sc = io::parse_scene(std::string(CASIMIR_SCENE_DIR) + "/pec_plate.toml");
  const auto res = run_sweep(sc, {SweepKind::position, {}, 1});
  ASSERT_EQ(res.table.rows.size(), sc.points.size());
  double prev = -INFINITY;
  for (const auto& row : res.table.rows) {
    EXPECT_LT(row[4], 0.0);
    EXPECT_GT(row[4], prev);  // attraction weakens with distance
    prev = row[4];
  }
}

}  // namespace
