#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "support.hpp"

using namespace he1;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "he1_test_io";
  fs::create_directories(dir);
  return dir / name;
}

SolutionRecord record_of(const HandleParams& p) {
  SolutionRecord r;
  r.params = p;
  r.targets = {0, 1};
  r.tolerances = {{"quadrature_rel", format_double(1e-12)}};
  r.defects = {{"max", format_double(3.5e-10)}};
  r.timestamp = "2000-01-01T00:00:00Z";
  return r;
}

}  // namespace

TEST(SolutionRecord, RoundTripIsLossless) {
  test::Gen gen(71);
  for (int k = 0; k < 100; ++k) {
    const double lam = gen.uniform(0.05, 0.95), a = lam - gen.uniform(0.01, 3);
    const auto p = HandleParams::make(lam, a, a - gen.uniform(0.01, 2), a + gen.uniform(0.01, 2));
    std::istringstream in(record_of(p).to_string());
    const auto back = SolutionRecord::parse(in);
    EXPECT_EQ(back.params.lambda, p.lambda);
    EXPECT_EQ(back.params.a, p.a);
    EXPECT_EQ(back.params.alpha, p.alpha);
    EXPECT_EQ(back.params.beta, p.beta);
    EXPECT_EQ(back.params.rho, p.rho);
    EXPECT_EQ(back.targets, (IntegerTargets{0, 1}));
    EXPECT_EQ(back.defect(), 3.5e-10);
  }
}

TEST(SolutionRecord, FromSolution) {
  const auto r = SolutionRecord::from(test::solved(), SolverOptions{});
  EXPECT_EQ(r.version, tool_version);
  EXPECT_EQ(r.defect(), test::solved().report.defect);
  const auto text = r.to_string();
  for (const char* key : {"lambda = ", "rho_im = ", "n_b = 1", "tol.quadrature_rel = ", "defect.residue_plus = "})
    EXPECT_NE(text.find(key), std::string::npos) << key;
}

TEST(SolutionRecord, MissingKeyOrBadValues) {
  std::istringstream missing("version = 1\ntimestamp = x\nlambda = 0.3\n");
  EXPECT_THROW(SolutionRecord::parse(missing), Error);
  auto text = record_of(HandleParams::make(0.32, -0.35, -1.2, 0.95)).to_string();
  text.replace(text.find("rho_im = "), 9, "rho_im = 7");
  std::istringstream bad(text);
  try {
    SolutionRecord::parse(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::io_error);
  }
}

TEST(SolutionRecord, AtomicSave) {
  const auto path = scratch("record.txt");
  const auto r = record_of(HandleParams::make(0.32, -0.35, -1.2, 0.95));
  r.save(path);
  EXPECT_FALSE(fs::exists(path.string() + ".tmp"));
  EXPECT_EQ(SolutionRecord::load(path).params.beta, 0.95);
  EXPECT_THROW(r.save(scratch("missing_dir") / "x" / "record.txt"), Error);
}

TEST(MeshIO, ObjRoundTripIsExact) {
  const auto m = reference_mesh(ReferenceKind::catenoid, 6);
  std::stringstream ss;
  write_obj(ss, m, mesh_metadata("catenoid", m));
  const auto f = read_obj(ss);
  ASSERT_EQ(f.mesh.vertices.size(), m.vertices.size());
  ASSERT_EQ(f.mesh.triangles, m.triangles);
  EXPECT_EQ(f.mesh.boundary_tag, m.boundary_tag);
  for (std::size_t k = 0; k < m.vertices.size(); ++k) {
    EXPECT_EQ(f.mesh.vertices[k].position, m.vertices[k].position);
    EXPECT_EQ(f.mesh.vertices[k].normal, m.vertices[k].normal);
    EXPECT_EQ(f.mesh.vertices[k].flat_coord, m.vertices[k].flat_coord);
  }
  EXPECT_EQ(f.get("kind"), "catenoid");
  EXPECT_EQ(f.get("vertices"), std::to_string(m.vertices.size()));
  EXPECT_EQ(f.mesh.resolution, 6);
}

TEST(MeshIO, ObjUsesOneBasedFaces) {
  const auto m = plane_mesh(2);
  std::stringstream ss;
  write_obj(ss, m, {});
  std::string line;
  while (std::getline(ss, line))
    if (line.rfind("f ", 0) == 0) break;
  EXPECT_EQ(line, "f 1 2 5");
}

TEST(MeshIO, PlyRoundTripWithinFloat) {
  const auto m = reference_mesh(ReferenceKind::helicoid, 10);
  std::stringstream ss;
  write_ply(ss, m, mesh_metadata("helicoid", m));
  const std::string bytes = ss.str();
  EXPECT_NE(bytes.find("format binary_little_endian 1.0"), std::string::npos);
  const auto header_end = bytes.find("end_header\n") + 11;
  const auto header = bytes.substr(0, header_end);
  for (const char* p : {"x", "y", "z", "nx", "ny", "nz", "u", "v"})
    EXPECT_NE(header.find(std::string("property float ") + p + "\n"), std::string::npos) << p;
  // First vertex x, little-endian.
  float x0;
  unsigned char b[4];
  for (int k = 0; k < 4; ++k) b[k] = static_cast<unsigned char>(bytes[header_end + k]);
  const std::uint32_t bits = b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  std::memcpy(&x0, &bits, 4);
  EXPECT_EQ(x0, static_cast<float>(m.vertices[0].position[0]));

  const auto f = read_ply(ss);
  ASSERT_EQ(f.mesh.vertices.size(), m.vertices.size());
  EXPECT_EQ(f.mesh.triangles, m.triangles);
  EXPECT_EQ(f.mesh.boundary_tag, m.boundary_tag);
  for (std::size_t k = 0; k < m.vertices.size(); ++k)
    EXPECT_LT(test::dist(f.mesh.vertices[k].position, m.vertices[k].position),
              1e-6 * (1 + norm(m.vertices[k].position)));
  EXPECT_EQ(f.get("kind"), "helicoid");
}

TEST(MeshIO, LoadDetectsFormatAndRejectsGarbage) {
  const auto m = plane_mesh(3);
  save_mesh(scratch("m.obj"), m, mesh_metadata("plane", m), false);
  save_mesh(scratch("m.ply"), m, mesh_metadata("plane", m), true);
  EXPECT_FALSE(load_mesh(scratch("m.obj")).single_precision);
  EXPECT_TRUE(load_mesh(scratch("m.ply")).single_precision);
  {
    std::ofstream out(scratch("bad.obj"));
    out << "v 1 2\nf 1 2 3\n";
  }
  EXPECT_THROW(load_mesh(scratch("bad.obj")), Error);
  {
    std::ofstream out(scratch("bad.ply"), std::ios::binary);
    out << "ply\nformat ascii 1.0\nend_header\n";
  }
  EXPECT_THROW(load_mesh(scratch("bad.ply")), Error);
  EXPECT_THROW(load_mesh(scratch("does_not_exist.obj")), Error);
}
