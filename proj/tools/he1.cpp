// he1: solve the period problem, export meshes, verify them.
//
// Exit codes: 0 success, 1 internal or IO error, 2 no root or failed check.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "he1/he1.hpp"

namespace {

using namespace he1;

constexpr int exit_ok = 0, exit_internal = 1, exit_failed = 2;

struct SolveArgs {
  std::vector<double> bracket{0.2, 0.45};
  std::vector<int> targets;
  std::string out = "he1_solution.txt";
  double tol_quadrature = 1e-12;
  double tol_defect = 1e-8;
  bool verbose = false;
};

struct MeshArgs {
  std::string solution;
  std::string reference;
  int resolution = 64;
  double end_cutoff = 4.0;
  std::string format = "obj";
  std::string out;
};

struct VerifyArgs {
  std::string mesh;
  std::string solution;
  std::string report = "he1_report.txt";
  double tol_mean_curvature = 0.1;
  double tol_normal_deg = 2.0;
  double tol_symmetry = 1e-4;
  double tol_symmetry_control = 1e-2;
  double tol_rhombic = 1e-9;
  double tol_reference = 1e-9;
};

int run_solve(const SolveArgs& a) {
  const double lo = a.bracket[0], hi = a.bracket[1];
  if (!(0.05 <= lo && lo < hi && hi <= 0.95)) {
    std::cerr << "he1 solve: bracket must satisfy 0.05 <= lo < hi <= 0.95\n";
    return exit_internal;
  }
  IntegerTargets t = default_targets;
  if (!a.targets.empty()) t = {a.targets[0], a.targets[1]};
  SolverOptions opt;
  opt.quad.rel_tol = a.tol_quadrature;
  opt.coupled.rel_tol = a.tol_quadrature;
  opt.residual_tol = a.tol_defect;
  try {
    std::function<void(double, double)> trace;
    if (a.verbose) trace = [](double l, double r) { std::fprintf(stderr, "lambda %.15f residual %.3e\n", l, r); };
    const auto sol = solve_full(t, lo, hi, opt, trace);
    const auto rec = SolutionRecord::from(sol, opt);
    rec.save(a.out);
    std::cout << "lambda = " << format_double(sol.params.lambda) << "\n"
              << "defect = " << format_double(sol.report.defect) << "\n"
              << "wrote " << a.out << "\n";
    if (!(sol.report.defect < a.tol_defect)) {
      std::cerr << "he1 solve: period defect " << sol.report.defect << " above " << a.tol_defect << "\n";
      return exit_failed;
    }
    return exit_ok;
  } catch (const Error& e) {
    std::cerr << "he1 solve: " << e.what() << "\n";
    return e.kind() == ErrorKind::no_root ? exit_failed : exit_internal;
  }
}

int run_mesh(const MeshArgs& a) {
  const bool ply = a.format == "ply";
  std::string out = a.out.empty() ? std::string("he1_mesh.") + (ply ? "ply" : "obj") : a.out;
  try {
    SurfaceMesh m;
    Metadata meta;
    if (!a.reference.empty()) {
      if (a.reference == "helicoid" || a.reference == "catenoid") {
        m = reference_mesh(a.reference == "helicoid" ? ReferenceKind::helicoid : ReferenceKind::catenoid, a.resolution);
      } else if (a.reference == "sphere") {
        m = sphere_mesh(a.resolution);
      } else {
        m = plane_mesh(a.resolution);
      }
      meta = mesh_metadata(a.reference, m);
    } else {
      if (a.solution.empty()) {
        std::cerr << "he1 mesh: need --solution or --reference\n";
        return exit_internal;
      }
      const auto rec = SolutionRecord::load(a.solution);
      m = build_mesh(rec.params, a.resolution, a.end_cutoff);
      meta = mesh_metadata("he1", m);
      meta.push_back({"end_cutoff", format_double(a.end_cutoff)});
      meta.push_back({"solution_version", rec.version});
      for (auto& kv : params_metadata(rec.params, rec.targets)) meta.push_back(kv);
    }
    save_mesh(out, m, meta, ply);
    std::cout << "vertices = " << m.vertices.size() << "\n"
              << "triangles = " << m.triangles.size() << "\n"
              << "wrote " << out << "\n";
    return exit_ok;
  } catch (const Error& e) {
    std::cerr << "he1 mesh: " << e.what() << "\n";
    return exit_internal;
  }
}

/// Largest distance between a reference mesh vertex and the closed form at its
/// parameter-plane coordinate.
double reference_deviation(const MeshFile& f, const std::string& kind) {
  double worst = 0;
  for (const auto& v : f.mesh.vertices) {
    const Vec3 x = kind == "helicoid" ? helicoid_closed(v.flat_coord) : catenoid_closed(v.flat_coord);
    worst = std::max(worst, norm(x - v.position));
  }
  return worst;
}

int run_verify(const VerifyArgs& a) {
  MeshFile f;
  try {
    f = load_mesh(a.mesh);
  } catch (const Error& e) {
    std::cerr << "he1 verify: " << e.what() << "\n";
    return exit_internal;
  }
  try {
    const std::string kind = f.get("kind", "unknown");
    VerificationReport r;
    r.mean_curvature = discrete_mean_curvature(f.mesh);
    r.checks.push_back({"mean_curvature_max", r.mean_curvature.max, a.tol_mean_curvature});
    bool has_normals = !f.mesh.vertices.empty();
    for (const auto& v : f.mesh.vertices) has_normals = has_normals && norm(v.normal) > 0.5;
    if (has_normals) {
      r.normal_deviation_max = normal_deviation_max(f.mesh);
      r.checks.push_back({"normal_deviation_deg", r.normal_deviation_max, a.tol_normal_deg});
    }
    if (kind == "he1") {
      const double s3 = check_symmetry(f.mesh, RigidMotion::rotation({0, 0, 1}, pi));
      const double s2 = check_symmetry(f.mesh, RigidMotion::rotation({0, 1, 0}, pi));
      const double c90 = check_symmetry(f.mesh, RigidMotion::rotation({0, 0, 1}, pi / 2));
      r.symmetry_deviations = {{"rot180_x3", s3}, {"rot180_x2", s2}, {"rot90_x3_control", c90}};
      r.checks.push_back({"symmetry_rot180_x3", s3, a.tol_symmetry});
      r.checks.push_back({"symmetry_rot180_x2", s2, a.tol_symmetry});
      r.checks.push_back({"symmetry_rot90_x3_control", c90, a.tol_symmetry_control, false});
      r.asymptote_trend = check_helicoidal_end({&f.mesh});
    }
    if (kind == "helicoid" || kind == "catenoid") {
      // Float storage limits what a PLY file can reproduce.
      double tol = a.tol_reference;
      if (f.single_precision) tol = std::max(tol, 1e-5);
      r.checks.push_back({"reference_closed_form", reference_deviation(f, kind), tol});
    }
    if (!a.solution.empty()) {
      const auto rec = SolutionRecord::load(a.solution);
      r.rhombic_deviation = check_rhombic(HCurve(rec.params.lambda));
      r.checks.push_back({"rhombic", r.rhombic_deviation, a.tol_rhombic});
    }
    std::ostringstream head;
    head << std::setprecision(17) << "# mesh = " << a.mesh << "\n# kind = " << kind << "\n"
         << "# version = " << tool_version << "\n"
         << "flag.tol_mean_curvature = " << a.tol_mean_curvature << "\n"
         << "flag.tol_normal_deg = " << a.tol_normal_deg << "\n"
         << "flag.tol_symmetry = " << a.tol_symmetry << "\n"
         << "flag.tol_symmetry_control = " << a.tol_symmetry_control << "\n"
         << "flag.tol_rhombic = " << a.tol_rhombic << "\n"
         << "flag.tol_reference = " << a.tol_reference << "\n";
    write_atomically(a.report, [&](std::ostream& os) { os << head.str() << r.to_string(); });
    for (const auto& c : r.checks)
      std::cout << (c.pass() ? "PASS " : "FAIL ") << c.name << " " << c.value << (c.below ? " < " : " > ")
                << c.threshold << "\n";
    return r.pass() ? exit_ok : exit_failed;
  } catch (const Error& e) {
    std::cerr << "he1 verify: " << e.what() << "\n";
    return exit_internal;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Genus-one helicoid: period problem, meshes and checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", he1::tool_version);

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Solve the period problem for lambda in a bracket");
  solve->add_option("--bracket", sa.bracket, "Search bracket LO HI")->expected(2);
  solve->add_option("--targets", sa.targets, "Integer targets NA NB for the dg/g periods over A and B")->expected(2);
  solve->add_option("--out", sa.out, "Solution record path");
  solve->add_option("--tol-quadrature", sa.tol_quadrature, "Relative quadrature tolerance");
  solve->add_option("--tol-defect", sa.tol_defect, "Largest accepted period defect");
  solve->add_flag("--verbose", sa.verbose, "Print each residual evaluation");

  MeshArgs ma;
  auto* mesh = app.add_subcommand("mesh", "Build and export a mesh");
  auto* sol_opt = mesh->add_option("--solution", ma.solution, "Solution record");
  mesh->add_option("--reference", ma.reference, "Reference surface instead of a solution")
      ->check(CLI::IsMember({"helicoid", "catenoid", "sphere", "plane"}))
      ->excludes(sol_opt);
  mesh->add_option("--resolution", ma.resolution, "Grid resolution N");
  mesh->add_option("--end-cutoff", ma.end_cutoff, "Drop vertices with |z| above this");
  mesh->add_option("--format", ma.format, "obj or ply")->check(CLI::IsMember({"obj", "ply"}));
  mesh->add_option("--out", ma.out, "Output path");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Run the mesh checks and write a report");
  verify->add_option("--mesh", va.mesh, "Mesh file (OBJ or PLY)")->required();
  verify->add_option("--solution", va.solution, "Solution record, enables the rhombic check");
  verify->add_option("--report", va.report, "Report path");
  verify->add_option("--tol-mean-curvature", va.tol_mean_curvature, "Largest interior mean curvature");
  verify->add_option("--tol-normal-deg", va.tol_normal_deg, "Largest normal deviation in degrees");
  verify->add_option("--tol-symmetry", va.tol_symmetry, "Largest deviation under the rotational symmetries");
  verify->add_option("--tol-symmetry-control", va.tol_symmetry_control, "Smallest deviation under the 90 degree control");
  verify->add_option("--tol-rhombic", va.tol_rhombic, "Largest rhombic lattice deviation");
  verify->add_option("--tol-reference", va.tol_reference, "Largest deviation from a closed-form reference");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_internal;
  }
  try {
    if (*solve) return run_solve(sa);
    if (*mesh) return run_mesh(ma);
    return run_verify(va);
  } catch (const std::exception& e) {
    std::cerr << "he1: " << e.what() << "\n";
    return exit_internal;
  }
}
