/// Solution records (flat key = value text) and mesh files (OBJ, binary PLY).
#pragma once

#include <bit>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "solver.hpp"
#include "surface.hpp"

namespace he1 {

inline constexpr const char* tool_version = "1.0.0";

/// Ordered key/value pairs; keys keep their insertion order on output.
using Metadata = std::vector<std::pair<std::string, std::string>>;

inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline double parse_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw Error(ErrorKind::io_error, "bad number '" + s + "'");
  return v;
}

inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

/// Writes through a temporary file in the same directory and renames it into place.
template <class Writer>
void write_atomically(const std::filesystem::path& path, Writer&& writer, bool binary = false) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, binary ? std::ios::binary : std::ios::out);
    if (!out) throw Error(ErrorKind::io_error, "cannot open " + tmp.string() + " for writing");
    writer(out);
    out.flush();
    if (!out) throw Error(ErrorKind::io_error, "write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::io_error, "cannot rename into " + path.string() + ": " + ec.message());
}

struct SolutionRecord {
  HandleParams params;
  IntegerTargets targets;
  Metadata tolerances;  ///< name -> value
  Metadata defects;     ///< name -> value
  std::string version = tool_version;
  std::string timestamp;

  static SolutionRecord from(const Solution& s, const SolverOptions& opt) {
    SolutionRecord r;
    r.params = s.params;
    r.targets = s.report.targets;
    r.tolerances = {{"quadrature_rel", format_double(opt.quad.rel_tol)},
                    {"coupled_rel", format_double(opt.coupled.rel_tol)},
                    {"alpha_beta", format_double(opt.alpha_beta_tol)},
                    {"lambda_residual", format_double(opt.residual_tol)},
                    {"bisect_width", format_double(opt.bisect_width)},
                    {"fd_step", format_double(opt.fd_step)}};
    const auto& rep = s.report;
    const char* cyc[2] = {"A", "B"};
    for (int k = 0; k < 2; ++k) {
      const double n = k == 0 ? rep.targets.n_a : rep.targets.n_b;
      r.defects.push_back({std::string("dgg_") + cyc[k], format_double(std::abs(rep.dgg_periods[k] - 2 * pi * I * n))});
    }
    r.defects.push_back({"residue_plus", format_double(std::abs(rep.residues[0] - 1.0))});
    r.defects.push_back({"residue_minus", format_double(std::abs(rep.residues[1] + 1.0))});
    for (int k = 0; k < 2; ++k)
      for (int c = 0; c < 3; ++c)
        r.defects.push_back({std::string("period_") + cyc[k] + "_x" + std::to_string(c + 1),
                             format_double(rep.coord_periods[k][c].real())});
    r.defects.push_back({"max", format_double(rep.defect)});
    r.timestamp = utc_timestamp();
    return r;
  }

  double defect() const {
    for (const auto& [k, v] : defects)
      if (k == "max") return parse_double(v);
    return std::numeric_limits<double>::quiet_NaN();
  }

  std::string to_string() const {
    std::ostringstream os;
    os << "# he1 solution record\n";
    os << "version = " << version << "\n";
    os << "timestamp = " << timestamp << "\n";
    os << "lambda = " << format_double(params.lambda) << "\n";
    os << "a = " << format_double(params.a) << "\n";
    os << "alpha = " << format_double(params.alpha) << "\n";
    os << "beta = " << format_double(params.beta) << "\n";
    os << "rho_re = " << format_double(params.rho.real()) << "\n";
    os << "rho_im = " << format_double(params.rho.imag()) << "\n";
    os << "n_a = " << targets.n_a << "\n";
    os << "n_b = " << targets.n_b << "\n";
    for (const auto& [k, v] : tolerances) os << "tol." << k << " = " << v << "\n";
    for (const auto& [k, v] : defects) os << "defect." << k << " = " << v << "\n";
    return os.str();
  }

  static std::map<std::string, std::string> parse_lines(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      const auto eq = line.find(" = ");
      if (eq == std::string::npos) throw Error(ErrorKind::io_error, "malformed line '" + line + "'");
      kv[line.substr(0, eq)] = line.substr(eq + 3);
    }
    return kv;
  }

  static SolutionRecord parse(std::istream& in) {
    const auto kv = parse_lines(in);
    auto get = [&](const std::string& k) {
      auto it = kv.find(k);
      if (it == kv.end()) throw Error(ErrorKind::io_error, "missing key '" + k + "'");
      return it->second;
    };
    SolutionRecord r;
    r.version = get("version");
    r.timestamp = get("timestamp");
    r.params.lambda = parse_double(get("lambda"));
    r.params.a = parse_double(get("a"));
    r.params.alpha = parse_double(get("alpha"));
    r.params.beta = parse_double(get("beta"));
    r.params.rho = {parse_double(get("rho_re")), parse_double(get("rho_im"))};
    r.targets = {std::stoi(get("n_a")), std::stoi(get("n_b"))};
    for (const auto& [k, v] : kv) {
      if (k.rfind("tol.", 0) == 0) r.tolerances.push_back({k.substr(4), v});
      if (k.rfind("defect.", 0) == 0) r.defects.push_back({k.substr(7), v});
    }
    try {
      r.params.validate();
    } catch (const Error& e) {
      throw Error(ErrorKind::io_error, std::string("record holds invalid parameters: ") + e.what());
    }
    return r;
  }

  void save(const std::filesystem::path& path) const {
    write_atomically(path, [&](std::ostream& os) { os << to_string(); });
  }
  static SolutionRecord load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io_error, "cannot read " + path.string());
    return parse(in);
  }
};

/// Metadata that lets a mesh file be regenerated.
inline Metadata mesh_metadata(const std::string& kind, const SurfaceMesh& m) {
  return {{"generator", std::string("he1 ") + tool_version},
          {"kind", kind},
          {"vertices", std::to_string(m.vertices.size())},
          {"triangles", std::to_string(m.triangles.size())},
          {"resolution", std::to_string(m.resolution)}};
}

inline Metadata params_metadata(const HandleParams& p, const IntegerTargets& t) {
  return {{"lambda", format_double(p.lambda)}, {"a", format_double(p.a)},
          {"alpha", format_double(p.alpha)},   {"beta", format_double(p.beta)},
          {"rho_re", format_double(p.rho.real())}, {"rho_im", format_double(p.rho.imag())},
          {"n_a", std::to_string(t.n_a)},      {"n_b", std::to_string(t.n_b)}};
}

struct MeshFile {
  SurfaceMesh mesh;
  Metadata meta;
  bool single_precision = false;

  std::string get(const std::string& key, const std::string& fallback = "") const {
    for (const auto& [k, v] : meta)
      if (k == key) return v;
    return fallback;
  }
};

/// OBJ with v, vn and vt (the flat coordinate) lines, 1-based f i j k faces,
/// metadata as "# key = value" comments and boundary vertices as "# boundary i".
inline void write_obj(std::ostream& os, const SurfaceMesh& m, const Metadata& meta) {
  os << "# he1 mesh\n";
  for (const auto& [k, v] : meta) os << "# " << k << " = " << v << "\n";
  os << std::setprecision(17);
  for (const auto& v : m.vertices) os << "v " << v.position[0] << ' ' << v.position[1] << ' ' << v.position[2] << '\n';
  for (const auto& v : m.vertices) os << "vn " << v.normal[0] << ' ' << v.normal[1] << ' ' << v.normal[2] << '\n';
  for (const auto& v : m.vertices) os << "vt " << v.flat_coord.real() << ' ' << v.flat_coord.imag() << '\n';
  for (std::size_t k = 0; k < m.boundary_tag.size(); ++k)
    if (m.boundary_tag[k] == VertexTag::boundary) os << "# boundary " << k + 1 << '\n';
  for (const auto& t : m.triangles) os << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

inline MeshFile read_obj(std::istream& in) {
  MeshFile f;
  std::vector<Vec3> vs, ns;
  std::vector<cplx> ts;
  std::vector<int> boundary;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "#") {
      std::string rest;
      std::getline(ls, rest);
      rest.erase(0, rest.find_first_not_of(' '));
      if (rest.rfind("boundary ", 0) == 0) {
        boundary.push_back(std::stoi(rest.substr(9)) - 1);
      } else if (const auto eq = rest.find(" = "); eq != std::string::npos) {
        f.meta.push_back({rest.substr(0, eq), rest.substr(eq + 3)});
      }
    } else if (tag == "v") {
      Vec3 p;
      ls >> p[0] >> p[1] >> p[2];
      vs.push_back(p);
    } else if (tag == "vn") {
      Vec3 p;
      ls >> p[0] >> p[1] >> p[2];
      ns.push_back(p);
    } else if (tag == "vt") {
      double u, v;
      ls >> u >> v;
      ts.push_back({u, v});
    } else if (tag == "f") {
      std::array<int, 3> t{};
      for (int k = 0; k < 3; ++k) {
        std::string tok;
        ls >> tok;
        t[k] = std::stoi(tok.substr(0, tok.find('/'))) - 1;
      }
      f.mesh.triangles.push_back(t);
    }
    if (!ls && tag != "#" && !tag.empty() && tag[0] != '#')
      if (tag == "v" || tag == "vn" || tag == "vt") throw Error(ErrorKind::io_error, "malformed line '" + line + "'");
  }
  f.mesh.vertices.resize(vs.size());
  for (std::size_t k = 0; k < vs.size(); ++k) {
    f.mesh.vertices[k].position = vs[k];
    if (k < ns.size()) f.mesh.vertices[k].normal = ns[k];
    if (k < ts.size()) f.mesh.vertices[k].flat_coord = ts[k];
  }
  f.mesh.boundary_tag.assign(vs.size(), VertexTag::interior);
  for (int b : boundary)
    if (b >= 0 && static_cast<std::size_t>(b) < vs.size()) f.mesh.boundary_tag[b] = VertexTag::boundary;
  for (const auto& t : f.mesh.triangles)
    for (int i : t)
      if (i < 0 || static_cast<std::size_t>(i) >= vs.size()) throw Error(ErrorKind::io_error, "face index out of range");
  f.mesh.resolution = std::stoi(f.get("resolution", "0"));
  return f;
}

namespace detail {

template <class T>
void put_le(std::ostream& os, T v) {
  static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  os.write(b, sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  char b[sizeof(T)];
  if (!is.read(b, sizeof(T))) throw Error(ErrorKind::io_error, "truncated PLY body");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

}  // namespace detail

/// Binary little-endian PLY: float x y z nx ny nz u v per vertex, (u, v) the
/// flat coordinate; boundary flags as an extra uchar property.
inline void write_ply(std::ostream& os, const SurfaceMesh& m, const Metadata& meta) {
  os << "ply\nformat binary_little_endian 1.0\n";
  for (const auto& [k, v] : meta) os << "comment " << k << " = " << v << "\n";
  os << "element vertex " << m.vertices.size() << "\n";
  for (const char* p : {"x", "y", "z", "nx", "ny", "nz", "u", "v"}) os << "property float " << p << "\n";
  os << "property uchar boundary\n";
  os << "element face " << m.triangles.size() << "\n";
  os << "property list uchar int vertex_indices\nend_header\n";
  for (std::size_t k = 0; k < m.vertices.size(); ++k) {
    const auto& v = m.vertices[k];
    for (double x : {v.position[0], v.position[1], v.position[2], v.normal[0], v.normal[1], v.normal[2],
                     v.flat_coord.real(), v.flat_coord.imag()})
      detail::put_le<float>(os, static_cast<float>(x));
    detail::put_le<std::uint8_t>(os, k < m.boundary_tag.size() && m.boundary_tag[k] == VertexTag::boundary ? 1 : 0);
  }
  for (const auto& t : m.triangles) {
    detail::put_le<std::uint8_t>(os, 3);
    for (int i : t) detail::put_le<std::int32_t>(os, i);
  }
}

inline MeshFile read_ply(std::istream& in) {
  MeshFile f;
  f.single_precision = true;
  std::string line;
  std::getline(in, line);
  if (line != "ply") throw Error(ErrorKind::io_error, "not a PLY file");
  std::size_t nv = 0, nf = 0;
  std::vector<std::string> props;
  std::string element;
  while (std::getline(in, line)) {
    if (line == "end_header") break;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt != "binary_little_endian") throw Error(ErrorKind::io_error, "unsupported PLY format " + fmt);
    } else if (tag == "comment") {
      std::string rest = line.substr(8);
      if (const auto eq = rest.find(" = "); eq != std::string::npos)
        f.meta.push_back({rest.substr(0, eq), rest.substr(eq + 3)});
    } else if (tag == "element") {
      ls >> element;
      std::size_t n;
      ls >> n;
      (element == "vertex" ? nv : nf) = n;
    } else if (tag == "property" && element == "vertex") {
      std::string type, name;
      ls >> type >> name;
      props.push_back(type + " " + name);
    }
  }
  const std::vector<std::string> expect = {"float x",  "float y", "float z", "float nx",     "float ny",
                                           "float nz", "float u", "float v", "uchar boundary"};
  if (props != expect) throw Error(ErrorKind::io_error, "unexpected PLY vertex layout");
  f.mesh.vertices.resize(nv);
  f.mesh.boundary_tag.resize(nv);
  for (std::size_t k = 0; k < nv; ++k) {
    float x[8];
    for (float& v : x) v = detail::get_le<float>(in);
    auto& p = f.mesh.vertices[k];
    p.position = {x[0], x[1], x[2]};
    p.normal = {x[3], x[4], x[5]};
    p.flat_coord = {x[6], x[7]};
    f.mesh.boundary_tag[k] = detail::get_le<std::uint8_t>(in) ? VertexTag::boundary : VertexTag::interior;
  }
  for (std::size_t k = 0; k < nf; ++k) {
    if (detail::get_le<std::uint8_t>(in) != 3) throw Error(ErrorKind::io_error, "non-triangle face");
    std::array<int, 3> t;
    for (int& i : t) {
      i = detail::get_le<std::int32_t>(in);
      if (i < 0 || static_cast<std::size_t>(i) >= nv) throw Error(ErrorKind::io_error, "face index out of range");
    }
    f.mesh.triangles.push_back(t);
  }
  f.mesh.resolution = std::stoi(f.get("resolution", "0"));
  return f;
}

inline void save_mesh(const std::filesystem::path& path, const SurfaceMesh& m, const Metadata& meta, bool ply) {
  if (ply)
    write_atomically(path, [&](std::ostream& os) { write_ply(os, m, meta); }, true);
  else
    write_atomically(path, [&](std::ostream& os) { write_obj(os, m, meta); });
}

/// Reads OBJ or PLY, chosen by the first line.
inline MeshFile load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_error, "cannot read " + path.string());
  std::string first;
  std::getline(in, first);
  in.seekg(0);
  try {
    return first == "ply" ? read_ply(in) : read_obj(in);
  } catch (const std::logic_error& e) {
    throw Error(ErrorKind::io_error, std::string("malformed mesh file: ") + e.what());
  }
}

}  // namespace he1
