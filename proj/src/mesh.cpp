#include "surfglm/mesh.hpp"

#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "surfglm/errors.hpp"

namespace surfglm {

namespace {

constexpr double kDegenerateAreaThreshold = 1e-12;  // mm^2

std::string strip_comment(const std::string& line) {
  auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

}  // namespace

int SurfaceMesh::n_masked() const {
  int n = 0;
  for (bool m : mask) n += m ? 1 : 0;
  return n;
}

double SurfaceMesh::triangle_area(int t) const {
  const auto& tri = triangles[static_cast<std::size_t>(t)];
  Eigen::Vector3d a = vertices.row(tri[0]);
  Eigen::Vector3d b = vertices.row(tri[1]);
  Eigen::Vector3d c = vertices.row(tri[2]);
  return 0.5 * (b - a).cross(c - a).norm();
}

void SurfaceMesh::validate() const {
  const int V = n_vertices();
  if (V == 0) throw DataError("mesh has no vertices");
  if (mask.size() != static_cast<std::size_t>(V))
    throw DataError("mesh mask length does not match vertex count");

  std::map<std::pair<int, int>, int> edge_count;
  for (int t = 0; t < n_triangles(); ++t) {
    const auto& tri = triangles[static_cast<std::size_t>(t)];
    for (int c = 0; c < 3; ++c) {
      if (tri[c] < 0 || tri[c] >= V)
        throw DataError("triangle " + std::to_string(t) + " references vertex " +
                        std::to_string(tri[c]) + " but mesh has " +
                        std::to_string(V) + " vertices");
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
      throw DataError("triangle " + std::to_string(t) + " repeats a vertex");
    if (triangle_area(t) < kDegenerateAreaThreshold)
      throw DataError("triangle " + std::to_string(t) + " is degenerate (area < 1e-12 mm^2)");
    for (int c = 0; c < 3; ++c) {
      int u = tri[c], v = tri[(c + 1) % 3];
      if (u > v) std::swap(u, v);
      if (++edge_count[{u, v}] > 2)
        throw DataError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                        ") is shared by more than two triangles (non-manifold)");
    }
  }
}

MaskedSubmesh masked_submesh(const SurfaceMesh& mesh) {
  MaskedSubmesh sub;
  const int V = mesh.n_vertices();
  sub.from_full.assign(static_cast<std::size_t>(V), -1);
  for (int v = 0; v < V; ++v) {
    if (mesh.mask[static_cast<std::size_t>(v)]) {
      sub.from_full[static_cast<std::size_t>(v)] = static_cast<int>(sub.to_full.size());
      sub.to_full.push_back(v);
    }
  }
  const int Vs = static_cast<int>(sub.to_full.size());
  sub.mesh.vertices.resize(Vs, 3);
  for (int v = 0; v < Vs; ++v)
    sub.mesh.vertices.row(v) = mesh.vertices.row(sub.to_full[static_cast<std::size_t>(v)]);
  sub.mesh.mask.assign(static_cast<std::size_t>(Vs), true);
  for (const auto& tri : mesh.triangles) {
    const int a = sub.from_full[static_cast<std::size_t>(tri[0])];
    const int b = sub.from_full[static_cast<std::size_t>(tri[1])];
    const int c = sub.from_full[static_cast<std::size_t>(tri[2])];
    if (a >= 0 && b >= 0 && c >= 0) sub.mesh.triangles.push_back({a, b, c});
  }
  return sub;
}

SurfaceMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open mesh file: " + path);

  // Token stream over comment-stripped lines, tracking line numbers for
  // error reporting.
  std::vector<std::string> tokens;
  std::vector<int> token_line;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(strip_comment(line));
    std::string tok;
    while (ls >> tok) {
      tokens.push_back(tok);
      token_line.push_back(lineno);
    }
  }

  std::size_t pos = 0;
  auto next = [&](const char* what) -> const std::string& {
    if (pos >= tokens.size())
      throw DataError(path + ": unexpected end of file while reading " + what);
    return tokens[pos++];
  };
  auto parse_long = [&](const char* what) {
    const std::string& tok = next(what);
    char* end = nullptr;
    long v = std::strtol(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0')
      throw DataError(path + ":" + std::to_string(token_line[pos - 1]) +
                      ": expected integer for " + what + ", got '" + tok + "'");
    return v;
  };
  auto parse_double = [&](const char* what) {
    const std::string& tok = next(what);
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
      throw DataError(path + ":" + std::to_string(token_line[pos - 1]) +
                      ": expected number for " + what + ", got '" + tok + "'");
    return v;
  };

  const long V = parse_long("vertex count");
  const long F = parse_long("triangle count");
  if (V <= 0 || F < 0)
    throw DataError(path + ": invalid counts V=" + std::to_string(V) +
                    " F=" + std::to_string(F));

  // Vertex lines either all carry a mask column or none do; the first line
  // decides. 3 + V*4 + F*3 total tokens with mask, 3-per-vertex without.
  const std::size_t remaining = tokens.size() - pos;
  const std::size_t with_mask = static_cast<std::size_t>(V) * 4 + static_cast<std::size_t>(F) * 3;
  const std::size_t without_mask = static_cast<std::size_t>(V) * 3 + static_cast<std::size_t>(F) * 3;
  bool has_mask;
  if (remaining == with_mask) {
    has_mask = true;
  } else if (remaining == without_mask) {
    has_mask = false;
  } else {
    throw DataError(path + ": token count " + std::to_string(remaining) +
                    " matches neither " + std::to_string(without_mask) +
                    " (x y z) nor " + std::to_string(with_mask) +
                    " (x y z mask) for V=" + std::to_string(V) +
                    " F=" + std::to_string(F));
  }

  SurfaceMesh mesh;
  mesh.vertices.resize(V, 3);
  mesh.mask.assign(static_cast<std::size_t>(V), true);
  for (long v = 0; v < V; ++v) {
    mesh.vertices(v, 0) = parse_double("vertex x");
    mesh.vertices(v, 1) = parse_double("vertex y");
    mesh.vertices(v, 2) = parse_double("vertex z");
    if (has_mask) {
      long m = parse_long("vertex mask");
      if (m != 0 && m != 1)
        throw DataError(path + ":" + std::to_string(token_line[pos - 1]) +
                        ": mask value must be 0 or 1, got " + std::to_string(m));
      mesh.mask[static_cast<std::size_t>(v)] = (m == 1);
    }
  }
  for (long f = 0; f < F; ++f) {
    std::array<int, 3> tri{};
    for (int c = 0; c < 3; ++c) {
      long idx = parse_long("triangle index");
      if (idx < 0 || idx >= V)
        throw DataError(path + ":" + std::to_string(token_line[pos - 1]) +
                        ": triangle " + std::to_string(f) + " index " +
                        std::to_string(idx) + " out of range [0," +
                        std::to_string(V - 1) + "]");
      tri[static_cast<std::size_t>(c)] = static_cast<int>(idx);
    }
    mesh.triangles.push_back(tri);
  }

  mesh.validate();
  return mesh;
}

void save_mesh(const SurfaceMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write mesh file: " + path);
  out << mesh.n_vertices() << ' ' << mesh.n_triangles() << '\n';
  char buf[96];
  bool all_masked = true;
  for (bool m : mesh.mask) all_masked = all_masked && m;
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g", mesh.vertices(v, 0),
                  mesh.vertices(v, 1), mesh.vertices(v, 2));
    out << buf;
    if (!all_masked) out << ' ' << (mesh.mask[static_cast<std::size_t>(v)] ? 1 : 0);
    out << '\n';
  }
  for (const auto& tri : mesh.triangles)
    out << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
  if (!out) throw DataError("failed while writing mesh file: " + path);
}

std::uint64_t mesh_checksum(const SurfaceMesh& mesh) {
  // FNV-1a over a canonical byte serialization.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix_bytes = [&h](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  const std::int64_t V = mesh.n_vertices(), F = mesh.n_triangles();
  mix_bytes(&V, sizeof V);
  mix_bytes(&F, sizeof F);
  for (int v = 0; v < V; ++v)
    for (int c = 0; c < 3; ++c) {
      double x = mesh.vertices(v, c);
      mix_bytes(&x, sizeof x);
    }
  for (const auto& tri : mesh.triangles) mix_bytes(tri.data(), sizeof(int) * 3);
  for (bool m : mesh.mask) {
    unsigned char b = m ? 1 : 0;
    mix_bytes(&b, 1);
  }
  return h;
}

}  // namespace surfglm
