#include "srp/io/mesh_io.hpp"

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "srp/core.hpp"

namespace srp::io {

namespace {

[[noreturn]] void ioFail(const std::string& path, const std::string& what) {
  raise(Errc::IoError, path + ": " + what);
}

/// Exact-coordinate vertex welding.
class VertexPool3 {
 public:
  explicit VertexPool3(TriMesh<3>& mesh) : mesh_(mesh) {}
  int intern(const Vec<3>& v) {
    const std::array<double, 3> key{v.x(), v.y(), v.z()};
    auto [it, inserted] = index_.try_emplace(key, static_cast<int>(mesh_.vertices.size()));
    if (inserted) mesh_.vertices.push_back(v);
    return it->second;
  }

 private:
  TriMesh<3>& mesh_;
  std::map<std::array<double, 3>, int> index_;
};

float readF32(std::istream& in) {
  std::uint8_t b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t u = b[0] | (b[1] << 8) | (b[2] << 16) | (std::uint32_t(b[3]) << 24);
  float f;
  std::memcpy(&f, &u, 4);
  return f;
}

void writeF32(std::ostream& out, float f) {
  std::uint32_t u;
  std::memcpy(&u, &f, 4);
  const char b[4] = {char(u & 0xff), char((u >> 8) & 0xff), char((u >> 16) & 0xff),
                     char((u >> 24) & 0xff)};
  out.write(b, 4);
}

TriMesh<3> readStlBinary(const std::string& path, std::ifstream& in) {
  in.seekg(80);
  std::uint8_t cb[4];
  in.read(reinterpret_cast<char*>(cb), 4);
  const std::uint32_t count = cb[0] | (cb[1] << 8) | (cb[2] << 16) | (std::uint32_t(cb[3]) << 24);

  TriMesh<3> mesh;
  VertexPool3 pool(mesh);
  for (std::uint32_t t = 0; t < count; ++t) {
    for (int k = 0; k < 3; ++k) readF32(in);  // normal, recomputable
    std::array<int, 3> face;
    for (int k = 0; k < 3; ++k) {
      Vec<3> v;
      for (int a = 0; a < 3; ++a) v[a] = readF32(in);
      face[k] = pool.intern(v);
    }
    in.seekg(2, std::ios::cur);  // attribute byte count
    if (!in) ioFail(path, "truncated binary STL");
    mesh.faces.push_back(face);
  }
  return mesh;
}

TriMesh<3> readStlAscii(const std::string& path, std::ifstream& in) {
  TriMesh<3> mesh;
  VertexPool3 pool(mesh);
  std::string tok;
  std::vector<int> pending;
  while (in >> tok) {
    if (tok == "vertex") {
      Vec<3> v;
      if (!(in >> v.x() >> v.y() >> v.z())) ioFail(path, "malformed vertex line");
      pending.push_back(pool.intern(v));
      if (pending.size() == 3) {
        mesh.faces.push_back({pending[0], pending[1], pending[2]});
        pending.clear();
      }
    }
  }
  if (!pending.empty()) ioFail(path, "facet with fewer than 3 vertices");
  if (mesh.faces.empty()) ioFail(path, "no facets found");
  return mesh;
}

TriMesh<3> readStl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) ioFail(path, "cannot open");
  in.seekg(0, std::ios::end);
  const std::streamoff size = in.tellg();
  if (size >= 84) {
    in.seekg(80);
    std::uint8_t cb[4];
    in.read(reinterpret_cast<char*>(cb), 4);
    const std::uint32_t count = cb[0] | (cb[1] << 8) | (cb[2] << 16) | (std::uint32_t(cb[3]) << 24);
    if (size == std::streamoff(84) + std::streamoff(count) * 50) {
      in.seekg(0);
      return readStlBinary(path, in);
    }
  }
  in.seekg(0);
  return readStlAscii(path, in);
}

TriMesh<3> readObj(const std::string& path) {
  std::ifstream in(path);
  if (!in) ioFail(path, "cannot open");
  TriMesh<3> mesh;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind)) continue;
    if (kind == "v") {
      Vec<3> v;
      if (!(ls >> v.x() >> v.y() >> v.z())) ioFail(path, "malformed v line");
      mesh.vertices.push_back(v);
    } else if (kind == "f") {
      std::vector<int> idx;
      std::string ref;
      while (ls >> ref) {
        // "i", "i/t", "i/t/n", "i//n" — the vertex index leads.
        const int raw = std::stoi(ref.substr(0, ref.find('/')));
        idx.push_back(raw > 0 ? raw - 1 : static_cast<int>(mesh.vertices.size()) + raw);
      }
      if (idx.size() < 3) ioFail(path, "face with fewer than 3 vertices");
      for (std::size_t k = 1; k + 1 < idx.size(); ++k)  // fan-triangulate
        mesh.faces.push_back({idx[0], idx[k], idx[k + 1]});
    }
  }
  if (mesh.faces.empty()) ioFail(path, "no faces found");
  return mesh;
}

std::string lowerExt(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string ext = path.substr(dot + 1);
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

}  // namespace

TriMesh<3> readMesh3(const std::string& path) {
  const std::string ext = lowerExt(path);
  if (ext == "obj") return readObj(path);
  if (ext == "stl") return readStl(path);
  ioFail(path, "unsupported 3D mesh extension '" + ext + "'");
}

void writeStlBinary(const std::string& path, const TriMesh<3>& mesh) {
  std::ofstream out(path, std::ios::binary);
  if (!out) ioFail(path, "cannot open for writing");
  char header[80] = {};
  std::snprintf(header, sizeof(header), "binary STL");
  out.write(header, 80);
  const std::uint32_t count = static_cast<std::uint32_t>(mesh.faces.size());
  const char cb[4] = {char(count & 0xff), char((count >> 8) & 0xff), char((count >> 16) & 0xff),
                      char((count >> 24) & 0xff)};
  out.write(cb, 4);
  for (const auto& f : mesh.faces) {
    const Vec<3>&a = mesh.vertices[f[0]], &b = mesh.vertices[f[1]], &c = mesh.vertices[f[2]];
    Vec<3> n = (b - a).cross(c - a);
    const double len = n.norm();
    if (len > 0) n /= len;
    for (int k = 0; k < 3; ++k) writeF32(out, static_cast<float>(n[k]));
    for (const Vec<3>* v : {&a, &b, &c})
      for (int k = 0; k < 3; ++k) writeF32(out, static_cast<float>((*v)[k]));
    out.put(0);
    out.put(0);
  }
}

void writeObj(const std::string& path, const TriMesh<3>& mesh) {
  std::ofstream out(path);
  if (!out) ioFail(path, "cannot open for writing");
  out.precision(17);
  for (const auto& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& f : mesh.faces)
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

TriMesh<2> readPolygon2(const std::string& path) {
  std::ifstream in(path);
  if (!in) ioFail(path, "cannot open");
  TriMesh<2> mesh;
  std::vector<int> loop;
  auto closeLoop = [&] {
    if (loop.empty()) return;
    if (loop.size() < 3) ioFail(path, "loop with fewer than 3 vertices");
    for (std::size_t k = 0; k < loop.size(); ++k)
      mesh.faces.push_back({loop[k], loop[(k + 1) % loop.size()]});
    loop.clear();
  };
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    Vec<2> v;
    if (ls >> v.x() >> v.y()) {
      loop.push_back(static_cast<int>(mesh.vertices.size()));
      mesh.vertices.push_back(v);
    } else {
      closeLoop();  // blank (or comment-only) line terminates the loop
    }
  }
  closeLoop();
  if (mesh.faces.empty()) ioFail(path, "no loops found");
  return mesh;
}

void writePolygon2(const std::string& path, const TriMesh<2>& mesh) {
  std::ofstream out(path);
  if (!out) ioFail(path, "cannot open for writing");
  out.precision(17);
  // Recover loops by following segment successor indices.
  std::map<int, int> next;
  for (const auto& f : mesh.faces) next[f[0]] = f[1];
  std::map<int, bool> done;
  for (const auto& f : mesh.faces) {
    if (done[f[0]]) continue;
    int v = f[0];
    do {
      done[v] = true;
      out << mesh.vertices[v].x() << ' ' << mesh.vertices[v].y() << '\n';
      v = next.at(v);
    } while (v != f[0]);
    out << '\n';
  }
}

template <>
TriMesh<3> readMesh<3>(const std::string& path) {
  return readMesh3(path);
}

template <>
TriMesh<2> readMesh<2>(const std::string& path) {
  return readPolygon2(path);
}

void writePathObj(const std::string& path, const std::vector<Vec<3>>& points) {
  std::ofstream out(path);
  if (!out) ioFail(path, "cannot open for writing");
  out.precision(17);
  for (const auto& p : points) out << "v " << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  out << "l";
  for (std::size_t k = 1; k <= points.size(); ++k) out << ' ' << k;
  out << '\n';
}

void writePathObj(const std::string& path, const std::vector<Vec<2>>& points) {
  std::vector<Vec<3>> lifted;
  lifted.reserve(points.size());
  for (const auto& p : points) lifted.push_back(Vec<3>(p.x(), p.y(), 0.0));
  writePathObj(path, lifted);
}

}  // namespace srp::io
