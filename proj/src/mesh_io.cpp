#include "emdec/mesh_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "emdec/error.hpp"

namespace emdec {

void write_mesh(std::ostream& out, const MeshComplex& mesh) {
  const int n = mesh.dimension();
  out << "dec-mesh " << n << '\n';
  out << "vertices " << mesh.num_vertices() << '\n';
  out << std::setprecision(17);
  for (const Point& p : mesh.vertices()) {
    for (int a = 0; a < n; ++a) out << (a ? " " : "") << p[a];
    out << '\n';
  }
  out << "cells " << mesh.num_cells(n) << '\n';
  for (Index c = 0; c < mesh.num_cells(n); ++c) {
    const auto& verts = mesh.cell(n, c);
    for (std::size_t i = 0; i < verts.size(); ++i) out << (i ? " " : "") << verts[i];
    out << '\n';
  }
}

void write_mesh_file(const std::string& path, const MeshComplex& mesh) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path + " for writing");
  write_mesh(out, mesh);
}

namespace {

struct LineReader {
  std::istream& in;
  int line_no = 0;

  std::istringstream next(const char* what) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return std::istringstream(line);
    }
    throw Error(ErrorKind::IoError,
                "line " + std::to_string(line_no) + ": unexpected end of file, expected " + what);
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::IoError, "line " + std::to_string(line_no) + ": " + msg);
  }
};

}  // namespace

MeshComplex read_mesh(std::istream& in) {
  LineReader r{in};
  std::string tag;
  int dim = 0;
  auto header = r.next("header");
  if (!(header >> tag >> dim) || tag != "dec-mesh") r.fail("expected 'dec-mesh <dimension>'");
  if (dim != 2 && dim != 3) r.fail("dimension must be 2 or 3");

  long long count = 0;
  auto vh = r.next("vertices header");
  if (!(vh >> tag >> count) || tag != "vertices" || count < 0) r.fail("expected 'vertices <n>'");
  std::vector<Point> vertices(static_cast<std::size_t>(count), Point{});
  for (auto& p : vertices) {
    auto ls = r.next("vertex coordinates");
    for (int a = 0; a < dim; ++a)
      if (!(ls >> p[a])) r.fail("expected " + std::to_string(dim) + " coordinates");
    std::string extra;
    if (ls >> extra) r.fail("trailing token '" + extra + "'");
  }

  auto ch = r.next("cells header");
  if (!(ch >> tag >> count) || tag != "cells" || count < 0) r.fail("expected 'cells <m>'");
  std::vector<std::vector<Index>> cells(static_cast<std::size_t>(count));
  for (auto& c : cells) {
    auto ls = r.next("cell tuple");
    long long v = 0;
    while (ls >> v) c.push_back(static_cast<Index>(v));
    if (!ls.eof()) r.fail("malformed vertex index");
    if (c.empty()) r.fail("empty cell");
  }
  return assemble_complex(dim, std::move(vertices), cells);
}

MeshComplex read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  return read_mesh(in);
}

}  // namespace emdec
