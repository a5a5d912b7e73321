#pragma once

// Plain-text mesh files:
//
//   VERTICES
//   <count>
//   x y            (one line per vertex)
//   CELLS
//   <count>
//   v0 v1 v2       (0-based, counter-clockwise)
//   BOUNDARY
//   <count>
//   va vb tag      (tag: wall | transparent | inflow | periodic:<id>)
//
// Lines starting with '#' and blank lines are ignored.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "swdg/mesh.hpp"

namespace swdg {

inline void write_mesh(std::ostream& os, const Mesh& mesh) {
  os << std::setprecision(17);
  os << "VERTICES\n" << mesh.num_vertices() << '\n';
  for (const auto& p : mesh.vertices()) os << p.x << ' ' << p.y << '\n';
  os << "CELLS\n" << mesh.num_cells() << '\n';
  for (const auto& c : mesh.cells()) os << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
  os << "BOUNDARY\n" << mesh.boundary().size() << '\n';
  for (const auto& b : mesh.boundary()) os << b.va << ' ' << b.vb << ' ' << to_string(b.tag) << '\n';
}

inline Mesh read_mesh(std::istream& is) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(is, line);) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    lines.push_back(line.substr(first, last - first + 1));
  }
  std::size_t pos = 0;
  auto section = [&](const std::string& name) -> std::size_t {
    if (pos >= lines.size() || lines[pos] != name) throw InputError("mesh file: expected section " + name);
    ++pos;
    if (pos >= lines.size()) throw InputError("mesh file: missing count after " + name);
    std::istringstream ss(lines[pos++]);
    long long n = -1;
    if (!(ss >> n) || n < 0) throw InputError("mesh file: invalid count in section " + name);
    if (pos + static_cast<std::size_t>(n) > lines.size())
      throw InputError("mesh file: section " + name + " is truncated");
    return static_cast<std::size_t>(n);
  };
  auto fail = [](const std::string& name, std::size_t i) {
    throw InputError("mesh file: malformed entry " + std::to_string(i) + " in section " + name);
  };

  std::vector<Vec2> verts(section("VERTICES"));
  for (std::size_t i = 0; i < verts.size(); ++i) {
    std::istringstream ss(lines[pos++]);
    std::string extra;
    if (!(ss >> verts[i].x >> verts[i].y) || (ss >> extra)) fail("VERTICES", i);
  }
  std::vector<std::array<int, 3>> cells(section("CELLS"));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    std::istringstream ss(lines[pos++]);
    std::string extra;
    if (!(ss >> cells[i][0] >> cells[i][1] >> cells[i][2]) || (ss >> extra)) fail("CELLS", i);
  }
  std::vector<BoundarySegment> boundary(section("BOUNDARY"));
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    std::istringstream ss(lines[pos++]);
    std::string tag, extra;
    if (!(ss >> boundary[i].va >> boundary[i].vb >> tag) || (ss >> extra)) fail("BOUNDARY", i);
    boundary[i].tag = parse_boundary_tag(tag);
  }
  if (pos != lines.size()) throw InputError("mesh file: unexpected content after BOUNDARY section");
  return Mesh::from_connectivity(std::move(verts), std::move(cells), std::move(boundary));
}

inline void save_mesh(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw InputError("cannot open mesh file for writing: " + path.string());
  write_mesh(os, mesh);
  if (!os) throw InputError("failed writing mesh file: " + path.string());
}

inline Mesh load_mesh(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open mesh file: " + path.string());
  return read_mesh(is);
}

}  // namespace swdg
