#pragma once

#include <iosfwd>
#include <string>

#include "emdec/mesh.hpp"

namespace emdec {

// Text format:
//   dec-mesh <dimension>
//   vertices <n>
//   <x> <y> [<z>]        (n lines, 17 significant digits)
//   cells <m>
//   <i0> <i1> ...        (m lines, 0-based vertex indices)

void write_mesh(std::ostream& out, const MeshComplex& mesh);
void write_mesh_file(const std::string& path, const MeshComplex& mesh);

/// Parses and assembles a mesh. Well-centredness is not enforced here so a
/// defective mesh can still be handed to validate(); structural defects
/// throw InvalidMesh, syntax errors throw IoError with the line number.
MeshComplex read_mesh(std::istream& in);
MeshComplex read_mesh_file(const std::string& path);

}  // namespace emdec
