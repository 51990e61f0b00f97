#pragma once

// Flat binary field files: 8-byte magic "MLMCFLD1", int32 level, int32
// domain (0 unit, 1 embedded), int32 cells per axis, double h, double
// origin[3], then (n+1)^3 little-endian doubles in vertex order (x fastest).

#include <filesystem>
#include <iosfwd>

#include "mlmc/pde/grid.hpp"

namespace mlmc::pde {

void write_field(std::ostream& os, const VertexField& f);
VertexField read_field(std::istream& is);
void write_field(const std::filesystem::path& path, const VertexField& f);
VertexField read_field(const std::filesystem::path& path);

// CSV rows "i,j,x,y,value" of the plane z = k.
void write_slice_csv(std::ostream& os, const VertexField& f, int k);

}  // namespace mlmc::pde
