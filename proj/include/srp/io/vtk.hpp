#pragma once

#include <string>

#include "srp/voxel_grid.hpp"

namespace srp::io {

/// Legacy VTK structured-points dump of a scalar grid (debug visualization).
void writeVtk(const std::string& path, const VoxelGrid<3>& grid, const std::string& fieldName);
void writeVtk(const std::string& path, const VoxelGrid<2>& grid, const std::string& fieldName);

}  // namespace srp::io
