#include "srp/io/vtk.hpp"

#include <fstream>

#include "srp/core.hpp"

namespace srp::io {

namespace {

template <int D>
void writeVtkImpl(const std::string& path, const VoxelGrid<D>& grid, const std::string& fieldName) {
  std::ofstream out(path);
  if (!out) raise(Errc::IoError, path + ": cannot open for writing");
  out.precision(17);
  const auto& f = grid.frame;
  const int nz = (D == 3) ? f.dims[D - 1] : 1;
  out << "# vtk DataFile Version 3.0\n" << fieldName << "\nASCII\nDATASET STRUCTURED_POINTS\n";
  out << "DIMENSIONS " << f.dims[0] << ' ' << f.dims[1] << ' ' << nz << '\n';
  // Cell-center sample positions.
  out << "ORIGIN " << f.origin[0] + 0.5 * f.spacing << ' ' << f.origin[1] + 0.5 * f.spacing << ' '
      << (D == 3 ? f.origin[D - 1] + 0.5 * f.spacing : 0.0) << '\n';
  out << "SPACING " << f.spacing << ' ' << f.spacing << ' ' << f.spacing << '\n';
  out << "POINT_DATA " << f.cellCount() << '\n';
  out << "SCALARS " << fieldName << " double 1\nLOOKUP_TABLE default\n";
  for (Index lin = 0; lin < f.cellCount(); ++lin) out << grid.values[lin] << '\n';
}

}  // namespace

void writeVtk(const std::string& path, const VoxelGrid<3>& grid, const std::string& fieldName) {
  writeVtkImpl(path, grid, fieldName);
}
void writeVtk(const std::string& path, const VoxelGrid<2>& grid, const std::string& fieldName) {
  writeVtkImpl(path, grid, fieldName);
}

}  // namespace srp::io
