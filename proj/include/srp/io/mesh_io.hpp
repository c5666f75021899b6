#pragma once

#include <string>

#include "srp/tri_mesh.hpp"

namespace srp::io {

/// 3D mesh readers/writers. STL format (binary vs ASCII) is auto-detected;
/// OBJ is selected by extension. Vertices are welded exactly on read so the
/// result has shared topology for watertightness checks.
TriMesh<3> readMesh3(const std::string& path);
void writeStlBinary(const std::string& path, const TriMesh<3>& mesh);
void writeObj(const std::string& path, const TriMesh<3>& mesh);

/// 2D polygon text format: one "x y" vertex per line, one closed loop per
/// blank-line-separated block, '#' comments. CCW loops enclose material, CW
/// loops cut holes.
TriMesh<2> readPolygon2(const std::string& path);
void writePolygon2(const std::string& path, const TriMesh<2>& mesh);

/// Dispatch by extension: .stl/.obj → 3D; anything else → 2D polygon text.
template <int D>
TriMesh<D> readMesh(const std::string& path);

/// Tool-tip polyline trace for external viewers (OBJ line elements).
void writePathObj(const std::string& path, const std::vector<Vec<3>>& points);
void writePathObj(const std::string& path, const std::vector<Vec<2>>& points);

}  // namespace srp::io
