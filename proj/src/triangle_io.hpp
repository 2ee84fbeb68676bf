#pragma once
#include <string>

#include "mesh.hpp"

namespace episeir {

// Reader/writer for the Triangle ASCII .node/.ele mesh format. Comment lines
// start with '#'. Both 0- and 1-based files are accepted on read (detected
// from the first vertex index); files are written 1-based. The first element
// attribute, when present, is taken as the subdomain label.
Mesh load_triangle_mesh(const std::string& node_text, const std::string& ele_text,
                        double coordinate_scale = 1.0);

struct TriangleFileText {
    std::string node;
    std::string ele;
};

TriangleFileText write_triangle_mesh(const Mesh& mesh);

Mesh load_triangle_mesh_files(const std::string& node_path, const std::string& ele_path,
                              double coordinate_scale = 1.0);
void write_triangle_mesh_files(const Mesh& mesh, const std::string& node_path,
                               const std::string& ele_path);

// 111.3 km per degree, applied to geographic meshes at ingestion.
inline constexpr double kKmPerDegree = 111.3;

} // namespace episeir
