#pragma once
#include <string>

#include "mesh.hpp"
#include "seir.hpp"

namespace episeir {

// Legacy ASCII VTK unstructured-grid snapshot with point data s, e, i, r, n
// and the infectious density i*n, plus subdomain labels as cell data.
std::string vtk_snapshot(const Mesh& mesh, const SeirState& state, const std::string& title);
void write_vtk_snapshot(const Mesh& mesh, const SeirState& state, const std::string& path,
                        const std::string& title = "episeir snapshot");

} // namespace episeir
