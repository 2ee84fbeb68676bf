#include "vtk_io.hpp"

#include <cstdio>

#include "csv_io.hpp"
#include "errors.hpp"

namespace episeir {

std::string vtk_snapshot(const Mesh& mesh, const SeirState& state, const std::string& title) {
    state.validate(mesh, 1e-3);
    std::string out;
    out.reserve(64 * mesh.vertex_count());
    out += "# vtk DataFile Version 3.0\n";
    out += title + "\n";
    out += "ASCII\nDATASET UNSTRUCTURED_GRID\n";

    out += "POINTS " + std::to_string(mesh.vertex_count()) + " double\n";
    for (const Vec2& v : mesh.vertices)
        out += format_double(v.x) + " " + format_double(v.y) + " 0\n";

    out += "CELLS " + std::to_string(mesh.triangle_count()) + " " +
           std::to_string(4 * mesh.triangle_count()) + "\n";
    for (const auto& tri : mesh.triangles)
        out += "3 " + std::to_string(tri[0]) + " " + std::to_string(tri[1]) + " " +
               std::to_string(tri[2]) + "\n";
    out += "CELL_TYPES " + std::to_string(mesh.triangle_count()) + "\n";
    for (int t = 0; t < mesh.triangle_count(); ++t) out += "5\n";

    out += "CELL_DATA " + std::to_string(mesh.triangle_count()) + "\n";
    out += "SCALARS subdomain int 1\nLOOKUP_TABLE default\n";
    for (int label : mesh.triangle_labels) out += std::to_string(label) + "\n";

    out += "POINT_DATA " + std::to_string(mesh.vertex_count()) + "\n";
    auto scalars = [&out](const std::string& name, const std::vector<double>& field) {
        out += "SCALARS " + name + " double 1\nLOOKUP_TABLE default\n";
        for (double v : field) out += format_double(v) + "\n";
    };
    scalars("susceptible", state.s);
    scalars("exposed", state.e);
    scalars("infectious", state.i);
    scalars("removed", state.r);
    scalars("population_density", state.n);
    std::vector<double> infectious_density(state.i.size());
    for (size_t v = 0; v < infectious_density.size(); ++v)
        infectious_density[v] = state.i[v] * state.n[v];
    scalars("infectious_density", infectious_density);
    return out;
}

void write_vtk_snapshot(const Mesh& mesh, const SeirState& state, const std::string& path,
                        const std::string& title) {
    write_text_file(path, vtk_snapshot(mesh, state, title));
}

} // namespace episeir
