#pragma once
#include <span>
#include <vector>

#include "mesh.hpp"
#include "sparse.hpp"

namespace episeir {

// Linear (P1) finite-element kernels on triangle meshes. Fields live on
// vertices; products of two P1 fields are integrated exactly.

// Mass matrix: entries \int phi_i phi_j dx, or \int phi_i phi_j n dx when a
// nodal weight field n is given (exact closed form for the cubic integrand).
SparseMatrix assemble_mass(const Mesh& mesh);
SparseMatrix assemble_mass_weighted(const Mesh& mesh, std::span<const double> weight);

// Stiffness matrix for div(D grad u), scalar or per-triangle diffusion D >= 0.
SparseMatrix assemble_stiffness(const Mesh& mesh, double diffusion);
SparseMatrix assemble_stiffness(const Mesh& mesh, std::span<const double> per_triangle_diffusion);

// Nodal areas \int phi_i dx (row sums of the mass matrix).
std::vector<double> lumped_mass(const Mesh& mesh);

// \int_{union of labeled subdomains} fraction * density dx, exact for P1*P1.
double integrate_weighted(const Mesh& mesh, std::span<const double> fraction,
                          std::span<const double> density, std::span<const int> labels);

// Sum over the given boundary edges of |e| * nu . D grad(field), with the
// gradient taken from the adjacent triangle and nu the outward normal of the
// mesh region. Edge ids must refer to boundary edges.
double boundary_flux(const Mesh& mesh, std::span<const double> field, double diffusion,
                     std::span<const int> edge_ids);

// Constant P1 gradient of a nodal field on one triangle.
Vec2 triangle_gradient(const Mesh& mesh, std::span<const double> field, int triangle);

// Midpoint (3-point Gauss) quadrature of an arbitrary integrand over labeled
// triangles; exact for quadratics. f is evaluated at edge midpoints.
template <typename F>
double integrate_function(const Mesh& mesh, std::span<const int> labels, F&& f) {
    std::vector<char> wanted(mesh.label_count() + 1, 0);
    for (int l : labels) wanted[l] = 1;
    double sum = 0.0;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        if (!wanted[mesh.triangle_labels[t]]) continue;
        const auto& tri = mesh.triangles[t];
        const Vec2& p0 = mesh.vertices[tri[0]];
        const Vec2& p1 = mesh.vertices[tri[1]];
        const Vec2& p2 = mesh.vertices[tri[2]];
        const Vec2 m01 = 0.5 * (p0 + p1);
        const Vec2 m12 = 0.5 * (p1 + p2);
        const Vec2 m20 = 0.5 * (p2 + p0);
        sum += mesh.tri_area[t] / 3.0 * (f(m01, t) + f(m12, t) + f(m20, t));
    }
    return sum;
}

} // namespace episeir
