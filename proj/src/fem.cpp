#include "fem.hpp"

#include <cmath>

#include "errors.hpp"

namespace episeir {

namespace {

void check_field_size(const Mesh& mesh, std::span<const double> field, const char* name) {
    if (static_cast<int>(field.size()) != mesh.vertex_count())
        throw InvalidArgument(std::string(name) + " length does not match vertex count");
}

// Gradients of the three barycentric basis functions (constant per triangle).
std::array<Vec2, 3> basis_gradients(const Mesh& mesh, int t) {
    const auto& tri = mesh.triangles[t];
    const Vec2& p0 = mesh.vertices[tri[0]];
    const Vec2& p1 = mesh.vertices[tri[1]];
    const Vec2& p2 = mesh.vertices[tri[2]];
    const double inv2a = 1.0 / (2.0 * mesh.tri_area[t]);
    return {Vec2{(p1.y - p2.y) * inv2a, (p2.x - p1.x) * inv2a},
            Vec2{(p2.y - p0.y) * inv2a, (p0.x - p2.x) * inv2a},
            Vec2{(p0.y - p1.y) * inv2a, (p1.x - p0.x) * inv2a}};
}

} // namespace

SparseMatrix assemble_mass(const Mesh& mesh) {
    std::vector<SparseMatrix::Triplet> triplets;
    triplets.reserve(9 * mesh.triangle_count());
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        const double a12 = mesh.tri_area[t] / 12.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                triplets.push_back({tri[i], tri[j], (i == j ? 2.0 : 1.0) * a12});
    }
    return SparseMatrix::from_triplets(mesh.vertex_count(), std::move(triplets));
}

SparseMatrix assemble_mass_weighted(const Mesh& mesh, std::span<const double> weight) {
    check_field_size(mesh, weight, "weight field");
    // \int phi_i phi_j phi_k dx = 2A * 1!1!1!/5! per distinct triple; the
    // closed form below covers all multiplicities (exact for P1 weights).
    std::vector<SparseMatrix::Triplet> triplets;
    triplets.reserve(9 * mesh.triangle_count());
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        const double a = mesh.tri_area[t];
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                double entry = 0.0;
                for (int k = 0; k < 3; ++k) {
                    int mult = 1 + (i == j) + (j == k) + (i == k);
                    // multiplicity: all distinct -> A/60, one pair -> A/30, triple -> A/10
                    double f;
                    if (mult == 1) f = a / 60.0;
                    else if (mult == 2) f = a / 30.0;
                    else f = a / 10.0;
                    entry += f * weight[tri[k]];
                }
                triplets.push_back({tri[i], tri[j], entry});
            }
        }
    }
    return SparseMatrix::from_triplets(mesh.vertex_count(), std::move(triplets));
}

SparseMatrix assemble_stiffness(const Mesh& mesh, std::span<const double> per_triangle_diffusion) {
    if (static_cast<int>(per_triangle_diffusion.size()) != mesh.triangle_count())
        throw InvalidArgument("per-triangle diffusion length does not match triangle count");
    std::vector<SparseMatrix::Triplet> triplets;
    triplets.reserve(9 * mesh.triangle_count());
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const double d = per_triangle_diffusion[t];
        if (d < 0.0) throw InvalidArgument("negative diffusion coefficient");
        const auto& tri = mesh.triangles[t];
        const auto grad = basis_gradients(mesh, t);
        const double da = d * mesh.tri_area[t];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                triplets.push_back({tri[i], tri[j], da * dot(grad[i], grad[j])});
    }
    return SparseMatrix::from_triplets(mesh.vertex_count(), std::move(triplets));
}

SparseMatrix assemble_stiffness(const Mesh& mesh, double diffusion) {
    if (diffusion < 0.0) throw InvalidArgument("negative diffusion coefficient");
    std::vector<double> d(mesh.triangle_count(), diffusion);
    return assemble_stiffness(mesh, d);
}

std::vector<double> lumped_mass(const Mesh& mesh) {
    std::vector<double> areas(mesh.vertex_count(), 0.0);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const double third = mesh.tri_area[t] / 3.0;
        for (int v : mesh.triangles[t]) areas[v] += third;
    }
    return areas;
}

double integrate_weighted(const Mesh& mesh, std::span<const double> fraction,
                          std::span<const double> density, std::span<const int> labels) {
    check_field_size(mesh, fraction, "fraction field");
    check_field_size(mesh, density, "density field");
    if (labels.empty()) throw InvalidArgument("integrate_weighted: empty label set");
    std::vector<char> wanted(mesh.label_count() + 1, 0);
    for (int l : labels) {
        if (l < 1 || l > mesh.label_count()) throw InvalidArgument("integrate_weighted: unknown label");
        wanted[l] = 1;
    }
    double sum = 0.0;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        if (!wanted[mesh.triangle_labels[t]]) continue;
        const auto& tri = mesh.triangles[t];
        const double u0 = fraction[tri[0]], u1 = fraction[tri[1]], u2 = fraction[tri[2]];
        const double v0 = density[tri[0]], v1 = density[tri[1]], v2 = density[tri[2]];
        // u^T M_loc v with M_loc = A/12 [[2,1,1],[1,2,1],[1,1,2]]
        sum += mesh.tri_area[t] / 12.0 *
               (2.0 * (u0 * v0 + u1 * v1 + u2 * v2) + u0 * v1 + u0 * v2 + u1 * v0 + u1 * v2 +
                u2 * v0 + u2 * v1);
    }
    return sum;
}

Vec2 triangle_gradient(const Mesh& mesh, std::span<const double> field, int triangle) {
    const auto& tri = mesh.triangles[triangle];
    const auto grad = basis_gradients(mesh, triangle);
    Vec2 g{0.0, 0.0};
    for (int k = 0; k < 3; ++k) {
        g.x += field[tri[k]] * grad[k].x;
        g.y += field[tri[k]] * grad[k].y;
    }
    return g;
}

double boundary_flux(const Mesh& mesh, std::span<const double> field, double diffusion,
                     std::span<const int> edge_ids) {
    check_field_size(mesh, field, "field");
    double flux = 0.0;
    for (int id : edge_ids) {
        if (id < 0 || id >= mesh.edge_count()) throw InvalidArgument("boundary_flux: bad edge id");
        const MeshEdge& e = mesh.edges[id];
        if (!e.on_boundary()) throw InvalidArgument("boundary_flux: edge is not on the boundary");
        const Vec2 d = mesh.vertices[e.b] - mesh.vertices[e.a];
        const double len = std::hypot(d.x, d.y);
        // (a,b) runs CCW along the adjacent triangle, so the outward normal
        // is the right-hand perpendicular.
        const Vec2 normal{d.y / len, -d.x / len};
        const Vec2 grad = triangle_gradient(mesh, field, e.tri_left);
        flux += len * diffusion * dot(normal, grad);
    }
    return flux;
}

} // namespace episeir
