#include "mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "errors.hpp"

namespace episeir {

int Mesh::label_count() const {
    int l = 0;
    for (int lab : triangle_labels) l = std::max(l, lab);
    return l;
}

double Mesh::total_area() const {
    double a = 0.0;
    for (double t : tri_area) a += t;
    return a;
}

std::vector<int> Mesh::boundary_edges_of_kind(EdgeKind kind) const {
    std::vector<int> out;
    for (int id : boundary_edge_ids)
        if (edges[id].kind == kind) out.push_back(id);
    return out;
}

namespace {

double signed_area(const Vec2& p0, const Vec2& p1, const Vec2& p2) {
    return 0.5 * cross(p1 - p0, p2 - p0);
}

} // namespace

Mesh build_mesh(std::vector<Vec2> vertices,
                std::vector<std::array<int, 3>> triangles,
                std::vector<int> labels) {
    const int nv = static_cast<int>(vertices.size());
    const int nt = static_cast<int>(triangles.size());
    if (nv < 3 || nt < 1) throw InvalidArgument("mesh needs at least 3 vertices and 1 triangle");

    if (labels.empty()) labels.assign(nt, 1);
    if (static_cast<int>(labels.size()) != nt)
        throw InvalidArgument("triangle label count does not match triangle count");

    Mesh mesh;
    mesh.vertices = std::move(vertices);
    mesh.triangles = std::move(triangles);
    mesh.tri_area.resize(nt);

    for (int t = 0; t < nt; ++t) {
        auto& tri = mesh.triangles[t];
        for (int k = 0; k < 3; ++k)
            if (tri[k] < 0 || tri[k] >= nv)
                throw InvalidArgument("triangle " + std::to_string(t) + ": vertex index out of range");
        const Vec2& p0 = mesh.vertices[tri[0]];
        const Vec2& p1 = mesh.vertices[tri[1]];
        const Vec2& p2 = mesh.vertices[tri[2]];
        double a = signed_area(p0, p1, p2);
        if (a < 0.0) {
            std::swap(tri[1], tri[2]);
            a = -a;
        }
        const double e1 = std::hypot(p1.x - p0.x, p1.y - p0.y);
        const double e2 = std::hypot(p2.x - p0.x, p2.y - p0.y);
        if (!(a > 1e-14 * std::max(1.0, e1 * e2)))
            throw InvalidArgument("triangle " + std::to_string(t) + " is degenerate (zero area)");
        mesh.tri_area[t] = a;
    }

    // Normalize labels to a contiguous 1..L range, preserving ascending order.
    {
        std::vector<int> sorted(labels);
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        std::map<int, int> remap;
        for (size_t i = 0; i < sorted.size(); ++i) remap[sorted[i]] = static_cast<int>(i) + 1;
        mesh.triangle_labels.resize(nt);
        for (int t = 0; t < nt; ++t) mesh.triangle_labels[t] = remap[labels[t]];
    }

    // Edge extraction. CCW orientation means the directed edges (v0,v1),
    // (v1,v2), (v2,v0) traverse each triangle boundary counter-clockwise.
    std::map<std::pair<int, int>, int> edge_index;
    for (int t = 0; t < nt; ++t) {
        const auto& tri = mesh.triangles[t];
        for (int k = 0; k < 3; ++k) {
            const int a = tri[k];
            const int b = tri[(k + 1) % 3];
            const auto key = std::minmax(a, b);
            auto it = edge_index.find(key);
            if (it == edge_index.end()) {
                MeshEdge e;
                e.a = a;
                e.b = b;
                e.tri_left = t;
                edge_index.emplace(key, static_cast<int>(mesh.edges.size()));
                mesh.edges.push_back(e);
            } else {
                MeshEdge& e = mesh.edges[it->second];
                if (e.tri_right >= 0)
                    throw InvalidArgument("non-manifold edge shared by more than two triangles");
                e.tri_right = t;
            }
        }
    }
    for (int id = 0; id < static_cast<int>(mesh.edges.size()); ++id)
        if (mesh.edges[id].on_boundary()) mesh.boundary_edge_ids.push_back(id);

    std::vector<char> used(nv, 0);
    for (const auto& tri : mesh.triangles)
        for (int v : tri) used[v] = 1;
    for (int v = 0; v < nv; ++v)
        if (!used[v]) throw InvalidArgument("vertex " + std::to_string(v) + " belongs to no triangle");

    return mesh;
}

std::vector<Subdomain> subdomain_table(const Mesh& mesh) {
    std::vector<Subdomain> table(mesh.label_count());
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        Subdomain& sd = table[mesh.triangle_labels[t] - 1];
        const auto& tri = mesh.triangles[t];
        const double a = mesh.tri_area[t];
        const Vec2 c = (1.0 / 3.0) * (mesh.vertices[tri[0]] + mesh.vertices[tri[1]] + mesh.vertices[tri[2]]);
        sd.area += a;
        sd.centroid = sd.centroid + a * c;
        sd.triangles.push_back(t);
    }
    for (auto& sd : table) {
        if (sd.area <= 0.0) throw InvalidArgument("empty subdomain label");
        sd.centroid = (1.0 / sd.area) * sd.centroid;
    }
    return table;
}

std::vector<int> all_labels(const Mesh& mesh) {
    std::vector<int> labels(mesh.label_count());
    for (size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i) + 1;
    return labels;
}

Mesh generate_rectangle_mesh(double width, double height, double target_edge_length,
                             std::optional<double> split_x) {
    if (!(width > 0.0) || !(height > 0.0) || !(target_edge_length > 0.0))
        throw InvalidArgument("rectangle dimensions and edge length must be positive");
    if (split_x && !(*split_x > 0.0 && *split_x < width))
        throw InvalidArgument("split position must lie strictly inside the rectangle");

    std::vector<double> xs;
    if (split_x) {
        const double sx = *split_x;
        const int nl = std::max<long>(1, std::lround(sx / target_edge_length));
        const int nr = std::max<long>(1, std::lround((width - sx) / target_edge_length));
        for (int i = 0; i <= nl; ++i) xs.push_back(sx * i / nl);
        for (int i = 1; i <= nr; ++i) xs.push_back(sx + (width - sx) * i / nr);
    } else {
        const int nx = std::max<long>(1, std::lround(width / target_edge_length));
        for (int i = 0; i <= nx; ++i) xs.push_back(width * i / nx);
    }
    const int ny = std::max<long>(1, std::lround(height / target_edge_length));
    std::vector<double> ys;
    for (int j = 0; j <= ny; ++j) ys.push_back(height * j / ny);

    const int nxp = static_cast<int>(xs.size());
    std::vector<Vec2> vertices;
    vertices.reserve(nxp * (ny + 1));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i < nxp; ++i) vertices.push_back({xs[i], ys[j]});

    auto vid = [nxp](int i, int j) { return j * nxp + i; };
    std::vector<std::array<int, 3>> triangles;
    std::vector<int> labels;
    triangles.reserve(2 * (nxp - 1) * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i + 1 < nxp; ++i) {
            const int v00 = vid(i, j), v10 = vid(i + 1, j);
            const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
            triangles.push_back({v00, v10, v11});
            triangles.push_back({v00, v11, v01});
            int label = 1;
            if (split_x) {
                const double cx = (xs[i] + xs[i + 1]) * 0.5;
                label = cx < *split_x ? 1 : 2;
            }
            labels.push_back(label);
            labels.push_back(label);
        }
    }
    return build_mesh(std::move(vertices), std::move(triangles), std::move(labels));
}

Mesh label_by_x_bins(const Mesh& mesh, const std::vector<double>& cuts) {
    for (size_t i = 1; i < cuts.size(); ++i)
        if (!(cuts[i] > cuts[i - 1])) throw InvalidArgument("x-bin cuts must be strictly increasing");
    std::vector<int> labels(mesh.triangle_count());
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        const double cx = (mesh.vertices[tri[0]].x + mesh.vertices[tri[1]].x + mesh.vertices[tri[2]].x) / 3.0;
        int bin = 0;
        while (bin < static_cast<int>(cuts.size()) && cx >= cuts[bin]) ++bin;
        labels[t] = bin + 1;
    }
    return build_mesh(mesh.vertices, mesh.triangles, std::move(labels));
}

HybridSplit split_for_hybrid(const Mesh& mesh, const std::set<int>& ode_labels) {
    if (ode_labels.empty()) throw InvalidArgument("hybrid split: no ODE subdomain labels given");
    const int nl = mesh.label_count();
    for (int lab : ode_labels)
        if (lab < 1 || lab > nl)
            throw InvalidArgument("hybrid split: unknown subdomain label " + std::to_string(lab));
    if (static_cast<int>(ode_labels.size()) >= nl)
        throw InvalidArgument("hybrid split: ODE labels cover the whole mesh, no PDE region left");

    auto removed = [&](int t) { return ode_labels.count(mesh.triangle_labels[t]) > 0; };

    // The regions must share at least one edge for flux coupling.
    bool touching = false;
    for (const MeshEdge& e : mesh.edges) {
        if (e.on_boundary()) continue;
        if (removed(e.tri_left) != removed(e.tri_right)) {
            touching = true;
            break;
        }
    }
    if (!touching)
        throw InvalidArgument("hybrid split: ODE region shares no edge with the PDE region");

    HybridSplit split;
    std::vector<int> vertex_to_new(mesh.vertex_count(), -1);
    std::vector<std::array<int, 3>> kept_tris;
    std::vector<int> kept_labels;
    std::vector<char> vertex_used(mesh.vertex_count(), 0);

    for (int t = 0; t < mesh.triangle_count(); ++t) {
        if (removed(t)) {
            split.removed_triangles.push_back(t);
            split.omega2_area += mesh.tri_area[t];
        } else {
            for (int v : mesh.triangles[t]) vertex_used[v] = 1;
        }
    }
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        if (vertex_used[v]) {
            vertex_to_new[v] = static_cast<int>(split.vertex_from_original.size());
            split.vertex_from_original.push_back(v);
        }
    }
    std::vector<Vec2> new_vertices(split.vertex_from_original.size());
    for (size_t i = 0; i < new_vertices.size(); ++i)
        new_vertices[i] = mesh.vertices[split.vertex_from_original[i]];

    for (int t = 0; t < mesh.triangle_count(); ++t) {
        if (removed(t)) continue;
        const auto& tri = mesh.triangles[t];
        kept_tris.push_back({vertex_to_new[tri[0]], vertex_to_new[tri[1]], vertex_to_new[tri[2]]});
        kept_labels.push_back(mesh.triangle_labels[t]);
    }
    {
        std::vector<int> kept_unique(kept_labels);
        std::sort(kept_unique.begin(), kept_unique.end());
        kept_unique.erase(std::unique(kept_unique.begin(), kept_unique.end()), kept_unique.end());
        split.label_from_original = kept_unique;
    }

    split.pde_mesh = build_mesh(std::move(new_vertices), std::move(kept_tris), std::move(kept_labels));

    // Former interior edges between the regions become Interface boundary.
    std::set<std::pair<int, int>> original_boundary;
    for (int id : mesh.boundary_edge_ids) {
        const MeshEdge& e = mesh.edges[id];
        original_boundary.insert(std::minmax(e.a, e.b));
    }
    for (int id : split.pde_mesh.boundary_edge_ids) {
        MeshEdge& e = split.pde_mesh.edges[id];
        const auto orig = std::minmax(split.vertex_from_original[e.a], split.vertex_from_original[e.b]);
        if (!original_boundary.count(orig)) {
            e.kind = EdgeKind::Interface;
            split.interface_edge_ids.push_back(id);
        }
    }
    return split;
}

std::vector<double> restrict_field(const HybridSplit& split, const std::vector<double>& field) {
    std::vector<double> out(split.vertex_from_original.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = field[split.vertex_from_original[i]];
    return out;
}

} // namespace episeir
