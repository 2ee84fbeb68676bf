#pragma once
#include <array>
#include <optional>
#include <set>
#include <vector>

namespace episeir {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

enum class EdgeKind { Outer, Interface };

// Unique mesh edge. Boundary edges have tri_right == -1 and are oriented so
// that (a, b) runs counter-clockwise along tri_left; the outward normal of
// the mesh region is then (d.y, -d.x)/|d| with d = b - a.
struct MeshEdge {
    int a = -1;
    int b = -1;
    int tri_left = -1;
    int tri_right = -1;
    EdgeKind kind = EdgeKind::Outer;

    bool on_boundary() const { return tri_right < 0; }
};

// Immutable 2D triangulation. Triangles are counter-clockwise, subdomain
// labels run contiguously from 1.
struct Mesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<int> triangle_labels;
    std::vector<MeshEdge> edges;
    std::vector<int> boundary_edge_ids; // indices into edges
    std::vector<double> tri_area;       // positive, cached at build

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int triangle_count() const { return static_cast<int>(triangles.size()); }
    int edge_count() const { return static_cast<int>(edges.size()); }
    int label_count() const;
    double total_area() const;

    // Edge ids of boundary edges with the given kind.
    std::vector<int> boundary_edges_of_kind(EdgeKind kind) const;
};

// Orients triangles, extracts edges and boundary, normalizes labels to 1..L.
// Labels may be empty (everything becomes subdomain 1). Throws InvalidArgument
// on degenerate triangles, out-of-range indices, or non-manifold edges.
Mesh build_mesh(std::vector<Vec2> vertices,
                std::vector<std::array<int, 3>> triangles,
                std::vector<int> labels = {});

struct Subdomain {
    double area = 0.0;
    Vec2 centroid;
    std::vector<int> triangles;
};

// One entry per label, index 0 <-> label 1.
std::vector<Subdomain> subdomain_table(const Mesh& mesh);

std::vector<int> all_labels(const Mesh& mesh);

// Structured triangulation of ]0,width[ x ]0,height[ with two triangles per
// grid cell. When split_x is given, grid nodes are placed exactly on the
// split line and triangles are labeled 1 (left) / 2 (right).
Mesh generate_rectangle_mesh(double width, double height, double target_edge_length,
                             std::optional<double> split_x = std::nullopt);

// Relabels triangles by x-bins: centroid.x < cuts[0] -> 1, next bin -> 2, ...
// cuts must be strictly increasing. Used to carve synthetic provinces.
Mesh label_by_x_bins(const Mesh& mesh, const std::vector<double>& cuts);

struct HybridSplit {
    Mesh pde_mesh;                        // interface edges marked EdgeKind::Interface
    std::vector<int> vertex_from_original; // pde vertex -> original vertex
    std::vector<int> removed_triangles;    // original triangle ids of the ODE region
    std::vector<int> label_from_original;  // pde label (1-based index 0..) -> original label
    double omega2_area = 0.0;
    std::vector<int> interface_edge_ids;   // edge ids in pde_mesh
};

// Removes the triangles with the given labels and re-marks the former
// interior edges between the two regions as Interface on the retained mesh.
HybridSplit split_for_hybrid(const Mesh& mesh, const std::set<int>& ode_labels);

// Restricts a per-vertex field of the original mesh onto the split PDE mesh.
std::vector<double> restrict_field(const HybridSplit& split, const std::vector<double>& field);

} // namespace episeir
