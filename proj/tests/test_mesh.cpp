#include <doctest.h>

#include <cmath>
#include <set>

#include "errors.hpp"
#include "mesh.hpp"
#include "triangle_io.hpp"

using namespace episeir;

namespace {

const char* kSingleTriangleNode =
    "3 2 0 0\n"
    "1 0.0 0.0\n"
    "2 1.0 0.0\n"
    "3 0.0 1.0\n";
const char* kSingleTriangleEle =
    "1 3 0\n"
    "1 1 2 3\n";

double edge_length(const Mesh& mesh, const MeshEdge& e) {
    const Vec2 d = mesh.vertices[e.b] - mesh.vertices[e.a];
    return std::hypot(d.x, d.y);
}

} // namespace

TEST_CASE("single triangle file") {
    const Mesh mesh = load_triangle_mesh(kSingleTriangleNode, kSingleTriangleEle);
    CHECK(mesh.vertex_count() == 3);
    CHECK(mesh.triangle_count() == 1);
    CHECK(mesh.total_area() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(mesh.boundary_edge_ids.size() == 3);
    for (int id : mesh.boundary_edge_ids) CHECK(mesh.edges[id].kind == EdgeKind::Outer);
}

TEST_CASE("unit square split into two triangles") {
    const char* node =
        "4 2 0 0\n"
        "1 0 0\n"
        "2 1 0\n"
        "3 1 1\n"
        "4 0 1\n";
    const char* ele =
        "2 3 0\n"
        "1 1 2 3\n"
        "2 1 3 4\n";
    const Mesh mesh = load_triangle_mesh(node, ele);
    CHECK(mesh.boundary_edge_ids.size() == 4);
    CHECK(mesh.edge_count() == 5);
    CHECK(mesh.total_area() == doctest::Approx(1.0));
}

TEST_CASE("zero-based indexing is detected") {
    const char* node =
        "3 2 0 0\n"
        "0 0.0 0.0\n"
        "1 1.0 0.0\n"
        "2 0.0 1.0\n";
    const char* ele =
        "1 3 0\n"
        "0 0 1 2\n";
    const Mesh mesh = load_triangle_mesh(node, ele);
    CHECK(mesh.triangle_count() == 1);
}

TEST_CASE("comment lines and attribute labels") {
    const char* node =
        "# generated\n"
        "3 2 0 0\n"
        "1 0.0 0.0\n"
        "2 1.0 0.0\n"
        "3 0.0 1.0\n";
    const char* ele =
        "1 3 1\n"
        "1 1 2 3 7\n";
    const Mesh mesh = load_triangle_mesh(node, ele);
    // Labels are normalized to run from 1.
    CHECK(mesh.triangle_labels[0] == 1);
}

TEST_CASE("parse errors carry line numbers") {
    CHECK_THROWS_AS(load_triangle_mesh("nonsense", kSingleTriangleEle), ParseError);
    CHECK_THROWS_AS(load_triangle_mesh(kSingleTriangleNode, "1 3 0\n1 1 2 9\n"), ParseError);
    // degenerate triangle: three collinear points
    const char* collinear_node =
        "3 2 0 0\n"
        "1 0 0\n"
        "2 1 0\n"
        "3 2 0\n";
    try {
        load_triangle_mesh(collinear_node, kSingleTriangleEle);
        FAIL("expected degenerate-triangle error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(std::string(e.what()).find("degenerate") != std::string::npos);
    }
    // header announces more vertices than present
    CHECK_THROWS_AS(load_triangle_mesh("5 2 0 0\n1 0 0\n", kSingleTriangleEle), ParseError);
}

TEST_CASE("triangles are reoriented counter-clockwise on load") {
    const char* ele_cw =
        "1 3 0\n"
        "1 1 3 2\n"; // clockwise ordering
    const Mesh mesh = load_triangle_mesh(kSingleTriangleNode, ele_cw);
    const auto& tri = mesh.triangles[0];
    const Vec2 d1 = mesh.vertices[tri[1]] - mesh.vertices[tri[0]];
    const Vec2 d2 = mesh.vertices[tri[2]] - mesh.vertices[tri[0]];
    CHECK(cross(d1, d2) > 0.0);
}

TEST_CASE("write/load round trip is exact") {
    const Mesh mesh = generate_rectangle_mesh(2.0, 1.0, 0.21, 1.0);
    const TriangleFileText text = write_triangle_mesh(mesh);
    const Mesh again = load_triangle_mesh(text.node, text.ele);
    REQUIRE(again.vertex_count() == mesh.vertex_count());
    REQUIRE(again.triangle_count() == mesh.triangle_count());
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        CHECK(again.vertices[v].x == doctest::Approx(mesh.vertices[v].x).epsilon(1e-12));
        CHECK(again.vertices[v].y == doctest::Approx(mesh.vertices[v].y).epsilon(1e-12));
    }
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        CHECK(again.triangles[t] == mesh.triangles[t]);
        CHECK(again.triangle_labels[t] == mesh.triangle_labels[t]);
    }
}

TEST_CASE("degree scaling at ingestion") {
    const Mesh mesh = load_triangle_mesh(kSingleTriangleNode, kSingleTriangleEle, kKmPerDegree);
    CHECK(mesh.total_area() == doctest::Approx(0.5 * kKmPerDegree * kKmPerDegree));
}

TEST_CASE("rectangle generator covers the requested area") {
    const Mesh mesh = generate_rectangle_mesh(2.0, 1.0, 0.5);
    CHECK(mesh.total_area() == doctest::Approx(2.0).epsilon(1e-12));
    for (int label : mesh.triangle_labels) CHECK(label == 1);
    CHECK_THROWS_AS(generate_rectangle_mesh(-1.0, 1.0, 0.5), InvalidArgument);
    CHECK_THROWS_AS(generate_rectangle_mesh(2.0, 1.0, 0.5, 2.5), InvalidArgument);
}

TEST_CASE("split rectangle labels the halves evenly") {
    const Mesh mesh = generate_rectangle_mesh(2.0, 1.0, 0.25, 1.0);
    double left = 0.0, right = 0.0;
    int n_right = 0;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        if (mesh.triangle_labels[t] == 1) left += mesh.tri_area[t];
        else {
            right += mesh.tri_area[t];
            ++n_right;
        }
    }
    CHECK(left == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(right == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(n_right * 2 == mesh.triangle_count());
}

TEST_CASE("fine rectangle mesh reaches production-scale triangle counts") {
    // 45,336 triangles is the published full-domain figure for ]0,2[ x ]0,1[.
    const Mesh mesh = generate_rectangle_mesh(2.0, 1.0, 0.01);
    CHECK(mesh.triangle_count() > 45336 * 0.85);
    CHECK(mesh.triangle_count() < 45336 * 1.15);
    // Euler consistency: V - E + T = 1 for a disk-like triangulation.
    CHECK(mesh.vertex_count() - mesh.edge_count() + mesh.triangle_count() == 1);
}

TEST_CASE("orientation invariant on generated meshes") {
    const Mesh mesh = generate_rectangle_mesh(1.3, 0.9, 0.17, 0.6);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        const Vec2 d1 = mesh.vertices[tri[1]] - mesh.vertices[tri[0]];
        const Vec2 d2 = mesh.vertices[tri[2]] - mesh.vertices[tri[0]];
        CHECK(cross(d1, d2) > 0.0);
    }
}

TEST_CASE("subdomain table partitions the area") {
    const Mesh mesh = label_by_x_bins(generate_rectangle_mesh(2.0, 1.0, 0.1), {0.4, 0.8, 1.2, 1.6});
    CHECK(mesh.label_count() == 5);
    const auto table = subdomain_table(mesh);
    double sum = 0.0;
    for (const auto& sd : table) sum += sd.area;
    CHECK(sum == doctest::Approx(mesh.total_area()).epsilon(1e-10));
    CHECK(table[0].centroid.x == doctest::Approx(0.2).epsilon(1e-9));
}

TEST_CASE("hybrid split marks the interface and conserves area") {
    const Mesh mesh = generate_rectangle_mesh(2.0, 1.0, 0.125, 1.0);
    const HybridSplit split = split_for_hybrid(mesh, {2});

    CHECK(split.omega2_area == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(split.pde_mesh.total_area() + split.omega2_area ==
          doctest::Approx(mesh.total_area()).epsilon(1e-10));

    double interface_length = 0.0;
    for (int id : split.interface_edge_ids) {
        const MeshEdge& e = split.pde_mesh.edges[id];
        CHECK(e.kind == EdgeKind::Interface);
        CHECK(split.pde_mesh.vertices[e.a].x == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(split.pde_mesh.vertices[e.b].x == doctest::Approx(1.0).epsilon(1e-12));
        interface_length += edge_length(split.pde_mesh, e);
    }
    CHECK(interface_length == doctest::Approx(1.0).epsilon(1e-12));

    // Every interface edge was interior in the original with one triangle on
    // each side of the split.
    std::set<std::pair<int, int>> interface_pairs;
    for (int id : split.interface_edge_ids) {
        const MeshEdge& e = split.pde_mesh.edges[id];
        interface_pairs.insert(std::minmax(split.vertex_from_original[e.a],
                                           split.vertex_from_original[e.b]));
    }
    size_t matched = 0;
    for (const MeshEdge& e : mesh.edges) {
        if (e.on_boundary()) continue;
        const bool left_removed = mesh.triangle_labels[e.tri_left] == 2;
        const bool right_removed = mesh.triangle_labels[e.tri_right] == 2;
        if (left_removed != right_removed) {
            CHECK(interface_pairs.count(std::minmax(e.a, e.b)) == 1);
            ++matched;
        }
    }
    CHECK(matched == split.interface_edge_ids.size());
}

TEST_CASE("hybrid split rejects bad label sets") {
    const Mesh mesh = generate_rectangle_mesh(2.0, 1.0, 0.25, 1.0);
    CHECK_THROWS_AS(split_for_hybrid(mesh, {}), InvalidArgument);
    CHECK_THROWS_AS(split_for_hybrid(mesh, {1, 2}), InvalidArgument);
    CHECK_THROWS_AS(split_for_hybrid(mesh, {3}), InvalidArgument);
}

TEST_CASE("field restriction follows the vertex map") {
    const Mesh mesh = generate_rectangle_mesh(2.0, 1.0, 0.5, 1.0);
    const HybridSplit split = split_for_hybrid(mesh, {2});
    std::vector<double> field(mesh.vertex_count());
    for (int v = 0; v < mesh.vertex_count(); ++v) field[v] = mesh.vertices[v].x;
    const std::vector<double> restricted = restrict_field(split, field);
    for (int v = 0; v < split.pde_mesh.vertex_count(); ++v)
        CHECK(restricted[v] == split.pde_mesh.vertices[v].x);
}
