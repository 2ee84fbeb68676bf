#include "triangle_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace episeir {

namespace {

struct Tokenized {
    long line_number;
    std::vector<std::string> tokens;
};

// Splits into whitespace-separated tokens, dropping blank and comment lines
// but remembering original line numbers for error reporting.
std::vector<Tokenized> tokenize(const std::string& text) {
    std::vector<Tokenized> out;
    std::istringstream stream(text);
    std::string line;
    long line_number = 0;
    while (std::getline(stream, line)) {
        ++line_number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        Tokenized tk{line_number, {}};
        std::string tok;
        while (ls >> tok) tk.tokens.push_back(tok);
        if (!tk.tokens.empty()) out.push_back(std::move(tk));
    }
    return out;
}

long parse_long(const std::string& context, const Tokenized& tk, size_t idx) {
    try {
        size_t pos = 0;
        const long v = std::stol(tk.tokens.at(idx), &pos);
        if (pos != tk.tokens[idx].size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ParseError(context, tk.line_number, "expected integer, got '" + tk.tokens.at(idx) + "'");
    }
}

double parse_double(const std::string& context, const Tokenized& tk, size_t idx) {
    try {
        size_t pos = 0;
        const double v = std::stod(tk.tokens.at(idx), &pos);
        if (pos != tk.tokens[idx].size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ParseError(context, tk.line_number, "expected number, got '" + tk.tokens.at(idx) + "'");
    }
}

} // namespace

Mesh load_triangle_mesh(const std::string& node_text, const std::string& ele_text,
                        double coordinate_scale) {
    const std::string node_ctx = ".node";
    const std::string ele_ctx = ".ele";

    const auto node_lines = tokenize(node_text);
    if (node_lines.empty()) throw ParseError(node_ctx, 0, "empty file");
    const Tokenized& nh = node_lines[0];
    if (nh.tokens.size() < 2) throw ParseError(node_ctx, nh.line_number, "malformed header");
    const long nv = parse_long(node_ctx, nh, 0);
    const long dim = parse_long(node_ctx, nh, 1);
    if (nv < 1) throw ParseError(node_ctx, nh.line_number, "vertex count must be positive");
    if (dim != 2) throw ParseError(node_ctx, nh.line_number, "only 2D meshes are supported");
    if (static_cast<long>(node_lines.size()) != nv + 1)
        throw ParseError(node_ctx, nh.line_number,
                         "header announces " + std::to_string(nv) + " vertices but file has " +
                             std::to_string(node_lines.size() - 1));

    long base = -1;
    std::vector<Vec2> vertices(nv);
    std::vector<char> seen(nv, 0);
    for (long i = 1; i <= nv; ++i) {
        const Tokenized& tk = node_lines[i];
        if (tk.tokens.size() < 3) throw ParseError(node_ctx, tk.line_number, "expected: index x y ...");
        const long idx = parse_long(node_ctx, tk, 0);
        if (base < 0) {
            base = idx;
            if (base != 0 && base != 1)
                throw ParseError(node_ctx, tk.line_number, "first vertex index must be 0 or 1");
        }
        const long v = idx - base;
        if (v < 0 || v >= nv) throw ParseError(node_ctx, tk.line_number, "vertex index out of range");
        if (seen[v]) throw ParseError(node_ctx, tk.line_number, "duplicate vertex index");
        seen[v] = 1;
        vertices[v] = {coordinate_scale * parse_double(node_ctx, tk, 1),
                       coordinate_scale * parse_double(node_ctx, tk, 2)};
    }

    const auto ele_lines = tokenize(ele_text);
    if (ele_lines.empty()) throw ParseError(ele_ctx, 0, "empty file");
    const Tokenized& eh = ele_lines[0];
    if (eh.tokens.size() < 2) throw ParseError(ele_ctx, eh.line_number, "malformed header");
    const long nt = parse_long(ele_ctx, eh, 0);
    const long npe = parse_long(ele_ctx, eh, 1);
    const long nattr = eh.tokens.size() >= 3 ? parse_long(ele_ctx, eh, 2) : 0;
    if (nt < 1) throw ParseError(ele_ctx, eh.line_number, "triangle count must be positive");
    if (npe != 3) throw ParseError(ele_ctx, eh.line_number, "only 3-node triangles are supported");
    if (static_cast<long>(ele_lines.size()) != nt + 1)
        throw ParseError(ele_ctx, eh.line_number,
                         "header announces " + std::to_string(nt) + " triangles but file has " +
                             std::to_string(ele_lines.size() - 1));

    std::vector<std::array<int, 3>> triangles(nt);
    std::vector<int> labels(nt, 1);
    std::vector<char> tseen(nt, 0);
    long ele_base = -1;
    for (long i = 1; i <= nt; ++i) {
        const Tokenized& tk = ele_lines[i];
        if (tk.tokens.size() < 4) throw ParseError(ele_ctx, tk.line_number, "expected: index v1 v2 v3 ...");
        const long idx = parse_long(ele_ctx, tk, 0);
        if (ele_base < 0) {
            ele_base = idx;
            if (ele_base != 0 && ele_base != 1)
                throw ParseError(ele_ctx, tk.line_number, "first triangle index must be 0 or 1");
        }
        const long t = idx - ele_base;
        if (t < 0 || t >= nt) throw ParseError(ele_ctx, tk.line_number, "triangle index out of range");
        if (tseen[t]) throw ParseError(ele_ctx, tk.line_number, "duplicate triangle index");
        tseen[t] = 1;
        std::array<int, 3> tri;
        for (int k = 0; k < 3; ++k) {
            const long v = parse_long(ele_ctx, tk, 1 + k) - base;
            if (v < 0 || v >= nv) throw ParseError(ele_ctx, tk.line_number, "vertex index out of range");
            tri[k] = static_cast<int>(v);
        }
        triangles[t] = tri;
        if (nattr >= 1 && tk.tokens.size() >= 5)
            labels[t] = static_cast<int>(std::lround(parse_double(ele_ctx, tk, 4)));

        // Catch degenerate triangles here so the diagnostic can name the line.
        const Vec2 d1 = vertices[tri[1]] - vertices[tri[0]];
        const Vec2 d2 = vertices[tri[2]] - vertices[tri[0]];
        const double area2 = std::abs(cross(d1, d2));
        if (!(area2 > 1e-14 * std::max(1.0, std::hypot(d1.x, d1.y) * std::hypot(d2.x, d2.y))))
            throw ParseError(ele_ctx, tk.line_number, "degenerate (zero area) triangle");
    }

    return build_mesh(std::move(vertices), std::move(triangles), std::move(labels));
}

TriangleFileText write_triangle_mesh(const Mesh& mesh) {
    TriangleFileText out;
    char buf[128];

    std::string& node = out.node;
    std::snprintf(buf, sizeof(buf), "%d 2 0 0\n", mesh.vertex_count());
    node += buf;
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        std::snprintf(buf, sizeof(buf), "%d %.17g %.17g\n", v + 1, mesh.vertices[v].x, mesh.vertices[v].y);
        node += buf;
    }

    std::string& ele = out.ele;
    std::snprintf(buf, sizeof(buf), "%d 3 1\n", mesh.triangle_count());
    ele += buf;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        std::snprintf(buf, sizeof(buf), "%d %d %d %d %d\n", t + 1, tri[0] + 1, tri[1] + 1, tri[2] + 1,
                      mesh.triangle_labels[t]);
        ele += buf;
    }
    return out;
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << text;
}

} // namespace

Mesh load_triangle_mesh_files(const std::string& node_path, const std::string& ele_path,
                              double coordinate_scale) {
    return load_triangle_mesh(read_file(node_path), read_file(ele_path), coordinate_scale);
}

void write_triangle_mesh_files(const Mesh& mesh, const std::string& node_path,
                               const std::string& ele_path) {
    const TriangleFileText text = write_triangle_mesh(mesh);
    write_file(node_path, text.node);
    write_file(ele_path, text.ele);
}

} // namespace episeir
