#include "init_fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "errors.hpp"
#include "fem.hpp"

namespace episeir {

void GaussianBasis::validate() const {
    if (centers.empty()) throw InvalidArgument("Gaussian basis needs at least one center");
    if (!(std_dev > 0.0)) throw InvalidArgument("Gaussian std deviation must be positive");
}

double gaussian_value(Vec2 x, Vec2 center, double std_dev) {
    const double dx = x.x - center.x;
    const double dy = x.y - center.y;
    const double s2 = std_dev * std_dev;
    return std::exp(-(dx * dx + dy * dy) / (2.0 * s2)) / (2.0 * M_PI * s2);
}

GaussianBasis centroid_basis(const Mesh& mesh, double std_dev) {
    GaussianBasis basis;
    basis.std_dev = std_dev;
    for (const Subdomain& sd : subdomain_table(mesh)) basis.centers.push_back(sd.centroid);
    basis.validate();
    return basis;
}

DenseMatrix basis_subdomain_integrals(const GaussianBasis& basis, const Mesh& mesh,
                                      const std::vector<double>* density) {
    basis.validate();
    if (density && static_cast<int>(density->size()) != mesh.vertex_count())
        throw InvalidArgument("density field length does not match vertex count");

    const int nl = mesh.label_count();
    DenseMatrix integrals(nl, basis.count());
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        const int row = mesh.triangle_labels[t] - 1;
        const double third = mesh.tri_area[t] / 3.0;
        for (int k = 0; k < 3; ++k) {
            const int a = tri[k];
            const int b = tri[(k + 1) % 3];
            const Vec2 midpoint = 0.5 * (mesh.vertices[a] + mesh.vertices[b]);
            // P1 fields are exact at edge midpoints with the two-point average.
            const double w = density ? 0.5 * ((*density)[a] + (*density)[b]) : 1.0;
            for (int j = 0; j < basis.count(); ++j)
                integrals(row, j) += third * w * gaussian_value(midpoint, basis.centers[j], basis.std_dev);
        }
    }
    return integrals;
}

void validate_provinces(const std::vector<ProvinceRow>& rows, int label_count, double exposed_scale) {
    if (exposed_scale < 0.0) throw InvalidArgument("exposed scale must be non-negative");
    if (static_cast<int>(rows.size()) != label_count)
        throw InvalidArgument("province table must have one row per subdomain");
    std::vector<char> seen(label_count + 1, 0);
    for (const ProvinceRow& row : rows) {
        if (row.subdomain < 1 || row.subdomain > label_count)
            throw InvalidArgument("province row references unknown subdomain " +
                                  std::to_string(row.subdomain));
        if (seen[row.subdomain]) throw InvalidArgument("duplicate province row for subdomain " +
                                                       std::to_string(row.subdomain));
        seen[row.subdomain] = 1;
        if (row.infectious < 0.0 || row.removed < 0.0)
            throw InvalidArgument("infectious and removed counts must be non-negative");
        const double susceptible =
            row.population - (1.0 + exposed_scale) * row.infectious - row.removed;
        if (susceptible < 0.0)
            throw InvalidArgument("subdomain " + std::to_string(row.subdomain) +
                                  ": susceptible count would be negative");
    }
}

namespace {

std::vector<double> basis_field(const GaussianBasis& basis, const Mesh& mesh,
                                std::span<const double> weights) {
    std::vector<double> field(mesh.vertex_count(), 0.0);
    for (int v = 0; v < mesh.vertex_count(); ++v)
        for (int j = 0; j < basis.count(); ++j)
            field[v] += weights[j] * gaussian_value(mesh.vertices[v], basis.centers[j], basis.std_dev);
    return field;
}

// Subdomain integrals of the vertex-interpolated basis functions. The fit
// runs against these so that the realized nodal fields integrate to the
// targets exactly, independent of the mesh resolution.
DenseMatrix interpolant_integrals(const GaussianBasis& basis, const Mesh& mesh,
                                  const std::vector<double>* density) {
    const std::vector<double> ones(mesh.vertex_count(), 1.0);
    DenseMatrix integrals(mesh.label_count(), basis.count());
    std::vector<double> nodal(mesh.vertex_count());
    for (int j = 0; j < basis.count(); ++j) {
        for (int v = 0; v < mesh.vertex_count(); ++v)
            nodal[v] = gaussian_value(mesh.vertices[v], basis.centers[j], basis.std_dev);
        const std::vector<double> sums =
            per_label_populations(mesh, nodal, density ? *density : ones);
        for (int l = 0; l < mesh.label_count(); ++l) integrals(l, j) = sums[l];
    }
    return integrals;
}

} // namespace

SeirState build_initial_state(const Mesh& mesh, const GaussianBasis& basis,
                              const std::vector<ProvinceRow>& provinces, double exposed_scale) {
    const int nl = mesh.label_count();
    basis.validate();
    validate_provinces(provinces, nl, exposed_scale);

    std::vector<double> pop(nl), inf(nl), exp_(nl), sus(nl);
    for (const ProvinceRow& row : provinces) {
        const int l = row.subdomain - 1;
        pop[l] = row.population;
        inf[l] = row.infectious;
        exp_[l] = exposed_scale * row.infectious;
        sus[l] = row.population - (1.0 + exposed_scale) * row.infectious - row.removed;
    }

    // The population field is needed for the fraction systems, so it is
    // fitted first against the plain integrals.
    const DenseMatrix plain = interpolant_integrals(basis, mesh, nullptr);
    const FitWeightsResult wn = fit_weights(plain, pop, true);
    SeirState state;
    state.time = 0.0;
    state.n = basis_field(basis, mesh, wn.weights);

    const DenseMatrix weighted = interpolant_integrals(basis, mesh, &state.n);
    const FitWeightsResult ws = fit_weights(weighted, sus, true);
    const FitWeightsResult wi = fit_weights(weighted, inf, true);
    const FitWeightsResult we = fit_weights(weighted, exp_, true);
    state.s = basis_field(basis, mesh, ws.weights);
    state.i = basis_field(basis, mesh, wi.weights);
    state.e = basis_field(basis, mesh, we.weights);

    state.r.resize(mesh.vertex_count());
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        const double complement = 1.0 - state.s[v] - state.e[v] - state.i[v];
        if (complement < -1e-6)
            throw Error("initial fit inconsistent: s+e+i exceeds 1 by more than 1e-6 at vertex " +
                        std::to_string(v) + " (complement " + std::to_string(complement) + ")");
        state.r[v] = complement;
    }
    return state;
}

SeirState constant_fraction_state(const Mesh& mesh, std::vector<double> density, double s0,
                                  double e0, double i0, double r0) {
    if (static_cast<int>(density.size()) != mesh.vertex_count())
        throw InvalidArgument("density field length does not match vertex count");
    if (std::abs(s0 + e0 + i0 + r0 - 1.0) > 1e-8)
        throw InvalidArgument("constant fractions must sum to 1");
    SeirState state;
    state.time = 0.0;
    const int nv = mesh.vertex_count();
    state.s.assign(nv, s0);
    state.e.assign(nv, e0);
    state.i.assign(nv, i0);
    state.r.assign(nv, r0);
    state.n = std::move(density);
    return state;
}

std::vector<double> ridge_gaussian_density(const Mesh& mesh, char axis, double center,
                                           double variance, double total_population) {
    if (axis != 'x' && axis != 'y') throw InvalidArgument("ridge axis must be 'x' or 'y'");
    if (!(variance > 0.0)) throw InvalidArgument("ridge variance must be positive");
    if (!(total_population >= 0.0)) throw InvalidArgument("total population must be non-negative");

    std::vector<double> field(mesh.vertex_count());
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        const double c = axis == 'x' ? mesh.vertices[v].x : mesh.vertices[v].y;
        field[v] = std::exp(-(c - center) * (c - center) / (2.0 * variance));
    }
    const std::vector<double> ones(mesh.vertex_count(), 1.0);
    const double integral = integrate_weighted(mesh, field, ones, all_labels(mesh));
    if (!(integral > 0.0)) throw InvalidArgument("ridge profile vanishes on the mesh");
    const double scale = total_population / integral;
    for (double& f : field) f *= scale;
    return field;
}

namespace {

// Uniform-grid bucket accelerator for nearest-vertex queries.
class VertexLocator {
public:
    explicit VertexLocator(const Mesh& mesh) : mesh_(mesh) {
        min_ = max_ = mesh.vertices[0];
        for (const Vec2& v : mesh.vertices) {
            min_.x = std::min(min_.x, v.x);
            min_.y = std::min(min_.y, v.y);
            max_.x = std::max(max_.x, v.x);
            max_.y = std::max(max_.y, v.y);
        }
        const int n = mesh.vertex_count();
        cells_per_side_ = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(n))));
        buckets_.resize(static_cast<size_t>(cells_per_side_) * cells_per_side_);
        for (int v = 0; v < n; ++v) buckets_[bucket_index(mesh.vertices[v])].push_back(v);
    }

    int nearest(Vec2 p) const {
        const auto [ci, cj] = cell_of(p);
        int best = -1;
        double best_d2 = std::numeric_limits<double>::infinity();
        const double cw = (max_.x - min_.x) / cells_per_side_;
        const double ch = (max_.y - min_.y) / cells_per_side_;
        const double min_cell = std::max(1e-300, std::min(cw, ch));
        for (int ring = 0; ring < 2 * cells_per_side_; ++ring) {
            if (best >= 0) {
                // Cells in this ring cannot hold anything closer than
                // (ring-1) * min_cell from p.
                const double safe = (ring - 1) * min_cell;
                if (safe > 0.0 && safe * safe > best_d2) break;
            }
            for (int i = std::max(0, ci - ring); i <= std::min(cells_per_side_ - 1, ci + ring); ++i) {
                for (int j = std::max(0, cj - ring); j <= std::min(cells_per_side_ - 1, cj + ring); ++j) {
                    if (std::max(std::abs(i - ci), std::abs(j - cj)) != ring) continue;
                    for (int v : buckets_[static_cast<size_t>(j) * cells_per_side_ + i]) {
                        const Vec2 d = mesh_.vertices[v] - p;
                        const double d2 = dot(d, d);
                        if (d2 < best_d2 || (d2 == best_d2 && v < best)) {
                            best_d2 = d2;
                            best = v;
                        }
                    }
                }
            }
        }
        return best;
    }

private:
    std::pair<int, int> cell_of(Vec2 p) const {
        const double w = std::max(max_.x - min_.x, 1e-300);
        const double h = std::max(max_.y - min_.y, 1e-300);
        int i = static_cast<int>((p.x - min_.x) / w * cells_per_side_);
        int j = static_cast<int>((p.y - min_.y) / h * cells_per_side_);
        i = std::clamp(i, 0, cells_per_side_ - 1);
        j = std::clamp(j, 0, cells_per_side_ - 1);
        return {i, j};
    }
    size_t bucket_index(Vec2 p) const {
        const auto [i, j] = cell_of(p);
        return static_cast<size_t>(j) * cells_per_side_ + i;
    }

    const Mesh& mesh_;
    Vec2 min_, max_;
    int cells_per_side_ = 1;
    std::vector<std::vector<int>> buckets_;
};

double mean_edge_length(const Mesh& mesh) {
    double sum = 0.0;
    for (const MeshEdge& e : mesh.edges) {
        const Vec2 d = mesh.vertices[e.b] - mesh.vertices[e.a];
        sum += std::hypot(d.x, d.y);
    }
    return sum / mesh.edge_count();
}

} // namespace

SeirState ingest_point_population(std::span<const PopulationPoint> points, const Mesh& mesh) {
    if (points.empty()) throw InvalidArgument("point population is empty");
    const int nv = mesh.vertex_count();

    std::array<std::vector<double>, 4> counts;
    for (auto& c : counts) c.assign(nv, 0.0);
    VertexLocator locator(mesh);
    for (const PopulationPoint& p : points)
        counts[static_cast<int>(p.status)][locator.nearest(p.position)] += 1.0;

    // One implicit diffusion pass on the density field, pseudo-time h^2:
    // (M_L + tau K) u = counts, since the density carrying count c at vertex
    // v is c/area and M_L (c/area) = c. Columns of K sum to zero, so the
    // head count integral \int u = sum(area*u) stays sum(c).
    const double h = mean_edge_length(mesh);
    const double tau = h * h;
    const std::vector<double> areas = lumped_mass(mesh);
    SparseMatrix system = assemble_stiffness(mesh, tau);
    for (int v = 0; v < nv; ++v) system.add_to_diagonal(v, areas[v]);
    std::array<std::vector<double>, 4> densities;
    for (int c = 0; c < 4; ++c) densities[c] = solve_cg(system, counts[c]);

    // Below this smoothed head count a vertex is treated as unpopulated.
    const double gap_threshold = 1e-12;
    const double floor_density = std::numeric_limits<double>::min();

    SeirState state;
    state.time = 0.0;
    state.s.assign(nv, 0.0);
    state.e.assign(nv, 0.0);
    state.i.assign(nv, 0.0);
    state.r.assign(nv, 0.0);
    state.n.assign(nv, 0.0);
    for (int v = 0; v < nv; ++v) {
        const double total = densities[0][v] + densities[1][v] + densities[2][v] + densities[3][v];
        if (total * areas[v] > gap_threshold) {
            state.n[v] = total;
            state.s[v] = densities[0][v] / total;
            state.e[v] = densities[1][v] / total;
            state.i[v] = densities[2][v] / total;
            state.r[v] = densities[3][v] / total;
        } else {
            state.n[v] = floor_density;
            state.r[v] = 1.0;
        }
    }
    return state;
}

} // namespace episeir
