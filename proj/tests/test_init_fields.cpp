#include <doctest.h>

#include <cmath>

#include "errors.hpp"
#include "fem.hpp"
#include "init_fields.hpp"
#include "mesh.hpp"
#include "oracles.hpp"

using namespace episeir;

namespace {

DenseMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    DenseMatrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j) m(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
    return m;
}

} // namespace

TEST_CASE("a narrow gaussian integrates to one inside its subdomain") {
    const Mesh mesh = label_by_x_bins(generate_rectangle_mesh(2.0, 1.0, 0.02), {1.0});
    GaussianBasis basis;
    basis.std_dev = 0.05;
    basis.centers = {{0.5, 0.5}};
    const DenseMatrix integrals = basis_subdomain_integrals(basis, mesh);
    REQUIRE(integrals.rows() == 2);
    CHECK(integrals(0, 0) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(std::abs(integrals(1, 0)) < 1e-3);
}

TEST_CASE("identical centers give identical columns") {
    const Mesh mesh = generate_rectangle_mesh(1.0, 1.0, 0.1);
    GaussianBasis basis;
    basis.std_dev = 0.2;
    basis.centers = {{0.4, 0.6}, {0.4, 0.6}};
    const DenseMatrix integrals = basis_subdomain_integrals(basis, mesh);
    for (int l = 0; l < integrals.rows(); ++l) CHECK(integrals(l, 0) == integrals(l, 1));
}

TEST_CASE("triangle quadrature of a gaussian matches a dense grid") {
    const Mesh mesh = generate_rectangle_mesh(1.0, 1.0, 0.01);
    GaussianBasis basis;
    basis.std_dev = 0.1;
    basis.centers = {{0.5, 0.5}};
    const DenseMatrix integrals = basis_subdomain_integrals(basis, mesh);

    // midpoint rule on a 400x400 grid
    double reference = 0.0;
    const int n = 400;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Vec2 p{(i + 0.5) / n, (j + 0.5) / n};
            reference += gaussian_value(p, basis.centers[0], basis.std_dev) / (n * n);
        }
    CHECK(std::abs(integrals(0, 0) - reference) < 1e-4);
}

TEST_CASE("density weighting multiplies the integrand") {
    const Mesh mesh = generate_rectangle_mesh(1.0, 1.0, 0.05);
    GaussianBasis basis;
    basis.std_dev = 0.3;
    basis.centers = {{0.5, 0.5}};
    const std::vector<double> density(mesh.vertex_count(), 3.0);
    const DenseMatrix plain = basis_subdomain_integrals(basis, mesh);
    const DenseMatrix weighted = basis_subdomain_integrals(basis, mesh, &density);
    CHECK(weighted(0, 0) == doctest::Approx(3.0 * plain(0, 0)).epsilon(1e-13));
}

TEST_CASE("nnls on identity systems") {
    const DenseMatrix eye = DenseMatrix::identity(2);
    const NnlsResult a = nnls(eye, std::vector<double>{5.0, 3.0});
    CHECK(a.weights[0] == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(a.weights[1] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(a.residual_norm < 1e-12);

    const NnlsResult b = nnls(eye, std::vector<double>{5.0, -3.0});
    CHECK(b.weights[0] == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(b.weights[1] == 0.0);
    CHECK(b.residual_norm == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("nnls agrees with exhaustive active-set enumeration") {
    oracle::Rng rng(2024);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<std::vector<double>> rows(4, std::vector<double>(4));
        std::vector<double> b(4);
        for (auto& row : rows)
            for (double& v : row) v = rng.uniform();
        for (double& v : b) v = 2.0 * rng.uniform() - 1.0;
        const std::vector<double> expected = oracle::nnls_by_enumeration(rows, b);
        const NnlsResult got = nnls(from_rows(rows), b);
        for (int j = 0; j < 4; ++j) CHECK(got.weights[j] == doctest::Approx(expected[j]).epsilon(1e-8));
    }
}

TEST_CASE("nnls weights scale linearly with the targets") {
    const DenseMatrix a = from_rows({{1.0, 0.3, 0.1}, {0.2, 1.1, 0.4}, {0.05, 0.2, 0.9}});
    const std::vector<double> b = {2.0, 1.0, 0.5};
    const NnlsResult base = nnls(a, b);
    std::vector<double> scaled_b(b);
    for (double& v : scaled_b) v *= 7.5;
    const NnlsResult scaled = nnls(a, scaled_b);
    for (int j = 0; j < 3; ++j)
        CHECK(scaled.weights[j] == doctest::Approx(7.5 * base.weights[j]).epsilon(1e-12));
}

TEST_CASE("fit_weights pins invisible basis functions to zero") {
    DenseMatrix a(2, 3, 0.0);
    a(0, 0) = 1.0;
    a(1, 2) = 1.0; // column 1 is entirely zero
    const FitWeightsResult fit = fit_weights(a, std::vector<double>{4.0, 2.0}, true);
    CHECK(fit.weights[0] == doctest::Approx(4.0));
    CHECK(fit.weights[1] == 0.0);
    CHECK(fit.weights[2] == doctest::Approx(2.0));
    REQUIRE(fit.warnings.size() == 1);
    CHECK(fit.warnings[0].find("basis function 1") != std::string::npos);
}

TEST_CASE("fit_weights solves square systems exactly when unconstrained") {
    const DenseMatrix a = from_rows({{2.0, 1.0}, {1.0, 3.0}});
    const FitWeightsResult fit = fit_weights(a, std::vector<double>{1.0, -2.0}, false);
    // solution of [[2,1],[1,3]] w = (1,-2)
    CHECK(2.0 * fit.weights[0] + fit.weights[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.weights[0] + 3.0 * fit.weights[1] == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("all-susceptible province yields a uniform susceptible fraction") {
    const Mesh mesh = generate_rectangle_mesh(1.0, 1.0, 0.1);
    // A very flat basis function: the fraction fit can then represent the
    // constant 1 to high accuracy.
    GaussianBasis basis;
    basis.std_dev = 1.0e4;
    basis.centers = {{0.5, 0.5}};
    const std::vector<ProvinceRow> provinces = {{1, 1.0e6, 0.0, 0.0}};
    const SeirState state = build_initial_state(mesh, basis, provinces, 1.0);
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        CHECK(state.s[v] == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(state.e[v] == 0.0);
        CHECK(state.i[v] == 0.0);
        CHECK(std::abs(state.r[v]) < 1e-8);
    }
    const std::vector<double> ones(mesh.vertex_count(), 1.0);
    CHECK(integrate_weighted(mesh, ones, state.n, all_labels(mesh)) ==
          doctest::Approx(1.0e6).epsilon(1e-8));
}

TEST_CASE("fitted subdomain integrals reproduce the province table") {
    const Mesh mesh = label_by_x_bins(generate_rectangle_mesh(2.0, 1.0, 0.05), {0.4, 0.8, 1.2, 1.6});
    const GaussianBasis basis = centroid_basis(mesh, 0.25);
    // a post-wave snapshot: a large removed share keeps the fitted fraction
    // mixtures safely below one everywhere
    const std::vector<ProvinceRow> provinces = {
        {1, 2.0e6, 1.0e4, 8.0e5}, {2, 3.0e6, 2.5e4, 1.2e6}, {3, 5.0e6, 6.0e4, 2.0e6},
        {4, 3.2e6, 1.8e4, 1.3e6}, {5, 1.8e6, 0.7e4, 7.2e5},
    };
    const double exposed_scale = 1.0;
    const SeirState state = build_initial_state(mesh, basis, provinces, exposed_scale);

    // the realized fields are everywhere non-negative and sum to one
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        CHECK(state.s[v] >= 0.0);
        CHECK(state.e[v] >= 0.0);
        CHECK(state.i[v] >= 0.0);
        CHECK(state.n[v] >= 0.0);
        CHECK(state.r[v] >= -1e-6);
        CHECK(state.s[v] + state.e[v] + state.i[v] + state.r[v] == doctest::Approx(1.0).epsilon(1e-12));
    }

    // achieved subdomain aggregates track the table within the fit tolerance
    const std::vector<double> ones(mesh.vertex_count(), 1.0);
    for (const ProvinceRow& row : provinces) {
        const std::array<int, 1> label = {row.subdomain};
        const double pop = integrate_weighted(mesh, ones, state.n, label);
        const double inf = integrate_weighted(mesh, state.i, state.n, label);
        const double exp_count = integrate_weighted(mesh, state.e, state.n, label);
        const double sus = integrate_weighted(mesh, state.s, state.n, label);
        CHECK(pop == doctest::Approx(row.population).epsilon(1e-6));
        CHECK(inf == doctest::Approx(row.infectious).epsilon(1e-6));
        CHECK(exp_count == doctest::Approx(exposed_scale * row.infectious).epsilon(1e-6));
        const double expected_sus =
            row.population - (1.0 + exposed_scale) * row.infectious - row.removed;
        CHECK(sus == doctest::Approx(expected_sus).epsilon(1e-6));
    }
}

TEST_CASE("doubling the population targets doubles the density fit") {
    const Mesh mesh = label_by_x_bins(generate_rectangle_mesh(2.0, 1.0, 0.1), {1.0});
    const GaussianBasis basis = centroid_basis(mesh, 0.4);
    // removed counts sized so the susceptible share stays feasible even
    // after the population doubles
    const std::vector<ProvinceRow> base = {{1, 2.0e6, 1.0e4, 1.2e6}, {2, 3.0e6, 2.0e4, 1.8e6}};
    std::vector<ProvinceRow> doubled = base;
    for (ProvinceRow& row : doubled) row.population *= 2.0; // infection counts kept
    const SeirState a = build_initial_state(mesh, basis, base, 1.0);
    const SeirState b = build_initial_state(mesh, basis, doubled, 1.0);
    for (int v = 0; v < mesh.vertex_count(); ++v)
        CHECK(b.n[v] == doctest::Approx(2.0 * a.n[v]).epsilon(1e-10));
    // infection targets unchanged: the realized counts still match
    const std::array<int, 1> label = {1};
    CHECK(integrate_weighted(mesh, b.i, b.n, label) == doctest::Approx(1.0e4).epsilon(1e-6));
}

TEST_CASE("inconsistent targets with an overshooting fraction fail hard") {
    // One narrow Gaussian for a fully susceptible province: the fitted s
    // overshoots 1 near the center, so the complement check must fire.
    const Mesh mesh = generate_rectangle_mesh(1.0, 1.0, 0.05);
    GaussianBasis basis;
    basis.std_dev = 0.1;
    basis.centers = {{0.5, 0.5}};
    const std::vector<ProvinceRow> provinces = {{1, 1.0e6, 0.0, 0.0}};
    CHECK_THROWS_AS(build_initial_state(mesh, basis, provinces, 1.0), Error);
}

TEST_CASE("province table validation") {
    const std::vector<ProvinceRow> bad_negative = {{1, 1.0e6, -5.0, 0.0}};
    CHECK_THROWS_AS(validate_provinces(bad_negative, 1, 1.0), InvalidArgument);
    const std::vector<ProvinceRow> bad_susceptible = {{1, 100.0, 60.0, 0.0}};
    CHECK_THROWS_AS(validate_provinces(bad_susceptible, 1, 1.0), InvalidArgument); // (1+1)*60 > 100
    const std::vector<ProvinceRow> bad_label = {{3, 100.0, 1.0, 0.0}};
    CHECK_THROWS_AS(validate_provinces(bad_label, 1, 1.0), InvalidArgument);
}

TEST_CASE("ridge density integrates to the requested population") {
    const Mesh mesh = generate_rectangle_mesh(2.0, 1.0, 0.1);
    const std::vector<double> n = ridge_gaussian_density(mesh, 'y', 0.5, 0.1, 1.0e8);
    const std::vector<double> ones(mesh.vertex_count(), 1.0);
    CHECK(integrate_weighted(mesh, ones, n, all_labels(mesh)) ==
          doctest::Approx(1.0e8).epsilon(1e-12));
    // constant along x
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        if (mesh.vertices[v].y == 0.5) CHECK(n[v] == doctest::Approx(n[0] * std::exp(0.5 * 0.25 / 0.1)));
    }
    CHECK_THROWS_AS(ridge_gaussian_density(mesh, 'z', 0.5, 0.1, 1.0), InvalidArgument);
}

TEST_CASE("constant fractions must sum to one") {
    const Mesh mesh = generate_rectangle_mesh(1.0, 1.0, 0.5);
    CHECK_THROWS_AS(
        constant_fraction_state(mesh, std::vector<double>(mesh.vertex_count(), 1.0), 0.9, 0.2, 0.0, 0.0),
        InvalidArgument);
}

TEST_CASE("a single infectious point dominates its vertex and gaps are removed") {
    const Mesh mesh = generate_rectangle_mesh(2.0, 1.0, 0.05);
    const std::vector<PopulationPoint> points = {{{0.25, 0.25}, HealthStatus::Infectious}};
    const SeirState state = ingest_point_population(points, mesh);
    state.validate(mesh);

    // nearest vertex to the point carries a pure infectious mix
    int nearest = 0;
    double best = 1e300;
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        const Vec2 d = mesh.vertices[v] - Vec2{0.25, 0.25};
        if (dot(d, d) < best) {
            best = dot(d, d);
            nearest = v;
        }
    }
    CHECK(state.i[nearest] == doctest::Approx(1.0).epsilon(1e-12));

    // far corners never see the point: floored density, removed label
    int far = 0;
    best = -1.0;
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        const Vec2 d = mesh.vertices[v] - Vec2{0.25, 0.25};
        if (dot(d, d) > best) {
            best = dot(d, d);
            far = v;
        }
    }
    CHECK(state.n[far] == std::numeric_limits<double>::min());
    CHECK(state.r[far] == 1.0);
}

TEST_CASE("point ingestion preserves the head count") {
    const Mesh mesh = generate_rectangle_mesh(1.0, 1.0, 0.1);
    std::vector<PopulationPoint> points;
    oracle::Rng rng(5);
    for (int k = 0; k < 500; ++k)
        points.push_back({{rng.uniform(), rng.uniform()}, HealthStatus::Susceptible});
    const SeirState state = ingest_point_population(points, mesh);
    const std::vector<double> ones(mesh.vertex_count(), 1.0);
    CHECK(integrate_weighted(mesh, state.s, state.n, all_labels(mesh)) ==
          doctest::Approx(500.0).epsilon(1e-8));
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        CHECK(state.e[v] == 0.0);
        CHECK(state.i[v] == 0.0);
    }
}

TEST_CASE("two opposite clusters keep their populations after smoothing") {
    const Mesh mesh = label_by_x_bins(generate_rectangle_mesh(2.0, 1.0, 0.05), {1.0});
    std::vector<PopulationPoint> points;
    oracle::Rng rng(17);
    for (int k = 0; k < 400; ++k)
        points.push_back({{0.3 + 0.1 * rng.uniform(), 0.3 + 0.1 * rng.uniform()},
                          HealthStatus::Susceptible});
    for (int k = 0; k < 300; ++k)
        points.push_back({{1.6 + 0.1 * rng.uniform(), 0.6 + 0.1 * rng.uniform()},
                          HealthStatus::Infectious});
    const SeirState state = ingest_point_population(points, mesh);
    const std::vector<double> ones(mesh.vertex_count(), 1.0);
    const std::array<int, 1> left = {1};
    const std::array<int, 1> right = {2};
    CHECK(integrate_weighted(mesh, ones, state.n, left) == doctest::Approx(400.0).epsilon(0.01));
    CHECK(integrate_weighted(mesh, ones, state.n, right) == doctest::Approx(300.0).epsilon(0.01));
    CHECK(integrate_weighted(mesh, state.i, state.n, right) == doctest::Approx(300.0).epsilon(0.01));
}

TEST_CASE("empty point set is rejected") {
    const Mesh mesh = generate_rectangle_mesh(1.0, 1.0, 0.5);
    CHECK_THROWS_AS(ingest_point_population({}, mesh), InvalidArgument);
}
