#pragma once
#include <span>
#include <vector>

#include "dense.hpp"
#include "mesh.hpp"
#include "nnls.hpp"
#include "seir.hpp"

namespace episeir {

// Isotropic normalized Gaussians 1/(2 pi sd^2) exp(-|x-c|^2 / (2 sd^2)).
struct GaussianBasis {
    std::vector<Vec2> centers;
    double std_dev = 0.0;

    int count() const { return static_cast<int>(centers.size()); }
    void validate() const;
};

double gaussian_value(Vec2 x, Vec2 center, double std_dev);

// One basis at each subdomain centroid.
GaussianBasis centroid_basis(const Mesh& mesh, double std_dev);

// Matrix of basis integrals per subdomain: entry (l, j) = \int_l G_j [* n] dx
// via the 3-point triangle rule. The density weighting is used when fitting
// fraction fields, omitted for the population system.
DenseMatrix basis_subdomain_integrals(const GaussianBasis& basis, const Mesh& mesh,
                                      const std::vector<double>* density = nullptr);

// Aggregated counts per subdomain; exposed = scale * infectious and
// susceptible = population - (1+scale)*infectious - removed.
struct ProvinceRow {
    int subdomain = 0; // label
    double population = 0.0;
    double infectious = 0.0;
    double removed = 0.0;
};

void validate_provinces(const std::vector<ProvinceRow>& rows, int label_count, double exposed_scale);

// Fits n first (plain integrals), then the s, i, e fraction fields against
// the density-weighted systems, and closes r = 1 - s - e - i pointwise.
// Fails hard when the complement drops below -1e-6 anywhere.
SeirState build_initial_state(const Mesh& mesh, const GaussianBasis& basis,
                              const std::vector<ProvinceRow>& provinces, double exposed_scale);

// Constant fractions with a prescribed density field (synthetic scenarios).
SeirState constant_fraction_state(const Mesh& mesh, std::vector<double> density, double s0,
                                  double e0, double i0, double r0);

// Density profile constant along one axis, Gaussian along the other, scaled
// so the mesh integral equals total_population.
std::vector<double> ridge_gaussian_density(const Mesh& mesh, char axis, double center,
                                           double variance, double total_population);

enum class HealthStatus { Susceptible, Exposed, Infectious, Removed };

struct PopulationPoint {
    Vec2 position;
    HealthStatus status;
};

// Builds a state from individual points: nearest-vertex binning, one implicit
// diffusion smoothing pass with pseudo-time h^2, densities from vertex areas,
// fractions from count ratios. Vertices that end up without population are
// filled with the smallest positive density and labeled removed so the
// fraction sum stays 1.
SeirState ingest_point_population(std::span<const PopulationPoint> points, const Mesh& mesh);

} // namespace episeir
