// Shared scenario pieces for the simulation tests: the four-phase epidemic
// parameter set used by the shipped rectangle scenario and its initial state.
#pragma once
#include <vector>

#include "init_fields.hpp"
#include "mesh.hpp"
#include "seir.hpp"

namespace fixtures {

inline double phase_diffusion(double raw) { return raw / (111.3 * 111.3) * 100.0; }

inline episeir::EpidemicParams phase_params(double sigma, double phi_e, double phi_i, double beta,
                                            double diffusion_raw) {
    episeir::EpidemicParams p;
    p.sigma = sigma;
    p.phi_e = phi_e;
    p.phi_i = phi_i;
    p.beta_i = beta;
    p.beta_e = beta;
    p.diffusion = phase_diffusion(diffusion_raw);
    p.allee_a = 3.0e7;
    p.allee_n0 = 4.5e7;
    return p;
}

// Four restriction phases switching at days 10, 23 and 29.
inline episeir::ParamSchedule rectangle_schedule() {
    std::vector<episeir::ScheduleEntry> entries;
    entries.push_back({0.0, phase_params(2.6676e-2, 0.0, 2.3310e-1, 4.4202e-1, 0.0435)});
    entries.push_back({10.0, phase_params(2.6676e-2, 0.0, 2.3310e-1, 2.0588e-1, 0.0198)});
    entries.push_back({23.0, phase_params(2.6676e-2, 0.0, 2.3310e-1, 6.0352e-8, 0.0090)});
    entries.push_back({29.0, phase_params(1.8747e-1, 3.2655e-11, 2.1907e0, 2.2168e-1, 0.0075)});
    return episeir::ParamSchedule(std::move(entries));
}

inline episeir::EpidemicParams first_phase_params() { return rectangle_schedule().entries()[0].params; }

// Constant fractions over a y-ridge population profile: the density varies
// only across the short axis, so vertical splits always partition the
// population proportionally to area.
inline episeir::SeirState rectangle_state(const episeir::Mesh& mesh, double total_population = 1.0e8,
                                          double e0 = 5.0e-3, double i0 = 5.0e-3) {
    std::vector<double> density =
        episeir::ridge_gaussian_density(mesh, 'y', 0.5, 0.1, total_population);
    return episeir::constant_fraction_state(mesh, std::move(density), 1.0 - e0 - i0, e0, i0, 0.0);
}

} // namespace fixtures
