#pragma once
#include <span>

#include "seir.hpp"

namespace episeir {

// Well-mixed compartment for the averaged region: mean fractions plus the
// region's geometry and population.
struct OdeCompartment {
    double s = 1.0, e = 0.0, i = 0.0, r = 0.0;
    double n_mean = 0.0;     // persons/km^2
    double area = 0.0;       // km^2
    double population = 0.0; // persons

    void validate() const;
};

// Region totals and mean density integrated from the full-mesh fields over
// the subdomains that will be averaged.
OdeCompartment make_ode_compartment(const Mesh& mesh, const SeirState& state,
                                    std::span<const int> labels);

struct OdeRates {
    double ds, de, di, dr;
};

// Right-hand side of the averaged system: SEIR reaction at the mean density
// plus the boundary-flux exchange divided by the region area. `flux` holds
// the four interface flux integrals (s, e, i, r order).
OdeRates ode_rhs(const OdeCompartment& ode, const EpidemicParams& params,
                 const std::array<double, 4>& flux);

struct HybridOptions {
    double penalty_scale = 1e6;
    // Diagnostic switch: no penalty coupling and fluxes forced to zero, so
    // the two regions evolve independently.
    bool zero_boundary = false;
};

// One staggered step: (1) advance the PDE fields with the interface penalty
// anchored at the current ODE means, (2) evaluate the interface fluxes of the
// new fields, (3) advance the ODE compartment explicitly with those fluxes.
void step_hybrid(PdeStepper& stepper, SeirState& pde, OdeCompartment& ode,
                 const EpidemicParams& params, double dt,
                 const PenaltyOperator* penalty, std::span<const int> interface_edges,
                 bool zero_boundary, StepMonitor* monitor = nullptr);

// Hybrid run on a split mesh. An empty interface with a zero-area compartment
// degenerates to the full-PDE run.
Trajectory run_hybrid(const Mesh& pde_mesh, SeirState pde_state, OdeCompartment ode,
                      std::span<const int> interface_edges, const ParamSchedule& schedule,
                      const RunOptions& options, const HybridOptions& hybrid_options = {},
                      const RecordObserver& observer = {});

// Standalone averaged model (the 100%-ODE limit): explicit Euler, no fluxes.
Trajectory run_ode(OdeCompartment ode, const ParamSchedule& schedule, const RunOptions& options);

} // namespace episeir
