#include "hybrid.hpp"

#include <cmath>

#include "errors.hpp"

namespace episeir {

void OdeCompartment::validate() const {
    if (!(area > 0.0)) throw InvalidArgument("ODE compartment area must be positive");
    if (n_mean < 0.0 || population < 0.0)
        throw InvalidArgument("ODE compartment population must be non-negative");
    const double sum = s + e + i + r;
    if (std::abs(sum - 1.0) > 1e-8)
        throw InvalidArgument("ODE compartment fractions do not sum to 1");
}

OdeCompartment make_ode_compartment(const Mesh& mesh, const SeirState& state,
                                    std::span<const int> labels) {
    OdeCompartment ode;
    double area = 0.0;
    std::vector<char> wanted(mesh.label_count() + 1, 0);
    for (int l : labels) wanted[l] = 1;
    for (int t = 0; t < mesh.triangle_count(); ++t)
        if (wanted[mesh.triangle_labels[t]]) area += mesh.tri_area[t];
    if (!(area > 0.0)) throw InvalidArgument("ODE labels select no area");

    const std::vector<double> ones(mesh.vertex_count(), 1.0);
    ode.population = integrate_weighted(mesh, ones, state.n, labels);
    ode.area = area;
    ode.n_mean = ode.population / area;
    if (ode.population > 0.0) {
        ode.s = integrate_weighted(mesh, state.s, state.n, labels) / ode.population;
        ode.e = integrate_weighted(mesh, state.e, state.n, labels) / ode.population;
        ode.i = integrate_weighted(mesh, state.i, state.n, labels) / ode.population;
        ode.r = integrate_weighted(mesh, state.r, state.n, labels) / ode.population;
    }
    return ode;
}

OdeRates ode_rhs(const OdeCompartment& ode, const EpidemicParams& p,
                 const std::array<double, 4>& flux) {
    if (!(ode.area > 0.0)) throw InvalidArgument("ode_rhs: region area must be positive");
    const double factor = allee_factor(ode.n_mean, p.allee_a, p.allee_n0);
    const double infection = factor * ode.s * (p.beta_e * ode.e + p.beta_i * ode.i);
    const double incubation = p.sigma * ode.e;
    const double recovery_e = p.phi_e * ode.e;
    const double recovery_i = p.phi_i * ode.i;
    const double inv_area = 1.0 / ode.area;
    return {-infection - flux[0] * inv_area,
            infection - incubation - recovery_e - flux[1] * inv_area,
            incubation - recovery_i - flux[2] * inv_area,
            recovery_i + recovery_e - flux[3] * inv_area};
}

namespace {

void observe_ode(StepMonitor& monitor, const OdeCompartment& ode) {
    const double sum = ode.s + ode.e + ode.i + ode.r;
    monitor.max_sum_deviation = std::max(monitor.max_sum_deviation, std::abs(sum - 1.0));
    for (double f : {ode.s, ode.e, ode.i, ode.r}) {
        monitor.min_fraction = std::min(monitor.min_fraction, f);
        monitor.max_fraction = std::max(monitor.max_fraction, f);
    }
}

} // namespace

void step_hybrid(PdeStepper& stepper, SeirState& pde, OdeCompartment& ode,
                 const EpidemicParams& params, double dt, const PenaltyOperator* penalty,
                 std::span<const int> interface_edges, bool zero_boundary, StepMonitor* monitor) {
    std::array<double, 4> flux = {0.0, 0.0, 0.0, 0.0};
    if (zero_boundary || interface_edges.empty()) {
        stepper.step(pde, params, dt, nullptr, nullptr, monitor);
    } else {
        const std::array<double, 4> dirichlet = {ode.s, ode.e, ode.i, ode.r};
        stepper.step(pde, params, dt, penalty, &dirichlet, monitor);
        flux[0] = boundary_flux(stepper.mesh(), pde.s, params.diffusion, interface_edges);
        flux[1] = boundary_flux(stepper.mesh(), pde.e, params.diffusion, interface_edges);
        flux[2] = boundary_flux(stepper.mesh(), pde.i, params.diffusion, interface_edges);
        flux[3] = boundary_flux(stepper.mesh(), pde.r, params.diffusion, interface_edges);
    }
    const OdeRates rates = ode_rhs(ode, params, flux);
    ode.s += dt * rates.ds;
    ode.e += dt * rates.de;
    ode.i += dt * rates.di;
    ode.r += dt * rates.dr;
    if (monitor) observe_ode(*monitor, ode);
}

Trajectory run_hybrid(const Mesh& pde_mesh, SeirState pde_state, OdeCompartment ode,
                      std::span<const int> interface_edges, const ParamSchedule& schedule,
                      const RunOptions& options, const HybridOptions& hybrid_options,
                      const RecordObserver& observer) {
    if (options.t_end < 0.0) throw InvalidArgument("t_end must be non-negative");
    if (!(options.dt > 0.0)) throw InvalidArgument("dt must be positive");
    if (options.record_every < 1) throw InvalidArgument("record_every must be at least 1");
    pde_state.validate(pde_mesh);
    const bool coupled = !interface_edges.empty();
    if (coupled) ode.validate();

    PdeStepper stepper(pde_mesh);
    PenaltyOperator penalty;
    if (coupled && !hybrid_options.zero_boundary)
        penalty = make_interface_penalty(pde_mesh, interface_edges, hybrid_options.penalty_scale);

    auto make_record = [&]() {
        TrajectoryRecord rec;
        rec.time = pde_state.time;
        rec.s = per_label_populations(pde_mesh, pde_state.s, pde_state.n);
        rec.e = per_label_populations(pde_mesh, pde_state.e, pde_state.n);
        rec.i = per_label_populations(pde_mesh, pde_state.i, pde_state.n);
        rec.r = per_label_populations(pde_mesh, pde_state.r, pde_state.n);
        if (coupled) {
            rec.has_ode = true;
            rec.ode_s = ode.s * ode.population;
            rec.ode_e = ode.e * ode.population;
            rec.ode_i = ode.i * ode.population;
            rec.ode_r = ode.r * ode.population;
        }
        return rec;
    };

    Trajectory traj;
    traj.monitor.observe(pde_state);
    traj.records.push_back(make_record());
    if (observer) observer(pde_state, 0);

    const double t0 = pde_state.time;
    const long steps = std::llround(options.t_end / options.dt);
    for (long k = 0; k < steps; ++k) {
        const EpidemicParams& params = schedule.at(t0 + k * options.dt);
        if (coupled) {
            step_hybrid(stepper, pde_state, ode, params, options.dt,
                        hybrid_options.zero_boundary ? nullptr : &penalty, interface_edges,
                        hybrid_options.zero_boundary, &traj.monitor);
        } else {
            stepper.step(pde_state, params, options.dt, nullptr, nullptr, &traj.monitor);
        }
        pde_state.time = t0 + (k + 1) * options.dt;
        if ((k + 1) % options.record_every == 0 || k + 1 == steps) {
            traj.records.push_back(make_record());
            if (observer) observer(pde_state, k + 1);
        }
    }
    return traj;
}

Trajectory run_ode(OdeCompartment ode, const ParamSchedule& schedule, const RunOptions& options) {
    if (options.t_end < 0.0) throw InvalidArgument("t_end must be non-negative");
    if (!(options.dt > 0.0)) throw InvalidArgument("dt must be positive");
    ode.validate();

    Trajectory traj;
    auto record = [&](double time) {
        TrajectoryRecord rec;
        rec.time = time;
        rec.has_ode = true;
        rec.ode_s = ode.s * ode.population;
        rec.ode_e = ode.e * ode.population;
        rec.ode_i = ode.i * ode.population;
        rec.ode_r = ode.r * ode.population;
        traj.records.push_back(std::move(rec));
    };
    record(0.0);

    const std::array<double, 4> no_flux = {0.0, 0.0, 0.0, 0.0};
    const long steps = std::llround(options.t_end / options.dt);
    for (long k = 0; k < steps; ++k) {
        const EpidemicParams& params = schedule.at(k * options.dt);
        const OdeRates rates = ode_rhs(ode, params, no_flux);
        ode.s += options.dt * rates.ds;
        ode.e += options.dt * rates.de;
        ode.i += options.dt * rates.di;
        ode.r += options.dt * rates.dr;
        observe_ode(traj.monitor, ode);
        if ((k + 1) % options.record_every == 0 || k + 1 == steps) record((k + 1) * options.dt);
    }
    return traj;
}

} // namespace episeir
