#include "seir.hpp"

#include <cmath>
#include <string>

#include "errors.hpp"

namespace episeir {

double allee_factor(double n, double allee_a, double allee_n0) {
    if (n < 0.0) throw InvalidArgument("allee_factor: negative population density");
    if (allee_a < 0.0 || allee_n0 < 0.0) throw InvalidArgument("allee_factor: negative threshold");
    if (allee_a == 0.0) return 1.0;
    if (!(allee_n0 >= 1.5 * allee_a))
        throw InvalidArgument("allee_factor: shift n0 below 3/2 A breaks the 1/3 lower bound");
    return 1.0 - allee_a / (n + allee_n0);
}

void EpidemicParams::validate() const {
    if (sigma < 0.0 || phi_e < 0.0 || phi_i < 0.0 || beta_i < 0.0 || beta_e < 0.0)
        throw InvalidArgument("epidemic rates must be non-negative");
    if (diffusion < 0.0) throw InvalidArgument("diffusion must be non-negative");
    if (allee_a < 0.0) throw InvalidArgument("Allee threshold must be non-negative");
    if (allee_a > 0.0 && !(allee_n0 >= 1.5 * allee_a))
        throw InvalidArgument("Allee shift must satisfy n0 >= 3/2 A");
}

ParamSchedule::ParamSchedule(std::vector<ScheduleEntry> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw InvalidArgument("empty parameter schedule");
    if (entries_.front().start_day != 0.0)
        throw InvalidArgument("parameter schedule must start at day 0");
    for (size_t k = 1; k < entries_.size(); ++k)
        if (!(entries_[k].start_day > entries_[k - 1].start_day))
            throw InvalidArgument("schedule start days must be strictly increasing");
    for (const auto& e : entries_) e.params.validate();
}

const EpidemicParams& ParamSchedule::at(double time) const {
    size_t k = 0;
    while (k + 1 < entries_.size() && time >= entries_[k + 1].start_day) ++k;
    return entries_[k].params;
}

ReactionRates reaction_rates(double s, double e, double i, double n, const EpidemicParams& p) {
    const double factor = allee_factor(n, p.allee_a, p.allee_n0);
    const double infection = factor * s * (p.beta_e * e + p.beta_i * i);
    const double incubation = p.sigma * e;
    const double recovery_e = p.phi_e * e;
    const double recovery_i = p.phi_i * i;
    return {-infection, infection - incubation - recovery_e, incubation - recovery_i,
            recovery_i + recovery_e};
}

void SeirState::validate(const Mesh& mesh, double tol) const {
    const size_t nv = static_cast<size_t>(mesh.vertex_count());
    if (s.size() != nv || e.size() != nv || i.size() != nv || r.size() != nv || n.size() != nv)
        throw InvalidArgument("state field length does not match vertex count");
    for (size_t v = 0; v < nv; ++v) {
        if (n[v] < 0.0) throw InvalidArgument("negative population density at vertex " + std::to_string(v));
        const double sum = s[v] + e[v] + i[v] + r[v];
        if (std::abs(sum - 1.0) > tol)
            throw InvalidArgument("fractions do not sum to 1 at vertex " + std::to_string(v) +
                                  " (sum = " + std::to_string(sum) + ")");
    }
}

void StepMonitor::observe(const SeirState& state) {
    bool undershoot = false;
    for (int v = 0; v < state.vertex_count(); ++v) {
        const double sum = state.s[v] + state.e[v] + state.i[v] + state.r[v];
        max_sum_deviation = std::max(max_sum_deviation, std::abs(sum - 1.0));
        for (double f : {state.s[v], state.e[v], state.i[v], state.r[v]}) {
            min_fraction = std::min(min_fraction, f);
            max_fraction = std::max(max_fraction, f);
            if (f < -1e-6) undershoot = true;
        }
    }
    if (undershoot) ++undershoot_steps;
}

double TrajectoryRecord::total_infectious() const {
    double sum = has_ode ? ode_i : 0.0;
    for (double v : i) sum += v;
    return sum;
}

double TrajectoryRecord::total_population() const {
    double sum = has_ode ? ode_s + ode_e + ode_i + ode_r : 0.0;
    for (size_t l = 0; l < s.size(); ++l) sum += s[l] + e[l] + i[l] + r[l];
    return sum;
}

std::vector<double> Trajectory::times() const {
    std::vector<double> out(records.size());
    for (size_t k = 0; k < records.size(); ++k) out[k] = records[k].time;
    return out;
}

std::vector<double> Trajectory::total_infectious_series() const {
    std::vector<double> out(records.size());
    for (size_t k = 0; k < records.size(); ++k) out[k] = records[k].total_infectious();
    return out;
}

PenaltyOperator make_interface_penalty(const Mesh& mesh, std::span<const int> edge_ids,
                                       double penalty_scale) {
    if (penalty_scale < 0.0) throw InvalidArgument("penalty scale must be non-negative");
    std::vector<double> weight(mesh.vertex_count(), 0.0);
    for (int id : edge_ids) {
        const MeshEdge& e = mesh.edges[id];
        if (!e.on_boundary()) throw InvalidArgument("penalty edge is not on the boundary");
        const Vec2 d = mesh.vertices[e.b] - mesh.vertices[e.a];
        const double half = 0.5 * std::hypot(d.x, d.y);
        weight[e.a] += penalty_scale * half;
        weight[e.b] += penalty_scale * half;
    }
    PenaltyOperator penalty;
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        if (weight[v] > 0.0) {
            penalty.vertices.push_back(v);
            penalty.weights.push_back(weight[v]);
        }
    }
    return penalty;
}

void apply_interface_penalty(SparseMatrix& system, std::span<double> rhs,
                             const PenaltyOperator& penalty, double value) {
    for (size_t k = 0; k < penalty.vertices.size(); ++k) {
        system.add_to_diagonal(penalty.vertices[k], penalty.weights[k]);
        rhs[penalty.vertices[k]] += penalty.weights[k] * value;
    }
}

PdeStepper::PdeStepper(const Mesh& mesh) : mesh_(&mesh), mass_(assemble_mass(mesh)) {}

void PdeStepper::ensure_system(double diffusion, double dt, const PenaltyOperator* penalty) {
    if (diffusion == cached_diffusion_ && dt == cached_dt_ && penalty == cached_penalty_) return;
    SparseMatrix stiffness = assemble_stiffness(*mesh_, diffusion);
    system_ = SparseMatrix::add(mass_, 1.0, stiffness, dt);
    if (penalty) {
        for (size_t k = 0; k < penalty->vertices.size(); ++k)
            system_.add_to_diagonal(penalty->vertices[k], penalty->weights[k]);
    }
    cached_diffusion_ = diffusion;
    cached_dt_ = dt;
    cached_penalty_ = penalty;
}

std::vector<double> PdeStepper::implicit_field_step(std::span<const double> y_old,
                                                    std::span<const double> rates,
                                                    const EpidemicParams& params, double dt,
                                                    const PenaltyOperator* penalty,
                                                    double penalty_value) {
    const int nv = mesh_->vertex_count();
    std::vector<double> predictor(nv);
    for (int v = 0; v < nv; ++v) predictor[v] = y_old[v] + dt * rates[v];
    if (params.diffusion == 0.0) return predictor;

    ensure_system(params.diffusion, dt, penalty);
    std::vector<double> rhs = mass_.multiply(predictor);
    CgOptions options;
    if (penalty) {
        // Penalty rows dominate ||rhs||; anchor the residual target to the
        // physical load instead so interior accuracy does not degrade.
        double physical = 0.0, total = 0.0;
        for (double v : rhs) physical += v * v;
        for (size_t k = 0; k < penalty->vertices.size(); ++k)
            rhs[penalty->vertices[k]] += penalty->weights[k] * penalty_value;
        for (double v : rhs) total += v * v;
        if (total > 0.0)
            options.relative_tolerance *= std::clamp(std::sqrt(physical / total), 1e-4, 1.0);
    }
    // The predictor is an excellent starting point: for spatially constant
    // fields it already solves the system exactly.
    return solve_cg(system_, rhs, options, predictor);
}

void PdeStepper::step(SeirState& state, const EpidemicParams& params, double dt,
                      const PenaltyOperator* penalty, const std::array<double, 4>* penalty_values,
                      StepMonitor* monitor) {
    if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
    params.validate();
    const int nv = mesh_->vertex_count();

    std::vector<double> rs(nv), re(nv), ri(nv), rr(nv);
    for (int v = 0; v < nv; ++v) {
        const ReactionRates rates = reaction_rates(state.s[v], state.e[v], state.i[v], state.n[v], params);
        rs[v] = rates.ds;
        re[v] = rates.de;
        ri[v] = rates.di;
        rr[v] = rates.dr;
    }

    const double pv_s = penalty_values ? (*penalty_values)[0] : 0.0;
    const double pv_e = penalty_values ? (*penalty_values)[1] : 0.0;
    const double pv_i = penalty_values ? (*penalty_values)[2] : 0.0;
    const double pv_r = penalty_values ? (*penalty_values)[3] : 0.0;

    // Solve s, e, i and the fraction sum with the shared operator, then take
    // r as the complement. Algebraically this equals solving r directly (the
    // systems are linear) but it keeps s+e+i+r exact against solver noise,
    // and with it the cancellation of the four interface fluxes.
    std::vector<double> sum_old(nv), sum_rate(nv);
    for (int v = 0; v < nv; ++v) {
        sum_old[v] = state.s[v] + state.e[v] + state.i[v] + state.r[v];
        sum_rate[v] = rs[v] + re[v] + ri[v] + rr[v];
    }
    const std::vector<double> sum_new =
        implicit_field_step(sum_old, sum_rate, params, dt, penalty, pv_s + pv_e + pv_i + pv_r);

    state.s = implicit_field_step(state.s, rs, params, dt, penalty, pv_s);
    state.e = implicit_field_step(state.e, re, params, dt, penalty, pv_e);
    state.i = implicit_field_step(state.i, ri, params, dt, penalty, pv_i);
    state.r.resize(nv);
    for (int v = 0; v < nv; ++v)
        state.r[v] = sum_new[v] - state.s[v] - state.e[v] - state.i[v];
    state.time += dt;

    if (monitor) monitor->observe(state);
}

std::vector<double> per_label_populations(const Mesh& mesh, std::span<const double> fraction,
                                          std::span<const double> density) {
    std::vector<double> sums(mesh.label_count(), 0.0);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        const double u0 = fraction[tri[0]], u1 = fraction[tri[1]], u2 = fraction[tri[2]];
        const double v0 = density[tri[0]], v1 = density[tri[1]], v2 = density[tri[2]];
        sums[mesh.triangle_labels[t] - 1] +=
            mesh.tri_area[t] / 12.0 *
            (2.0 * (u0 * v0 + u1 * v1 + u2 * v2) + u0 * v1 + u0 * v2 + u1 * v0 + u1 * v2 + u2 * v0 +
             u2 * v1);
    }
    return sums;
}

namespace {

TrajectoryRecord make_pde_record(const Mesh& mesh, const SeirState& state) {
    TrajectoryRecord rec;
    rec.time = state.time;
    rec.s = per_label_populations(mesh, state.s, state.n);
    rec.e = per_label_populations(mesh, state.e, state.n);
    rec.i = per_label_populations(mesh, state.i, state.n);
    rec.r = per_label_populations(mesh, state.r, state.n);
    return rec;
}

} // namespace

Trajectory run_full_pde(const Mesh& mesh, SeirState state, const ParamSchedule& schedule,
                        const RunOptions& options, const RecordObserver& observer) {
    if (options.t_end < 0.0) throw InvalidArgument("t_end must be non-negative");
    if (!(options.dt > 0.0)) throw InvalidArgument("dt must be positive");
    if (options.record_every < 1) throw InvalidArgument("record_every must be at least 1");
    state.validate(mesh);

    PdeStepper stepper(mesh);
    Trajectory traj;
    traj.monitor.observe(state);
    traj.records.push_back(make_pde_record(mesh, state));
    if (observer) observer(state, 0);

    const double t0 = state.time;
    const long steps = std::llround(options.t_end / options.dt);
    for (long k = 0; k < steps; ++k) {
        const EpidemicParams& params = schedule.at(t0 + k * options.dt);
        stepper.step(state, params, options.dt, nullptr, nullptr, &traj.monitor);
        state.time = t0 + (k + 1) * options.dt;
        if ((k + 1) % options.record_every == 0 || k + 1 == steps) {
            traj.records.push_back(make_pde_record(mesh, state));
            if (observer) observer(state, k + 1);
        }
    }
    return traj;
}

} // namespace episeir
