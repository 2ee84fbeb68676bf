#pragma once
#include <array>
#include <functional>
#include <vector>

#include "fem.hpp"
#include "mesh.hpp"
#include "sparse.hpp"

namespace episeir {

// Density-dependent transmission multiplier 1 - A/(n + n0), bounded below by
// 1/3 through the shift n0 = 3/2 A. A = 0 disables the effect.
double allee_factor(double n, double allee_a, double allee_n0);

// Rates are per day, densities persons/km^2, diffusion km^2/day.
struct EpidemicParams {
    double sigma = 0.0;   // inverse incubation period
    double phi_e = 0.0;   // asymptomatic recovery rate
    double phi_i = 0.0;   // infected recovery rate
    double beta_i = 0.0;  // symptomatic infection rate
    double beta_e = 0.0;  // asymptomatic infection rate
    double diffusion = 0.0;
    double allee_a = 0.0;
    double allee_n0 = 0.0;

    void validate() const;
};

struct ScheduleEntry {
    double start_day = 0.0;
    EpidemicParams params;
};

// Piecewise-constant parameter schedule; entry k is active on
// [start_k, start_{k+1}).
class ParamSchedule {
public:
    ParamSchedule() = default;
    explicit ParamSchedule(std::vector<ScheduleEntry> entries);
    const EpidemicParams& at(double time) const;
    const std::vector<ScheduleEntry>& entries() const { return entries_; }

private:
    std::vector<ScheduleEntry> entries_;
};

struct ReactionRates {
    double ds, de, di, dr;
};

ReactionRates reaction_rates(double s, double e, double i, double n, const EpidemicParams& params);

// Nodal fractions s,e,i,r and the static population density n.
struct SeirState {
    double time = 0.0;
    std::vector<double> s, e, i, r, n;

    int vertex_count() const { return static_cast<int>(s.size()); }
    // Checks field sizes and |s+e+i+r-1| <= tol at every vertex.
    void validate(const Mesh& mesh, double tol = 1e-8) const;
};

// Running extrema used to surface conservation/undershoot warnings.
struct StepMonitor {
    double max_sum_deviation = 0.0;
    double min_fraction = 0.0;
    double max_fraction = 1.0;
    long undershoot_steps = 0; // steps with a fraction below -1e-6

    void observe(const SeirState& state);
};

struct TrajectoryRecord {
    double time = 0.0;
    // per-subdomain compartment populations (persons), index 0 <-> label 1
    std::vector<double> s, e, i, r;
    bool has_ode = false;
    double ode_s = 0.0, ode_e = 0.0, ode_i = 0.0, ode_r = 0.0; // persons

    double total_infectious() const;
    double total_population() const;
};

struct Trajectory {
    std::vector<TrajectoryRecord> records;
    StepMonitor monitor;

    std::vector<double> times() const;
    std::vector<double> total_infectious_series() const;
};

// Penalty term steering interface vertices toward a prescribed value; weights
// are penalty_scale times the local edge mass. Building it from edges that
// are not marked Interface is allowed (tests use plain boundary subsets).
struct PenaltyOperator {
    std::vector<int> vertices;
    std::vector<double> weights;
};

PenaltyOperator make_interface_penalty(const Mesh& mesh, std::span<const int> edge_ids,
                                       double penalty_scale);

// Adds weights to the system diagonal and weight*value to the rhs. As the
// penalty grows the solution approaches `value` on the penalized vertices.
void apply_interface_penalty(SparseMatrix& system, std::span<double> rhs,
                             const PenaltyOperator& penalty, double value);

// Semi-implicit stepper: reaction explicit at the current state, diffusion
// implicit, homogeneous Neumann boundary natural. The assembled system
// M + dt K (+ penalty diagonal) is cached across steps with identical
// coefficients. With D = 0 the step reduces to the pointwise explicit update
// and any interface penalty is inert (there is no diffusion to constrain).
class PdeStepper {
public:
    explicit PdeStepper(const Mesh& mesh);

    const Mesh& mesh() const { return *mesh_; }
    const SparseMatrix& mass() const { return mass_; }

    void step(SeirState& state, const EpidemicParams& params, double dt,
              const PenaltyOperator* penalty = nullptr,
              const std::array<double, 4>* penalty_values = nullptr,
              StepMonitor* monitor = nullptr);

    // Solves (M + dt K + penalty) y = M(y_old + dt r) + penalty_rhs for one field.
    std::vector<double> implicit_field_step(std::span<const double> y_old,
                                            std::span<const double> rates,
                                            const EpidemicParams& params, double dt,
                                            const PenaltyOperator* penalty = nullptr,
                                            double penalty_value = 0.0);

private:
    void ensure_system(double diffusion, double dt, const PenaltyOperator* penalty);

    const Mesh* mesh_;
    SparseMatrix mass_;
    SparseMatrix system_;
    double cached_diffusion_ = -1.0;
    double cached_dt_ = -1.0;
    const PenaltyOperator* cached_penalty_ = nullptr;
};

struct RunOptions {
    double t_end = 0.0;
    double dt = 0.1;
    int record_every = 1;
};

using RecordObserver = std::function<void(const SeirState&, long step)>;

// Per-subdomain populations \int_l fraction * n dx in one mesh pass.
std::vector<double> per_label_populations(const Mesh& mesh, std::span<const double> fraction,
                                          std::span<const double> density);

Trajectory run_full_pde(const Mesh& mesh, SeirState state, const ParamSchedule& schedule,
                        const RunOptions& options, const RecordObserver& observer = {});

} // namespace episeir
