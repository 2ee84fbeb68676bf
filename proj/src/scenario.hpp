#pragma once
#include <optional>
#include <string>
#include <vector>

#include "hybrid.hpp"
#include "init_fields.hpp"
#include "mesh.hpp"
#include "seir.hpp"

namespace episeir {

struct RectangleSpec {
    double width = 0.0;
    double height = 0.0;
    double edge_length = 0.0;
    std::optional<double> split_x;
};

struct MeshSpec {
    std::optional<RectangleSpec> rectangle;
    std::optional<std::string> node_file;
    std::optional<std::string> ele_file;
    bool coordinates_in_degrees = false;
    std::vector<double> label_cuts_x;
};

struct ConstantFractions {
    double s = 1.0, e = 0.0, i = 0.0, r = 0.0;
};

struct RidgeSpec {
    char axis = 'y';
    double center = 0.0;
    double variance = 0.0;
    double total = 0.0;
};

struct BasisSpec {
    double std_dev = 0.0;
    std::vector<Vec2> centers; // empty -> subdomain centroids
};

struct InitialSpec {
    std::optional<ConstantFractions> constant_fractions;
    std::optional<RidgeSpec> population_ridge;
    std::optional<BasisSpec> basis;
    std::optional<std::string> province_file;
    std::optional<std::string> points_file;
    double exposed_scale = 1.0;
};

struct HybridSpec {
    std::vector<int> ode_labels;
    double penalty = 1e6;
    bool zero_boundary = false;
};

struct RunSpec {
    double t_end = 0.0;
    double dt = 0.1;
    int record_every = 1;
    int snapshot_every = 0; // records between VTK snapshots, 0 = off
};

struct FitSpec {
    std::vector<int> vid_labels;
    int max_iterations = 50;
    double residual_tolerance = 1e-9;
    std::string model = "pde"; // or "hybrid"
};

struct Scenario {
    MeshSpec mesh;
    InitialSpec initial;
    HybridSpec hybrid;
    std::vector<ScheduleEntry> schedule;
    RunSpec run;
    FitSpec fit;
    std::string output_dir = "out";
    std::string base_dir; // directory of the config file; resolves relative paths

    static Scenario load(const std::string& path);
    static Scenario parse(const std::string& json_text, const std::string& context,
                          const std::string& base_dir);
    std::string to_json() const;
    void save(const std::string& path) const;

    std::string resolve_path(const std::string& path) const;
};

Mesh build_scenario_mesh(const Scenario& scenario);
SeirState build_scenario_initial_state(const Scenario& scenario, const Mesh& mesh);
ParamSchedule build_scenario_schedule(const Scenario& scenario);

// Runners write trajectory.csv (and VTK snapshots when configured) into
// output_dir, creating it as needed. They return the trajectory.
Trajectory run_scenario_pde(const Scenario& scenario, const std::string& output_dir);
Trajectory run_scenario_hybrid(const Scenario& scenario, const std::string& output_dir);
Trajectory run_scenario_ode(const Scenario& scenario, const std::string& output_dir);

void scenario_fit_initial(const Scenario& scenario, const std::string& output_dir);
void scenario_fit_parameters(const Scenario& scenario, const std::string& targets_csv,
                             const std::string& output_dir);

struct SweepRow {
    double fraction = 0.0;
    double mean_abs_error = 0.0;
    double max_deviation = 0.0;
    double accuracy_value = 0.0;
    double runtime_seconds = 0.0;
};

// Varies the share of the rectangle handed to the averaged model, runs the
// hybrid for each fraction, and tabulates the misfit against the full-PDE
// reference. Requires a rectangle mesh spec. Writes sweep.csv plus the
// per-fraction trajectories; runtimes go to a separate file so the data
// files stay byte-reproducible.
std::vector<SweepRow> scenario_sweep(const Scenario& scenario, std::vector<double> fractions,
                                     const std::string& output_dir);

// accuracy/deviation report for a candidate run against a reference and an
// averaged-model baseline, all read from trajectory CSVs.
std::string compare_report(const std::string& reference_csv, const std::string& candidate_csv,
                           const std::string& baseline_csv);

} // namespace episeir
