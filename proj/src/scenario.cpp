#include "scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>
#include <sstream>

#include <json.hpp>

#include "csv_io.hpp"
#include "errors.hpp"
#include "fit_model.hpp"
#include "metrics.hpp"
#include "triangle_io.hpp"
#include "vtk_io.hpp"

namespace episeir {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& context) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key '" + it.key() + "' in " + context);
}

double get_number(const json& obj, const std::string& key, const std::string& context) {
    if (!obj.contains(key)) throw ConfigError("missing key '" + key + "' in " + context);
    if (!obj[key].is_number()) throw ConfigError("key '" + key + "' in " + context + " must be a number");
    return obj[key].get<double>();
}

double get_number_or(const json& obj, const std::string& key, double fallback,
                     const std::string& context) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw ConfigError("key '" + key + "' in " + context + " must be a number");
    return obj[key].get<double>();
}

bool get_bool_or(const json& obj, const std::string& key, bool fallback, const std::string& context) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_boolean()) throw ConfigError("key '" + key + "' in " + context + " must be a boolean");
    return obj[key].get<bool>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& context) {
    if (!obj.contains(key)) throw ConfigError("missing key '" + key + "' in " + context);
    if (!obj[key].is_string()) throw ConfigError("key '" + key + "' in " + context + " must be a string");
    return obj[key].get<std::string>();
}

EpidemicParams parse_schedule_params(const json& obj, const std::string& context) {
    EpidemicParams p;
    p.sigma = get_number(obj, "sigma", context);
    p.phi_e = get_number(obj, "phi_e", context);
    p.phi_i = get_number(obj, "phi_i", context);
    if (obj.contains("beta")) {
        p.beta_i = p.beta_e = get_number(obj, "beta", context);
    } else {
        p.beta_i = get_number(obj, "beta_i", context);
        p.beta_e = get_number(obj, "beta_e", context);
    }
    p.diffusion = get_number(obj, "diffusion", context);
    p.allee_a = get_number_or(obj, "allee_a", 0.0, context);
    p.allee_n0 = get_number_or(obj, "allee_n0", 1.5 * p.allee_a, context);
    p.validate();
    return p;
}

} // namespace

std::string Scenario::resolve_path(const std::string& path) const {
    if (path.empty() || path.front() == '/' || base_dir.empty()) return path;
    return base_dir + "/" + path;
}

Scenario Scenario::parse(const std::string& json_text, const std::string& context,
                         const std::string& base_dir) {
    json root;
    try {
        root = json::parse(json_text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError(context + ": " + e.what());
    }
    if (!root.is_object()) throw ConfigError(context + ": top level must be an object");
    check_keys(root, {"mesh", "initial", "hybrid", "schedule", "run", "fit", "output_dir"}, context);

    Scenario sc;
    sc.base_dir = base_dir;

    if (!root.contains("mesh")) throw ConfigError("missing key 'mesh' in " + context);
    {
        const json& m = root["mesh"];
        check_keys(m, {"rectangle", "node_file", "ele_file", "coordinates_in_degrees", "label_cuts_x"},
                   "mesh");
        if (m.contains("rectangle")) {
            const json& r = m["rectangle"];
            check_keys(r, {"width", "height", "edge_length", "split_x"}, "mesh.rectangle");
            RectangleSpec rect;
            rect.width = get_number(r, "width", "mesh.rectangle");
            rect.height = get_number(r, "height", "mesh.rectangle");
            rect.edge_length = get_number(r, "edge_length", "mesh.rectangle");
            if (r.contains("split_x")) rect.split_x = get_number(r, "split_x", "mesh.rectangle");
            sc.mesh.rectangle = rect;
        }
        if (m.contains("node_file")) sc.mesh.node_file = get_string(m, "node_file", "mesh");
        if (m.contains("ele_file")) sc.mesh.ele_file = get_string(m, "ele_file", "mesh");
        sc.mesh.coordinates_in_degrees = get_bool_or(m, "coordinates_in_degrees", false, "mesh");
        if (m.contains("label_cuts_x")) {
            if (!m["label_cuts_x"].is_array())
                throw ConfigError("key 'label_cuts_x' in mesh must be an array");
            for (const json& v : m["label_cuts_x"]) sc.mesh.label_cuts_x.push_back(v.get<double>());
        }
        if (!sc.mesh.rectangle && !(sc.mesh.node_file && sc.mesh.ele_file))
            throw ConfigError("mesh needs either 'rectangle' or 'node_file'+'ele_file'");
    }

    if (!root.contains("initial")) throw ConfigError("missing key 'initial' in " + context);
    {
        const json& ini = root["initial"];
        check_keys(ini,
                   {"constant_fractions", "population_ridge", "basis", "province_file", "points_file",
                    "exposed_scale"},
                   "initial");
        if (ini.contains("constant_fractions")) {
            const json& c = ini["constant_fractions"];
            check_keys(c, {"s", "e", "i", "r"}, "initial.constant_fractions");
            ConstantFractions f;
            f.s = get_number(c, "s", "initial.constant_fractions");
            f.e = get_number(c, "e", "initial.constant_fractions");
            f.i = get_number(c, "i", "initial.constant_fractions");
            f.r = get_number(c, "r", "initial.constant_fractions");
            sc.initial.constant_fractions = f;
        }
        if (ini.contains("population_ridge")) {
            const json& r = ini["population_ridge"];
            check_keys(r, {"axis", "center", "variance", "total"}, "initial.population_ridge");
            RidgeSpec ridge;
            const std::string axis = get_string(r, "axis", "initial.population_ridge");
            if (axis != "x" && axis != "y")
                throw ConfigError("initial.population_ridge.axis must be \"x\" or \"y\"");
            ridge.axis = axis[0];
            ridge.center = get_number(r, "center", "initial.population_ridge");
            ridge.variance = get_number(r, "variance", "initial.population_ridge");
            ridge.total = get_number(r, "total", "initial.population_ridge");
            sc.initial.population_ridge = ridge;
        }
        if (ini.contains("basis")) {
            const json& b = ini["basis"];
            check_keys(b, {"std_dev", "centers"}, "initial.basis");
            BasisSpec basis;
            basis.std_dev = get_number(b, "std_dev", "initial.basis");
            if (b.contains("centers")) {
                if (!b["centers"].is_array())
                    throw ConfigError("initial.basis.centers must be an array of [x, y] pairs");
                for (const json& c : b["centers"]) {
                    if (!c.is_array() || c.size() != 2)
                        throw ConfigError("initial.basis.centers must be an array of [x, y] pairs");
                    basis.centers.push_back({c[0].get<double>(), c[1].get<double>()});
                }
            }
            sc.initial.basis = basis;
        }
        if (ini.contains("province_file"))
            sc.initial.province_file = get_string(ini, "province_file", "initial");
        if (ini.contains("points_file"))
            sc.initial.points_file = get_string(ini, "points_file", "initial");
        sc.initial.exposed_scale = get_number_or(ini, "exposed_scale", 1.0, "initial");
    }

    if (root.contains("hybrid")) {
        const json& h = root["hybrid"];
        check_keys(h, {"ode_labels", "penalty", "zero_boundary"}, "hybrid");
        if (h.contains("ode_labels")) {
            if (!h["ode_labels"].is_array()) throw ConfigError("hybrid.ode_labels must be an array");
            for (const json& v : h["ode_labels"]) sc.hybrid.ode_labels.push_back(v.get<int>());
        }
        sc.hybrid.penalty = get_number_or(h, "penalty", 1e6, "hybrid");
        sc.hybrid.zero_boundary = get_bool_or(h, "zero_boundary", false, "hybrid");
    }

    if (!root.contains("schedule") || !root["schedule"].is_array() || root["schedule"].empty())
        throw ConfigError("'schedule' must be a non-empty array");
    for (const json& entry : root["schedule"]) {
        check_keys(entry,
                   {"start_day", "sigma", "phi_e", "phi_i", "beta", "beta_i", "beta_e", "diffusion",
                    "allee_a", "allee_n0"},
                   "schedule entry");
        ScheduleEntry se;
        se.start_day = get_number(entry, "start_day", "schedule entry");
        se.params = parse_schedule_params(entry, "schedule entry");
        sc.schedule.push_back(se);
    }
    ParamSchedule(sc.schedule); // validates ordering

    if (!root.contains("run")) throw ConfigError("missing key 'run' in " + context);
    {
        const json& r = root["run"];
        check_keys(r, {"t_end", "dt", "record_every", "snapshot_every"}, "run");
        sc.run.t_end = get_number(r, "t_end", "run");
        sc.run.dt = get_number_or(r, "dt", 0.1, "run");
        sc.run.record_every = static_cast<int>(get_number_or(r, "record_every", 1, "run"));
        sc.run.snapshot_every = static_cast<int>(get_number_or(r, "snapshot_every", 0, "run"));
        if (!(sc.run.dt > 0.0)) throw ConfigError("run.dt must be positive");
        if (sc.run.t_end < 0.0) throw ConfigError("run.t_end must be non-negative");
    }

    if (root.contains("fit")) {
        const json& f = root["fit"];
        check_keys(f, {"vid_labels", "max_iterations", "residual_tolerance", "model"}, "fit");
        if (f.contains("vid_labels")) {
            if (!f["vid_labels"].is_array()) throw ConfigError("fit.vid_labels must be an array");
            for (const json& v : f["vid_labels"]) sc.fit.vid_labels.push_back(v.get<int>());
        }
        sc.fit.max_iterations = static_cast<int>(get_number_or(f, "max_iterations", 50, "fit"));
        sc.fit.residual_tolerance = get_number_or(f, "residual_tolerance", 1e-9, "fit");
        if (f.contains("model")) {
            sc.fit.model = get_string(f, "model", "fit");
            if (sc.fit.model != "pde" && sc.fit.model != "hybrid")
                throw ConfigError("fit.model must be \"pde\" or \"hybrid\"");
        }
    }

    if (root.contains("output_dir")) sc.output_dir = get_string(root, "output_dir", context);
    return sc;
}

Scenario Scenario::load(const std::string& path) {
    const std::string text = read_text_file(path);
    const std::filesystem::path p(path);
    return parse(text, path, p.has_parent_path() ? p.parent_path().string() : "");
}

std::string Scenario::to_json() const {
    json root;
    if (mesh.rectangle) {
        json r;
        r["width"] = mesh.rectangle->width;
        r["height"] = mesh.rectangle->height;
        r["edge_length"] = mesh.rectangle->edge_length;
        if (mesh.rectangle->split_x) r["split_x"] = *mesh.rectangle->split_x;
        root["mesh"]["rectangle"] = r;
    }
    if (mesh.node_file) root["mesh"]["node_file"] = *mesh.node_file;
    if (mesh.ele_file) root["mesh"]["ele_file"] = *mesh.ele_file;
    if (mesh.coordinates_in_degrees) root["mesh"]["coordinates_in_degrees"] = true;
    if (!mesh.label_cuts_x.empty()) root["mesh"]["label_cuts_x"] = mesh.label_cuts_x;

    json& ini = root["initial"];
    ini = json::object();
    if (initial.constant_fractions) {
        ini["constant_fractions"] = {{"s", initial.constant_fractions->s},
                                     {"e", initial.constant_fractions->e},
                                     {"i", initial.constant_fractions->i},
                                     {"r", initial.constant_fractions->r}};
    }
    if (initial.population_ridge) {
        ini["population_ridge"] = {{"axis", std::string(1, initial.population_ridge->axis)},
                                   {"center", initial.population_ridge->center},
                                   {"variance", initial.population_ridge->variance},
                                   {"total", initial.population_ridge->total}};
    }
    if (initial.basis) {
        json b;
        b["std_dev"] = initial.basis->std_dev;
        if (!initial.basis->centers.empty()) {
            json centers = json::array();
            for (const Vec2& c : initial.basis->centers) centers.push_back({c.x, c.y});
            b["centers"] = centers;
        }
        ini["basis"] = b;
    }
    if (initial.province_file) ini["province_file"] = *initial.province_file;
    if (initial.points_file) ini["points_file"] = *initial.points_file;
    ini["exposed_scale"] = initial.exposed_scale;

    if (!hybrid.ode_labels.empty() || hybrid.zero_boundary) {
        root["hybrid"] = {{"ode_labels", hybrid.ode_labels},
                          {"penalty", hybrid.penalty},
                          {"zero_boundary", hybrid.zero_boundary}};
    }

    json sched = json::array();
    for (const ScheduleEntry& e : schedule) {
        json entry;
        entry["start_day"] = e.start_day;
        entry["sigma"] = e.params.sigma;
        entry["phi_e"] = e.params.phi_e;
        entry["phi_i"] = e.params.phi_i;
        if (e.params.beta_i == e.params.beta_e) {
            entry["beta"] = e.params.beta_i;
        } else {
            entry["beta_i"] = e.params.beta_i;
            entry["beta_e"] = e.params.beta_e;
        }
        entry["diffusion"] = e.params.diffusion;
        entry["allee_a"] = e.params.allee_a;
        entry["allee_n0"] = e.params.allee_n0;
        sched.push_back(entry);
    }
    root["schedule"] = sched;

    root["run"] = {{"t_end", run.t_end},
                   {"dt", run.dt},
                   {"record_every", run.record_every},
                   {"snapshot_every", run.snapshot_every}};
    if (!fit.vid_labels.empty() || fit.model != "pde") {
        root["fit"] = {{"vid_labels", fit.vid_labels},
                       {"max_iterations", fit.max_iterations},
                       {"residual_tolerance", fit.residual_tolerance},
                       {"model", fit.model}};
    }
    root["output_dir"] = output_dir;
    return root.dump(2) + "\n";
}

void Scenario::save(const std::string& path) const { write_text_file(path, to_json()); }

Mesh build_scenario_mesh(const Scenario& scenario) {
    Mesh mesh = [&] {
        if (scenario.mesh.rectangle) {
            const RectangleSpec& r = *scenario.mesh.rectangle;
            return generate_rectangle_mesh(r.width, r.height, r.edge_length, r.split_x);
        }
        const double scale = scenario.mesh.coordinates_in_degrees ? kKmPerDegree : 1.0;
        return load_triangle_mesh_files(scenario.resolve_path(*scenario.mesh.node_file),
                                        scenario.resolve_path(*scenario.mesh.ele_file), scale);
    }();
    if (!scenario.mesh.label_cuts_x.empty()) mesh = label_by_x_bins(mesh, scenario.mesh.label_cuts_x);
    return mesh;
}

SeirState build_scenario_initial_state(const Scenario& scenario, const Mesh& mesh) {
    const InitialSpec& ini = scenario.initial;
    if (ini.constant_fractions) {
        if (!ini.population_ridge)
            throw ConfigError("initial.constant_fractions requires initial.population_ridge");
        const RidgeSpec& r = *ini.population_ridge;
        std::vector<double> density =
            ridge_gaussian_density(mesh, r.axis, r.center, r.variance, r.total);
        const ConstantFractions& f = *ini.constant_fractions;
        return constant_fraction_state(mesh, std::move(density), f.s, f.e, f.i, f.r);
    }
    if (ini.province_file) {
        if (!ini.basis) throw ConfigError("initial.province_file requires initial.basis");
        GaussianBasis basis;
        basis.std_dev = ini.basis->std_dev;
        basis.centers = ini.basis->centers;
        if (basis.centers.empty()) basis = centroid_basis(mesh, ini.basis->std_dev);
        const std::vector<ProvinceRow> provinces =
            read_province_csv(scenario.resolve_path(*ini.province_file));
        return build_initial_state(mesh, basis, provinces, ini.exposed_scale);
    }
    if (ini.points_file) {
        const double scale = scenario.mesh.coordinates_in_degrees ? kKmPerDegree : 1.0;
        const std::vector<PopulationPoint> points =
            read_points_csv(scenario.resolve_path(*ini.points_file), scale);
        return ingest_point_population(points, mesh);
    }
    throw ConfigError("initial needs constant_fractions, province_file, or points_file");
}

ParamSchedule build_scenario_schedule(const Scenario& scenario) {
    return ParamSchedule(scenario.schedule);
}

namespace {

RunOptions run_options_of(const Scenario& scenario) {
    RunOptions options;
    options.t_end = scenario.run.t_end;
    options.dt = scenario.run.dt;
    options.record_every = scenario.run.record_every;
    return options;
}

RecordObserver make_snapshot_observer(const Scenario& scenario, const Mesh& mesh,
                                      const std::string& output_dir, const char* prefix) {
    if (scenario.run.snapshot_every <= 0) return {};
    const int every = scenario.run.snapshot_every;
    auto counter = std::make_shared<long>(0);
    const std::string base = output_dir + "/" + prefix;
    return [&mesh, every, counter, base](const SeirState& state, long step) {
        if (*counter % every == 0) {
            char name[64];
            std::snprintf(name, sizeof(name), "_%06ld.vtk", step);
            write_vtk_snapshot(mesh, state, base + name);
        }
        ++*counter;
    };
}

void ensure_directory(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());
}

void warn_monitor(const Trajectory& trajectory) {
    if (trajectory.monitor.min_fraction < -1e-6)
        std::fprintf(stderr,
                     "warning: fraction undershoot %.3e observed in %ld steps; "
                     "consider a smaller dt\n",
                     trajectory.monitor.min_fraction, trajectory.monitor.undershoot_steps);
}

} // namespace

Trajectory run_scenario_pde(const Scenario& scenario, const std::string& output_dir) {
    ensure_directory(output_dir);
    const Mesh mesh = build_scenario_mesh(scenario);
    const SeirState state = build_scenario_initial_state(scenario, mesh);
    const ParamSchedule schedule = build_scenario_schedule(scenario);
    const Trajectory traj =
        run_full_pde(mesh, state, schedule, run_options_of(scenario),
                     make_snapshot_observer(scenario, mesh, output_dir, "snapshot_pde"));
    write_trajectory_csv(traj, output_dir + "/trajectory.csv");
    warn_monitor(traj);
    return traj;
}

Trajectory run_scenario_hybrid(const Scenario& scenario, const std::string& output_dir) {
    ensure_directory(output_dir);
    const Mesh mesh = build_scenario_mesh(scenario);
    const SeirState full_state = build_scenario_initial_state(scenario, mesh);
    const ParamSchedule schedule = build_scenario_schedule(scenario);

    Trajectory traj;
    if (scenario.hybrid.ode_labels.empty()) {
        // Degenerate split: nothing averaged, plain full-PDE evolution.
        traj = run_full_pde(mesh, full_state, schedule, run_options_of(scenario),
                            make_snapshot_observer(scenario, mesh, output_dir, "snapshot_hybrid"));
    } else {
        const std::set<int> ode_labels(scenario.hybrid.ode_labels.begin(),
                                       scenario.hybrid.ode_labels.end());
        const HybridSplit split = split_for_hybrid(mesh, ode_labels);
        SeirState pde_state;
        pde_state.time = full_state.time;
        pde_state.s = restrict_field(split, full_state.s);
        pde_state.e = restrict_field(split, full_state.e);
        pde_state.i = restrict_field(split, full_state.i);
        pde_state.r = restrict_field(split, full_state.r);
        pde_state.n = restrict_field(split, full_state.n);
        const OdeCompartment ode =
            make_ode_compartment(mesh, full_state, scenario.hybrid.ode_labels);

        HybridOptions options;
        options.penalty_scale = scenario.hybrid.penalty;
        options.zero_boundary = scenario.hybrid.zero_boundary;
        traj = run_hybrid(split.pde_mesh, pde_state, ode, split.interface_edge_ids, schedule,
                          run_options_of(scenario), options,
                          make_snapshot_observer(scenario, split.pde_mesh, output_dir,
                                                 "snapshot_hybrid"));
    }
    write_trajectory_csv(traj, output_dir + "/trajectory.csv");
    warn_monitor(traj);
    return traj;
}

Trajectory run_scenario_ode(const Scenario& scenario, const std::string& output_dir) {
    ensure_directory(output_dir);
    const Mesh mesh = build_scenario_mesh(scenario);
    const SeirState state = build_scenario_initial_state(scenario, mesh);
    const ParamSchedule schedule = build_scenario_schedule(scenario);
    const OdeCompartment ode = make_ode_compartment(mesh, state, all_labels(mesh));
    const Trajectory traj = run_ode(ode, schedule, run_options_of(scenario));
    write_trajectory_csv(traj, output_dir + "/trajectory.csv");
    return traj;
}

void scenario_fit_initial(const Scenario& scenario, const std::string& output_dir) {
    ensure_directory(output_dir);
    const Mesh mesh = build_scenario_mesh(scenario);
    const SeirState state = build_scenario_initial_state(scenario, mesh);
    write_vtk_snapshot(mesh, state, output_dir + "/initial_fields.vtk", "fitted initial fields");

    // Achieved subdomain aggregates for review against the input table.
    std::string report = "subdomain,area,population,susceptible,exposed,infectious,removed\n";
    const std::vector<Subdomain> table = subdomain_table(mesh);
    const std::vector<double> ones(mesh.vertex_count(), 1.0);
    for (int l = 1; l <= mesh.label_count(); ++l) {
        const std::array<int, 1> label = {l};
        report += std::to_string(l) + "," + format_double(table[l - 1].area) + "," +
                  format_double(integrate_weighted(mesh, ones, state.n, label)) + "," +
                  format_double(integrate_weighted(mesh, state.s, state.n, label)) + "," +
                  format_double(integrate_weighted(mesh, state.e, state.n, label)) + "," +
                  format_double(integrate_weighted(mesh, state.i, state.n, label)) + "," +
                  format_double(integrate_weighted(mesh, state.r, state.n, label)) + "\n";
    }
    write_text_file(output_dir + "/initial_report.csv", report);
}

namespace {

std::string lm_trace_text(const LmResult& lm) {
    std::string out;
    char buf[256];
    for (size_t k = 0; k < lm.trace.size(); ++k) {
        const LmTraceEntry& e = lm.trace[k];
        std::snprintf(buf, sizeof(buf),
                      "  %3zu  p = (%.8e, %.8e, %.8e, %.8e)  |F| = %.8e  lambda1 = %.3e  "
                      "lambda2 = %.3e  %s\n",
                      k, e.params[0], e.params[1], e.params[2], e.params[3], e.residual_norm,
                      e.lambda1, e.lambda2, e.accepted ? "accepted" : "rejected");
        out += buf;
    }
    return out;
}

} // namespace

void scenario_fit_parameters(const Scenario& scenario, const std::string& targets_csv,
                             const std::string& output_dir) {
    ensure_directory(output_dir);
    const Mesh mesh = build_scenario_mesh(scenario);
    const SeirState state = build_scenario_initial_state(scenario, mesh);
    const ParamSchedule schedule = build_scenario_schedule(scenario);

    const CsvTable table = read_csv_table(targets_csv);
    const std::vector<double>& times = table.column("time");

    std::vector<SegmentFit> fits;
    if (scenario.fit.model == "hybrid") {
        if (scenario.hybrid.ode_labels.empty())
            throw ConfigError("fit.model \"hybrid\" needs hybrid.ode_labels");
        const std::set<int> ode_labels(scenario.hybrid.ode_labels.begin(),
                                       scenario.hybrid.ode_labels.end());
        const HybridSplit split = split_for_hybrid(mesh, ode_labels);
        SeirState pde_state;
        pde_state.time = state.time;
        pde_state.s = restrict_field(split, state.s);
        pde_state.e = restrict_field(split, state.e);
        pde_state.i = restrict_field(split, state.i);
        pde_state.r = restrict_field(split, state.r);
        pde_state.n = restrict_field(split, state.n);
        const OdeCompartment ode = make_ode_compartment(mesh, state, scenario.hybrid.ode_labels);
        HybridOptions options;
        options.penalty_scale = scenario.hybrid.penalty;
        options.zero_boundary = scenario.hybrid.zero_boundary;

        const int nl = split.pde_mesh.label_count() + 1;
        DenseMatrix targets(static_cast<int>(times.size()), nl);
        for (int l = 1; l < nl; ++l) {
            const std::vector<double>& col = table.column("i_" + std::to_string(l));
            for (size_t k = 0; k < times.size(); ++k) targets(static_cast<int>(k), l - 1) = col[k];
        }
        const std::vector<double>& ode_col = table.column("i_ode");
        for (size_t k = 0; k < times.size(); ++k) targets(static_cast<int>(k), nl - 1) = ode_col[k];
        std::vector<bool> vid(nl, false);
        for (int l : scenario.fit.vid_labels) {
            if (l < 1 || l > nl) throw ConfigError("fit.vid_labels references unknown target column");
            vid[l - 1] = true;
        }
        fits = fit_schedule_segments_hybrid(split.pde_mesh, pde_state, ode,
                                            split.interface_edge_ids, options, schedule,
                                            scenario.run.t_end, times, targets, vid,
                                            scenario.run.dt, scenario.fit.max_iterations,
                                            scenario.fit.residual_tolerance);
    } else {
        const int nl = mesh.label_count();
        DenseMatrix targets(static_cast<int>(times.size()), nl);
        for (int l = 1; l <= nl; ++l) {
            const std::vector<double>& col = table.column("i_" + std::to_string(l));
            for (size_t k = 0; k < times.size(); ++k) targets(static_cast<int>(k), l - 1) = col[k];
        }
        std::vector<bool> vid(nl, false);
        for (int l : scenario.fit.vid_labels) {
            if (l < 1 || l > nl) throw ConfigError("fit.vid_labels references unknown subdomain");
            vid[l - 1] = true;
        }
        fits = fit_schedule_segments(mesh, state, schedule, scenario.run.t_end, times, targets, vid,
                                     scenario.run.dt, scenario.fit.max_iterations,
                                     scenario.fit.residual_tolerance);
    }

    std::string report;
    std::string summary = "segment_start,sigma,phi_e,phi_i,beta,residual,accepted_iterations,"
                          "converged,stagnated\n";
    Scenario fitted = scenario;
    for (size_t seg = 0; seg < fits.size(); ++seg) {
        const SegmentFit& fit = fits[seg];
        report += "segment [" + format_double(fit.start_day) + ", " + format_double(fit.end_day) +
                  ")\n" + lm_trace_text(fit.lm);
        summary += format_double(fit.start_day) + "," + format_double(fit.fitted_params[0]) + "," +
                   format_double(fit.fitted_params[1]) + "," + format_double(fit.fitted_params[2]) +
                   "," + format_double(fit.fitted_params[3]) + "," +
                   format_double(fit.lm.residual_norm) + "," +
                   std::to_string(fit.lm.accepted_iterations) + "," +
                   (fit.lm.converged ? "1" : "0") + "," + (fit.lm.stagnated ? "1" : "0") + "\n";
        EpidemicParams& p = fitted.schedule[fit.schedule_index].params;
        p.sigma = fit.fitted_params[0];
        p.phi_e = fit.fitted_params[1];
        p.phi_i = fit.fitted_params[2];
        p.beta_i = p.beta_e = fit.fitted_params[3];
    }
    write_text_file(output_dir + "/fit_report.txt", report);
    write_text_file(output_dir + "/fit_summary.csv", summary);
    fitted.save(output_dir + "/fitted_scenario.json");
}

std::vector<SweepRow> scenario_sweep(const Scenario& scenario, std::vector<double> fractions,
                                     const std::string& output_dir) {
    if (!scenario.mesh.rectangle)
        throw ConfigError("the fraction sweep needs a rectangle mesh specification");
    ensure_directory(output_dir);
    const RectangleSpec rect = *scenario.mesh.rectangle;
    for (double f : fractions)
        if (f < 0.0 || f > 1.0) throw InvalidArgument("sweep fractions must lie in [0, 1]");

    Scenario base = scenario;
    base.run.snapshot_every = 0;

    auto timed = [](auto&& fn) {
        const auto start = std::chrono::steady_clock::now();
        Trajectory traj = fn();
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        return std::make_pair(std::move(traj), elapsed.count());
    };

    // Full-PDE reference on the unsplit rectangle.
    Scenario ref_scenario = base;
    ref_scenario.mesh.rectangle->split_x.reset();
    const Mesh ref_mesh = build_scenario_mesh(ref_scenario);
    const SeirState ref_state = build_scenario_initial_state(ref_scenario, ref_mesh);
    const ParamSchedule schedule = build_scenario_schedule(base);
    const RunOptions run = run_options_of(base);
    auto [ref_traj, ref_runtime] =
        timed([&] { return run_full_pde(ref_mesh, ref_state, schedule, run); });
    const std::vector<double> reference = ref_traj.total_infectious_series();
    write_trajectory_csv(ref_traj, output_dir + "/sweep_reference_pde.csv");

    // Averaged baseline over the whole domain.
    const OdeCompartment whole = make_ode_compartment(ref_mesh, ref_state, all_labels(ref_mesh));
    auto [ode_traj, ode_runtime] = timed([&] { return run_ode(whole, schedule, run); });
    const std::vector<double> baseline = ode_traj.total_infectious_series();
    write_trajectory_csv(ode_traj, output_dir + "/sweep_baseline_ode.csv");

    std::vector<SweepRow> rows;
    std::string runtime_csv = "fraction,runtime_seconds\n";
    for (double f : fractions) {
        SweepRow row;
        row.fraction = f;
        std::vector<double> candidate;
        double runtime = 0.0;
        if (f == 0.0) {
            candidate = reference;
            runtime = ref_runtime;
        } else if (f == 1.0) {
            candidate = baseline;
            runtime = ode_runtime;
        } else {
            Scenario hs = base;
            hs.mesh.rectangle->split_x = rect.width * (1.0 - f);
            hs.hybrid.ode_labels = {2};
            const Mesh mesh = build_scenario_mesh(hs);
            const SeirState full_state = build_scenario_initial_state(hs, mesh);
            const HybridSplit split = split_for_hybrid(mesh, {2});
            SeirState pde_state;
            pde_state.time = full_state.time;
            pde_state.s = restrict_field(split, full_state.s);
            pde_state.e = restrict_field(split, full_state.e);
            pde_state.i = restrict_field(split, full_state.i);
            pde_state.r = restrict_field(split, full_state.r);
            pde_state.n = restrict_field(split, full_state.n);
            const OdeCompartment ode = make_ode_compartment(mesh, full_state, hs.hybrid.ode_labels);
            HybridOptions options;
            options.penalty_scale = hs.hybrid.penalty;
            options.zero_boundary = hs.hybrid.zero_boundary;
            auto [traj, secs] = timed([&] {
                return run_hybrid(split.pde_mesh, pde_state, ode, split.interface_edge_ids, schedule,
                                  run, options);
            });
            candidate = traj.total_infectious_series();
            runtime = secs;
            char name[64];
            std::snprintf(name, sizeof(name), "/sweep_hybrid_%g.csv", f * 100.0);
            write_trajectory_csv(traj, output_dir + name);
        }
        row.mean_abs_error = mean_absolute_error(candidate, reference);
        row.max_deviation = max_average_deviation(candidate, reference).max_abs;
        row.accuracy_value = accuracy(candidate, reference, baseline);
        row.runtime_seconds = runtime;
        rows.push_back(row);
        runtime_csv += format_double(f) + "," + format_double(runtime) + "\n";
    }

    std::string csv = "fraction,mean_abs_error,max_deviation,accuracy\n";
    for (const SweepRow& row : rows)
        csv += format_double(row.fraction) + "," + format_double(row.mean_abs_error) + "," +
               format_double(row.max_deviation) + "," + format_double(row.accuracy_value) + "\n";
    write_text_file(output_dir + "/sweep.csv", csv);
    write_text_file(output_dir + "/sweep_runtime.csv", runtime_csv);
    return rows;
}

std::string compare_report(const std::string& reference_csv, const std::string& candidate_csv,
                           const std::string& baseline_csv) {
    const CsvTable ref = read_csv_table(reference_csv);
    const CsvTable cand = read_csv_table(candidate_csv);
    const CsvTable base = read_csv_table(baseline_csv);
    const std::vector<double>& tr = ref.column("time");
    const std::vector<double>& tc = cand.column("time");
    const std::vector<double>& tb = base.column("time");
    if (tr.size() != tc.size() || tr.size() != tb.size())
        throw InvalidArgument("compare: trajectories have different lengths");
    for (size_t k = 0; k < tr.size(); ++k)
        if (std::abs(tr[k] - tc[k]) > 1e-9 || std::abs(tr[k] - tb[k]) > 1e-9)
            throw InvalidArgument("compare: trajectories use different time grids");

    const std::vector<double>& reference = ref.column("total_i");
    const std::vector<double>& candidate = cand.column("total_i");
    const std::vector<double>& baseline = base.column("total_i");

    const double acc = accuracy(candidate, reference, baseline);
    const Deviation dev = max_average_deviation(candidate, reference);
    const double mae = mean_absolute_error(candidate, reference);

    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "samples: %zu\n"
                  "accuracy (1 = reference, 0 = averaged baseline): %.6f\n"
                  "max deviation: %.6e persons (%.4f%% of reference peak)\n"
                  "mean absolute error: %.6e persons\n",
                  tr.size(), acc, dev.max_abs, 100.0 * dev.relative_to_peak, mae);
    return buf;
}

} // namespace episeir
