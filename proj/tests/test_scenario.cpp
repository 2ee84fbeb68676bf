#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "csv_io.hpp"
#include "errors.hpp"
#include "scenario.hpp"
#include "vtk_io.hpp"

using namespace episeir;

namespace {

const char* kRectangleScenario = R"({
  // synthetic rectangle with a vertical split
  "mesh": {"rectangle": {"width": 2.0, "height": 1.0, "edge_length": 0.25, "split_x": 1.0}},
  "initial": {
    "constant_fractions": {"s": 0.99, "e": 0.005, "i": 0.005, "r": 0.0},
    "population_ridge": {"axis": "y", "center": 0.5, "variance": 0.1, "total": 1.0e8}
  },
  "hybrid": {"ode_labels": [2], "penalty": 1.0e6},
  "schedule": [
    {"start_day": 0, "sigma": 2.6676e-2, "phi_e": 0.0, "phi_i": 2.3310e-1,
     "beta": 4.4202e-1, "diffusion": 3.5115e-4, "allee_a": 3.0e7, "allee_n0": 4.5e7}
  ],
  "run": {"t_end": 2.0, "dt": 0.1, "record_every": 1},
  "output_dir": "out"
})";

std::filesystem::path temp_dir(const char* name) {
    const auto dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("scenario parsing, comments, and round trip") {
    const Scenario sc = Scenario::parse(kRectangleScenario, "test", "");
    REQUIRE(sc.mesh.rectangle.has_value());
    CHECK(sc.mesh.rectangle->width == 2.0);
    CHECK(sc.mesh.rectangle->split_x == 1.0);
    CHECK(sc.initial.constant_fractions->e == 0.005);
    CHECK(sc.hybrid.ode_labels == std::vector<int>{2});
    CHECK(sc.schedule.size() == 1);
    CHECK(sc.schedule[0].params.beta_e == doctest::Approx(4.4202e-1));
    CHECK(sc.run.t_end == 2.0);

    const Scenario again = Scenario::parse(sc.to_json(), "round-trip", "");
    CHECK(again.mesh.rectangle->edge_length == sc.mesh.rectangle->edge_length);
    CHECK(again.schedule[0].params.sigma == sc.schedule[0].params.sigma);
    CHECK(again.hybrid.penalty == sc.hybrid.penalty);
    CHECK(again.initial.population_ridge->variance == sc.initial.population_ridge->variance);
}

TEST_CASE("config errors name the offending key") {
    try {
        Scenario::parse(R"({"mesh": {"rectangel": {}}, "initial": {}, "schedule": [], "run": {}})",
                        "test", "");
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("rectangel") != std::string::npos);
    }
    try {
        Scenario::parse(R"({"initial": {}, "schedule": [{}], "run": {"t_end": 1}})", "test", "");
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("mesh") != std::string::npos);
    }
}

TEST_CASE("pde runner writes a deterministic trajectory") {
    const Scenario sc = Scenario::parse(kRectangleScenario, "test", "");
    const auto dir_a = temp_dir("episeir_test_pde_a");
    const auto dir_b = temp_dir("episeir_test_pde_b");
    run_scenario_pde(sc, dir_a.string());
    run_scenario_pde(sc, dir_b.string());
    const std::string a = read_text_file((dir_a / "trajectory.csv").string());
    const std::string b = read_text_file((dir_b / "trajectory.csv").string());
    CHECK(a == b);

    const CsvTable table = parse_csv_table(a, "trajectory");
    CHECK(table.column("time").size() == 21);
    CHECK(table.has_column("total_i"));
    CHECK(table.has_column("i_1"));
    CHECK(table.has_column("i_2"));
    // initial total population is the configured ridge mass
    const double pop0 = table.column("total_s")[0] + table.column("total_e")[0] +
                        table.column("total_i")[0] + table.column("total_r")[0];
    CHECK(pop0 == doctest::Approx(1.0e8).epsilon(1e-9));
}

TEST_CASE("hybrid runner exposes the averaged-region columns") {
    const Scenario sc = Scenario::parse(kRectangleScenario, "test", "");
    const auto dir = temp_dir("episeir_test_hybrid");
    run_scenario_hybrid(sc, dir.string());
    const CsvTable table = read_csv_table((dir / "trajectory.csv").string());
    CHECK(table.has_column("ode_i"));
    CHECK(table.column("ode_s")[0] == doctest::Approx(0.99 * 5.0e7).epsilon(1e-9));
    // only the retained half remains in the subdomain columns
    CHECK(table.column("s_1")[0] == doctest::Approx(0.99 * 5.0e7).epsilon(1e-9));
}

TEST_CASE("ode runner degenerates to a single well-mixed compartment") {
    const Scenario sc = Scenario::parse(kRectangleScenario, "test", "");
    const auto dir = temp_dir("episeir_test_ode");
    run_scenario_ode(sc, dir.string());
    const CsvTable table = read_csv_table((dir / "trajectory.csv").string());
    CHECK(table.column("ode_i")[0] == doctest::Approx(0.005 * 1.0e8).epsilon(1e-9));
}

TEST_CASE("snapshots come out as readable vtk") {
    Scenario sc = Scenario::parse(kRectangleScenario, "test", "");
    sc.run.snapshot_every = 10;
    sc.hybrid.ode_labels.clear();
    const auto dir = temp_dir("episeir_test_vtk");
    run_scenario_pde(sc, dir.string());
    const std::string vtk = read_text_file((dir / "snapshot_pde_000000.vtk").string());
    CHECK(vtk.find("# vtk DataFile Version 3.0") == 0);
    CHECK(vtk.find("DATASET UNSTRUCTURED_GRID") != std::string::npos);
    CHECK(vtk.find("SCALARS infectious double 1") != std::string::npos);
    CHECK(vtk.find("SCALARS infectious_density double 1") != std::string::npos);
    CHECK(vtk.find("SCALARS subdomain int 1") != std::string::npos);
}

TEST_CASE("compare report scores the averaged model at zero") {
    const Scenario sc = Scenario::parse(kRectangleScenario, "test", "");
    const auto dir = temp_dir("episeir_test_compare");
    run_scenario_pde(sc, (dir / "pde").string());
    run_scenario_hybrid(sc, (dir / "hybrid").string());
    run_scenario_ode(sc, (dir / "ode").string());
    const std::string report = compare_report((dir / "pde" / "trajectory.csv").string(),
                                              (dir / "ode" / "trajectory.csv").string(),
                                              (dir / "ode" / "trajectory.csv").string());
    CHECK(report.find("accuracy") != std::string::npos);
    CHECK(report.find("0.000000") != std::string::npos);

    const std::string hybrid_report = compare_report((dir / "pde" / "trajectory.csv").string(),
                                                     (dir / "hybrid" / "trajectory.csv").string(),
                                                     (dir / "ode" / "trajectory.csv").string());
    CHECK(hybrid_report.find("accuracy") != std::string::npos);
}

TEST_CASE("sweep table is monotone on a coarse short run") {
    Scenario sc = Scenario::parse(kRectangleScenario, "test", "");
    sc.run.t_end = 5.0;
    const auto dir = temp_dir("episeir_test_sweep");
    const std::vector<SweepRow> rows = scenario_sweep(sc, {0.0, 0.25, 0.5, 0.75, 1.0}, dir.string());
    REQUIRE(rows.size() == 5);
    CHECK(rows[0].mean_abs_error == 0.0);
    CHECK(rows[0].accuracy_value == doctest::Approx(1.0));
    CHECK(rows[4].accuracy_value == doctest::Approx(0.0));
    CHECK(std::filesystem::exists(dir / "sweep.csv"));
    CHECK(std::filesystem::exists(dir / "sweep_runtime.csv"));
    CHECK(std::filesystem::exists(dir / "sweep_hybrid_50.csv"));
}

TEST_CASE("point-population scenarios flow through the runner") {
    const auto dir = temp_dir("episeir_test_points");
    write_text_file((dir / "points.csv").string(),
                    "x,y,status\n0.2,0.3,S\n0.2,0.35,S\n0.25,0.3,I\n0.7,0.7,S\n");
    const std::string config = std::string(R"({
      "mesh": {"rectangle": {"width": 1.0, "height": 1.0, "edge_length": 0.1}},
      "initial": {"points_file": "points.csv"},
      "schedule": [{"start_day": 0, "sigma": 0.1, "phi_e": 0.0, "phi_i": 0.2,
                    "beta": 0.4, "diffusion": 1e-4, "allee_a": 0.0, "allee_n0": 0.0}],
      "run": {"t_end": 1.0, "dt": 0.1}
    })");
    const Scenario sc = Scenario::parse(config, "test", dir.string());
    run_scenario_pde(sc, (dir / "out").string());
    const CsvTable table = read_csv_table((dir / "out" / "trajectory.csv").string());
    const double pop0 = table.column("total_s")[0] + table.column("total_e")[0] +
                        table.column("total_i")[0] + table.column("total_r")[0];
    CHECK(pop0 == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("province scenarios build their basis from centroids") {
    const auto dir = temp_dir("episeir_test_provinces");
    write_text_file((dir / "provinces.csv").string(),
                    "subdomain,population,infectious,removed\n"
                    "1,2.0e6,1.0e4,1.2e6\n"
                    "2,3.0e6,2.0e4,1.8e6\n");
    const std::string config = R"({
      "mesh": {"rectangle": {"width": 2.0, "height": 1.0, "edge_length": 0.1, "split_x": 1.0}},
      "initial": {"province_file": "provinces.csv", "basis": {"std_dev": 0.3}, "exposed_scale": 1.0},
      "schedule": [{"start_day": 0, "sigma": 0.1, "phi_e": 0.0, "phi_i": 0.2,
                    "beta": 0.4, "diffusion": 3.5e-4, "allee_a": 3.0e7, "allee_n0": 4.5e7}],
      "run": {"t_end": 1.0, "dt": 0.1}
    })";
    const Scenario sc = Scenario::parse(config, "test", dir.string());
    scenario_fit_initial(sc, (dir / "out").string());
    CHECK(std::filesystem::exists(dir / "out" / "initial_fields.vtk"));
    const CsvTable report = read_csv_table((dir / "out" / "initial_report.csv").string());
    CHECK(report.column("population")[0] == doctest::Approx(2.0e6).epsilon(1e-6));
    CHECK(report.column("infectious")[1] == doctest::Approx(2.0e4).epsilon(1e-6));
}

TEST_CASE("segment fitting recovers parameters from self-generated targets") {
    // coarse, single segment, tight loop: a smoke test of the calibration path
    const auto dir = temp_dir("episeir_test_fit");
    const std::string config = R"({
      "mesh": {"rectangle": {"width": 2.0, "height": 1.0, "edge_length": 0.25, "split_x": 1.0}},
      "initial": {
        "constant_fractions": {"s": 0.99, "e": 0.005, "i": 0.005, "r": 0.0},
        "population_ridge": {"axis": "y", "center": 0.5, "variance": 0.1, "total": 1.0e8}
      },
      "schedule": [{"start_day": 0, "sigma": 2.6676e-2, "phi_e": 1.0e-3, "phi_i": 2.3310e-1,
                    "beta": 4.4202e-1, "diffusion": 3.5115e-4, "allee_a": 3.0e7, "allee_n0": 4.5e7}],
      "run": {"t_end": 4.0, "dt": 0.1},
      "fit": {"max_iterations": 15, "residual_tolerance": 1e-4}
    })";
    const Scenario truth = Scenario::parse(config, "test", dir.string());

    // generate targets with the true parameters
    const Trajectory traj = run_scenario_pde(truth, (dir / "truth").string());
    std::string targets = "time,i_1,i_2\n";
    for (const TrajectoryRecord& rec : traj.records) {
        if (rec.time == 0.0 || std::fmod(rec.time, 1.0) > 1e-9) continue;
        targets += format_double(rec.time) + "," + format_double(rec.i[0]) + "," +
                   format_double(rec.i[1]) + "\n";
    }
    write_text_file((dir / "targets.csv").string(), targets);

    // perturb the guess and fit
    Scenario guess = truth;
    guess.schedule[0].params.sigma *= 1.2;
    guess.schedule[0].params.beta_i *= 0.85;
    guess.schedule[0].params.beta_e *= 0.85;
    scenario_fit_parameters(guess, (dir / "targets.csv").string(), (dir / "fit").string());

    CHECK(std::filesystem::exists(dir / "fit" / "fit_report.txt"));
    const CsvTable summary = read_csv_table((dir / "fit" / "fit_summary.csv").string());
    CHECK(summary.column("beta")[0] == doctest::Approx(4.4202e-1).epsilon(0.05));

    // the fitted scenario file re-parses and carries the calibrated values
    const Scenario fitted = Scenario::load((dir / "fit" / "fitted_scenario.json").string());
    CHECK(fitted.schedule[0].params.beta_i == doctest::Approx(summary.column("beta")[0]));
}
