// Command-line front end for the episeir shared library. Talks to the engine
// exclusively through the C interface.
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "episeir.h"

namespace {

struct ScenarioHandle {
    episeir_scenario* handle = nullptr;
    ~ScenarioHandle() { episeir_scenario_close(handle); }
};

int report(int status) {
    if (status != EPISEIR_OK) {
        std::fprintf(stderr, "error: %s\n", episeir_last_error());
        return 1;
    }
    return 0;
}

int open_scenario(const std::string& path, ScenarioHandle& scenario) {
    return report(episeir_scenario_open(path.c_str(), &scenario.handle));
}

// Precedence: --out flag, EPISEIR_OUTPUT_DIR, the scenario's own setting.
std::string effective_output_dir(const std::string& flag, const episeir_scenario* scenario) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("EPISEIR_OUTPUT_DIR"); env && *env) return env;
    return episeir_scenario_output_dir(scenario);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"episeir — spatial SEIR simulation and calibration"};
    app.require_subcommand(1);
    app.set_version_flag("--version", episeir_version());

    // gen-mesh
    auto* gen = app.add_subcommand("gen-mesh", "Generate a structured rectangle mesh");
    std::vector<double> rect;
    double edge_length = 0.0;
    double split = -1.0;
    std::string mesh_out = "mesh";
    gen->add_option("--rect", rect, "Width and height (km)")->expected(2)->required();
    gen->add_option("--h", edge_length, "Target edge length (km)")->required();
    gen->add_option("--split", split, "Vertical split line x (km)");
    gen->add_option("--out", mesh_out, "Output path prefix (.node/.ele)");

    // shared scenario options
    std::string scenario_path;
    std::string out_dir;
    auto add_scenario_options = [&](CLI::App* cmd) {
        cmd->add_option("scenario", scenario_path, "Scenario JSON file")->required();
        cmd->add_option("--out", out_dir, "Output directory (overrides scenario and environment)");
    };

    auto* sim_pde = app.add_subcommand("simulate-pde", "Run the full reaction-diffusion model");
    add_scenario_options(sim_pde);

    auto* sim_hybrid = app.add_subcommand("simulate-hybrid", "Run the coupled PDE-ODE model");
    add_scenario_options(sim_hybrid);
    bool pure_ode = false;
    sim_hybrid->add_flag("--pure-ode", pure_ode,
                         "Run the averaged model over the whole domain (100% limit)");

    auto* fit_init = app.add_subcommand("fit-init", "Construct and report initial fields");
    add_scenario_options(fit_init);

    auto* fit_params = app.add_subcommand("fit-params", "Calibrate epidemic parameters");
    add_scenario_options(fit_params);
    std::string targets_csv;
    fit_params->add_option("--targets", targets_csv, "Target CSV (time, i_1, ..., i_L)")->required();

    auto* sweep = app.add_subcommand("sweep", "Vary the averaged-region share of a rectangle");
    add_scenario_options(sweep);
    std::vector<double> fractions = {0.0, 0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0};
    sweep->add_option("--fractions", fractions, "Averaged-region area fractions in [0, 1]");

    auto* compare = app.add_subcommand("compare", "Score a run against reference and baseline");
    std::string ref_csv, cand_csv, base_csv, report_path = "compare_report.txt";
    compare->add_option("reference", ref_csv, "Full-PDE trajectory CSV")->required();
    compare->add_option("candidate", cand_csv, "Candidate trajectory CSV")->required();
    compare->add_option("baseline", base_csv, "Averaged-baseline trajectory CSV")->required();
    compare->add_option("--out", report_path, "Report file");

    CLI11_PARSE(app, argc, argv);

    if (gen->parsed())
        return report(episeir_generate_mesh(rect[0], rect[1], edge_length, split,
                                            (mesh_out + ".node").c_str(),
                                            (mesh_out + ".ele").c_str()));

    if (compare->parsed())
        return report(episeir_compare(ref_csv.c_str(), cand_csv.c_str(), base_csv.c_str(),
                                      report_path.c_str()));

    ScenarioHandle scenario;
    if (int rc = open_scenario(scenario_path, scenario); rc != 0) return rc;
    const std::string dir = effective_output_dir(out_dir, scenario.handle);

    if (sim_pde->parsed()) return report(episeir_run_pde(scenario.handle, dir.c_str()));
    if (sim_hybrid->parsed()) {
        if (pure_ode) return report(episeir_run_ode(scenario.handle, dir.c_str()));
        return report(episeir_run_hybrid(scenario.handle, dir.c_str()));
    }
    if (fit_init->parsed()) return report(episeir_fit_initial(scenario.handle, dir.c_str()));
    if (fit_params->parsed())
        return report(episeir_fit_parameters(scenario.handle, targets_csv.c_str(), dir.c_str()));
    if (sweep->parsed())
        return report(episeir_sweep(scenario.handle, fractions.data(),
                                    static_cast<int>(fractions.size()), dir.c_str()));

    return 1;
}
