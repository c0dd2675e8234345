#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "bersim/error.hpp"
#include "bersim/harness.hpp"

namespace fs = std::filesystem;
using namespace bersim;

namespace {

int cmd_generate_graph(int n, double p, std::uint64_t seed, double area_x, double area_y,
                       double z_band, const std::string& out_path) {
    const TimeGraph g = generate_er(n, p, {area_x, area_y, z_band}, seed);
    std::ofstream out(out_path);
    if (!out) throw ConfigError("cannot write '" + out_path + "'");
    save_graph(g, out);
    std::cout << "wrote " << out_path << " (" << g.vertices.size() << " vertices, "
              << g.edges.size() << " edges)\n";
    return 0;
}

void print_rows(const std::vector<AggregateRow>& rows) {
    for (const AggregateRow& row : rows) {
        std::printf("%-28s SUC %6.1f±%-4.1f DEL %6.1f±%-4.1f FAIL %6.1f±%-4.1f ABRT %6.1f±%-4.1f\n",
                    row.key.label().c_str(), row.suc.mean, row.suc.std, row.del.mean, row.del.std,
                    row.fail.mean, row.fail.std, row.abrt.mean, row.abrt.std);
    }
}

int cmd_run(const std::string& config_path, const std::string& out_dir, bool serial) {
    const SimConfig cfg = load_config_file(config_path);
    const RunMode mode = serial ? RunMode::Serial : RunMode::Parallel;

    if (cfg.fleet.enabled) {
        FleetScenario fsc;
        fsc.base = build_trial_scenario(
            cfg, {cfg.planner.planner, cfg.mission.b0, cfg.wind.k, cfg.planner.lambda, ""},
            cfg.experiment.seed);
        fsc.customers = cfg.fleet.customers;
        fsc.n_drones = cfg.fleet.drones;
        fsc.drone = cfg.fleet.drone;
        fsc.truck_speed = cfg.fleet.truck_speed;
        fsc.d_safe = cfg.fleet.d_safe;
        const FleetRecord rec = run_fleet(fsc, cfg.experiment.seed);

        fs::create_directories(out_dir);
        std::ofstream log(out_dir + "/fleet_log.csv");
        log << "t,event,vehicle,detail\n";
        for (const FleetEvent& ev : rec.timeline)
            log << ev.t << ',' << ev.event << ',' << ev.vehicle << ',' << ev.detail << '\n';
        std::ofstream recs(out_dir + "/records.csv");
        write_records_csv(recs, rec.missions);
        std::cout << rec.missions.size() << " drone missions, " << rec.conflicts
                  << " conflicts, " << rec.unserved_customers.size() << " unserved; logs in "
                  << out_dir << '\n';
        return 0;
    }

    const ExperimentResult result = run_experiment(cfg, mode);
    persist_experiment(result, out_dir, cfg.experiment.rounds);
    print_rows(result.rows);
    std::cout << "results in " << out_dir << '\n';
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::vector<double>& lambdas,
              const std::string& out_dir, bool serial) {
    const SimConfig cfg = load_config_file(config_path);
    const ExperimentResult result =
        lambda_sweep(cfg, lambdas, serial ? RunMode::Serial : RunMode::Parallel);
    persist_experiment(result, out_dir, cfg.experiment.rounds);
    std::ofstream out(out_dir + "/sweep.csv");
    write_sweep_csv(out, result.rows);
    print_rows(result.rows);
    std::cout << "sweep table in " << out_dir << "/sweep.csv\n";
    return 0;
}

int cmd_ablate(const std::string& config_path, const std::string& out_dir, bool serial) {
    const SimConfig cfg = load_config_file(config_path);
    const ExperimentResult result = ablate(cfg, serial ? RunMode::Serial : RunMode::Parallel);
    persist_experiment(result, out_dir, cfg.experiment.rounds);
    std::ofstream out(out_dir + "/ablation.csv");
    write_ablation_csv(out, result.rows);
    print_rows(result.rows);
    std::cout << "ablation table in " << out_dir << "/ablation.csv\n";
    return 0;
}

int cmd_speed_curve(const std::vector<double>& payloads, double wind, double v_min, double v_max,
                    double v_step, double climb_deg, const std::string& out_path) {
    EnergyParams params;
    params.drag = ParabolicDrag{};
    params.avionics_power = 30;  // puts the optimum inside the usual grid
    const auto rows = speed_curve(params, payloads, wind, v_min, v_max, v_step, climb_deg);
    if (out_path.empty()) {
        write_speed_curve_csv(std::cout, rows);
    } else {
        std::ofstream out(out_path);
        if (!out) throw ConfigError("cannot write '" + out_path + "'");
        write_speed_curve_csv(out, rows);
        std::cout << "speed curve in " << out_path << '\n';
    }
    return 0;
}

int cmd_report(const std::string& in_dir) {
    int rounds = 0;
    std::ifstream meta(in_dir + "/meta.txt");
    std::string key, eq;
    if (meta >> key >> eq >> rounds; key != "rounds" || rounds < 1)
        throw ConfigError("missing or malformed meta.txt in '" + in_dir + "'");

    std::vector<AggregateRow> rows;
    for (const auto& entry : fs::directory_iterator(in_dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("records_", 0) != 0 || entry.path().extension() != ".csv") continue;
        // Variant is everything after the 4th underscore-separated field.
        std::string variant;
        int underscores = 0;
        for (std::size_t i = 8; i < name.size(); ++i)
            if (name[i] == '_' && ++underscores == 3) {
                variant = name.substr(i + 1, name.size() - i - 5);
                const auto cut = variant.find('_');
                variant = cut == std::string::npos ? "" : variant.substr(cut + 1);
                break;
            }
        const auto re = reaggregate_records(entry.path().string(), rounds, variant);
        rows.insert(rows.end(), re.begin(), re.end());
    }
    std::sort(rows.begin(), rows.end(), [](const AggregateRow& a, const AggregateRow& b) {
        return a.key.label() < b.key.label();
    });
    const std::string out_path = in_dir + "/aggregate_report.csv";
    std::ofstream out(out_path);
    write_aggregate_csv(out, rows);
    print_rows(rows);
    std::cout << "re-aggregated " << rows.size() << " cells into " << out_path << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy-aware UAV delivery routing simulator"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("generate-graph", "Sample a strongly connected ER waypoint graph");
    int n = 60;
    double p = 0.08;
    std::uint64_t seed = 1;
    double area_x = 40000, area_y = 40000, z_band = 0;
    std::string out_path = "graph.txt";
    gen->add_option("--n", n, "vertex count");
    gen->add_option("--p", p, "edge probability");
    gen->add_option("--seed", seed, "generator seed");
    gen->add_option("--area-x", area_x, "box width, m");
    gen->add_option("--area-y", area_y, "box height, m");
    gen->add_option("--z-band", z_band, "altitude band, m");
    gen->add_option("--out", out_path, "output file");

    auto* run = app.add_subcommand("run", "Run the configured experiment grid (or fleet scenario)");
    std::string run_config, run_out = "results";
    bool run_serial = false;
    run->add_option("--config", run_config, "config file")->required();
    run->add_option("--out", run_out, "output directory");
    run->add_flag("--serial", run_serial, "single-threaded trial execution");

    auto* sweep = app.add_subcommand("sweep", "Risk-sensitivity sweep over a lambda grid");
    std::string sweep_config, sweep_out = "sweep_results";
    std::vector<double> sweep_lambdas{1.0, 1.5, 2.0, 2.5};
    bool sweep_serial = false;
    sweep->add_option("--config", sweep_config, "config file")->required();
    sweep->add_option("--lambda", sweep_lambdas, "lambda grid")->delimiter(',');
    sweep->add_option("--out", sweep_out, "output directory");
    sweep->add_flag("--serial", sweep_serial, "single-threaded trial execution");

    auto* abl = app.add_subcommand("ablate", "BER ablation table over paired seeds");
    std::string abl_config, abl_out = "ablation_results";
    bool abl_serial = false;
    abl->add_option("--config", abl_config, "config file")->required();
    abl->add_option("--out", abl_out, "output directory");
    abl->add_flag("--serial", abl_serial, "single-threaded trial execution");

    auto* curve = app.add_subcommand("speed-curve", "Energy per distance vs airspeed table");
    std::vector<double> payloads{0, 8};
    double wind = 5, v_min = 6, v_max = 25, v_step = 1, climb = 3;
    std::string curve_out;
    curve->add_option("--payloads", payloads, "payload cases, kg")->delimiter(',');
    curve->add_option("--wind", wind, "head/tailwind speed, m/s");
    curve->add_option("--vmin", v_min, "grid start, m/s");
    curve->add_option("--vmax", v_max, "grid end, m/s");
    curve->add_option("--step", v_step, "grid step, m/s");
    curve->add_option("--climb", climb, "climb angle, deg");
    curve->add_option("--out", curve_out, "output file (stdout if omitted)");

    auto* report = app.add_subcommand("report", "Re-aggregate persisted raw records");
    std::string report_in;
    report->add_option("--in", report_in, "results directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_generate_graph(n, p, seed, area_x, area_y, z_band, out_path);
        if (run->parsed()) return cmd_run(run_config, run_out, run_serial);
        if (sweep->parsed()) return cmd_sweep(sweep_config, sweep_lambdas, sweep_out, sweep_serial);
        if (abl->parsed()) return cmd_ablate(abl_config, abl_out, abl_serial);
        if (curve->parsed())
            return cmd_speed_curve(payloads, wind, v_min, v_max, v_step, climb, curve_out);
        if (report->parsed()) return cmd_report(report_in);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    }
    return 0;
}
