#include "bersim/harness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bersim/error.hpp"
#include "bersim/rng.hpp"

namespace bersim {

namespace {

std::string fmt(double v, const char* spec = "%.17g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string fmt6(double v) { return fmt(v, "%.6f"); }

Outcome outcome_from(const std::string& s) {
    if (s == "SUC") return Outcome::Suc;
    if (s == "DEL") return Outcome::Del;
    if (s == "FAIL") return Outcome::Fail;
    if (s == "ABRT") return Outcome::Abrt;
    throw ConfigError("unknown outcome '" + s + "'");
}

}  // namespace

std::string CellKey::label() const {
    std::ostringstream os;
    os << to_string(planner) << "_b" << fmt(b0, "%g") << "_k" << k << "_l" << fmt(lambda, "%g");
    if (!variant.empty()) os << '_' << variant;
    return os.str();
}

std::uint64_t trial_seed(std::uint64_t base, double b0, int k, double lambda, int trial) {
    std::uint64_t s = Rng::mix(base, std::bit_cast<std::uint64_t>(b0));
    s = Rng::mix(s, static_cast<std::uint64_t>(k));
    s = Rng::mix(s, std::bit_cast<std::uint64_t>(lambda));
    return Rng::mix(s, static_cast<std::uint64_t>(trial));
}

Scenario build_trial_scenario(const SimConfig& cfg, const CellKey& cell, std::uint64_t seed) {
    Scenario sc;
    if (cfg.graph.kind == GraphSpec::Kind::File) {
        sc.graph = cfg.graph.loaded;
    } else {
        const std::uint64_t gseed = cfg.graph.per_trial ? Rng::mix(seed, 101) : cfg.graph.seed;
        sc.graph = generate_er(cfg.graph.n, cfg.graph.p, cfg.graph.area, gseed);
    }

    sc.discretization.k = cell.k;
    sc.discretization.ladder = cfg.wind.ladder;

    // Spatial wind binding: a grid of independent region processes (logs
    // stay global — there is only one log).
    const int grid = cfg.wind.kind == WindSpec::Kind::Log ? 1 : cfg.wind.regions;
    if (grid > 1) {
        Vec3 lo = sc.graph.vertices.front().position, hi = lo;
        for (const Vertex& v : sc.graph.vertices) {
            lo.x = std::min(lo.x, v.position.x);
            lo.y = std::min(lo.y, v.position.y);
            hi.x = std::max(hi.x, v.position.x);
            hi.y = std::max(hi.y, v.position.y);
        }
        for (const Vertex& v : sc.graph.vertices) {
            const int rx = std::min(grid - 1, static_cast<int>((v.position.x - lo.x) /
                                                               std::max(hi.x - lo.x, 1.0) * grid));
            const int ry = std::min(grid - 1, static_cast<int>((v.position.y - lo.y) /
                                                               std::max(hi.y - lo.y, 1.0) * grid));
            sc.graph.region[v.id] = ry * grid + rx;
        }
    }
    for (int r = 0; r < grid * grid; ++r) {
        int initial = cfg.wind.initial_class;
        if (initial < 0) initial = static_cast<int>(Rng(Rng::mix(seed, 103 + r)).below(cell.k));
        sc.processes.push_back(cfg.wind.build(cell.k, initial));
    }

    sc.limits = cfg.limits;
    sc.energy = cfg.energy;
    sc.planner = cfg.planner;
    sc.planner.planner = cell.planner;
    sc.planner.lambda = cell.lambda;
    sc.initial_budget = cell.b0;
    sc.obstacles = cfg.obstacles;

    if (cfg.mission.target >= 0) {
        sc.target = cfg.mission.target;
        if (sc.target >= static_cast<int>(sc.graph.vertices.size()))
            throw ConfigError("mission.target is not a vertex of the graph");
    } else {
        // Sample the delivery target within the configured distance band
        // (fractions of the farthest vertex from the depot).
        const Vec3 depot_pos = sc.graph.vertices[sc.graph.depot].position;
        double far = 0;
        for (const Vertex& v : sc.graph.vertices)
            far = std::max(far, distance(v.position, depot_pos));
        std::vector<int> pool;
        for (const Vertex& v : sc.graph.vertices) {
            if (v.id == sc.graph.depot) continue;
            const double d = distance(v.position, depot_pos);
            if (d >= cfg.mission.ring_min * far && d <= cfg.mission.ring_max * far)
                pool.push_back(v.id);
        }
        if (pool.empty())
            for (const Vertex& v : sc.graph.vertices)
                if (v.id != sc.graph.depot) pool.push_back(v.id);
        sc.target = pool[Rng(Rng::mix(seed, 102)).below(pool.size())];
    }
    return sc;
}

namespace {

Ablations variant_ablations(const std::string& variant) {
    Ablations a;
    if (variant == "gate_off") a.budget_gate = false;
    else if (variant == "wind_off") a.wind_costs = false;
    else if (variant == "risk_off") a.risk_term = false;
    else if (variant == "opt_off") a.traj_opt = false;
    else if (variant == "clustering_off") a.clustering = false;
    else if (!variant.empty() && variant != "full")
        throw ConfigError("unknown ablation variant '" + variant + "'");
    return a;
}

MissionRecord run_trial(const SimConfig& cfg, const CellKey& cell, int trial) {
    const std::uint64_t seed = trial_seed(cfg.experiment.seed, cell.b0, cell.k, cell.lambda, trial);
    Scenario sc = build_trial_scenario(cfg, cell, seed);
    sc.planner.ablations = variant_ablations(cell.variant);
    return run_mission(sc, seed);
}

}  // namespace

std::vector<MissionRecord> run_cell(const SimConfig& cfg, const CellKey& cell, RunMode mode) {
    const int n = cfg.experiment.trials;
    std::vector<MissionRecord> records(n);
    if (mode == RunMode::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n; ++i) records[i] = run_trial(cfg, cell, i);
    } else {
        for (int i = 0; i < n; ++i) records[i] = run_trial(cfg, cell, i);
    }
    return records;
}

namespace {

MeanStd mean_std(const std::vector<double>& xs) {
    MeanStd out;
    if (xs.empty()) return out;
    double sum = 0;
    for (double x : xs) sum += x;
    out.mean = sum / xs.size();
    if (xs.size() > 1) {
        double sq = 0;
        for (double x : xs) sq += (x - out.mean) * (x - out.mean);
        out.std = std::sqrt(sq / (xs.size() - 1));
    }
    return out;
}

}  // namespace

AggregateRow aggregate(const CellKey& key, const std::vector<MissionRecord>& records, int rounds) {
    if (records.empty() || rounds < 1 || records.size() % rounds != 0)
        throw ConfigError("aggregate: trials must divide into equal rounds");
    const std::size_t per_round = records.size() / rounds;

    std::vector<double> suc, del, fail, abrt, energy, margin, time, turn;
    for (int r = 0; r < rounds; ++r) {
        int counts[4] = {0, 0, 0, 0};
        double e = 0, m = 0, t = 0, mt = 0;
        for (std::size_t i = r * per_round; i < (r + 1) * per_round; ++i) {
            const MissionRecord& rec = records[i];
            ++counts[static_cast<int>(rec.outcome)];
            e += rec.energy_wh;
            m += rec.margin_wh;
            t += rec.time_s;
            mt += rec.max_turn_deg;
        }
        const double denom = static_cast<double>(per_round);
        suc.push_back(100.0 * counts[static_cast<int>(Outcome::Suc)] / denom);
        del.push_back(100.0 * counts[static_cast<int>(Outcome::Del)] / denom);
        fail.push_back(100.0 * counts[static_cast<int>(Outcome::Fail)] / denom);
        abrt.push_back(100.0 * counts[static_cast<int>(Outcome::Abrt)] / denom);
        energy.push_back(e / denom);
        margin.push_back(m / denom);
        time.push_back(t / denom);
        turn.push_back(mt / denom);
    }

    AggregateRow row;
    row.key = key;
    row.trials = static_cast<int>(records.size());
    row.suc = mean_std(suc);
    row.del = mean_std(del);
    row.fail = mean_std(fail);
    row.abrt = mean_std(abrt);
    row.energy = mean_std(energy);
    row.margin = mean_std(margin);
    row.time = mean_std(time);
    row.max_turn = mean_std(turn);
    return row;
}

ExperimentResult run_experiment(const SimConfig& cfg, RunMode mode) {
    ExperimentResult result;
    for (PlannerKind planner : cfg.experiment.planners)
        for (double b0 : cfg.experiment.b_grid)
            for (int k : cfg.experiment.k_grid)
                for (double lambda : cfg.experiment.lambda_grid) {
                    CellKey cell{planner, b0, k, lambda, ""};
                    auto records = run_cell(cfg, cell, mode);
                    result.rows.push_back(aggregate(cell, records, cfg.experiment.rounds));
                    result.raw.emplace_back(cell, std::move(records));
                }
    return result;
}

ExperimentResult lambda_sweep(const SimConfig& cfg, const std::vector<double>& lambdas,
                              RunMode mode) {
    SimConfig sweep_cfg = cfg;
    sweep_cfg.experiment.lambda_grid = lambdas;
    if (!std::is_sorted(lambdas.begin(), lambdas.end()))
        throw ConfigError("lambda grid must be sorted");
    sweep_cfg.experiment.b_grid = {cfg.mission.b0};
    sweep_cfg.experiment.k_grid = {cfg.wind.k};
    return run_experiment(sweep_cfg, mode);
}

ExperimentResult ablate(const SimConfig& cfg, RunMode mode) {
    if (std::find(cfg.experiment.planners.begin(), cfg.experiment.planners.end(), PlannerKind::Ber) ==
        cfg.experiment.planners.end())
        throw ConfigError("ablate requires the BER planner");
    static const char* kVariants[] = {"full",     "gate_off", "wind_off",
                                      "risk_off", "opt_off",  "clustering_off"};
    ExperimentResult result;
    for (const char* variant : kVariants) {
        CellKey cell{PlannerKind::Ber, cfg.mission.b0, cfg.wind.k, cfg.planner.lambda, variant};
        auto records = run_cell(cfg, cell, mode);
        result.rows.push_back(aggregate(cell, records, cfg.experiment.rounds));
        result.raw.emplace_back(cell, std::move(records));
    }
    return result;
}

std::vector<SpeedCurveRow> speed_curve(const EnergyParams& parabolic_params,
                                       const std::vector<double>& payloads, double wind_speed,
                                       double v_min, double v_max, double v_step,
                                       double climb_angle_deg) {
    if (!std::holds_alternative<ParabolicDrag>(parabolic_params.drag))
        throw ConfigError("speed curve requires parabolic drag");
    std::vector<SpeedCurveCase> cases;
    for (double payload : payloads) {
        const std::string suffix = "_p" + fmt(payload, "%g");
        cases.push_back({"head" + suffix, {wind_speed, 3.14159265358979323846, 0}, payload});
        cases.push_back({"calm" + suffix, WindVector::calm(), payload});
        cases.push_back({"tail" + suffix, {wind_speed, 0, 0}, payload});
    }
    std::vector<double> grid;
    for (double v = v_min; v <= v_max + 1e-9; v += v_step) grid.push_back(v);
    return energy_per_distance_curve(parabolic_params, cases, grid,
                                     climb_angle_deg * 3.14159265358979323846 / 180.0);
}

void write_records_csv(std::ostream& out, const std::vector<MissionRecord>& records) {
    out << "seed,planner,B0,K,lambda,outcome,energy_wh,margin_wh,time_s,steps,max_turn_deg\n";
    for (const MissionRecord& r : records) {
        out << r.seed << ',' << to_string(r.planner) << ',' << fmt(r.b0, "%g") << ','
            << r.wind_classes << ',' << fmt(r.lambda, "%g") << ',' << to_string(r.outcome) << ','
            << fmt(r.energy_wh) << ',' << fmt(r.margin_wh) << ',' << fmt(r.time_s) << ','
            << r.steps << ',' << fmt(r.max_turn_deg) << '\n';
    }
}

std::vector<MissionRecord> read_records_csv(std::istream& in) {
    std::vector<MissionRecord> records;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            if (line.rfind("seed,planner,B0", 0) != 0)
                throw ConfigError("records csv: unexpected header");
            header = false;
            continue;
        }
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 11) throw ConfigError("records csv: expected 11 fields");
        MissionRecord r;
        r.seed = std::stoull(fields[0]);
        r.planner = planner_from_string(fields[1]);
        r.b0 = std::stod(fields[2]);
        r.wind_classes = std::stoi(fields[3]);
        r.lambda = std::stod(fields[4]);
        r.outcome = outcome_from(fields[5]);
        r.energy_wh = std::stod(fields[6]);
        r.margin_wh = std::stod(fields[7]);
        r.time_s = std::stod(fields[8]);
        r.steps = std::stoi(fields[9]);
        r.max_turn_deg = std::stod(fields[10]);
        records.push_back(r);
    }
    return records;
}

namespace {

void write_row_metrics(std::ostream& out, const AggregateRow& row) {
    for (const MeanStd* m : {&row.suc, &row.del, &row.fail, &row.abrt, &row.energy, &row.margin,
                             &row.time, &row.max_turn})
        out << ',' << fmt6(m->mean) << ',' << fmt6(m->std);
    out << '\n';
}

}  // namespace

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
    out << "planner,b0,k,lambda,variant,trials,suc_mean,suc_std,del_mean,del_std,fail_mean,"
           "fail_std,abrt_mean,abrt_std,energy_mean,energy_std,margin_mean,margin_std,time_mean,"
           "time_std,max_turn_mean,max_turn_std\n";
    for (const AggregateRow& row : rows) {
        out << to_string(row.key.planner) << ',' << fmt(row.key.b0, "%g") << ',' << row.key.k << ','
            << fmt(row.key.lambda, "%g") << ',' << (row.key.variant.empty() ? "-" : row.key.variant)
            << ',' << row.trials;
        write_row_metrics(out, row);
    }
}

void write_sweep_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
    out << "lambda,planner,suc,abrt,fail\n";
    for (const AggregateRow& row : rows)
        out << fmt(row.key.lambda, "%g") << ',' << to_string(row.key.planner) << ','
            << fmt6(row.suc.mean) << ',' << fmt6(row.abrt.mean) << ',' << fmt6(row.fail.mean)
            << '\n';
}

void write_ablation_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
    out << "variant,suc_mean,suc_std,abrt_mean,abrt_std,fail_mean,fail_std,energy_mean,energy_std,"
           "margin_mean,margin_std,time_mean,time_std,max_turn_mean,max_turn_std\n";
    for (const AggregateRow& row : rows) {
        out << row.key.variant;
        for (const MeanStd* m : {&row.suc, &row.abrt, &row.fail, &row.energy, &row.margin,
                                 &row.time, &row.max_turn})
            out << ',' << fmt6(m->mean) << ',' << fmt6(m->std);
        out << '\n';
    }
}

void write_speed_curve_csv(std::ostream& out, const std::vector<SpeedCurveRow>& rows) {
    out << "v_a_mps,case,wh_per_km\n";
    for (const SpeedCurveRow& row : rows) {
        out << fmt(row.airspeed, "%g") << ',' << row.label << ','
            << (row.feasible ? fmt6(row.wh_per_km) : "infeasible") << '\n';
    }
}

std::vector<std::string> persist_experiment(const ExperimentResult& result,
                                            const std::string& out_dir, int rounds) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::vector<std::string> written;

    for (const auto& [cell, records] : result.raw) {
        std::vector<MissionRecord> sorted = records;
        std::sort(sorted.begin(), sorted.end(),
                  [](const MissionRecord& a, const MissionRecord& b) { return a.seed < b.seed; });
        const std::string path = out_dir + "/records_" + cell.label() + ".csv";
        std::ofstream out(path);
        if (!out) throw ConfigError("cannot write '" + path + "'");
        write_records_csv(out, sorted);
        written.push_back(path);
    }

    const std::string agg_path = out_dir + "/aggregate.csv";
    std::ofstream agg(agg_path);
    if (!agg) throw ConfigError("cannot write '" + agg_path + "'");
    std::vector<AggregateRow> rows = result.rows;
    std::sort(rows.begin(), rows.end(), [](const AggregateRow& a, const AggregateRow& b) {
        return a.key.label() < b.key.label();
    });
    write_aggregate_csv(agg, rows);
    written.push_back(agg_path);

    const std::string meta_path = out_dir + "/meta.txt";
    std::ofstream meta(meta_path);
    meta << "rounds = " << rounds << '\n';
    written.push_back(meta_path);
    return written;
}

std::vector<AggregateRow> reaggregate_records(const std::string& records_path, int rounds,
                                              const std::string& variant) {
    std::ifstream in(records_path);
    if (!in) throw ConfigError("cannot open '" + records_path + "'");
    const std::vector<MissionRecord> records = read_records_csv(in);
    if (records.empty()) throw ConfigError("no records in '" + records_path + "'");
    CellKey key{records.front().planner, records.front().b0, records.front().wind_classes,
                records.front().lambda, variant};
    return {aggregate(key, records, rounds)};
}

}  // namespace bersim
