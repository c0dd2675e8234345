#include "bersim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bersim/error.hpp"

namespace bersim {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size() || std::isnan(d)) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for '" + key + "': '" + v + "'");
    }
}

int parse_int(const std::string& key, const std::string& v) {
    const double d = parse_double(key, v);
    if (d != std::floor(d)) throw ConfigError("expected integer for '" + key + "': '" + v + "'");
    return static_cast<int>(d);
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const std::uint64_t x = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("bad seed value for '" + key + "': '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw ConfigError("expected on/off for '" + key + "': '" + v + "'");
}

std::vector<std::string> split(const std::string& v, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& item : split(v, ',')) out.push_back(parse_double(key, item));
    if (out.empty()) throw ConfigError("empty list for '" + key + "'");
    return out;
}

}  // namespace

std::vector<double> WindSpec::default_magnitudes(int k_classes) const {
    // Strong steady flow whose direction drifts: every class at the top
    // ladder rung. Configs override for mixed-strength regimes.
    return std::vector<double>(k_classes, ladder.back());
}

MarkovWind WindSpec::build_markov(int k_classes, int initial) const {
    MarkovWind mk;
    mk.k = k_classes;
    mk.dwell = dwell;
    mk.initial_class = initial;
    mk.magnitudes = magnitudes.empty() ? default_magnitudes(k_classes) : magnitudes;
    if (mk.magnitudes.size() != static_cast<std::size_t>(k_classes))
        throw ConfigError("wind magnitudes must list exactly k values");

    mk.transition.assign(static_cast<std::size_t>(k_classes) * k_classes, 0.0);
    auto cell = [&](int r, int c) -> double& { return mk.transition[r * k_classes + c]; };
    switch (transition) {
        case Transition::Identity:
            for (int i = 0; i < k_classes; ++i) cell(i, i) = 1.0;
            break;
        case Transition::Uniform:
            for (int i = 0; i < k_classes; ++i)
                for (int j = 0; j < k_classes; ++j) cell(i, j) = 1.0 / k_classes;
            break;
        case Transition::Persistent: {
            // Wind drifts one sector at a time: stay with probability
            // `persistence`, otherwise move to an angular neighbor.
            for (int i = 0; i < k_classes; ++i) {
                cell(i, i) = persistence;
                cell(i, (i + 1) % k_classes) += (1.0 - persistence) / 2;
                cell(i, (i + k_classes - 1) % k_classes) += (1.0 - persistence) / 2;
            }
            break;
        }
        case Transition::Explicit: {
            if (rows.size() != static_cast<std::size_t>(k_classes))
                throw ConfigError("explicit transition needs one row per class (k mismatch?)");
            for (int i = 0; i < k_classes; ++i) {
                if (rows[i].size() != static_cast<std::size_t>(k_classes))
                    throw ConfigError("transition row " + std::to_string(i) + " has wrong length");
                for (int j = 0; j < k_classes; ++j) cell(i, j) = rows[i][j];
            }
            break;
        }
    }
    return mk;
}

WindProcess WindSpec::build(int k_classes, int initial) const {
    WindProcess p;
    if (kind == Kind::Log) {
        p.model = log;
    } else {
        p.model = build_markov(k_classes, initial);
    }
    p.validate();
    return p;
}

namespace {

void apply_graph(GraphSpec& g, const std::string& key, const std::string& v) {
    if (key == "type") {
        if (v == "er") g.kind = GraphSpec::Kind::Er;
        else if (v == "file") g.kind = GraphSpec::Kind::File;
        else throw ConfigError("graph type must be er or file");
    } else if (key == "n") g.n = parse_int(key, v);
    else if (key == "p") g.p = parse_double(key, v);
    else if (key == "area_x") g.area.x = parse_double(key, v);
    else if (key == "area_y") g.area.y = parse_double(key, v);
    else if (key == "z_band") g.area.z = parse_double(key, v);
    else if (key == "seed") g.seed = parse_u64(key, v);
    else if (key == "per_trial") g.per_trial = parse_bool(key, v);
    else if (key == "file") g.file = v;
    else throw ConfigError("unknown key 'graph." + key + "'");
}

void apply_wind(WindSpec& w, const std::string& key, const std::string& v) {
    if (key == "type") {
        if (v == "markov") w.kind = WindSpec::Kind::Markov;
        else if (v == "log") w.kind = WindSpec::Kind::Log;
        else throw ConfigError("wind type must be markov or log");
    } else if (key == "k") {
        w.k = parse_int(key, v);
        if (w.k != 4 && w.k != 8) throw ConfigError("wind k must be 4 or 8");
    } else if (key == "ladder") {
        w.ladder = parse_double_list(key, v);
        for (std::size_t i = 0; i + 1 < w.ladder.size(); ++i)
            if (!(w.ladder[i] < w.ladder[i + 1]))
                throw ConfigError("wind ladder must be strictly increasing");
    } else if (key == "regions") {
        w.regions = parse_int(key, v);
        if (w.regions < 1 || w.regions > 8) throw ConfigError("wind regions must be in [1, 8]");
    } else if (key == "dwell") w.dwell = parse_double(key, v);
    else if (key == "magnitudes") w.magnitudes = parse_double_list(key, v);
    else if (key == "transition") {
        if (v == "persistent") w.transition = WindSpec::Transition::Persistent;
        else if (v == "uniform") w.transition = WindSpec::Transition::Uniform;
        else if (v == "identity") w.transition = WindSpec::Transition::Identity;
        else throw ConfigError("wind transition must be persistent, uniform, or identity");
    } else if (key.rfind("row", 0) == 0) {
        const int idx = parse_int(key, key.substr(3));
        if (idx != static_cast<int>(w.rows.size()))
            throw ConfigError("transition rows must appear in order starting at row0");
        w.rows.push_back(parse_double_list(key, v));
        w.transition = WindSpec::Transition::Explicit;
    } else if (key == "persistence") {
        w.persistence = parse_double(key, v);
        if (w.persistence < 0 || w.persistence >= 1)
            throw ConfigError("wind persistence must be in [0, 1)");
    } else if (key == "initial_class") {
        if (v == "random") w.initial_class = -1;
        else w.initial_class = parse_int(key, v);
    } else if (key == "file") w.log_file = v;
    else throw ConfigError("unknown key 'wind." + key + "'");
}

void apply_energy(EnergyParams& e, const std::string& key, const std::string& v) {
    auto parabolic = [&]() -> ParabolicDrag& {
        if (!std::holds_alternative<ParabolicDrag>(e.drag)) e.drag = ParabolicDrag{};
        return std::get<ParabolicDrag>(e.drag);
    };
    if (key == "mass") e.mass_base = parse_double(key, v);
    else if (key == "payload") e.payload = parse_double(key, v);
    else if (key == "gravity") e.gravity = parse_double(key, v);
    else if (key == "drag") {
        if (v == "constant") e.drag = ConstantDrag{};
        else if (v == "parabolic") e.drag = ParabolicDrag{};
        else throw ConfigError("drag must be constant or parabolic");
    } else if (key == "drag_n") e.drag = ConstantDrag{parse_double(key, v)};
    else if (key == "rho") parabolic().rho = parse_double(key, v);
    else if (key == "c_d") parabolic().c_d = parse_double(key, v);
    else if (key == "area") parabolic().area = parse_double(key, v);
    else if (key == "p_c") e.avionics_power = parse_double(key, v);
    else if (key == "c_t") e.thrust_power_coeff = parse_double(key, v);
    else if (key == "battery") e.battery_capacity = parse_double(key, v);
    else throw ConfigError("unknown key 'energy." + key + "'");
}

void apply_limits(KinematicLimits& l, const std::string& key, const std::string& v) {
    constexpr double kDeg = 3.14159265358979323846 / 180.0;
    if (key == "airspeed") l.airspeed = parse_double(key, v);
    else if (key == "gamma_min_deg") l.gamma_min = parse_double(key, v) * kDeg;
    else if (key == "gamma_max_deg") l.gamma_max = parse_double(key, v) * kDeg;
    else if (key == "kappa_max") l.kappa_max = parse_double(key, v);
    else throw ConfigError("unknown key 'limits." + key + "'");
}

void apply_planner(PlannerConfig& p, const std::string& key, const std::string& v) {
    if (key == "type") p.planner = planner_from_string(v);
    else if (key == "lambda") p.lambda = parse_double(key, v);
    else if (key == "kappa_ret") {
        p.kappa_ret = parse_double(key, v);
        if (!(p.kappa_ret > 1)) throw ConfigError("kappa_ret must exceed 1");
    } else if (key == "tau") p.tau = parse_double(key, v);
    else if (key == "t_max") {
        p.t_max = parse_int(key, v);
        if (p.t_max < 1) throw ConfigError("t_max must be at least 1");
    } else if (key == "flag") {
        p.flag = parse_int(key, v);
        if (p.flag != 0 && p.flag != 1) throw ConfigError("flag must be 0 or 1");
    } else if (key == "alpha") {
        p.alpha = parse_double(key, v);
        if (p.alpha < 0 || p.alpha > 1) throw ConfigError("alpha must be in [0, 1]");
    } else if (key == "worst_wind") p.worst_wind = parse_double(key, v);
    else if (key == "unc_cap") p.uncertainty_cap = parse_double(key, v);
    else if (key == "blocked_penalty") p.blocked_penalty = parse_double(key, v);
    else if (key == "budget_gate") p.ablations.budget_gate = parse_bool(key, v);
    else if (key == "wind_costs") p.ablations.wind_costs = parse_bool(key, v);
    else if (key == "risk_term") p.ablations.risk_term = parse_bool(key, v);
    else if (key == "traj_opt") p.ablations.traj_opt = parse_bool(key, v);
    else if (key == "clustering") p.ablations.clustering = parse_bool(key, v);
    else throw ConfigError("unknown key 'planner." + key + "'");
}

void apply_mission(MissionSpec& m, const std::string& key, const std::string& v) {
    if (key == "b0") {
        m.b0 = parse_double(key, v);
        if (!(m.b0 > 0)) throw ConfigError("b0 must be positive");
    } else if (key == "target") {
        if (v == "random") m.target = -1;
        else m.target = parse_int(key, v);
    } else if (key == "ring_min") {
        m.ring_min = parse_double(key, v);
    } else if (key == "ring_max") {
        m.ring_max = parse_double(key, v);
    } else {
        throw ConfigError("unknown key 'mission." + key + "'");
    }
}

void apply_experiment(ExperimentSpec& e, const std::string& key, const std::string& v) {
    if (key == "trials") e.trials = parse_int(key, v);
    else if (key == "rounds") e.rounds = parse_int(key, v);
    else if (key == "seed") e.seed = parse_u64(key, v);
    else if (key == "planners") {
        e.planners.clear();
        for (const auto& name : split(v, ',')) e.planners.push_back(planner_from_string(name));
    } else if (key == "b_grid") e.b_grid = parse_double_list(key, v);
    else if (key == "k_grid") {
        e.k_grid.clear();
        for (double d : parse_double_list(key, v)) {
            const int k = static_cast<int>(d);
            if (k != 4 && k != 8) throw ConfigError("k_grid entries must be 4 or 8");
            e.k_grid.push_back(k);
        }
    } else if (key == "lambda_grid") e.lambda_grid = parse_double_list(key, v);
    else if (key == "out") e.out_dir = v;
    else throw ConfigError("unknown key 'experiment." + key + "'");
}

void apply_obstacle(std::vector<Obstacle>& obs, const std::string& key, const std::string& v) {
    if (key != "circle") throw ConfigError("unknown key 'obstacles." + key + "'");
    const auto vals = parse_double_list(key, v);
    if (vals.size() != 3) throw ConfigError("obstacle circle needs x,y,r");
    if (!(vals[2] > 0)) throw ConfigError("obstacle radius must be positive");
    obs.push_back({vals[0], vals[1], vals[2]});
}

void apply_fleet(FleetSpec& f, const std::string& key, const std::string& v) {
    f.enabled = true;
    if (key == "drones") f.drones = parse_int(key, v);
    else if (key == "capacity") f.drone.capacity = parse_double(key, v);
    else if (key == "speed") f.drone.speed = parse_double(key, v);
    else if (key == "battery") f.drone.battery = parse_double(key, v);
    else if (key == "truck_speed") f.truck_speed = parse_double(key, v);
    else if (key == "d_safe") f.d_safe = parse_double(key, v);
    else if (key == "customer") {
        const auto fields = split(v, ',');
        if (fields.size() != 6) throw ConfigError("customer needs id,x,y,z,payload_kg,service");
        Customer c;
        c.id = parse_int(key, fields[0]);
        c.position = {parse_double(key, fields[1]), parse_double(key, fields[2]),
                      parse_double(key, fields[3])};
        c.payload = parse_double(key, fields[4]);
        if (c.payload < 0) throw ConfigError("customer payload must be non-negative");
        if (fields[5] == "truck") c.service = ServiceKind::TruckOnly;
        else if (fields[5] == "drone") c.service = ServiceKind::DroneCapable;
        else throw ConfigError("customer service must be truck or drone");
        f.customers.push_back(c);
    } else {
        throw ConfigError("unknown key 'fleet." + key + "'");
    }
}

}  // namespace

SimConfig load_config(std::istream& in) {
    SimConfig cfg;
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        try {
            if (line.front() == '[') {
                if (line.back() != ']') throw ConfigError("malformed section header");
                section = trim(line.substr(1, line.size() - 2));
                const bool known = section == "graph" || section == "wind" || section == "energy" ||
                                   section == "limits" || section == "planner" ||
                                   section == "mission" || section == "experiment" ||
                                   section == "obstacles" || section == "fleet";
                if (!known) throw ConfigError("unknown section '[" + section + "]'");
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw ConfigError("expected 'key = value'");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (section.empty()) throw ConfigError("key outside any section");
            if (section == "graph") apply_graph(cfg.graph, key, value);
            else if (section == "wind") apply_wind(cfg.wind, key, value);
            else if (section == "energy") apply_energy(cfg.energy, key, value);
            else if (section == "limits") apply_limits(cfg.limits, key, value);
            else if (section == "planner") apply_planner(cfg.planner, key, value);
            else if (section == "mission") apply_mission(cfg.mission, key, value);
            else if (section == "experiment") apply_experiment(cfg.experiment, key, value);
            else if (section == "obstacles") apply_obstacle(cfg.obstacles, key, value);
            else if (section == "fleet") apply_fleet(cfg.fleet, key, value);
        } catch (const ConfigError& err) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + err.what());
        }
    }

    if (cfg.experiment.b_grid.empty()) cfg.experiment.b_grid = {cfg.mission.b0};
    if (cfg.experiment.k_grid.empty()) cfg.experiment.k_grid = {cfg.wind.k};
    if (cfg.experiment.lambda_grid.empty()) cfg.experiment.lambda_grid = {cfg.planner.lambda};
    if (cfg.experiment.trials < 1) throw ConfigError("experiment.trials must be >= 1");
    if (cfg.experiment.rounds < 1 || cfg.experiment.trials % cfg.experiment.rounds != 0)
        throw ConfigError("experiment.trials must be a positive multiple of experiment.rounds");

    if (cfg.graph.kind == GraphSpec::Kind::File) {
        if (cfg.graph.file.empty()) throw ConfigError("graph.type=file requires graph.file");
        std::ifstream gin(cfg.graph.file);
        if (!gin) throw ConfigError("cannot open graph file '" + cfg.graph.file + "'");
        cfg.graph.loaded = load_graph(gin);
        cfg.graph.per_trial = false;
    }
    if (cfg.wind.kind == WindSpec::Kind::Log) {
        if (cfg.wind.log_file.empty()) throw ConfigError("wind.type=log requires wind.file");
        std::ifstream win(cfg.wind.log_file);
        if (!win) throw ConfigError("cannot open wind log '" + cfg.wind.log_file + "'");
        cfg.wind.log = load_wind_log(win);
    }
    if (cfg.wind.transition == WindSpec::Transition::Explicit && cfg.experiment.k_grid.size() > 1)
        throw ConfigError("explicit transition rows cannot be combined with a k grid");
    // Surface malformed wind setups at load time rather than per trial.
    cfg.wind.build(cfg.wind.k, std::max(cfg.wind.initial_class, 0)).validate();
    return cfg;
}

SimConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return load_config(in);
}

}  // namespace bersim
