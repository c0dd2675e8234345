#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bersim/executor.hpp"
#include "bersim/planner.hpp"

namespace bersim {

struct GraphSpec {
    enum class Kind { Er, File };
    Kind kind = Kind::Er;
    int n = 60;
    double p = 0.08;
    Vec3 area{34000, 34000, 0};
    std::uint64_t seed = 1;
    bool per_trial = true;  // fresh graph per trial seed; off pins `seed`
    std::string file;
    TimeGraph loaded;  // populated when kind == File
};

struct WindSpec {
    enum class Kind { Markov, Log };
    enum class Transition { Persistent, Uniform, Identity, Explicit };

    Kind kind = Kind::Markov;
    int k = 4;
    std::vector<double> ladder{0, 3, 6, 9};
    int regions = 3;    // wind regions per axis (grid); 1 = one global process
    double dwell = 1800;
    std::vector<double> magnitudes;  // empty: derived from the ladder
    Transition transition = Transition::Persistent;
    double persistence = 0.8;
    std::vector<std::vector<double>> rows;  // explicit transition matrix
    int initial_class = -1;                 // -1: drawn per trial
    std::string log_file;
    LogReplay log;

    MarkovWind build_markov(int k_classes, int initial) const;
    WindProcess build(int k_classes, int initial) const;
    std::vector<double> default_magnitudes(int k_classes) const;
};

struct MissionSpec {
    double b0 = 100;
    int target = -1;        // -1: sampled per trial; >= 0 pins a vertex
    double ring_min = 0.35;  // sampling band for random targets, as a
    double ring_max = 0.65;  // fraction of the largest depot distance
};

struct ExperimentSpec {
    int trials = 200;
    int rounds = 10;
    std::uint64_t seed = 12345;
    std::vector<PlannerKind> planners{PlannerKind::Ser, PlannerKind::Rer, PlannerKind::Ger,
                                      PlannerKind::Ber};
    std::vector<double> b_grid;
    std::vector<int> k_grid;
    std::vector<double> lambda_grid;
    std::string out_dir = "results";
};

struct FleetSpec {
    bool enabled = false;
    int drones = 2;
    DroneSpec drone;
    double truck_speed = 10;
    double d_safe = 50;
    std::vector<Customer> customers;
};

struct SimConfig {
    GraphSpec graph;
    WindSpec wind;
    EnergyParams energy;
    KinematicLimits limits;
    PlannerConfig planner;
    MissionSpec mission;
    std::vector<Obstacle> obstacles;
    ExperimentSpec experiment;
    FleetSpec fleet;
};

/// Parse the nested key-value config format. Unknown sections or keys are
/// rejected with the offending line in the message.
SimConfig load_config(std::istream& in);
SimConfig load_config_file(const std::string& path);

}  // namespace bersim
