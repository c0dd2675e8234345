#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bersim/dubins.hpp"
#include "bersim/energy.hpp"
#include "bersim/graph.hpp"
#include "bersim/wind.hpp"

namespace bersim {

enum class PlannerKind { Ser, Rer, Ger, Ber };

const char* to_string(PlannerKind k);
PlannerKind planner_from_string(const std::string& s);

struct Ablations {
    bool budget_gate = true;
    bool wind_costs = true;
    bool risk_term = true;
    bool traj_opt = true;
    bool clustering = true;  // fleet-mode service-area clustering
};

struct PlannerConfig {
    PlannerKind planner = PlannerKind::Ber;
    double lambda = 1.5;      // risk sensitivity, >= 0
    double kappa_ret = 1.5;   // return safety factor, > 1
    double tau = 0.15;        // score threshold band, >= 0
    int t_max = 200;          // max decision steps
    int flag = 0;             // 0: screen infeasible/blocked edges; 1: price them
    double alpha = 1.0;       // wind estimate smoothing
    double worst_wind = 9.0;  // m/s, conservative return pricing
    double uncertainty_cap = 10.0;   // Wh charged for unflyable deviations
    double blocked_penalty = 50.0;   // Wh added to blocked edges when flag=1
    Ablations ablations;
};

enum class Outcome { Suc, Del, Fail, Abrt };

const char* to_string(Outcome o);

/// Mutable mission progress while a planner executes.
struct MissionState {
    double budget = 0;  // Wh remaining; decreases monotonically
    int vertex = 0;
    bool delivered = false;
    std::vector<int> path;  // visited vertex ids, starts at the depot
    int steps = 0;          // planner decisions taken
    double t_sim = 0;       // seconds
    bool kappa_violated_after_delivery = false;
    bool depleted = false;
};

struct Decision {
    enum class Kind { Traverse, Abort, Stuck };
    Kind kind = Kind::Stuck;
    int edge_id = -1;
};

/// Immutable per-trial result. One of the four outcomes always holds.
struct MissionRecord {
    std::uint64_t seed = 0;
    PlannerKind planner = PlannerKind::Ber;
    double b0 = 0;
    int wind_classes = 4;
    double lambda = 0;
    Outcome outcome = Outcome::Fail;
    double energy_wh = 0;
    double margin_wh = 0;
    double time_s = 0;
    int steps = 0;
    double max_turn_deg = 0;
    std::vector<int> path;
    std::string del_reason;  // "margin" or "t_max" when outcome == Del

    // Diagnostics, not serialized.
    double debit_sum_wh = 0;
    std::vector<std::pair<double, Vec3>> track;  // (t, position) knots
};

/// Everything one single-UAV mission needs; immutable during execution.
struct Scenario {
    TimeGraph graph;
    std::vector<WindProcess> processes;  // one per wind region
    WindDiscretization discretization;
    KinematicLimits limits;
    EnergyParams energy;
    PlannerConfig planner;
    double initial_budget = 100;
    int target = 0;
    int home = -1;        // start/return vertex; -1 means the graph depot
    double wind_t0 = 0;   // absolute time offset into the wind processes
    std::vector<Obstacle> obstacles;
};

/// Static route depot -> target -> depot under the initial snapshot's
/// synthetic distances. Not reachable -> empty result (mission aborts).
PathResult plan_ser(const TimeGraph& g, const CostSnapshot& c0, int depot, int target);

/// Per-edge costs frozen for one decision step. The edge being traversed
/// next realizes the wind just observed (wind holds for a whole edge and is
/// sampled at entry), so its cost carries no uncertainty term; edges deeper
/// in the plan are priced with the risk-aware surrogate.
struct StepCosts {
    std::vector<double> immediate;  // E(e, est) by edge id, +inf when unflyable
    std::vector<double> lookahead;  // immediate + lambda * Unc
    std::vector<double> unc;        // lambda-free uncertainty term
};

StepCosts evaluate_step_costs(const TimeGraph& g, const CostModel& model, const WindEstimate& est);

Decision step_rer(const MissionState& state, const TimeGraph& g, const StepCosts& costs, int goal);

Decision step_ger(const MissionState& state, const TimeGraph& g, const StepCosts& costs);

/// Budget gate: can `budget` still cover kappa_ret times the conservative
/// return from `vertex`? Always true with the gate ablated.
bool return_ok_at(double budget, int vertex, const ReturnOracle& oracle, const PlannerConfig& cfg);
bool return_ok(const MissionState& state, const ReturnOracle& oracle, const PlannerConfig& cfg);

/// `force_strict` collapses the threshold band to the exact argmin for this
/// step; the mission loop raises it when the band has made no geometric
/// progress for a while, which breaks band-induced dithering.
///
/// `calm_to_goal` is the calm-wind cost-to-goal table (static per mission
/// leg); the pre-delivery gate combines it with the conservative return
/// from the delivery point, so feasibility covers the whole
/// deliver-and-return remainder rather than just the next hop.
Decision step_ber(const MissionState& state, const TimeGraph& g, const StepCosts& costs,
                  const ReturnOracle& oracle, const PlannerConfig& cfg, int goal,
                  const std::vector<char>& edge_blocked, const CostToGo& calm_to_goal,
                  bool force_strict = false);

/// Execute one full mission. Deterministic in (scenario, seed): the seed
/// drives the wind streams and nothing else.
MissionRecord run_mission(const Scenario& scenario, std::uint64_t seed);

}  // namespace bersim
