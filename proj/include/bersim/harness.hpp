#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bersim/config.hpp"

namespace bersim {

enum class RunMode { Serial, Parallel };

/// One experiment cell: a planner (or ablation variant) evaluated on the
/// environments generated for (b0, k, lambda). Environment seeds fold in the
/// cell coordinates but not the planner or variant, so planner and ablation
/// comparisons are paired per trial index.
struct CellKey {
    PlannerKind planner = PlannerKind::Ber;
    double b0 = 100;
    int k = 4;
    double lambda = 1.5;
    std::string variant;  // empty for the plain planner

    std::string label() const;
};

std::uint64_t trial_seed(std::uint64_t base, double b0, int k, double lambda, int trial);

/// Materialize the trial's scenario: graph, wind process, target, planner.
Scenario build_trial_scenario(const SimConfig& cfg, const CellKey& cell, std::uint64_t seed);

/// Run every trial of a cell; records come back ordered by trial index and
/// are bit-identical between serial and parallel modes.
std::vector<MissionRecord> run_cell(const SimConfig& cfg, const CellKey& cell, RunMode mode);

struct MeanStd {
    double mean = 0;
    double std = 0;
};

/// Aggregate statistics over rounds of equal size: outcome frequencies in
/// percent plus the four mission metrics, each mean +- sample std over the
/// per-round means.
struct AggregateRow {
    CellKey key;
    int trials = 0;
    MeanStd suc, del, fail, abrt;
    MeanStd energy, margin, time, max_turn;
};

AggregateRow aggregate(const CellKey& key, const std::vector<MissionRecord>& records, int rounds);

struct ExperimentResult {
    std::vector<AggregateRow> rows;
    std::vector<std::pair<CellKey, std::vector<MissionRecord>>> raw;
};

/// Full grid: planners x b_grid x k_grid x lambda_grid, trials per cell.
ExperimentResult run_experiment(const SimConfig& cfg, RunMode mode = RunMode::Parallel);

/// One aggregate row per (planner, lambda) over the lambda grid.
ExperimentResult lambda_sweep(const SimConfig& cfg, const std::vector<double>& lambdas,
                              RunMode mode = RunMode::Parallel);

/// BER ablation table over identical seeds: full, gate-off, wind-off,
/// risk-off, opt-off, clustering-off.
ExperimentResult ablate(const SimConfig& cfg, RunMode mode = RunMode::Parallel);

/// Fig-5-shaped energy-per-distance table: payload cases x wind cases over
/// an airspeed grid, parabolic drag, with a small climb angle so payload
/// separates the curves.
std::vector<SpeedCurveRow> speed_curve(const EnergyParams& parabolic_params,
                                       const std::vector<double>& payloads, double wind_speed,
                                       double v_min, double v_max, double v_step,
                                       double climb_angle_deg = 3.0);

// --- persistence ---------------------------------------------------------

void write_records_csv(std::ostream& out, const std::vector<MissionRecord>& records);
std::vector<MissionRecord> read_records_csv(std::istream& in);

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);
void write_sweep_csv(std::ostream& out, const std::vector<AggregateRow>& rows);
void write_ablation_csv(std::ostream& out, const std::vector<AggregateRow>& rows);
void write_speed_curve_csv(std::ostream& out, const std::vector<SpeedCurveRow>& rows);

/// Write records + aggregate files under out_dir (one records file per
/// variant). Returns the list of files written.
std::vector<std::string> persist_experiment(const ExperimentResult& result,
                                            const std::string& out_dir, int rounds);

/// Re-aggregate persisted raw records (the `report` subcommand).
std::vector<AggregateRow> reaggregate_records(const std::string& records_path, int rounds,
                                              const std::string& variant);

}  // namespace bersim
