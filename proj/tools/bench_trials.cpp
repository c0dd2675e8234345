// Compares serial and OpenMP trial execution on one experiment cell and
// checks that both modes produce identical records.
#include <chrono>
#include <cstdio>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bersim/harness.hpp"

using namespace bersim;

namespace {

SimConfig bench_config(int trials) {
    SimConfig cfg;
    cfg.experiment.trials = trials;
    cfg.experiment.rounds = 1;
    cfg.experiment.seed = 99;
    return cfg;
}

double time_cell(const SimConfig& cfg, const CellKey& cell, RunMode mode,
                 std::vector<MissionRecord>* out) {
    const auto start = std::chrono::steady_clock::now();
    auto records = run_cell(cfg, cell, mode);
    const auto stop = std::chrono::steady_clock::now();
    if (out) *out = std::move(records);
    return std::chrono::duration<double>(stop - start).count();
}

std::string serialize(const std::vector<MissionRecord>& records) {
    std::ostringstream os;
    write_records_csv(os, records);
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    const int trials = argc > 1 ? std::atoi(argv[1]) : 200;
    const SimConfig cfg = bench_config(trials);
    const CellKey cell{PlannerKind::Ber, 100, 4, 1.5, ""};

#ifdef _OPENMP
    std::printf("threads available: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; parallel mode falls back to serial\n");
#endif

    std::vector<MissionRecord> serial_records, parallel_records;
    const double warm = time_cell(cfg, cell, RunMode::Serial, nullptr);
    const double t_serial = time_cell(cfg, cell, RunMode::Serial, &serial_records);
    const double t_parallel = time_cell(cfg, cell, RunMode::Parallel, &parallel_records);

    std::printf("cell %s, %d trials\n", cell.label().c_str(), trials);
    std::printf("  warmup   %.3f s\n", warm);
    std::printf("  serial   %.3f s  (%.1f trials/s)\n", t_serial, trials / t_serial);
    std::printf("  parallel %.3f s  (%.1f trials/s)\n", t_parallel, trials / t_parallel);
    std::printf("  speedup  %.2fx\n", t_serial / t_parallel);

    if (serialize(serial_records) != serialize(parallel_records)) {
        std::printf("MISMATCH: serial and parallel records differ\n");
        return 1;
    }
    std::printf("records identical across modes\n");
    return 0;
}
