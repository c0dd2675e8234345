#pragma once

#include <string>

#include "bersim/fleet.hpp"
#include "bersim/planner.hpp"

namespace bersim {

/// Apply one edge traversal to the mission state. The realized wind is the
/// tail vertex's process evaluated along the crossing: it starts at the
/// value just observed and re-samples at every process window boundary, so
/// conditions can shift mid-edge. `t_offset` maps mission time onto process
/// time. Returns false when the wind turns the edge unflyable part-way: the
/// energy spent up to that point is debited, the vehicle stays at the tail
/// vertex, and the mission is stuck.
bool traverse_edge(MissionState& state, const Edge& e, WindCursor& wind, double t_offset,
                   const KinematicLimits& limits, const EnergyParams& params,
                   double* debit_out = nullptr);

/// Truck plus multi-drone setting. Drone missions reuse the base scenario's
/// graph/wind/energy/planner configuration; budget, start vertex, and wind
/// phase are overridden per launch.
struct FleetScenario {
    Scenario base;
    std::vector<Customer> customers;
    int n_drones = 2;
    DroneSpec drone;
    double truck_speed = 10;  // m/s
    double d_safe = 50;       // m, conflict distance
};

struct FleetEvent {
    double t = 0;
    std::string event;    // arrive / serve / launch / return / depart / unserved
    std::string vehicle;  // "truck" or "drone<i>"
    std::string detail;
};

struct FleetRecord {
    std::vector<MissionRecord> missions;
    std::vector<Assignment> assignments;
    std::vector<FleetEvent> timeline;
    int conflicts = 0;
    std::vector<int> unserved_customers;
};

/// Event-driven truck/drone execution: the truck walks its tour, drones
/// launch at stops and return to their launch vertex (the truck waits).
/// Assignment happens on every truck arrival and every drone return.
FleetRecord run_fleet(const FleetScenario& scenario, std::uint64_t seed);

}  // namespace bersim
