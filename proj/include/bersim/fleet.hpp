#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "bersim/graph.hpp"

namespace bersim {

enum class ServiceKind { TruckOnly, DroneCapable };

struct Customer {
    int id = 0;
    Vec3 position;
    double payload = 0;  // kg
    ServiceKind service = ServiceKind::DroneCapable;
};

struct DroneSpec {
    double capacity = 8;    // kg
    double speed = 15;      // m/s, cruise airspeed
    double battery = 100;   // Wh
};

/// Ordered truck stops (customer ids); the tour starts and ends at the depot.
struct TruckPlan {
    std::vector<int> route;
    double speed = 10;  // m/s
};

struct Assignment {
    int drone = 0;
    int customer = 0;
    double timestamp = 0;
};

/// Split customers into truck-served and drone-served sets. A customer goes
/// to the truck when it is truck-only, too heavy, or its calm-wind round
/// trip from `from_vertex` costs more than the drone battery.
std::pair<std::vector<int>, std::vector<int>> partition_customers(
    std::span<const Customer> customers, const DroneSpec& spec, const TimeGraph& g,
    const KinematicLimits& limits, const EnergyParams& params, int from_vertex);

/// Calm-wind round-trip energy from a vertex to the graph vertex nearest the
/// given position, +inf if unreachable.
double round_trip_energy(const TimeGraph& g, const KinematicLimits& limits,
                         const EnergyParams& params, int from_vertex, const Vec3& position);

int nearest_vertex(const TimeGraph& g, const Vec3& position);

/// Nearest-neighbor tour from the depot followed by 2-opt descent to a local
/// optimum. Deterministic for a fixed input order; the seed is reserved for
/// randomized restarts.
TruckPlan truck_tsp(const Vec3& depot, std::span<const Customer> nodes, double speed,
                    std::uint64_t seed);

double tour_length(const Vec3& depot, std::span<const Customer> nodes,
                   std::span<const int> route);

struct AssignContext {
    const TimeGraph* graph = nullptr;
    const KinematicLimits* limits = nullptr;
    const EnergyParams* params = nullptr;
    std::span<const Customer> customers;
    DroneSpec spec;
    /// Optional service-area labels (customer index -> cluster); when
    /// present, a drone only takes customers from its own cluster unless no
    /// such customer is assignable.
    std::span<const int> cluster_of_customer = {};
    std::span<const int> cluster_of_drone = {};
};

/// Greedy event-driven matching: repeatedly give the unserved customer
/// nearest the truck to the fastest idle drone, honoring feasibility from
/// the truck's current vertex.
std::vector<Assignment> dynamic_assign(double time, const Vec3& truck_pos, int truck_vertex,
                                       std::vector<int> idle_drones, std::vector<int> unserved,
                                       const AssignContext& ctx);

/// Lloyd's algorithm with farthest-point seeding (first centroid drawn from
/// the seeded stream). Returns a label per point.
std::vector<int> kmeans_cluster(std::span<const Vec3> points, int k, std::uint64_t seed,
                                int max_iter = 100);

double kmeans_objective(std::span<const Vec3> points, std::span<const int> labels, int k);

/// Piecewise-linear timed position track.
struct TimedTrajectory {
    struct Knot {
        double t = 0;
        Vec3 p;
    };
    std::vector<Knot> knots;

    bool active_at(double t) const {
        return !knots.empty() && t >= knots.front().t && t <= knots.back().t;
    }
    Vec3 at(double t) const;
};

/// Number of unordered trajectory pairs that come within d_safe of each
/// other at some shared sample time.
int conflict_count(std::span<const TimedTrajectory> trajectories, double d_safe, double dt = 1.0);

}  // namespace bersim
