#include "bersim/executor.hpp"

#include <algorithm>
#include <cmath>

#include "bersim/rng.hpp"

namespace bersim {

bool traverse_edge(MissionState& state, const Edge& e, WindCursor& wind, double t_offset,
                   const KinematicLimits& limits, const EnergyParams& params, double* debit_out) {
    double remaining = e.length;
    double t = t_offset + state.t_sim;
    double energy = 0;
    double elapsed = 0;
    bool ok = true;
    while (remaining > 0) {
        const WindVector w = wind.at(t);
        const EdgeTraversal seg = edge_energy(remaining, e.direction, w, limits, params);
        if (!seg.ok()) {
            ok = false;
            break;
        }
        const double boundary = wind.next_change_after(t);
        if (t + seg.time <= boundary) {  // finishes before the wind can shift
            energy += seg.energy;
            elapsed += seg.time;
            remaining = 0;
        } else {
            const double dt = boundary - t;
            const double flown = seg.ground_speed * dt;
            energy += seg.energy * (flown / remaining);
            elapsed += dt;
            remaining -= flown;
            t = boundary;
        }
    }
    state.budget -= energy;
    state.t_sim += elapsed;
    if (debit_out) *debit_out = energy;
    if (!ok) return false;  // stuck at the tail vertex, partial energy spent
    state.vertex = e.to;
    state.path.push_back(e.to);
    return true;
}

namespace {

std::string drone_name(int id) { return "drone" + std::to_string(id); }

struct BusyDrone {
    int drone;
    double return_time;
};

}  // namespace

FleetRecord run_fleet(const FleetScenario& scenario, std::uint64_t seed) {
    FleetRecord rec;
    const TimeGraph& g = scenario.base.graph;
    const Vec3 depot_pos = g.vertices[g.depot].position;

    KinematicLimits drone_limits = scenario.base.limits;
    drone_limits.airspeed = scenario.drone.speed;

    auto [truck_set, drone_set] = partition_customers(scenario.customers, scenario.drone, g,
                                                      drone_limits, scenario.base.energy, g.depot);

    std::vector<Customer> truck_customers;
    for (int idx : truck_set) truck_customers.push_back(scenario.customers[idx]);
    const TruckPlan plan = truck_tsp(depot_pos, truck_customers, scenario.truck_speed, seed);

    // Optional service-area clustering of the drone-served customers.
    std::vector<int> cluster_of_customer(scenario.customers.size(), 0);
    std::vector<int> cluster_of_drone(scenario.n_drones, 0);
    const bool clustered =
        scenario.base.planner.ablations.clustering && scenario.n_drones > 1 && drone_set.size() > 1;
    if (clustered) {
        std::vector<Vec3> pts;
        for (int idx : drone_set) pts.push_back(scenario.customers[idx].position);
        const int k = std::min<int>(scenario.n_drones, static_cast<int>(pts.size()));
        const std::vector<int> labels = kmeans_cluster(pts, k, Rng::mix(seed, 7), 100);
        for (std::size_t i = 0; i < labels.size(); ++i)
            cluster_of_customer[drone_set[i]] = labels[i];
        for (int d = 0; d < scenario.n_drones; ++d) cluster_of_drone[d] = d % std::max(k, 1);
    }

    AssignContext ctx;
    ctx.graph = &g;
    ctx.limits = &drone_limits;
    ctx.params = &scenario.base.energy;
    ctx.customers = scenario.customers;
    ctx.spec = scenario.drone;
    if (clustered) {
        ctx.cluster_of_customer = cluster_of_customer;
        ctx.cluster_of_drone = cluster_of_drone;
    }

    std::vector<int> idle;
    for (int d = 0; d < scenario.n_drones; ++d) idle.push_back(d);
    std::vector<int> unserved = drone_set;
    std::vector<TimedTrajectory> tracks;

    double now = 0;
    Vec3 truck_pos = depot_pos;
    rec.timeline.push_back({now, "arrive", "truck", "depot"});

    // Stops: depot first, then the tour, then back to the depot.
    std::size_t next_stop = 0;
    bool tour_done = plan.route.empty();

    auto id_of = [&](int cust_id) {
        for (std::size_t i = 0; i < scenario.customers.size(); ++i)
            if (scenario.customers[i].id == cust_id) return static_cast<int>(i);
        return -1;
    };

    for (;;) {
        const int truck_vertex = nearest_vertex(g, truck_pos);
        std::vector<BusyDrone> busy;

        // Keep assigning at this stop until nothing new can launch and all
        // drones launched here are back.
        for (;;) {
            const auto assignments = dynamic_assign(now, truck_pos, truck_vertex, idle, unserved, ctx);
            for (const Assignment& a : assignments) {
                const int cust_idx = id_of(a.customer);
                Scenario mission = scenario.base;
                mission.home = truck_vertex;
                mission.target = nearest_vertex(g, scenario.customers[cust_idx].position);
                mission.initial_budget = scenario.drone.battery;
                mission.limits = drone_limits;
                mission.energy.payload = scenario.customers[cust_idx].payload;
                mission.wind_t0 = scenario.base.wind_t0 + now;

                MissionRecord mr = run_mission(mission, seed);
                mr.seed = Rng::mix(seed, static_cast<std::uint64_t>(a.customer));

                TimedTrajectory traj;
                for (const auto& [t, p] : mr.track) traj.knots.push_back({now + t, p});
                tracks.push_back(std::move(traj));

                rec.timeline.push_back({now, "launch", drone_name(a.drone),
                                        "customer=" + std::to_string(a.customer)});
                busy.push_back({a.drone, now + mr.time_s});
                idle.erase(std::find(idle.begin(), idle.end(), a.drone));
                unserved.erase(std::find(unserved.begin(), unserved.end(), cust_idx));
                rec.assignments.push_back(a);
                rec.missions.push_back(std::move(mr));
            }
            if (busy.empty()) break;
            // Advance to the earliest return (ties: lowest drone id).
            auto soonest = std::min_element(busy.begin(), busy.end(),
                                            [](const BusyDrone& a, const BusyDrone& b) {
                                                return a.return_time != b.return_time
                                                           ? a.return_time < b.return_time
                                                           : a.drone < b.drone;
                                            });
            now = soonest->return_time;
            rec.timeline.push_back({now, "return", drone_name(soonest->drone), ""});
            idle.push_back(soonest->drone);
            std::sort(idle.begin(), idle.end());
            busy.erase(soonest);
        }

        if (!tour_done && next_stop < plan.route.size()) {
            const Customer& c = truck_customers[plan.route[next_stop]];
            rec.timeline.push_back({now, "depart", "truck", "customer=" + std::to_string(c.id)});
            now += distance(truck_pos, c.position) / plan.speed;
            truck_pos = c.position;
            rec.timeline.push_back({now, "arrive", "truck", "customer=" + std::to_string(c.id)});
            rec.timeline.push_back({now, "serve", "truck", "customer=" + std::to_string(c.id)});
            ++next_stop;
            if (next_stop == plan.route.size()) tour_done = true;
            continue;
        }
        if (tour_done && distance(truck_pos, depot_pos) > 0) {
            rec.timeline.push_back({now, "depart", "truck", "depot"});
            now += distance(truck_pos, depot_pos) / plan.speed;
            truck_pos = depot_pos;
            rec.timeline.push_back({now, "arrive", "truck", "depot"});
            continue;
        }
        break;
    }

    for (int idx : unserved) {
        rec.unserved_customers.push_back(scenario.customers[idx].id);
        rec.timeline.push_back(
            {now, "unserved", "truck", "customer=" + std::to_string(scenario.customers[idx].id)});
    }
    rec.conflicts = conflict_count(tracks, scenario.d_safe, 1.0);
    return rec;
}

}  // namespace bersim
