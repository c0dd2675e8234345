#include "bersim/fleet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bersim/rng.hpp"

namespace bersim {

int nearest_vertex(const TimeGraph& g, const Vec3& position) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (const Vertex& v : g.vertices) {
        const double d = distance(v.position, position);
        if (d < best_d) {
            best_d = d;
            best = v.id;
        }
    }
    return best;
}

double round_trip_energy(const TimeGraph& g, const KinematicLimits& limits,
                         const EnergyParams& params, int from_vertex, const Vec3& position) {
    const int target = nearest_vertex(g, position);
    auto calm_cost = [&](const Edge& e) {
        const EdgeTraversal t = edge_energy(e.length, e.direction, WindVector::calm(), limits, params);
        return t.ok() ? t.energy : kInfCost;
    };
    const PathResult out = shortest_path(g, calm_cost, from_vertex, target);
    if (!out.reachable) return kInfCost;
    const PathResult back = shortest_path(g, calm_cost, target, from_vertex);
    if (!back.reachable) return kInfCost;
    return out.total + back.total;
}

std::pair<std::vector<int>, std::vector<int>> partition_customers(
    std::span<const Customer> customers, const DroneSpec& spec, const TimeGraph& g,
    const KinematicLimits& limits, const EnergyParams& params, int from_vertex) {
    std::vector<int> truck_set, drone_set;
    for (std::size_t i = 0; i < customers.size(); ++i) {
        const Customer& c = customers[i];
        const bool droneable = c.service == ServiceKind::DroneCapable &&
                               c.payload <= spec.capacity &&
                               round_trip_energy(g, limits, params, from_vertex, c.position) <=
                                   spec.battery;
        (droneable ? drone_set : truck_set).push_back(static_cast<int>(i));
    }
    return {truck_set, drone_set};
}

double tour_length(const Vec3& depot, std::span<const Customer> nodes, std::span<const int> route) {
    if (route.empty()) return 0;
    double len = distance(depot, nodes[route.front()].position);
    for (std::size_t i = 0; i + 1 < route.size(); ++i)
        len += distance(nodes[route[i]].position, nodes[route[i + 1]].position);
    len += distance(nodes[route.back()].position, depot);
    return len;
}

TruckPlan truck_tsp(const Vec3& depot, std::span<const Customer> nodes, double speed,
                    [[maybe_unused]] std::uint64_t seed) {
    TruckPlan plan;
    plan.speed = speed;
    const int n = static_cast<int>(nodes.size());
    if (n == 0) return plan;

    std::vector<char> used(n, 0);
    Vec3 at = depot;
    for (int step = 0; step < n; ++step) {
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            if (used[i]) continue;
            const double d = distance(at, nodes[i].position);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        used[best] = 1;
        plan.route.push_back(best);
        at = nodes[best].position;
    }

    // 2-opt descent: reverse segments while any reversal shortens the tour.
    auto pos = [&](int idx) { return nodes[plan.route[idx]].position; };
    bool improved = n > 2;
    while (improved) {
        improved = false;
        for (int i = 0; i < n - 1 && !improved; ++i) {
            const Vec3 a = i == 0 ? depot : pos(i - 1);
            for (int j = i + 1; j < n; ++j) {
                const Vec3 d = j == n - 1 ? depot : pos(j + 1);
                const double before = distance(a, pos(i)) + distance(pos(j), d);
                const double after = distance(a, pos(j)) + distance(pos(i), d);
                if (after + 1e-12 < before) {
                    std::reverse(plan.route.begin() + i, plan.route.begin() + j + 1);
                    improved = true;
                    break;
                }
            }
        }
    }
    return plan;
}

std::vector<Assignment> dynamic_assign(double time, const Vec3& truck_pos, int truck_vertex,
                                       std::vector<int> idle_drones, std::vector<int> unserved,
                                       const AssignContext& ctx) {
    std::vector<Assignment> out;
    const bool clustered = !ctx.cluster_of_customer.empty();
    auto feasible_from_truck = [&](int cust_idx) {
        const Customer& c = ctx.customers[cust_idx];
        if (c.service != ServiceKind::DroneCapable || c.payload > ctx.spec.capacity) return false;
        return round_trip_energy(*ctx.graph, *ctx.limits, *ctx.params, truck_vertex, c.position) <=
               ctx.spec.battery;
    };

    while (!idle_drones.empty() && !unserved.empty()) {
        // Fastest idle drone; the fleet is homogeneous so this is the lowest id.
        const int drone = *std::min_element(idle_drones.begin(), idle_drones.end());

        int pick = -1;
        double pick_d = std::numeric_limits<double>::infinity();
        bool in_cluster_pick = false;
        for (int cust : unserved) {
            if (!feasible_from_truck(cust)) continue;
            const bool own = clustered && ctx.cluster_of_customer[cust] == ctx.cluster_of_drone[drone];
            const double d = distance(truck_pos, ctx.customers[cust].position);
            // Own-cluster customers take priority; ties go to the lower id.
            if (pick == -1 || (own && !in_cluster_pick) ||
                (own == in_cluster_pick && (d < pick_d || (d == pick_d && cust < pick)))) {
                pick = cust;
                pick_d = d;
                in_cluster_pick = own;
            }
        }
        if (pick == -1) break;

        out.push_back({drone, ctx.customers[pick].id, time});
        idle_drones.erase(std::find(idle_drones.begin(), idle_drones.end(), drone));
        unserved.erase(std::find(unserved.begin(), unserved.end(), pick));
    }
    return out;
}

std::vector<int> kmeans_cluster(std::span<const Vec3> points, int k, std::uint64_t seed,
                                int max_iter) {
    const int n = static_cast<int>(points.size());
    std::vector<int> labels(n, 0);
    if (k <= 1 || n == 0) return labels;

    Rng rng(seed);
    std::vector<Vec3> centroids;
    centroids.push_back(points[rng.below(n)]);
    std::vector<double> min_d(n, std::numeric_limits<double>::infinity());
    while (static_cast<int>(centroids.size()) < k) {
        int far = 0;
        double far_d = -1;
        for (int i = 0; i < n; ++i) {
            min_d[i] = std::min(min_d[i], distance(points[i], centroids.back()));
            if (min_d[i] > far_d) {
                far_d = min_d[i];
                far = i;
            }
        }
        centroids.push_back(points[far]);
    }

    for (int iter = 0; iter < max_iter; ++iter) {
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double d = distance(points[i], centroids[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            labels[i] = best;
        }
        std::vector<Vec3> next(k);
        std::vector<int> count(k, 0);
        for (int i = 0; i < n; ++i) {
            next[labels[i]] = next[labels[i]] + points[i];
            ++count[labels[i]];
        }
        double moved = 0;
        for (int c = 0; c < k; ++c) {
            if (count[c] == 0) continue;  // empty cluster keeps its centroid
            next[c] = next[c] / count[c];
            moved = std::max(moved, distance(next[c], centroids[c]));
            centroids[c] = next[c];
        }
        if (moved < 1e-6) break;
    }
    return labels;
}

double kmeans_objective(std::span<const Vec3> points, std::span<const int> labels, int k) {
    std::vector<Vec3> centroids(k);
    std::vector<int> count(k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        centroids[labels[i]] = centroids[labels[i]] + points[i];
        ++count[labels[i]];
    }
    for (int c = 0; c < k; ++c)
        if (count[c] > 0) centroids[c] = centroids[c] / count[c];
    double obj = 0;
    for (std::size_t i = 0; i < points.size(); ++i)
        obj += (points[i] - centroids[labels[i]]).norm_sq();
    return obj;
}

Vec3 TimedTrajectory::at(double t) const {
    if (knots.empty()) return {};
    if (t <= knots.front().t) return knots.front().p;
    if (t >= knots.back().t) return knots.back().p;
    auto it = std::upper_bound(knots.begin(), knots.end(), t,
                               [](double v, const Knot& kn) { return v < kn.t; });
    const Knot& hi = *it;
    const Knot& lo = *std::prev(it);
    const double span = hi.t - lo.t;
    const double f = span > 0 ? (t - lo.t) / span : 0.0;
    return lo.p + (hi.p - lo.p) * f;
}

int conflict_count(std::span<const TimedTrajectory> trajectories, double d_safe, double dt) {
    int conflicts = 0;
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        for (std::size_t j = i + 1; j < trajectories.size(); ++j) {
            const auto& a = trajectories[i];
            const auto& b = trajectories[j];
            if (a.knots.empty() || b.knots.empty()) continue;
            const double t0 = std::max(a.knots.front().t, b.knots.front().t);
            const double t1 = std::min(a.knots.back().t, b.knots.back().t);
            bool hit = false;
            for (double t = t0; t <= t1 && !hit; t += dt)
                hit = distance(a.at(t), b.at(t)) < d_safe;
            if (hit) ++conflicts;
        }
    }
    return conflicts;
}

}  // namespace bersim
