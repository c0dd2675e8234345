#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <vector>

#include "bersim/energy.hpp"
#include "bersim/wind.hpp"

namespace bersim {

inline constexpr double kInfCost = std::numeric_limits<double>::infinity();

enum class VertexKind { Depot, Waypoint, Customer };

struct Vertex {
    int id = 0;
    Vec3 position;
    VertexKind kind = VertexKind::Waypoint;
};

struct Edge {
    int id = 0;
    int from = 0;
    int to = 0;
    double length = 0;  // m, recomputed from endpoint positions
    Vec3 direction;     // unit vector from -> to
};

/// Directed waypoint graph. Edge lengths/directions are always derived from
/// vertex positions (never trusted from files). `region` selects which wind
/// process a vertex observes; the default binding is one global region.
struct TimeGraph {
    std::vector<Vertex> vertices;
    std::vector<Edge> edges;
    std::vector<std::vector<int>> outgoing;  // vertex id -> edge ids
    std::vector<std::vector<int>> incoming;
    std::vector<int> region;

    int depot = 0;

    void rebuild_derived();  // adjacency, lengths, directions; validates
    const Edge* find_edge(int from, int to) const;
};

/// Seeded Erdos-Renyi sample over uniform points in a box, augmented with a
/// random spanning tree (both directions) so every vertex can reach the
/// depot. Vertex 0 is the depot.
TimeGraph generate_er(int n, double p, const Vec3& area, std::uint64_t seed);

void save_graph(const TimeGraph& g, std::ostream& out);
TimeGraph load_graph(std::istream& in);

struct EdgeCost {
    double lse = 0;     // synthetic distance, m
    double energy = 0;  // Wh
    bool feasible = false;
};

/// Frozen per-edge costs at one instant; what the static planner consumes.
struct CostSnapshot {
    double t = 0;
    std::vector<EdgeCost> per_edge;  // indexed by edge id
};

/// Toggles mirroring the planner ablation switches that act on costs.
struct CostToggles {
    bool wind_costs = true;  // off: price every edge at calm wind
    bool risk_term = true;   // off: drop lambda*Unc from surrogate costs
};

/// Edge pricing under a wind estimate: synthetic distance L_SE, predicted
/// energy, one-step worst-case uncertainty, and the risk-aware surrogate.
class CostModel {
  public:
    CostModel(const TimeGraph& g, KinematicLimits limits, EnergyParams params,
              WindDiscretization disc, const WindProcess& process, double lambda,
              CostToggles toggles = {}, double uncertainty_cap = 10.0);

    /// L_SE = max(L_geo + lambda * L_wind, 0.05 * L_geo), +inf if unflyable.
    /// L_wind is the energy ratio against calm rescaled to meters.
    double lse(const Edge& e, const WindVector& wind) const;

    /// Predicted traversal energy in Wh, +inf if unflyable.
    double energy(const Edge& e, const WindVector& wind) const;

    /// Worst one-step upside deviation over reachable wind classes, >= 0.
    /// Unflyable deviations contribute the configured cap instead of +inf.
    double uncertainty(const Edge& e, const WindEstimate& est) const;

    /// c_t(e) = EnergyCost(e, est) + lambda * Unc(e, est), honoring toggles.
    double surrogate(const Edge& e, const WindEstimate& est) const;

    /// The Unc-free part of the surrogate (what an edge realized at the
    /// current estimate costs), honoring the wind_costs toggle.
    double immediate_cost(const Edge& e, const WindEstimate& est) const;

    /// Frozen costs at time t; each edge is priced with the wind its tail
    /// vertex's region observes.
    CostSnapshot snapshot(std::span<const WindProcess> processes, double t,
                          std::uint64_t stream_seed) const;

    double lambda() const { return lambda_; }
    const KinematicLimits& limits() const { return limits_; }
    const EnergyParams& params() const { return params_; }
    const WindDiscretization& discretization() const { return disc_; }

  private:
    std::vector<WindVector> reachable_deviations(const WindClass& c) const;

    const TimeGraph* graph_;
    KinematicLimits limits_;
    EnergyParams params_;
    WindDiscretization disc_;
    const WindProcess* process_;
    double lambda_;
    CostToggles toggles_;
    double uncertainty_cap_;
    std::vector<double> calm_energy_;  // per edge, memoized
};

struct PathResult {
    bool reachable = false;
    std::vector<int> vertices;  // src..dst inclusive; {src} when src == dst
    double total = 0;
};

using EdgeCostFn = std::function<double(const Edge&)>;

/// Cost-to-goal table from a reverse Dijkstra run; dist[goal] = 0.
struct CostToGo {
    int goal = 0;
    std::vector<double> dist;
};

CostToGo cost_to_go(const TimeGraph& g, const EdgeCostFn& cost, int goal);

/// Walk the shortest-path DAG from src picking the smallest next vertex id
/// at every tie, which yields the lexicographically smallest optimal path.
PathResult extract_path(const TimeGraph& g, const EdgeCostFn& cost, const CostToGo& table, int src);

PathResult shortest_path(const TimeGraph& g, const EdgeCostFn& cost, int src, int dst);
PathResult shortest_path(const TimeGraph& g, const CostSnapshot& snapshot, int src, int dst);

/// Time-invariant worst-case return pricing: every edge is charged as if it
/// faced a worst_wind headwind, with the trim term bounded over the ground
/// speeds such winds permit. Realized horizontal winds of magnitude
/// <= worst_wind can never cost more, which is what makes the budget gate
/// sound. Costs and next hops to the depot are memoized per graph.
class ReturnOracle {
  public:
    /// `home` defaults to the graph depot; fleet missions return to their
    /// launch vertex instead.
    ReturnOracle(const TimeGraph& g, const KinematicLimits& limits, const EnergyParams& params,
                 double worst_wind, int home = -1);

    double edge_price(const Edge& e) const;
    double cost(int vertex) const { return table_.dist[vertex]; }
    bool reachable(int vertex) const { return std::isfinite(cost(vertex)); }

    /// Conservative return route vertex sequence (vertex..home).
    std::vector<int> route(int vertex) const;
    /// First edge of the conservative return route, -1 at home or when no
    /// return exists.
    int next_hop_edge(int vertex) const { return next_edge_[vertex]; }
    int home() const { return home_; }

  private:
    const TimeGraph* graph_;
    double worst_wind_;
    KinematicLimits limits_;
    EnergyParams params_;
    int home_;
    CostToGo table_;
    std::vector<int> next_edge_;
};

}  // namespace bersim
