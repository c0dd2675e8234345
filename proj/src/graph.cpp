#include "bersim/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>

#include "bersim/error.hpp"
#include "bersim/rng.hpp"

namespace bersim {

void TimeGraph::rebuild_derived() {
    const int n = static_cast<int>(vertices.size());
    int depots = 0;
    for (int i = 0; i < n; ++i) {
        if (vertices[i].id != i) throw ConfigError("graph: vertex ids must be 0..n-1 in order");
        if (vertices[i].kind == VertexKind::Depot) {
            depot = i;
            ++depots;
        }
    }
    if (depots != 1) throw ConfigError("graph: exactly one depot required");

    outgoing.assign(n, {});
    incoming.assign(n, {});
    if (region.size() != static_cast<std::size_t>(n)) region.assign(n, 0);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        Edge& e = edges[i];
        if (e.id != static_cast<int>(i)) throw ConfigError("graph: edge ids must be 0..m-1 in order");
        if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n)
            throw ConfigError("graph: edge endpoint out of range");
        if (e.from == e.to) throw ConfigError("graph: self-loops not allowed");
        const Vec3 d = vertices[e.to].position - vertices[e.from].position;
        e.length = d.norm();
        if (!(e.length > 0)) throw ConfigError("graph: coincident vertices give a zero-length edge");
        e.direction = d / e.length;
        outgoing[e.from].push_back(e.id);
        incoming[e.to].push_back(e.id);
    }
}

const Edge* TimeGraph::find_edge(int from, int to) const {
    for (int eid : outgoing[from])
        if (edges[eid].to == to) return &edges[eid];
    return nullptr;
}

TimeGraph generate_er(int n, double p, const Vec3& area, std::uint64_t seed) {
    TimeGraph g;
    Rng rng(seed);
    g.vertices.reserve(n);
    for (int i = 0; i < n; ++i) {
        Vertex v;
        v.id = i;
        v.position = {rng.uniform(0, area.x), rng.uniform(0, area.y),
                      area.z > 0 ? rng.uniform(0, area.z) : 0.0};
        v.kind = i == 0 ? VertexKind::Depot : VertexKind::Waypoint;
        g.vertices.push_back(v);
    }

    std::set<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (rng.uniform() < p) pairs.insert({i, j});
        }
    // Random spanning tree, added in both directions, guarantees that the
    // depot is reachable from everywhere in the calm graph.
    for (int i = 1; i < n; ++i) {
        int anchor = static_cast<int>(rng.below(i));
        pairs.insert({i, anchor});
        pairs.insert({anchor, i});
    }

    int eid = 0;
    for (const auto& [from, to] : pairs) {
        Edge e;
        e.id = eid++;
        e.from = from;
        e.to = to;
        g.edges.push_back(e);
    }
    g.rebuild_derived();
    return g;
}

namespace {
const char* kind_name(VertexKind k) {
    switch (k) {
        case VertexKind::Depot: return "depot";
        case VertexKind::Waypoint: return "waypoint";
        case VertexKind::Customer: return "customer";
    }
    return "?";
}

VertexKind kind_from(const std::string& s) {
    if (s == "depot") return VertexKind::Depot;
    if (s == "waypoint") return VertexKind::Waypoint;
    if (s == "customer") return VertexKind::Customer;
    throw ConfigError("graph: unknown vertex kind '" + s + "'");
}
}  // namespace

void save_graph(const TimeGraph& g, std::ostream& out) {
    out << "# bersim graph v1\n";
    for (const auto& v : g.vertices) {
        out << "vertex " << v.id << ' ' << v.position.x << ' ' << v.position.y << ' '
            << v.position.z << ' ' << kind_name(v.kind) << '\n';
    }
    for (const auto& e : g.edges) out << "edge " << e.id << ' ' << e.from << ' ' << e.to << '\n';
}

TimeGraph load_graph(std::istream& in) {
    TimeGraph g;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        std::string tag;
        row >> tag;
        if (tag == "vertex") {
            Vertex v;
            std::string kind;
            row >> v.id >> v.position.x >> v.position.y >> v.position.z >> kind;
            if (row.fail()) throw ConfigError("graph line " + std::to_string(line_no) + ": bad vertex record");
            v.kind = kind_from(kind);
            g.vertices.push_back(v);
        } else if (tag == "edge") {
            Edge e;
            row >> e.id >> e.from >> e.to;
            if (row.fail()) throw ConfigError("graph line " + std::to_string(line_no) + ": bad edge record");
            g.edges.push_back(e);
        } else {
            throw ConfigError("graph line " + std::to_string(line_no) + ": unknown record '" + tag + "'");
        }
    }
    g.rebuild_derived();
    return g;
}

CostModel::CostModel(const TimeGraph& g, KinematicLimits limits, EnergyParams params,
                     WindDiscretization disc, const WindProcess& process, double lambda,
                     CostToggles toggles, double uncertainty_cap)
    : graph_(&g),
      limits_(limits),
      params_(params),
      disc_(std::move(disc)),
      process_(&process),
      lambda_(lambda),
      toggles_(toggles),
      uncertainty_cap_(uncertainty_cap) {
    calm_energy_.reserve(g.edges.size());
    for (const auto& e : g.edges) {
        const EdgeTraversal t = edge_energy(e.length, e.direction, WindVector::calm(), limits_, params_);
        calm_energy_.push_back(t.ok() ? t.energy : kInfCost);
    }
}

double CostModel::energy(const Edge& e, const WindVector& wind) const {
    const EdgeTraversal t = edge_energy(e.length, e.direction, wind, limits_, params_);
    return t.ok() ? t.energy : kInfCost;
}

double CostModel::lse(const Edge& e, const WindVector& wind) const {
    const double e_wind = energy(e, wind);
    if (!std::isfinite(e_wind)) return kInfCost;
    const double e_calm = calm_energy_[e.id];
    const double l_wind = e.length * (e_wind - e_calm) / e_calm;
    return std::max(e.length + lambda_ * l_wind, 0.05 * e.length);
}

std::vector<WindVector> CostModel::reachable_deviations(const WindClass& c) const {
    std::vector<WindVector> out;
    if (const auto* mk = process_->markov()) {
        // One-step-reachable Markov classes (positive transition mass).
        const int idx = c.index % mk->k;
        for (int j = 0; j < mk->k; ++j)
            if (mk->transition[idx * mk->k + j] > 0) out.push_back(mk->class_wind(j));
    } else {
        // Log replay: the two angularly adjacent sectors at the same rung,
        // plus one magnitude rung up in the same sector.
        WindClass left = c, right = c, up = c;
        left.index = (c.index + c.k - 1) % c.k;
        right.index = (c.index + 1) % c.k;
        out.push_back(disc_.representative(left));
        out.push_back(disc_.representative(right));
        if (c.magnitude_level + 1 < static_cast<int>(disc_.ladder.size())) {
            up.magnitude_level = c.magnitude_level + 1;
            out.push_back(disc_.representative(up));
        }
    }
    return out;
}

double CostModel::uncertainty(const Edge& e, const WindEstimate& est) const {
    const double e_est = energy(e, est.vector);
    if (!std::isfinite(e_est)) return uncertainty_cap_;
    double worst = 0;
    for (const WindVector& w : reachable_deviations(disc_.classify(est.vector))) {
        const double e_dev = energy(e, w);
        const double upside = std::isfinite(e_dev) ? std::max(e_dev - e_est, 0.0) : uncertainty_cap_;
        worst = std::max(worst, upside);
    }
    return worst;
}

double CostModel::immediate_cost(const Edge& e, const WindEstimate& est) const {
    if (!toggles_.wind_costs) return calm_energy_[e.id];
    return energy(e, est.vector);
}

double CostModel::surrogate(const Edge& e, const WindEstimate& est) const {
    if (!toggles_.wind_costs) return calm_energy_[e.id];
    const double e_est = energy(e, est.vector);
    if (!std::isfinite(e_est)) return kInfCost;
    if (!toggles_.risk_term) return e_est;
    return e_est + lambda_ * uncertainty(e, est);
}

CostSnapshot CostModel::snapshot(std::span<const WindProcess> processes, double t,
                                 std::uint64_t stream_seed) const {
    CostSnapshot snap;
    snap.t = t;
    std::vector<WindVector> region_wind;
    region_wind.reserve(processes.size());
    for (std::size_t r = 0; r < processes.size(); ++r)
        region_wind.push_back(processes[r].at(t, Rng::mix(stream_seed, r)));
    snap.per_edge.reserve(graph_->edges.size());
    for (const auto& e : graph_->edges) {
        const WindVector& wind = region_wind[graph_->region[e.from]];
        EdgeCost c;
        c.lse = lse(e, wind);
        c.energy = energy(e, wind);
        c.feasible = std::isfinite(c.energy);
        snap.per_edge.push_back(c);
    }
    return snap;
}

CostToGo cost_to_go(const TimeGraph& g, const EdgeCostFn& cost, int goal) {
    CostToGo table;
    table.goal = goal;
    table.dist.assign(g.vertices.size(), kInfCost);
    table.dist[goal] = 0;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    heap.push({0.0, goal});
    std::vector<char> settled(g.vertices.size(), 0);
    while (!heap.empty()) {
        auto [d, v] = heap.top();
        heap.pop();
        if (settled[v]) continue;
        settled[v] = 1;
        for (int eid : g.incoming[v]) {
            const Edge& e = g.edges[eid];
            const double w = cost(e);
            if (!std::isfinite(w)) continue;
            const double cand = w + d;
            if (cand < table.dist[e.from]) {
                table.dist[e.from] = cand;
                heap.push({cand, e.from});
            }
        }
    }
    return table;
}

PathResult extract_path(const TimeGraph& g, const EdgeCostFn& cost, const CostToGo& table, int src) {
    PathResult out;
    if (!std::isfinite(table.dist[src])) return out;
    out.reachable = true;
    out.total = table.dist[src];
    out.vertices.push_back(src);
    int v = src;
    while (v != table.goal) {
        int best = -1;
        for (int eid : g.outgoing[v]) {
            const Edge& e = g.edges[eid];
            const double w = cost(e);
            if (!std::isfinite(w)) continue;
            // Relaxed values are compared bit-for-bit with the table entry:
            // both sides were produced by the same w + dist expression.
            if (w + table.dist[e.to] == table.dist[v]) {
                if (best == -1 || e.to < g.edges[best].to) best = eid;
            }
        }
        if (best == -1) {  // numerically unreachable; treat as no path
            return {};
        }
        v = g.edges[best].to;
        out.vertices.push_back(v);
    }
    return out;
}

PathResult shortest_path(const TimeGraph& g, const EdgeCostFn& cost, int src, int dst) {
    const CostToGo table = cost_to_go(g, cost, dst);
    return extract_path(g, cost, table, src);
}

PathResult shortest_path(const TimeGraph& g, const CostSnapshot& snapshot, int src, int dst) {
    auto cost = [&snapshot](const Edge& e) {
        const EdgeCost& c = snapshot.per_edge[e.id];
        return c.feasible ? c.lse : kInfCost;
    };
    return shortest_path(g, cost, src, dst);
}

ReturnOracle::ReturnOracle(const TimeGraph& g, const KinematicLimits& limits,
                           const EnergyParams& params, double worst_wind, int home)
    : graph_(&g),
      worst_wind_(worst_wind),
      limits_(limits),
      params_(params),
      home_(home >= 0 ? home : g.depot) {
    auto price = [this](const Edge& e) { return edge_price(e); };
    table_ = cost_to_go(g, price, home_);
    next_edge_.assign(g.vertices.size(), -1);
    for (const auto& v : g.vertices) {
        if (v.id == home_ || !std::isfinite(table_.dist[v.id])) continue;
        int best = -1;
        for (int eid : g.outgoing[v.id]) {
            const Edge& e = g.edges[eid];
            if (edge_price(e) + table_.dist[e.to] == table_.dist[v.id])
                if (best == -1 || e.to < g.edges[best].to) best = eid;
        }
        next_edge_[v.id] = best;
    }
}

double ReturnOracle::edge_price(const Edge& e) const {
    const double va = limits_.airspeed;
    const double vg = va - worst_wind_;  // lower bound on ground speed
    if (!(vg > 0)) return kInfCost;
    // Trim thrust bounded over the admissible ground speeds: climbing edges
    // are charged at the fastest crossing, descending ones at the slowest.
    const double uz = e.direction.z;
    const double sin_gamma = uz >= 0 ? uz * (va + worst_wind_) / va : uz * vg / va;
    const double thrust =
        std::max(params_.drag_force(va) + params_.total_mass() * params_.gravity * sin_gamma, 0.0);
    return power_draw(params_, thrust, va) * (e.length / vg) / 3600.0;
}

std::vector<int> ReturnOracle::route(int vertex) const {
    std::vector<int> seq;
    if (!reachable(vertex)) return seq;
    seq.push_back(vertex);
    int v = vertex;
    while (v != home_) {
        const int eid = next_edge_[v];
        if (eid < 0) return {};
        v = graph_->edges[eid].to;
        seq.push_back(v);
    }
    return seq;
}

}  // namespace bersim
