#pragma once

// Test-only brute-force oracles, kept independent of the library's search
// implementations.

#include <functional>
#include <limits>
#include <vector>

#include "bersim/graph.hpp"

namespace bersim::testing {

struct EnumeratedBest {
    bool found = false;
    double total = std::numeric_limits<double>::infinity();
    std::vector<int> vertices;
};

/// Exhaustive simple-path enumeration (exponential; for tiny graphs only).
inline void enumerate_paths(const TimeGraph& g, const EdgeCostFn& cost, int v, int dst,
                            std::vector<char>& visited, std::vector<int>& stack, double acc,
                            EnumeratedBest& best) {
    if (v == dst) {
        if (acc < best.total) {
            best.found = true;
            best.total = acc;
            best.vertices = stack;
        }
        return;
    }
    for (int eid : g.outgoing[v]) {
        const Edge& e = g.edges[eid];
        if (visited[e.to]) continue;
        const double w = cost(e);
        if (!std::isfinite(w)) continue;
        visited[e.to] = 1;
        stack.push_back(e.to);
        enumerate_paths(g, cost, e.to, dst, visited, stack, acc + w, best);
        stack.pop_back();
        visited[e.to] = 0;
    }
}

inline EnumeratedBest brute_force_shortest(const TimeGraph& g, const EdgeCostFn& cost, int src,
                                           int dst) {
    EnumeratedBest best;
    std::vector<char> visited(g.vertices.size(), 0);
    std::vector<int> stack{src};
    visited[src] = 1;
    if (src == dst) {
        best.found = true;
        best.total = 0;
        best.vertices = stack;
        return best;
    }
    enumerate_paths(g, cost, src, dst, visited, stack, 0.0, best);
    return best;
}

/// Reachability by plain depth-first search over finite-cost edges.
inline bool reaches(const TimeGraph& g, const EdgeCostFn& cost, int src, int dst) {
    std::vector<char> seen(g.vertices.size(), 0);
    std::vector<int> todo{src};
    seen[src] = 1;
    while (!todo.empty()) {
        const int v = todo.back();
        todo.pop_back();
        if (v == dst) return true;
        for (int eid : g.outgoing[v]) {
            const Edge& e = g.edges[eid];
            if (!std::isfinite(cost(e)) || seen[e.to]) continue;
            seen[e.to] = 1;
            todo.push_back(e.to);
        }
    }
    return false;
}

}  // namespace bersim::testing
