#include "bersim/planner.hpp"

#include <algorithm>
#include <cmath>

#include "bersim/error.hpp"
#include "bersim/executor.hpp"
#include "bersim/rng.hpp"

namespace bersim {

const char* to_string(PlannerKind k) {
    switch (k) {
        case PlannerKind::Ser: return "SER";
        case PlannerKind::Rer: return "RER";
        case PlannerKind::Ger: return "GER";
        case PlannerKind::Ber: return "BER";
    }
    return "?";
}

PlannerKind planner_from_string(const std::string& s) {
    if (s == "SER" || s == "ser") return PlannerKind::Ser;
    if (s == "RER" || s == "rer") return PlannerKind::Rer;
    if (s == "GER" || s == "ger") return PlannerKind::Ger;
    if (s == "BER" || s == "ber") return PlannerKind::Ber;
    throw ConfigError("unknown planner '" + s + "'");
}

const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::Suc: return "SUC";
        case Outcome::Del: return "DEL";
        case Outcome::Fail: return "FAIL";
        case Outcome::Abrt: return "ABRT";
    }
    return "?";
}

PathResult plan_ser(const TimeGraph& g, const CostSnapshot& c0, int depot, int target) {
    const PathResult out = shortest_path(g, c0, depot, target);
    if (!out.reachable) return {};
    const PathResult back = shortest_path(g, c0, target, depot);
    if (!back.reachable) return {};
    PathResult route = out;
    route.vertices.insert(route.vertices.end(), back.vertices.begin() + 1, back.vertices.end());
    route.total += back.total;
    return route;
}

StepCosts evaluate_step_costs(const TimeGraph& g, const CostModel& model, const WindEstimate& est) {
    StepCosts costs;
    costs.immediate.reserve(g.edges.size());
    costs.lookahead.reserve(g.edges.size());
    costs.unc.reserve(g.edges.size());
    for (const Edge& e : g.edges) {
        costs.immediate.push_back(model.immediate_cost(e, est));
        costs.lookahead.push_back(model.surrogate(e, est));
        costs.unc.push_back(model.uncertainty(e, est));
    }
    return costs;
}

Decision step_rer(const MissionState& state, const TimeGraph& g, const StepCosts& costs, int goal) {
    // Shortest path to the goal under c_t = EnergyCost + lambda*Unc applied
    // to every edge of the plan, then commit the first hop.
    auto cost = [&costs](const Edge& e) { return costs.lookahead[e.id]; };
    const PathResult path = shortest_path(g, cost, state.vertex, goal);
    if (!path.reachable || path.vertices.size() < 2) return {Decision::Kind::Stuck, -1};
    const Edge* e = g.find_edge(path.vertices[0], path.vertices[1]);
    return {Decision::Kind::Traverse, e->id};
}

Decision step_ger(const MissionState& state, const TimeGraph& g, const StepCosts& costs) {
    int best = -1;
    for (int eid : g.outgoing[state.vertex]) {
        if (!std::isfinite(costs.immediate[eid])) continue;
        if (best == -1 || costs.immediate[eid] < costs.immediate[best]) best = eid;
    }
    if (best == -1) return {Decision::Kind::Stuck, -1};
    return {Decision::Kind::Traverse, best};
}

bool return_ok_at(double budget, int vertex, const ReturnOracle& oracle, const PlannerConfig& cfg) {
    if (!cfg.ablations.budget_gate) return true;
    if (!oracle.reachable(vertex)) return false;
    return budget >= cfg.kappa_ret * oracle.cost(vertex);
}

bool return_ok(const MissionState& state, const ReturnOracle& oracle, const PlannerConfig& cfg) {
    return return_ok_at(state.budget, state.vertex, oracle, cfg);
}

Decision step_ber(const MissionState& state, const TimeGraph& g, const StepCosts& costs,
                  const ReturnOracle& oracle, const PlannerConfig& cfg, int goal,
                  const std::vector<char>& edge_blocked, const CostToGo& calm_to_goal,
                  bool force_strict) {
    // Effective pricing for this step: flag=0 screens blocked and unflyable
    // edges out, flag=1 keeps them priced.
    auto immediate = [&](const Edge& e) {
        double c = costs.immediate[e.id];
        if (edge_blocked[e.id]) {
            if (cfg.flag == 0) return kInfCost;
            c += cfg.blocked_penalty;
        }
        return c;
    };
    auto lookahead = [&](const Edge& e) {
        double c = costs.lookahead[e.id];
        if (edge_blocked[e.id]) {
            if (cfg.flag == 0) return kInfCost;
            c += cfg.blocked_penalty;
        }
        return c;
    };

    std::vector<int> candidates;
    for (int eid : g.outgoing[state.vertex]) {
        const Edge& e = g.edges[eid];
        if (cfg.flag == 0 && !std::isfinite(immediate(e))) continue;
        candidates.push_back(eid);
    }

    const auto fallback = [&]() -> Decision {
        if (!state.delivered) return {Decision::Kind::Abort, -1};
        const int eid = oracle.next_hop_edge(state.vertex);
        if (eid < 0) return {Decision::Kind::Stuck, -1};
        return {Decision::Kind::Traverse, eid};
    };
    if (candidates.empty()) return fallback();

    const CostToGo to_goal = cost_to_go(g, lookahead, goal);

    // Deliver-and-return feasibility: the remaining budget must cover the
    // calm-wind cost of finishing the current leg plus kappa_ret times the
    // conservative return from the delivery point, and the hop must stay
    // abort-solvent (a conservative return from its head fits the budget
    // outright). After delivery the two conditions coincide at the head.
    auto passes = [&](const Edge& e) {
        const double after_hop = state.budget - immediate(e);
        if (state.delivered) return return_ok_at(after_hop, e.to, oracle, cfg);
        if (!cfg.ablations.budget_gate) return true;
        if (!oracle.reachable(e.to) || after_hop < oracle.cost(e.to)) return false;
        return after_hop - calm_to_goal.dist[e.to] >= cfg.kappa_ret * oracle.cost(goal);
    };
    std::vector<char> passes_gate;
    for (int eid : candidates) passes_gate.push_back(passes(g.edges[eid]));

    // Scores cover every candidate; the threshold band anchors on the
    // unrestricted optimum so the gate can prune but never redirect onto a
    // much worse completion (detouring against a binding gate only burns
    // the margin the gate is there to protect).
    double best_score = kInfCost;
    std::vector<double> score(candidates.size(), kInfCost);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const Edge& e = g.edges[candidates[i]];
        score[i] = immediate(e) + to_goal.dist[e.to];
        best_score = std::min(best_score, score[i]);
    }
    if (!std::isfinite(best_score)) return fallback();  // goal unreachable

    // Threshold policy: among near-optimal gate-passing candidates take the
    // lowest uncertainty, then the lowest edge id. When the gate empties
    // the band, a bounded sidestep (three bands wide) is still acceptable;
    // beyond that the gate is binding and the mission gives up rather than
    // burning its return margin on detours.
    const double band = force_strict ? 0.0 : cfg.tau;
    const double sidestep = force_strict ? cfg.tau : 6.0 * cfg.tau;
    int pick = -1;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (!passes_gate[i]) continue;
        if (score[i] > (1.0 + band) * best_score) continue;
        if (pick == -1 || costs.unc[candidates[i]] < costs.unc[pick]) pick = candidates[i];
    }
    if (pick == -1) {
        double pick_score = kInfCost;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (!passes_gate[i]) continue;
            if (score[i] > (1.0 + sidestep) * best_score) continue;
            if (score[i] < pick_score) {
                pick_score = score[i];
                pick = candidates[i];
            }
        }
    }
    if (pick == -1) return fallback();
    return {Decision::Kind::Traverse, pick};
}

namespace {

struct MissionContext {
    const Scenario* sc;
    std::vector<WindCursor> cursors;
    WindVector observe(int vertex, double t) {
        return cursors[static_cast<std::size_t>(sc->graph.region[vertex])].at(sc->wind_t0 + t);
    }
};

std::vector<char> compute_blocked_edges(const TimeGraph& g, const std::vector<Obstacle>& obstacles,
                                        double clearance) {
    std::vector<char> blocked(g.edges.size(), 0);
    if (obstacles.empty()) return blocked;
    for (const Edge& e : g.edges) {
        const Vec3 a = g.vertices[e.from].position;
        const Vec3 b = g.vertices[e.to].position;
        for (const Obstacle& o : obstacles) {
            // 2D segment-to-disc test against the inflated obstacle.
            const double guard = o.radius + clearance;
            const double abx = b.x - a.x, aby = b.y - a.y;
            const double apx = o.x - a.x, apy = o.y - a.y;
            const double len_sq = abx * abx + aby * aby;
            double u = len_sq > 0 ? (apx * abx + apy * aby) / len_sq : 0.0;
            u = std::clamp(u, 0.0, 1.0);
            const double dx = a.x + u * abx - o.x;
            const double dy = a.y + u * aby - o.y;
            if (dx * dx + dy * dy <= guard * guard) {
                blocked[e.id] = 1;
                break;
            }
        }
    }
    return blocked;
}

double executed_max_turn(const Scenario& sc, const std::vector<int>& path) {
    if (path.size() < 2) return 0;
    std::vector<Vec3> pts;
    pts.reserve(path.size());
    for (int v : path) pts.push_back(sc.graph.vertices[v].position);
    if (!sc.planner.ablations.traj_opt) return polyline_max_turn_deg(pts);
    const RouteRefinement r =
        refine_route(pts, 1.0 / sc.limits.kappa_max, sc.obstacles, 1.0, 2.0);
    return r.max_step_turn_deg;
}

/// Walk the conservative return route gate-free, debiting realized wind
/// costs. Returns the outcome of the attempt (Abrt on reaching the depot).
Outcome execute_abort_return(MissionState& st, MissionContext& ctx, const ReturnOracle& oracle,
                             MissionRecord& rec) {
    const Scenario& sc = *ctx.sc;
    while (st.vertex != oracle.home()) {
        const int eid = oracle.next_hop_edge(st.vertex);
        if (eid < 0) return Outcome::Fail;
        const Edge& e = sc.graph.edges[eid];
        WindCursor& wind = ctx.cursors[static_cast<std::size_t>(sc.graph.region[st.vertex])];
        double debit = 0;
        const bool moved = traverse_edge(st, e, wind, sc.wind_t0, sc.limits, sc.energy, &debit);
        rec.debit_sum_wh += debit;
        if (!moved) return Outcome::Fail;
        rec.track.emplace_back(st.t_sim, sc.graph.vertices[st.vertex].position);
        if (st.budget < 0) {
            st.depleted = true;
            return Outcome::Fail;
        }
    }
    return Outcome::Abrt;
}

}  // namespace

MissionRecord run_mission(const Scenario& scenario, std::uint64_t seed) {
    const PlannerConfig& cfg = scenario.planner;
    const TimeGraph& g = scenario.graph;

    MissionRecord rec;
    rec.seed = seed;
    rec.planner = cfg.planner;
    rec.b0 = scenario.initial_budget;
    rec.wind_classes = scenario.discretization.k;
    rec.lambda = cfg.lambda;

    MissionContext ctx{&scenario, {}};
    ctx.cursors.reserve(scenario.processes.size());
    for (std::size_t r = 0; r < scenario.processes.size(); ++r)
        ctx.cursors.emplace_back(scenario.processes[r], Rng::mix(seed, r));

    const int home = scenario.home >= 0 ? scenario.home : g.depot;
    CostToggles toggles{cfg.ablations.wind_costs, cfg.ablations.risk_term};
    const CostModel model(g, scenario.limits, scenario.energy, scenario.discretization,
                          scenario.processes[0], cfg.lambda, toggles, cfg.uncertainty_cap);
    const ReturnOracle oracle(g, scenario.limits, scenario.energy, cfg.worst_wind, home);
    const std::vector<char> blocked = compute_blocked_edges(g, scenario.obstacles, 2.0);

    MissionState st;
    st.budget = scenario.initial_budget;
    st.vertex = home;
    st.path.push_back(home);

    // SER commits its whole route against the t=0 snapshot. A mission whose
    // snapshot-predicted round-trip energy does not fit the budget is
    // unreachable for a static planner and aborts on the ground.
    std::vector<int> ser_route;
    std::size_t ser_next = 1;
    if (cfg.planner == PlannerKind::Ser) {
        const CostSnapshot c0 = model.snapshot(scenario.processes, scenario.wind_t0, seed);
        const PathResult route = plan_ser(g, c0, home, scenario.target);
        double planned_energy = 0;
        for (std::size_t i = 0; route.reachable && i + 1 < route.vertices.size(); ++i) {
            const Edge* e = g.find_edge(route.vertices[i], route.vertices[i + 1]);
            planned_energy += c0.per_edge[e->id].energy;
        }
        if (!route.reachable || planned_energy > scenario.initial_budget) {
            rec.outcome = Outcome::Abrt;
            rec.path = st.path;
            return rec;
        }
        ser_route = route.vertices;
    }

    WindEstimate est;
    est.alpha = cfg.alpha;
    est.vector = ctx.observe(home, 0.0);

    Outcome outcome{};
    rec.track.emplace_back(0.0, g.vertices[home].position);

    // Band stall guard: while the threshold band dithers without getting
    // geometrically closer to the goal, fall back to the strict argmin.
    constexpr int kStallWindow = 6;
    double best_goal_gap = kInfCost;
    int stalled_steps = 0;
    bool was_delivered = false;

    // Static calm-wind cost table toward the target for the gate's
    // deliver-and-return clause.
    CostToGo calm_to_target;
    if (cfg.planner == PlannerKind::Ber) {
        auto calm_cost = [&](const Edge& e) {
            const EdgeTraversal t =
                edge_energy(e.length, e.direction, WindVector::calm(), scenario.limits, scenario.energy);
            return t.ok() ? t.energy : kInfCost;
        };
        calm_to_target = cost_to_go(g, calm_cost, scenario.target);
    }

    for (;;) {
        const WindVector observed = ctx.observe(st.vertex, st.t_sim);
        est = update_estimate(est, observed, st.t_sim);

        if (st.vertex == scenario.target) st.delivered = true;
        // Margin check on every post-delivery arrival (infinite return cost
        // counts as a break).
        if (st.delivered && st.budget < cfg.kappa_ret * oracle.cost(st.vertex) &&
            !st.kappa_violated_after_delivery) {
            st.kappa_violated_after_delivery = true;
            rec.del_reason = st.vertex == scenario.target ? "margin_target" : "margin_mid";
        }
        if (st.delivered && st.vertex == home) {
            outcome = (!st.depleted && !st.kappa_violated_after_delivery) ? Outcome::Suc : Outcome::Del;
            if (outcome == Outcome::Suc) rec.del_reason.clear();
            break;
        }
        if (st.steps >= cfg.t_max) {
            if (st.delivered && st.budget >= 0) {
                outcome = Outcome::Del;
                rec.del_reason = "t_max";
            } else {
                outcome = Outcome::Fail;
            }
            break;
        }

        const int goal = st.delivered ? home : scenario.target;
        Decision decision;
        switch (cfg.planner) {
            case PlannerKind::Ser: {
                if (ser_next >= ser_route.size()) {
                    decision = {Decision::Kind::Stuck, -1};
                    break;
                }
                const Edge* e = g.find_edge(st.vertex, ser_route[ser_next]);
                ++ser_next;
                decision = e ? Decision{Decision::Kind::Traverse, e->id}
                             : Decision{Decision::Kind::Stuck, -1};
                break;
            }
            case PlannerKind::Rer: {
                const StepCosts costs = evaluate_step_costs(g, model, est);
                decision = step_rer(st, g, costs, goal);
                break;
            }
            case PlannerKind::Ger: {
                const StepCosts costs = evaluate_step_costs(g, model, est);
                decision = step_ger(st, g, costs);
                break;
            }
            case PlannerKind::Ber: {
                if (st.delivered != was_delivered) {  // goal switched
                    was_delivered = st.delivered;
                    best_goal_gap = kInfCost;
                    stalled_steps = 0;
                }
                const double gap = distance(g.vertices[st.vertex].position,
                                            g.vertices[goal].position);
                if (gap < best_goal_gap) {
                    best_goal_gap = gap;
                    stalled_steps = 0;
                } else {
                    ++stalled_steps;
                }
                const StepCosts costs = evaluate_step_costs(g, model, est);
                decision = step_ber(st, g, costs, oracle, cfg, goal, blocked, calm_to_target,
                                    stalled_steps >= kStallWindow);
                break;
            }
        }

        if (decision.kind == Decision::Kind::Stuck) {
            outcome = Outcome::Fail;
            break;
        }
        if (decision.kind == Decision::Kind::Abort) {
            outcome = execute_abort_return(st, ctx, oracle, rec);
            break;
        }

        const Edge& e = g.edges[decision.edge_id];
        WindCursor& wind = ctx.cursors[static_cast<std::size_t>(g.region[st.vertex])];
        double debit = 0;
        const bool moved =
            traverse_edge(st, e, wind, scenario.wind_t0, scenario.limits, scenario.energy, &debit);
        ++st.steps;
        rec.debit_sum_wh += debit;
        if (!moved) {
            outcome = Outcome::Fail;  // wind turned the edge unflyable mid-crossing
            break;
        }
        rec.track.emplace_back(st.t_sim, g.vertices[st.vertex].position);
        if (st.budget < 0) {
            st.depleted = true;
            outcome = Outcome::Fail;
            break;
        }
    }

    rec.outcome = outcome;
    if (outcome != Outcome::Del) rec.del_reason.clear();
    rec.energy_wh = scenario.initial_budget - st.budget;
    rec.margin_wh = std::max(st.budget, 0.0);
    rec.time_s = st.t_sim;
    rec.steps = st.steps;
    rec.path = st.path;
    rec.max_turn_deg = executed_max_turn(scenario, st.path);
    return rec;
}

}  // namespace bersim
