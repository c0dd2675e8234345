#include <doctest.h>

#include <cmath>

#include "bersim/executor.hpp"
#include "bersim/rng.hpp"

using namespace bersim;

namespace {
constexpr double kPi = 3.14159265358979323846;

TimeGraph cross_graph() {
    // Depot in the middle, four customers on the compass points, plus
    // diagonal waypoints so routes exist both ways.
    TimeGraph g;
    g.vertices.push_back({0, {0, 0, 0}, VertexKind::Depot});
    g.vertices.push_back({1, {4000, 0, 0}, VertexKind::Customer});
    g.vertices.push_back({2, {-4000, 0, 0}, VertexKind::Customer});
    g.vertices.push_back({3, {0, 4000, 0}, VertexKind::Customer});
    g.vertices.push_back({4, {0, -4000, 0}, VertexKind::Customer});
    int eid = 0;
    for (int v = 1; v <= 4; ++v) {
        g.edges.push_back({eid++, 0, v, 0, {}});
        g.edges.push_back({eid++, v, 0, 0, {}});
    }
    g.rebuild_derived();
    return g;
}

Scenario fleet_base(TimeGraph g) {
    Scenario sc;
    sc.graph = std::move(g);
    LogReplay calm;
    calm.rows = {{0, WindVector::calm()}};
    sc.processes.push_back(WindProcess{calm});
    sc.planner.planner = PlannerKind::Ber;
    sc.planner.alpha = 1.0;
    sc.planner.worst_wind = 5.0;
    return sc;
}
}  // namespace

TEST_CASE("traverse_edge debits realized wind costs") {
    TimeGraph g;
    g.vertices.push_back({0, {0, 0, 0}, VertexKind::Depot});
    g.vertices.push_back({1, {300, 0, 0}, VertexKind::Waypoint});
    g.edges.push_back({0, 0, 1, 0, {}});
    g.rebuild_derived();
    KinematicLimits limits;
    EnergyParams params;

    SUBCASE("calm crossing matches the hand-evaluated chain") {
        LogReplay calm;
        calm.rows = {{0, WindVector::calm()}};
        WindProcess p{calm};
        WindCursor cursor(p, 1);
        MissionState st;
        st.budget = 10;
        st.path.push_back(0);
        double debit = 0;
        REQUIRE(traverse_edge(st, g.edges[0], cursor, 0.0, limits, params, &debit));
        CHECK(st.t_sim == doctest::Approx(20.0).epsilon(1e-12));
        CHECK(debit == doctest::Approx(500.0 / 3600.0).epsilon(1e-12));
        CHECK(st.budget == doctest::Approx(10 - debit).epsilon(1e-12));
        CHECK(st.vertex == 1);
        CHECK(st.path == std::vector<int>{0, 1});
    }

    SUBCASE("debit equals the planner's prediction when wind holds") {
        LogReplay steady;
        steady.rows = {{0, {4, kPi / 3, 0}}};
        WindProcess p{steady};
        WindCursor cursor(p, 1);
        const double predicted =
            edge_energy(g.edges[0].length, g.edges[0].direction, WindVector{4, kPi / 3, 0}, limits,
                        params)
                .energy;
        MissionState st;
        st.budget = 10;
        double debit = 0;
        REQUIRE(traverse_edge(st, g.edges[0], cursor, 0.0, limits, params, &debit));
        CHECK(debit == doctest::Approx(predicted).epsilon(1e-12));
    }

    SUBCASE("mid-edge shift splits the crossing across wind windows") {
        // 10 s of calm, then a 5 m/s headwind for the rest of the edge.
        LogReplay log;
        log.rows = {{0, WindVector::calm()}, {10, {5, kPi, 0}}};
        WindProcess p{log};
        WindCursor cursor(p, 1);
        MissionState st;
        st.budget = 10;
        double debit = 0;
        REQUIRE(traverse_edge(st, g.edges[0], cursor, 0.0, limits, params, &debit));
        // 150 m at 15 m/s, then 150 m at 10 m/s, all at 25 W.
        CHECK(st.t_sim == doctest::Approx(10.0 + 15.0).epsilon(1e-9));
        CHECK(debit == doctest::Approx(25.0 * 25.0 / 3600.0).epsilon(1e-9));
    }

    SUBCASE("wind turning unflyable mid-edge strands the vehicle") {
        LogReplay log;
        log.rows = {{0, WindVector::calm()}, {10, {16, kPi / 2, 0}}};
        WindProcess p{log};
        WindCursor cursor(p, 1);
        MissionState st;
        st.budget = 10;
        double debit = 0;
        CHECK_FALSE(traverse_edge(st, g.edges[0], cursor, 0.0, limits, params, &debit));
        CHECK(st.vertex == 0);                     // still at the tail
        CHECK(debit == doctest::Approx(250.0 / 3600.0).epsilon(1e-9));  // 10 s spent
        CHECK(st.budget == doctest::Approx(10 - debit).epsilon(1e-12));
    }
}

TEST_CASE("mission accounting closes") {
    const TimeGraph g = generate_er(18, 0.2, {12000, 12000, 0}, 31);
    MarkovWind mk;
    mk.k = 4;
    mk.transition = {0.6, 0.2, 0, 0.2, 0.2, 0.6, 0.2, 0, 0, 0.2, 0.6, 0.2, 0.2, 0, 0.2, 0.6};
    mk.magnitudes = {6, 6, 6, 6};
    mk.dwell = 300;
    Scenario sc;
    sc.graph = g;
    sc.processes.push_back(WindProcess{mk});
    sc.target = 9;
    sc.initial_budget = 30;
    sc.planner.worst_wind = 6.0;
    for (PlannerKind pk : {PlannerKind::Ser, PlannerKind::Rer, PlannerKind::Ger, PlannerKind::Ber}) {
        sc.planner.planner = pk;
        for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
            const MissionRecord rec = run_mission(sc, seed);
            CHECK(std::abs(rec.energy_wh - rec.debit_sum_wh) < 1e-9);
            CHECK(rec.margin_wh >= 0);
        }
    }
}

TEST_CASE("fleet execution") {
    SUBCASE("one drone, one customer, benign wind") {
        FleetScenario fs;
        fs.base = fleet_base(cross_graph());
        fs.customers = {{1, {4000, 0, 0}, 2.0, ServiceKind::DroneCapable}};
        fs.n_drones = 1;
        fs.drone = {8, 15, 100};
        const FleetRecord rec = run_fleet(fs, 77);
        REQUIRE(rec.missions.size() == 1);
        CHECK(rec.missions[0].outcome == Outcome::Suc);
        CHECK(rec.conflicts == 0);
        CHECK(rec.unserved_customers.empty());
    }

    SUBCASE("truck-only customers never launch drones") {
        FleetScenario fs;
        fs.base = fleet_base(cross_graph());
        fs.customers = {{1, {4000, 0, 0}, 2.0, ServiceKind::TruckOnly},
                        {3, {0, 4000, 0}, 2.0, ServiceKind::TruckOnly}};
        fs.n_drones = 2;
        const FleetRecord rec = run_fleet(fs, 77);
        CHECK(rec.missions.empty());
        int serves = 0;
        for (const FleetEvent& ev : rec.timeline)
            if (ev.event == "serve") ++serves;
        CHECK(serves == 2);
    }

    SUBCASE("crossing simultaneous missions register a conflict") {
        FleetScenario fs;
        fs.base = fleet_base(cross_graph());
        // Two customers on opposite sides: both trajectories pass the depot
        // area at the same time on departure.
        fs.customers = {{1, {4000, 0, 0}, 1.0, ServiceKind::DroneCapable},
                        {2, {-4000, 0, 0}, 1.0, ServiceKind::DroneCapable}};
        fs.n_drones = 2;
        fs.d_safe = 120;
        const FleetRecord rec = run_fleet(fs, 5);
        REQUIRE(rec.missions.size() == 2);
        CHECK(rec.conflicts == 1);  // both depart the same vertex together
    }

    SUBCASE("fleet records are deterministic") {
        FleetScenario fs;
        fs.base = fleet_base(cross_graph());
        fs.customers = {{1, {4000, 0, 0}, 1.0, ServiceKind::DroneCapable},
                        {3, {0, 4000, 0}, 9.5, ServiceKind::TruckOnly},
                        {4, {0, -4000, 0}, 1.0, ServiceKind::DroneCapable}};
        fs.n_drones = 1;
        auto serialize = [](const FleetRecord& r) {
            std::string s;
            for (const FleetEvent& ev : r.timeline)
                s += std::to_string(ev.t) + ev.event + ev.vehicle + ev.detail + ";";
            s += std::to_string(r.conflicts);
            for (const auto& m : r.missions) s += to_string(m.outcome);
            return s;
        };
        CHECK(serialize(run_fleet(fs, 9)) == serialize(run_fleet(fs, 9)));
    }
}
