#include <doctest.h>

#include <cmath>
#include <sstream>

#include "bersim/dubins.hpp"
#include "bersim/rng.hpp"

using namespace bersim;

namespace {
constexpr double kPi = 3.14159265358979323846;

double euclid(const Pose& a, const Pose& b) { return std::hypot(b.x - a.x, b.y - a.y); }
}  // namespace

TEST_CASE("collinear aligned poses give a straight path") {
    const DubinsPath p = dubins_shortest({0, 0, 0}, {10, 0, 0}, 2.0);
    CHECK(p.total_length == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(p.max_arc_turn_deg < 1e-6);
    const Pose end = dubins_sample(p, p.total_length);
    CHECK(end.x == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(std::abs(end.y) < 1e-9);
}

TEST_CASE("opposed poses at 2R give a single semicircle") {
    const double R = 3.0;
    const DubinsPath p = dubins_shortest({0, 0, 0}, {0, 2 * R, kPi}, R);
    CHECK(p.total_length == doctest::Approx(kPi * R).epsilon(1e-6));
    CHECK(p.max_arc_turn_deg == doctest::Approx(180.0).epsilon(1e-6));
}

TEST_CASE("length bounds and endpoint accuracy on random pairs") {
    Rng rng(21);
    for (int i = 0; i < 10000; ++i) {
        const Pose q0{rng.uniform(-100, 100), rng.uniform(-100, 100), rng.uniform(0, kTwoPi)};
        const Pose q1{rng.uniform(-100, 100), rng.uniform(-100, 100), rng.uniform(0, kTwoPi)};
        const double R = rng.uniform(0.5, 20);
        const DubinsPath p = dubins_shortest(q0, q1, R);
        CHECK(p.total_length >= euclid(q0, q1) - 1e-9);
        const Pose end = dubins_sample(p, p.total_length);
        CHECK(std::hypot(end.x - q1.x, end.y - q1.y) < 1e-6 * std::max(1.0, p.total_length));
        CHECK(std::abs(std::remainder(end.heading - q1.heading, kTwoPi)) < 1e-6);
    }
}

TEST_CASE("length invariant under rigid transforms") {
    Rng rng(33);
    for (int i = 0; i < 1000; ++i) {
        const Pose q0{rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(0, kTwoPi)};
        const Pose q1{rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(0, kTwoPi)};
        const double R = rng.uniform(1, 10);
        const double base = dubins_shortest(q0, q1, R).total_length;

        const double rot = rng.uniform(0, kTwoPi);
        const double tx = rng.uniform(-500, 500), ty = rng.uniform(-500, 500);
        auto xform = [&](const Pose& q) {
            return Pose{q.x * std::cos(rot) - q.y * std::sin(rot) + tx,
                        q.x * std::sin(rot) + q.y * std::cos(rot) + ty,
                        wrap_angle(q.heading + rot)};
        };
        const double moved = dubins_shortest(xform(q0), xform(q1), R).total_length;
        CHECK(std::abs(moved - base) < 1e-6 * R + 1e-9 * base);
    }
}

TEST_CASE("collision checks") {
    const DubinsPath straight = dubins_shortest({0, 0, 0}, {100, 0, 0}, 5.0);
    SUBCASE("no obstacles is trivially free") {
        CHECK(collision_free(straight, {}, 1.0, 2.0));
    }
    SUBCASE("obstacle on the path blocks it") {
        const Obstacle o{50, 0, 5};
        CHECK_FALSE(collision_free(straight, std::span<const Obstacle>(&o, 1), 1.0, 2.0));
    }
    SUBCASE("tangency at the clearance boundary still blocks") {
        const Obstacle o{50, 7, 5};  // distance 7 == radius 5 + clearance 2
        CHECK_FALSE(collision_free(straight, std::span<const Obstacle>(&o, 1), 0.5, 2.0));
        const Obstacle clear{50, 7.2, 5};
        CHECK(collision_free(straight, std::span<const Obstacle>(&clear, 1), 0.5, 2.0));
    }
}

TEST_CASE("route refinement") {
    SUBCASE("collinear waypoints reduce to the polyline") {
        const std::vector<Vec3> wps = {{0, 0, 0}, {100, 0, 0}, {250, 0, 0}};
        const RouteRefinement r = refine_route(wps, 5.0, {});
        CHECK(r.total_length == doctest::Approx(250.0).epsilon(1e-9));
        CHECK(r.max_arc_turn_deg < 1e-6);
        CHECK(r.blocked.empty());
    }

    SUBCASE("right-angle corner splits across bisector headings") {
        const std::vector<Vec3> wps = {{0, 0, 0}, {100, 0, 0}, {100, 100, 0}};
        const RouteRefinement r = refine_route(wps, 1.0, {});
        // Bisector heading at the corner is 45 degrees, so each leg turns
        // about half the corner; the largest single arc stays near 45.
        CHECK(r.max_arc_turn_deg == doctest::Approx(45.0).epsilon(0.05));
        CHECK(r.total_length >= 200.0 - 1e-9);
        CHECK(r.total_length < 205.0);
        CHECK(polyline_max_turn_deg(wps) == doctest::Approx(90.0).epsilon(1e-9));
    }

    SUBCASE("total length never below the polyline and converges as R shrinks") {
        Rng rng(55);
        std::vector<Vec3> wps;
        for (int i = 0; i < 6; ++i) wps.push_back({rng.uniform(0, 500), rng.uniform(0, 500), 0});
        double polyline = 0;
        for (std::size_t i = 0; i + 1 < wps.size(); ++i) polyline += distance(wps[i], wps[i + 1]);
        double prev_gap = 1e18;
        for (double R : {10.0, 1.0, 0.1}) {
            const RouteRefinement r = refine_route(wps, R, {});
            CHECK(r.total_length >= polyline - 1e-9);
            const double gap = r.total_length - polyline;
            CHECK(gap <= prev_gap + 1e-12);
            prev_gap = gap;
        }
        CHECK(prev_gap < 1.0);  // R = 0.1 is nearly the polyline
    }

    SUBCASE("per-step turn rate is curvature-limited") {
        const std::vector<Vec3> wps = {{0, 0, 0}, {200, 0, 0}, {200, 200, 0}, {0, 200, 0}};
        const RouteRefinement r = refine_route(wps, 5.0, {}, 1.0);
        CHECK(r.max_step_turn_deg == doctest::Approx(1.0 / 5.0 * 180.0 / kPi).epsilon(1e-9));
    }

    SUBCASE("blocked segments degrade to flagged chords") {
        const std::vector<Vec3> wps = {{0, 0, 0}, {100, 0, 0}, {200, 0, 0}};
        const Obstacle o{50, 0, 10};
        const RouteRefinement r = refine_route(wps, 5.0, std::span<const Obstacle>(&o, 1));
        REQUIRE(r.blocked.size() == 1);
        CHECK(r.blocked[0] == 0);
        CHECK(r.segments[0].blocked);
        CHECK_FALSE(r.segments[1].blocked);
        CHECK(r.total_length == doctest::Approx(200.0).epsilon(1e-9));
    }
}

TEST_CASE("trajectory export") {
    const std::vector<Vec3> wps = {{0, 0, 0}, {50, 0, 0}, {50, 50, 0}};
    const RouteRefinement r = refine_route(wps, 2.0, {});
    std::ostringstream out;
    export_trajectory(r, 1.0, out);
    const std::string text = out.str();
    CHECK(text.rfind("s_m,x,y,heading_rad\n", 0) == 0);
    // One sample per meter plus segment endpoints.
    const auto lines = std::count(text.begin(), text.end(), '\n');
    CHECK(lines > 100);
}
