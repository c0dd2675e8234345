#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bersim/error.hpp"
#include "bersim/rng.hpp"
#include "bersim/wind.hpp"

using namespace bersim;

namespace {
constexpr double kPi = 3.14159265358979323846;

KinematicLimits limits_va(double va) {
    KinematicLimits l;
    l.airspeed = va;
    return l;
}
}  // namespace

TEST_CASE("wind vector polar/cartesian round trip") {
    Rng rng(7);
    for (int i = 0; i < 100000; ++i) {
        WindVector w{rng.uniform(0, 20), rng.uniform(0, kTwoPi), rng.uniform(-3, 3)};
        const WindVector back = WindVector::from_cartesian(w.cartesian());
        CHECK(back.speed == doctest::Approx(w.speed).epsilon(1e-9));
        CHECK(std::abs(std::remainder(back.direction - w.direction, kTwoPi)) < 1e-9);
        CHECK(back.vertical == doctest::Approx(w.vertical).epsilon(1e-9));
    }
}

TEST_CASE("wind triangle worked examples are exact") {
    const KinematicLimits limits = limits_va(15);
    const Vec3 east{1, 0, 0};

    SUBCASE("calm identity") {
        const auto s = solve_wind_triangle(east, limits, Vec3{0, 0, 0});
        CHECK(s.ok());
        CHECK(s.ground_speed == 15.0);
    }
    SUBCASE("5 m/s pure headwind") {
        const auto s = solve_wind_triangle(east, limits, Vec3{-5, 0, 0});
        CHECK(s.ok());
        CHECK(s.w_par == -5.0);
        CHECK(s.w_perp == 0.0);
        CHECK(s.va_par == 15.0);
        CHECK(s.ground_speed == 10.0);
    }
    SUBCASE("9 m/s pure crosswind (9-12-15 triple)") {
        const auto s = solve_wind_triangle(east, limits, Vec3{0, 9, 0});
        CHECK(s.ok());
        CHECK(s.va_par == 12.0);
        CHECK(s.ground_speed == 12.0);
    }
    SUBCASE("16 m/s crosswind exceeds airspeed") {
        const auto s = solve_wind_triangle(east, limits, Vec3{0, 16, 0});
        CHECK(s.feasibility == Feasibility::CrosswindExceeds);
    }
    SUBCASE("20 m/s headwind stalls ground speed") {
        const auto s = solve_wind_triangle(east, limits, Vec3{-20, 0, 0});
        CHECK(s.feasibility == Feasibility::NonpositiveGroundSpeed);
    }
    SUBCASE("polar headwind matches cartesian") {
        const auto s = solve_wind_triangle(east, limits, WindVector{5, kPi, 0});
        CHECK(s.ok());
        CHECK(s.ground_speed == 10.0);
    }
}

TEST_CASE("wind triangle randomized properties") {
    Rng rng(11);
    int feasible_count = 0;
    for (int i = 0; i < 100000; ++i) {
        const double az = rng.uniform(0, kTwoPi);
        const double el = rng.uniform(-0.3, 0.3);
        const Vec3 dir{std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
        const double va = rng.uniform(5, 25);
        const Vec3 wind{rng.uniform(-30, 30), rng.uniform(-30, 30), rng.uniform(-5, 5)};
        KinematicLimits limits = limits_va(va);

        const auto s = solve_wind_triangle(dir, limits, wind);

        // Independent vector-algebra oracle for the predicates.
        const double w_par = wind.dot(dir);
        const double w_perp_sq = std::max((wind - w_par * dir).norm_sq(), 0.0);
        if (w_perp_sq > va * va) {
            CHECK(s.feasibility == Feasibility::CrosswindExceeds);
            continue;
        }
        const double vg = std::sqrt(va * va - w_perp_sq) + w_par;
        if (vg <= 0) {
            CHECK(s.feasibility == Feasibility::NonpositiveGroundSpeed);
            continue;
        }
        const double gamma = std::asin(std::clamp((vg * dir.z - wind.z) / va, -1.0, 1.0));
        if (gamma < limits.gamma_min || gamma > limits.gamma_max) {
            CHECK(s.feasibility == Feasibility::FlightPathAngleExceeded);
            continue;
        }
        REQUIRE(s.ok());
        ++feasible_count;
        CHECK(s.va_par * s.va_par + s.w_perp * s.w_perp == doctest::Approx(va * va).epsilon(1e-9));
        const Vec3 air = s.ground_speed * dir - wind;
        CHECK(air.norm() == doctest::Approx(va).epsilon(1e-9));
    }
    CHECK(feasible_count > 10000);
}

TEST_CASE("headwind monotonicity and reversal symmetry") {
    const KinematicLimits limits = limits_va(15);
    const Vec3 east{1, 0, 0};
    double prev = 100;
    for (double w = 0; w < 15; w += 0.25) {
        const auto s = solve_wind_triangle(east, limits, Vec3{-w, 4, 0});
        REQUIRE(s.ok());
        CHECK(s.ground_speed < prev);
        prev = s.ground_speed;
    }

    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        const double az = rng.uniform(0, kTwoPi);
        const Vec3 dir{std::cos(az), std::sin(az), 0};
        const Vec3 wind{rng.uniform(-10, 10), rng.uniform(-10, 10), 0};
        const auto a = solve_wind_triangle(dir, limits, wind);
        const auto b = solve_wind_triangle(-1.0 * dir, limits, -1.0 * wind);
        REQUIRE(a.feasibility == b.feasibility);
        if (a.ok()) CHECK(a.ground_speed == doctest::Approx(b.ground_speed).epsilon(1e-12));
    }
}

TEST_CASE("vertical wind drives the flight-path angle check") {
    KinematicLimits limits = limits_va(15);
    limits.gamma_min = -0.1;
    limits.gamma_max = 0.1;
    // Strong downdraft forces a large air-relative climb angle.
    const auto s = solve_wind_triangle(Vec3{1, 0, 0}, limits, Vec3{0, 0, -4});
    CHECK(s.feasibility == Feasibility::FlightPathAngleExceeded);
    // Mild one stays inside the envelope.
    const auto ok = solve_wind_triangle(Vec3{1, 0, 0}, limits, Vec3{0, 0, -1});
    CHECK(ok.ok());
    CHECK(ok.gamma_air == doctest::Approx(std::asin(1.0 / 15)).epsilon(1e-9));
}

TEST_CASE("classification sectors and representatives") {
    WindDiscretization disc;  // K = 4, ladder {0, 3, 6, 9}

    CHECK(disc.classify({3, 0, 0}).index == 0);
    CHECK(disc.classify({3, kPi, 0}).index == 2);
    CHECK(disc.classify({3, kTwoPi - 0.01, 0}).index == 0);  // wraparound
    CHECK(disc.classify({1.5, 0, 0}).magnitude_level == 0);  // tie goes low

    SUBCASE("sectors tile the circle") {
        Rng rng(5);
        for (int i = 0; i < 100000; ++i) {
            const double dir = rng.uniform(0, kTwoPi);
            int members = 0;
            const double half = kPi / disc.k;
            for (int s = 0; s < disc.k; ++s) {
                const double center = kTwoPi * s / disc.k;
                const double offset = std::remainder(dir - center, kTwoPi);
                if (offset >= -half && offset < half) ++members;
            }
            CHECK(members == 1);
        }
    }

    SUBCASE("representative round trip over all classes") {
        for (int k : {4, 8}) {
            WindDiscretization d;
            d.k = k;
            for (int idx = 0; idx < k; ++idx)
                for (int lvl = 0; lvl < static_cast<int>(d.ladder.size()); ++lvl) {
                    const WindClass c{idx, k, lvl};
                    CHECK(d.classify(d.representative(c)) == c);
                }
        }
    }

    SUBCASE("single-rung ladder examples") {
        WindDiscretization d;
        d.ladder = {3};
        const WindVector r0 = d.representative({0, 4, 0});
        CHECK(r0.speed == 3.0);
        CHECK(r0.direction == 0.0);
        CHECK(d.representative({2, 4, 0}).direction == doctest::Approx(kPi));
    }
}

TEST_CASE("log replay holds the latest row") {
    LogReplay log;
    log.rows = {{0, {5, 0, 0}}, {60, {8, kPi, 0}}};
    WindProcess p{log};
    p.validate();
    CHECK(p.at(30, 1).speed == 5.0);
    CHECK(p.at(60, 1).speed == 8.0);   // boundary takes the new row
    CHECK(p.at(-5, 1).speed == 5.0);   // before the log starts
    CHECK(p.at(1e9, 1).speed == 8.0);  // held forever after
}

TEST_CASE("markov process behavior") {
    SUBCASE("identity transition is absorbing") {
        MarkovWind mk;
        mk.k = 4;
        mk.transition = {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};
        mk.magnitudes = {3, 6, 9, 3};
        mk.dwell = 10;
        mk.initial_class = 2;
        WindProcess p{mk};
        p.validate();
        for (double t : {0.0, 5.0, 10.0, 1234.0, 99999.0}) {
            const WindVector w = p.at(t, 42);
            CHECK(w.speed == 9.0);
            CHECK(w.direction == doctest::Approx(kPi));
        }
    }

    SUBCASE("uniform chain visits classes uniformly") {
        MarkovWind mk;
        mk.k = 4;
        mk.transition.assign(16, 0.25);
        mk.magnitudes = {3, 3, 3, 3};
        mk.dwell = 10;
        mk.initial_class = 0;
        WindProcess p{mk};
        p.validate();
        WindCursor cursor(p, 99);
        int counts[4] = {0, 0, 0, 0};
        const int windows = 100000;
        for (int i = 0; i < windows; ++i) {
            const WindVector w = cursor.at(10.0 * i);
            const int cls = static_cast<int>(std::round(w.direction / (kTwoPi / 4))) % 4;
            ++counts[cls];
        }
        // Oracle: the stationary distribution of the uniform chain is 1/4.
        for (int c = 0; c < 4; ++c)
            CHECK(std::abs(counts[c] / static_cast<double>(windows) - 0.25) < 0.01);
    }

    SUBCASE("cursor matches pure queries") {
        MarkovWind mk;
        mk.k = 4;
        mk.transition = {0.5, 0.25, 0.0, 0.25, 0.25, 0.5, 0.25, 0.0,
                         0.0,  0.25, 0.5, 0.25, 0.25, 0.0,  0.25, 0.5};
        mk.magnitudes = {3, 6, 9, 3};
        mk.dwell = 7;
        WindProcess p{mk};
        p.validate();
        WindCursor cursor(p, 1234);
        for (double t : {0.0, 3.0, 7.0, 21.0, 22.0, 70.0, 700.0}) {
            const WindVector a = cursor.at(t);
            const WindVector b = p.at(t, 1234);
            CHECK(a.speed == b.speed);
            CHECK(a.direction == b.direction);
        }
        CHECK(cursor.next_change_after(0.0) == 7.0);
        CHECK(cursor.next_change_after(7.0) == 14.0);
    }

    SUBCASE("validation rejects broken chains") {
        MarkovWind mk;
        mk.k = 4;
        mk.transition.assign(16, 0.25);
        mk.magnitudes = {3, 3, 3, 3};
        mk.dwell = 0;  // must be positive
        CHECK_THROWS_AS(WindProcess{mk}.validate(), ConfigError);
        mk.dwell = 10;
        mk.transition[0] = 0.5;  // row no longer sums to 1
        CHECK_THROWS_AS(WindProcess{mk}.validate(), ConfigError);
    }
}

TEST_CASE("estimate smoothing") {
    const WindVector prev_w{10, 0, 0};
    SUBCASE("alpha 1 keeps the observation") {
        WindEstimate prev{prev_w, 0, 1.0};
        const auto next = update_estimate(prev, {4, kPi / 2, 0}, 5);
        CHECK(next.vector.speed == doctest::Approx(4));
        CHECK(next.vector.direction == doctest::Approx(kPi / 2));
        CHECK(next.last_update == 5);
    }
    SUBCASE("alpha 0 never updates") {
        WindEstimate prev{prev_w, 0, 0.0};
        const auto next = update_estimate(prev, {4, kPi / 2, 0}, 5);
        CHECK(next.vector.speed == doctest::Approx(10));
        CHECK(next.vector.direction == doctest::Approx(0));
    }
    SUBCASE("alpha 0.5 blends cartesian midpoint") {
        WindEstimate prev{prev_w, 0, 0.5};
        const auto next = update_estimate(prev, WindVector::calm(), 5);
        CHECK(next.vector.speed == doctest::Approx(5));
        CHECK(next.vector.direction == doctest::Approx(0));
    }
}

TEST_CASE("wind log parsing") {
    SUBCASE("accepts 3- and 4-column rows") {
        std::istringstream in(
            "t_sec,wind_speed_mps,wind_dir_rad,wind_vert_mps\n"
            "0,5.0,0.0,0.5\n"
            "60,8.0,3.14159,-0.25\n");
        const LogReplay log = load_wind_log(in);
        REQUIRE(log.rows.size() == 2);
        CHECK(log.rows[0].wind.vertical == 0.5);
        CHECK(log.rows[1].t == 60);

        std::istringstream in3(
            "t_sec,wind_speed_mps,wind_dir_rad\n"
            "0,5.0,0.0\n");
        CHECK(load_wind_log(in3).rows[0].wind.vertical == 0.0);
    }
    SUBCASE("rejects malformed input") {
        auto reject = [](const std::string& body) {
            std::istringstream in(body);
            CHECK_THROWS_AS(load_wind_log(in), ConfigError);
        };
        reject("bad header\n0,5,0\n");
        reject("t_sec,wind_speed_mps,wind_dir_rad\n0,nan,0\n");
        reject("t_sec,wind_speed_mps,wind_dir_rad\n0,-1,0\n");
        reject("t_sec,wind_speed_mps,wind_dir_rad\n10,5,0\n10,6,0\n");
        reject("t_sec,wind_speed_mps,wind_dir_rad\n");
    }
}
