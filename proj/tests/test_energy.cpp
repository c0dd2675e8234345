#include <doctest.h>

#include <cmath>

#include "bersim/energy.hpp"
#include "bersim/rng.hpp"

using namespace bersim;

namespace {
constexpr double kPi = 3.14159265358979323846;

EnergyParams default_params() { return {}; }  // mass 5, D 6 N, P_c 10, c_T 6
}  // namespace

TEST_CASE("required thrust") {
    EnergyParams p = default_params();
    CHECK(required_thrust(p, 0.0, 15) == doctest::Approx(6.0));

    // Steep descent clamps at zero instead of crediting recovered energy.
    CHECK(required_thrust(p, -30.0 * kPi / 180, 15) == 0.0);

    EnergyParams para = p;
    para.drag = ParabolicDrag{1.225, 1.0, 0.2};
    // Hand evaluation of 0.5 * rho * C_d * A * V^2 at V = 10.
    CHECK(required_thrust(para, 0.0, 10) == doctest::Approx(12.25));
}

TEST_CASE("power draw") {
    EnergyParams p = default_params();
    CHECK(power_draw(p, 0, 15) == doctest::Approx(10.0));            // avionics floor
    CHECK(power_draw(p, 20, 15) == doctest::Approx(60.0));           // 10 + 20*15/6
    CHECK(power_draw(p, 8, 15) - p.avionics_power ==
          doctest::Approx(2 * (power_draw(p, 4, 15) - p.avionics_power)));  // linear in T
}

TEST_CASE("edge energy worked chain") {
    EnergyParams p = default_params();
    KinematicLimits limits;  // V_A 15

    SUBCASE("calm 300 m leg: 25 W for 20 s") {
        const auto t = edge_energy(300, {1, 0, 0}, WindVector::calm(), limits, p);
        REQUIRE(t.ok());
        CHECK(t.time == doctest::Approx(20.0));
        CHECK(t.energy == doctest::Approx(500.0 / 3600.0).epsilon(1e-12));
    }
    SUBCASE("5 m/s headwind raises energy") {
        const auto t = edge_energy(300, {1, 0, 0}, Vec3{-5, 0, 0}, limits, p);
        REQUIRE(t.ok());
        CHECK(t.time == doctest::Approx(30.0));
        CHECK(t.energy == doctest::Approx(750.0 / 3600.0).epsilon(1e-12));
    }
    SUBCASE("16 m/s crosswind propagates infeasibility") {
        const auto t = edge_energy(300, {1, 0, 0}, Vec3{0, 16, 0}, limits, p);
        CHECK(t.feasibility == Feasibility::CrosswindExceeds);
        CHECK(t.energy == 0.0);
    }
}

TEST_CASE("edge energy invariants") {
    EnergyParams p = default_params();
    KinematicLimits limits;

    SUBCASE("strictly increasing in headwind") {
        double prev = 0;
        for (double w = 0; w < 14.5; w += 0.5) {
            const auto t = edge_energy(1000, {1, 0, 0}, Vec3{-w, 0, 0}, limits, p);
            REQUIRE(t.ok());
            CHECK(t.energy > prev);
            prev = t.energy;
        }
    }

    SUBCASE("avionics floor") {
        Rng rng(17);
        for (int i = 0; i < 2000; ++i) {
            const double az = rng.uniform(0, kTwoPi);
            const Vec3 dir{std::cos(az), std::sin(az), 0};
            const auto t = edge_energy(rng.uniform(10, 5000), dir,
                                       Vec3{rng.uniform(-9, 9), rng.uniform(-9, 9), 0}, limits, p);
            REQUIRE(t.ok());
            CHECK(t.energy >= p.avionics_power * t.time / 3600.0 - 1e-12);
        }
    }

    SUBCASE("descent clamp leaves avionics only") {
        // gamma below -asin(D/mg): thrust zero, so E = P_c * t.
        const double gamma = -std::asin(6.0 / (5 * 9.81)) - 0.02;
        KinematicLimits wide = limits;
        wide.gamma_min = -0.5;
        const Vec3 dir{std::cos(gamma), 0, std::sin(gamma)};
        const auto t = edge_energy(500, dir, WindVector::calm(), wide, p);
        REQUIRE(t.ok());
        CHECK(t.energy == doctest::Approx(p.avionics_power * t.time / 3600.0).epsilon(1e-12));
    }

    SUBCASE("doubling length doubles time and energy exactly") {
        Rng rng(23);
        for (int i = 0; i < 200; ++i) {
            const double len = rng.uniform(1, 10000);
            const Vec3 wind{rng.uniform(-9, 9), rng.uniform(-9, 9), 0};
            const auto a = edge_energy(len, {1, 0, 0}, wind, limits, p);
            const auto b = edge_energy(2 * len, {1, 0, 0}, wind, limits, p);
            REQUIRE(a.ok());
            CHECK(b.time == 2 * a.time);
            CHECK(b.energy == 2 * a.energy);
        }
    }
}

TEST_CASE("energy per distance curve") {
    EnergyParams p;
    p.drag = ParabolicDrag{};
    p.avionics_power = 30;

    std::vector<SpeedCurveCase> cases;
    for (double payload : {0.0, 8.0}) {
        const std::string tag = payload == 0 ? "p0" : "p8";
        cases.push_back({"head_" + tag, {5, kPi, 0}, payload});
        cases.push_back({"calm_" + tag, WindVector::calm(), payload});
        cases.push_back({"tail_" + tag, {5, 0, 0}, payload});
    }
    std::vector<double> grid;
    for (double v = 6; v <= 25; v += 1) grid.push_back(v);

    const double climb = 3.0 * kPi / 180;
    const auto rows = energy_per_distance_curve(p, cases, grid, climb);
    REQUIRE(rows.size() == cases.size() * grid.size());

    auto curve = [&](const std::string& label) {
        std::vector<double> out;
        for (const auto& r : rows)
            if (r.label == label) {
                REQUIRE(r.feasible);
                out.push_back(r.wh_per_km);
            }
        return out;
    };

    SUBCASE("headwind above calm above tailwind, pointwise") {
        for (const char* tag : {"p0", "p8"}) {
            const auto head = curve(std::string("head_") + tag);
            const auto calm = curve(std::string("calm_") + tag);
            const auto tail = curve(std::string("tail_") + tag);
            for (std::size_t i = 0; i < grid.size(); ++i) {
                CHECK(head[i] > calm[i]);
                CHECK(calm[i] > tail[i]);
            }
        }
    }

    SUBCASE("interior minimizer on every curve") {
        for (const auto& c : cases) {
            const auto ys = curve(c.label);
            const auto it = std::min_element(ys.begin(), ys.end());
            const std::size_t idx = it - ys.begin();
            CHECK(idx > 0);
            CHECK(idx + 1 < ys.size());
        }
    }

    SUBCASE("payload separates the climbing curves") {
        const auto light = curve("calm_p0");
        const auto heavy = curve("calm_p8");
        // Oracle: with gamma > 0 the trim term adds (dm) * g * sin(gamma)
        // * V / c_T to power, so the heavy curve sits strictly above.
        for (std::size_t i = 0; i < grid.size(); ++i) CHECK(heavy[i] > light[i]);

        // Level flight with parabolic drag: the curves coincide.
        const auto level = energy_per_distance_curve(p, cases, grid, 0.0);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto& l0 = level[1 * grid.size() + i];  // calm_p0
            const auto& l8 = level[4 * grid.size() + i];  // calm_p8
            CHECK(l0.wh_per_km == doctest::Approx(l8.wh_per_km).epsilon(1e-12));
        }
    }
}
