#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bersim/wind.hpp"

namespace bersim {

/// Fixed drag, the routing assumption under constant-airspeed cruise.
struct ConstantDrag {
    double drag_n = 6.0;
};

/// Speed-dependent drag for the cruise-speed sweep, D = 0.5*rho*C_d*A*V^2.
struct ParabolicDrag {
    double rho = 1.225;
    double c_d = 1.0;
    double area = 0.2;
};

struct EnergyParams {
    double mass_base = 5.0;  // kg
    double payload = 0.0;    // kg
    double gravity = 9.81;
    std::variant<ConstantDrag, ParabolicDrag> drag = ConstantDrag{};
    double avionics_power = 10.0;     // P_c, W
    double thrust_power_coeff = 6.0;  // c_T
    double battery_capacity = 100.0;  // Wh

    double total_mass() const { return mass_base + payload; }
    double drag_force(double airspeed) const {
        if (const auto* c = std::get_if<ConstantDrag>(&drag)) return c->drag_n;
        const auto& p = std::get<ParabolicDrag>(drag);
        return 0.5 * p.rho * p.c_d * p.area * airspeed * airspeed;
    }
};

/// T = max(D + m*g*sin(gamma_air), 0). The clamp discards potential-energy
/// recovery on descent, which overestimates (never underestimates) energy.
double required_thrust(const EnergyParams& p, double gamma_air, double airspeed);

/// P = P_c + T*V_A / c_T, with thrust already >= 0.
double power_draw(const EnergyParams& p, double thrust, double airspeed);

/// Traversal result for one segment: time in seconds, energy in Wh.
struct EdgeTraversal {
    double time = 0;
    double energy = 0;
    double ground_speed = 0;
    Feasibility feasibility = Feasibility::Feasible;

    bool ok() const { return feasibility == Feasibility::Feasible; }
};

/// Compose wind triangle and power model over a straight segment.
/// Infeasibility propagates in the result; time/energy stay zero then.
EdgeTraversal edge_energy(double length, const Vec3& path_dir, const Vec3& wind,
                          const KinematicLimits& limits, const EnergyParams& p);
EdgeTraversal edge_energy(double length, const Vec3& path_dir, const WindVector& wind,
                          const KinematicLimits& limits, const EnergyParams& p);

struct SpeedCurveCase {
    std::string label;
    WindVector wind;
    double payload = 0;
};

struct SpeedCurveRow {
    double airspeed = 0;
    std::string label;
    double wh_per_km = 0;
    bool feasible = false;
};

/// Energy-per-distance table over an airspeed grid for each wind/payload
/// case. climb_angle tilts the path so payload shows up in trim thrust;
/// at zero climb with parabolic drag the payload curves coincide.
std::vector<SpeedCurveRow> energy_per_distance_curve(const EnergyParams& base,
                                                     std::span<const SpeedCurveCase> cases,
                                                     std::span<const double> airspeed_grid,
                                                     double climb_angle = 0.0);

}  // namespace bersim
