#include "bersim/energy.hpp"

#include <cmath>

namespace bersim {

double required_thrust(const EnergyParams& p, double gamma_air, double airspeed) {
    const double t = p.drag_force(airspeed) + p.total_mass() * p.gravity * std::sin(gamma_air);
    return t > 0 ? t : 0.0;
}

double power_draw(const EnergyParams& p, double thrust, double airspeed) {
    return p.avionics_power + thrust * airspeed / p.thrust_power_coeff;
}

EdgeTraversal edge_energy(double length, const Vec3& path_dir, const Vec3& wind,
                          const KinematicLimits& limits, const EnergyParams& p) {
    EdgeTraversal out;
    const TriangleSolution tri = solve_wind_triangle(path_dir, limits, wind);
    out.feasibility = tri.feasibility;
    if (!tri.ok()) return out;
    out.ground_speed = tri.ground_speed;
    out.time = length / tri.ground_speed;
    const double thrust = required_thrust(p, tri.gamma_air, limits.airspeed);
    out.energy = power_draw(p, thrust, limits.airspeed) * out.time / 3600.0;
    return out;
}

EdgeTraversal edge_energy(double length, const Vec3& path_dir, const WindVector& wind,
                          const KinematicLimits& limits, const EnergyParams& p) {
    return edge_energy(length, path_dir, wind.cartesian(), limits, p);
}

std::vector<SpeedCurveRow> energy_per_distance_curve(const EnergyParams& base,
                                                     std::span<const SpeedCurveCase> cases,
                                                     std::span<const double> airspeed_grid,
                                                     double climb_angle) {
    std::vector<SpeedCurveRow> table;
    const Vec3 dir{std::cos(climb_angle), 0, std::sin(climb_angle)};
    for (const auto& c : cases) {
        EnergyParams params = base;
        params.payload = c.payload;
        for (double v : airspeed_grid) {
            KinematicLimits limits;
            limits.airspeed = v;
            // The sweep itself should not be clipped by climb-angle limits.
            limits.gamma_min = -1.5;
            limits.gamma_max = 1.5;
            SpeedCurveRow row;
            row.airspeed = v;
            row.label = c.label;
            const EdgeTraversal t = edge_energy(1000.0, dir, c.wind, limits, params);
            row.feasible = t.ok();
            row.wh_per_km = t.ok() ? t.energy : 0.0;
            table.push_back(row);
        }
    }
    return table;
}

}  // namespace bersim
