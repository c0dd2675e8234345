#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "bersim/geom.hpp"

namespace bersim {

struct Pose {
    double x = 0;
    double y = 0;
    double heading = 0;  // rad, [0, 2*pi)
};

enum class DubinsWord { LSL, RSR, LSR, RSL, RLR, LRL };

const char* to_string(DubinsWord w);

/// Shortest curvature-bounded planar path between two poses. Segment
/// parameters are normalized by the turning radius (arcs are angles,
/// the straight extent is length/R).
struct DubinsPath {
    DubinsWord word = DubinsWord::LSL;
    double seg[3] = {0, 0, 0};
    double radius = 1;
    double total_length = 0;      // m
    double max_arc_turn_deg = 0;  // largest single arc heading change
    Pose origin;                  // q0 anchor for sampling
};

/// Minimum-length path over the six candidate words; ties resolve in word
/// order LSL < RSR < LSR < RSL < RLR < LRL.
DubinsPath dubins_shortest(const Pose& q0, const Pose& q1, double radius);

/// Pose at arc length s in [0, total_length] measured from the origin.
Pose dubins_sample(const DubinsPath& path, double s);

struct Obstacle {
    double x = 0;
    double y = 0;
    double radius = 0;
};

/// True iff every sample at spacing <= step stays strictly outside all
/// obstacle discs inflated by `clearance` (tangency counts as a hit).
bool collision_free(const DubinsPath& path, std::span<const Obstacle> obstacles, double step,
                    double clearance);

/// One leg of a refined route; blocked legs degrade to the straight chord.
struct RouteSegment {
    DubinsPath path;
    bool blocked = false;
    Vec3 a, b;  // waypoint endpoints of this leg
};

struct RouteRefinement {
    std::vector<RouteSegment> segments;
    std::vector<int> blocked;      // indices of blocked legs
    double total_length = 0;       // m
    double max_arc_turn_deg = 0;   // largest single arc over all legs
    double max_step_turn_deg = 0;  // largest heading change per sampling step
};

/// Connect consecutive waypoints with shortest Dubins paths. Headings:
/// first points at the second waypoint, interior ones take the bisector of
/// the adjacent leg directions, the last inherits the final leg direction.
/// Colliding legs are reported in `blocked` and replaced by their chord.
RouteRefinement refine_route(std::span<const Vec3> waypoints, double radius,
                             std::span<const Obstacle> obstacles, double step = 1.0,
                             double clearance = 2.0);

/// Largest corner angle of the raw waypoint polyline, degrees in [0, 180].
double polyline_max_turn_deg(std::span<const Vec3> waypoints);

/// Write `s_m,x,y,heading_rad` samples at the given spacing.
void export_trajectory(const RouteRefinement& route, double step, std::ostream& out);

}  // namespace bersim
