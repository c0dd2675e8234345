#include "bersim/dubins.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>

namespace bersim {

namespace {

constexpr double kPi = 3.14159265358979323846;

double mod2pi(double a) {
    double m = std::fmod(a, kTwoPi);
    if (m < 0) m += kTwoPi;
    return m;
}

enum SegKind { kLeft, kStraight, kRight };

constexpr SegKind kWordSegments[6][3] = {
    {kLeft, kStraight, kLeft},   // LSL
    {kRight, kStraight, kRight}, // RSR
    {kLeft, kStraight, kRight},  // LSR
    {kRight, kStraight, kLeft},  // RSL
    {kRight, kLeft, kRight},     // RLR
    {kLeft, kRight, kLeft},      // LRL
};

struct WordParams {
    bool valid = false;
    double t = 0, p = 0, q = 0;
    double total() const { return t + p + q; }
};

// Normalized-coordinate solutions (Shkel & Lumelsky parameterization):
// d is the pose distance over the radius, alpha/beta the headings relative
// to the connecting line.
WordParams lsl(double d, double alpha, double beta) {
    const double sa = std::sin(alpha), sb = std::sin(beta);
    const double ca = std::cos(alpha), cb = std::cos(beta);
    const double c_ab = std::cos(alpha - beta);
    const double p_sq = 2 + d * d - 2 * c_ab + 2 * d * (sa - sb);
    if (p_sq < 0) return {};
    const double tmp = std::atan2(cb - ca, d + sa - sb);
    return {true, mod2pi(-alpha + tmp), std::sqrt(p_sq), mod2pi(beta - tmp)};
}

WordParams rsr(double d, double alpha, double beta) {
    const double sa = std::sin(alpha), sb = std::sin(beta);
    const double ca = std::cos(alpha), cb = std::cos(beta);
    const double c_ab = std::cos(alpha - beta);
    const double p_sq = 2 + d * d - 2 * c_ab + 2 * d * (sb - sa);
    if (p_sq < 0) return {};
    const double tmp = std::atan2(ca - cb, d - sa + sb);
    return {true, mod2pi(alpha - tmp), std::sqrt(p_sq), mod2pi(-beta + tmp)};
}

WordParams lsr(double d, double alpha, double beta) {
    const double sa = std::sin(alpha), sb = std::sin(beta);
    const double ca = std::cos(alpha), cb = std::cos(beta);
    const double c_ab = std::cos(alpha - beta);
    const double p_sq = -2 + d * d + 2 * c_ab + 2 * d * (sa + sb);
    if (p_sq < 0) return {};
    const double p = std::sqrt(p_sq);
    const double tmp = std::atan2(-ca - cb, d + sa + sb) - std::atan2(-2.0, p);
    return {true, mod2pi(-alpha + tmp), p, mod2pi(-mod2pi(beta) + tmp)};
}

WordParams rsl(double d, double alpha, double beta) {
    const double sa = std::sin(alpha), sb = std::sin(beta);
    const double ca = std::cos(alpha), cb = std::cos(beta);
    const double c_ab = std::cos(alpha - beta);
    const double p_sq = d * d - 2 + 2 * c_ab - 2 * d * (sa + sb);
    if (p_sq < 0) return {};
    const double p = std::sqrt(p_sq);
    const double tmp = std::atan2(ca + cb, d - sa - sb) - std::atan2(2.0, p);
    return {true, mod2pi(alpha - tmp), p, mod2pi(beta - tmp)};
}

WordParams rlr(double d, double alpha, double beta) {
    const double sa = std::sin(alpha), sb = std::sin(beta);
    const double ca = std::cos(alpha), cb = std::cos(beta);
    const double c_ab = std::cos(alpha - beta);
    const double tmp = (6.0 - d * d + 2 * c_ab + 2 * d * (sa - sb)) / 8.0;
    if (std::abs(tmp) > 1) return {};
    const double p = mod2pi(kTwoPi - std::acos(tmp));
    const double t = mod2pi(alpha - std::atan2(ca - cb, d - sa + sb) + mod2pi(p / 2));
    return {true, t, p, mod2pi(alpha - beta - t + mod2pi(p))};
}

WordParams lrl(double d, double alpha, double beta) {
    const double sa = std::sin(alpha), sb = std::sin(beta);
    const double ca = std::cos(alpha), cb = std::cos(beta);
    const double c_ab = std::cos(alpha - beta);
    const double tmp = (6.0 - d * d + 2 * c_ab + 2 * d * (sb - sa)) / 8.0;
    if (std::abs(tmp) > 1) return {};
    const double p = mod2pi(kTwoPi - std::acos(tmp));
    const double t = mod2pi(-alpha - std::atan2(ca - cb, d + sa - sb) + p / 2);
    return {true, t, p, mod2pi(mod2pi(beta) - alpha - t + mod2pi(p))};
}

Pose advance(const Pose& from, SegKind kind, double extent, double radius) {
    Pose out = from;
    switch (kind) {
        case kStraight:
            out.x += extent * radius * std::cos(from.heading);
            out.y += extent * radius * std::sin(from.heading);
            break;
        case kLeft:
            out.x += radius * (std::sin(from.heading + extent) - std::sin(from.heading));
            out.y += radius * (-std::cos(from.heading + extent) + std::cos(from.heading));
            out.heading = mod2pi(from.heading + extent);
            break;
        case kRight:
            out.x += radius * (-std::sin(from.heading - extent) + std::sin(from.heading));
            out.y += radius * (std::cos(from.heading - extent) - std::cos(from.heading));
            out.heading = mod2pi(from.heading - extent);
            break;
    }
    return out;
}

}  // namespace

const char* to_string(DubinsWord w) {
    switch (w) {
        case DubinsWord::LSL: return "LSL";
        case DubinsWord::RSR: return "RSR";
        case DubinsWord::LSR: return "LSR";
        case DubinsWord::RSL: return "RSL";
        case DubinsWord::RLR: return "RLR";
        case DubinsWord::LRL: return "LRL";
    }
    return "?";
}

DubinsPath dubins_shortest(const Pose& q0, const Pose& q1, double radius) {
    const double dx = q1.x - q0.x;
    const double dy = q1.y - q0.y;
    const double d = std::hypot(dx, dy) / radius;
    const double theta = std::atan2(dy, dx);
    const double alpha = mod2pi(q0.heading - theta);
    const double beta = mod2pi(q1.heading - theta);

    const std::array<WordParams, 6> candidates = {
        lsl(d, alpha, beta), rsr(d, alpha, beta), lsr(d, alpha, beta),
        rsl(d, alpha, beta), rlr(d, alpha, beta), lrl(d, alpha, beta),
    };

    int best = -1;
    double best_total = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 6; ++i) {
        if (!candidates[i].valid) continue;
        if (candidates[i].total() < best_total) {
            best_total = candidates[i].total();
            best = i;
        }
    }
    if (best < 0) {  // unreachable for valid inputs; keep sampling safe
        DubinsPath chord;
        chord.radius = radius;
        chord.origin = q0;
        chord.seg[1] = d;
        chord.total_length = d * radius;
        return chord;
    }

    DubinsPath path;
    path.word = static_cast<DubinsWord>(best);
    path.radius = radius;
    path.origin = q0;
    path.seg[0] = candidates[best].t;
    path.seg[1] = candidates[best].p;
    path.seg[2] = candidates[best].q;
    path.total_length = best_total * radius;
    double max_arc = 0;
    for (int i = 0; i < 3; ++i)
        if (kWordSegments[best][i] != kStraight) max_arc = std::max(max_arc, path.seg[i]);
    path.max_arc_turn_deg = max_arc * 180.0 / kPi;
    return path;
}

Pose dubins_sample(const DubinsPath& path, double s) {
    double remaining = std::clamp(s / path.radius, 0.0, path.seg[0] + path.seg[1] + path.seg[2]);
    Pose pose = path.origin;
    const SegKind* kinds = kWordSegments[static_cast<int>(path.word)];
    for (int i = 0; i < 3; ++i) {
        const double extent = std::min(remaining, path.seg[i]);
        pose = advance(pose, kinds[i], extent, path.radius);
        remaining -= extent;
        if (remaining <= 0) break;
    }
    return pose;
}

bool collision_free(const DubinsPath& path, std::span<const Obstacle> obstacles, double step,
                    double clearance) {
    if (obstacles.empty()) return true;
    const int samples = std::max(1, static_cast<int>(std::ceil(path.total_length / step)));
    for (int i = 0; i <= samples; ++i) {
        const Pose p = dubins_sample(path, path.total_length * i / samples);
        for (const Obstacle& o : obstacles) {
            const double guard = o.radius + clearance;
            const double dx = p.x - o.x;
            const double dy = p.y - o.y;
            if (dx * dx + dy * dy <= guard * guard) return false;
        }
    }
    return true;
}

namespace {

double bisector_heading(const Vec3& in_dir, const Vec3& out_dir) {
    const double sx = in_dir.x + out_dir.x;
    const double sy = in_dir.y + out_dir.y;
    if (std::hypot(sx, sy) < 1e-12) return mod2pi(std::atan2(in_dir.y, in_dir.x));
    return mod2pi(std::atan2(sy, sx));
}

}  // namespace

RouteRefinement refine_route(std::span<const Vec3> waypoints, double radius,
                             std::span<const Obstacle> obstacles, double step, double clearance) {
    RouteRefinement out;
    const std::size_t n = waypoints.size();
    if (n < 2) return out;

    std::vector<Vec3> leg_dir(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        Vec3 d = waypoints[i + 1] - waypoints[i];
        d.z = 0;
        const double len = d.norm();
        leg_dir[i] = len > 0 ? d / len : Vec3{1, 0, 0};
    }

    std::vector<double> heading(n);
    heading[0] = mod2pi(std::atan2(leg_dir[0].y, leg_dir[0].x));
    heading[n - 1] = mod2pi(std::atan2(leg_dir[n - 2].y, leg_dir[n - 2].x));
    for (std::size_t i = 1; i + 1 < n; ++i) heading[i] = bisector_heading(leg_dir[i - 1], leg_dir[i]);

    double longest_arc = 0;  // radians * radius = arc length
    double max_joint_jump = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        RouteSegment seg;
        seg.a = waypoints[i];
        seg.b = waypoints[i + 1];
        const Pose q0{waypoints[i].x, waypoints[i].y, heading[i]};
        const Pose q1{waypoints[i + 1].x, waypoints[i + 1].y, heading[i + 1]};
        seg.path = dubins_shortest(q0, q1, radius);
        if (!collision_free(seg.path, obstacles, step, clearance)) {
            seg.blocked = true;
            out.blocked.push_back(static_cast<int>(i));
            const double chord = std::hypot(q1.x - q0.x, q1.y - q0.y);
            out.total_length += chord;
            // Heading discontinuities where the chord meets its neighbors.
            const double chord_heading = mod2pi(std::atan2(q1.y - q0.y, q1.x - q0.x));
            for (double jump : {std::abs(std::remainder(chord_heading - q0.heading, kTwoPi)),
                                std::abs(std::remainder(q1.heading - chord_heading, kTwoPi))})
                max_joint_jump = std::max(max_joint_jump, jump);
        } else {
            out.total_length += seg.path.total_length;
            out.max_arc_turn_deg = std::max(out.max_arc_turn_deg, seg.path.max_arc_turn_deg);
            const SegKind* kinds = kWordSegments[static_cast<int>(seg.path.word)];
            for (int k = 0; k < 3; ++k)
                if (kinds[k] != kStraight) longest_arc = std::max(longest_arc, seg.path.seg[k] * radius);
        }
        out.segments.push_back(std::move(seg));
    }

    // Curvature is bounded by 1/radius along every smooth stretch, so the
    // per-step heading change is min(step, longest arc)/radius; chord joints
    // add their instantaneous jumps.
    const double smooth_turn = std::min(step, longest_arc) / radius;
    out.max_step_turn_deg = std::max(smooth_turn, max_joint_jump) * 180.0 / kPi;
    return out;
}

double polyline_max_turn_deg(std::span<const Vec3> waypoints) {
    double worst = 0;
    for (std::size_t i = 1; i + 1 < waypoints.size(); ++i) {
        Vec3 a = waypoints[i] - waypoints[i - 1];
        Vec3 b = waypoints[i + 1] - waypoints[i];
        a.z = b.z = 0;
        if (a.norm() == 0 || b.norm() == 0) continue;
        const double cross = a.x * b.y - a.y * b.x;
        const double dot = a.x * b.x + a.y * b.y;
        worst = std::max(worst, std::abs(std::atan2(cross, dot)));
    }
    return worst * 180.0 / kPi;
}

void export_trajectory(const RouteRefinement& route, double step, std::ostream& out) {
    out << "s_m,x,y,heading_rad\n";
    double s_base = 0;
    for (const RouteSegment& seg : route.segments) {
        if (seg.blocked) {
            const double dx = seg.b.x - seg.a.x;
            const double dy = seg.b.y - seg.a.y;
            const double len = std::hypot(dx, dy);
            const double heading = mod2pi(std::atan2(dy, dx));
            const int samples = std::max(1, static_cast<int>(std::ceil(len / step)));
            for (int i = 0; i <= samples; ++i) {
                const double f = static_cast<double>(i) / samples;
                out << s_base + f * len << ',' << seg.a.x + f * dx << ',' << seg.a.y + f * dy << ','
                    << heading << '\n';
            }
            s_base += len;
        } else {
            const double len = seg.path.total_length;
            const int samples = std::max(1, static_cast<int>(std::ceil(len / step)));
            for (int i = 0; i <= samples; ++i) {
                const double s = len * i / samples;
                const Pose p = dubins_sample(seg.path, s);
                out << s_base + s << ',' << p.x << ',' << p.y << ',' << p.heading << '\n';
            }
            s_base += len;
        }
    }
}

}  // namespace bersim
