#pragma once

#include <cstdint>
#include <iosfwd>
#include <variant>
#include <vector>

#include "bersim/geom.hpp"
#include "bersim/rng.hpp"

namespace bersim {

/// Horizontal wind in polar form plus an optional vertical component.
/// speed >= 0, direction in [0, 2*pi); direction is where the air mass moves
/// toward, measured in the ground plane.
struct WindVector {
    double speed = 0;
    double direction = 0;
    double vertical = 0;

    Vec3 cartesian() const {
        return {speed * std::cos(direction), speed * std::sin(direction), vertical};
    }

    static WindVector from_cartesian(const Vec3& v) {
        WindVector w;
        w.speed = v.horizontal_norm();
        w.direction = w.speed > 0 ? wrap_angle(std::atan2(v.y, v.x)) : 0.0;
        w.vertical = v.z;
        return w;
    }

    static WindVector calm() { return {}; }
};

/// One of K angular sectors crossed with a magnitude rung.
struct WindClass {
    int index = 0;
    int k = 4;
    int magnitude_level = 0;

    bool operator==(const WindClass&) const = default;
};

/// Maps continuous wind onto K direction sectors (K = 4 or 8) and a
/// strictly increasing magnitude ladder. Sector i is centered on direction
/// 2*pi*i/K and spans [center - pi/K, center + pi/K), so the sectors tile
/// [0, 2*pi) exactly and classify/representative are mutually consistent.
struct WindDiscretization {
    int k = 4;
    std::vector<double> ladder = {0, 3, 6, 9};

    WindClass classify(const WindVector& w) const;
    WindVector representative(const WindClass& c) const;
    double max_magnitude() const { return ladder.back(); }
};

struct KinematicLimits {
    double airspeed = 15.0;           // constant |V_A|, m/s
    double gamma_min = -0.2617993878; // -15 deg
    double gamma_max = 0.2617993878;  // +15 deg
    double kappa_max = 0.2;           // 1/m, turning-radius bound
};

enum class Feasibility {
    Feasible,
    CrosswindExceeds,        // |W_perp| > V_A: no real tangential airspeed
    NonpositiveGroundSpeed,  // V_G <= 0: path direction unreachable
    FlightPathAngleExceeded, // air-relative climb angle outside limits
};

const char* to_string(Feasibility f);

/// Decomposition of the wind triangle V_G = V_A + W along a path direction.
/// w_perp is the magnitude of the cross-path wind component (>= 0).
struct TriangleSolution {
    double va_par = 0;       // tangential airspeed component, m/s
    double w_par = 0;        // tangential wind component (signed), m/s
    double w_perp = 0;       // cross-path wind magnitude, m/s
    double ground_speed = 0; // m/s
    double gamma_air = 0;    // air-relative flight-path angle, rad
    Feasibility feasibility = Feasibility::Feasible;

    bool ok() const { return feasibility == Feasibility::Feasible; }
};

/// Solve the wind triangle for a unit path direction under constant airspeed.
/// The cartesian overload is the core; it keeps axis-aligned inputs exact.
TriangleSolution solve_wind_triangle(const Vec3& path_dir, const KinematicLimits& limits,
                                     const Vec3& wind);
TriangleSolution solve_wind_triangle(const Vec3& path_dir, const KinematicLimits& limits,
                                     const WindVector& wind);

/// Replayed wind log: zero-order hold between rows, first row before the log
/// starts. Rows strictly increasing in t.
struct LogReplay {
    struct Row {
        double t = 0;
        WindVector wind;
    };
    std::vector<Row> rows;
};

/// Markov chain over the K direction classes, one transition per dwell
/// window, each class carrying a fixed magnitude.
struct MarkovWind {
    int k = 4;
    std::vector<double> transition; // k*k row-major, rows sum to 1
    std::vector<double> magnitudes; // per-class speed, m/s
    double dwell = 300;             // seconds per window
    int initial_class = 0;

    WindVector class_wind(int cls) const {
        return {magnitudes[cls], wrap_angle(kTwoPi * cls / k), 0};
    }
};

/// A temporal wind process. Queries are pure: the same (t, stream_seed)
/// always yields the same wind, so trials can share processes freely.
struct WindProcess {
    std::variant<LogReplay, MarkovWind> model = LogReplay{};

    /// Wind at time t. Markov variants derive the class sequence from the
    /// seeded stream, consuming exactly one draw per elapsed dwell window.
    WindVector at(double t, std::uint64_t stream_seed) const;

    bool is_markov() const { return std::holds_alternative<MarkovWind>(model); }
    const MarkovWind* markov() const { return std::get_if<MarkovWind>(&model); }
    const LogReplay* log() const { return std::get_if<LogReplay>(&model); }

    void validate() const; // throws ConfigError on bad structure
};

/// Incremental sampler for monotonically non-decreasing query times.
/// Equivalent to WindProcess::at for every t but amortizes the Markov walk.
class WindCursor {
  public:
    WindCursor(const WindProcess& process, std::uint64_t stream_seed);
    WindVector at(double t);

    /// First time strictly after t at which the process can change value
    /// (next dwell-window boundary or log row); +inf when it never does.
    double next_change_after(double t) const;

  private:
    const WindProcess* process_;
    Rng rng_;
    long window_ = 0;
    int cls_ = 0;
};

/// Exponentially smoothed wind estimate, blended in cartesian form.
/// alpha = 1 keeps only the latest observation; alpha = 0 never updates.
struct WindEstimate {
    WindVector vector;
    double last_update = 0;
    double alpha = 0.5;
};

WindEstimate update_estimate(const WindEstimate& prev, const WindVector& observed, double t);

/// Parse `t_sec,wind_speed_mps,wind_dir_rad[,wind_vert_mps]` rows.
/// Rejects NaN, negative speeds, and non-increasing timestamps.
LogReplay load_wind_log(std::istream& in);

}  // namespace bersim
