#include "bersim/wind.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>
#include <string>

#include "bersim/error.hpp"

namespace bersim {

const char* to_string(Feasibility f) {
    switch (f) {
        case Feasibility::Feasible: return "feasible";
        case Feasibility::CrosswindExceeds: return "crosswind_exceeds";
        case Feasibility::NonpositiveGroundSpeed: return "nonpositive_ground_speed";
        case Feasibility::FlightPathAngleExceeded: return "flight_path_angle_exceeded";
    }
    return "?";
}

WindClass WindDiscretization::classify(const WindVector& w) const {
    const double sector_width = kTwoPi / k;
    // Shift by half a sector so sector 0 straddles direction 0.
    double shifted = wrap_angle(w.direction + sector_width / 2);
    int index = static_cast<int>(shifted / sector_width);
    if (index >= k) index = 0; // wrap_angle can return values a hair below 2*pi

    int level = 0;
    double best = std::abs(w.speed - ladder[0]);
    for (std::size_t i = 1; i < ladder.size(); ++i) {
        double d = std::abs(w.speed - ladder[i]);
        if (d < best) { // ties keep the lower rung
            best = d;
            level = static_cast<int>(i);
        }
    }
    return {index, k, level};
}

WindVector WindDiscretization::representative(const WindClass& c) const {
    return {ladder[c.magnitude_level], wrap_angle(kTwoPi * c.index / k), 0};
}

TriangleSolution solve_wind_triangle(const Vec3& path_dir, const KinematicLimits& limits,
                                     const Vec3& wind) {
    TriangleSolution s;
    const double va = limits.airspeed;
    s.w_par = wind.dot(path_dir);
    double perp_sq = wind.norm_sq() - s.w_par * s.w_par;
    if (perp_sq < 0) perp_sq = 0;
    s.w_perp = std::sqrt(perp_sq);

    if (perp_sq > va * va) {
        s.feasibility = Feasibility::CrosswindExceeds;
        return s;
    }
    s.va_par = std::sqrt(va * va - perp_sq);
    s.ground_speed = s.va_par + s.w_par;
    if (s.ground_speed <= 0) {
        s.feasibility = Feasibility::NonpositiveGroundSpeed;
        return s;
    }
    // Air velocity is V_G*u - W; its vertical component fixes gamma_air.
    const double vz_air = s.ground_speed * path_dir.z - wind.z;
    double ratio = vz_air / va;
    ratio = std::clamp(ratio, -1.0, 1.0);
    s.gamma_air = std::asin(ratio);
    if (s.gamma_air < limits.gamma_min || s.gamma_air > limits.gamma_max) {
        s.feasibility = Feasibility::FlightPathAngleExceeded;
        return s;
    }
    s.feasibility = Feasibility::Feasible;
    return s;
}

TriangleSolution solve_wind_triangle(const Vec3& path_dir, const KinematicLimits& limits,
                                     const WindVector& wind) {
    return solve_wind_triangle(path_dir, limits, wind.cartesian());
}

void WindProcess::validate() const {
    if (const auto* lr = log()) {
        if (lr->rows.empty()) throw ConfigError("wind log is empty");
        for (std::size_t i = 0; i + 1 < lr->rows.size(); ++i)
            if (!(lr->rows[i].t < lr->rows[i + 1].t))
                throw ConfigError("wind log timestamps must be strictly increasing");
        for (const auto& row : lr->rows)
            if (!(row.wind.speed >= 0) || !std::isfinite(row.wind.speed))
                throw ConfigError("wind log speed must be finite and non-negative");
    } else if (const auto* mk = markov()) {
        if (mk->k <= 0) throw ConfigError("markov wind needs k > 0");
        if (!(mk->dwell > 0)) throw ConfigError("markov dwell must be positive");
        if (mk->transition.size() != static_cast<std::size_t>(mk->k) * mk->k)
            throw ConfigError("markov transition matrix must be k*k");
        if (mk->magnitudes.size() != static_cast<std::size_t>(mk->k))
            throw ConfigError("markov magnitudes must list one speed per class");
        if (mk->initial_class < 0 || mk->initial_class >= mk->k)
            throw ConfigError("markov initial class out of range");
        for (int r = 0; r < mk->k; ++r) {
            double sum = 0;
            for (int c = 0; c < mk->k; ++c) {
                double p = mk->transition[r * mk->k + c];
                if (p < 0) throw ConfigError("markov transition entries must be non-negative");
                sum += p;
            }
            if (std::abs(sum - 1.0) > 1e-9)
                throw ConfigError("markov transition rows must sum to 1");
        }
    }
}

WindVector WindProcess::at(double t, std::uint64_t stream_seed) const {
    WindCursor cursor(*this, stream_seed);
    return cursor.at(t);
}

WindCursor::WindCursor(const WindProcess& process, std::uint64_t stream_seed)
    : process_(&process), rng_(stream_seed) {
    if (const auto* mk = process.markov()) cls_ = mk->initial_class;
}

double WindCursor::next_change_after(double t) const {
    if (const auto* lr = process_->log()) {
        const auto& rows = lr->rows;
        auto it = std::upper_bound(rows.begin(), rows.end(), t,
                                   [](double v, const LogReplay::Row& r) { return v < r.t; });
        return it == rows.end() ? std::numeric_limits<double>::infinity() : it->t;
    }
    const double dwell = process_->markov()->dwell;
    return dwell * (std::floor(t / dwell) + 1.0);
}

WindVector WindCursor::at(double t) {
    if (const auto* lr = process_->log()) {
        const auto& rows = lr->rows;
        // Latest row with row.t <= t; first row if t precedes the log.
        auto it = std::upper_bound(rows.begin(), rows.end(), t,
                                   [](double v, const LogReplay::Row& r) { return v < r.t; });
        if (it == rows.begin()) return rows.front().wind;
        return std::prev(it)->wind;
    }
    const auto& mk = *process_->markov();
    const long window = static_cast<long>(std::floor(t / mk.dwell));
    while (window_ < window) {
        std::span<const double> row(mk.transition.data() + static_cast<std::size_t>(cls_) * mk.k,
                                    static_cast<std::size_t>(mk.k));
        cls_ = rng_.pick_weighted(row);
        ++window_;
    }
    return mk.class_wind(cls_);
}

WindEstimate update_estimate(const WindEstimate& prev, const WindVector& observed, double t) {
    WindEstimate next = prev;
    const Vec3 blended = prev.alpha * observed.cartesian() + (1.0 - prev.alpha) * prev.vector.cartesian();
    next.vector = WindVector::from_cartesian(blended);
    next.last_update = t;
    return next;
}

LogReplay load_wind_log(std::istream& in) {
    LogReplay log;
    std::string line;
    bool header_seen = false;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (!header_seen) {
            if (line.rfind("t_sec,wind_speed_mps,wind_dir_rad", 0) != 0)
                throw ConfigError("wind log: unexpected header '" + line + "'");
            header_seen = true;
            continue;
        }
        std::istringstream row(line);
        std::string field;
        std::vector<double> vals;
        while (std::getline(row, field, ',')) {
            try {
                vals.push_back(std::stod(field));
            } catch (const std::exception&) {
                throw ConfigError("wind log line " + std::to_string(line_no) + ": bad number '" + field + "'");
            }
        }
        if (vals.size() != 3 && vals.size() != 4)
            throw ConfigError("wind log line " + std::to_string(line_no) + ": expected 3 or 4 fields");
        for (double v : vals)
            if (std::isnan(v))
                throw ConfigError("wind log line " + std::to_string(line_no) + ": NaN value");
        if (vals[1] < 0)
            throw ConfigError("wind log line " + std::to_string(line_no) + ": negative wind speed");
        LogReplay::Row r;
        r.t = vals[0];
        r.wind = {vals[1], wrap_angle(vals[2]), vals.size() == 4 ? vals[3] : 0.0};
        if (!log.rows.empty() && !(r.t > log.rows.back().t))
            throw ConfigError("wind log line " + std::to_string(line_no) + ": timestamps must strictly increase");
        log.rows.push_back(r);
    }
    if (!header_seen) throw ConfigError("wind log: missing header");
    if (log.rows.empty()) throw ConfigError("wind log: no rows");
    return log;
}

}  // namespace bersim
