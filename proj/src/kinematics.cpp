#include "veloq/kinematics.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace veloq::kinematics {

namespace {

double poly(const std::array<double, 4>& c, double tau) {
    return c[0] + tau * (c[1] + tau * (c[2] + tau * c[3]));
}

double dpoly(const std::array<double, 4>& c, double tau) {
    return c[1] + tau * (2.0 * c[2] + tau * 3.0 * c[3]);
}

double d2poly(const std::array<double, 4>& c, double tau) {
    return 2.0 * c[2] + 6.0 * c[3] * tau;
}

constexpr double kContinuityTol = 1e-12;

}  // namespace

Vec2 TrajectorySegment::position(double tau) const {
    return {poly(coeffs_x, tau), poly(coeffs_y, tau)};
}

Vec2 TrajectorySegment::velocity(double tau) const {
    return {dpoly(coeffs_x, tau), dpoly(coeffs_y, tau)};
}

Vec2 TrajectorySegment::acceleration(double tau) const {
    return {d2poly(coeffs_x, tau), d2poly(coeffs_y, tau)};
}

Vec2 TrajectorySegment::jerk() const {
    return {6.0 * coeffs_x[3], 6.0 * coeffs_y[3]};
}

void Trajectory::append(TrajectorySegment seg) {
    if (seg.duration < 0.0) {
        throw std::invalid_argument("Trajectory::append: negative segment duration");
    }
    if (!segments_.empty()) {
        const TrajectorySegment& last = segments_.back();
        double t_end = last.t0 + last.duration;
        seg.t0 = t_end;
        Vec2 dx = seg.position(0.0) - last.position(last.duration);
        Vec2 dv = seg.velocity(0.0) - last.velocity(last.duration);
        if (std::abs(dx.x) > kContinuityTol || std::abs(dx.y) > kContinuityTol) {
            throw std::invalid_argument("Trajectory::append: position discontinuity");
        }
        if (std::abs(dv.x) > kContinuityTol || std::abs(dv.y) > kContinuityTol) {
            throw std::invalid_argument("Trajectory::append: velocity discontinuity");
        }
    }
    segments_.push_back(seg);
}

void Trajectory::append_hold(double duration) {
    if (duration < 0.0) {
        throw std::invalid_argument("Trajectory::append_hold: negative duration");
    }
    MotionState end = final_state();
    TrajectorySegment seg;
    seg.t0 = end.t;
    seg.duration = duration;
    seg.coeffs_x = {end.x.x, end.v.x, 0.0, 0.0};
    seg.coeffs_y = {end.x.y, end.v.y, 0.0, 0.0};
    segments_.push_back(seg);
}

double Trajectory::start_time() const {
    return segments_.empty() ? 0.0 : segments_.front().t0;
}

double Trajectory::end_time() const {
    if (segments_.empty()) return 0.0;
    const TrajectorySegment& last = segments_.back();
    return last.t0 + last.duration;
}

MotionState Trajectory::initial_state() const {
    if (segments_.empty()) return {};
    const TrajectorySegment& s = segments_.front();
    return {s.t0, s.position(0.0), s.velocity(0.0), s.acceleration(0.0)};
}

MotionState Trajectory::final_state() const {
    if (segments_.empty()) return {};
    const TrajectorySegment& s = segments_.back();
    return {s.t0 + s.duration, s.position(s.duration), s.velocity(s.duration),
            s.acceleration(s.duration)};
}

MotionState Trajectory::state_at(double t) const {
    if (segments_.empty()) {
        return {t, {}, {}, {}};
    }
    if (t <= start_time()) {
        MotionState st = initial_state();
        st.t = t;
        st.a = {};
        return st;
    }
    if (t >= end_time()) {
        MotionState end = final_state();
        double dt = t - end.t;
        return {t, end.x + end.v * dt, end.v, {}};
    }
    // segments are contiguous: linear scan is fine at our segment counts
    for (const TrajectorySegment& s : segments_) {
        if (t <= s.t0 + s.duration) {
            double tau = t - s.t0;
            return {t, s.position(tau), s.velocity(tau), s.acceleration(tau)};
        }
    }
    MotionState end = final_state();
    end.t = t;
    return end;
}

Trajectory Trajectory::shifted(double dt, Vec2 dx) const {
    Trajectory out(label_);
    for (TrajectorySegment s : segments_) {
        s.t0 += dt;
        s.coeffs_x[0] += dx.x;
        s.coeffs_y[0] += dx.y;
        out.segments_.push_back(s);
    }
    return out;
}

std::string Trajectory::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const TrajectorySegment& s : segments_) {
        arr.push_back({{"t0", s.t0},
                       {"duration", s.duration},
                       {"coeffs_x", s.coeffs_x},
                       {"coeffs_y", s.coeffs_y}});
    }
    return arr.dump();
}

Trajectory Trajectory::from_json(const std::string& text) {
    nlohmann::json arr = nlohmann::json::parse(text);
    Trajectory out;
    for (const auto& j : arr) {
        TrajectorySegment s;
        s.t0 = j.at("t0").get<double>();
        s.duration = j.at("duration").get<double>();
        s.coeffs_x = j.at("coeffs_x").get<std::array<double, 4>>();
        s.coeffs_y = j.at("coeffs_y").get<std::array<double, 4>>();
        out.segments_.push_back(s);
    }
    return out;
}

Trajectory make_rest_to_rest_move(double distance, double duration, Vec2 axis) {
    if (duration <= 0.0) {
        throw std::invalid_argument("make_rest_to_rest_move: duration must be positive");
    }
    Vec2 u = axis.normalized();
    TrajectorySegment seg;
    seg.duration = duration;
    double c2 = 3.0 * distance / (duration * duration);
    double c3 = -2.0 * distance / (duration * duration * duration);
    seg.coeffs_x = {0.0, 0.0, c2 * u.x, c3 * u.x};
    seg.coeffs_y = {0.0, 0.0, c2 * u.y, c3 * u.y};
    Trajectory traj;
    traj.append(seg);
    return traj;
}

Trajectory make_velocity_ramp(double dv, double jerk, Vec2 axis) {
    if (jerk <= 0.0) {
        throw std::invalid_argument("make_velocity_ramp: jerk must be positive");
    }
    if (dv == 0.0) {
        return Trajectory{};
    }
    Vec2 u = axis.normalized();
    double T = std::sqrt(2.0 * std::abs(dv) / jerk);
    // x(t) = (dv/T) t^2 - dv/(3 T^2) t^3: v(0)=0, v(T)=dv, a(T)=0, |jerk| const
    TrajectorySegment seg;
    seg.duration = T;
    double c2 = dv / T;
    double c3 = -dv / (3.0 * T * T);
    seg.coeffs_x = {0.0, 0.0, c2 * u.x, c3 * u.x};
    seg.coeffs_y = {0.0, 0.0, c2 * u.y, c3 * u.y};
    Trajectory traj;
    traj.append(seg);
    return traj;
}

MotionState sample(const Trajectory& traj, double t) {
    return traj.state_at(t);
}

TransferCost zone_transfer_cost(double dv, double jerk) {
    if (jerk <= 0.0) {
        throw std::invalid_argument("zone_transfer_cost: jerk must be positive");
    }
    if (dv == 0.0) {
        return {0.0, 0.0};
    }
    double T = std::sqrt(2.0 * std::abs(dv) / jerk);
    return {T, 2.0 * std::abs(dv) * T / 3.0};
}

}  // namespace veloq::kinematics
