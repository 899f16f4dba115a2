#pragma once

#include <array>
#include <string>
#include <vector>

#include "veloq/geometry.hpp"

namespace veloq::kinematics {

// One cubic position segment per axis:
//   x(t0 + tau) = c0 + c1 tau + c2 tau^2 + c3 tau^3,  0 <= tau <= duration.
// Velocity/acceleration/jerk are exact polynomial derivatives.
struct TrajectorySegment {
    double t0 = 0.0;
    double duration = 0.0;
    std::array<double, 4> coeffs_x{};
    std::array<double, 4> coeffs_y{};

    Vec2 position(double tau) const;
    Vec2 velocity(double tau) const;
    Vec2 acceleration(double tau) const;
    Vec2 jerk() const;  // constant within a cubic segment
};

struct MotionState {
    double t = 0.0;
    Vec2 x{};
    Vec2 v{};
    Vec2 a{};
};

// Time-ordered, contiguous list of segments. Sampling before the first
// segment returns the initial state; sampling after the last extrapolates at
// the final velocity (atoms keep flying).
class Trajectory {
public:
    Trajectory() = default;
    explicit Trajectory(std::string label) : label_(std::move(label)) {}

    // Stitches seg onto the end; position/velocity continuity is enforced to
    // 1e-12 (absolute, in m and m/s).
    void append(TrajectorySegment seg);

    // Constant-velocity segment continuing the current end state.
    void append_hold(double duration);

    bool empty() const { return segments_.empty(); }
    double start_time() const;
    double end_time() const;
    double total_duration() const { return end_time() - start_time(); }

    MotionState state_at(double t) const;
    MotionState initial_state() const;
    MotionState final_state() const;

    const std::vector<TrajectorySegment>& segments() const { return segments_; }
    const std::string& label() const { return label_; }
    void set_label(std::string l) { label_ = std::move(l); }

    // Same shape shifted in time and offset in space.
    Trajectory shifted(double dt, Vec2 dx = {}) const;

    std::string to_json() const;
    static Trajectory from_json(const std::string& text);

private:
    std::vector<TrajectorySegment> segments_;
    std::string label_;
};

// Rest-to-rest cubic move: x(t) = d (3 s^2 - 2 s^3), s = t/T, along `axis`.
// Constant jerk magnitude 12|d|/T^3, peak velocity 3d/(2T) at t = T/2.
Trajectory make_rest_to_rest_move(double distance, double duration, Vec2 axis = {1.0, 0.0});

// Constant-jerk cubic ramp with v(0) = 0, v(T) = dv, a(T) = 0. The unique
// such cubic has T = sqrt(2|dv|/jerk) and covers distance 2 dv T / 3. Note
// a(0) = 2 dv / T is nonzero; the ramp is meant to be entered from rest and
// exited into a constant-velocity segment.
Trajectory make_velocity_ramp(double dv, double jerk, Vec2 axis = {1.0, 0.0});

MotionState sample(const Trajectory& traj, double t);

struct TransferCost {
    double time_s = 0.0;
    double distance_m = 0.0;
};

// Time and distance to accelerate between velocity zones dv apart at the
// given jerk.
TransferCost zone_transfer_cost(double dv, double jerk);

}  // namespace veloq::kinematics
