#include "veloq/pulsephysics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "veloq/constants.hpp"

namespace veloq::pulsephysics {

using std::complex;
using constants::pi;
using constants::two_pi;

Vec2 EffectiveKGeometry::effective_k() const {
    Vec2 k{};
    for (const BeamComponent& b : beams) {
        k += b.direction.normalized() * (static_cast<double>(b.sign) * two_pi / b.wavelength);
    }
    return k;
}

double doppler_detuning(const LaserField& field, Vec2 v) {
    return -field.k.dot(v);
}

double spectator_pi_pulse_infidelity(double d_over_lambda) {
    if (d_over_lambda < 0.0) {
        throw std::invalid_argument("spectator_pi_pulse_infidelity: d/lambda must be >= 0");
    }
    double u = 0.5 * pi * std::sqrt(1.0 + 4.0 * d_over_lambda * d_over_lambda);
    double sinc = std::sin(u) / u;
    return 0.25 * pi * pi * sinc * sinc;
}

double spectator_infidelity_zero(int order) {
    if (order < 1) {
        throw std::invalid_argument("spectator_infidelity_zero: order must be >= 1");
    }
    return 0.5 * std::sqrt(4.0 * static_cast<double>(order) * order - 1.0);
}

double zero_infidelity_velocity(double rabi, double lambda, int order) {
    if (rabi <= 0.0 || lambda <= 0.0) {
        throw std::invalid_argument("zero_infidelity_velocity: rabi and lambda must be positive");
    }
    if (order < 1) {
        throw std::invalid_argument("zero_infidelity_velocity: order must be >= 1");
    }
    return std::sqrt(4.0 * static_cast<double>(order) * order - 1.0) * rabi * lambda / two_pi;
}

namespace {

// exp(-i h H) for H = a I + b.sigma (Hermitian 2x2), exactly unitary.
Eigen::Matrix2cd expi(const Eigen::Matrix2cd& H, double h) {
    complex<double> a = 0.5 * (H(0, 0) + H(1, 1));
    double bx = H(0, 1).real();
    double by = -H(0, 1).imag();
    double bz = 0.5 * (H(0, 0) - H(1, 1)).real();
    double bn = std::sqrt(bx * bx + by * by + bz * bz);
    complex<double> phase = std::exp(complex<double>(0.0, -h * a.real()));
    double c = std::cos(bn * h);
    double s = bn > 0.0 ? std::sin(bn * h) / bn : h;
    complex<double> i{0.0, 1.0};
    Eigen::Matrix2cd U;
    U(0, 0) = phase * (c - i * s * bz);
    U(0, 1) = phase * (-i * s * (bx - i * by));
    U(1, 0) = phase * (-i * s * (bx + i * by));
    U(1, 1) = phase * (c + i * s * bz);
    return U;
}

Eigen::Matrix2cd hamiltonian(const LaserField& field, const kinematics::Trajectory& traj,
                             double t) {
    double omega = field.envelope.active(t) ? field.rabi : 0.0;
    double theta = field.k.dot(traj.state_at(t).x) + field.phase0;
    Eigen::Matrix2cd H;
    H(0, 0) = 0.0;
    H(0, 1) = 0.5 * omega * std::exp(complex<double>(0.0, theta));
    H(1, 0) = std::conj(H(0, 1));
    H(1, 1) = -field.detuning;
    return H;
}

double max_speed(const kinematics::Trajectory& traj, double t0, double t1) {
    double vmax = 0.0;
    const int n = 64;
    for (int i = 0; i <= n; ++i) {
        double t = t0 + (t1 - t0) * static_cast<double>(i) / n;
        vmax = std::max(vmax, traj.state_at(t).v.norm());
    }
    return vmax;
}

// 4th-order commutator-free Magnus step over [t, t+h] (two exact 2x2
// exponentials at Gauss-Legendre nodes).
void cf4_step(const LaserField& field, const kinematics::Trajectory& traj, double t, double h,
              Eigen::Vector2cd& psi) {
    static const double c1 = 0.5 - std::sqrt(3.0) / 6.0;
    static const double c2 = 0.5 + std::sqrt(3.0) / 6.0;
    static const double a1 = 0.25 + std::sqrt(3.0) / 6.0;
    static const double a2 = 0.25 - std::sqrt(3.0) / 6.0;
    Eigen::Matrix2cd H1 = hamiltonian(field, traj, t + c1 * h);
    Eigen::Matrix2cd H2 = hamiltonian(field, traj, t + c2 * h);
    psi = expi(a1 * H1 + a2 * H2, h) * psi;
    psi = expi(a2 * H1 + a1 * H2, h) * psi;
}

}  // namespace

namespace detail {

long default_step_count(const LaserField& field, const kinematics::Trajectory& traj, double t0,
                        double t1) {
    double duration = t1 - t0;
    double delta_max = std::abs(field.detuning) + field.k.norm() * max_speed(traj, t0, t1);
    double W = std::sqrt(field.rabi * field.rabi + delta_max * delta_max);
    double step = duration / 100.0;
    if (W > 0.0) step = std::min(step, two_pi / (200.0 * W));
    return static_cast<long>(std::ceil(duration / step));
}

TwoLevelState evolve_fixed_steps(const LaserField& field, const kinematics::Trajectory& traj,
                                 TwoLevelState state, double t0, double t1, long n_steps) {
    double h = (t1 - t0) / static_cast<double>(n_steps);
    Eigen::Vector2cd psi(state.g, state.e);
    for (long i = 0; i < n_steps; ++i) {
        cf4_step(field, traj, t0 + static_cast<double>(i) * h, h, psi);
    }
    return {psi(0), psi(1)};
}

}  // namespace detail

TwoLevelState evolve_two_level(const LaserField& field, const kinematics::Trajectory& traj,
                               TwoLevelState state, double t0, double t1) {
    if (t1 < t0) {
        throw std::invalid_argument("evolve_two_level: t1 must be >= t0");
    }
    double duration = t1 - t0;
    if (duration == 0.0) return state;
    if (duration < 1e-12 && field.rabi != 0.0) {
        throw std::runtime_error("evolve_two_level: step-size underflow (duration < 1e-12 s)");
    }
    return detail::evolve_fixed_steps(field, traj, state, t0, t1,
                                      detail::default_step_count(field, traj, t0, t1));
}

double spectroscopy_scan(const LaserField& field_template, Vec2 velocity,
                         const std::vector<double>& detunings) {
    if (detunings.size() < 3) {
        throw std::runtime_error("spectroscopy_scan: need at least 3 detunings");
    }
    kinematics::Trajectory traj;
    if (velocity.norm() > 0.0) {
        // constant-velocity flight established before the pulse window
        kinematics::TrajectorySegment seg;
        seg.t0 = -1.0;
        seg.duration = 2.0 + field_template.envelope.duration;
        seg.coeffs_x = {0.0, velocity.x, 0.0, 0.0};
        seg.coeffs_y = {0.0, velocity.y, 0.0, 0.0};
        traj.append(seg);
    }

    auto excited = [&](double delta) {
        LaserField f = field_template;
        f.detuning = delta;
        TwoLevelState out = evolve_two_level(f, traj, TwoLevelState{}, f.envelope.start,
                                             f.envelope.start + f.envelope.duration);
        return out.excited_population();
    };

    std::size_t best = 0;
    double best_pe = -1.0;
    std::vector<double> pe(detunings.size());
    for (std::size_t i = 0; i < detunings.size(); ++i) {
        pe[i] = excited(detunings[i]);
        if (pe[i] > best_pe) {
            best_pe = pe[i];
            best = i;
        }
    }
    if (best == 0 || best + 1 == detunings.size() || best_pe < 0.05) {
        throw std::runtime_error("spectroscopy_scan: no peak inside the scanned range");
    }

    // golden-section refinement of the symmetric peak
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = detunings[best - 1];
    double hi = detunings[best + 1];
    double x1 = hi - gr * (hi - lo);
    double x2 = lo + gr * (hi - lo);
    double f1 = excited(x1);
    double f2 = excited(x2);
    for (int it = 0; it < 80 && (hi - lo) > 1e-9 * std::max(1.0, std::abs(hi)); ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = excited(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = excited(x1);
        }
    }
    return 0.5 * (lo + hi);
}

double displacement_phase(Vec2 k_eff, Vec2 dx) {
    return k_eff.dot(dx);
}

Eigen::Matrix2cd axis_rotation(double angle, double az) {
    complex<double> i{0.0, 1.0};
    double c = std::cos(0.5 * angle);
    double s = std::sin(0.5 * angle);
    Eigen::Matrix2cd U;
    U(0, 0) = c;
    U(0, 1) = -i * s * std::exp(-i * az);
    U(1, 0) = -i * s * std::exp(i * az);
    U(1, 1) = c;
    return U;
}

Eigen::Matrix2cd raman_pulse_unitary(const LaserField& field, const kinematics::Trajectory& traj,
                                     MotionPolicy policy, double angle) {
    if (angle <= 0.0 || angle > two_pi) {
        throw std::invalid_argument("raman_pulse_unitary: angle must be in (0, 2pi]");
    }
    if (policy == MotionPolicy::kFrozenAtPulseCenter) {
        double t_center = field.envelope.start + 0.5 * field.envelope.duration;
        double az = field.phase0 + field.k.dot(traj.state_at(t_center).x);
        return axis_rotation(angle, az);
    }
    // Full integration on resonance in the qubit manifold. The two-photon
    // Raman coupling carries the spatial phase conjugated relative to the
    // single-beam optical convention of evolve_two_level, so the field enters
    // with k and phi0 negated; this makes the integrated rotation axis sit at
    // azimuth +(phi0 + k.x), matching the frozen approximation.
    LaserField f = field;
    f.k = field.k * -1.0;
    f.phase0 = -field.phase0;
    f.detuning = 0.0;
    f.envelope.duration = angle / f.rabi;
    Eigen::Matrix2cd U;
    for (int col = 0; col < 2; ++col) {
        TwoLevelState in;
        in.g = col == 0 ? 1.0 : 0.0;
        in.e = col == 0 ? 0.0 : 1.0;
        TwoLevelState out = evolve_two_level(f, traj, in, f.envelope.start,
                                             f.envelope.start + f.envelope.duration);
        U(0, col) = out.g;
        U(1, col) = out.e;
    }
    return U;
}

double dissipative_reset(const ResetParams& params) {
    double p = params.transfer_prob_per_pulse;
    double b = params.decay_branching_to_ground;
    if (p < 0.0 || p > 1.0 || b < 0.0 || b > 1.0) {
        throw std::invalid_argument("dissipative_reset: probabilities must be in [0,1]");
    }
    if (params.n_pulses < 0) {
        throw std::invalid_argument("dissipative_reset: n_pulses must be >= 0");
    }
    return 1.0 - std::pow(1.0 - p * b, params.n_pulses);
}

}  // namespace veloq::pulsephysics
