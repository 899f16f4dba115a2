#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "veloq/geometry.hpp"
#include "veloq/kinematics.hpp"

namespace veloq::pulsephysics {

// Rectangular pulse envelope (the only shape in v1; the analytic selectivity
// formulas assume constant Rabi frequency).
struct PulseEnvelope {
    double start = 0.0;
    double duration = 0.0;

    bool active(double t) const { return t >= start && t < start + duration; }
};

struct LaserField {
    Vec2 k{};              // wavevector, rad/m
    double rabi = 0.0;     // Omega, rad/s
    double detuning = 0.0; // lab-frame detuning from the stationary resonance, rad/s
    double phase0 = 0.0;   // rad
    PulseEnvelope envelope{};
};

// Multi-photon transitions: effective k is the signed sum of component
// wavevectors (+1 absorption, -1 stimulated emission).
struct BeamComponent {
    double wavelength = 0.0;
    Vec2 direction{};
    int sign = +1;
};

struct EffectiveKGeometry {
    std::vector<BeamComponent> beams;

    Vec2 effective_k() const;
};

struct TwoLevelState {
    std::complex<double> g{1.0, 0.0};
    std::complex<double> e{0.0, 0.0};

    double norm() const { return std::sqrt(std::norm(g) + std::norm(e)); }
    double excited_population() const { return std::norm(e); }
};

struct ResetParams {
    double transfer_prob_per_pulse = 0.0;  // [0,1]
    int n_pulses = 0;
    double wait = 40e-6;                      // s, long vs 3P1 lifetime
    double decay_branching_to_ground = 1.0;   // [0,1]
};

// Detuning shift seen in the frame of an atom moving at v: the laser
// frequency there is w' = w - k.v, so the shift is -k.v. An atom moving
// along +k (away from the source) sees a red shift. Addressing a moving atom
// on resonance therefore requires lab detuning equal to this return value.
double doppler_detuning(const LaserField& field, Vec2 v);

// Infidelity incurred on a stationary atom by a velocity-selective pi-pulse,
// as a function of the distance d the moving atoms travel during the pulse:
//   I(d/lambda) = pi^2 sinc^2( (pi/2) sqrt(1 + (2 d/lambda)^2) ) / 4,
// with sinc(x) = sin(x)/x. Zeros sit where the stationary atoms complete an
// exact 2pi generalized-Rabi rotation, d/lambda = sqrt(4k^2-1)/2.
double spectator_pi_pulse_infidelity(double d_over_lambda);

// Location of the k-th zero of the spectator infidelity in d/lambda.
double spectator_infidelity_zero(int order);

// Velocity at which a pi-pulse of Rabi frequency `rabi` on wavelength
// `lambda` leaves stationary atoms exactly unrotated (order-k zero):
//   v_k = sqrt(4 k^2 - 1) * Omega * lambda / (2 pi).
double zero_infidelity_velocity(double rabi, double lambda, int order);

// Rotating-frame two-level evolution with the atom following `traj`:
//   H(t)/hbar = -delta |e><e| + (Omega/2)(e^{-i(k.x(t)+phi0)} |e><g| + h.c.)
// integrated with a fixed-step 4th-order commutator-free Magnus scheme
// (unitary per step). The step is capped at min(2pi/(200 W), duration/100)
// with W = sqrt(Omega^2 + delta_max^2), tighter than needed for 4th order so
// that halving it changes populations at the 1e-8 level or below.
TwoLevelState evolve_two_level(const LaserField& field, const kinematics::Trajectory& traj,
                               TwoLevelState state, double t0, double t1);

// Simulates P_e(detuning) for a pi-pulse on an atom moving at constant
// velocity and returns the fitted resonance center. The scan grid must
// bracket the peak; the center is refined by golden-section search on the
// continuous lineshape.
double spectroscopy_scan(const LaserField& field_template, Vec2 velocity,
                         const std::vector<double>& detunings);

// Phase acquired by a qubit displaced by dx along the control beam:
// k_eff . dx.
double displacement_phase(Vec2 k_eff, Vec2 dx);

enum class MotionPolicy {
    kFrozenAtPulseCenter,  // axis phase = k_eff . x(t_center)
    kFullIntegration,      // resonant two-level integration along traj
};

// Global Raman pulse of the given rotation angle acting on an atom that
// follows `traj`: a rotation about an equatorial axis at azimuth
// phi0 + k_eff . x. In frozen mode the position is sampled once at the pulse
// center; full integration reproduces it when |k_eff . v| << Omega.
Eigen::Matrix2cd raman_pulse_unitary(const LaserField& field, const kinematics::Trajectory& traj,
                                     MotionPolicy policy, double angle);

// Rotation by `angle` about the equatorial axis at azimuth `az`.
Eigen::Matrix2cd axis_rotation(double angle, double az);

// Ground-state transfer probability of the pulsed dissipative reset:
// 1 - (1 - p b)^n. Decay is assumed complete within each wait window.
double dissipative_reset(const ResetParams& params);

namespace detail {

// Step-count hooks for convergence tests.
long default_step_count(const LaserField& field, const kinematics::Trajectory& traj, double t0,
                        double t1);
TwoLevelState evolve_fixed_steps(const LaserField& field, const kinematics::Trajectory& traj,
                                 TwoLevelState state, double t0, double t1, long n_steps);

}  // namespace detail

}  // namespace veloq::pulsephysics
